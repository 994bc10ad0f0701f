import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergkit import domains as dom
from bergkit import geometry
from bergkit.errors import DegenerateSystemError
from bergkit.kernel import build_kernel, build_orthonormal_system, default_probes, kernel_eval
from bergkit.minint import bergman_fuks, minimum_integral, minimum_integrals

DISK = dom.Ball(1, 1.0)


@pytest.fixture(scope="module")
def disk_system():
    return build_orthonormal_system(DISK, dom.Unit(), 16)


class TestDiskValues:
    def test_order_zero(self, disk_system):
        # minimizer u = 1, ‖1‖^2 = π
        assert minimum_integral(disk_system, [0.0], order=0).value == pytest.approx(math.pi, rel=1e-12)

    def test_order_one(self, disk_system):
        # minimizer u = z, ‖z‖^2 = π/2
        assert minimum_integral(disk_system, [0.0], [1.0], 1).value == pytest.approx(math.pi / 2, rel=1e-12)

    def test_order_two(self, disk_system):
        # minimizer u = z^2/2, ‖z^2‖^2/4 = π/12
        res = minimum_integral(disk_system, [0.0], [1.0], 2)
        assert res.value == pytest.approx(math.pi / 12, rel=1e-12)
        assert res.constraint_residual < 1e-12


class TestBergmanFuks:
    def test_disk_triple(self):
        K, g, H = bergman_fuks(math.pi, math.pi / 2, math.pi / 12)
        assert (K, g, H) == pytest.approx((1 / math.pi, 2.0, -1.0), rel=1e-14)

    def test_unit_triple(self):
        assert bergman_fuks(1.0, 1.0, 1.0) == (1.0, 1.0, 1.0)

    def test_nonpositive(self):
        with pytest.raises(DegenerateSystemError):
            bergman_fuks(1.0, 0.0, 1.0)

    def test_weighted_disk_constant_curvature(self):
        s = build_orthonormal_system(DISK, dom.RadialPower(3, 1.0), 60)
        for p in ([0.0], [0.3], [0.4j]):
            assert bergman_fuks(*minimum_integrals(s, p, [1.0]))[2] == pytest.approx(-2 / 5, abs=1e-8)


@pytest.mark.parametrize("domain", [DISK, dom.Annulus(0.3, 1.0), dom.ellipse(1.0, 0.6)])
def test_cross_route(domain):
    # the grid tier of the ellipse is accurate to about 1e-6, so it gets a looser gate
    tol = 1e-8 if isinstance(domain, dom.GeneralPlanar) else 1e-10
    model = build_kernel(domain, dom.Unit(), default_probes(domain), tol=tol)
    for p in default_probes(domain):
        X = [1.0]
        K, g, H = bergman_fuks(*minimum_integrals(model.system, p, X))
        k_ref = kernel_eval(model, p, p).real
        assert abs(K - k_ref) / k_ref <= 1e-6
        g_ref = geometry.metric_from_kernel(model, p, X)
        assert abs(g - g_ref) / g_ref <= 1e-6
        assert abs(H - geometry.hsc_from_kernel(model, p, X)) <= 1e-5


def test_weight_scaling(disk_system):
    scaled = build_orthonormal_system(DISK, dom.Unit(scale=2.5), 16)
    p, X = [0.2 + 0.1j], [1.0]
    base = minimum_integrals(disk_system, p, X)
    other = minimum_integrals(scaled, p, X)
    np.testing.assert_allclose(other, 2.5 * np.array(base), rtol=1e-12)
    np.testing.assert_allclose(bergman_fuks(*other)[1:], bergman_fuks(*base)[1:], rtol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.2, 5.0), st.floats(0, 2 * math.pi))
def test_direction_scaling(c_abs, c_arg):
    s = build_orthonormal_system(dom.Ball(2, 1.0), dom.Unit(), 6)
    c = c_abs * np.exp(1j * c_arg)
    p, X = [0.1, 0.2j], np.array([1.0, 0.5 - 0.2j])
    I0, I1, I2 = minimum_integrals(s, p, X)
    J0, J1, J2 = minimum_integrals(s, p, c * X)
    assert J0 == pytest.approx(I0, rel=1e-12)
    assert J1 == pytest.approx(I1 / c_abs**2, rel=1e-10)
    assert J2 == pytest.approx(I2 / c_abs**4, rel=1e-10)
    g, H = bergman_fuks(I0, I1, I2)[1:], bergman_fuks(J0, J1, J2)[1:]
    assert H[0] == pytest.approx(g[0] * c_abs**2, rel=1e-10)
    assert H[1] == pytest.approx(g[1], abs=1e-10)


def test_monotone_refinement():
    p, X = [0.3 + 0.2j], [1.0]
    prev = None
    for d in (2, 4, 8, 16):
        vals = np.array(minimum_integrals(build_orthonormal_system(dom.ellipse(1.0, 0.6), dom.Unit(), d), p, X))
        if prev is not None:
            assert np.all(vals <= prev * (1 + 1e-10))
        prev = vals

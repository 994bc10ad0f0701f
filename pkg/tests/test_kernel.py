import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergkit import domains as dom
from bergkit import numerics
from bergkit.errors import DomainError
from bergkit.kernel import (
    build_kernel,
    build_orthonormal_system,
    default_probes,
    kernel_eval,
    radial_tail,
    reproducing_residual,
    transformation_check,
)

DISK = dom.Ball(1, 1.0)


def disk_kernel(z, w):
    """Classic disk kernel 1/(π (1 - z w̄)^2) from the geometric series Σ (k+1) t^k."""
    return 1.0 / (math.pi * (1 - z * np.conj(w)) ** 2)


@pytest.fixture(scope="module")
def disk_model():
    return build_kernel(DISK, dom.Unit(), degree=40)


class TestOrthonormalSystem:
    def test_disk_unit_degree_two(self):
        s = build_orthonormal_system(DISK, dom.Unit(), 2)
        z = np.array([[0.3 + 0.2j], [-0.5j]])
        expected = np.stack([z[:, 0] ** k * math.sqrt((k + 1) / math.pi) for k in range(3)], axis=1)
        np.testing.assert_allclose(np.abs(s.values(z)), np.abs(expected), rtol=1e-12)

    def test_ball_degree_one_orthogonal(self):
        s = build_orthonormal_system(dom.Ball(2, 1.0), dom.Unit(), 1)
        assert s.size == 3
        # ‖1‖^2 = π^2/2, ‖z_j‖^2 = π^2/6
        np.testing.assert_allclose(sorted(np.diag(np.abs(s.coeffs)) ** -2), sorted([math.pi**2 / 6] * 2 + [math.pi**2 / 2]), rtol=1e-12)
        assert s.orthonormality_defect() < 1e-12

    def test_weighted_constant(self):
        s = build_orthonormal_system(DISK, dom.RadialPower(2, 1.0), 0)
        assert abs(s.values(np.zeros((1, 1)))[0, 0]) == pytest.approx(1 / math.sqrt(math.pi / 3), rel=1e-12)

    @pytest.mark.parametrize(
        "domain, weight, degree",
        [
            (dom.ellipse(1.0, 0.6), dom.Unit(), 10),
            (dom.Annulus(0.3, 1.0), dom.Unit(), 12),
            (dom.Polydisc((1.0, 0.7)), dom.Unit(), 6),
            (DISK, dom.PotentialWeight(dom.QuadraticPotential(1), 2.0), 12),
        ],
    )
    def test_gram_identity(self, domain, weight, degree):
        s = build_orthonormal_system(domain, weight, degree)
        assert s.orthonormality_defect() <= 1e-8


class TestKernelEval:
    def test_disk_center(self, disk_model):
        assert kernel_eval(disk_model, 0.0, 0.0).real == pytest.approx(1 / math.pi, rel=1e-12)

    def test_disk_half(self, disk_model):
        assert kernel_eval(disk_model, 0.5, 0.5).real == pytest.approx(16 / (9 * math.pi), rel=1e-10)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0, 0.6), st.floats(0, 2 * math.pi), st.floats(0, 0.6), st.floats(0, 2 * math.pi))
    def test_conjugate_symmetry_and_closed_form(self, r1, t1, r2, t2):
        model = build_kernel(DISK, dom.Unit(), degree=60)
        z, w = r1 * np.exp(1j * t1), r2 * np.exp(1j * t2)
        kzw, kwz = kernel_eval(model, z, w), kernel_eval(model, w, z)
        assert abs(kzw - np.conj(kwz)) <= 1e-14 * abs(kzw)
        assert abs(kzw - disk_kernel(z, w)) <= 1e-8 * abs(disk_kernel(z, w))

    def test_outside_rejected(self, disk_model):
        with pytest.raises(DomainError):
            kernel_eval(disk_model, 1.2, 0.0)

    @pytest.mark.parametrize("domain", [DISK, dom.Annulus(0.3, 1.0), dom.ellipse(1.0, 0.5), dom.Polydisc((1.0, 1.0))])
    def test_positive(self, domain):
        model = build_kernel(domain, dom.Unit(), degree=8)
        assert np.all(model.diag(default_probes(domain)) > 0)

    def test_monotone_in_degree(self):
        probes = default_probes(dom.ellipse(1.0, 0.5))
        rule = numerics.build_quadrature(dom.ellipse(1.0, 0.5), 48)
        prev = None
        for d in (2, 4, 6, 8):
            k = build_kernel(rule.domain, dom.Unit(), degree=d, rule=rule).diag(probes)
            if prev is not None:
                assert np.all(k >= prev * (1 - 1e-12))
            prev = k

    @pytest.mark.parametrize("domain", [DISK, dom.Ball(2, 1.0), dom.Annulus(0.3, 1.0)])
    def test_resolution_doubling(self, domain):
        probes = default_probes(domain)
        a = build_kernel(domain, dom.Unit(), degree=16, rule=numerics.build_quadrature(domain, 32)).diag(probes)
        b = build_kernel(domain, dom.Unit(), degree=16, rule=numerics.build_quadrature(domain, 64)).diag(probes)
        assert np.max(np.abs(a - b) / b) <= 1e-8

    def test_annulus_laurent(self):
        # K(z, z) = Σ_k |z|^{2k} / ‖z^k‖^2 with ‖z^k‖^2 = π (1 - ρ^{2k+2})/(k+1), k ≠ -1,
        # and ‖z^{-1}‖^2 = 2π log(1/ρ)
        rho = 0.3
        model = build_kernel(dom.Annulus(rho, 1.0), dom.Unit(), [[0.6]], tol=1e-13)
        z = 0.6
        total = 1 / (2 * math.pi * math.log(1 / rho) * z * z)
        for k in range(400):
            total += z ** (2 * k) * (k + 1) / (math.pi * (1 - rho ** (2 * k + 2)))
        for j in range(1, 400):
            # k = -j - 1, rewritten without overflow
            total += j * (rho * rho / (z * z)) ** j / (math.pi * z * z * (1 - rho ** (2 * j)))
        assert model.diag([[z]])[0] == pytest.approx(total, rel=1e-10)


class TestRadialTail:
    @pytest.mark.parametrize("n, m", [(1, 0), (1, 4), (2, 1)])
    def test_completes_ball_kernel(self, n, m):
        model = build_kernel(dom.Ball(n, 1.0), dom.RadialPower(m, 1.0), degree=12, tail=True)
        assert model.tail is not None
        for t in (0.0, 0.5, 0.9, 0.999):
            z = np.zeros((1, n), dtype=complex)
            z[0, 0] = t
            # (n+m)!/(π^n m!) (1 - t^2)^{-(n+m+1)}
            exact = math.factorial(n + m) / (math.pi**n * math.factorial(m)) * (1 - t * t) ** (-(n + m + 1))
            assert model.diag(z)[0] == pytest.approx(exact, rel=1e-10)

    def test_not_applied_off_ball(self):
        s = build_orthonormal_system(dom.Polydisc((1.0, 1.0)), dom.Unit(), 6)
        assert radial_tail(s) is None
        s = build_orthonormal_system(DISK, dom.Unit(), 6, center=[0.1])
        assert radial_tail(s) is None


class TestReproducing:
    def test_constant(self, disk_model):
        assert reproducing_residual(disk_model, {(0,): 1.0}, [0.0]) <= 1e-10

    def test_in_span(self):
        model = build_kernel(DISK, dom.Unit(), degree=8)
        assert reproducing_residual(model, {(5,): 1.0}, [0.3]) <= 1e-8

    def test_out_of_span_reported(self):
        model = build_kernel(DISK, dom.Unit(), degree=4)
        assert reproducing_residual(model, {(5,): 1.0}, [0.3]) > 1e-4


class TestTransformation:
    def test_identity(self, disk_model):
        pairs = [(0.1, 0.2j), (0.3, -0.4)]
        res = transformation_check(disk_model, disk_model, lambda z: z, lambda z: 1.0, pairs)
        assert res <= 1e-14

    @pytest.mark.parametrize("a", [0.3, 0.5, 0.5j])
    def test_moebius(self, disk_model, a):
        F = lambda z: (z - a) / (1 - np.conj(a) * z)  # noqa: E731
        J = lambda z: (1 - abs(a) ** 2) / (1 - np.conj(a) * np.asarray(z)) ** 2  # noqa: E731
        rng = np.random.default_rng(3)
        pairs = [tuple(0.5 * rng.uniform(0, 1, 2) * np.exp(2j * np.pi * rng.uniform(0, 1, 2))) for _ in range(10)]
        assert transformation_check(disk_model, disk_model, F, J, pairs) <= 1e-8

    def test_moebius_center_value(self, disk_model):
        a = 0.5
        # K(0) = K(-a) |F'(0)|^2 with F'(0) = 1 - |a|^2
        assert kernel_eval(disk_model, -a, -a).real * (1 - a * a) ** 2 == pytest.approx(1 / math.pi, rel=1e-8)

    @pytest.mark.parametrize("r, m", [(2.0, 0), (0.5, 2)])
    def test_dilation(self, r, m):
        src = build_kernel(dom.Ball(1, r), dom.RadialPower(m, r), degree=40)
        tgt = build_kernel(DISK, dom.RadialPower(m, 1.0), degree=40)
        pairs = [(0.1 * r, 0.2j * r), (0.3 * r, -0.5 * r), (0.0, 0.4 * r)]
        res = transformation_check(src, tgt, lambda z: np.asarray(z) / r, lambda z: 1 / r, pairs)
        assert res <= 1e-8

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergkit import domains as dom
from bergkit.errors import DomainError


def test_contains():
    assert dom.contains(dom.Ball(1, 1.0), 0.0)
    assert not dom.contains(dom.Ball(1, 1.0), 1.5)
    assert not dom.contains(dom.Annulus(0.3, 1.0), 0.1)
    assert dom.contains(dom.Polydisc((1.0, 2.0)), [0.9, 1.9])
    assert not dom.contains(dom.Polydisc((1.0, 2.0)), [1.1, 0.0])


def test_invalid_domains():
    with pytest.raises((ValueError, DomainError)):
        dom.Annulus(1.0, 0.5)
    with pytest.raises((ValueError, DomainError)):
        dom.Ball(1, -1.0)


class TestWeightEval:
    def test_radial_power(self):
        w = dom.RadialPower(2, 1.0)
        assert dom.weight_eval(w, 0.0) == pytest.approx(1.0)
        assert dom.weight_eval(w, math.sqrt(0.5)) == pytest.approx(0.25, rel=1e-14)

    def test_potential_weight_at_origin(self):
        w = dom.PotentialWeight(dom.BallPotential(1, 1.0), 3)
        assert dom.weight_eval(w, 0.0) == pytest.approx(1.0)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 6), st.floats(0.5, 3.0), st.floats(0.0, 0.99), st.floats(0, 2 * math.pi))
    def test_radial_power_is_unit_times_defect(self, m, r, frac, theta):
        z = frac * r * np.exp(1j * theta)
        lhs = dom.weight_eval(dom.RadialPower(m, r), z)
        rhs = dom.weight_eval(dom.Unit(), z) * ((r * r - abs(z) ** 2) / (r * r)) ** m
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-300)


class TestPotentialJet:
    def test_quadratic(self):
        jet = dom.potential_jet(dom.QuadraticPotential(1), [0.0])
        assert jet[(1,), (1,)] == pytest.approx(1.0)
        for (a, b), v in jet.derivs.items():
            if sum(a) + sum(b) == 4:
                assert abs(v) < 1e-14

    def test_disk_log(self):
        jet = dom.potential_jet(dom.BallPotential(1, 1.0), [0.0])
        assert jet[(1,), (1,)] == pytest.approx(1.0, rel=1e-8)
        assert jet[(2,), (2,)] == pytest.approx(2.0, rel=1e-8)

    def test_ball_log(self):
        jet = dom.potential_jet(dom.BallPotential(2, 1.0), [0.0, 0.0])
        np.testing.assert_allclose(jet.hessian(), np.eye(2), atol=1e-12)

    @pytest.mark.parametrize("p", [[0.3 + 0.1j], [-0.5j]])
    def test_disk_log_off_center(self, p):
        # with s = |z|^2: φ_{zz̄} = (1-s)^{-2} and φ_{zz̄zz̄} = 2(1+2s)(1-s)^{-4}
        s = abs(p[0]) ** 2
        jet = dom.potential_jet(dom.BallPotential(1, 1.0), p)
        assert jet[(1,), (1,)] == pytest.approx(1 / (1 - s) ** 2, rel=1e-8)
        assert jet[(2,), (2,)].real == pytest.approx(2 * (1 + 2 * s) / (1 - s) ** 4, rel=1e-8)

    def test_fd_route_matches_analytic(self):
        analytic = dom.potential_jet(dom.BallPotential(1, 1.0), [0.2])
        fd = dom.potential_jet(dom.CallablePotential(lambda z: -np.log1p(-np.sum(np.abs(z) ** 2, axis=-1)), 1), [0.2])
        for key, v in analytic.derivs.items():
            assert abs(fd[key] - v) <= 1e-6 * max(1.0, abs(v))

    @pytest.mark.parametrize("pot, p", [(dom.BallPotential(2, 1.0), [0.1, 0.2j]), (dom.KEPotential(dom.Polydisc((1.0, 1.0))), [0.3, -0.1])])
    def test_hermitian_symmetry(self, pot, p):
        jet = dom.potential_jet(pot, p)
        assert jet.hermitian_defect() == 0.0

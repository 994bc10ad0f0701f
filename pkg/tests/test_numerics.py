import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergkit import domains as dom
from bergkit import numerics
from bergkit.errors import InfeasibleConstraintError, NotPositiveSemidefiniteError

DISK = dom.Ball(1, 1.0)


class TestRadialMoment:
    def test_disk_area(self):
        assert numerics.radial_moment(DISK, dom.Unit(), (0,)) == pytest.approx(math.pi, rel=1e-12)

    def test_weighted_volume(self):
        # π·2!/3! for the weight (1-|z|^2)^2
        assert numerics.radial_moment(DISK, dom.RadialPower(2, 1.0), (0,)) == pytest.approx(math.pi / 3, rel=1e-12)

    def test_first_moment(self):
        # 2π ∫_0^1 r^3 dr
        assert numerics.radial_moment(DISK, dom.Unit(), (1,)) == pytest.approx(math.pi / 2, rel=1e-12)

    @pytest.mark.parametrize("domain", [DISK, dom.Ball(2, 1.0), dom.Annulus(0.3, 1.0), dom.Polydisc((1.0, 0.5))])
    def test_matches_rule(self, domain):
        rule = numerics.build_quadrature(domain, 32)
        tol = max(1e-10, rule.reported_accuracy)
        n = domain.n
        for a in [(0,) * n, (1,) * n, (3,) + (0,) * (n - 1), (2,) * n]:
            if isinstance(domain, dom.Annulus):
                a = (a[0],)
            mono = np.prod(np.abs(rule.nodes) ** (2 * np.array(a)), axis=1)
            direct = rule.integrate(mono).real
            assert direct == pytest.approx(numerics.radial_moment(domain, dom.Unit(), a), rel=tol)


class TestBuildQuadrature:
    @pytest.mark.parametrize("res", [8, 16, 64])
    def test_disk_area_and_second_moment(self, res):
        rule = numerics.build_quadrature(DISK, res)
        assert abs(rule.integrate(np.ones(rule.size)).real - math.pi) <= 1e-12
        assert abs(rule.integrate(np.abs(rule.nodes[:, 0]) ** 2).real - math.pi / 2) <= 1e-12

    def test_annulus_area(self):
        rule = numerics.build_quadrature(dom.Annulus(0.3, 1.0), 32)
        assert rule.integrate(np.ones(rule.size)).real == pytest.approx(math.pi * (1 - 0.09), rel=1e-12)

    @pytest.mark.parametrize(
        "domain, vol",
        [
            (DISK, math.pi),
            (dom.Ball(2, 1.5), math.pi**2 * 1.5**4 / 2),
            (dom.Polydisc((1.0, 2.0)), 4 * math.pi**2),
            (dom.Annulus(0.3, 1.0), math.pi * 0.91),
            (dom.ellipse(1.0, 0.5), math.pi * 0.5),
        ],
    )
    def test_volume_within_reported_accuracy(self, domain, vol):
        rule = numerics.build_quadrature(domain, 24)
        # the self-test sums weights in a different order, hence the rounding slack
        assert abs(rule.integrate(np.ones(rule.size)).real - vol) / vol <= rule.reported_accuracy + 1e-12

    def test_weights_positive_and_nodes_inside(self):
        rule = numerics.build_quadrature(dom.ellipse(1.0, 0.5), 24)
        assert np.all(rule.weights > 0)
        assert np.all(dom.contains(rule.domain, rule.nodes))


class TestConstrainedMinNorm:
    def test_unit_constraint(self):
        c, val = numerics.constrained_min_norm(np.array([[1.0, 0.0, 0.0]]), np.array([1.0]))
        assert val == pytest.approx(1.0)
        np.testing.assert_allclose(c, [1, 0, 0], atol=1e-15)

    def test_disk_first_order(self):
        # orthonormal u_1 = z sqrt(2/π): the constraint u'(0) = 1 has row sqrt(2/π) on u_1
        norms = np.array([math.pi, math.pi / 2, math.pi / 3])
        A = np.array([[0.0, 1.0 / math.sqrt(norms[1]), 0.0]])
        _, val = numerics.constrained_min_norm(A, np.array([1.0]))
        assert val == pytest.approx(math.pi / 2, rel=1e-14)

    def test_infeasible(self):
        with pytest.raises(InfeasibleConstraintError):
            numerics.constrained_min_norm(np.array([[1.0, 0.0], [1.0, 0.0]]), np.array([1.0, 2.0]))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 4), st.integers(0, 6), st.integers(0, 2**31 - 1))
    def test_solution_in_row_space(self, k, extra, seed):
        rng = np.random.default_rng(seed)
        N = k + extra
        A = rng.normal(size=(k, N)) + 1j * rng.normal(size=(k, N))
        b = rng.normal(size=k) + 1j * rng.normal(size=k)
        c, val = numerics.constrained_min_norm(A, b)
        np.testing.assert_allclose(A @ c, b, atol=1e-10 * np.linalg.norm(b) * np.linalg.cond(A))
        # c = A^H y for some y
        y, *_ = np.linalg.lstsq(A.conj().T, c, rcond=None)
        assert np.linalg.norm(A.conj().T @ y - c) <= 1e-10 * max(1.0, np.linalg.norm(c))
        assert val == pytest.approx(np.vdot(c, c).real)


class TestPivotedFactorization:
    def test_identity(self):
        f = numerics.pivoted_factorization(np.eye(4))
        assert sorted(f.retained) == [0, 1, 2, 3] and not f.dropped
        np.testing.assert_allclose(np.abs(f.factor), np.eye(4), atol=1e-15)

    def test_disk_pair(self):
        f = numerics.pivoted_factorization(np.diag([math.pi, math.pi / 2]))
        assert sorted(f.retained) == [0, 1]
        assert np.count_nonzero(np.abs(f.factor) > 0) == 2

    def test_duplicate_dropped(self):
        v = np.array([[1.0, 0.5, 0.2], [0.5, 2.0, 0.1]])
        G = v.T @ v + np.diag([1.0, 0.0, 0.0])
        G = np.block([[G, G[:, :1]], [G[:1, :], G[:1, :1]]])
        f = numerics.pivoted_factorization(G)
        assert len(f.dropped) >= 1

    def test_negative_rejected(self):
        with pytest.raises(NotPositiveSemidefiniteError):
            numerics.pivoted_factorization(np.diag([1.0, -1.0]))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 8), st.integers(0, 3), st.integers(0, 2**31 - 1))
    def test_reconstruction(self, rank, extra, seed):
        rng = np.random.default_rng(seed)
        N = rank + extra
        V = rng.normal(size=(rank, N)) + 1j * rng.normal(size=(rank, N))
        G = V.conj().T @ V
        f = numerics.pivoted_factorization(G, drop_tol=1e-12)
        r = f.retained
        err = np.linalg.norm(G[np.ix_(r, r)] - f.reconstruct())
        assert err <= 1e-12 * np.trace(G).real * 10

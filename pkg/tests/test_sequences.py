import math

import numpy as np
import pytest

from bergkit import domains as dom
from bergkit import oracles, sequences
from bergkit.errors import IterationFailure
from bergkit.sequences import SequenceRecord

DISK = dom.Ball(1, 1.0)
BALL2 = dom.Ball(2, 1.0)


@pytest.fixture(scope="module")
def disk_tyz():
    return sequences.tian_sweep(DISK, dom.BallPotential(1, 1.0), (10, 20, 40, 80))


@pytest.fixture(scope="module")
def ball_tyz():
    return sequences.tian_sweep(BALL2, dom.BallPotential(2, 1.0), (10, 20, 40, 80))


@pytest.fixture(scope="module")
def records():
    return sequences.tian_ke_sweep(DISK, (5, 10, 40), curvature=False)


@pytest.fixture(scope="module")
def disk_states():
    return sequences.tsuji_iterate(DISK, 6)


class TestTian:
    def test_disk_center_ratio(self, disk_tyz):
        for rec in disk_tyz:
            assert rec.computed["K"][0] == pytest.approx((rec.m + 1) / rec.m, rel=1e-8)

    def test_ball_center_ratio(self, ball_tyz):
        for rec in ball_tyz:
            m = rec.m
            assert rec.computed["K"][0] == pytest.approx((1 + 1 / m) * (1 + 2 / m), rel=1e-8)

    def test_disk_metric_line(self, disk_tyz):
        # weight (1-|z|^2)^m gives g(0) = m + 2 while g_φ(0) = 1
        for rec in disk_tyz:
            assert rec.computed["g"][0] * rec.m == pytest.approx(rec.m + 2, rel=1e-6)

    def test_fits(self, disk_tyz, ball_tyz):
        assert sequences.fit_expansion_coefficient(disk_tyz)[0] == pytest.approx(-2.0, rel=0.02)
        assert sequences.fit_expansion_coefficient(ball_tyz)[0] == pytest.approx(-6.0, rel=0.02)

    def test_fit_on_constant_ratio(self):
        recs = [SequenceRecord("tyz", m, np.zeros((1, 1)), {"K": np.ones(1)}, {"K": np.ones(1)}) for m in (10, 20, 40)]
        assert sequences.fit_expansion_coefficient(recs)[0] == pytest.approx(0.0, abs=1e-15)

    def test_curvature_rescaling(self, disk_tyz):
        # m H_m -> H_φ = -2: the weighted disk has H = -2/(m+2) exactly
        for rec in disk_tyz:
            assert rec.computed["H"][0] == pytest.approx(-2 * rec.m / (rec.m + 2), abs=1e-8)


def _ke_closed_form(m):
    return 2 ** (-1 / m) * ((2 * m - 1) / math.pi) ** (1 / m)


class TestTianKE:
    def test_ratio_constant_and_closed_form(self, records):
        for rec in records:
            ratio = rec.computed["K"] / rec.oracle["K"]
            assert np.ptp(ratio) <= 1e-8
            np.testing.assert_allclose(ratio, _ke_closed_form(rec.m), rtol=1e-8)

    def test_error_at_forty(self, records):
        assert records[-1].sup_err("K") == pytest.approx(0.065, abs=0.005)

    def test_limit_is_one(self):
        assert _ke_closed_form(10**8) == pytest.approx(1.0, abs=1e-6)

    def test_invariance(self):
        pairs = [(0.1, 0.3j), (-0.2, 0.25), (0.4j, 0.0)]
        assert sequences.ke_invariance_defect(4, 0.3 + 0.2j, pairs) <= 1e-8


class TestTsuji:
    def test_second_weight(self, disk_states):
        st = disk_states[1]
        s = np.abs(st.rule.nodes[:, 0]) ** 2
        np.testing.assert_allclose(st.weight.values, (1 - s) ** 2 / 2, rtol=1e-10)
        assert st.kernel([[0.0]])[0] == pytest.approx(6 / math.pi, rel=1e-10)

    def test_radial(self, disk_states):
        assert max(st.radial_spread for st in disk_states) <= 1e-9

    def test_matches_closed_form(self, disk_states):
        probes = sequences.tsuji_probes(DISK)
        for st in disk_states:
            exact = [sequences.tsuji_normalized_closed_form(1, st.m, z) for z in probes]
            np.testing.assert_allclose(st.kernel(probes), exact, rtol=1e-8)

    def test_product_convention_value(self, disk_states):
        # (1/2) log((3/2π)(6/π)) - log 2 = log(3/π) - log 2
        err, _ = sequences.tsuji_error(disk_states[1], DISK, [[0.0]], convention="product")
        assert err[0] == pytest.approx(math.log(3 / math.pi) - math.log(2), abs=1e-10)
        assert err[0] == pytest.approx(-0.739, abs=5e-4)

    def test_theorem_convention_vanishes(self, disk_states):
        # on the disk the normalised iterate equals N_m det(g^KE)^m exactly
        for st in disk_states:
            assert sequences.tsuji_error(st, DISK, sequences.tsuji_probes(DISK))[1] <= 1e-10

    def test_unnormalized_ball_center(self):
        for st in sequences.tsuji_iterate(BALL2, 3, normalized=False):
            assert st.kernel([[0.0, 0.0]])[0] == pytest.approx(math.exp(oracles.log_tsuji_center(2, st.m)), rel=1e-10)

    def test_normalized_ball_fails_at_first_step(self):
        # N_1 = (1/π)^2 (1 - 2/2) = 0
        with pytest.raises(IterationFailure) as info:
            sequences.tsuji_iterate(BALL2, 2)
        assert info.value.step == 1

    def test_truncation_without_tail(self):
        # plain truncation cannot carry the outer nodes; the error is visible by step 3
        states = sequences.tsuji_iterate(DISK, 3, tail=False)
        probes = sequences.tsuji_probes(DISK)
        exact = [sequences.tsuji_normalized_closed_form(1, 3, z) for z in probes]
        assert np.max(np.abs(states[-1].kernel(probes) / exact - 1)) > 1e-6


class TestRatioBounds:
    def test_second(self):
        assert sequences.ratio_bounds(1, 1.0, 2).D == pytest.approx(1 / 3, rel=1e-14)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_first(self, n):
        assert sequences.ratio_bounds(n, 1.0, 1).D == pytest.approx(1 / math.factorial(n), rel=1e-14)

    def test_center_kernel(self):
        b = sequences.ratio_bounds(1, 1.0, 2)
        assert 1 / (math.pi**2 * b.D) == pytest.approx(3 / math.pi**2, rel=1e-14)

    def test_bracket_order(self):
        b = sequences.ratio_bounds(2, 0.8, 5, C=1.5)
        assert b.L <= b.U and b.log_L <= b.log_U

import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from bergkit import series
from bergkit.series import TaylorPoly

coef = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


def _random_poly(rng, n, order, scale=0.5):
    terms = {}
    for a in series.multi_indices(n, order):
        for b in series.multi_indices(n, order - sum(a)):
            terms[a + b] = scale * (rng.normal() + 1j * rng.normal())
    return TaylorPoly(n, order, terms)


def test_multi_indices_count():
    # C(n + d, n) monomials of total degree <= d
    assert len(series.multi_indices(2, 4)) == math.comb(6, 2)
    assert len(series.multi_indices_exact(3, 2)) == math.comb(4, 2)


def test_derivative_matches_coefficient():
    z, zb = TaylorPoly.variable(1, 4, 0), TaylorPoly.variable(1, 4, 0, conj=True)
    p = (z * zb) ** 2 * 3.0
    assert p.derivative((2,), (2,)) == 3.0 * 4


def test_log_series():
    # -log(1 - |z|^2) = |z|^2 + |z|^4/2 + ...
    z, zb = TaylorPoly.variable(1, 4, 0), TaylorPoly.variable(1, 4, 0, conj=True)
    p = -series.log(1.0 - z * zb)
    assert p.coeff((1,), (1,)) == 1.0
    assert p.coeff((2,), (2,)) == 0.5


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 2))
def test_exp_log_roundtrip(seed, n):
    rng = np.random.default_rng(seed)
    p = _random_poly(rng, n, 4, 0.3) + 1.0
    back = series.exp(series.log(p))
    assert (back - p).max_abs() < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_inverse(seed):
    rng = np.random.default_rng(seed)
    p = _random_poly(rng, 2, 4, 0.3) + 2.0
    assert (p * series.inverse(p) - 1.0).max_abs() < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1), coef, coef)
def test_evaluation_is_ring_homomorphism(seed, z0, z1):
    rng = np.random.default_rng(seed)
    p, q = _random_poly(rng, 2, 3), _random_poly(rng, 2, 3)
    pt = np.array([z0, z1]) * 0.3
    # products truncate at order 3, so compare on the degree <= 3 part only
    full = TaylorPoly(2, 6, p.c) * TaylorPoly(2, 6, q.c)
    assert abs(full(pt) - p(pt) * q(pt)) < 1e-10 * max(1.0, abs(p(pt) * q(pt)))
    assert abs((p + q)(pt) - p(pt) - q(pt)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_invert_map_roundtrip(seed):
    rng = np.random.default_rng(seed)
    n, order = 2, 4
    lin = np.eye(n) + 0.2 * rng.normal(size=(n, n))
    f = series.linear_map(lin, order)
    for j in range(n):
        for a in series.multi_indices(n, order):
            if 2 <= sum(a):
                f[j] = f[j] + TaylorPoly(n, order, {a + (0,) * n: 0.3 * rng.normal()})
    g = series.invert_map(f)
    ident = series.linear_map(np.eye(n), order)
    for fg, e in zip(series.compose_maps(f, g), ident):
        assert (fg - e).max_abs() < 1e-11


def test_holomorphic_part_and_conj():
    z, zb = TaylorPoly.variable(1, 4, 0), TaylorPoly.variable(1, 4, 0, conj=True)
    p = z * z * (2 + 1j) + z * zb + zb
    hol = p.holomorphic_part()
    assert hol.coeff((2,), (0,)) == 2 + 1j and hol.coeff((1,), (1,)) == 0
    assert p.conj().coeff((0,), (2,)) == 2 - 1j

"""Truncated Taylor polynomials in the variables (z, z̄).

A :class:`TaylorPoly` holds the coefficients of ``z^a z̄^b`` for total
degree ``|a| + |b| <= order``. It is the workhorse behind potential jets,
the log-kernel expansions used for metrics and curvatures, and the formal
composition/inversion that produces normal coordinates.
"""

from __future__ import annotations

import itertools
import math
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

Key = tuple  # concatenation a + b, length 2n


def multi_indices(n: int, degree: int) -> list[tuple[int, ...]]:
    """All exponents ``a`` in N^n with ``|a| <= degree``, lexicographically sorted."""
    out = [a for a in itertools.product(range(degree + 1), repeat=n) if sum(a) <= degree]
    out.sort()
    return out


def multi_indices_exact(n: int, degree: int) -> list[tuple[int, ...]]:
    return [a for a in multi_indices(n, degree) if sum(a) == degree]


def factorial_multi(a: Sequence[int]) -> int:
    return math.prod(math.factorial(k) for k in a)


class TaylorPoly:
    """Polynomial in ``z_1..z_n, z̄_1..z̄_n`` truncated at total degree ``order``."""

    __slots__ = ("n", "order", "c")

    def __init__(self, n: int, order: int, coeffs: Mapping[Key, complex] | None = None):
        self.n = n
        self.order = order
        self.c: dict[Key, complex] = {}
        if coeffs:
            for k, v in coeffs.items():
                if len(k) != 2 * n:
                    raise ValueError(f"exponent {k} has wrong length for n={n}")
                if sum(k) <= order and v != 0:
                    self.c[tuple(k)] = complex(v)

    # construction -------------------------------------------------------
    @classmethod
    def constant(cls, n: int, order: int, value: complex) -> "TaylorPoly":
        return cls(n, order, {(0,) * (2 * n): value})

    @classmethod
    def variable(cls, n: int, order: int, j: int, conj: bool = False) -> "TaylorPoly":
        key = [0] * (2 * n)
        key[j + n if conj else j] = 1
        return cls(n, order, {tuple(key): 1.0})

    @classmethod
    def from_terms(cls, n: int, order: int, terms: Iterable[tuple[Sequence[int], Sequence[int], complex]]):
        coeffs: dict[Key, complex] = {}
        for a, b, v in terms:
            key = tuple(a) + tuple(b)
            coeffs[key] = coeffs.get(key, 0.0) + v
        return cls(n, order, coeffs)

    # access -------------------------------------------------------------
    def coeff(self, a: Sequence[int], b: Sequence[int]) -> complex:
        return self.c.get(tuple(a) + tuple(b), 0.0 + 0.0j)

    def derivative(self, a: Sequence[int], b: Sequence[int]) -> complex:
        """``D^a_z D^b_z̄`` of the polynomial at the origin."""
        return self.coeff(a, b) * factorial_multi(a) * factorial_multi(b)

    @property
    def constant_term(self) -> complex:
        return self.c.get((0,) * (2 * self.n), 0.0 + 0.0j)

    def split(self, key: Key) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return key[: self.n], key[self.n :]

    def items(self):
        for k, v in self.c.items():
            yield k[: self.n], k[self.n :], v

    def copy(self) -> "TaylorPoly":
        out = TaylorPoly(self.n, self.order)
        out.c = dict(self.c)
        return out

    def truncate(self, order: int) -> "TaylorPoly":
        return TaylorPoly(self.n, order, {k: v for k, v in self.c.items() if sum(k) <= order})

    def filter(self, pred: Callable[[tuple, tuple], bool]) -> "TaylorPoly":
        return TaylorPoly(self.n, self.order, {k: v for k, v in self.c.items() if pred(k[: self.n], k[self.n :])})

    def homogeneous(self, degree: int) -> "TaylorPoly":
        return self.filter(lambda a, b: sum(a) + sum(b) == degree)

    def holomorphic_part(self) -> "TaylorPoly":
        return self.filter(lambda a, b: sum(b) == 0)

    def conj(self) -> "TaylorPoly":
        n = self.n
        return TaylorPoly(n, self.order, {k[n:] + k[:n]: np.conj(v) for k, v in self.c.items()})

    def max_abs(self) -> float:
        return max((abs(v) for v in self.c.values()), default=0.0)

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "TaylorPoly":
        if isinstance(other, TaylorPoly):
            if other.n != self.n:
                raise ValueError("dimension mismatch")
            return other
        return TaylorPoly.constant(self.n, self.order, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = TaylorPoly(self.n, min(self.order, other.order))
        for src in (self.c, other.c):
            for k, v in src.items():
                if sum(k) <= out.order:
                    out.c[k] = out.c.get(k, 0.0) + v
        return out

    __radd__ = __add__

    def __neg__(self):
        return TaylorPoly(self.n, self.order, {k: -v for k, v in self.c.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, TaylorPoly):
            return TaylorPoly(self.n, self.order, {k: v * other for k, v in self.c.items()})
        order = min(self.order, other.order)
        out: dict[Key, complex] = {}
        for k1, v1 in self.c.items():
            d1 = sum(k1)
            for k2, v2 in other.c.items():
                if d1 + sum(k2) > order:
                    continue
                k = tuple(x + y for x, y in zip(k1, k2))
                out[k] = out.get(k, 0.0) + v1 * v2
        return TaylorPoly(self.n, order, out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers need inverse()")
        out = TaylorPoly.constant(self.n, self.order, 1.0)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # evaluation ---------------------------------------------------------
    def __call__(self, z) -> complex:
        z = np.asarray(z, dtype=complex).reshape(self.n)
        zb = np.conj(z)
        total = 0.0 + 0.0j
        for k, v in self.c.items():
            a, b = k[: self.n], k[self.n :]
            total += v * np.prod(z ** np.array(a)) * np.prod(zb ** np.array(b))
        return total

    # composition --------------------------------------------------------
    def compose(self, maps: Sequence["TaylorPoly"]) -> "TaylorPoly":
        """Substitute ``z_j -> maps[j]`` and ``z̄_j -> conj(maps[j])``.

        Every ``maps[j]`` must vanish at the origin so truncation is consistent.
        """
        if len(maps) != self.n:
            raise ValueError("need one map component per variable")
        m = maps[0].n
        order = self.order
        for g in maps:
            if abs(g.constant_term) > 0:
                raise ValueError("composition needs maps vanishing at the origin")
        gens = list(maps) + [g.conj() for g in maps]
        powers: list[list[TaylorPoly]] = []
        for g in gens:
            row = [TaylorPoly.constant(m, order, 1.0)]
            for _ in range(order):
                row.append(row[-1] * g.truncate(order))
            powers.append(row)
        out = TaylorPoly(m, order)
        for k, v in self.c.items():
            term = TaylorPoly.constant(m, order, v)
            for idx, e in enumerate(k):
                if e:
                    term = term * powers[idx][e]
            out = out + term
        return out


def apply_series(p: TaylorPoly, coeffs: Sequence[complex]) -> TaylorPoly:
    """``Σ_k coeffs[k] (p - p(0))^k`` truncated at ``p.order``."""
    t = p - p.constant_term
    out = TaylorPoly.constant(p.n, p.order, coeffs[0])
    power = TaylorPoly.constant(p.n, p.order, 1.0)
    for k in range(1, min(len(coeffs), p.order + 1)):
        power = power * t
        out = out + power * coeffs[k]
    return out


def log(p: TaylorPoly) -> TaylorPoly:
    """Principal log of a polynomial with nonzero constant term."""
    c0 = p.constant_term
    if c0 == 0:
        raise ZeroDivisionError("log of a series with zero constant term")
    q = p / c0
    coeffs = [np.log(c0)] + [(-1.0) ** (k + 1) / k for k in range(1, p.order + 1)]
    return apply_series(q, coeffs)


def exp(p: TaylorPoly) -> TaylorPoly:
    c0 = p.constant_term
    coeffs = [np.exp(c0) / math.factorial(k) for k in range(p.order + 1)]
    return apply_series(p, coeffs)


def inverse(p: TaylorPoly) -> TaylorPoly:
    """Multiplicative inverse ``1/p``."""
    c0 = p.constant_term
    if c0 == 0:
        raise ZeroDivisionError("inverse of a series with zero constant term")
    coeffs = [(-1.0) ** k / c0 ** (k + 1) for k in range(p.order + 1)]
    return apply_series(p, coeffs)


def linear_map(matrix, order: int) -> list[TaylorPoly]:
    """Components of the holomorphic linear map ``w -> matrix @ w``."""
    matrix = np.asarray(matrix, dtype=complex)
    n_out, n_in = matrix.shape
    comps = []
    for j in range(n_out):
        terms = {}
        for i in range(n_in):
            key = [0] * (2 * n_in)
            key[i] = 1
            terms[tuple(key)] = matrix[j, i]
        comps.append(TaylorPoly(n_in, order, terms))
    return comps


def compose_maps(outer: Sequence[TaylorPoly], inner: Sequence[TaylorPoly]) -> list[TaylorPoly]:
    """Holomorphic map composition ``outer ∘ inner`` (both vanish at 0)."""
    return [f.compose(inner) for f in outer]


def invert_map(f: Sequence[TaylorPoly]) -> list[TaylorPoly]:
    """Formal inverse of a holomorphic polynomial map with ``f(0) = 0``.

    The linear part must be invertible. Uses the fixed point
    ``g = A^{-1}(w - N(g))`` where ``N`` is the nonlinear part of ``f``;
    each sweep fixes one more degree.
    """
    n = len(f)
    order = f[0].order
    lin = np.zeros((n, n), dtype=complex)
    for j, fj in enumerate(f):
        for i in range(n):
            key = [0] * (2 * n)
            key[i] = 1
            lin[j, i] = fj.c.get(tuple(key), 0.0)
    ainv = np.linalg.inv(lin)
    nonlinear = [fj.filter(lambda a, b: sum(a) + sum(b) >= 2) for fj in f]
    ident = linear_map(np.eye(n), order)
    g = linear_map(ainv, order)
    for _ in range(order):
        ng = [h.compose(g) for h in nonlinear]
        rhs = [ident[j] - ng[j] for j in range(n)]
        g = [sum((rhs[i] * ainv[j, i] for i in range(n)), TaylorPoly(n, order)) for j in range(n)]
    return g

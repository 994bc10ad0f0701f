"""Domains, weights and potential jets.

Domains are small frozen dataclasses; a weight is paired with a domain at
use time. Potentials know how to evaluate themselves and, for the model
potentials, how to produce an exact Taylor polynomial at a point.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import TYPE_CHECKING, Callable, Sequence, Union

import numpy as np

from . import series
from .errors import BindingError, NotStrictlyPSHError, PositivityError
from .series import TaylorPoly

if TYPE_CHECKING:  # pragma: no cover
    from .numerics import QuadratureRule

JET_ORDER = 4
FD_STEP = 1e-2


# --------------------------------------------------------------------------
# domains
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Ball:
    n: int = 1
    r: float = 1.0

    def __post_init__(self):
        if self.n < 1 or not self.r > 0:
            raise ValueError("Ball needs n >= 1 and r > 0")

    @property
    def reinhardt(self) -> bool:
        return True

    @property
    def scale(self) -> float:
        return self.r

    def volume(self) -> float:
        return (math.pi * self.r**2) ** self.n / math.factorial(self.n)

    def bbox(self):
        return (-self.r, self.r, -self.r, self.r)


@dataclass(frozen=True)
class Polydisc:
    radii: tuple[float, ...] = (1.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))
        if not self.radii or any(not r > 0 for r in self.radii):
            raise ValueError("Polydisc radii must be positive")

    @property
    def n(self) -> int:
        return len(self.radii)

    @property
    def reinhardt(self) -> bool:
        return True

    @property
    def scale(self) -> float:
        return min(self.radii)

    def volume(self) -> float:
        return math.prod(math.pi * r**2 for r in self.radii)


@dataclass(frozen=True)
class Annulus:
    r_in: float = 0.5
    r_out: float = 1.0

    def __post_init__(self):
        if not 0 < self.r_in < self.r_out:
            raise ValueError("Annulus needs 0 < r_in < r_out")

    n = 1

    @property
    def reinhardt(self) -> bool:
        return True

    @property
    def scale(self) -> float:
        return self.r_out

    def volume(self) -> float:
        return math.pi * (self.r_out**2 - self.r_in**2)


@dataclass(frozen=True)
class GeneralPlanar:
    """Bounded planar domain given by a vectorised indicator ``inside(z) -> bool``."""

    inside: Callable[[np.ndarray], np.ndarray]
    box: tuple[float, float, float, float]
    name: str = "planar"
    area: float | None = None

    n = 1

    @property
    def reinhardt(self) -> bool:
        return False

    @property
    def scale(self) -> float:
        x0, x1, y0, y1 = self.box
        return 0.5 * min(x1 - x0, y1 - y0)

    def volume(self) -> float | None:
        return self.area


DomainSpec = Union[Ball, Polydisc, Annulus, GeneralPlanar]


def ellipse(a: float, b: float, center: complex = 0.0) -> GeneralPlanar:
    """Axis-aligned ellipse as a :class:`GeneralPlanar` domain (exact area attached)."""

    def inside(z):
        w = np.asarray(z) - center
        return (w.real / a) ** 2 + (w.imag / b) ** 2 < 1.0

    c = complex(center)
    return GeneralPlanar(inside, (c.real - a, c.real + a, c.imag - b, c.imag + b), f"ellipse({a},{b})", math.pi * a * b)


def _as_points(z, n: int) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if n == 1 and (z.ndim == 0 or z.shape[-1] != 1):
        z = z[..., None]
    if z.shape[-1] != n:
        raise ValueError(f"expected points with {n} coordinates, got shape {z.shape}")
    return z


def contains(domain: DomainSpec, z) -> bool | np.ndarray:
    """True where ``z`` lies in the (open) domain. Accepts one point or an array of points."""
    pts = _as_points(z, domain.n)
    if isinstance(domain, Ball):
        res = np.sum(np.abs(pts) ** 2, axis=-1) < domain.r**2
    elif isinstance(domain, Polydisc):
        res = np.all(np.abs(pts) < np.asarray(domain.radii), axis=-1)
    elif isinstance(domain, Annulus):
        a = np.abs(pts[..., 0])
        res = (a > domain.r_in) & (a < domain.r_out)
    else:
        res = np.asarray(domain.inside(pts[..., 0]), dtype=bool)
    return bool(res) if np.ndim(res) == 0 else res


# --------------------------------------------------------------------------
# potentials
# --------------------------------------------------------------------------


class Potential:
    """Real potential φ on a domain in C^n.

    Subclasses override :meth:`value`; radial ones also override
    :meth:`profile` (a function of the squared moduli). ``taylor`` returns
    the exact order-4 Taylor polynomial in ``ζ = z - p`` when available.
    """

    n: int = 1
    radial: bool = False
    #: profile depends only on |z|^2 (sum of squared moduli)
    norm_radial: bool = False

    def value(self, z) -> np.ndarray:
        raise NotImplementedError

    def profile(self, s) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} is not radial")

    def taylor(self, p, order: int = JET_ORDER) -> TaylorPoly | None:
        return None


def _sq_norm_poly(p: np.ndarray, coords: Sequence[int], n: int, order: int) -> TaylorPoly:
    """Taylor polynomial of ``Σ_{j in coords} |p_j + ζ_j|^2`` in ζ."""
    out = TaylorPoly(n, order)
    for j in coords:
        zj = TaylorPoly.variable(n, order, j) + p[j]
        out = out + zj * zj.conj()
    return out


def _neg_log_defect(p, coords, n, r2, order) -> TaylorPoly:
    """Taylor polynomial of ``-log((r2 - Σ|z_j|^2)/r2)`` at p."""
    q = (r2 - _sq_norm_poly(p, coords, n, order)) / r2
    if not q.constant_term.real > 0:
        raise ValueError("point outside the potential's domain")
    return -series.log(q)


@dataclass(frozen=True)
class QuadraticPotential(Potential):
    """φ = scale · |z|^2."""

    n: int = 1
    scale: float = 1.0
    radial = True
    norm_radial = True

    def value(self, z):
        z = _as_points(z, self.n)
        return self.scale * np.sum(np.abs(z) ** 2, axis=-1)

    def profile(self, s):
        return self.scale * np.sum(np.atleast_1d(s), axis=-1) if np.ndim(s) > 1 else self.scale * np.asarray(s)

    def taylor(self, p, order=JET_ORDER):
        p = _as_points(p, self.n).reshape(self.n)
        return _sq_norm_poly(p, range(self.n), self.n, order) * self.scale


@dataclass(frozen=True)
class BallPotential(Potential):
    """φ = -log(1 - |z|^2/r^2); e^{-mφ} is the weight ((r^2 - |z|^2)/r^2)^m."""

    n: int = 1
    r: float = 1.0
    radial = True
    norm_radial = True

    def value(self, z):
        z = _as_points(z, self.n)
        return -np.log1p(-np.sum(np.abs(z) ** 2, axis=-1) / self.r**2)

    def profile(self, s):
        s = np.asarray(s, dtype=float)
        tot = s.sum(axis=-1) if s.ndim > 1 else s
        return -np.log1p(-tot / self.r**2)

    def taylor(self, p, order=JET_ORDER):
        p = _as_points(p, self.n).reshape(self.n)
        return _neg_log_defect(p, range(self.n), self.n, self.r**2, order)


@dataclass(frozen=True)
class KEPotential(Potential):
    """φ^{KE} = log det g^{KE} for a ball or polydisc (Einstein constant -1)."""

    domain: "Ball | Polydisc" = field(default_factory=Ball)
    radial = True

    def __post_init__(self):
        if not isinstance(self.domain, (Ball, Polydisc)):
            from .errors import UnsupportedReductionError

            raise UnsupportedReductionError(f"no closed-form KE potential for {self.domain!r}")

    @property
    def n(self) -> int:  # type: ignore[override]
        return self.domain.n

    @property
    def norm_radial(self) -> bool:  # type: ignore[override]
        return isinstance(self.domain, Ball) or self.domain.n == 1

    def profile(self, s):
        s = np.asarray(s, dtype=float)
        d = self.domain
        if isinstance(d, Ball):
            tot = s.sum(axis=-1) if s.ndim > 1 else s
            n, r2 = d.n, d.r**2
            return n * math.log(n + 1) + math.log(r2) - (n + 1) * np.log(r2 - tot)
        if s.ndim == 1 and d.n == 1:
            s = s[:, None]
        r2 = np.asarray(d.radii) ** 2
        return np.sum(math.log(2.0) + np.log(r2) - 2.0 * np.log(r2 - s), axis=-1)

    def value(self, z):
        z = _as_points(z, self.n)
        return self.profile(np.abs(z) ** 2)

    def taylor(self, p, order=JET_ORDER):
        d = self.domain
        p = _as_points(p, self.n).reshape(self.n)
        n = self.n
        if isinstance(d, Ball):
            const = n * math.log(n + 1) + math.log(d.r**2) - (n + 1) * math.log(d.r**2)
            return _neg_log_defect(p, range(n), n, d.r**2, order) * (n + 1) + const
        out = TaylorPoly(n, order)
        for j, r in enumerate(d.radii):
            out = out + _neg_log_defect(p, [j], n, r**2, order) * 2.0 + (math.log(2.0) - 2.0 * math.log(r**2) + math.log(r**2))
        return out


class CallablePotential(Potential):
    """Arbitrary potential given by a vectorised callable; jets use finite differences."""

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], n: int = 1, profile=None, norm_radial=False):
        self.func = func
        self.n = n
        self._profile = profile
        self.radial = profile is not None
        self.norm_radial = norm_radial and self.radial

    def value(self, z):
        return np.asarray(self.func(_as_points(z, self.n)), dtype=float)

    def profile(self, s):
        if self._profile is None:
            return super().profile(s)
        return np.asarray(self._profile(s), dtype=float)


# --------------------------------------------------------------------------
# weights
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Unit:
    scale: float = 1.0


@dataclass(frozen=True)
class RadialPower:
    """((r^2 - |z|^2)/r^2)^m."""

    m: int = 0
    r: float = 1.0
    scale: float = 1.0

    def __post_init__(self):
        if self.m < 0 or not self.r > 0:
            raise ValueError("RadialPower needs m >= 0 and r > 0")


@dataclass(frozen=True)
class PotentialWeight:
    """e^{-m φ}."""

    potential: Potential
    m: float = 1.0
    scale: float = 1.0


@dataclass(frozen=True, eq=False)
class Tabulated:
    """Values at the nodes of exactly one quadrature rule (no interpolation)."""

    rule: "QuadratureRule"
    values: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        if vals.shape[0] != self.rule.size:
            raise BindingError(f"{vals.shape[0]} values for a rule with {self.rule.size} nodes")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


WeightSpec = Union[Unit, RadialPower, PotentialWeight, Tabulated]


def is_radial(weight: WeightSpec) -> bool:
    """Whether the weight depends only on the moduli |z_1|, ..., |z_n|."""
    if isinstance(weight, (Unit, RadialPower)):
        return True
    if isinstance(weight, PotentialWeight):
        return weight.potential.radial
    return False


def is_norm_radial(weight: WeightSpec) -> bool:
    """Whether the weight depends only on |z|^2 = Σ|z_j|^2."""
    if isinstance(weight, (Unit, RadialPower)):
        return True
    if isinstance(weight, PotentialWeight):
        return weight.potential.norm_radial
    return False


def radial_values(weight: WeightSpec, s) -> np.ndarray:
    """Weight as a function of squared moduli ``s`` (shape (..., n) or (...,) meaning |z|^2)."""
    s = np.asarray(s, dtype=float)
    if isinstance(weight, Unit):
        out = np.ones(s.shape[:-1] if s.ndim > 1 else s.shape)
    elif isinstance(weight, RadialPower):
        tot = s.sum(axis=-1) if s.ndim > 1 else s
        out = ((weight.r**2 - tot) / weight.r**2) ** weight.m
    elif isinstance(weight, PotentialWeight):
        out = np.exp(-weight.m * weight.potential.profile(s))
    else:
        raise TypeError(f"{type(weight).__name__} has no radial profile")
    return weight.scale * out


def weight_values(weight: WeightSpec, z, rule: "QuadratureRule | None" = None) -> np.ndarray:
    """Vectorised weight evaluation at points ``z`` of shape (N, n).

    Tabulated weights only answer for the nodes of their bound rule: pass
    ``rule`` (which must be that rule) and ``z`` is ignored.
    """
    if isinstance(weight, Tabulated):
        if rule is None or rule is not weight.rule:
            raise BindingError("tabulated weight queried with a different rule")
        vals = weight.scale * weight.values
        positive = vals > 0
    else:
        pts = np.asarray(z, dtype=complex)
        if isinstance(weight, PotentialWeight):
            # positivity is decided on log μ so that far-boundary underflow is not a violation
            log_mu = -weight.m * np.asarray(weight.potential.value(pts), dtype=float)
            positive = ~np.isnan(log_mu) & (log_mu < np.inf)
            vals = weight.scale * np.exp(log_mu)
        else:
            vals = radial_values(weight, np.sum(np.abs(pts) ** 2, axis=-1))
            positive = vals > 0
            if isinstance(weight, RadialPower) and weight.m > 0:
                tot = np.sum(np.abs(pts) ** 2, axis=-1)
                positive = tot < weight.r**2
        positive = positive & (weight.scale > 0)
    vals = np.asarray(vals, dtype=float)
    if not np.all(positive):
        raise PositivityError("weight is not strictly positive at every point")
    return vals


def weight_eval(weight: WeightSpec, z) -> float:
    """Weight value at one point, including ``scale``."""
    if isinstance(weight, Tabulated):
        pts = weight.rule.nodes
        zz = np.asarray(z, dtype=complex).reshape(-1)
        hit = np.flatnonzero(np.all(np.abs(pts - zz) <= 1e-14 * (1 + np.abs(zz)), axis=-1))
        if hit.size == 0:
            raise BindingError("tabulated weight queried off its nodes")
        val = weight.scale * weight.values[hit[0]]
    else:
        n = weight.potential.n if isinstance(weight, PotentialWeight) else np.asarray(z).size
        val = weight_values(weight, _as_points(z, max(n, 1)).reshape(1, -1))[0]
        return float(val)
    if not val > 0:
        raise PositivityError(f"weight value {val} is not positive")
    return float(val)


# --------------------------------------------------------------------------
# jets
# --------------------------------------------------------------------------


def _jet_keys(n: int, order: int = JET_ORDER):
    for a in series.multi_indices(n, order):
        for b in series.multi_indices(n, order - sum(a)):
            yield a, b


@dataclass(frozen=True)
class Jet4:
    """All ``D^a_z D^b_z̄ φ(p)`` with ``|a| + |b| <= 4``."""

    p: np.ndarray
    derivs: dict

    @property
    def n(self) -> int:
        return len(self.p)

    def __getitem__(self, key) -> complex:
        a, b = key
        return self.derivs.get((tuple(a), tuple(b)), 0.0 + 0.0j)

    def hessian(self) -> np.ndarray:
        """Complex Hessian ``φ_{j k̄}``."""
        n = self.n
        e = np.eye(n, dtype=int)
        return np.array([[self[tuple(e[j]), tuple(e[k])] for k in range(n)] for j in range(n)])

    def taylor(self) -> TaylorPoly:
        terms = [
            (a, b, v / (series.factorial_multi(a) * series.factorial_multi(b)))
            for (a, b), v in self.derivs.items()
        ]
        return TaylorPoly.from_terms(self.n, JET_ORDER, terms)

    @classmethod
    def from_taylor(cls, p, poly: TaylorPoly) -> "Jet4":
        derivs = {(a, b): poly.derivative(a, b) for a, b in _jet_keys(poly.n)}
        return cls(np.asarray(p, dtype=complex).reshape(poly.n), derivs)

    def hermitian_defect(self) -> float:
        return max(abs(v - np.conj(self[b, a])) for (a, b), v in self.derivs.items())


@lru_cache(maxsize=None)
def _fd_stencil_1d(order: int) -> dict[int, float]:
    return {
        0: {0: 1.0},
        1: {-1: -0.5, 1: 0.5},
        2: {-1: 1.0, 0: -2.0, 1: 1.0},
        3: {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5},
        4: {-2: 1.0, -1: -4.0, 0: 6.0, 1: -4.0, 2: 1.0},
    }[order]


def _wirtinger_expansion(a, b) -> dict[tuple[int, ...], complex]:
    """Expand ``D^a_z D^b_z̄`` as a combination of real partials over (x_1, y_1, ..., x_n, y_n)."""
    terms: dict[tuple[int, ...], complex] = {(): 1.0}
    for aj, bj in zip(a, b):
        local: dict[tuple[int, int], complex] = {}
        for p_ in range(aj + 1):
            for q in range(bj + 1):
                c = math.comb(aj, p_) * math.comb(bj, q) * (-1j) ** (aj - p_) * (1j) ** (bj - q)
                key = (p_ + q, aj - p_ + bj - q)
                local[key] = local.get(key, 0.0) + c / 2 ** (aj + bj)
        terms = {k + lk: v * lv for k, v in terms.items() for lk, lv in local.items()}
    return terms


def _fd_jet(potential: Potential, p: np.ndarray, h: float = FD_STEP) -> dict:
    """Central differences on levels h, 2h, 4h with two Richardson sweeps."""
    n = potential.n
    cache: dict[tuple, float] = {}

    def f(offset, step):
        key = (offset, step)
        if key not in cache:
            d = np.array(offset, dtype=float) * step
            z = p + d[0::2] + 1j * d[1::2]
            cache[key] = float(potential.value(z.reshape(1, n))[0])
        return cache[key]

    def real_partial(gamma, step):
        stencils = [_fd_stencil_1d(g) for g in gamma]
        total = 0.0
        for combo in itertools.product(*(s.items() for s in stencils)):
            offs = tuple(o for o, _ in combo)
            w = math.prod(c for _, c in combo)
            total += w * f(offs, step)
        return total / step ** sum(gamma)

    steps = (4 * h, 2 * h, h)
    derivs = {}
    for a, b in _jet_keys(n):
        expansion = _wirtinger_expansion(a, b)
        levels = []
        for st in steps:
            val = 0.0 + 0.0j
            for gamma, c in expansion.items():
                val += c * real_partial(gamma, st)
            levels.append(val)
        if sum(a) + sum(b) == 0:
            derivs[(a, b)] = complex(f((0,) * (2 * n), h))
            continue
        r1 = [(4 * levels[i + 1] - levels[i]) / 3 for i in range(2)]
        derivs[(a, b)] = (16 * r1[1] - r1[0]) / 15
    return derivs


def potential_jet(source, p, *, hessian_tol: float = 1e-12) -> Jet4:
    """4-jet of φ at ``p``; ``source`` is a :class:`PotentialWeight` or a :class:`Potential`.

    Exact when the potential supplies a Taylor polynomial, otherwise
    Richardson-extrapolated central differences. Raises
    :class:`NotStrictlyPSHError` when the complex Hessian is not positive definite.
    """
    pot = source.potential if isinstance(source, PotentialWeight) else source
    p = _as_points(p, pot.n).reshape(pot.n)
    poly = pot.taylor(p, JET_ORDER)
    if poly is not None:
        jet = Jet4.from_taylor(p, poly)
    else:
        raw = _fd_jet(pot, p)
        # enforce Hermitian symmetry exactly: average each (a,b) with conj (b,a)
        sym = {}
        for (a, b), v in raw.items():
            sym[(a, b)] = 0.5 * (v + np.conj(raw[(b, a)]))
        jet = Jet4(p, sym)
    hess = jet.hessian()
    evals = np.linalg.eigvalsh(0.5 * (hess + hess.conj().T))
    if evals.min() <= hessian_tol * max(1.0, abs(evals).max()):
        raise NotStrictlyPSHError(f"complex Hessian eigenvalues {evals} at p={p}")
    return jet

"""Quadrature, moment integrals, Gram factorization and min-norm solves."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from . import domains as dom
from .errors import (
    InfeasibleConstraintError,
    IntegrabilityError,
    NotPositiveSemidefiniteError,
    QuadratureError,
    UnsupportedReductionError,
)

RADIAL_RTOL = 1e-12
GRID_DEPTH = 6
DROP_TOL = 1e-12


# --------------------------------------------------------------------------
# quadrature rules
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and positive Lebesgue weights on a domain.

    For the ``spectral-radial`` tier the nodes are a product of radial nodes
    (``moduli``) with a uniform angular grid of ``n_angles`` points per
    coordinate, stored radial-major: node ``i * n_angles**n + k`` sits on
    radial node ``i``. ``radial_weights`` already include the full angular
    measure, so a radial integrand integrates as ``radial_weights @ f(moduli)``.
    """

    domain: dom.DomainSpec
    tier: str
    nodes: np.ndarray
    weights: np.ndarray
    reported_accuracy: float = float("nan")
    moduli: np.ndarray | None = None
    radial_weights: np.ndarray | None = None
    n_angles: int = 0
    resolution: int = 0

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    @property
    def n(self) -> int:
        return self.nodes.shape[1]

    @property
    def class_size(self) -> int:
        """Number of nodes in one rotation class (spectral-radial tier)."""
        return self.n_angles**self.n if self.tier == "spectral-radial" else 1

    def integrate(self, values) -> complex:
        return np.dot(self.weights, values)

    def radial_integrate(self, values) -> float:
        if self.radial_weights is None:
            raise QuadratureError("rule has no radial structure")
        return float(np.dot(self.radial_weights, values))

    @cached_property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.n_angles) / self.n_angles


def _gauss01(k: int):
    x, w = np.polynomial.legendre.leggauss(k)
    return 0.5 * (x + 1.0), 0.5 * w


def _simplex_nodes(n: int, k: int):
    """Collapsed Gauss rule on {s >= 0, Σ s <= 1}: returns points (M, n), weights (M,)."""
    u, wu = _gauss01(k)
    grids = np.meshgrid(*([u] * n), indexing="ij")
    wgrids = np.meshgrid(*([wu] * n), indexing="ij")
    us = [g.reshape(-1) for g in grids]
    w = np.prod([g.reshape(-1) for g in wgrids], axis=0)
    s = np.empty((us[0].size, n))
    rest = np.ones(us[0].size)
    jac = np.ones(us[0].size)
    for j in range(n):
        if j < n - 1:
            s[:, j] = rest * us[j]
            jac *= rest
            rest = rest * (1 - us[j])
        else:
            s[:, j] = rest * us[j]
            jac *= rest
    return s, w * jac


def _radial_nodes(domain, resolution: int):
    """Squared-moduli nodes and weights (area units, angular measure included)."""
    if isinstance(domain, dom.Ball):
        s, w = _simplex_nodes(domain.n, resolution)
        r2 = domain.r**2
        return s * r2, w * (math.pi * r2) ** domain.n
    if isinstance(domain, dom.Polydisc):
        u, wu = _gauss01(resolution)
        n = domain.n
        grids = np.meshgrid(*([u] * n), indexing="ij")
        wg = np.meshgrid(*([wu] * n), indexing="ij")
        r2 = np.asarray(domain.radii) ** 2
        s = np.stack([g.reshape(-1) for g in grids], axis=-1) * r2
        w = np.prod([g.reshape(-1) for g in wg], axis=0) * np.prod(math.pi * r2)
        return s, w
    if isinstance(domain, dom.Annulus):
        # log-radial variable: s = e^t, ds = s dt; exact-ish for Laurent powers
        t0, t1 = 2 * math.log(domain.r_in), 2 * math.log(domain.r_out)
        u, wu = _gauss01(resolution)
        t = t0 + (t1 - t0) * u
        s = np.exp(t)
        return s[:, None], math.pi * s * wu * (t1 - t0)
    raise UnsupportedReductionError(f"no radial rule for {type(domain).__name__}")


def _unit_moment_exact(domain, alpha) -> float:
    """Closed-form ∫|z^α|^2 dλ for the Reinhardt model domains."""
    alpha = tuple(alpha)
    if isinstance(domain, dom.Ball):
        n, k = domain.n, sum(alpha)
        lg = n * math.log(math.pi) + (2 * k + 2 * n) * math.log(domain.r)
        lg += sum(gammaln(a + 1) for a in alpha) - gammaln(k + n + 1)
        return math.exp(lg)
    if isinstance(domain, dom.Polydisc):
        return math.prod(math.pi * r ** (2 * a + 2) / (a + 1) for r, a in zip(domain.radii, alpha))
    k = alpha[0]
    if k == -1:
        return 2 * math.pi * math.log(domain.r_out / domain.r_in)
    return math.pi * (domain.r_out ** (2 * k + 2) - domain.r_in ** (2 * k + 2)) / (k + 1)


def _radial_self_test(domain, s, w, resolution) -> float:
    n = s.shape[1]
    if isinstance(domain, dom.Annulus):
        exps = [(k,) for k in range(-max(1, resolution // 4), resolution // 4 + 1)]
    else:
        top = max(1, resolution - 1)
        exps = [a for a in _lex_indices(n, top) if sum(a) in (0, 1, top // 2, top)]
    worst = 0.0
    for a in exps:
        approx = float(np.dot(w, np.prod(s ** np.asarray(a, dtype=float), axis=1)))
        exact = _unit_moment_exact(domain, a)
        worst = max(worst, abs(approx - exact) / exact)
    return max(worst, 4 * np.finfo(float).eps)


def _lex_indices(n, degree):
    import itertools

    out = [a for a in itertools.product(range(degree + 1), repeat=n) if sum(a) <= degree]
    out.sort()
    return out


def _grid_rule(domain: dom.GeneralPlanar, resolution: int, depth: int = GRID_DEPTH):
    """Indicator-masked tensor grid with boundary-cell bisection."""
    x0, x1, y0, y1 = domain.box
    hx, hy = (x1 - x0) / resolution, (y1 - y0) / resolution
    ix, iy = np.meshgrid(np.arange(resolution), np.arange(resolution), indexing="ij")
    cx = x0 + (ix.reshape(-1) + 0.5) * hx
    cy = y0 + (iy.reshape(-1) + 0.5) * hy
    gx, gw = np.polynomial.legendre.leggauss(3)
    nodes, weights = [], []
    level_hx, level_hy = hx, hy
    for level in range(depth + 1):
        if cx.size == 0:
            break
        probes = [(0, 0), (-0.5, -0.5), (-0.5, 0.5), (0.5, -0.5), (0.5, 0.5)]
        flags = np.stack([domain.inside((cx + a * level_hx) + 1j * (cy + b * level_hy)) for a, b in probes])
        full = flags.all(axis=0)
        mixed = flags.any(axis=0) & ~full
        # interior cells: 3x3 Gauss-Legendre
        fx, fy = cx[full], cy[full]
        for i in range(3):
            for j in range(3):
                nodes.append((fx + 0.5 * gx[i] * level_hx) + 1j * (fy + 0.5 * gx[j] * level_hy))
                weights.append(np.full(fx.size, 0.25 * gw[i] * gw[j] * level_hx * level_hy))
        mx, my = cx[mixed], cy[mixed]
        if level == depth:
            keep = flags[0][mixed]
            nodes.append(mx[keep] + 1j * my[keep])
            weights.append(np.full(int(keep.sum()), level_hx * level_hy))
            break
        level_hx, level_hy = level_hx / 2, level_hy / 2
        cx = np.concatenate([mx - level_hx / 2, mx - level_hx / 2, mx + level_hx / 2, mx + level_hx / 2])
        cy = np.concatenate([my - level_hy / 2, my + level_hy / 2, my - level_hy / 2, my + level_hy / 2])
    z = np.concatenate(nodes) if nodes else np.zeros(0, complex)
    w = np.concatenate(weights) if weights else np.zeros(0)
    inside = domain.inside(z) if z.size else np.zeros(0, bool)
    return z[inside], w[inside]


def build_quadrature(domain: dom.DomainSpec, resolution: int = 64, n_angles: int | None = None) -> QuadratureRule:
    """Quadrature rule for ``domain``.

    Reinhardt domains get a spectral-radial rule (Gauss nodes in the squared
    moduli, uniform angles); general planar domains get the grid tier.
    ``reported_accuracy`` comes from a moment self-test.
    """
    if resolution < 1:
        raise QuadratureError("resolution must be positive")
    if isinstance(domain, dom.GeneralPlanar):
        z, w = _grid_rule(domain, resolution)
        if z.size == 0:
            raise QuadratureError(f"resolution {resolution} places no node inside {domain.name}")
        acc = _grid_self_test(domain, z, w, resolution)
        return QuadratureRule(domain, "grid", z[:, None], w, acc, resolution=resolution)
    s, w = _radial_nodes(domain, resolution)
    n = s.shape[1]
    if n_angles is None:
        n_angles = 32 if n == 1 else 8
    acc = _radial_self_test(domain, s, w, resolution)
    moduli = np.sqrt(s)
    theta = 2 * np.pi * np.arange(n_angles) / n_angles
    phase_grid = np.stack(np.meshgrid(*([theta] * n), indexing="ij"), axis=-1).reshape(-1, n)
    phases = np.exp(1j * phase_grid)
    nodes = (moduli[:, None, :] * phases[None, :, :]).reshape(-1, n)
    full_w = np.repeat(w / phases.shape[0], phases.shape[0])
    return QuadratureRule(domain, "spectral-radial", nodes, full_w, acc, moduli, w, n_angles, resolution)


def _grid_self_test(domain, z, w, resolution) -> float:
    ref_z, ref_w = _grid_rule(domain, 2 * resolution, GRID_DEPTH)
    worst = 0.0
    scale = max(abs(v) for v in domain.box) or 1.0
    for j in range(3):
        for k in range(3):
            a = np.dot(w, (z / scale) ** j * np.conj(z / scale) ** k)
            b = np.dot(ref_w, (ref_z / scale) ** j * np.conj(ref_z / scale) ** k)
            worst = max(worst, abs(a - b) / max(abs(b), np.dot(ref_w, np.ones_like(ref_w)) * 1e-3))
    if domain.area is not None:
        worst = max(worst, abs(w.sum() - domain.area) / domain.area)
    return max(worst, 1e-6)


# --------------------------------------------------------------------------
# radial moments
# --------------------------------------------------------------------------


def _quad(f, a, b, points=None) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(f, a, b, epsabs=0.0, epsrel=RADIAL_RTOL, limit=500, points=points)
        except integrate.IntegrationWarning as exc:
            val, _ = integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-10, limit=2000, points=points)
            if not np.isfinite(val):
                raise IntegrabilityError(str(exc)) from exc
    if not np.isfinite(val):
        raise IntegrabilityError("moment integral is not finite")
    return val


def radial_moment(domain: dom.DomainSpec, weight: dom.WeightSpec, alpha) -> float:
    """∫_Ω |z^α|^2 μ dλ by reduction to radial integrals.

    Angular orthogonality reduces the integral to one dimension for balls
    with |z|-dependent weights and for annuli, and to a product or nested
    integral on polydiscs.
    """
    alpha = tuple(int(a) for a in np.atleast_1d(alpha))
    if isinstance(domain, dom.GeneralPlanar) or not domain.reinhardt:
        raise UnsupportedReductionError("radial reduction needs a Reinhardt domain")
    if not dom.is_radial(weight):
        raise UnsupportedReductionError("radial reduction needs a weight depending only on moduli")
    if len(alpha) != domain.n:
        raise ValueError(f"multi-index {alpha} does not match dimension {domain.n}")
    if any(a < 0 for a in alpha) and not isinstance(domain, dom.Annulus):
        raise IntegrabilityError(f"|z^{alpha}|^2 is not integrable near the origin")

    if isinstance(domain, dom.Annulus):
        k = alpha[0]
        t0, t1 = 2 * math.log(domain.r_in), 2 * math.log(domain.r_out)

        def f(t):
            s = math.exp(t)
            return math.exp((k + 1) * t) * float(dom.radial_values(weight, np.array([s]))[0])

        return math.pi * _quad(f, t0, t1)

    n = domain.n
    if isinstance(domain, dom.Ball) and dom.is_norm_radial(weight):
        k = sum(alpha)
        r2 = domain.r**2
        log_pref = n * math.log(math.pi) + sum(gammaln(a + 1) for a in alpha) - gammaln(k + n)
        m = weight.m if isinstance(weight, dom.RadialPower) else 0
        peak = r2 * (k + n - 1) / (k + n - 1 + m) if k + n - 1 + m > 0 else 0.0

        def f(s):
            return s ** (k + n - 1) * float(dom.radial_values(weight, np.array([s]))[0])

        pts = [peak] if 0 < peak < r2 else None
        return math.exp(log_pref) * _quad(f, 0.0, r2, pts)

    if isinstance(domain, dom.Polydisc) and isinstance(weight, dom.Unit):
        return weight.scale * _unit_moment_exact(domain, alpha)

    if n == 1:
        r2 = domain.radii[0] ** 2 if isinstance(domain, dom.Polydisc) else domain.r**2
        k = alpha[0]
        return math.pi * _quad(lambda s: s**k * float(dom.radial_values(weight, np.array([[s]]))[0]), 0.0, r2)

    if n == 2:
        if isinstance(domain, dom.Polydisc):
            a2, b2 = domain.radii[0] ** 2, domain.radii[1] ** 2

            def inner(s1):
                return _quad(
                    lambda s2: s1 ** alpha[0] * s2 ** alpha[1] * float(dom.radial_values(weight, np.array([[s1, s2]]))[0]),
                    0.0,
                    b2,
                )

            return math.pi**2 * _quad(inner, 0.0, a2)
        r2 = domain.r**2

        def inner_b(s1):
            return _quad(
                lambda s2: s1 ** alpha[0] * s2 ** alpha[1] * float(dom.radial_values(weight, np.array([[s1, s2]]))[0]),
                0.0,
                r2 - s1,
            )

        return math.pi**2 * _quad(inner_b, 0.0, r2)
    raise UnsupportedReductionError(f"no radial reduction for this weight in dimension {n}")


# --------------------------------------------------------------------------
# linear algebra
# --------------------------------------------------------------------------


def constrained_min_norm(A, b, rank_tol: float = 1e-12):
    """Minimum-norm solution of ``A c = b``.

    Returns ``(c, ‖c‖^2)``. Raises :class:`InfeasibleConstraintError` when the
    system has no solution (rank-deficient ``A`` with inconsistent ``b``).
    """
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    if A.shape[0] != b.shape[0]:
        raise ValueError("constraint matrix and right-hand side disagree in length")
    # row scaling keeps derivative constraints of very different sizes comparable
    row = np.linalg.norm(A, axis=1)
    if np.any(row == 0) and np.any(b[row == 0] != 0):
        raise InfeasibleConstraintError("a constraint row vanishes identically with nonzero target")
    row[row == 0] = 1.0
    As, bs = A / row[:, None], b / row
    c, _, rank, sv = np.linalg.lstsq(As, bs, rcond=rank_tol)
    resid = np.linalg.norm(As @ c - bs)
    if resid > 1e-10 * max(np.linalg.norm(bs), 1e-300):
        raise InfeasibleConstraintError(f"constraints inconsistent (residual {resid:.3e}, rank {rank})")
    return c, float(np.vdot(c, c).real)


@dataclass(frozen=True)
class GramFactor:
    """Greedy pivoted Cholesky: ``gram[r][:, r] ≈ factor @ factor^H`` with ``r = retained``.

    ``retained`` lists input positions in pivot order; ``factor`` is lower
    triangular in that order.
    """

    retained: list
    factor: np.ndarray
    dropped: list
    drop_tol: float

    def reconstruct(self) -> np.ndarray:
        return self.factor @ self.factor.conj().T


def pivoted_factorization(gram, drop_tol: float = DROP_TOL) -> GramFactor:
    """Rank-revealing pivoted Cholesky of a Hermitian positive semidefinite matrix.

    Pivots below ``drop_tol * max(diag)`` end the factorization; those indices
    are reported in ``dropped``. A clearly negative pivot raises
    :class:`NotPositiveSemidefiniteError`.
    """
    G = np.array(gram, dtype=complex)
    N = G.shape[0]
    if G.shape != (N, N):
        raise ValueError("Gram matrix must be square")
    scale = max(np.abs(G).max(), 1e-300)
    if np.abs(G - G.conj().T).max() > 1e-12 * scale:
        raise ValueError("Gram matrix is not Hermitian")
    G = 0.5 * (G + G.conj().T)
    diag = G.diagonal().real.copy()
    dmax = diag.max() if N else 0.0
    if N and dmax <= 0:
        raise NotPositiveSemidefiniteError("Gram matrix has no positive diagonal entry")
    neg_tol = max(drop_tol, 64 * np.finfo(float).eps) * dmax * max(N, 1)
    if np.any(diag < -neg_tol):
        raise NotPositiveSemidefiniteError(f"negative diagonal entry {diag.min():.3e}")
    perm = np.arange(N)
    L = np.zeros((N, N), dtype=complex)
    k = 0
    offdiag_zero = N and not np.any(G - np.diag(np.diag(G)))
    while k < N:
        j = k + int(np.argmax(diag[perm[k:]]))
        piv = diag[perm[j]]
        if piv < -neg_tol:
            raise NotPositiveSemidefiniteError(f"negative pivot {piv:.3e} at step {k}")
        if piv <= drop_tol * dmax:
            break
        perm[[k, j]] = perm[[j, k]]
        L[[k, j], :k] = L[[j, k], :k]
        p = perm[k]
        L[k, k] = math.sqrt(piv)
        if not offdiag_zero:
            rest = perm[k + 1 :]
            col = G[rest, p] - L[k + 1 :, :k] @ L[k, :k].conj()
            L[k + 1 :, k] = col / L[k, k]
            diag[rest] -= np.abs(L[k + 1 :, k]) ** 2
        k += 1
    return GramFactor(list(perm[:k]), L[:k, :k].copy(), sorted(perm[k:].tolist()), drop_tol)

"""Weighted Bergman sequences: Tian's ``e^{-mφ}`` sweep and Tsuji's dynamical iteration.

The Tian sweep checks the large-``m`` expansion

    K(p) e^{-mφ(p)} / det(φ_{kl̄}(p)) (π/m)^n = 1 - S_φ(p)/(2m) + O(1/m^2),
    g(p; X) / (m g_φ(p; X))                   = 1 - R_φ(p; X)/m + O(1/m^2),
    m H(p; X)                                 = H_φ(p; X) + O(1/m),

for the weight ``e^{-mφ}``. The Tsuji iteration ``μ̃_1 = 1``,
``μ̃_{m+1} = N_m / K̃_m`` with ``N_m = (m/π)^n (1 - n/(2m))`` runs on one fixed
quadrature rule with node-locked (tabulated) weights.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import domains as dom
from . import geometry, numerics, oracles
from .errors import BergkitError, IterationFailure, UnsupportedReductionError
from .kernel import KernelModel, build_kernel, default_max_degree, transformation_check

log = logging.getLogger(__name__)

TYZ_M_LIST = (10, 20, 40, 80)
DEGREE_MARGIN = 10


@dataclass(frozen=True, eq=False)
class SequenceRecord:
    """Computed and oracle values of one sequence level at a set of probes.

    ``computed`` and ``oracle`` map a quantity name (``"K"``, ``"g"``,
    ``"H"``) to arrays over the probes.
    """

    experiment: str
    m: float
    probes: np.ndarray
    computed: dict
    oracle: dict
    degree: int = 0
    converged: bool = True
    runtime: float = 0.0
    meta: dict = field(default_factory=dict)

    def abs_err(self, quantity: str) -> np.ndarray:
        return np.abs(np.asarray(self.computed[quantity]) - np.asarray(self.oracle[quantity]))

    def rel_err(self, quantity: str) -> np.ndarray:
        ref = np.abs(np.asarray(self.oracle[quantity]))
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(ref > 0, self.abs_err(quantity) / ref, self.abs_err(quantity))
        return out

    def sup_err(self, quantity: str, relative: bool = True) -> float:
        err = self.rel_err(quantity) if relative else self.abs_err(quantity)
        return float(np.max(err)) if err.size else 0.0

    @property
    def quantities(self) -> list[str]:
        return list(self.computed)


def _points(probes, n: int) -> np.ndarray:
    return np.asarray(probes, dtype=complex).reshape(-1, n)


# --------------------------------------------------------------------------
# Tian sweep and expansion fit
# --------------------------------------------------------------------------


def tian_sweep(
    domain: dom.DomainSpec,
    potential: dom.Potential,
    m_list: Iterable[float] = TYZ_M_LIST,
    p=None,
    X=None,
    *,
    tol: float = 1e-12,
) -> list[SequenceRecord]:
    """Normalised kernel, metric and curvature of ``e^{-mφ}`` at ``p`` for each ``m``.

    Oracles are the first two terms of the expansion, with ``S_φ``, ``R_φ``
    and ``H_φ`` from the normal form of ``φ`` at ``p``.
    """
    n = domain.n
    p = np.zeros(n, dtype=complex) if p is None else np.asarray(p, dtype=complex).reshape(n)
    X = np.eye(n, dtype=complex)[0] if X is None else np.asarray(X, dtype=complex).reshape(n)
    jet = dom.potential_jet(potential, p)
    curv = geometry.curvature_from_jet(geometry.bochner_normal_map(jet), X)
    det = float(np.linalg.det(jet.hessian()).real)
    phi_p = float(jet[(0,) * n, (0,) * n].real)
    g_phi = float(np.real(X @ jet.hessian() @ X.conj()))
    records = []
    for m in m_list:
        t0 = time.perf_counter()
        weight = dom.PotentialWeight(potential, m)
        model = build_kernel(domain, weight, p[None, :], tol=tol, min_degree=8)
        poly = geometry.kernel_log_taylor(model, p, 4)
        log_k = poly.constant_term.real
        k_ratio = math.exp(log_k - m * phi_p - math.log(det) + n * math.log(math.pi / m))
        g_ratio = geometry.metric_matrix(poly)
        g_ratio = float(np.real(X @ g_ratio @ X.conj())) / (m * g_phi)
        mh = m * geometry.hsc_from_potential(poly, X)
        records.append(
            SequenceRecord(
                "tyz",
                m,
                p[None, :],
                {"K": np.array([k_ratio]), "g": np.array([g_ratio]), "H": np.array([mh])},
                {"K": np.array([1 - curv.S / (2 * m)]), "g": np.array([1 - curv.R / m]), "H": np.array([curv.H])},
                model.system.max_degree,
                model.converged,
                time.perf_counter() - t0,
                {"S_phi": curv.S, "R_phi": curv.R, "H_phi": curv.H},
            )
        )
        log.info("tyz m=%s degree=%d K-ratio=%.12g", m, model.system.max_degree, k_ratio)
    return records


def fit_expansion_coefficient(records: Sequence[SequenceRecord], quantity: str = "K", probe: int = 0) -> tuple[float, float]:
    """Fit ``ratio - 1 = a/m + b/m^2`` and return ``(S_hat, stderr)`` with ``S_hat = -2a``.

    Examples
    --------
    >>> recs = [SequenceRecord("tyz", m, np.zeros((1, 1)), {"K": np.array([1 + 1 / m])}, {"K": np.ones(1)})
    ...         for m in (10, 20, 40, 80)]
    >>> round(fit_expansion_coefficient(recs)[0], 10)
    -2.0
    """
    ms = np.array([float(r.m) for r in records])
    if np.unique(ms).size < 3:
        raise ValueError("the expansion fit needs at least three distinct levels")
    x = 1.0 / ms
    y = np.array([float(np.real(r.computed[quantity][probe])) for r in records]) - 1.0
    A = np.stack([x, x * x], axis=1)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    dof = len(ms) - 2
    resid = y - A @ coef
    if dof > 0:
        sigma2 = float(resid @ resid) / dof
        cov = sigma2 * np.linalg.inv(A.T @ A)
        stderr = 2.0 * math.sqrt(max(cov[0, 0], 0.0))
    else:
        stderr = float("nan")
    return float(-2.0 * coef[0]), stderr


# --------------------------------------------------------------------------
# Tian's Kähler-Einstein sequence on model domains
# --------------------------------------------------------------------------


def _require_ke(domain):
    if not isinstance(domain, (dom.Ball, dom.Polydisc)):
        raise UnsupportedReductionError(f"no Kähler-Einstein oracle for {type(domain).__name__}")


def ke_probes(domain, count: int = 7, fraction: float = 0.9) -> np.ndarray:
    """Probes along a ray from the centre up to ``fraction`` of the radius."""
    _require_ke(domain)
    t = np.linspace(0.0, fraction, count)
    if isinstance(domain, dom.Ball):
        direction = np.exp(0.7j) * np.ones(domain.n) / math.sqrt(domain.n) * domain.r
    else:
        direction = np.exp(0.7j) * np.asarray(domain.radii, dtype=float)
    return t[:, None] * direction[None, :]


def ke_weight(domain, m: float) -> dom.PotentialWeight:
    """``μ^{KE}_m = det(g^{KE})^{-(m-1)}``."""
    return dom.PotentialWeight(dom.KEPotential(domain), m - 1)


def tian_ke_sweep(
    domain,
    m_list: Iterable[float],
    probes=None,
    X=None,
    *,
    tol: float = 1e-11,
    curvature: bool = True,
) -> list[SequenceRecord]:
    """Normalised sequence ``K^{1/m}``, ``g/m``, ``mH`` for weights ``det(g^{KE})^{-(m-1)}``.

    Oracles: ``det g^{KE}``, ``g^{KE}(z; X)`` and the KE holomorphic
    sectional curvature.
    """
    _require_ke(domain)
    n = domain.n
    probes = ke_probes(domain) if probes is None else _points(probes, n)
    X = np.eye(n, dtype=complex)[0] if X is None else np.asarray(X, dtype=complex).reshape(n)
    pot = dom.KEPotential(domain)
    ke = [oracles.ke_oracle(domain, z) for z in probes]
    ke_h = [geometry.hsc_from_potential(pot.taylor(z), X) for z in probes] if curvature else None
    records = []
    for m in m_list:
        t0 = time.perf_counter()
        model = build_kernel(domain, ke_weight(domain, m), probes, tol=tol, min_degree=8)
        kdiag = model.diag(probes)
        computed = {"K": np.exp(np.log(kdiag) / m)}
        oracle = {"K": np.array([d.det for d in ke])}
        if curvature:
            gs, hs = [], []
            for z in probes:
                poly = geometry.kernel_log_taylor(model, z, 4)
                G = geometry.metric_matrix(poly)
                gs.append(float(np.real(X @ G @ X.conj())) / m)
                hs.append(m * geometry.hsc_from_potential(poly, X))
            computed["g"] = np.array(gs)
            computed["H"] = np.array(hs)
            oracle["g"] = np.array([d.metric_action(X) for d in ke])
            oracle["H"] = np.array(ke_h)
        records.append(
            SequenceRecord("tian-ke", m, probes, computed, oracle, model.system.max_degree, model.converged, time.perf_counter() - t0)
        )
        log.info("tian-ke m=%s degree=%d", m, model.system.max_degree)
    return records


def ke_invariance_defect(m: float, a: complex, probes: Sequence, degree: int | None = None) -> float:
    """Transformation-formula defect for the level-``m`` KE weight under a disk automorphism.

    The weight ``det(g^{KE})^{-(m-1)}`` transforms with ``h = F'^{m-1}``, so
    the kernel obeys the transformation formula with that factor.
    """
    disk = dom.Ball(1, 1.0)
    w = ke_weight(disk, m)
    model = build_kernel(disk, w, degree=degree) if degree else build_kernel(disk, w)

    def F(z):
        return (z - a) / (1 - np.conj(a) * z)

    def J(z):
        return (1 - abs(a) ** 2) / (1 - np.conj(a) * z) ** 2

    def h(z):
        return J(z) ** (m - 1)

    pairs = [(np.atleast_1d(z), np.atleast_1d(wv)) for z, wv in probes]
    return transformation_check(model, model, F, J, pairs, h=h)


# --------------------------------------------------------------------------
# Tsuji's dynamical sequence
# --------------------------------------------------------------------------


def normalization(n: int, m: int) -> float:
    """``N_m = (m/π)^n (1 - n/(2m))``."""
    return (m / math.pi) ** n * (1.0 - n / (2.0 * m))


@dataclass(frozen=True, eq=False)
class TsujiState:
    """One level of the dynamical iteration.

    ``weight`` is ``μ̃_m`` (or ``μ_m`` when unnormalised) on the shared rule and
    ``model`` its kernel. ``normalization`` is ``N_m`` (1 when unnormalised);
    ``log_scale`` is ``log Π_{k<m} N_k``, so ``K̃_m = K_m e^{-log_scale}``.
    """

    m: int
    weight: dom.Tabulated
    model: KernelModel
    normalization: float
    log_scale: float
    normalized: bool = True
    radial_spread: float = 0.0

    @property
    def rule(self) -> numerics.QuadratureRule:
        return self.weight.rule

    def kernel(self, probes) -> np.ndarray:
        return self.model.diag(_points(probes, self.model.domain.n))


def tsuji_rule(domain, steps: int, resolution: int = 64) -> numerics.QuadratureRule:
    """Shared rule for a run of ``steps`` levels.

    The radial resolution is raised to ``2 * steps + 40`` when needed so
    that Gram entries stay exactly integrated as the weights sharpen.
    """
    res = max(int(resolution), 2 * int(steps) + 40)
    return numerics.build_quadrature(domain, res, 16 if domain.n == 1 else 4)


def radial_spread(rule: numerics.QuadratureRule, values) -> float:
    """Largest relative spread of ``values`` within a rotation class of nodes."""
    if rule.tier != "spectral-radial":
        return float("nan")
    v = np.asarray(values, dtype=float).reshape(-1, rule.class_size)
    mean = np.abs(v.mean(axis=1))
    return float(np.max((v.max(axis=1) - v.min(axis=1)) / np.where(mean > 0, mean, 1.0)))


def tsuji_iterate(
    domain: dom.DomainSpec,
    steps: int = 20,
    rule: numerics.QuadratureRule | None = None,
    *,
    normalized: bool = True,
    probes=None,
    margin: int = DEGREE_MARGIN,
    tol: float = 1e-12,
    tail: bool = True,
) -> list[TsujiState]:
    """Run ``steps`` levels of the dynamical iteration on one fixed rule.

    Each level's kernel uses degree at least ``2m + margin`` and is refined
    adaptively at ``probes``. On balls the diagonal kernel (and so the next
    weight at the outer nodes) is completed by the radial tail model unless
    ``tail=False``; plain truncation leaves a relative error of order
    ``d^{-3}`` in the first weight, which then propagates. Raises :class:`IterationFailure` (with the step)
    if a kernel or the next weight fails to be positive and finite.
    """
    n = domain.n
    if steps < 1:
        raise ValueError("steps must be positive")
    if rule is None:
        rule = tsuji_rule(domain, steps)
    probes = tsuji_probes(domain) if probes is None else _points(probes, n)
    weight = dom.Tabulated(rule, np.ones(rule.size))
    states = []
    log_scale = 0.0
    cap = min(2 * rule.resolution, default_max_degree(domain), 48 if n > 1 else 1 << 30)
    for m in range(1, steps + 1):
        try:
            model = build_kernel(domain, weight, probes, rule=rule, tol=tol, min_degree=2 * m + margin, max_degree=max(cap, min(2 * m + margin, default_max_degree(domain))), tail=tail)
        except BergkitError as exc:
            raise IterationFailure(f"kernel construction failed: {exc}", m) from exc
        norm = normalization(n, m) if normalized else 1.0
        state = TsujiState(m, weight, model, norm, log_scale, normalized, radial_spread(rule, weight.values))
        states.append(state)
        if m == steps:
            break
        k_nodes = model.diag(rule.nodes)
        if norm <= 0:
            raise IterationFailure(f"normalization N_{m} = {norm} is not positive", m)
        nxt = norm / k_nodes
        if not np.all(np.isfinite(nxt)) or not np.all(nxt > 0):
            raise IterationFailure("kernel is not positive and finite at every node", m)
        weight = dom.Tabulated(rule, nxt)
        log_scale += math.log(norm)
        log.info("tsuji m=%d degree=%d", m, model.system.max_degree)
    return states


def tsuji_probes(domain, count: int = 5, fraction: float = 0.6) -> np.ndarray:
    """Radial grid of probes along one ray, from the centre to ``fraction`` of the scale."""
    t = np.linspace(0.0, fraction, count) * domain.scale
    direction = np.exp(0.4j) * np.ones(domain.n) / math.sqrt(domain.n)
    return t[:, None] * direction[None, :]


def tsuji_error(state: TsujiState, domain, probes, convention: str = "theorem") -> tuple[np.ndarray, float]:
    """Pointwise and sup deviation of the normalised iterate from the KE volume.

    ``convention="theorem"`` returns ``(1/m) log(K̃_m/N_m) - log det g^{KE}``,
    which equals ``-(1/m) log(μ̃_{m+1}/μ^{KE}_{m+1})``.
    ``convention="product"`` returns ``(1/m) log(N_m K̃_m) - log det g^{KE}``.
    """
    pts = _points(probes, domain.n)
    k = state.kernel(pts)
    ld = np.array([oracles.ke_log_det(domain, z) for z in pts])
    m = state.m
    if convention == "theorem":
        err = (np.log(k) - math.log(state.normalization)) / m - ld
    elif convention == "product":
        err = (np.log(k) + math.log(state.normalization)) / m - ld
    else:
        raise ValueError(f"unknown convention {convention!r}")
    return err, float(np.max(np.abs(err)))


def tsuji_normalized_closed_form(n: int, m: int, z, r: float = 1.0) -> float:
    """Normalised iterate ``K̃_m(z) = K^B_m(z) / Π_{k<m} N_k`` on the ball."""
    log_scale = sum(math.log(normalization(n, k)) for k in range(1, m))
    return math.exp(math.log(oracles.tsuji_closed_form(n, m, z, r)) - log_scale)


@dataclass(frozen=True)
class RatioBounds:
    """``L_m <= μ^B/μ^{KE} <= U_m`` with the explicit constant ``D_m``."""

    L: float
    U: float
    D: float
    log_L: float
    log_U: float
    log_D: float


def ratio_bounds(n: int, r: float, m: int, C: float = 1.0) -> RatioBounds:
    """Bracket ``(π r^2)^{nm} D_m / C^m`` and ``C^m π^{nm} D_m``, computed in log space.

    Examples
    --------
    >>> round(ratio_bounds(1, 1.0, 2).D, 14)
    0.33333333333333
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if not C > 0 or not r > 0:
        raise ValueError("C and r must be positive")
    log_d = -oracles.log_inv_d(n, m)
    log_l = n * m * math.log(math.pi * r * r) + log_d - m * math.log(C)
    log_u = m * math.log(C) + n * m * math.log(math.pi) + log_d

    def _exp(x):
        return math.exp(x) if x < 709.0 else math.inf

    return RatioBounds(_exp(log_l), _exp(log_u), _exp(log_d), log_l, log_u, log_d)

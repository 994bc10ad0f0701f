"""Truncated orthonormal systems of weighted Bergman spaces and their kernels."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.special import betainc, gammaln

from . import domains as dom
from . import numerics, series
from .errors import DegenerateSystemError, DomainError, MismatchedWeightsError, NotPositiveSemidefiniteError, QuadratureError
from .series import TaylorPoly

CHUNK = 4096
RADIAL_MODE_TOL = 1e-13


def basis_indices(domain: dom.DomainSpec, max_degree: int) -> list[tuple[int, ...]]:
    """Lexicographically ordered exponents; Laurent range ``[-d, d]`` on annuli."""
    if isinstance(domain, dom.Annulus):
        return [(k,) for k in range(-max_degree, max_degree + 1)]
    return series.multi_indices(domain.n, max_degree)


def default_center(domain: dom.DomainSpec, rule: numerics.QuadratureRule | None = None) -> np.ndarray:
    """Expansion point: the origin if it lies in the domain (or the domain is an annulus), else the barycenter."""
    origin = np.zeros(domain.n, dtype=complex)
    if isinstance(domain, dom.Annulus) or dom.contains(domain, origin):
        return origin
    if rule is None:
        rule = numerics.build_quadrature(domain, 32)
    return (rule.weights @ rule.nodes) / rule.weights.sum()


def monomials(points, indices: Sequence[tuple[int, ...]], center) -> np.ndarray:
    """Matrix ``M[i, k] = (points_i - center)^{indices_k}``; negative exponents allowed."""
    pts = np.asarray(points, dtype=complex)
    if pts.ndim == 1:
        pts = pts[:, None] if len(indices[0]) == 1 else pts[None, :]
    idx = np.asarray(indices, dtype=int)
    zc = pts - np.asarray(center, dtype=complex)
    out = np.ones((pts.shape[0], idx.shape[0]), dtype=complex)
    for j in range(idx.shape[1]):
        lo, hi = int(idx[:, j].min()), int(idx[:, j].max())
        table = np.empty((pts.shape[0], hi - lo + 1), dtype=complex)
        col = zc[:, j]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            for e in range(lo, hi + 1):
                table[:, e - lo] = col**e if e >= 0 else 1.0 / col ** (-e)
        out *= table[:, idx[:, j] - lo]
    return out


def _gen_binom(beta: int, a: int) -> float:
    out = 1.0
    for i in range(a):
        out *= (beta - i) / (i + 1)
    return out


def monomial_taylor(indices, center, p, a) -> np.ndarray:
    """Coefficient of ``ζ^a`` in ``(p + ζ - center)^β`` for every β in ``indices``."""
    shift = np.asarray(p, dtype=complex) - np.asarray(center, dtype=complex)
    out = np.empty(len(indices), dtype=complex)
    for k, beta in enumerate(indices):
        val = 1.0 + 0.0j
        for bj, aj, cj in zip(beta, a, shift):
            if bj >= 0 and aj > bj:
                val = 0.0
                break
            c = _gen_binom(bj, aj)
            e = bj - aj
            if e == 0:
                pw = 1.0
            elif cj == 0:
                pw = 0.0 if e > 0 else np.inf
            else:
                pw = cj**e
            val *= c * pw
        out[k] = val
    return out


@dataclass(frozen=True, eq=False)
class OrthonormalSystem:
    """Orthonormal functions ``u^α = Σ_β C[α, β] (z - center)^β``.

    Rows of ``coeffs`` follow ``indices`` order restricted to ``retained``;
    ``coeffs[i, β] = 0`` for β lexicographically below the row's own index,
    which is the special-basis property at ``center``. ``norms`` are the
    squared norms of the minimizers normalised to leading coefficient 1.
    """

    domain: dom.DomainSpec
    weight: dom.WeightSpec
    rule: numerics.QuadratureRule
    center: np.ndarray
    indices: list
    retained: list
    coeffs: np.ndarray
    norms: np.ndarray
    dropped: list = field(default_factory=list)
    gram: np.ndarray | None = None  # full Gram, or its diagonal when the monomials are orthogonal

    @property
    def max_degree(self) -> int:
        return max(max(abs(x) for x in a) if isinstance(self.domain, dom.Annulus) else sum(a) for a in self.indices)

    @property
    def size(self) -> int:
        return len(self.retained)

    @property
    def diagonal(self) -> bool:
        """Whether each ``u^α`` is a multiple of a single monomial."""
        return self.gram is not None and self.gram.ndim == 1

    def values(self, points) -> np.ndarray:
        """``u^α`` at points, shape (N, size)."""
        mono = monomials(points, self.indices, self.center)
        if self.diagonal:
            return mono * np.diagonal(self.coeffs)[None, :]
        return mono @ self.coeffs.T

    def taylor_vectors(self, p, order: int) -> dict:
        """Taylor coefficients ``D^a u^α(p)/a!`` as vectors over α, for ``|a| <= order``."""
        n = self.domain.n
        if self.diagonal:
            d = np.diagonal(self.coeffs)
            return {a: d * monomial_taylor(self.indices, self.center, p, a) for a in series.multi_indices(n, order)}
        return {a: self.coeffs @ monomial_taylor(self.indices, self.center, p, a) for a in series.multi_indices(n, order)}

    def orthonormality_defect(self) -> float:
        """Frobenius norm of ``Gram(u) - I`` under the bound rule."""
        if self.gram is None:
            return float("nan")
        gram = np.diag(self.gram) if self.gram.ndim == 1 else self.gram
        g = self.coeffs[:, self.retained] @ gram[np.ix_(self.retained, self.retained)] @ self.coeffs[:, self.retained].conj().T
        return float(np.linalg.norm(g - np.eye(g.shape[0])))


def assemble_gram(rule: numerics.QuadratureRule, weight: dom.WeightSpec, indices, center) -> np.ndarray:
    """``G[α, β] = ∫ (z-c)^α conj((z-c)^β) μ dλ`` on ``rule``.

    On spectral-radial rules centred at the origin the angular integration
    is done exactly via FFT of the weight along each rotation class; a
    radial weight gives a diagonal Gram.
    """
    G = _assemble(rule, weight, indices, center)
    return np.diag(G).astype(complex) if G.ndim == 1 else G


def _assemble(rule, weight, indices, center) -> np.ndarray:
    """Gram matrix, or just its diagonal (1-D array) when it is exactly diagonal."""
    idx = np.asarray(indices, dtype=int)
    radial_tier = rule.tier == "spectral-radial" and not np.any(np.asarray(center))
    if radial_tier:
        n = rule.n
        A = rule.n_angles
        s = rule.moduli**2
        if isinstance(weight, dom.Tabulated) or not dom.is_radial(weight):
            vals = dom.weight_values(weight, rule.nodes, rule).reshape((-1,) + (A,) * n)
            modes = np.fft.fftn(vals, axes=tuple(range(1, n + 1))) / A**n
            mu0 = modes[(slice(None),) + (0,) * n].real
            rest = modes.copy()
            rest[(slice(None),) + (0,) * n] = 0
            radial = np.abs(rest).max() <= RADIAL_MODE_TOL * np.abs(mu0).max()
        else:
            mu0 = dom.weight_values(weight, rule.moduli)
            radial = True
        wr = rule.radial_weights * mu0
        if radial:
            with np.errstate(divide="ignore"):
                logs = np.log(s)
            return wr @ np.exp(logs @ idx.T.astype(float))
        span = (idx[:, None, :] - idx[None, :, :])
        if np.abs(span).max() >= A:
            raise QuadratureError(f"{A} angles cannot resolve a non-radial weight at degree span {np.abs(span).max()}")
        G = np.zeros((len(idx), len(idx)), dtype=complex)
        rmod = np.sqrt(s)
        for i, a in enumerate(idx):
            for j in range(i, len(idx)):
                b = idx[j]
                key = (slice(None),) + tuple(int(x) % A for x in (b - a))
                val = np.sum(rule.radial_weights * modes[key] * np.prod(rmod ** (a + b), axis=1))
                G[i, j] = val
                G[j, i] = np.conj(val)
        return G
    w = rule.weights * dom.weight_values(weight, rule.nodes, rule)
    G = np.zeros((len(idx), len(idx)), dtype=complex)
    for start in range(0, rule.size, CHUNK):
        V = monomials(rule.nodes[start : start + CHUNK], indices, center)
        G += V.T @ (w[start : start + CHUNK, None] * V.conj())
    return G


def _default_rule(domain, weight, max_degree):
    return numerics.build_quadrature(domain, required_resolution(domain, weight, max_degree), default_angles(domain, max_degree, weight))


def default_angles(domain, max_degree, weight=None) -> int | None:
    """Angular nodes per coordinate; only non-radial weights need more than a few."""
    if weight is not None and dom.is_radial(weight):
        return 8 if domain.n == 1 else 4
    if domain.n == 1 and domain.reinhardt:
        return max(32, 2 * max_degree + 8)
    return None


def default_max_degree(domain) -> int:
    """Cap for adaptive degree growth; the basis has O(d^n) elements.

    Grid-tier domains stop at 64: their rule is only accurate to about 1e-6,
    so higher degrees add cost without adding accuracy.
    """
    if isinstance(domain, dom.GeneralPlanar):
        return 64
    return {1: 2048, 2: 96}.get(domain.n, 24)


def weight_degree_hint(weight) -> float:
    """Rough polynomial degree of a weight in the squared moduli."""
    if isinstance(weight, dom.RadialPower):
        return weight.m
    if isinstance(weight, dom.PotentialWeight):
        pot = weight.potential
        if isinstance(pot, dom.BallPotential):
            return weight.m
        if isinstance(pot, dom.KEPotential):
            return weight.m * (pot.n + 1)
        return 16 + 4 * weight.m
    return 0


def required_resolution(domain, weight, max_degree: int) -> int:
    """Radial node count that integrates every Gram entry of degree ``max_degree``."""
    if isinstance(domain, dom.GeneralPlanar):
        return 96
    if isinstance(domain, dom.Annulus):
        return 2 * max_degree + 48
    return int(max_degree + math.ceil(weight_degree_hint(weight) / 2) + domain.n + 8)


def build_orthonormal_system(
    domain: dom.DomainSpec,
    weight: dom.WeightSpec,
    max_degree: int,
    center=None,
    rule: numerics.QuadratureRule | None = None,
    drop_tol: float = numerics.DROP_TOL,
) -> OrthonormalSystem:
    """Special orthonormal basis of the span of monomials of degree ``<= max_degree``.

    The Gram matrix is Jacobi-scaled and pivot-factorized to find a
    well-conditioned index set; that set is then orthonormalized in reverse
    lexicographic order so each ``u^α`` only involves monomials ``β >= α``.
    """
    if max_degree < 0:
        raise ValueError("max_degree must be nonnegative")
    if rule is None:
        rule = _default_rule(domain, weight, max_degree)
    elif rule.domain != domain:
        raise QuadratureError("rule was built for a different domain")
    if center is None:
        center = default_center(domain, rule)
    center = np.asarray(center, dtype=complex).reshape(domain.n)
    indices = basis_indices(domain, max_degree)
    G = _assemble(rule, weight, indices, center)
    d = G.real if G.ndim == 1 else G.diagonal().real
    if not np.all(d > 0):
        raise NotPositiveSemidefiniteError("Gram diagonal is not positive: quadrature failure")
    sq = np.sqrt(d)
    if G.ndim == 1:
        # orthogonal monomials: the special basis is the normalised monomials
        C = np.diag(1.0 / sq).astype(complex)
        return OrthonormalSystem(domain, weight, rule, center, indices, list(range(len(indices))), C, d.copy(), [], G)
    S = G / np.outer(sq, sq)
    fac = numerics.pivoted_factorization(S, drop_tol)
    if not fac.retained:
        raise DegenerateSystemError("all basis indices were dropped")
    order = sorted((int(i) for i in fac.retained), reverse=True)
    SR = S[np.ix_(order, order)]
    try:
        L = np.linalg.cholesky(SR)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveSemidefiniteError("retained Gram is not positive definite: quadrature failure") from exc
    T = np.linalg.solve(L, np.eye(len(order)))
    T = np.tril(T)
    C = np.zeros((len(order), len(indices)), dtype=complex)
    C[:, order] = T / sq[order][None, :]
    # rows in lexicographic order of their leading index
    rows = np.argsort(order)
    C = C[rows]
    retained = sorted(order)
    lead = C[np.arange(len(retained)), retained]
    norms = 1.0 / np.abs(lead) ** 2
    dropped = [indices[i] for i in fac.dropped]
    return OrthonormalSystem(domain, weight, rule, center, indices, retained, C, norms, dropped, G)


# --------------------------------------------------------------------------
# kernel
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class KernelModel:
    """Weighted Bergman kernel ``K(z, w) = Σ_α u^α(z) conj(u^α(w))`` of a truncated system."""

    system: OrthonormalSystem
    converged: bool = True
    tail: "RadialTail | None" = None

    @property
    def domain(self):
        return self.system.domain

    @property
    def weight(self):
        return self.system.weight

    def _check(self, pts):
        inside = np.atleast_1d(dom.contains(self.domain, pts))
        if not np.all(inside):
            raise DomainError("kernel evaluated outside the domain")

    def values(self, z, w) -> np.ndarray:
        """``K(z_i, w_i)`` for paired arrays of points (N, n)."""
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        w = np.atleast_2d(np.asarray(w, dtype=complex))
        self._check(z)
        self._check(w)
        uz = self.system.values(z)
        uw = self.system.values(w)
        return np.sum(uz * uw.conj(), axis=1)

    def matrix(self, z, w) -> np.ndarray:
        """``K(z_i, w_j)`` for all pairs."""
        return self.system.values(np.atleast_2d(z)) @ self.system.values(np.atleast_2d(w)).conj().T

    def diag(self, points) -> np.ndarray:
        """``K(z, z)`` at each point, shape (N,)."""
        pts = np.asarray(points, dtype=complex)
        if pts.ndim == 1:
            pts = pts.reshape(-1, self.domain.n) if self.domain.n == 1 else pts[None, :]
        out = np.empty(pts.shape[0])
        for start in range(0, pts.shape[0], CHUNK):
            u = self.system.values(pts[start : start + CHUNK])
            out[start : start + CHUNK] = np.sum(np.abs(u) ** 2, axis=1)
        if self.tail is not None:
            out = out + self.tail(np.sum(np.abs(pts) ** 2, axis=1))
        return out

    def taylor(self, p, order: int = 4) -> TaylorPoly:
        """Taylor polynomial of ``K(p + ζ, p + ζ)`` in ``(ζ, ζ̄)``, computed term-wise."""
        p = np.asarray(p, dtype=complex).reshape(self.domain.n)
        self._check(p[None, :])
        vecs = self.system.taylor_vectors(p, order)
        terms = []
        for a, ua in vecs.items():
            for b, ub in vecs.items():
                if sum(a) + sum(b) <= order:
                    terms.append((a, b, np.sum(ua * ub.conj())))
        return TaylorPoly.from_terms(self.domain.n, order, terms)

    def log_taylor(self, p, order: int = 4) -> TaylorPoly:
        k = self.taylor(p, order)
        if not k.constant_term.real > 0:
            raise DegenerateSystemError("kernel diagonal is not positive")
        return series.log(k)


def kernel_eval(model: KernelModel, z, w) -> complex:
    """``K(z, w)`` at a single pair of points."""
    n = model.domain.n
    z = np.asarray(z, dtype=complex).reshape(1, n)
    w = np.asarray(w, dtype=complex).reshape(1, n)
    return complex(model.values(z, w)[0])


@dataclass(frozen=True)
class RadialTail:
    """Closed-form remainder of a truncated norm-radial ball kernel.

    On ``B^n(r)`` with a weight depending on ``|z|`` only, the diagonal
    kernel is ``Σ_k c_k t^k`` with ``t = |z|^2/r^2``. Beyond the truncation
    degree ``d`` the coefficients are modelled as
    ``c_k = A Γ(k+b)/Γ(k+1)``, with ``A`` and ``b`` matched to ``c_{d-1}``
    and ``c_d``. The model is exact when the weight is a power of
    ``1 - t`` and asymptotic otherwise. Its sum over ``k > d`` is
    ``A Γ(b) (1-t)^{-b} I_t(d+1, b)`` with ``I`` the regularised
    incomplete beta function.
    """

    degree: int
    log_amplitude: float
    exponent: float
    r: float

    def __call__(self, sq_norms) -> np.ndarray:
        t = np.asarray(sq_norms, dtype=float) / self.r**2
        b = self.exponent
        with np.errstate(divide="ignore"):
            log_tail = self.log_amplitude + gammaln(b) - b * np.log1p(-t) + np.log(betainc(self.degree + 1, b, t))
        return np.exp(log_tail)


def radial_tail(system: OrthonormalSystem, rtol: float = 1e-8) -> RadialTail | None:
    """Tail model for a diagonal system on an origin-centred ball, or ``None``.

    Returns ``None`` unless the Gram is diagonal, the centre is the origin
    and the monomial norms depend on ``|α|`` only through ``α!`` (checked
    to ``rtol``), which is the case for weights that are functions of ``|z|``.
    """
    domain = system.domain
    if not (isinstance(domain, dom.Ball) and system.diagonal) or np.any(np.abs(system.center) > 0):
        return None
    d = system.max_degree
    if d < 4:
        return None
    n, r = domain.n, domain.r
    # log c_k r^{2k} = -log k! - log(M_α/α!) + 2k log r for every |α| = k
    log_c: dict[int, list[float]] = {}
    for a, g in zip(system.indices, system.gram):
        k = sum(a)
        la = sum(math.lgamma(x + 1) for x in a)
        log_c.setdefault(k, []).append(-math.lgamma(k + 1) - math.log(g) + la + 2 * k * math.log(r))
    if sorted(log_c) != list(range(d + 1)) or len(log_c[d]) != math.comb(d + n - 1, n - 1):
        return None
    for vals in log_c.values():
        if max(vals) - min(vals) > rtol:
            return None
    lc_d, lc_prev = float(np.mean(log_c[d])), float(np.mean(log_c[d - 1]))
    b = d * math.exp(lc_d - lc_prev) - d + 1
    if not (math.isfinite(b) and b > 0):
        return None
    log_amp = lc_d + math.lgamma(d + 1) - math.lgamma(d + b)
    return RadialTail(d, log_amp, b, r)


def build_kernel(
    domain: dom.DomainSpec,
    weight: dom.WeightSpec,
    probes=None,
    *,
    degree: int | None = None,
    rule: numerics.QuadratureRule | None = None,
    center=None,
    tol: float = 1e-9,
    start: int = 8,
    max_degree: int | None = None,
    min_degree: int = 0,
    tail: bool = False,
) -> KernelModel:
    """Kernel model with a fixed or adaptively chosen truncation degree.

    Adaptive mode doubles the degree until the diagonal kernel at ``probes``
    moves by less than ``tol`` (relative). When ``rule`` is given it is reused
    at every degree (needed for tabulated weights). A model that hit
    ``max_degree`` before converging is returned with ``converged=False``.
    With ``tail=True`` the diagonal of norm-radial ball kernels is completed
    by :class:`RadialTail` (ignored where :func:`radial_tail` does not apply).
    """

    def make(d):
        system = build_orthonormal_system(domain, weight, d, center, rule)
        return KernelModel(system, tail=radial_tail(system) if tail else None)

    if degree is not None:
        return make(degree)
    if probes is None:
        probes = default_probes(domain)
    probes = np.asarray(probes, dtype=complex).reshape(-1, domain.n)
    if max_degree is None:
        max_degree = default_max_degree(domain)
    d = min(max(start, min_degree), max_degree)
    prev = None
    while True:
        model = make(d)
        vals = model.diag(probes)
        if prev is not None and np.max(np.abs(vals - prev) / np.abs(vals)) < tol:
            return model
        if d >= max_degree:
            return KernelModel(model.system, converged=False, tail=model.tail)
        prev = vals
        d = min(2 * d, max_degree)


def default_probes(domain: dom.DomainSpec, count: int = 5, fraction: float = 0.6) -> np.ndarray:
    """Deterministic probe points inside the domain, at most ``fraction`` of its scale."""
    n = domain.n
    if isinstance(domain, dom.Annulus):
        rs = np.linspace(domain.r_in + 0.25 * (domain.r_out - domain.r_in), domain.r_in + 0.75 * (domain.r_out - domain.r_in), count)
        return (rs * np.exp(1j * np.linspace(0.3, 5.0, count)))[:, None]
    rs = np.linspace(0.0, fraction * domain.scale, count)
    out = np.zeros((count, n), dtype=complex)
    dirs = np.exp(1j * np.linspace(0.0, 2.5, count))
    for i, (r, ph) in enumerate(zip(rs, dirs)):
        v = np.ones(n) / math.sqrt(n) if i % 2 else np.eye(n)[0]
        out[i] = r * ph * v
    if isinstance(domain, dom.GeneralPlanar):
        c = default_center(domain)
        out = out + c
        out = out[np.atleast_1d(dom.contains(domain, out))]
    return out


def reproducing_residual(model: KernelModel, u, z) -> float:
    """``|∫ K(z, w) u(w) μ(w) dλ(w) - u(z)|`` on the model's rule.

    ``u`` is a polynomial given as ``{exponent: coefficient}`` in the
    coordinates ``z`` (origin centred), or a vectorised callable.
    Radial rules carry few angles when the weight is radial; for a
    polynomial ``u`` on a planar Reinhardt domain the rule is widened in
    angle (same radial nodes) so the product ``K u`` is integrated exactly.
    """
    sysm = model.system
    rule = sysm.rule
    n = model.domain.n
    if isinstance(u, Mapping) and rule.tier == "spectral-radial" and n == 1 and not isinstance(sysm.weight, dom.Tabulated):
        q = max(abs(int(np.atleast_1d(e)[0])) for e in u)
        need = sysm.max_degree + q + 2
        if rule.n_angles < need:
            rule = numerics.build_quadrature(model.domain, rule.resolution, need)
    if isinstance(u, Mapping):
        exps = list(u.keys())
        coefs = np.array([u[e] for e in exps], dtype=complex)

        def ufunc(pts):
            return monomials(pts, [tuple(np.atleast_1d(e)) for e in exps], np.zeros(n)) @ coefs

    else:
        ufunc = u
    z = np.asarray(z, dtype=complex).reshape(1, n)
    mu = dom.weight_values(sysm.weight, rule.nodes, rule)
    uz = sysm.values(z)[0]
    total = 0.0 + 0.0j
    for start in range(0, rule.size, CHUNK):
        nodes = rule.nodes[start : start + CHUNK]
        kz = sysm.values(nodes).conj() @ uz
        total += np.sum(rule.weights[start : start + CHUNK] * mu[start : start + CHUNK] * kz * ufunc(nodes))
    return float(abs(total - ufunc(z)[0]))


def transformation_check(
    model_source: KernelModel,
    model_target: KernelModel,
    F: Callable,
    jacobian: Callable,
    probes: Sequence,
    h: Callable | None = None,
    weight_tol: float = 1e-6,
) -> float:
    """Largest relative defect of ``K(z,w) = J(z)h(z) K'(F z, F w) conj(J(w)h(w))`` over probe pairs.

    Each probe is a pair ``(z, w)``. The defect is measured relative to
    ``sqrt(K(z,z) K(w,w))`` so off-diagonal zeros of K do not blow it up.
    Raises :class:`MismatchedWeightsError` if ``μ'(F z) = |h(z)|^2 μ(z)``
    fails at a probe.
    """
    n = model_source.domain.n
    hf = h if h is not None else (lambda z: 1.0)
    worst = 0.0
    for z, w in probes:
        z = np.asarray(z, dtype=complex).reshape(n)
        w = np.asarray(w, dtype=complex).reshape(n)
        for pt in (z, w):
            lhs = dom.weight_eval(model_target.weight, np.asarray(F(pt)).reshape(n))
            rhs = abs(hf(pt)) ** 2 * dom.weight_eval(model_source.weight, pt)
            if abs(lhs - rhs) > weight_tol * max(abs(rhs), 1e-300):
                raise MismatchedWeightsError(f"weights do not transform at {pt}: {lhs} vs {rhs}")
        fz = np.asarray(F(z), dtype=complex).reshape(n)
        fw = np.asarray(F(w), dtype=complex).reshape(n)
        lhs = kernel_eval(model_source, z, w)
        rhs = jacobian(z) * hf(z) * kernel_eval(model_target, fz, fw) * np.conj(jacobian(w) * hf(w))
        scale = math.sqrt(kernel_eval(model_source, z, z).real * kernel_eval(model_source, w, w).real)
        worst = max(worst, float(np.abs(lhs - rhs).max()) / scale)
    return worst

"""Metrics and curvatures from kernels and potentials, and Bochner normal coordinates.

Two routes are provided. The *kernel route* expands ``log K(p+ζ, p+ζ)`` to
fourth order and reads the Kähler metric ``g = ∂∂̄ log K`` and its curvature
tensor off the Taylor coefficients. The *jet route* puts a potential into
normal form ``Φ(w) = |w|^2 + ¼ Σ Φ_{ij̄kl̄} w_i w̄_j w_k w̄_l + O(|w|^5)`` by a
holomorphic polynomial change of coordinates and reads the curvatures off
the quartic coefficients.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import domains as dom
from . import series
from .errors import DegenerateSystemError, NotStrictlyPSHError
from .series import TaylorPoly

CONVENTION = "hsc = R(X,X̄,X,X̄)/g(X,X̄)^2, R_ij̄kl̄ = -∂k∂l̄ g_ij̄ + g^{pq̄} ∂k g_iq̄ ∂l̄ g_pj̄"
EIGEN_FLOOR = 1e-12
JET_TOL = 1e-10


def _unit(n: int, *js: int) -> tuple[int, ...]:
    out = [0] * n
    for j in js:
        out[j] += 1
    return tuple(out)


# --------------------------------------------------------------------------
# tensors from a local potential
# --------------------------------------------------------------------------


def metric_matrix(poly: TaylorPoly) -> np.ndarray:
    """``G[j, k] = ∂_j ∂̄_k`` of a potential's Taylor polynomial at its base point."""
    n = poly.n
    return np.array([[poly.derivative(_unit(n, j), _unit(n, k)) for k in range(n)] for j in range(n)])


def curvature_tensor(poly: TaylorPoly) -> np.ndarray:
    """``R[i, j, k, l] = R_{ij̄kl̄}`` of the Kähler metric with potential ``poly``.

    ``R_{ij̄kl̄} = -∂_k∂̄_l g_{ij̄} + g^{pq̄} ∂_k g_{iq̄} ∂̄_l g_{pj̄}`` where
    ``g^{pq̄}`` is the inverse matrix, ``Σ_q g^{pq̄} g_{sq̄} = δ_{ps}``.
    """
    n = poly.n
    G = metric_matrix(poly)
    Ginv = np.linalg.inv(G)  # Ginv[q, s] solves Σ_q G[s, q] Ginv[q, p] = δ
    d1 = np.empty((n, n, n), dtype=complex)  # d1[i, q, k] = ∂_k g_{iq̄}
    d1b = np.empty((n, n, n), dtype=complex)  # d1b[p, j, l] = ∂̄_l g_{pj̄}
    d2 = np.empty((n, n, n, n), dtype=complex)  # d2[i, j, k, l] = ∂_k ∂̄_l g_{ij̄}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                d1[i, j, k] = poly.derivative(_unit(n, i, k), _unit(n, j))
                d1b[i, j, k] = poly.derivative(_unit(n, i), _unit(n, j, k))
                for l in range(n):
                    d2[i, j, k, l] = poly.derivative(_unit(n, i, k), _unit(n, j, l))
    # g^{pq̄} = Ginv[q, p]
    quad = np.einsum("qp,iqk,pjl->ijkl", Ginv, d1, d1b)
    return -d2 + quad


def hsc_from_potential(poly: TaylorPoly, X) -> float:
    """Holomorphic sectional curvature ``R(X, X̄, X, X̄)/g(X, X̄)^2``."""
    X = np.atleast_1d(np.asarray(X, dtype=complex))
    G = metric_matrix(poly)
    gx = float(np.real(X @ G @ X.conj()))
    if not gx > 0:
        raise DegenerateSystemError("metric is not positive in the direction X")
    R = curvature_tensor(poly)
    rx = np.einsum("ijkl,i,j,k,l->", R, X, X.conj(), X, X.conj())
    return float(rx.real) / gx**2


def _check_positive(G: np.ndarray) -> bool:
    ev = np.linalg.eigvalsh(0.5 * (G + G.conj().T))
    return bool(ev.min() > 0)


# --------------------------------------------------------------------------
# kernel route
# --------------------------------------------------------------------------


def kernel_log_taylor(model, p, order: int = 4, tol: float = 1e-300) -> TaylorPoly:
    """Taylor polynomial of ``log K(z, z)`` at ``p`` (analytic, term-wise)."""
    poly = model.taylor(p, order)
    k0 = poly.constant_term.real
    if not k0 > tol:
        raise DegenerateSystemError(f"K(p, p) = {k0:.3e} is not positive")
    return series.log(poly)


def metric_tensor_from_kernel(model, p) -> np.ndarray:
    """Matrix ``g_{jk̄}(p) = ∂_j ∂̄_k log K(p, p)``."""
    return metric_matrix(kernel_log_taylor(model, p, 2))


def metric_from_kernel(model, p, X) -> float:
    """Weighted Bergman metric ``Σ g_{jk̄}(p) X_j X̄_k``.

    An indefinite Hessian of ``log K`` (pseudo-metric) is reported with a
    :class:`RuntimeWarning` and the value is still returned.
    """
    X = np.atleast_1d(np.asarray(X, dtype=complex))
    G = metric_tensor_from_kernel(model, p)
    if not _check_positive(G):
        warnings.warn(f"weighted Bergman metric is not positive definite at {p}", RuntimeWarning, stacklevel=2)
    return float(np.real(X @ G @ X.conj()))


def hsc_from_kernel(model, p, X) -> float:
    """Holomorphic sectional curvature of the weighted Bergman metric at ``p``."""
    poly = kernel_log_taylor(model, p, 4)
    if not _check_positive(metric_matrix(poly)):
        raise DegenerateSystemError(f"weighted Bergman metric is indefinite at {p}")
    return hsc_from_potential(poly, X)


# --------------------------------------------------------------------------
# Bochner normal coordinates
# --------------------------------------------------------------------------


def inverse_sqrt(H: np.ndarray, floor: float = EIGEN_FLOOR) -> np.ndarray:
    """Hermitian inverse square root via eigendecomposition."""
    H = 0.5 * (H + H.conj().T)
    ev, V = np.linalg.eigh(H)
    if ev.min() <= floor * max(1.0, abs(ev).max()):
        raise NotStrictlyPSHError(f"Hessian eigenvalues {ev} are not safely positive")
    return (V / np.sqrt(ev)) @ V.conj().T


@dataclass(frozen=True, eq=False)
class BochnerMap:
    """Normal-form data of a potential at ``p``.

    Attributes
    ----------
    p : ndarray
        Base point.
    f : list of TaylorPoly
        Holomorphic coordinate change ``w = f(z - p)`` of degree ``<= 3``.
    h : TaylorPoly
        Holomorphic polynomial (degree ``<= 4``) with ``2 Re h`` removing the
        pluriharmonic part of the potential.
    sqrt_inv_hessian : ndarray
        Matrix ``M`` with ``f = M v + ...`` where ``v_k = Σ_j φ_{jk̄} ζ_j``.
    phi : TaylorPoly
        Normal form ``Φ`` through total order 4 in ``(w, w̄)``.
    quartic : ndarray
        ``Φ_{ij̄kl̄}(0)``, indexed ``[i, j, k, l]``.
    """

    p: np.ndarray
    f: list
    h: TaylorPoly
    sqrt_inv_hessian: np.ndarray
    phi: TaylorPoly
    quartic: np.ndarray
    inverse: list
    hessian: np.ndarray

    @property
    def n(self) -> int:
        return len(self.p)

    @property
    def differential(self) -> np.ndarray:
        """Matrix of ``df(p)``: ``df[j, i] = ∂ f_j/∂ z_i``."""
        n = self.n
        return np.array([[self.f[j].coeff(_unit(n, i), (0,) * n) for i in range(n)] for j in range(n)])

    def invariants(self) -> dict[str, float]:
        """Defects of the normal-form identities (all should vanish)."""
        n = self.n
        eye = max(abs(self.phi.derivative(_unit(n, i), _unit(n, j)) - (i == j)) for i in range(n) for j in range(n))
        pure = max((abs(v) for a, b, v in self.phi.items() if sum(a) == 0 or sum(b) == 0), default=0.0)
        mixed = max(
            (abs(v) for a, b, v in self.phi.items() if sum(b) == 1 and 2 <= sum(a) <= 3 or sum(a) == 1 and 2 <= sum(b) <= 3),
            default=0.0,
        )
        jac = abs(abs(np.linalg.det(self.differential)) ** 2 - np.linalg.det(self.hessian).real)
        jac /= max(1.0, abs(np.linalg.det(self.hessian)))
        return {"metric": float(eye), "pure": float(pure), "mixed": float(mixed), "jacobian": float(jac)}

    def normal_form_value(self, potential: dom.Potential, w) -> float:
        """Exact ``Φ(w) = (φ - 2 Re h)(p + f^{-1}(w))`` using the order-4 inverse series."""
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        zeta = np.array([g(w) for g in self.inverse])
        val = float(np.asarray(potential.value(self.p + zeta)).reshape(-1)[0])
        return val - 2.0 * self.h(zeta).real


def bochner_normal_map(jet: dom.Jet4) -> BochnerMap:
    """Holomorphic normal coordinates of order 4 for the potential with 4-jet ``jet``.

    Examples
    --------
    >>> from bergkit.domains import BallPotential, potential_jet
    >>> bm = bochner_normal_map(potential_jet(BallPotential(1), [0.0]))
    >>> round(bm.quartic[0, 0, 0, 0].real, 12)
    2.0
    """
    n = jet.n
    order = dom.JET_ORDER
    T = jet.taylor()
    A = jet.hessian()
    M = inverse_sqrt(A.T)
    zero = (0,) * n
    # v_k(ζ) = Σ_{1<=|a|<=3} D^a φ_k̄(p)/a! ζ^a
    v = []
    for k in range(n):
        ek = _unit(n, k)
        terms = {a + zero: T.coeff(a, ek) for a in series.multi_indices(n, 3) if sum(a) >= 1}
        v.append(TaylorPoly(n, order, terms))
    f = [sum((v[k] * M[j, k] for k in range(n)), TaylorPoly(n, order)) for j in range(n)]
    h = T.holomorphic_part().filter(lambda a, b: sum(a) >= 1) + T.constant_term.real / 2
    psi = T - h - h.conj()
    g = series.invert_map(f)
    phi = psi.compose(g)
    quartic = np.empty((n,) * 4, dtype=complex)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    quartic[i, j, k, l] = phi.derivative(_unit(n, i, k), _unit(n, j, l))
    return BochnerMap(jet.p, f, h, M, phi, quartic, g, A)


@dataclass(frozen=True)
class CurvatureReport:
    """Scalar curvature, Ricci curvature along X and holomorphic sectional curvature."""

    S: float
    R: float
    H: float
    convention: str = "normal-form: S=-ΣΦ_iījj̄, R=-ΣΦ_ab̄iī Y_a Ȳ_b, H=-ΣΦ_ij̄kl̄ Y_i Ȳ_j Y_k Ȳ_l"


def curvature_from_jet(bmap: BochnerMap, X) -> CurvatureReport:
    """Curvatures of ``g_φ`` at ``p`` along ``X``, normalised so ``g_φ(p; X) = 1``.

    The direction enters through ``Y = df(X)/|df(X)|``, which is what
    rotating ``X`` onto ``∂/∂w_1`` by a unitary amounts to.
    """
    X = np.atleast_1d(np.asarray(X, dtype=complex))
    Y = bmap.differential @ X
    nrm = np.linalg.norm(Y)
    if nrm == 0:
        raise ValueError("direction X must be nonzero")
    Y = Y / nrm
    Q = bmap.quartic
    S = -np.einsum("iijj->", Q).real
    R = -np.einsum("abii,a,b->", Q, Y, Y.conj()).real
    H = -np.einsum("ijkl,i,j,k,l->", Q, Y, Y.conj(), Y, Y.conj()).real
    return CurvatureReport(float(S), float(R), float(H))


def potential_curvatures(source, p, X) -> CurvatureReport:
    """Convenience: jet, normal map and curvatures of a potential in one call."""
    return curvature_from_jet(bochner_normal_map(dom.potential_jet(source, p)), X)


def quintic_remainder(bmap: BochnerMap, potential: dom.Potential, radii=None, directions: int = 6, seed: int = 0):
    """Sampled remainder ``|Φ(w) - |w|^2 - ¼ Σ Φ_{ij̄kl̄} w_i w̄_j w_k w̄_l|``.

    Returns ``(radii, remainders, slope)`` where ``slope`` is the least-squares
    log-log slope of the maximum remainder over random unit directions.
    """
    if radii is None:
        radii = np.geomspace(1e-2, 1e-1, 8)
    radii = np.asarray(radii, dtype=float)
    n = bmap.n
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(directions, n)) + 1j * rng.normal(size=(directions, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    Q = bmap.quartic
    rem = np.zeros(radii.size)
    for i, rho in enumerate(radii):
        worst = 0.0
        for d in dirs:
            w = rho * d
            model = np.sum(np.abs(w) ** 2) + 0.25 * np.einsum("ijkl,i,j,k,l->", Q, w, w.conj(), w, w.conj()).real
            worst = max(worst, abs(bmap.normal_form_value(potential, w) - model))
        rem[i] = worst
    slope = float(np.polyfit(np.log(radii), np.log(np.maximum(rem, 1e-300)), 1)[0])
    return radii, rem, slope


def einstein_residual(domain, probes) -> float:
    """Largest ``|∂∂̄ log det g^{KE} - g^{KE}|`` (Frobenius) over probes.

    Uses the exact jet of the KE potential; for ``Ric = -g`` the complex
    Hessian of ``log det g`` must equal the metric itself.
    """
    from .oracles import ke_metric

    pot = dom.KEPotential(domain)
    worst = 0.0
    for z in np.atleast_2d(np.asarray(probes, dtype=complex)).reshape(-1, domain.n):
        hess = dom.potential_jet(pot, z).hessian()
        G = ke_metric(domain, z)
        worst = max(worst, float(np.linalg.norm(hess - G) / max(1.0, np.linalg.norm(G))))
    return worst


__all__ = [
    "BochnerMap",
    "CONVENTION",
    "CurvatureReport",
    "bochner_normal_map",
    "curvature_from_jet",
    "curvature_tensor",
    "einstein_residual",
    "hsc_from_kernel",
    "hsc_from_potential",
    "inverse_sqrt",
    "kernel_log_taylor",
    "metric_from_kernel",
    "metric_matrix",
    "metric_tensor_from_kernel",
    "potential_curvatures",
    "quintic_remainder",
]

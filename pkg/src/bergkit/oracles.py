"""Closed-form ground truth on model domains.

Weighted ball kernels with weight ``((r^2 - |z|^2)/r^2)^m``, their metrics and
curvatures, Kähler-Einstein data (``Ric = -g``) on balls and polydiscs, and
the unnormalized dynamical (Tsuji) kernels of the ball.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from . import domains as dom
from .errors import DomainError, UnsupportedReductionError


def _sq(w) -> float:
    return float(np.sum(np.abs(np.atleast_1d(np.asarray(w, dtype=complex))) ** 2))


def log_c_m(n: int, r: float, m: float) -> float:
    """``log c_m(r)`` where ``c_m(r) = (π r^2)^n m!/(n+m)!`` is the weighted ball volume."""
    return n * math.log(math.pi * r * r) + gammaln(m + 1) - gammaln(n + m + 1)


def c_m(n: int, r: float, m: float) -> float:
    """Weighted volume ``∫_{B^n(r)} ((r^2-|z|^2)/r^2)^m dλ``."""
    return math.exp(log_c_m(n, r, m))


def fr_kernel(n: int, r: float, m: float, w) -> float:
    """Diagonal weighted ball kernel ``(1/c_m(r)) (r^2/(r^2-|w|^2))^{n+m+1}``.

    Examples
    --------
    >>> round(fr_kernel(1, 1.0, 0, 0.0) * math.pi, 12)
    1.0
    """
    s = _sq(w)
    if s >= r * r:
        raise DomainError(f"|w|^2 = {s} outside the ball of radius {r}")
    return math.exp(-log_c_m(n, r, m) + (n + m + 1) * math.log(r * r / (r * r - s)))


def fr_kernel_offdiag(n: int, r: float, m: float, z, w) -> complex:
    """Off-diagonal weighted ball kernel ``(1/c_m) (r^2/(r^2 - <z, w>))^{n+m+1}``."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    if max(_sq(z), _sq(w)) >= r * r:
        raise DomainError("point outside the ball")
    inner = complex(np.sum(z * np.conj(w)))
    return np.exp(-log_c_m(n, r, m)) * (r * r / (r * r - inner)) ** (n + m + 1)


def fr_metric_matrix(n: int, r: float, m: float, w) -> np.ndarray:
    """``g_{jk̄} = (n+m+1)((r^2-|w|^2)δ_{jk} + w̄_j w_k)/(r^2-|w|^2)^2``."""
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    d = r * r - _sq(w)
    if d <= 0:
        raise DomainError("point outside the ball")
    return (n + m + 1) * (d * np.eye(n) + np.outer(np.conj(w), w)) / d**2


def fr_metric_hsc(n: int, r: float, m: float, w, X) -> tuple[float, float]:
    """Metric ``g(w; X)`` and holomorphic sectional curvature ``-2/(n+m+1)``."""
    X = np.atleast_1d(np.asarray(X, dtype=complex))
    G = fr_metric_matrix(n, r, m, w)
    g = float(np.real(X @ G @ np.conj(X)))
    return g, -2.0 / (n + m + 1)


# --------------------------------------------------------------------------
# Kähler-Einstein data
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class KEData:
    """Kähler-Einstein volume density, metric and potential at a point."""

    domain: str
    z: np.ndarray
    det: float
    metric: np.ndarray
    potential: float

    def metric_action(self, X) -> float:
        X = np.atleast_1d(np.asarray(X, dtype=complex))
        return float(np.real(X @ self.metric @ np.conj(X)))


def _tag(domain) -> str:
    if isinstance(domain, dom.Ball):
        return "disk" if domain.n == 1 and domain.r == 1 else f"ball(n={domain.n}, r={domain.r:g})"
    if isinstance(domain, dom.Polydisc):
        return f"polydisc{tuple(domain.radii)}"
    return type(domain).__name__


def ke_metric(domain, z) -> np.ndarray:
    """KE metric matrix ``g_{jk̄}`` with Einstein constant -1."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if isinstance(domain, dom.Ball):
        n, r2 = domain.n, domain.r**2
        d = r2 - _sq(z)
        if d <= 0:
            raise DomainError("point outside the ball")
        return (n + 1) * (d * np.eye(n) + np.outer(np.conj(z), z)) / d**2
    if isinstance(domain, dom.Polydisc):
        r2 = np.asarray(domain.radii) ** 2
        d = r2 - np.abs(z) ** 2
        if np.any(d <= 0):
            raise DomainError("point outside the polydisc")
        return np.diag(2.0 * r2 / d**2).astype(complex)
    raise UnsupportedReductionError(f"no closed-form Kähler-Einstein metric on {_tag(domain)}")


def ke_log_det(domain, z) -> float:
    """``log det g^{KE}(z)``, the KE potential."""
    if not isinstance(domain, (dom.Ball, dom.Polydisc)):
        raise UnsupportedReductionError(f"no closed-form Kähler-Einstein metric on {_tag(domain)}")
    s = np.abs(np.atleast_1d(np.asarray(z, dtype=complex))) ** 2
    if isinstance(domain, dom.Ball) and s.sum() >= domain.r**2 or isinstance(domain, dom.Polydisc) and np.any(s >= np.asarray(domain.radii) ** 2):
        raise DomainError("point outside the domain")
    return float(dom.KEPotential(domain).profile(s[None, :])[0])


def ke_oracle(domain, z) -> KEData:
    """Closed-form KE data on balls and polydiscs.

    Examples
    --------
    >>> ke_oracle(dom.Ball(2, 1.0), [0, 0]).det
    9.0
    """
    G = ke_metric(domain, z)
    lg = ke_log_det(domain, z)
    return KEData(_tag(domain), np.atleast_1d(np.asarray(z, dtype=complex)), math.exp(lg), G, lg)


# --------------------------------------------------------------------------
# dynamical (Tsuji) kernels on the ball
# --------------------------------------------------------------------------


def log_tsuji_center(n: int, m: int, r: float = 1.0) -> float:
    """``log K^B_m(0)`` from ``∏_{k<m} (k(n+1)+n)! / ((π r^2)^n (k(n+1))!)``."""
    if m < 1:
        raise ValueError("m must be at least 1")
    total = 0.0
    for k in range(m):
        a = k * (n + 1)
        total += gammaln(a + n + 1) - gammaln(a + 1) - n * math.log(math.pi * r * r)
    return total


def tsuji_closed_form(n: int, m: int, z, r: float = 1.0) -> float:
    """Unnormalized ``m``-th dynamical kernel ``K^B_m(z, z)`` on ``B^n(r)``.

    The weights of the recursion ``μ_1 = 1, μ_{k+1} = 1/K_k`` stay powers of
    ``(1 - |z|^2/r^2)``: ``μ_m`` has exponent ``a_m = (m-1)(n+1)``, so
    ``K_m = K_m(0) (1 - |z|^2/r^2)^{-(a_m + n + 1)}``.

    Examples
    --------
    >>> round(tsuji_closed_form(1, 2, 0.0) * math.pi**2, 12)
    3.0
    """
    s = _sq(z)
    if s >= r * r:
        raise DomainError("point outside the ball")
    a = (m - 1) * (n + 1)
    return math.exp(log_tsuji_center(n, m, r) - (a + n + 1) * math.log1p(-s / (r * r)))


def log_inv_d(n: int, m: int) -> float:
    """``log(1/D_m)`` with ``1/D_m = (mn+m-1)! / ((m-1)! (n+1)^{m-1})``."""
    if m < 1:
        raise ValueError("m must be at least 1")
    return gammaln(m * n + m) - gammaln(m) - (m - 1) * math.log(n + 1)

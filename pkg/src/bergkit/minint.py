"""Minimum integrals ``I^0, I^1, I^2`` and the Bergman-Fuks formulas.

For an orthonormal system ``{u^α}`` any element of the truncated span is
``u = Σ c_α u^α`` with ``‖u‖^2 = Σ |c_α|^2``, so each minimum integral is a
minimum-norm problem under linear constraints on the Taylor coefficients of
``u`` at the point ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import DegenerateSystemError
from .kernel import OrthonormalSystem


@dataclass(frozen=True, eq=False)
class MinIntegralResult:
    """Value and minimizer of one minimum-integral problem.

    ``coefficients`` are coordinates in the orthonormal system; ``X`` is
    stored as given (unnormalised).
    """

    order: int
    value: float
    coefficients: np.ndarray
    p: np.ndarray
    X: np.ndarray
    constraints: np.ndarray
    rhs: np.ndarray

    @property
    def constraint_residual(self) -> float:
        return float(np.max(np.abs(self.constraints @ self.coefficients - self.rhs)))


def _rows(system: OrthonormalSystem, p, X, order: int):
    """Constraint rows acting on orthonormal coordinates, from exact monomial Taylor data."""
    n = system.domain.n
    tv = system.taylor_vectors(p, order)
    zero = (0,) * n
    e = np.eye(n, dtype=int)
    rows, rhs = [], []
    if order == 0:
        return np.array([tv[zero]]), np.array([1.0 + 0j])
    rows.append(tv[zero])
    rhs.append(0.0)
    if order == 1:
        rows.append(sum(X[i] * tv[tuple(e[i])] for i in range(n)))
        rhs.append(1.0)
    else:
        for i in range(n):
            rows.append(tv[tuple(e[i])])
            rhs.append(0.0)
        second = np.zeros_like(tv[zero])
        for i in range(n):
            for k in range(n):
                a = tuple(e[i] + e[k])
                fact = 2 if i == k else 1  # a! for a = e_i + e_k
                second = second + X[i] * X[k] * fact * tv[a]
        rows.append(second)
        rhs.append(1.0)
    return np.array(rows), np.array(rhs, dtype=complex)


def minimum_integral(system: OrthonormalSystem, p, X=None, order: int = 0) -> MinIntegralResult:
    """``I^j`` at ``p`` in direction ``X`` over the span of ``system``.

    ``order`` 0: ``u(p) = 1``. ``order`` 1: ``u(p) = 0`` and ``D_X u(p) = 1``.
    ``order`` 2: ``u(p) = 0``, ``du(p) = 0`` and ``D_X D_X u(p) = 1``.

    Examples
    --------
    >>> from bergkit import domains as dom
    >>> from bergkit.kernel import build_orthonormal_system
    >>> s = build_orthonormal_system(dom.Ball(1), dom.Unit(), 6)
    >>> round(minimum_integral(s, [0.0], [1.0], 2).value * 12 / np.pi, 10)
    1.0
    """
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    n = system.domain.n
    p = np.asarray(p, dtype=complex).reshape(n)
    X = np.ones(n, dtype=complex) if X is None else np.asarray(X, dtype=complex).reshape(n)
    if order > 0 and not np.any(X):
        raise ValueError("direction X must be nonzero")
    A, b = _rows(system, p, X, order)
    c, val = numerics.constrained_min_norm(A, b)
    return MinIntegralResult(order, val, c, p, X, A, b)


def minimum_integrals(system: OrthonormalSystem, p, X=None) -> tuple[float, float, float]:
    """``(I^0, I^1, I^2)`` at one point."""
    return tuple(minimum_integral(system, p, X, j).value for j in range(3))  # type: ignore[return-value]


def bergman_fuks(I0: float, I1: float, I2: float) -> tuple[float, float, float]:
    """Kernel, metric and holomorphic sectional curvature from minimum integrals.

    ``K = 1/I^0``, ``g = I^0/I^1`` and ``H = 2 - (I^1)^2/(I^2 I^0)``.

    Examples
    --------
    >>> bergman_fuks(1.0, 1.0, 1.0)
    (1.0, 1.0, 1.0)
    """
    if min(I0, I1, I2) <= 0:
        raise DegenerateSystemError(f"minimum integrals must be positive, got {(I0, I1, I2)}")
    return 1.0 / I0, I0 / I1, 2.0 - I1 * I1 / (I2 * I0)

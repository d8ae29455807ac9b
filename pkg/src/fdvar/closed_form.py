"""Closed-form solution of the one-point, one-dimensional problem.

With a single sample at the origin, an even spectrum, and the zero mode
pinned to zero, the penalized problem reduces to coefficients on the
half-lattice ``j = 1..M`` and admits an explicit solution.  It serves as
an independent oracle for the general solver: feeding ``assembled_system``
to any backend must reproduce ``coefficients`` and ``reconstruction``.

Note the synthesis here uses integer frequencies ``j`` (period 1), with the
mesh entering only through the coefficient magnitudes; ``synthesize`` applies
the matching ``2*delta_xi*cos`` quadrature to a solver output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .solver import AssembledSystem


@dataclass(frozen=True)
class ClosedFormParams:
    M: int
    delta_xi: float
    alpha: float
    lam: float
    z_squared: float = field(init=False)

    def __post_init__(self):
        if not isinstance(self.M, int) or self.M < 1:
            raise ValueError("M must be a positive integer")
        if not (math.isfinite(self.delta_xi) and self.delta_xi > 0):
            raise ValueError("delta_xi must be positive")
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError("alpha must be positive")
        if not (math.isfinite(self.lam) and self.lam >= 0):
            raise ValueError("lambda must be nonnegative")
        object.__setattr__(self, "z_squared", float(np.sum(self.inverse_weights())))

    def mode_weights(self) -> np.ndarray:
        """``(1 + j^2 delta_xi^2)^(alpha/2)`` for ``j = 1..M``."""
        j = np.arange(1, self.M + 1, dtype=float)
        return (1.0 + (j * self.delta_xi) ** 2) ** (self.alpha / 2.0)

    def inverse_weights(self) -> np.ndarray:
        return self.mode_weights() ** -1


def _cosine_sum(series: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``sum_j series[j-1] * cos(2*pi*j*x)``, chunked to bound memory at large M."""
    j = np.arange(1, series.shape[0] + 1, dtype=float)
    out = np.empty(x.shape[0], dtype=series.dtype)
    block = max(1, int(20_000_000 // max(series.shape[0], 1)))
    for lo in range(0, x.shape[0], block):
        chunk = x[lo : lo + block]
        out[lo : lo + block] = np.cos(2.0 * np.pi * np.outer(chunk, j)) @ series
    return out


def coefficients(params: ClosedFormParams) -> np.ndarray:
    """Optimal half-lattice coefficients ``w_j^-1 / ((Z^2 + lam) * delta_xi)``."""
    return params.inverse_weights() / ((params.z_squared + params.lam) * params.delta_xi)


def coefficient(params: ClosedFormParams, j: int) -> float:
    if not 1 <= j <= params.M:
        raise ValueError(f"mode index {j} outside 1..{params.M}")
    return float(coefficients(params)[j - 1])


def reconstruction(params: ClosedFormParams, x) -> np.ndarray:
    """``(2 / (Z^2 + lam)) * sum_j w_j^-1 cos(2*pi*j*x)``, even in ``x``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    series = _cosine_sum(params.inverse_weights(), x)
    return 2.0 / (params.z_squared + params.lam) * series


def assembled_system(params: ClosedFormParams, label: float = 2.0) -> AssembledSystem:
    """The half-lattice problem as a one-row system for the general backends.

    The constraint row is all ones and the right-hand side carries the
    ``label / (2 * delta_xi)`` scaling of the even, zero-DC reduction.
    """
    return AssembledSystem(
        matrix=np.ones((1, params.M), dtype=complex),
        weights=params.mode_weights(),
        lam=params.lam,
        rhs=np.array([label / (2.0 * params.delta_xi)]),
    )


def synthesize(phi, delta_xi: float, x) -> np.ndarray:
    """Even cosine synthesis ``2*delta_xi * sum_j phi_j cos(2*pi*j*x)``."""
    phi = np.asarray(phi)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return 2.0 * delta_xi * np.real(_cosine_sum(phi, x))

"""Penalized least-squares solvers for band-limited spectral regression.

The assembled problem is ``min ||A phi - b||^2 + lam * sum w_J |phi_J|^2``
with ``A[k, J] = exp(2*pi*i*delta_xi*J.x_k)`` and Sobolev weights ``w_J``.
Three algebraically equivalent backends are provided and cross-checked:

* ``direct``  -- Cholesky on the G-by-G normal equations,
* ``dual``    -- an n-by-n kernel system (the only O(n*G) route),
* ``svd``     -- SVD of the weight-whitened matrix with spectral shrinkage.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import (
    Backend,
    Dataset,
    FittedModel,
    SolveConfig,
    SpectralCoefficients,
    point_evaluations,
    sobolev_objective,
)
from .errors import CapacityError, SolverError
from .grid import FrequencyGrid

_COMPLEX_BYTES = 16


@dataclass(frozen=True)
class AssembledSystem:
    """Evaluation matrix, Sobolev weights, penalty weight and right-hand side."""

    matrix: np.ndarray
    weights: np.ndarray
    lam: float
    rhs: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        rhs = np.asarray(self.rhs, dtype=float).reshape(-1)
        if matrix.ndim != 2:
            raise ValueError("matrix must be two-dimensional")
        if weights.shape[0] != matrix.shape[1]:
            raise ValueError("weights length must match matrix columns")
        if rhs.shape[0] != matrix.shape[0]:
            raise ValueError("rhs length must match matrix rows")
        if np.any(weights < 0):
            raise ValueError("weights must be nonnegative")
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "rhs", rhs)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def size(self) -> int:
        return self.matrix.shape[1]

    @property
    def gamma_diag(self) -> np.ndarray:
        """Diagonal of the penalty factor, ``sqrt(lam) * w_J^(1/2)``."""
        return np.sqrt(self.lam * self.weights)


def assemble(grid: FrequencyGrid, data: Dataset, config: SolveConfig) -> AssembledSystem:
    """Build the evaluation matrix and penalty weights for a dataset."""
    if data.d != grid.d:
        raise ValueError(f"dataset dimension {data.d} does not match grid dimension {grid.d}")
    G = grid.size
    need = 3 * _COMPLEX_BYTES * data.n * G
    if config.backend is Backend.DIRECT:
        need += _COMPLEX_BYTES * G * G
    budget = config.memory_budget_mb * 2**20
    if need > budget:
        raise CapacityError(
            f"grid size G={G} needs about {need / 2**20:.0f} MiB "
            f"(budget {config.memory_budget_mb:.0f} MiB); raise memory_budget_mb or shrink M"
        )
    lat = grid.lattice().astype(float)
    matrix = np.exp(2j * np.pi * grid.delta_xi * (data.X @ lat.T))
    return AssembledSystem(
        matrix=matrix,
        weights=grid.sobolev_weights(config.alpha),
        lam=config.lam,
        rhs=data.Y,
    )


def _check_normal_residual(system: AssembledSystem, phi: np.ndarray, tolerance: float) -> None:
    misfit = system.matrix @ phi - system.rhs
    gradient = system.matrix.conj().T @ misfit + system.lam * system.weights * phi
    reference = float(np.linalg.norm(system.matrix.conj().T @ system.rhs))
    if float(np.linalg.norm(gradient)) > tolerance * max(reference, 1e-300):
        raise SolverError(
            f"normal-equation residual {np.linalg.norm(gradient):.3e} exceeds "
            f"{tolerance:.1e} * ||A^H b|| = {tolerance * reference:.3e}"
        )


def solve_direct(system: AssembledSystem, tolerance: float = 1e-10) -> np.ndarray:
    """Factor the G-by-G normal equations ``(A^H A + lam W) phi = A^H b``."""
    if system.lam <= 0:
        raise ValueError("direct backend requires lambda > 0")
    normal = system.matrix.conj().T @ system.matrix
    normal[np.diag_indices_from(normal)] += system.lam * system.weights
    rhs = system.matrix.conj().T @ system.rhs
    try:
        factor = scipy.linalg.cho_factor(normal, check_finite=False)
        phi = scipy.linalg.cho_solve(factor, rhs, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        cond = float(np.linalg.cond(normal))
        raise SolverError(
            f"normal equations not positive definite (condition estimate {cond:.3e})"
        ) from exc
    _check_normal_residual(system, phi, tolerance)
    return phi


def solve_dual(system: AssembledSystem, tolerance: float = 1e-10) -> np.ndarray:
    """Solve through the n-by-n kernel ``A W^-1 A^H + lam I``.

    Algebraically identical to the direct route but touches only O(n*G)
    memory.  With ``lam = 0`` the kernel pseudo-inverse is used, giving the
    minimum-weighted-norm interpolant; the gradient check is skipped there
    because the penalty-form optimality condition no longer applies.
    """
    inv_w = 1.0 / system.weights
    scaled = system.matrix * inv_w[None, :]
    kernel = scaled @ system.matrix.conj().T
    kernel = 0.5 * (kernel + kernel.conj().T)
    kernel[np.diag_indices_from(kernel)] += system.lam
    if system.lam > 0:
        try:
            factor = scipy.linalg.cho_factor(kernel, check_finite=False)
            mu = scipy.linalg.cho_solve(factor, system.rhs.astype(complex), check_finite=False)
        except scipy.linalg.LinAlgError as exc:
            raise SolverError("dual kernel system singular to working precision") from exc
    else:
        mu = scipy.linalg.pinvh(kernel) @ system.rhs
    phi = inv_w * (system.matrix.conj().T @ mu)
    if system.lam > 0:
        _check_normal_residual(system, phi, tolerance)
    return phi


def solve_svd(system: AssembledSystem, tolerance: float = 1e-10) -> np.ndarray:
    """Whiten by the penalty diagonal, shrink singular values, unwhiten."""
    if system.lam <= 0:
        raise ValueError("svd backend requires lambda > 0")
    gamma = system.gamma_diag
    whitened = system.matrix / gamma[None, :]
    try:
        u, s, vh = np.linalg.svd(whitened, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise SolverError("SVD of the whitened system did not converge") from exc
    shrink = s / (s**2 + 1.0)
    phi = (vh.conj().T @ (shrink * (u.conj().T @ system.rhs))) / gamma
    _check_normal_residual(system, phi, tolerance)
    return phi


_BACKENDS = {
    Backend.DIRECT: solve_direct,
    Backend.DUAL: solve_dual,
    Backend.SVD: solve_svd,
}


def fit(grid: FrequencyGrid, data: Dataset, config: SolveConfig) -> FittedModel:
    """Assemble, solve with the configured backend, and package the result.

    When hermitian projection is enabled each mode is averaged with the
    conjugate of its negated partner, which removes the numerical drift off
    the real-reconstruction manifold.  Residuals are recomputed from the
    returned coefficients, not taken from the solver.
    """
    from .io import dataset_hash

    system = assemble(grid, data, config)
    phi = _BACKENDS[config.backend](system, tolerance=config.solve_tolerance)
    coeffs = SpectralCoefficients(values=phi, grid=grid)
    if config.hermitian_projection:
        coeffs = coeffs.hermitian_projected()
    predictions = point_evaluations(coeffs, data.X)
    residuals = np.abs(predictions - data.Y)
    return FittedModel(
        coefficients=coeffs,
        config=config,
        dataset_hash=dataset_hash(data),
        objective=sobolev_objective(coeffs, config.alpha, config.riemann_normalize),
        residuals=residuals,
    )

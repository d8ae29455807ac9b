"""Truncated symmetric frequency lattices.

A grid is the set of frequencies ``delta_xi * J`` for integer multi-indices
``J`` in ``{-M, ..., M}^d``.  Flat indexing is row-major with axis 0 slowest
and each axis ascending from ``-M``, so index 0 is ``(-M, ..., -M)`` and the
last index is ``(M, ..., M)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FrequencyGrid:
    d: int
    M: int
    delta_xi: float

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 1:
            raise ValueError("d must be a positive integer")
        if not isinstance(self.M, int) or self.M < 1:
            raise ValueError("M must be a positive integer")
        if not (math.isfinite(self.delta_xi) and self.delta_xi > 0):
            raise ValueError("delta_xi must be positive and finite")

    @property
    def axis_points(self) -> int:
        return 2 * self.M + 1

    @property
    def size(self) -> int:
        return self.axis_points**self.d

    def flat_index(self, J) -> int:
        """Flat position of the multi-index ``J`` (one entry per axis)."""
        J = tuple(int(j) for j in np.atleast_1d(J))
        if len(J) != self.d:
            raise ValueError(f"expected {self.d} lattice components, got {len(J)}")
        k = 0
        for j in J:
            if j < -self.M or j > self.M:
                raise ValueError(f"lattice component {j} outside [-{self.M}, {self.M}]")
            k = k * self.axis_points + (j + self.M)
        return k

    def lattice_index(self, k: int) -> tuple[int, ...]:
        """Multi-index stored at flat position ``k``."""
        k = int(k)
        if k < 0 or k >= self.size:
            raise ValueError(f"flat index {k} outside [0, {self.size})")
        out = []
        for _ in range(self.d):
            out.append(k % self.axis_points - self.M)
            k //= self.axis_points
        return tuple(reversed(out))

    def lattice(self) -> np.ndarray:
        """All multi-indices as an ``(size, d)`` integer array in flat order."""
        axes = [np.arange(-self.M, self.M + 1)] * self.d
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def frequencies(self) -> np.ndarray:
        return self.lattice() * self.delta_xi

    def squared_norms(self) -> np.ndarray:
        """``||J * delta_xi||^2`` for every lattice point, in flat order."""
        lat = self.lattice()
        return (lat.astype(float) ** 2).sum(axis=1) * self.delta_xi**2

    def sobolev_weights(self, alpha: float) -> np.ndarray:
        """Spectral weights ``(1 + ||J*delta_xi||^2)^(alpha/2)``."""
        if not (math.isfinite(alpha) and alpha > 0):
            raise ValueError("alpha must be positive and finite")
        return (1.0 + self.squared_norms()) ** (alpha / 2.0)

    def negation_permutation(self) -> np.ndarray:
        """Permutation mapping each flat index to the index of ``-J``."""
        lat = self.lattice()
        strides = self.axis_points ** np.arange(self.d - 1, -1, -1)
        return ((self.M - lat) @ strides).astype(np.intp)

#!/usr/bin/env python3
"""
Finite-dimensional exterior-algebra types
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from chodim.core.exceptions import DimensionMismatchError, ConfigurationError

# Gram PSD slack
TOL_PSD = 1e-10
# Degenerate-frame pivot
TOL_RANK = 1e-12


def _frozen_copy(values, dtype=float) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class DenseOperator:
    """Square real matrix acting on column vectors"""

    entries: np.ndarray

    def __post_init__(self):
        entries = _frozen_copy(self.entries)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] < 1:
            raise DimensionMismatchError(f"Operator must be a non-empty square matrix, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise ConfigurationError("Operator entries must be finite")
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def identity(cls, dim: int) -> "DenseOperator":
        return cls(np.eye(dim))

    @classmethod
    def diag(cls, values: Sequence[float]) -> "DenseOperator":
        return cls(np.diag(np.asarray(values, dtype=float)))

    @classmethod
    def zeros(cls, dim: int) -> "DenseOperator":
        return cls(np.zeros((dim, dim)))

    def __matmul__(self, other: "DenseOperator") -> "DenseOperator":
        return DenseOperator(self.entries @ other.entries)

    def __add__(self, other: "DenseOperator") -> "DenseOperator":
        return DenseOperator(self.entries + other.entries)

    def scaled(self, factor: float) -> "DenseOperator":
        return DenseOperator(factor * self.entries)

    @property
    def T(self) -> "DenseOperator":
        return DenseOperator(self.entries.T)

    def norm(self) -> float:
        """Operator norm (top singular value)"""
        return float(np.linalg.norm(self.entries, 2))


@dataclass(frozen=True)
class VectorFrame:
    """Ordered collection of d column vectors in R^ambient_dim"""

    vectors: np.ndarray

    def __post_init__(self):
        vectors = _frozen_copy(self.vectors)
        if vectors.ndim == 1:
            vectors = _frozen_copy(vectors[:, None])
        if vectors.ndim != 2 or vectors.shape[1] < 1:
            raise DimensionMismatchError(f"Frame must be a 2-D array of columns, got shape {vectors.shape}")
        if vectors.shape[1] > vectors.shape[0]:
            raise DimensionMismatchError(
                f"Frame has {vectors.shape[1]} vectors in dimension {vectors.shape[0]}",
                expected=vectors.shape[0], actual=vectors.shape[1],
            )
        if not np.all(np.isfinite(vectors)):
            raise ConfigurationError("Frame vectors must be finite")
        object.__setattr__(self, "vectors", vectors)

    @property
    def ambient_dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def d(self) -> int:
        return self.vectors.shape[1]

    @classmethod
    def from_columns(cls, *columns: Sequence[float]) -> "VectorFrame":
        return cls(np.column_stack([np.asarray(c, dtype=float) for c in columns]))

    @classmethod
    def canonical(cls, dim: int, d: int) -> "VectorFrame":
        return cls(np.eye(dim)[:, :d])

    def column(self, i: int) -> np.ndarray:
        return self.vectors[:, i]


@dataclass(frozen=True)
class GramMatrix:
    """d x d symmetric matrix of pairwise inner products"""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        object.__setattr__(self, "entries", _frozen_copy(0.5 * (entries + entries.T)))

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.entries))


@dataclass(frozen=True)
class InnerProduct:
    """Symmetric positive-definite bilinear form on R^dim

    ``matrix`` is None for the identity form.
    """

    dim: int
    matrix: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionMismatchError(f"Form dimension must be positive, got {self.dim}")
        if self.matrix is None:
            return
        matrix = np.asarray(self.matrix, dtype=float)
        if matrix.shape != (self.dim, self.dim):
            raise DimensionMismatchError(
                f"Form matrix shape {matrix.shape} does not match dimension {self.dim}",
                expected=self.dim, actual=matrix.shape[0],
            )
        scale = max(1.0, float(np.abs(matrix).max()))
        if np.abs(matrix - matrix.T).max() > 1e-10 * scale:
            raise ConfigurationError("Inner product matrix must be symmetric")
        matrix = 0.5 * (matrix + matrix.T)
        lam_min = float(np.linalg.eigvalsh(matrix).min())
        if lam_min <= 0.0:
            raise ConfigurationError(f"Inner product must be positive definite, smallest eigenvalue {lam_min:.3e}")
        object.__setattr__(self, "matrix", _frozen_copy(matrix))

    @classmethod
    def identity(cls, dim: int) -> "InnerProduct":
        return cls(dim)

    @classmethod
    def from_matrix(cls, matrix) -> "InnerProduct":
        matrix = np.asarray(matrix, dtype=float)
        return cls(matrix.shape[0], matrix)

    @property
    def is_identity(self) -> bool:
        return self.matrix is None

    def dense(self) -> np.ndarray:
        return np.eye(self.dim) if self.matrix is None else self.matrix

    def apply(self, vectors: np.ndarray) -> np.ndarray:
        """V @ vectors"""
        return vectors if self.matrix is None else self.matrix @ vectors

    def pairing(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Matrix of pairings x_i^T V y_j for column blocks x, y"""
        return x.T @ self.apply(y)

    def norm(self, x: np.ndarray) -> float:
        return float(np.sqrt(max(float(x @ self.apply(x)), 0.0)))

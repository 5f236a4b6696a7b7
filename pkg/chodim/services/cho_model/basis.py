#!/usr/bin/env python3
"""
Real Fourier coordinates and the padded quadrature grid

Retained wavevectors k have 0 < |k_i| < N/2 componentwise-bounded, k != 0;
each pair {k, -k} is represented by the k whose first nonzero component is
positive and contributes two coordinates (real part, imaginary part).
Coordinates are ordered [all real parts, all imaginary parts].

Pointwise products are evaluated on an M^n grid, M = pad * N, with the
quadrature weight w = vol / M^n. The projection P(a)_j = w sum_p a(x_p) S_pj
is the adjoint of the synthesis S under that quadrature.
"""

import itertools
import math
from functools import lru_cache
from typing import Tuple

import numpy as np

from chodim.services.cho_model.models import GridSpec


def _half_set(n: int, N: int) -> np.ndarray:
    top = N // 2 - 1
    modes = []
    for k in itertools.product(range(-top, top + 1), repeat=n):
        nonzero = [c for c in k if c != 0]
        if nonzero and nonzero[0] > 0:
            modes.append(k)
    return np.array(modes, dtype=int).reshape(-1, n)


class SpectralBasis:
    """Coordinate layer for one grid and one quadrature padding"""

    def __init__(self, grid: GridSpec, M: int):
        if M < grid.N:
            raise ValueError(f"Quadrature grid {M} is coarser than the mode grid {grid.N}")
        self.grid = grid
        self.M = M
        self.n = grid.n
        self.vol = grid.volume
        self.weight = self.vol / M ** self.n
        self.modes = _half_set(grid.n, grid.N)
        self.n_half = self.modes.shape[0]
        self.m = 2 * self.n_half
        kappa_half = self.modes / grid.ell
        self.kappa_vectors = np.concatenate([kappa_half, kappa_half])
        kappa2_half = np.sum(kappa_half ** 2, axis=1)
        self.kappa2 = np.concatenate([kappa2_half, kappa2_half])
        self._index = tuple(np.mod(self.modes[:, i], M) for i in range(self.n))
        self._conj_index = tuple(np.mod(-self.modes[:, i], M) for i in range(self.n))
        self._norm = math.sqrt(2.0 * self.vol)
        self._axes = tuple(range(self.n))
        self._synthesis = None

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.M,) * self.n

    def coefficients(self, x: np.ndarray) -> np.ndarray:
        """Complex u_hat_k over the half set"""
        x = np.asarray(x, dtype=float)
        return (x[: self.n_half] + 1j * x[self.n_half:]) / self._norm

    def from_coefficients(self, c: np.ndarray) -> np.ndarray:
        c = np.asarray(c) * self._norm
        return np.concatenate([c.real, c.imag], axis=0)

    def to_grid(self, x: np.ndarray) -> np.ndarray:
        """Physical values on the quadrature grid; x may carry trailing batch axes"""
        x = np.asarray(x, dtype=float)
        batch = x.shape[1:]
        spectrum = np.zeros(self.shape + batch, dtype=complex)
        c = self.coefficients(x)
        spectrum[self._index] = c
        spectrum[self._conj_index] = np.conj(c)
        values = np.fft.ifftn(spectrum, axes=self._axes) * self.M ** self.n
        return values.real

    def project(self, a: np.ndarray) -> np.ndarray:
        """Coordinates of the L^2 projection of grid values onto the retained modes"""
        a = np.asarray(a, dtype=float)
        spectrum = np.fft.fftn(a, axes=self._axes) / self.M ** self.n
        return self.from_coefficients(spectrum[self._index])

    def synthesis(self) -> np.ndarray:
        """S with columns = grid values of each coordinate direction (M^n x m)"""
        if self._synthesis is None:
            S = self.to_grid(np.eye(self.m)).reshape(-1, self.m)
            S.setflags(write=False)
            self._synthesis = S
        return self._synthesis

    def weighted_gram(self, values: np.ndarray) -> np.ndarray:
        """S^T diag(w * values) S, the matrix of w -> P(values * w)"""
        S = self.synthesis()
        return S.T @ ((self.weight * np.ravel(values))[:, None] * S)

    def full_kappa2(self) -> np.ndarray:
        """|kappa|^2 of every DFT mode of the quadrature grid, mean and Nyquist included"""
        k = np.fft.fftfreq(self.M, d=1.0 / self.M) / self.grid.ell
        return sum(axis ** 2 for axis in np.meshgrid(*([k] * self.n), indexing="ij"))

    def masked_multiplier_gram(self, mask: np.ndarray, exponent: float) -> np.ndarray:
        """Matrix of x -> |(1 - Delta)^(exponent/2) (mask * u)|^2_{L^2}

        The mask is applied in physical space, the multiplier to the full
        spectrum of the product on the quadrature grid.
        """
        masked = (np.ravel(mask)[:, None] * self.synthesis()).reshape(self.shape + (self.m,))
        spectrum = (np.fft.fftn(masked, axes=self._axes) / self.M ** self.n).reshape(-1, self.m)
        symbol = self.vol * (1.0 + self.full_kappa2().ravel()) ** exponent
        return np.real(spectrum.conj().T @ (symbol[:, None] * spectrum))

    def integrate(self, values: np.ndarray) -> float:
        return float(self.weight * np.sum(values))

    def gradient_grid(self, x: np.ndarray) -> np.ndarray:
        """Grid values of each partial derivative, stacked on the first axis"""
        x = np.asarray(x, dtype=float)
        parts = []
        for i in range(self.n):
            kappa = self.kappa_vectors[: self.n_half, i]
            dx = np.concatenate([-kappa * x[self.n_half:], kappa * x[: self.n_half]])
            parts.append(self.to_grid(dx))
        return np.stack(parts)

    def grid_points(self) -> np.ndarray:
        """Coordinates of the quadrature nodes, shape (n,) + grid shape"""
        axis = 2.0 * math.pi * self.grid.ell * np.arange(self.M) / self.M
        return np.stack(np.meshgrid(*([axis] * self.n), indexing="ij"))

    def locate(self, k) -> Tuple[int, float]:
        """(half-set index, sign) of wavevector k; sign is -1 when -k is the representative"""
        k = tuple(int(c) for c in k)
        matches = np.flatnonzero(np.all(self.modes == np.array(k), axis=1))
        if matches.size:
            return int(matches[0]), 1.0
        matches = np.flatnonzero(np.all(self.modes == -np.array(k), axis=1))
        if matches.size:
            return int(matches[0]), -1.0
        raise ValueError(f"Wavevector {k} is not retained on an N={self.grid.N} grid")


@lru_cache(maxsize=32)
def get_basis(grid: GridSpec, pad: int = 1) -> SpectralBasis:
    """Shared basis for a grid and padding factor"""
    return SpectralBasis(grid, pad * grid.N)

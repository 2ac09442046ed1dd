"""Gaussian-broadened total density of states."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .._parallel import ordered_map
from ..errors import ValidationError
from .eigen import EigenvalueSet

DEFAULT_SIGMA = 0.05
# grid points evaluated per work item; fixed so results do not depend on thread count
CHUNK = 256


@dataclass(frozen=True, eq=False)
class DosCurve:
    grid: np.ndarray
    values: np.ndarray
    sigma: float

    def integral(self) -> float:
        return float(np.trapezoid(self.values, self.grid))


def gaussian(x, sigma: float):
    """Unit-area Gaussian with standard deviation ``sigma``."""
    return np.exp(-0.5 * (x / sigma) ** 2) / (sigma * math.sqrt(2.0 * math.pi))


def compute_dos(eig: EigenvalueSet, e_min: float, e_max: float, n_grid: int, sigma: float = DEFAULT_SIGMA,
                threads: int | None = None) -> DosCurve:
    """DOS(E) = g_s * sum_k w_k sum_n G_sigma(E - e_nk) on a uniform grid.

    Each grid point is reduced over the same flattened state array, so the
    output is bit-identical for any thread count.
    """
    if not sigma > 0:
        raise ValidationError(f"smearing width must be positive, got {sigma}")
    if n_grid < 2:
        raise ValidationError("DOS grid needs at least two points")
    if not e_min < e_max:
        raise ValidationError(f"empty energy window ({e_min}, {e_max})")
    grid = np.linspace(e_min, e_max, int(n_grid))
    energies = eig.bands.reshape(-1)
    weights = np.repeat(eig.weights, eig.nbands) * eig.spin_degeneracy

    def block(start):
        e = grid[start:start + CHUNK, None]
        return (gaussian(e - energies[None, :], sigma) * weights[None, :]).sum(axis=1)

    parts = ordered_map(block, range(0, len(grid), CHUNK), threads)
    values = np.concatenate(parts)
    return DosCurve(grid, values, float(sigma))


def default_window(eig: EigenvalueSet, sigma: float, margin: float = 6.0) -> tuple:
    """Energy window covering every eigenvalue with ``margin`` widths to spare."""
    return float(eig.bands.min()) - margin * sigma, float(eig.bands.max()) + margin * sigma

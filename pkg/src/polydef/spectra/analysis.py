"""Band edges, gaps, flat (defect-like) bands and photon-energy conversion."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import OccupationError, ValidationError
from .eigen import EigenvalueSet

# h*c in eV*um
HC_EV_UM = 1.23984193
RY_TO_EV = 13.605693

DEFAULT_FLAT_DELTA = 0.2


@dataclass(frozen=True)
class FlatBand:
    band: int
    mean: float
    bandwidth: float


@dataclass(frozen=True)
class BandAnalysis:
    n_occ: int
    vbm: float
    cbm: float
    gap: float
    vbm_location: int
    cbm_location: int
    flat_bands: tuple = field(default=())

    @property
    def has_gap(self) -> bool:
        return self.gap > 0

    def as_dict(self) -> dict:
        return {
            "n_occ": self.n_occ,
            "vbm": self.vbm,
            "cbm": self.cbm,
            "gap": self.gap,
            "has_gap": self.has_gap,
            "vbm_location": self.vbm_location,
            "cbm_location": self.cbm_location,
            "flat_bands": [
                {"band": f.band, "mean": f.mean, "bandwidth": f.bandwidth} for f in self.flat_bands
            ],
        }


def occupied_bands(eig: EigenvalueSet) -> int:
    if eig.electrons % eig.spin_degeneracy:
        raise OccupationError(
            f"{eig.electrons} electrons with spin degeneracy {eig.spin_degeneracy} "
            "would need fractional occupation, which is not supported",
        )
    n_occ = eig.electrons // eig.spin_degeneracy
    if n_occ < 1:
        raise OccupationError("no occupied bands")
    if n_occ >= eig.nbands:
        raise OccupationError(f"all {eig.nbands} bands are occupied; no conduction band minimum")
    return n_occ


def find_band_edges(eig: EigenvalueSet) -> BandAnalysis:
    """Highest occupied / lowest unoccupied band extrema over all k.

    A gap that is zero or negative is reported as is (``has_gap`` is False).
    """
    n_occ = occupied_bands(eig)
    top = eig.bands[:, n_occ - 1]
    bottom = eig.bands[:, n_occ]
    iv = int(np.argmax(top))
    ic = int(np.argmin(bottom))
    vbm = float(top[iv])
    cbm = float(bottom[ic])
    return BandAnalysis(n_occ, vbm, cbm, cbm - vbm, iv, ic)


def defect_gap(eig: EigenvalueSet) -> float:
    """Gap between the highest occupied and lowest unoccupied state, defect levels included."""
    return find_band_edges(eig).gap


def normalize_to_vbm(eig: EigenvalueSet) -> EigenvalueSet:
    vbm = find_band_edges(eig).vbm
    return eig.shifted(-vbm, reference="VBM")


def detect_flat_bands(eig: EigenvalueSet, window, delta: float = DEFAULT_FLAT_DELTA) -> list:
    """Bands narrower than ``delta`` whose mean lies inside ``window`` (inclusive)."""
    lo, hi = (float(x) for x in window)
    if not hi > lo:
        raise ValidationError(f"energy window ({lo}, {hi}) is empty")
    if not delta > 0:
        raise ValidationError("flat-band threshold delta must be positive")
    width = eig.bands.max(axis=0) - eig.bands.min(axis=0)
    mean = eig.bands.mean(axis=0)
    return [
        FlatBand(n, float(mean[n]), float(width[n]))
        for n in range(eig.nbands)
        if width[n] < delta and lo <= mean[n] <= hi
    ]


def analyze(eig: EigenvalueSet, window=None, delta: float = DEFAULT_FLAT_DELTA) -> BandAnalysis:
    """Band edges plus flat bands; the window defaults to the full spectrum."""
    edges = find_band_edges(eig)
    if window is None:
        window = (float(eig.bands.min()), float(eig.bands.max()))
    return replace(edges, flat_bands=tuple(detect_flat_bands(eig, window, delta)))


def split_by_edge(flat_bands, vbm: float, cbm: float) -> dict:
    """Group flat bands by the closer of two reference edges (usually the pristine VBM and CBM)."""
    mid = 0.5 * (vbm + cbm)
    near = {"vbm": [], "cbm": []}
    for f in flat_bands:
        near["vbm" if f.mean < mid else "cbm"].append(f)
    return near


def ev_to_wavelength(energy: float) -> float:
    """Photon energy (eV) to vacuum wavelength (um)."""
    if not energy > 0:
        raise ValidationError(f"photon energy must be positive, got {energy}")
    return HC_EV_UM / energy


def wavelength_to_ev(wavelength: float) -> float:
    if not wavelength > 0:
        raise ValidationError(f"wavelength must be positive, got {wavelength}")
    return HC_EV_UM / wavelength

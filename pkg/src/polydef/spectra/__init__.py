"""Eigenvalue ingestion and spectral analysis."""

from .analysis import (
    BandAnalysis,
    FlatBand,
    analyze,
    defect_gap,
    detect_flat_bands,
    ev_to_wavelength,
    find_band_edges,
    normalize_to_vbm,
    split_by_edge,
    wavelength_to_ev,
)
from .convergence import ConvergenceReport, audit_convergence
from .dos import DosCurve, compute_dos
from .eigen import EigenvalueSet, parse_eigenvalues, write_eigenvalues

__all__ = [
    "BandAnalysis",
    "ConvergenceReport",
    "DosCurve",
    "EigenvalueSet",
    "FlatBand",
    "analyze",
    "audit_convergence",
    "compute_dos",
    "defect_gap",
    "detect_flat_bands",
    "ev_to_wavelength",
    "find_band_edges",
    "normalize_to_vbm",
    "parse_eigenvalues",
    "split_by_edge",
    "wavelength_to_ev",
    "write_eigenvalues",
]

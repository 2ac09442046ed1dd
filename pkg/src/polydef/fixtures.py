"""Bundled synthetic eigenvalue fixtures calibrated to reported band gaps.

The host manifold is shared: valence top at 0 eV, conduction bottom at
2.23 eV. Each defect configuration adds flat levels inside that gap. The
level energies are picked so that ``cbm - vbm`` evaluates in floating point
to exactly the calibration value (2.23, 2.19, 2.22, 1.30, 1.06 eV).
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .bz import DEFAULT_PATH, build_kpath
from .crystal import DEFAULT_A, DEFAULT_C, LatticeCell
from .modelbands import SyntheticBandSpec, synthesize, write_synthetic_spec
from .spectra.eigen import parse_eigenvalues, write_eigenvalues

HOST_VBM = 0.0
HOST_CBM = 2.23

_VALENCE = [
    {"base": -0.75, "amplitude": 0.75, "mode": 0},
    {"base": -1.6, "amplitude": 0.9, "mode": 1},
    {"base": -3.2, "amplitude": 1.1, "mode": 3},
    {"base": -5.0, "amplitude": 1.3, "mode": 2},
]
_CONDUCTION = [
    {"base": 2.98, "amplitude": 0.75, "mode": 0},
    {"base": 3.9, "amplitude": 0.8, "mode": 1},
    {"base": 5.2, "amplitude": 1.0, "mode": 4},
    {"base": 6.5, "amplitude": 1.2, "mode": 3},
]

# name -> (occupied levels, empty levels, reported gap in eV)
_LEVELS = {
    "pristine": ([], [], 2.23),
    "er_h": ([(0.005, 0.005)], [(2.2125, 0.0125)], 2.19),
    "er_k": ([(0.005, 0.005)], [], 2.22),
    "er_hv": ([(0.30, 0.02), (0.45, 0.02)], [(1.79, 0.02), (1.95, 0.02)], 1.30),
    "er_kv": ([(0.40, 0.015), (0.55, 0.015)], [(1.65, 0.025), (1.85, 0.025)], 1.06),
}

FIXTURE_NAMES = tuple(_LEVELS)
REPORTED_GAPS = {name: v[2] for name, v in _LEVELS.items()}
# flat in-gap levels expected near each pristine edge
EXPECTED_LEVELS = {name: (len(v[0]), len(v[1])) for name, v in _LEVELS.items()}


def fixture_spec(name: str) -> SyntheticBandSpec:
    occ, empty, _ = _LEVELS[name]
    levels = [{"energy": e, "ripple": r} for e, r in occ + empty]
    electrons = 2 * (len(_VALENCE) + len(occ))
    return SyntheticBandSpec(tuple(_VALENCE + _CONDUCTION), tuple(levels), electrons, 2, name)


def fixture_kpath():
    return build_kpath(LatticeCell(DEFAULT_A, DEFAULT_C), DEFAULT_PATH, 113)


def generate_fixture(name: str):
    return synthesize(fixture_spec(name), fixture_kpath())


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("polydef") / "data" / "fixtures" / f"{name}.eig"))


def load_fixture(name: str):
    return parse_eigenvalues(fixture_path(name))


def write_fixtures(directory) -> list:
    """Regenerate every fixture (.eig plus its .spec.json) into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name in FIXTURE_NAMES:
        eig = directory / f"{name}.eig"
        write_eigenvalues(generate_fixture(name), eig)
        spec = directory / f"{name}.spec.json"
        write_synthetic_spec(fixture_spec(name), spec)
        written += [eig, spec]
    return written

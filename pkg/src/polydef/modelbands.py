"""Model band engines: analytic synthetic bands and an sp3 Slater-Koster solver.

Neither engine replaces a DFT code. Synthetic bands have edges known in
closed form and serve as test oracles; the tight-binding solver produces
realistic multi-band data from a structure.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._parallel import ordered_map
from .bz import KPath
from .errors import InputFileError, ParseError, ValidationError
from .spectra.eigen import EigenvalueSet

# cosine mode -> direction d in reciprocal fractional units; k.d = 0 at Gamma
# and k.d = 1/2 at M (at A for the pure c-axis mode), so both extrema lie on
# any hexagonal path through Gamma, M and A
MODE_DIRECTIONS = (
    (1.0, 0.0, 0.0),
    (0.0, 0.0, 1.0),
    (1.0, 0.0, 1.0),
    (1.0, 1.0, 0.0),
    (1.0, 1.0, 1.0),
)

ORBITALS = ("s", "px", "py", "pz")


@dataclass(frozen=True)
class SyntheticBand:
    base: float
    amplitude: float = 0.0
    mode: int = 0

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValidationError("band amplitude must be non-negative")
        if not 0 <= self.mode < len(MODE_DIRECTIONS):
            raise ValidationError(f"mode must be in 0..{len(MODE_DIRECTIONS) - 1}")


@dataclass(frozen=True)
class DefectLevel:
    energy: float
    ripple: float = 0.0

    def __post_init__(self):
        if self.ripple < 0:
            raise ValidationError("defect level ripple must be non-negative")


@dataclass(frozen=True)
class SyntheticBandSpec:
    bands: tuple
    defect_levels: tuple = ()
    electrons: int = 0
    spin_degeneracy: int = 2
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "bands", tuple(b if isinstance(b, SyntheticBand) else SyntheticBand(**b) for b in self.bands))
        object.__setattr__(
            self, "defect_levels",
            tuple(d if isinstance(d, DefectLevel) else DefectLevel(**d) for d in self.defect_levels),
        )
        if self.spin_degeneracy not in (1, 2):
            raise ValidationError("spin degeneracy must be 1 or 2")
        capacity = self.spin_degeneracy * (len(self.bands) + len(self.defect_levels))
        if self.electrons > capacity:
            raise ValidationError(f"{self.electrons} electrons exceed the {capacity} available states")
        if self.electrons < 0:
            raise ValidationError("electron count must be non-negative")

    def ranges(self) -> list:
        """(min, max) energy of every state over a path containing Gamma, M and A."""
        out = [(b.base - b.amplitude, b.base + b.amplitude) for b in self.bands]
        out += [(d.energy - d.ripple, d.energy + d.ripple) for d in self.defect_levels]
        return out

    def closed_form_edges(self) -> tuple:
        """(vbm, cbm) without sampling any k-point.

        Valid when the occupied states' ranges all lie at or below the
        unoccupied ones, so sorting never swaps an occupied and an empty
        state. Raises ``ValidationError`` otherwise.
        """
        if self.electrons % self.spin_degeneracy:
            raise ValidationError("odd electron count")
        n_occ = self.electrons // self.spin_degeneracy
        r = sorted(self.ranges())
        occ, empty = r[:n_occ], r[n_occ:]
        if not occ or not empty:
            raise ValidationError("need at least one occupied and one empty state")
        vbm = max(hi for lo, hi in occ)
        cbm = min(lo for lo, hi in empty)
        if vbm > cbm:
            raise ValidationError("occupied and empty manifolds overlap; edges have no closed form")
        return vbm, cbm

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "bands": [{"base": b.base, "amplitude": b.amplitude, "mode": b.mode} for b in self.bands],
            "defect_levels": [{"energy": d.energy, "ripple": d.ripple} for d in self.defect_levels],
            "electrons": self.electrons,
            "spin_degeneracy": self.spin_degeneracy,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SyntheticBandSpec":
        try:
            return cls(
                tuple(doc["bands"]), tuple(doc.get("defect_levels", ())), int(doc["electrons"]),
                int(doc.get("spin_degeneracy", 2)), str(doc.get("name", "")),
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed synthetic band spec ({exc})") from None


def read_synthetic_spec(path) -> SyntheticBandSpec:
    return SyntheticBandSpec.from_dict(_load_json(path))


def write_synthetic_spec(spec: SyntheticBandSpec, path) -> None:
    Path(path).write_text(json.dumps(spec.to_dict(), indent=2) + "\n", encoding="utf-8")


def _kpath_arrays(kpath):
    if isinstance(kpath, KPath):
        return kpath.frac, kpath.s, tuple(kpath.labels)
    frac = np.asarray(kpath, dtype=float).reshape(-1, 3)
    return frac, None, None


def synthesize(spec: SyntheticBandSpec, kpath) -> EigenvalueSet:
    """Evaluate the synthetic bands on the k-points of ``kpath`` (uniform weights)."""
    frac, s, labels = _kpath_arrays(kpath)
    cols = []
    for b in spec.bands:
        d = np.array(MODE_DIRECTIONS[b.mode])
        cols.append(b.base + b.amplitude * np.cos(2.0 * math.pi * (frac @ d)))
    for lv in spec.defect_levels:
        cols.append(lv.energy + lv.ripple * np.cos(2.0 * math.pi * frac[:, 0]))
    bands = np.sort(np.column_stack(cols), axis=1)
    nk = len(frac)
    return EigenvalueSet(frac, np.full(nk, 1.0 / nk), bands, spec.electrons, spec.spin_degeneracy, None, s, labels)


# tight binding ---------------------------------------------------------------


@dataclass(frozen=True)
class TBModel:
    """Orthogonal nearest-neighbour sp3 model.

    ``onsite[species]`` maps orbital name (s, px, py, pz) to energy in eV.
    ``hoppings["A-B"]`` holds ss_sigma, sp_sigma, pp_sigma, pp_pi and
    optionally ps_sigma; sp_sigma couples s on A to p on B and ps_sigma
    (default sp_sigma) couples p on A to s on B.
    """

    onsite: dict
    hoppings: dict
    cutoff: float
    valence: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.cutoff > 0:
            raise ValidationError("neighbour cutoff must be positive")
        onsite = {}
        for sp, orb in self.onsite.items():
            if isinstance(orb, (int, float)):
                orb = {"s": orb, "p": orb}
            e = {}
            for name in ORBITALS:
                if name in orb:
                    e[name] = float(orb[name])
                elif "p" in orb and name != "s":
                    e[name] = float(orb["p"])
                else:
                    raise ValidationError(f"onsite energies for {sp} lack orbital {name}")
            onsite[sp] = e
        object.__setattr__(self, "onsite", onsite)

    def pair(self, a: str, b: str) -> tuple:
        """(V_ss, V_sp[s on a], V_sp[s on b], V_pp_sigma, V_pp_pi) for a bond from a to b."""
        key = f"{a}-{b}"
        rev = f"{b}-{a}"
        if key in self.hoppings:
            h = self.hoppings[key]
            sp_ab = h.get("sp_sigma", 0.0)
            sp_ba = h.get("ps_sigma", sp_ab)
        elif rev in self.hoppings:
            h = self.hoppings[rev]
            sp_ba = h.get("sp_sigma", 0.0)
            sp_ab = h.get("ps_sigma", sp_ba)
        else:
            return (0.0, 0.0, 0.0, 0.0, 0.0)
        return (h.get("ss_sigma", 0.0), sp_ab, sp_ba, h.get("pp_sigma", 0.0), h.get("pp_pi", 0.0))

    def electrons_for(self, species) -> int:
        missing = sorted({sp for sp in species if sp not in self.valence})
        if missing:
            raise ValidationError(f"no valence electron count for species {', '.join(missing)}")
        return int(sum(self.valence[sp] for sp in species))

    @classmethod
    def from_dict(cls, doc: dict) -> "TBModel":
        try:
            return cls(doc["onsite"], doc["hoppings"], float(doc["cutoff"]), doc.get("valence", {}))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed tight-binding parameter file ({exc})") from None

    def to_dict(self) -> dict:
        return {"onsite": self.onsite, "hoppings": self.hoppings, "cutoff": self.cutoff, "valence": self.valence}


def read_tb_model(path) -> TBModel:
    return TBModel.from_dict(_load_json(path))


def default_tb_model() -> TBModel:
    return read_tb_model(Path(__file__).parent / "data" / "tb_sic.json")


def sk_block(unit, params) -> np.ndarray:
    """4x4 two-centre block <i,alpha|H|j,beta> for bond direction ``unit`` (i to j)."""
    vss, sp_ij, sp_ji, pps, ppp = params
    l = np.asarray(unit, dtype=float)
    h = np.empty((4, 4))
    h[0, 0] = vss
    h[0, 1:] = l * sp_ij
    h[1:, 0] = -l * sp_ji
    h[1:, 1:] = np.outer(l, l) * (pps - ppp) + np.eye(3) * ppp
    return h


def neighbor_bonds(structure, cutoff: float) -> list:
    """(i, j, R, vector) for every pair closer than ``cutoff``, periodic images included.

    ``R`` is the integer lattice translation applied to j and ``vector`` the
    Cartesian bond from i to the image of j.
    """
    frac = structure.frac_array()
    lattice = structure.cell.matrix
    recip = np.linalg.inv(lattice).T
    # layer spacing along each lattice direction bounds the image range
    heights = 1.0 / np.linalg.norm(recip, axis=1)
    nmax = [int(math.ceil(cutoff / h)) + 1 for h in heights]
    shifts = np.array(
        [(a, b, c) for a in range(-nmax[0], nmax[0] + 1)
         for b in range(-nmax[1], nmax[1] + 1) for c in range(-nmax[2], nmax[2] + 1)],
        dtype=float,
    )
    bonds = []
    cart = frac @ lattice
    shift_cart = shifts @ lattice
    for i in range(len(frac)):
        d = cart[None, :, :] + shift_cart[:, None, :] - cart[i]
        dist = np.linalg.norm(d, axis=2)
        mask = (dist > 1e-8) & (dist <= cutoff)
        for s_idx, j in zip(*np.nonzero(mask)):
            bonds.append((i, int(j), shifts[s_idx], d[s_idx, j]))
    return bonds


def tb_hamiltonian(structure, model: TBModel, k_frac, bonds=None) -> np.ndarray:
    """Bloch Hamiltonian at fractional ``k_frac`` in the atom-centred gauge."""
    if bonds is None:
        bonds = neighbor_bonds(structure, model.cutoff)
    species = structure.species
    n = len(species)
    H = np.zeros((4 * n, 4 * n), dtype=complex)
    for i, sp in enumerate(species):
        H[4 * i:4 * i + 4, 4 * i:4 * i + 4] += np.diag([model.onsite[sp][o] for o in ORBITALS])
    k_cart = 2.0 * math.pi * np.asarray(k_frac, dtype=float) @ np.linalg.inv(structure.cell.matrix).T
    for i, j, _, vec in bonds:
        dist = np.linalg.norm(vec)
        block = sk_block(vec / dist, model.pair(species[i], species[j]))
        H[4 * i:4 * i + 4, 4 * j:4 * j + 4] += block * np.exp(1j * (k_cart @ vec))
    return H


def _check_species(structure, model: TBModel):
    missing = sorted({sp for sp in structure.species if sp not in model.onsite})
    if missing:
        raise ValidationError(f"no tight-binding parameters for species {', '.join(missing)}")


def tb_solve(structure, model: TBModel, kpath, electrons: int | None = None,
             threads: int | None = None) -> EigenvalueSet:
    """Eigenvalues of the tight-binding Hamiltonian along ``kpath``.

    The electron count defaults to the model's valence table summed over
    the structure. Per-k diagonalisations may run on a thread pool; the
    result is assembled in path order.
    """
    _check_species(structure, model)
    frac, s, labels = _kpath_arrays(kpath)
    bonds = neighbor_bonds(structure, model.cutoff)

    def solve(k):
        H = tb_hamiltonian(structure, model, k, bonds)
        herm = np.abs(H - H.conj().T).max()
        if herm >= 1e-12:
            raise RuntimeError(f"tight-binding Hamiltonian is not Hermitian (max |H - H^+| = {herm:.3e})")
        return np.linalg.eigvalsh(H)

    bands = np.array(ordered_map(solve, list(frac), threads))
    if electrons is None:
        electrons = model.electrons_for(structure.species)
    nk = len(frac)
    return EigenvalueSet(frac, np.full(nk, 1.0 / nk), bands, electrons, 2, None, s, labels)


def _load_json(path):
    path = Path(path)
    if not path.is_file():
        raise InputFileError(f"file not found: {path}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from None

"""Hexagonal polytype structures built from close-packed stacking sequences.

A polytype is described by its stacking letters (``"ABCB"`` for 4H-SiC).
Each letter is one Si-C bilayer; the lateral position of the bilayer is
fixed by the letter and the carbon sits directly above its silicon at the
ideal tetrahedral offset of 3/4 of the layer spacing.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InputFileError, ParseError, ValidationError

DEFAULT_A = 3.09
DEFAULT_C = 10.08

SITE_CLASSES = ("h", "k", "unclassified")

LATERAL = {
    "A": (0.0, 0.0),
    "B": (1.0 / 3.0, 2.0 / 3.0),
    "C": (2.0 / 3.0, 1.0 / 3.0),
}

ELEMENTS = frozenset(
    """H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca Sc Ti V Cr Mn Fe Co
    Ni Cu Zn Ga Ge As Se Br Kr Rb Sr Y Zr Nb Mo Tc Ru Rh Pd Ag Cd In Sn Sb Te
    I Xe Cs Ba La Ce Pr Nd Pm Sm Eu Gd Tb Dy Ho Er Tm Yb Lu Hf Ta W Re Os Ir
    Pt Au Hg Tl Pb Bi Po At Rn Fr Ra Ac Th Pa U Np Pu Am Cm Bk Cf Es Fm Md No
    Lr Rf Db Sg Bh Hs Mt Ds Rg Cn Nh Fl Mc Lv Ts Og""".split()
)

SIG_DIGITS = 12


class DegenerateQueryWarning(UserWarning):
    pass


@dataclass(frozen=True)
class LatticeCell:
    """Hexagonal cell with a1=(a,0,0), a2=(-a/2, a*sqrt(3)/2, 0), a3=(0,0,c)."""

    a: float
    c: float
    vectors: tuple = None

    def __post_init__(self):
        if not (self.a > 0 and self.c > 0):
            raise ValidationError(f"lattice constants must be positive, got a={self.a}, c={self.c}")
        if self.vectors is None:
            a, c = float(self.a), float(self.c)
            vecs = ((a, 0.0, 0.0), (-a / 2.0, a * math.sqrt(3.0) / 2.0, 0.0), (0.0, 0.0, c))
            object.__setattr__(self, "vectors", vecs)
        else:
            vecs = tuple(tuple(float(x) for x in row) for row in self.vectors)
            if len(vecs) != 3 or any(len(row) != 3 for row in vecs):
                raise ValidationError("cell vectors must be a 3x3 array")
            object.__setattr__(self, "vectors", vecs)

    @property
    def matrix(self) -> np.ndarray:
        """Rows are the lattice vectors in Angstrom."""
        return np.array(self.vectors, dtype=float)

    @property
    def volume(self) -> float:
        return float(abs(np.linalg.det(self.matrix)))

    def scaled(self, n1: int, n2: int, n3: int) -> "LatticeCell":
        m = self.matrix * np.array([[n1], [n2], [n3]], dtype=float)
        # vectors are authoritative for supercells; a and c follow the n1 and n3 multipliers
        return LatticeCell(a=self.a * n1, c=self.c * n3, vectors=tuple(map(tuple, m)))


@dataclass(frozen=True)
class StackingSequence:
    letters: tuple

    def __post_init__(self):
        letters = tuple(str(x).upper() for x in self.letters)
        object.__setattr__(self, "letters", letters)
        if len(letters) < 2:
            raise ValidationError("stacking sequence needs at least 2 layers")
        for i, letter in enumerate(letters):
            if letter not in LATERAL:
                raise ValidationError(f"stacking letter {letter!r} at index {i} is not one of A, B, C")
        n = len(letters)
        for i in range(n):
            if letters[i] == letters[(i + 1) % n]:
                raise ValidationError(
                    f"stacking {''.join(letters)!r} repeats letter {letters[i]!r} "
                    f"at index {(i + 1) % n} (cyclically adjacent to index {i})",
                )

    @classmethod
    def parse(cls, text: str | Sequence[str]) -> "StackingSequence":
        if isinstance(text, StackingSequence):
            return text
        if isinstance(text, str):
            text = text.strip()
        return cls(tuple(text))

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return "".join(self.letters)

    def layer_class(self, i: int) -> str:
        n = len(self.letters)
        return "h" if self.letters[(i - 1) % n] == self.letters[(i + 1) % n] else "k"


@dataclass(frozen=True)
class AtomSite:
    species: str
    frac: tuple
    layer: int = 0
    site_class: str = "unclassified"

    def __post_init__(self):
        frac = tuple(float(x) for x in self.frac)
        if len(frac) != 3:
            raise ValidationError(f"fractional coordinate needs 3 components, got {len(frac)}")
        for x in frac:
            if not (0.0 <= x < 1.0):
                raise ValidationError(f"fractional coordinate {frac} outside [0, 1)")
        object.__setattr__(self, "frac", frac)
        if self.species not in ELEMENTS:
            raise ValidationError(f"unknown chemical symbol {self.species!r}")
        if self.site_class not in SITE_CLASSES:
            raise ValidationError(f"site class must be one of {SITE_CLASSES}, got {self.site_class!r}")


@dataclass(frozen=True)
class CrystalStructure:
    cell: LatticeCell
    sites: tuple
    stacking: StackingSequence | None = None

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(self.sites))

    def __len__(self):
        return len(self.sites)

    @property
    def species(self) -> list:
        return [s.species for s in self.sites]

    def count(self, species: str) -> int:
        return sum(1 for s in self.sites if s.species == species)

    def frac_array(self) -> np.ndarray:
        return np.array([s.frac for s in self.sites], dtype=float).reshape(-1, 3)

    def cart_array(self) -> np.ndarray:
        return self.frac_array() @ self.cell.matrix

    def validate(self, min_distance: float = 1.0) -> None:
        """Check stoichiometry (pristine polytypes only) and atom separation."""
        if self.stacking is not None and {"Si", "C"} >= set(self.species):
            n = len(self.stacking)
            if not (self.count("Si") == self.count("C") and self.count("Si") % n == 0):
                raise ValidationError(
                    f"pristine polytype needs equal Si and C counts in multiples of {n}, "
                    f"got Si={self.count('Si')} C={self.count('C')}",
                )
        if len(self):
            d = minimum_distance(self)
            if d <= min_distance:
                raise ValidationError(f"minimum interatomic distance {d:.6f} A is not above {min_distance} A")


def _lateral_images():
    return np.array([(i, j, k) for i in (-1, 0, 1) for j in (-1, 0, 1) for k in (-1, 0, 1)], dtype=float)


def _min_image(dfrac: np.ndarray, lattice: np.ndarray) -> np.ndarray:
    """Shortest Cartesian lengths of fractional separations ``dfrac`` (..., 3)."""
    dfrac = dfrac - np.round(dfrac)
    shifted = dfrac[..., None, :] + _lateral_images()
    cart = shifted @ lattice
    return np.sqrt((cart**2).sum(axis=-1)).min(axis=-1)


def build_polytype(stacking, a: float = DEFAULT_A, c: float = DEFAULT_C) -> CrystalStructure:
    """Ideal Si-C polytype with one bilayer per stacking letter.

    Sites come out layer by layer, Si before C. They are classified already
    (h or k); ``classify_sites`` recomputes the same labels.
    """
    stacking = StackingSequence.parse(stacking)
    cell = LatticeCell(a, c)
    n = len(stacking)
    sites = []
    for i, letter in enumerate(stacking.letters):
        fx, fy = LATERAL[letter]
        z_si = i / n
        z_c = i / n + 3.0 / (4.0 * n)
        cls = stacking.layer_class(i)
        sites.append(AtomSite("Si", (fx, fy, z_si), i, cls))
        sites.append(AtomSite("C", (fx, fy, z_c), i, cls))
    return CrystalStructure(cell, tuple(sites), stacking)


def classify_sites(structure: CrystalStructure) -> CrystalStructure:
    """Label every site h if its layer's two cyclic neighbours share a letter, else k."""
    if structure.stacking is None:
        raise ValidationError("structure has no stacking provenance; sites cannot be classified")
    stacking = structure.stacking
    n = len(stacking)
    sites = tuple(replace(s, site_class=stacking.layer_class(s.layer % n)) for s in structure.sites)
    return replace(structure, sites=sites)


def interatomic_distance(structure: CrystalStructure, i: int, j: int) -> float:
    """Minimum-image distance between sites ``i`` and ``j`` in Angstrom."""
    n = len(structure)
    for idx in (i, j):
        if not (-n <= idx < n):
            raise IndexError(f"site index {idx} out of range for {n} sites")
    if i % n == j % n:
        warnings.warn(f"distance query of site {i} with itself", DegenerateQueryWarning, stacklevel=2)
        return 0.0
    frac = structure.frac_array()
    return float(_min_image(frac[j] - frac[i], structure.cell.matrix))


def distances_from(structure: CrystalStructure, i: int) -> np.ndarray:
    """Minimum-image distances from site ``i`` to every site (0 for ``i`` itself)."""
    frac = structure.frac_array()
    d = _min_image(frac - frac[i], structure.cell.matrix)
    d[i] = 0.0
    return d


def minimum_distance(structure: CrystalStructure) -> float:
    """Smallest separation between any two atoms, periodic images included."""
    frac = structure.frac_array()
    lattice = structure.cell.matrix
    n = len(frac)
    # self images: shortest non-zero lattice vector
    imgs = _lateral_images()
    imgs = imgs[np.any(imgs != 0, axis=1)] @ lattice
    best = float(np.sqrt((imgs**2).sum(axis=1)).min())
    if n > 1:
        iu, ju = np.triu_indices(n, k=1)
        best = min(best, float(_min_image(frac[ju] - frac[iu], lattice).min()))
    return best


# serialization -------------------------------------------------------------


def _sig(x: float) -> float:
    v = float(format(float(x), f".{SIG_DIGITS}g"))
    return v + 0.0  # normalises -0.0


def _sig_frac(x: float) -> float:
    v = _sig(x)
    return 0.0 if v >= 1.0 else v


def structure_to_dict(structure: CrystalStructure) -> dict:
    cell = structure.cell
    return {
        "cell": {
            "a": _sig(cell.a),
            "c": _sig(cell.c),
            "vectors": [[_sig(x) for x in row] for row in cell.vectors],
        },
        "stacking": str(structure.stacking) if structure.stacking is not None else None,
        "sites": [
            {
                "species": s.species,
                "frac": [_sig_frac(x) for x in s.frac],
                "layer": s.layer,
                "site_class": s.site_class,
            }
            for s in structure.sites
        ],
    }


def dumps_document(doc: dict) -> str:
    """JSON text with one site per line so parse errors point at a useful line."""
    sites = doc.get("sites", [])
    head = {k: v for k, v in doc.items() if k != "sites"}
    lines = ["{"]
    for key, value in head.items():
        lines.append(f"  {json.dumps(key)}: {json.dumps(value, ensure_ascii=False)},")
    lines.append('  "sites": [')
    for n, site in enumerate(sites):
        sep = "," if n < len(sites) - 1 else ""
        lines.append("    " + json.dumps(site, ensure_ascii=False) + sep)
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_structure(structure: CrystalStructure, path, extra: dict | None = None) -> None:
    doc = structure_to_dict(structure)
    if extra:
        doc.update(extra)
    Path(path).write_text(dumps_document(doc), encoding="utf-8")


def _site_line(text: str, index: int) -> int | None:
    """Line number of the ``index``-th site record in a document written by ``dumps_document``."""
    lines = text.splitlines()
    for n, line in enumerate(lines):
        if line.strip().startswith('"sites"'):
            target = n + 2 + index
            return target if target <= len(lines) else None
    return None


def load_document(path) -> tuple:
    path = Path(path)
    if not path.is_file():
        raise InputFileError(f"structure file not found: {path}")
    text = path.read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", line=1)
    return doc, text


def structure_from_dict(doc: dict, text: str | None = None) -> CrystalStructure:
    try:
        cell_doc = doc["cell"]
        cell = LatticeCell(float(cell_doc["a"]), float(cell_doc["c"]), cell_doc.get("vectors"))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"missing or malformed cell field {exc}") from None
    stacking = doc.get("stacking")
    stacking = StackingSequence.parse(stacking) if stacking else None
    if "sites" not in doc or not isinstance(doc["sites"], list):
        raise ParseError("missing 'sites' array")
    sites = []
    for n, sd in enumerate(doc["sites"]):
        line = _site_line(text, n) if text is not None else None
        try:
            sites.append(
                AtomSite(
                    sd["species"],
                    tuple(sd["frac"]),
                    int(sd.get("layer", 0)),
                    sd.get("site_class", "unclassified"),
                ),
            )
        except ValidationError as exc:
            raise ParseError(f"site {n}: {exc}", line=line) from None
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"site {n}: malformed record ({exc})", line=line) from None
    return CrystalStructure(cell, tuple(sites), stacking)


def read_structure(path) -> CrystalStructure:
    doc, text = load_document(path)
    return structure_from_dict(doc, text)


def write_extxyz(structure: CrystalStructure, path) -> None:
    """Extended-XYZ export for viewers; the comment line holds the 9 cell components."""
    lattice = " ".join(f"{x:.10f}" for row in structure.cell.vectors for x in row)
    lines = [
        str(len(structure)),
        f'Lattice="{lattice}" Properties=species:S:1:pos:R:3:site_class:S:1 pbc="T T T"',
    ]
    for site, pos in zip(structure.sites, structure.cart_array()):
        lines.append(f"{site.species:<2s} {pos[0]:16.10f} {pos[1]:16.10f} {pos[2]:16.10f} {site.site_class}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def layer_classes(structure: CrystalStructure, species: str = "Si") -> list:
    """Site class of each distinct layer holding ``species``, in layer order."""
    seen = {}
    for s in structure.sites:
        if s.species == species:
            seen.setdefault(s.layer, s.site_class)
    return [seen[k] for k in sorted(seen)]


def all_stackings(length: int) -> Iterable[str]:
    """Every valid stacking string of the given length (cyclic close-packing rule)."""
    from itertools import product

    for letters in product("ABC", repeat=length):
        if all(letters[i] != letters[(i + 1) % length] for i in range(length)):
            yield "".join(letters)

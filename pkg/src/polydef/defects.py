"""Supercell expansion and erbium defect placement.

Four configurations are supported: Er on an h or k silicon site, alone or
paired with a vacancy on an adjacent carbon site.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from itertools import product
from pathlib import Path

import numpy as np

from .crystal import (
    AtomSite,
    CrystalStructure,
    StackingSequence,
    distances_from,
    load_document,
    structure_from_dict,
    structure_to_dict,
    dumps_document,
)
from .errors import NotFoundError, ParseError, ValidationError

DOPANT = "Er"
HOST_SITE = "Si"
VACANCY_SPECIES = "C"

# distances closer than this count as ties (Angstrom)
TIE_TOL = 1e-6


class DefectKind(str, enum.Enum):
    ErH = "ErH"
    ErK = "ErK"
    ErHV = "ErHV"
    ErKV = "ErKV"

    @property
    def site_class(self) -> str:
        return "h" if self in (DefectKind.ErH, DefectKind.ErHV) else "k"

    @property
    def has_vacancy(self) -> bool:
        return self in (DefectKind.ErHV, DefectKind.ErKV)


@dataclass(frozen=True)
class DefectConfiguration:
    kind: DefectKind

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", DefectKind(self.kind))
        except ValueError:
            names = ", ".join(k.value for k in DefectKind)
            raise ValidationError(f"unknown defect kind {self.kind!r}; expected one of {names}") from None

    @property
    def substitutions(self) -> int:
        return 1

    @property
    def vacancies(self) -> int:
        return 1 if self.kind.has_vacancy else 0


@dataclass(frozen=True)
class Supercell:
    structure: CrystalStructure
    multipliers: tuple
    parent_index: tuple

    def __post_init__(self):
        n_img = int(np.prod(self.multipliers))
        if len(self.parent_index) != len(self.structure):
            raise ValidationError("parent_index length does not match the site count")
        if len(self.structure) % n_img:
            raise ValidationError("site count is not a multiple of the image count")
        n_parent = len(self.structure) // n_img
        counts = np.bincount(np.asarray(self.parent_index, dtype=int), minlength=n_parent)
        if len(counts) != n_parent or np.any(counts != n_img):
            raise ValidationError(f"every parent site must have exactly {n_img} images")

    def __len__(self):
        return len(self.structure)


@dataclass(frozen=True)
class DefectedStructure:
    structure: CrystalStructure
    config: DefectConfiguration
    substituted_site: int
    removed_site: int | None
    log: str
    pristine_count: int

    def __post_init__(self):
        if self.structure.count(DOPANT) != 1:
            raise ValidationError(f"defected structure must hold exactly one {DOPANT} site")
        expected = self.pristine_count - self.config.vacancies
        if len(self.structure) != expected:
            raise ValidationError(f"expected {expected} atoms for {self.config.kind.value}, got {len(self.structure)}")


def expand_supercell(structure: CrystalStructure, n1: int, n2: int, n3: int) -> Supercell:
    """Repeat ``structure`` n1 x n2 x n3 times.

    Ordering is parent index major, then image (i, j, k) lexicographic.
    """
    mult = (n1, n2, n3)
    for m in mult:
        if int(m) != m or m < 1:
            raise ValidationError(f"supercell multipliers must be positive integers, got {mult}")
    n1, n2, n3 = (int(m) for m in mult)
    if structure.count(DOPANT):
        raise ValidationError("cannot expand a structure that already carries a defect")
    nlayers = len(structure.stacking) if structure.stacking is not None else 0
    sites = []
    parent = []
    for p, site in enumerate(structure.sites):
        for i, j, k in product(range(n1), range(n2), range(n3)):
            frac = (
                (site.frac[0] + i) / n1,
                (site.frac[1] + j) / n2,
                (site.frac[2] + k) / n3,
            )
            frac = tuple(x % 1.0 for x in frac)
            layer = site.layer + k * nlayers if nlayers else site.layer
            sites.append(AtomSite(site.species, frac, layer, site.site_class))
            parent.append(p)
    stacking = None
    if structure.stacking is not None:
        stacking = StackingSequence(structure.stacking.letters * n3)
    new = CrystalStructure(structure.cell.scaled(n1, n2, n3), tuple(sites), stacking)
    return Supercell(new, mult, tuple(parent))


def as_supercell(structure: CrystalStructure) -> Supercell:
    """Wrap a plain structure as a trivial (1, 1, 1) supercell."""
    return Supercell(structure, (1, 1, 1), tuple(range(len(structure))))


def select_site(supercell, species: str, site_class: str | None) -> int:
    """Index of the matching site closest to the cell centre (lowest index on ties)."""
    structure = supercell.structure if isinstance(supercell, Supercell) else supercell
    idx = [
        n for n, s in enumerate(structure.sites)
        if s.species == species and (site_class is None or s.site_class == site_class)
    ]
    if not idx:
        raise NotFoundError(f"no {species} site with class {site_class!r} in structure")
    center = np.array([0.5, 0.5, 0.5]) @ structure.cell.matrix
    cart = structure.cart_array()[idx]
    d = np.linalg.norm(cart - center, axis=1)
    best = d.min()
    for n, dist in zip(idx, d):
        if dist <= best + TIE_TOL:
            return n
    raise AssertionError("unreachable")


def nearest_neighbor(structure: CrystalStructure, center: int, species: str) -> tuple:
    """Nearest ``species`` neighbour of ``center``.

    Ties within ``TIE_TOL`` prefer the bond most aligned with the c axis,
    then the lowest index. Returns ``(index, distance)``.
    """
    d = distances_from(structure, center)
    cand = [n for n, s in enumerate(structure.sites) if s.species == species and n != center]
    if not cand:
        raise NotFoundError(f"no {species} neighbour for site {center}")
    best = min(d[n] for n in cand)
    tied = [n for n in cand if d[n] <= best + TIE_TOL]
    if len(tied) == 1:
        return tied[0], float(d[tied[0]])
    frac = structure.frac_array()
    lattice = structure.cell.matrix

    def alignment(n):
        df = frac[n] - frac[center]
        df -= np.round(df)
        v = df @ lattice
        return abs(v[2]) / np.linalg.norm(v)

    chosen = sorted(tied, key=lambda n: (-round(alignment(n), 9), n))[0]
    return chosen, float(d[chosen])


def first_shell(structure: CrystalStructure, center: int, species: str, tol: float = 0.1) -> list:
    """Indices of ``species`` sites within ``tol`` Angstrom of the nearest such neighbour."""
    d = distances_from(structure, center)
    cand = [n for n, s in enumerate(structure.sites) if s.species == species and n != center]
    if not cand:
        return []
    best = min(d[n] for n in cand)
    return [n for n in cand if d[n] <= best + tol]


def apply_defect(supercell, config, vacancy_site: int | None = None) -> DefectedStructure:
    """Place Er on the central Si site of the requested class, adding a C vacancy for *V kinds.

    ``vacancy_site`` overrides the automatic choice of the removed carbon.
    """
    if isinstance(supercell, DefectedStructure):
        raise ValidationError("structure already carries a defect; apply_defect needs a pristine supercell")
    if isinstance(supercell, CrystalStructure):
        supercell = as_supercell(supercell)
    if not isinstance(config, DefectConfiguration):
        config = DefectConfiguration(config)
    structure = supercell.structure
    if structure.count(DOPANT):
        raise ValidationError("structure already carries a defect; apply_defect needs a pristine supercell")
    kind = config.kind
    sub = select_site(supercell, HOST_SITE, kind.site_class)
    old = structure.sites[sub]
    sites = list(structure.sites)
    sites[sub] = replace(old, species=DOPANT)
    log = [
        f"{kind.value}: substituted {DOPANT} at site {sub} "
        f"(was {old.species}, class {old.site_class}, layer {old.layer}, parent {supercell.parent_index[sub]})"
    ]
    removed = None
    if kind.has_vacancy:
        if vacancy_site is None:
            removed, dist = nearest_neighbor(structure, sub, VACANCY_SPECIES)
            how = "nearest neighbour"
        else:
            removed = int(vacancy_site)
            if not (0 <= removed < len(structure)) or structure.sites[removed].species != VACANCY_SPECIES:
                raise ValidationError(f"vacancy site {vacancy_site} is not a {VACANCY_SPECIES} site")
            dist = float(distances_from(structure, sub)[removed])
            how = "user override"
        gone = structure.sites[removed]
        log.append(
            f"{kind.value}: removed {gone.species} at site {removed} "
            f"({how}, {dist:.6f} A from {DOPANT}, layer {gone.layer}, parent {supercell.parent_index[removed]})"
        )
        del sites[removed]
    elif vacancy_site is not None:
        raise ValidationError(f"{kind.value} has no vacancy; vacancy_site must not be given")
    new = replace(structure, sites=tuple(sites))
    return DefectedStructure(new, config, sub, removed, "\n".join(log), len(structure))


def doping_concentration(defected) -> float:
    """Er atoms per atom of the pristine supercell (vacancies do not shrink the denominator)."""
    if isinstance(defected, DefectedStructure):
        structure, total = defected.structure, defected.pristine_count
    else:
        structure, total = defected, len(defected)
    n_er = structure.count(DOPANT)
    if n_er == 0:
        raise ValidationError(f"no {DOPANT} present; concentration undefined")
    return n_er / total


# serialization -------------------------------------------------------------


def write_supercell(supercell: Supercell, path) -> None:
    doc = structure_to_dict(supercell.structure)
    doc["supercell"] = {
        "multipliers": list(supercell.multipliers),
        "parent_index": list(supercell.parent_index),
    }
    _write(doc, path)


def read_supercell(path) -> Supercell:
    """Read a supercell file; a plain structure file is treated as a (1, 1, 1) supercell."""
    doc, text = load_document(path)
    structure = structure_from_dict(doc, text)
    if "defect" in doc:
        raise ValidationError("file holds a defected structure, not a pristine supercell")
    sc = doc.get("supercell")
    if sc is None:
        return as_supercell(structure)
    try:
        return Supercell(structure, tuple(int(m) for m in sc["multipliers"]), tuple(int(p) for p in sc["parent_index"]))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed supercell object ({exc})") from None


def write_defected(defected: DefectedStructure, path) -> None:
    doc = structure_to_dict(defected.structure)
    doc["defect"] = {
        "kind": defected.config.kind.value,
        "substituted_site": defected.substituted_site,
        "removed_site": defected.removed_site,
        "log": defected.log,
        "pristine_count": defected.pristine_count,
    }
    _write(doc, path)


def read_defected(path) -> DefectedStructure:
    doc, text = load_document(path)
    structure = structure_from_dict(doc, text)
    d = doc.get("defect")
    if not isinstance(d, dict):
        raise ParseError("missing 'defect' object")
    try:
        removed = d.get("removed_site")
        config = DefectConfiguration(d["kind"])
        pristine = int(d.get("pristine_count", len(structure) + config.vacancies))
        return DefectedStructure(
            structure, config, int(d["substituted_site"]),
            None if removed is None else int(removed), str(d.get("log", "")), pristine,
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed defect object ({exc})") from None


def _write(doc, path):
    Path(path).write_text(dumps_document(doc), encoding="utf-8")

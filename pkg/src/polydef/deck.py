"""Engine-agnostic input deck for an external plane-wave code.

One ``key = value  # unit`` line per setting, then a k-point block. Mapping
to a specific package is left to the user, e.g. ``scf_tolerance`` maps to
an ABINIT-style total-energy tolerance and ``hubbard_U`` to a DFT+U value
on the Er 4f channel.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .errors import ValidationError


@dataclass(frozen=True)
class DeckSettings:
    scf_tolerance: float = 1e-4  # Ry
    max_iterations: int = 100
    hubbard_U: float = 7.21  # eV, on Er 4f
    scf_kpoints: int = 2
    nscf_kpoints: int = 113
    functional: str = "PBE-GGA+U"
    scf_kpoint_coords: tuple = field(default=())

    def __post_init__(self):
        if not self.scf_tolerance > 0:
            raise ValidationError("scf_tolerance must be positive")
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be at least 1")
        if self.scf_kpoints < 1 or self.nscf_kpoints < 1:
            raise ValidationError("k-point counts must be positive")
        coords = tuple(tuple(float(x) for x in k) for k in self.scf_kpoint_coords)
        if coords and len(coords) != self.scf_kpoints:
            raise ValidationError(f"{len(coords)} SCF k-point coordinates given for scf_kpoints={self.scf_kpoints}")
        object.__setattr__(self, "scf_kpoint_coords", coords)

    @classmethod
    def from_dict(cls, doc: dict) -> "DeckSettings":
        known = {f.name for f in fields(cls)}
        extra = sorted(set(doc) - known)
        if extra:
            raise ValidationError(f"unknown deck settings: {', '.join(extra)}")
        return cls(**doc)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["scf_kpoint_coords"] = [list(k) for k in self.scf_kpoint_coords]
        return d


_UNITS = {
    "scf_tolerance": "Ry, |E(n) - E(n-1)| must drop below this",
    "max_iterations": "SCF iteration cap",
    "hubbard_U": "eV, Er 4f",
    "scf_kpoints": "count, ground-state density",
    "nscf_kpoints": "count, band path",
    "functional": "exchange-correlation tag",
}


def format_deck(settings: DeckSettings, structure_file: str | None = None, natoms: int | None = None,
                kpath=None) -> str:
    lines = ["# polydef input deck: key = value  # unit", "# stage 1: scf (density), stage 2: nscf (band path)"]
    for key in ("functional", "scf_tolerance", "max_iterations", "hubbard_U", "scf_kpoints", "nscf_kpoints"):
        value = getattr(settings, key)
        lines.append(f"{key} = {value!r}  # {_UNITS[key]}" if isinstance(value, float) else f"{key} = {value}  # {_UNITS[key]}")
    if structure_file is not None:
        lines.append(f"structure = {structure_file}  # structure file")
    if natoms is not None:
        lines.append(f"natoms = {natoms}  # count")
    lines.append("")
    lines.append(f"begin scf_kpoints {settings.scf_kpoints}")
    if settings.scf_kpoint_coords:
        for k in settings.scf_kpoint_coords:
            lines.append("  " + " ".join(f"{x!r}" for x in k))
    else:
        lines.append("  # unset: supply the SCF k-point coordinates for the target code")
    lines.append("end scf_kpoints")
    if kpath is not None:
        if len(kpath) != settings.nscf_kpoints:
            raise ValidationError(f"k-path has {len(kpath)} points but nscf_kpoints={settings.nscf_kpoints}")
        lines.append("")
        lines.append(f"begin nscf_kpoints {len(kpath)}  # fractional reciprocal coordinates")
        for p in kpath.points:
            rec = "  " + " ".join(f"{x:.12f}" for x in p.frac)
            if p.label:
                rec += f"  {p.label}"
            lines.append(rec)
        lines.append("end nscf_kpoints")
    return "\n".join(lines) + "\n"


def write_deck(settings: DeckSettings, path, **kwargs) -> None:
    Path(path).write_text(format_deck(settings, **kwargs), encoding="utf-8")

"""Reciprocal lattice and high-symmetry paths through the hexagonal Brillouin zone.

Reciprocal vectors use the crystallographic 2*pi convention, so
``b_i . a_j = 2 pi delta_ij`` and Cartesian k is in inverse Angstrom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputFileError, ParseError, StructuralError, ValidationError

DEFAULT_PATH = ("Γ", "M", "K", "Γ", "A", "L", "H", "A")

_ALIASES = {"G": "Γ", "GAMMA": "Γ", "Γ": "Γ", "\\GAMMA": "Γ"}


def hex_high_symmetry_points() -> dict:
    """Fractional reciprocal coordinates of the hexagonal special points."""
    third = 1.0 / 3.0
    return {
        "Γ": (0.0, 0.0, 0.0),
        "M": (0.5, 0.0, 0.0),
        "K": (third, third, 0.0),
        "A": (0.0, 0.0, 0.5),
        "L": (0.5, 0.0, 0.5),
        "H": (third, third, 0.5),
    }


def canonical_label(label: str) -> str:
    key = label.strip()
    return _ALIASES.get(key.upper(), key.upper() if key.upper() in hex_high_symmetry_points() else key)


def parse_labels(text) -> list:
    """Accept ``"G-M-K-G"``, ``"Γ M K Γ"`` or a sequence of labels."""
    if isinstance(text, str):
        parts = [p for p in text.replace(",", " ").replace("-", " ").split() if p]
    else:
        parts = list(text)
    return [canonical_label(p) for p in parts]


def reciprocal_lattice(cell) -> np.ndarray:
    """Rows are b1, b2, b3 in inverse Angstrom."""
    lattice = np.asarray(getattr(cell, "matrix", cell), dtype=float)
    if lattice.shape != (3, 3):
        raise ValidationError("cell matrix must be 3x3")
    det = np.linalg.det(lattice)
    scale = np.abs(lattice).max() ** 3
    if scale == 0 or abs(det) < 1e-12 * scale:
        raise ValidationError("cell matrix is singular")
    return 2.0 * math.pi * np.linalg.inv(lattice).T


@dataclass(frozen=True)
class KPoint:
    frac: tuple
    cart: tuple
    label: str | None
    s: float


@dataclass(frozen=True)
class KPath:
    points: tuple
    vertices: tuple
    reciprocal: tuple
    segment_counts: tuple = ()

    def __len__(self):
        return len(self.points)

    @property
    def frac(self) -> np.ndarray:
        return np.array([p.frac for p in self.points], dtype=float)

    @property
    def cart(self) -> np.ndarray:
        return np.array([p.cart for p in self.points], dtype=float)

    @property
    def s(self) -> np.ndarray:
        return np.array([p.s for p in self.points], dtype=float)

    @property
    def labels(self) -> list:
        return [p.label for p in self.points]

    def ticks(self) -> list:
        """(s, label) for every labelled point."""
        return [(p.s, p.label) for p in self.points if p.label]


def allocate_points(lengths, total: int) -> list:
    """Points owned by each segment; the counts sum to ``total``.

    A segment owns its start vertex and its interior points, and the last
    segment also owns the final vertex, so shared vertices are counted once.
    The ``total - nseg - 1`` interior points are shared out in proportion to
    segment length by largest remainder, ties going to the earlier segment.
    """
    lengths = [float(x) for x in lengths]
    nseg = len(lengths)
    interior = total - nseg - 1
    if interior < 0:
        raise ValidationError(f"total_points={total} is smaller than the {nseg + 1} path vertices")
    L = sum(lengths)
    quotas = [interior * x / L for x in lengths]
    base = [math.floor(q) for q in quotas]
    left = interior - sum(base)
    order = sorted(range(nseg), key=lambda j: (-(quotas[j] - base[j]), j))
    for j in order[:left]:
        base[j] += 1
    counts = [1 + b for b in base]
    counts[-1] += 1
    return counts


def build_kpath(cell, vertex_labels=DEFAULT_PATH, total_points: int = 113) -> KPath:
    """Sample the piecewise-linear path through ``vertex_labels`` with ``total_points`` points."""
    labels = parse_labels(vertex_labels)
    table = hex_high_symmetry_points()
    for lab in labels:
        if lab not in table:
            raise ValidationError(f"unknown high-symmetry label {lab!r}; known: {', '.join(table)}")
    if len(labels) < 2:
        raise ValidationError("a k-path needs at least two vertices")
    for i in range(len(labels) - 1):
        if labels[i] == labels[i + 1]:
            raise ValidationError(f"zero-length segment {labels[i]}-{labels[i + 1]} at position {i}")
    if total_points < len(labels):
        raise ValidationError(f"total_points={total_points} is smaller than the {len(labels)} path vertices")
    recip = reciprocal_lattice(cell)
    verts = [np.array(table[lab]) for lab in labels]
    lengths = [float(np.linalg.norm((verts[i + 1] - verts[i]) @ recip)) for i in range(len(verts) - 1)]
    counts = allocate_points(lengths, total_points)

    fracs, labs = [], []
    for j, n in enumerate(counts):
        if j == len(counts) - 1:
            n -= 1
        start, end = verts[j], verts[j + 1]
        fracs.append(tuple(table[labels[j]]))
        labs.append(labels[j])
        for m in range(1, n):
            t = m / n
            fracs.append(tuple(start + t * (end - start)))
            labs.append(None)
    fracs.append(tuple(table[labels[-1]]))
    labs.append(labels[-1])

    fa = np.array(fracs)
    cart = fa @ recip
    steps = np.linalg.norm(np.diff(cart, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(steps)])
    points = tuple(
        KPoint(tuple(float(x) for x in f), tuple(float(x) for x in c), lab, float(si))
        for f, c, lab, si in zip(fracs, cart, labs, s)
    )
    return KPath(points, tuple(labels), tuple(map(tuple, recip)), tuple(counts))


# file format ----------------------------------------------------------------


def write_kpath(path_obj: KPath, path) -> None:
    lines = [
        f"# kpath npoints={len(path_obj)} convention=2pi units=1/Angstrom",
        "# reciprocal " + " ".join(repr(float(x)) for row in path_obj.reciprocal for x in row),
        "# label frac_x frac_y frac_z",
    ]
    table = hex_high_symmetry_points()
    for lab in path_obj.vertices:
        f = table.get(lab)
        if f is None:
            f = next(p.frac for p in path_obj.points if p.label == lab)
        lines.append(f"# {lab} " + " ".join(repr(float(x)) for x in f))
    lines.append("# index frac_x frac_y frac_z s label")
    for n, p in enumerate(path_obj.points):
        rec = f"{n} " + " ".join(repr(x) for x in p.frac) + f" {p.s!r}"
        if p.label:
            rec += f" {p.label}"
        lines.append(rec)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_kpath(path) -> KPath:
    path = Path(path)
    if not path.is_file():
        raise InputFileError(f"k-path file not found: {path}")
    recip = None
    vertices = []
    points = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            tok = line[1:].split()
            if tok and tok[0] == "reciprocal":
                try:
                    recip = np.array([float(x) for x in tok[1:]]).reshape(3, 3)
                except ValueError:
                    raise ParseError("reciprocal header needs 9 numbers", line=lineno) from None
            elif len(tok) == 4 and tok[0] not in ("label", "index"):
                try:
                    [float(x) for x in tok[1:]]
                except ValueError:
                    continue
                vertices.append(tok[0])
            continue
        tok = line.split("#", 1)[0].split()
        if len(tok) not in (5, 6):
            raise ParseError(f"expected 5 or 6 fields, got {len(tok)}", line=lineno)
        try:
            idx = int(tok[0])
            frac = tuple(float(x) for x in tok[1:4])
            s = float(tok[4])
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
        if idx != len(points):
            raise StructuralError(f"point index {idx} out of sequence (expected {len(points)})", line=lineno)
        points.append((frac, s, tok[5] if len(tok) == 6 else None))
    if recip is None:
        raise StructuralError("missing '# reciprocal' header")
    if not points:
        raise StructuralError("k-path file has no points")
    kp = tuple(
        KPoint(frac, tuple(float(x) for x in np.array(frac) @ recip), lab, s) for frac, s, lab in points
    )
    marks = [n for n, (_, _, lab) in enumerate(points) if lab]
    counts = ()
    if len(marks) >= 2 and marks[0] == 0 and marks[-1] == len(points) - 1:
        counts = [b - a for a, b in zip(marks, marks[1:])]
        counts[-1] += 1
        counts = tuple(counts)
    return KPath(kp, tuple(vertices), tuple(map(tuple, recip)), counts)

"""Eigenvalue datasets and their plain-text file format.

File layout::

    # nk=<int> nbands=<int> electrons=<int> spin=<int> units=eV
    k <index> <fx> <fy> <fz> <weight>   # optional: s=<path distance> label=<name>
    <nbands eigenvalues, any line wrapping>
    ...

``#`` starts a comment anywhere. The optional ``s=``/``label=`` comment on a
``k`` line and a ``# reference=<note>`` line are read back when present.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import InputFileError, ParseError, StructuralError, ValidationError

log = logging.getLogger(__name__)

_HEADER_RE = re.compile(r"(\w+)=(\S+)")
VALUES_PER_LINE = 6


@dataclass(frozen=True, eq=False)
class EigenvalueSet:
    frac: np.ndarray
    weights: np.ndarray
    bands: np.ndarray
    electrons: int
    spin_degeneracy: int = 2
    reference: str | None = None
    s: np.ndarray | None = None
    labels: tuple | None = None
    warnings: tuple = field(default=())

    def __post_init__(self):
        frac = np.array(self.frac, dtype=float).reshape(-1, 3)
        weights = np.array(self.weights, dtype=float).reshape(-1)
        bands = np.array(self.bands, dtype=float)
        if bands.ndim != 2:
            raise ValidationError("bands must be a 2-D array (nk, nbands)")
        nk = bands.shape[0]
        if frac.shape[0] != nk or weights.shape[0] != nk:
            raise ValidationError(f"{nk} k-points of eigenvalues but {frac.shape[0]} coordinates, {weights.shape[0]} weights")
        if nk == 0 or bands.shape[1] == 0:
            raise ValidationError("eigenvalue set is empty")
        if np.any(weights <= 0):
            raise ValidationError("k-point weights must be positive")
        if np.any(np.diff(bands, axis=1) < 0):
            raise ValidationError("eigenvalues must be ascending at every k-point")
        if self.spin_degeneracy not in (1, 2):
            raise ValidationError(f"spin degeneracy must be 1 or 2, got {self.spin_degeneracy}")
        if int(self.electrons) != self.electrons or self.electrons < 0:
            raise ValidationError(f"electron count must be a non-negative integer, got {self.electrons}")
        for name, arr in (("frac", frac), ("weights", weights), ("bands", bands)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "electrons", int(self.electrons))
        if self.s is not None:
            s = np.array(self.s, dtype=float).reshape(-1)
            if s.shape[0] != nk:
                raise ValidationError("path distance needs one value per k-point")
            s.flags.writeable = False
            object.__setattr__(self, "s", s)
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != nk:
                raise ValidationError("labels need one entry per k-point")
            object.__setattr__(self, "labels", labels)

    @property
    def nk(self) -> int:
        return self.bands.shape[0]

    @property
    def nbands(self) -> int:
        return self.bands.shape[1]

    @property
    def weights_normalized(self) -> bool:
        return abs(self.weights.sum() - 1.0) < 1e-9

    def shifted(self, delta: float, reference: str | None = None) -> "EigenvalueSet":
        return EigenvalueSet(
            self.frac, self.weights, self.bands + delta, self.electrons, self.spin_degeneracy,
            reference if reference is not None else self.reference, self.s, self.labels, self.warnings,
        )

    def subset(self, band_indices) -> "EigenvalueSet":
        """Keep only the given band columns (electron count is kept as is)."""
        idx = np.asarray(band_indices, dtype=int)
        return EigenvalueSet(
            self.frac, self.weights, self.bands[:, idx], self.electrons, self.spin_degeneracy,
            self.reference, self.s, self.labels,
        )

    def same_as(self, other: "EigenvalueSet") -> bool:
        def eq(a, b):
            if a is None or b is None:
                return a is None and b is None
            return np.array_equal(a, b)

        return (
            eq(self.frac, other.frac) and eq(self.weights, other.weights) and eq(self.bands, other.bands)
            and self.electrons == other.electrons and self.spin_degeneracy == other.spin_degeneracy
            and self.reference == other.reference and eq(self.s, other.s) and self.labels == other.labels
        )


def write_eigenvalues(eig: EigenvalueSet, path) -> None:
    Path(path).write_text(format_eigenvalues(eig), encoding="utf-8")


def format_eigenvalues(eig: EigenvalueSet) -> str:
    out = [f"# nk={eig.nk} nbands={eig.nbands} electrons={eig.electrons} spin={eig.spin_degeneracy} units=eV"]
    if eig.reference:
        out.append(f"# reference={eig.reference}")
    for n in range(eig.nk):
        f = eig.frac[n]
        line = f"k {n + 1} {float(f[0])!r} {float(f[1])!r} {float(f[2])!r} {float(eig.weights[n])!r}"
        meta = []
        if eig.s is not None:
            meta.append(f"s={float(eig.s[n])!r}")
        if eig.labels is not None and eig.labels[n]:
            meta.append(f"label={eig.labels[n]}")
        if meta:
            line += "  # " + " ".join(meta)
        out.append(line)
        vals = [repr(float(x)) for x in eig.bands[n]]
        for i in range(0, len(vals), VALUES_PER_LINE):
            out.append(" ".join(vals[i:i + VALUES_PER_LINE]))
    return "\n".join(out) + "\n"


def _tokens(line: str):
    for m in re.finditer(r"\S+", line):
        yield m.group(0), m.start() + 1


def parse_eigenvalues(path) -> EigenvalueSet:
    """Read and validate an eigenvalue file (see module docstring)."""
    path = Path(path)
    if not path.is_file():
        raise InputFileError(f"eigenvalue file not found: {path}")
    return parse_eigenvalue_text(path.read_text(encoding="utf-8"))


def parse_eigenvalue_text(text: str) -> EigenvalueSet:
    header = None
    reference = None
    records = []  # [index, frac, weight, values, meta, line]
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body, _, comment = raw.partition("#")
        comment = comment.strip()
        if comment:
            keys = dict(_HEADER_RE.findall(comment))
            if "nk" in keys and header is None:
                try:
                    header = {k: int(keys[k]) for k in ("nk", "nbands", "electrons", "spin")}
                except KeyError as exc:
                    raise ParseError(f"header is missing {exc.args[0]}=", line=lineno) from None
                except ValueError as exc:
                    raise ParseError(f"header value is not an integer ({exc})", line=lineno) from None
                units = keys.get("units", "eV")
                if units != "eV":
                    raise ParseError(f"unsupported units {units!r}; only eV is accepted", line=lineno)
            elif "reference" in keys and not body.strip():
                reference = comment.split("=", 1)[1].strip()
        toks = list(_tokens(body))
        if not toks:
            continue
        if toks[0][0] == "k":
            if header is None:
                raise StructuralError("k-point record before the '# nk=... nbands=...' header", line=lineno)
            if records:
                _check_complete(records[-1], header["nbands"])
            if len(toks) != 6:
                raise ParseError(f"k record needs index, 3 coordinates and a weight; got {len(toks) - 1} fields", line=lineno)
            try:
                idx = int(toks[1][0])
            except ValueError:
                raise ParseError(f"cannot parse {toks[1][0]!r} as a k index", line=lineno, column=toks[1][1]) from None
            nums = [_number(t, c, lineno) for t, c in toks[2:]]
            meta = dict(_HEADER_RE.findall(comment)) if comment else {}
            records.append([idx, nums[:3], nums[3], [], meta, lineno])
            continue
        if not records:
            raise StructuralError("eigenvalues before the first k record", line=lineno)
        rec = records[-1]
        for tok, col in toks:
            if len(rec[3]) >= header["nbands"]:
                raise StructuralError(
                    f"k index {rec[0]} has more than nbands={header['nbands']} eigenvalues", line=lineno, column=col,
                )
            rec[3].append(_number(tok, col, lineno))
    if header is None:
        raise StructuralError("missing '# nk=... nbands=... electrons=... spin=...' header")
    if not records:
        raise StructuralError("no k-point records")
    _check_complete(records[-1], header["nbands"])
    if len(records) != header["nk"]:
        raise StructuralError(f"header declares nk={header['nk']} but file has {len(records)} k records")
    for n, rec in enumerate(records, start=1):
        if rec[0] != n:
            raise StructuralError(f"k index {rec[0]} out of sequence (expected {n})", line=rec[5])

    bands = np.array([rec[3] for rec in records], dtype=float)
    warnings = []
    unsorted = np.where(np.any(np.diff(bands, axis=1) < 0, axis=1))[0]
    if len(unsorted):
        msg = f"eigenvalues not ascending at k index {', '.join(str(i + 1) for i in unsorted)}; sorted on read"
        log.warning(msg)
        warnings.append(msg)
        bands = np.sort(bands, axis=1)
    s = None
    if all("s" in rec[4] for rec in records):
        s = [float(rec[4]["s"]) for rec in records]
    labels = None
    if any("label" in rec[4] for rec in records):
        labels = tuple(rec[4].get("label") for rec in records)
    try:
        return EigenvalueSet(
            [rec[1] for rec in records], [rec[2] for rec in records], bands,
            header["electrons"], header["spin"], reference, s, labels, tuple(warnings),
        )
    except ValidationError as exc:
        raise StructuralError(str(exc)) from None


def _number(tok: str, col: int, lineno: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"cannot parse {tok!r} as a number", line=lineno, column=col) from None


def _check_complete(rec, nbands):
    if len(rec[3]) != nbands:
        raise StructuralError(f"k index {rec[0]} has {len(rec[3])} bands, expected {nbands}", line=rec[5])

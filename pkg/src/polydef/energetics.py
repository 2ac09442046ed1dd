"""Relative formation energies of defect configurations.

``E_R(x) = E_T - E_Def(x) - E_0`` with ``E_0 = E_T - E_Def(ref)``, so the
reference configuration sits at exactly zero and every other value depends
only on the difference ``E_Def(ref) - E_Def(x)``. All energies are per atom.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import InputFileError, ParseError, ValidationError

TIE_TOL = 1e-12


@dataclass(frozen=True)
class EnergyLedger:
    pristine_E_T: float
    entries: dict
    reference: str
    E_0: float
    results: dict

    def to_dict(self) -> dict:
        return {
            "pristine_E_T": self.pristine_E_T,
            "entries": dict(self.entries),
            "reference": self.reference,
            "E_0": self.E_0,
            "results": dict(self.results),
        }


@dataclass(frozen=True)
class RankEntry:
    name: str
    E_R: float
    gap_to_previous: float | None
    tied: bool


def per_atom(total_energy: float, n_atoms: int) -> float:
    """Supercell total energy divided by its own atom count."""
    if int(n_atoms) != n_atoms or n_atoms < 1:
        raise ValidationError(f"atom count must be a positive integer, got {n_atoms}")
    return float(total_energy) / int(n_atoms)


def default_reference(entries: dict) -> str:
    """Configuration with the lowest (most negative) per-atom energy; name order breaks ties."""
    return min(sorted(entries), key=lambda k: entries[k])


def relative_formation_energies(pristine_E_T: float, entries, reference: str | None = None) -> EnergyLedger:
    if isinstance(entries, dict):
        items = list(entries.items())
    else:
        items = [tuple(x) for x in entries]
    if not items:
        raise ValidationError("at least one defect configuration energy is required")
    names = [k for k, _ in items]
    dup = sorted({k for k in names if names.count(k) > 1})
    if dup:
        raise ValidationError(f"duplicate configuration names: {', '.join(dup)}")
    table = {str(k): float(v) for k, v in items}
    if reference is None:
        reference = default_reference(table)
    elif reference not in table:
        raise ValidationError(f"reference {reference!r} is not among the configurations {', '.join(table)}")
    E_T = float(pristine_E_T)
    E_0 = E_T - table[reference]
    results = {name: (E_T - e) - E_0 for name, e in table.items()}
    return EnergyLedger(E_T, table, reference, E_0, results)


def stability_ranking(ledger: EnergyLedger, tol: float = TIE_TOL) -> list:
    """Configurations by ascending E_R (most stable first); equal values are flagged as ties."""
    order = sorted(ledger.results.items(), key=lambda kv: (kv[1], kv[0]))
    out = []
    for n, (name, e) in enumerate(order):
        gap = None if n == 0 else e - order[n - 1][1]
        tied_prev = n > 0 and abs(e - order[n - 1][1]) <= tol
        tied_next = n + 1 < len(order) and abs(order[n + 1][1] - e) <= tol
        out.append(RankEntry(name, e, gap, tied_prev or tied_next))
    return out


def format_table(ledger: EnergyLedger, decimals: int = 4) -> str:
    """Aligned text table of E_R values in input order."""
    rows = [(name, f"{ledger.results[name]:.{decimals}f}") for name in ledger.entries]
    w1 = max(len("Defect configuration"), *(len(r[0]) for r in rows))
    w2 = max(len("E_R (eV/atom)"), *(len(r[1]) for r in rows))
    lines = [f"{'Defect configuration':<{w1}}  {'E_R (eV/atom)':>{w2}}", f"{'-' * w1}  {'-' * w2}"]
    for name, val in rows:
        mark = "  (reference)" if name == ledger.reference else ""
        lines.append(f"{name:<{w1}}  {val:>{w2}}{mark}")
    return "\n".join(lines)


def format_ranking(ranking, decimals: int = 4) -> str:
    lines = []
    for n, r in enumerate(ranking, start=1):
        gap = "" if r.gap_to_previous is None else f"  (+{r.gap_to_previous:.{decimals}f} vs previous)"
        tie = "  [tie]" if r.tied else ""
        lines.append(f"{n}. {r.name}: {r.E_R:.{decimals}f}{gap}{tie}")
    return "\n".join(lines)


def read_ledger_input(path) -> tuple:
    """(pristine_E_T, entries, reference) from a ledger JSON file."""
    path = Path(path)
    if not path.is_file():
        raise InputFileError(f"ledger file not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"), object_pairs_hook=_unique_keys)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from None
    try:
        return float(doc["pristine_E_T"]), dict(doc["entries"]), doc.get("reference")
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed ledger ({exc})") from None


def _unique_keys(pairs):
    keys = [k for k, _ in pairs]
    dup = sorted({k for k in keys if keys.count(k) > 1})
    if dup:
        raise ValidationError(f"duplicate configuration names: {', '.join(dup)}")
    return dict(pairs)


def read_ledger(path) -> EnergyLedger:
    return relative_formation_energies(*read_ledger_input(path))


def write_ledger(ledger: EnergyLedger, path) -> None:
    Path(path).write_text(json.dumps(ledger.to_dict(), indent=2) + "\n", encoding="utf-8")

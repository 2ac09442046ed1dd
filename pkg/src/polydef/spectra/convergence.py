"""SCF convergence auditing from ``iter <n> dE <value> Ry`` logs."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from ..errors import InputFileError, ParseError, StructuralError, ValidationError
from .analysis import RY_TO_EV

DEFAULT_THRESHOLD_RY = 1e-4
DEFAULT_MAX_ITERATIONS = 100

_LINE = re.compile(r"^iter\s+(\S+)\s+dE\s+(\S+)\s+Ry\s*$")


@dataclass(frozen=True)
class ConvergenceReport:
    iterations: int
    residuals: tuple
    threshold: float
    max_iterations: int
    converged: bool

    @property
    def final_residual(self) -> float:
        return self.residuals[-1]

    @property
    def final_residual_ev(self) -> float:
        return self.final_residual * RY_TO_EV

    def summary(self) -> str:
        state = "converged" if self.converged else "NOT converged"
        return (
            f"{state}: {self.iterations} iterations, final |dE| = {self.final_residual:.3e} Ry "
            f"({self.final_residual_ev:.3e} eV), threshold {self.threshold:.1e} Ry, cap {self.max_iterations}"
        )


def read_convergence_log(path) -> list:
    """(iteration, |dE| in Ry) pairs in file order."""
    path = Path(path)
    if not path.is_file():
        raise InputFileError(f"convergence log not found: {path}")
    rows = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line.startswith("iter"):
            continue
        m = _LINE.match(line)
        if not m:
            raise ParseError("expected 'iter <n> dE <value> Ry'", line=lineno)
        try:
            it = int(m.group(1))
            de = abs(float(m.group(2)))
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
        if rows and it <= rows[-1][0]:
            raise StructuralError(f"iteration {it} does not follow iteration {rows[-1][0]}", line=lineno)
        rows.append((it, de))
    return rows


def audit_convergence(log, threshold_ry: float = DEFAULT_THRESHOLD_RY,
                      max_iterations: int = DEFAULT_MAX_ITERATIONS) -> ConvergenceReport:
    """Converged iff some residual drops strictly below ``threshold_ry`` within the cap.

    ``log`` is a path or a list of (iteration, residual) pairs. On success the
    report stops at the first converged iteration.
    """
    if not threshold_ry > 0:
        raise ValidationError("threshold must be positive")
    if max_iterations < 1:
        raise ValidationError("max_iterations must be at least 1")
    rows = read_convergence_log(log) if isinstance(log, (str, Path)) else list(log)
    if not rows:
        raise ValidationError("convergence log holds no iterations")
    for n in range(1, len(rows)):
        if rows[n][0] <= rows[n - 1][0]:
            raise StructuralError(f"iteration {rows[n][0]} does not follow iteration {rows[n - 1][0]}")
    for n, (it, de) in enumerate(rows):
        if it > max_iterations:
            break
        if de < threshold_ry:
            return ConvergenceReport(it, tuple(r[1] for r in rows[: n + 1]), threshold_ry, max_iterations, True)
    within = [r for r in rows if r[0] <= max_iterations] or rows[:1]
    return ConvergenceReport(within[-1][0], tuple(r[1] for r in within), threshold_ry, max_iterations, False)

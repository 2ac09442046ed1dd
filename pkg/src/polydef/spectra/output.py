"""CSV tables and minimal SVG plots for band structures and DOS curves."""

from __future__ import annotations

import csv
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .dos import DosCurve
from .eigen import EigenvalueSet

FMT = "{:.8f}"

WIDTH, HEIGHT = 640, 480
MARGIN = 60


def path_axis(eig: EigenvalueSet) -> np.ndarray:
    return eig.s if eig.s is not None else np.arange(eig.nk, dtype=float)


def write_bands_csv(eig: EigenvalueSet, path) -> None:
    x = path_axis(eig)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "s", "label"] + [f"band_{n}" for n in range(eig.nbands)])
        for k in range(eig.nk):
            label = eig.labels[k] if eig.labels and eig.labels[k] else ""
            w.writerow([k, FMT.format(x[k]), label] + [FMT.format(v) for v in eig.bands[k]])


def write_dos_csv(dos: DosCurve, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["energy_eV", "dos_states_per_eV"])
        for e, v in zip(dos.grid, dos.values):
            w.writerow([FMT.format(e), "{:.10e}".format(v)])


def read_dos_csv(path) -> DosCurve:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    data = np.array([[float(a), float(b)] for a, b in rows[1:]])
    return DosCurve(data[:, 0], data[:, 1], float("nan"))


class _Axes:
    def __init__(self, xlim, ylim):
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim

    def px(self, x):
        return MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2 * MARGIN)

    def py(self, y):
        return HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2 * MARGIN)

    def polyline(self, xs, ys, color="#1f4e9c", width=1.2):
        pts = " ".join(f"{self.px(x):.2f},{self.py(y):.2f}" for x, y in zip(xs, ys))
        return f'<polyline fill="none" stroke="{color}" stroke-width="{width}" points="{pts}"/>'


def _svg(body, title):
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">'
    )
    frame = (
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{WIDTH - 2 * MARGIN}" height="{HEIGHT - 2 * MARGIN}" '
        'fill="none" stroke="black"/>'
    )
    t = f'<text x="{WIDTH / 2}" y="{MARGIN / 2}" text-anchor="middle">{escape(title)}</text>'
    return "\n".join([head, frame, t, *body, "</svg>"]) + "\n"


def _yticks(ax, lo, hi, horizontal=True):
    out = []
    for v in np.linspace(lo, hi, 5):
        if horizontal:
            y = ax.py(v)
            out.append(f'<text x="{MARGIN - 6}" y="{y + 4:.2f}" text-anchor="end">{v:.2f}</text>')
        else:
            x = ax.px(v)
            out.append(f'<text x="{x:.2f}" y="{HEIGHT - MARGIN + 16}" text-anchor="middle">{v:.2f}</text>')
    return out


def bands_svg(eig: EigenvalueSet, path, title="Band structure", emin=None, emax=None, zero=None) -> None:
    """One polyline per band, vertical ticks at labelled path vertices."""
    x = path_axis(eig)
    lo = float(eig.bands.min()) if emin is None else emin
    hi = float(eig.bands.max()) if emax is None else emax
    if hi <= lo:
        hi = lo + 1.0
    ax = _Axes((float(x[0]), float(x[-1]) if x[-1] > x[0] else float(x[0]) + 1.0), (lo, hi))
    body = []
    if eig.labels:
        for k, lab in enumerate(eig.labels):
            if not lab:
                continue
            px = ax.px(x[k])
            body.append(f'<line x1="{px:.2f}" y1="{MARGIN}" x2="{px:.2f}" y2="{HEIGHT - MARGIN}" stroke="#999"/>')
            body.append(f'<text x="{px:.2f}" y="{HEIGHT - MARGIN + 16}" text-anchor="middle">{escape(lab)}</text>')
    if zero is not None and lo < zero < hi:
        body.append(ax.polyline([x[0], x[-1]], [zero, zero], color="#c00", width=0.8))
    for n in range(eig.nbands):
        body.append(ax.polyline(x, eig.bands[:, n]))
    body += _yticks(ax, lo, hi)
    body.append(f'<text x="16" y="{HEIGHT / 2}" transform="rotate(-90 16 {HEIGHT / 2})" '
                'text-anchor="middle">Energy (eV)</text>')
    Path(path).write_text(_svg(body, title), encoding="utf-8")


def dos_svg(dos: DosCurve, path, title="Density of states") -> None:
    vmax = float(dos.values.max()) or 1.0
    ax = _Axes((float(dos.grid[0]), float(dos.grid[-1])), (0.0, vmax * 1.05))
    body = [ax.polyline(dos.grid, dos.values)]
    body += _yticks(ax, float(dos.grid[0]), float(dos.grid[-1]), horizontal=False)
    body.append(f'<text x="{WIDTH / 2}" y="{HEIGHT - 16}" text-anchor="middle">Energy (eV)</text>')
    body.append(f'<text x="16" y="{HEIGHT / 2}" transform="rotate(-90 16 {HEIGHT / 2})" '
                'text-anchor="middle">DOS (states/eV)</text>')
    Path(path).write_text(_svg(body, title), encoding="utf-8")

"""Command-line entry point: ``polydef <subcommand> ...``.

Every subcommand accepts ``--manifest FILE``; values from the manifest act
as defaults and explicit flags win. ``polydef run --manifest FILE`` executes
the whole chain (build, supercell, defect, kpath, deck, bands, analyze, dos,
formation, plot) into the manifest's output directory.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .bz import DEFAULT_PATH, build_kpath, read_kpath, write_kpath
from .crystal import DEFAULT_A, DEFAULT_C, build_polytype, layer_classes, read_structure, write_extxyz, write_structure
from .deck import DeckSettings, write_deck
from .defects import (
    DefectKind,
    apply_defect,
    doping_concentration,
    expand_supercell,
    read_supercell,
    write_defected,
    write_supercell,
)
from .energetics import (
    format_ranking,
    format_table,
    read_ledger_input,
    relative_formation_energies,
    stability_ranking,
    write_ledger,
)
from .errors import InputFileError, ParseError, PolydefError, ValidationError
from .modelbands import default_tb_model, read_synthetic_spec, read_tb_model, synthesize, tb_solve
from .spectra import (
    analyze,
    audit_convergence,
    compute_dos,
    ev_to_wavelength,
    normalize_to_vbm,
    parse_eigenvalues,
    split_by_edge,
    write_eigenvalues,
)
from .spectra.dos import DEFAULT_SIGMA, default_window
from .spectra.analysis import DEFAULT_FLAT_DELTA
from .spectra.output import bands_svg, dos_svg, read_dos_csv, write_bands_csv, write_dos_csv

log = logging.getLogger("polydef")

EXIT_USAGE = 2
EXIT_NOT_CONVERGED = 8

EXIT_CODES = """exit codes:
  0  success
  1  unexpected internal error
  2  usage error (unknown flag, missing required value)
  3  input file missing
  4  malformed input file (parse or structure error)
  5  precondition violated (invalid value or object)
  6  requested site not found
  7  occupation error (odd electron count, no empty band)
  8  SCF log not converged (audit only)"""


class UsageError(PolydefError):
    exit_code = EXIT_USAGE
    kind = "usage"


class _Formatter(argparse.ArgumentDefaultsHelpFormatter, argparse.RawDescriptionHelpFormatter):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# manifest -------------------------------------------------------------------


@dataclass
class RunManifest:
    output_dir: str = "polydef-out"
    stacking: str = "ABCB"
    a: float = DEFAULT_A
    c: float = DEFAULT_C
    supercell: tuple = (1, 1, 1)
    defect: str | None = None
    vacancy_site: int | None = None
    kpath_labels: str = "-".join(DEFAULT_PATH)
    kpath_points: int = 113
    deck: dict = field(default_factory=dict)
    engine: str = "tb"
    tb_params: str | None = None
    synthetic_spec: str | None = None
    eigenvalues: str | None = None
    electrons: int | None = None
    sigma: float = DEFAULT_SIGMA
    delta: float = DEFAULT_FLAT_DELTA
    grid: int = 2001
    window: tuple | None = None
    energies: str | None = None

    @classmethod
    def load(cls, path) -> "RunManifest":
        path = Path(path)
        if not path.is_file():
            raise InputFileError(f"manifest not found: {path}")
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from None
        known = set(cls.__dataclass_fields__)
        extra = sorted(set(doc) - known)
        if extra:
            raise ValidationError(f"unknown manifest keys: {', '.join(extra)}")
        m = cls(**doc)
        # relative paths inside a manifest are relative to the manifest itself
        base = path.parent
        for key in ("tb_params", "synthetic_spec", "eigenvalues", "energies"):
            value = getattr(m, key)
            if value is not None and not Path(value).is_absolute():
                setattr(m, key, str(base / value))
        if not Path(m.output_dir).is_absolute():
            m.output_dir = str(base / m.output_dir)
        m.supercell = tuple(m.supercell)
        if m.window is not None:
            m.window = tuple(m.window)
        return m

    def out(self, name: str) -> str:
        return str(Path(self.output_dir) / name)

    def defaults_for(self, command: str) -> dict:
        common = {
            "build": {"stacking": self.stacking, "a": self.a, "c": self.c, "out": self.out("structure.json")},
            "supercell": {"input": self.out("structure.json"), "mult": list(self.supercell), "out": self.out("supercell.json")},
            "defect": {"input": self.out("supercell.json"), "kind": self.defect, "vacancy_site": self.vacancy_site,
                       "out": self.out("defect.json")},
            "kpath": {"a": self.a, "c": self.c, "path": self.kpath_labels, "points": self.kpath_points,
                      "out": self.out("kpath.kpt")},
            "deck": {"kpath": self.out("kpath.kpt"), "out": self.out("deck.in"), **self.deck},
            "bands": {"engine": self.engine, "params": self.tb_params, "spec": self.synthetic_spec,
                      "kpath": self.out("kpath.kpt"), "electrons": self.electrons, "out": self.out("bands.eig")},
            "analyze": {"eig": self.out("bands.eig"), "delta": self.delta,
                        "window": list(self.window) if self.window else None, "out": self.out("analysis.json")},
            "dos": {"eig": self.out("bands.eig"), "sigma": self.sigma, "grid": self.grid, "out": self.out("dos.csv")},
            "formation": {"ledger": self.energies, "out": self.out("formation.json")},
            "plot": {"eig": self.out("bands.eig"), "dos": self.out("dos.csv")},
        }
        return {k: v for k, v in common.get(command, {}).items() if v is not None}


# handlers ---------------------------------------------------------------------


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-").replace("input", "in") for n in missing)
        raise UsageError(f"missing required option(s): {flags}")


def _mkparent(path):
    Path(path).parent.mkdir(parents=True, exist_ok=True)


def cmd_build(args):
    _need(args, "out")
    s = build_polytype(args.stacking, args.a, args.c)
    s.validate()
    _mkparent(args.out)
    write_structure(s, args.out)
    if args.xyz:
        write_extxyz(s, args.xyz)
    print(f"wrote {args.out}: {len(s)} atoms ({s.count('Si')} Si, {s.count('C')} C); "
          f"Si layer classes {' '.join(layer_classes(s))}")
    return 0


def cmd_supercell(args):
    _need(args, "input", "out")
    sc = expand_supercell(read_structure(args.input), *args.mult)
    _mkparent(args.out)
    write_supercell(sc, args.out)
    print(f"wrote {args.out}: {len(sc)} atoms ({'x'.join(map(str, args.mult))} supercell)")
    return 0


def cmd_defect(args):
    _need(args, "input", "kind", "out")
    d = apply_defect(read_supercell(args.input), args.kind, args.vacancy_site)
    _mkparent(args.out)
    write_defected(d, args.out)
    print(f"wrote {args.out}: {len(d.structure)} atoms, Er concentration {doping_concentration(d):.7f} "
          f"({100 * doping_concentration(d):.2f}%)")
    print(d.log)
    return 0


def _cell_from(args):
    if getattr(args, "structure", None):
        return read_structure(args.structure).cell
    from .crystal import LatticeCell

    return LatticeCell(args.a, args.c)


def cmd_kpath(args):
    _need(args, "out")
    kp = build_kpath(_cell_from(args), args.path, args.points)
    _mkparent(args.out)
    write_kpath(kp, args.out)
    counts = " ".join(f"{a}-{b}:{n}" for a, b, n in zip(kp.vertices, kp.vertices[1:], kp.segment_counts))
    print(f"wrote {args.out}: {len(kp)} points; per segment {counts}")
    return 0


def cmd_deck(args):
    _need(args, "out")
    settings = DeckSettings(
        scf_tolerance=args.scf_tolerance, max_iterations=args.max_iterations, hubbard_U=args.hubbard_u,
        scf_kpoints=args.scf_kpoints, nscf_kpoints=args.nscf_kpoints, functional=args.functional,
        scf_kpoint_coords=tuple(args.scf_kpoint or ()),
    )
    natoms = None
    if args.structure:
        natoms = len(read_structure(args.structure))
    kp = read_kpath(args.kpath) if args.kpath else None
    _mkparent(args.out)
    write_deck(settings, args.out, structure_file=args.structure, natoms=natoms, kpath=kp)
    print(f"wrote {args.out}")
    return 0


def cmd_bands(args):
    _need(args, "kpath", "out")
    kp = read_kpath(args.kpath)
    if args.engine == "synthetic":
        _need(args, "spec")
        eig = synthesize(read_synthetic_spec(args.spec), kp)
    else:
        _need(args, "structure")
        structure = read_structure(args.structure)
        model = read_tb_model(args.params) if args.params else default_tb_model()
        eig = tb_solve(structure, model, kp, electrons=args.electrons)
    _mkparent(args.out)
    write_eigenvalues(eig, args.out)
    print(f"wrote {args.out}: {eig.nk} k-points x {eig.nbands} bands, {eig.electrons} electrons")
    return 0


def _window(args):
    if args.window:
        return tuple(args.window)
    if args.pristine:
        from .spectra import find_band_edges

        e = find_band_edges(parse_eigenvalues(args.pristine))
        return (e.vbm, e.cbm)
    return None


def cmd_analyze(args):
    _need(args, "eig")
    eig = parse_eigenvalues(args.eig)
    window = _window(args)
    result = analyze(eig, window, args.delta)
    norm = analyze(normalize_to_vbm(eig), None if window is None else
                   tuple(w - result.vbm for w in window), args.delta)
    report = {
        "file": str(args.eig),
        "electrons": eig.electrons,
        "spin_degeneracy": eig.spin_degeneracy,
        "raw": result.as_dict(),
        "vbm_normalized": norm.as_dict(),
        "gap": result.gap,
        "flat_band_window": list(window) if window else None,
        "flat_band_delta": args.delta,
        "warnings": list(eig.warnings),
    }
    if window is not None:
        near = split_by_edge(result.flat_bands, *window)
        report["flat_near_vbm"] = [f.band for f in near["vbm"]]
        report["flat_near_cbm"] = [f.band for f in near["cbm"]]
    if result.gap > 0:
        report["gap_wavelength_um"] = ev_to_wavelength(result.gap)
    if args.out:
        _mkparent(args.out)
        Path(args.out).write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    status = "" if result.has_gap else " (no positive gap)"
    print(f"gap = {result.gap:.2f} eV{status}  vbm = {result.vbm:.4f} eV  cbm = {result.cbm:.4f} eV  "
          f"occupied bands = {result.n_occ}")
    print(f"flat bands (delta {args.delta} eV): {len(result.flat_bands)}")
    for f in result.flat_bands:
        print(f"  band {f.band}: mean {f.mean:.4f} eV, width {f.bandwidth:.4f} eV")
    return 0


def cmd_dos(args):
    _need(args, "eig", "out")
    eig = parse_eigenvalues(args.eig)
    if args.normalize:
        eig = normalize_to_vbm(eig)
    lo, hi = default_window(eig, args.sigma)
    lo = args.emin if args.emin is not None else lo
    hi = args.emax if args.emax is not None else hi
    dos = compute_dos(eig, lo, hi, args.grid, args.sigma)
    _mkparent(args.out)
    write_dos_csv(dos, args.out)
    print(f"wrote {args.out}: {args.grid} points on [{lo:.4f}, {hi:.4f}] eV, sigma {args.sigma} eV")
    return 0


def cmd_formation(args):
    _need(args, "ledger")
    e_t, entries, reference = read_ledger_input(args.ledger)
    ledger = relative_formation_energies(e_t, entries, args.reference or reference)
    if args.out:
        _mkparent(args.out)
        write_ledger(ledger, args.out)
    print(format_table(ledger))
    print()
    print("stability ranking (lower E_R is more stable):")
    print(format_ranking(stability_ranking(ledger)))
    return 0


def cmd_plot(args):
    _need(args, "out")
    if args.kind == "bands":
        _need(args, "eig")
        eig = parse_eigenvalues(args.eig)
        if args.normalize:
            eig = normalize_to_vbm(eig)
        bands_svg(eig, args.out, title=args.title or "Band structure", emin=args.emin, emax=args.emax,
                  zero=0.0 if args.normalize else None)
    else:
        _need(args, "dos")
        dos_svg(read_dos_csv(args.dos), args.out, title=args.title or "Density of states")
    print(f"wrote {args.out}")
    return 0


def cmd_audit(args):
    _need(args, "log")
    report = audit_convergence(args.log, args.threshold, args.max_iterations)
    print(report.summary())
    return 0 if report.converged else EXIT_NOT_CONVERGED


def cmd_run(args):
    """Execute the full chain described by a manifest."""
    _need(args, "manifest")
    m = RunManifest.load(args.manifest)
    out = Path(m.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    structure = build_polytype(m.stacking, m.a, m.c)
    structure.validate()
    write_structure(structure, m.out("structure.json"))
    write_extxyz(structure, m.out("structure.xyz"))
    log.info("built %s: %d atoms", m.stacking, len(structure))
    sc = expand_supercell(structure, *m.supercell)
    write_supercell(sc, m.out("supercell.json"))
    log.info("supercell %s: %d atoms", "x".join(map(str, m.supercell)), len(sc))
    target = sc.structure
    if m.defect:
        d = apply_defect(sc, m.defect, m.vacancy_site)
        write_defected(d, m.out("defect.json"))
        target = d.structure
        log.info("%s", d.log)
    kp = build_kpath(target.cell, m.kpath_labels, m.kpath_points)
    write_kpath(kp, m.out("kpath.kpt"))
    settings = DeckSettings.from_dict({"nscf_kpoints": m.kpath_points, **m.deck})
    write_deck(settings, m.out("deck.in"), structure_file="defect.json" if m.defect else "supercell.json",
               natoms=len(target), kpath=kp)

    if m.engine == "external":
        if not m.eigenvalues:
            raise ValidationError("engine 'external' needs an 'eigenvalues' file in the manifest")
        eig = parse_eigenvalues(m.eigenvalues)
    elif m.engine == "synthetic":
        if not m.synthetic_spec:
            raise ValidationError("engine 'synthetic' needs a 'synthetic_spec' file in the manifest")
        eig = synthesize(read_synthetic_spec(m.synthetic_spec), kp)
    elif m.engine == "tb":
        model = read_tb_model(m.tb_params) if m.tb_params else default_tb_model()
        eig = tb_solve(target, model, kp, electrons=m.electrons)
    else:
        raise ValidationError(f"unknown band engine {m.engine!r}")
    write_eigenvalues(eig, m.out("bands.eig"))
    log.info("%s engine: %d k-points x %d bands", m.engine, eig.nk, eig.nbands)

    result = analyze(eig, m.window, m.delta)
    norm = normalize_to_vbm(eig)
    Path(m.out("analysis.json")).write_text(json.dumps({"raw": result.as_dict()}, indent=2) + "\n", encoding="utf-8")
    write_bands_csv(norm, m.out("bands.csv"))
    lo, hi = default_window(norm, m.sigma)
    dos = compute_dos(norm, lo, hi, m.grid, m.sigma)
    write_dos_csv(dos, m.out("dos.csv"))
    bands_svg(norm, m.out("bands.svg"), zero=0.0)
    dos_svg(dos, m.out("dos.svg"))
    if m.energies:
        e_t, entries, reference = read_ledger_input(m.energies)
        ledger = relative_formation_energies(e_t, entries, reference)
        write_ledger(ledger, m.out("formation.json"))
        Path(m.out("formation.txt")).write_text(
            format_table(ledger) + "\n\n" + format_ranking(stability_ranking(ledger)) + "\n", encoding="utf-8",
        )
    print(f"pipeline complete in {out}: {len(target)} atoms, {eig.nk} k-points, gap {result.gap:.2f} eV")
    return 0


def cmd_fixtures(args):
    from .fixtures import write_fixtures

    for p in write_fixtures(args.out):
        print(p)
    return 0


# parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="polydef", description=__doc__, formatter_class=_Formatter, epilog=EXIT_CODES)
    p.add_argument("--version", action="version", version=f"polydef {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", metavar="command", parser_class=_Parser)

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text, description=help_text, formatter_class=_Formatter,
                            epilog=EXIT_CODES)
        sp.set_defaults(func=func)
        sp.add_argument("--manifest", default=None, help="JSON run manifest supplying defaults")
        return sp

    sp = add("build", cmd_build, "build an ideal Si-C polytype from its stacking sequence")
    sp.add_argument("--stacking", default="ABCB", help="close-packed stacking letters")
    sp.add_argument("--a", type=float, default=DEFAULT_A, help="in-plane lattice constant (Angstrom)")
    sp.add_argument("--c", type=float, default=DEFAULT_C, help="c-axis lattice constant (Angstrom)")
    sp.add_argument("-o", "--out", default=None, help="output structure file (JSON)")
    sp.add_argument("--xyz", default=None, help="also export extended XYZ to this path")

    sp = add("supercell", cmd_supercell, "expand a structure into an n1 x n2 x n3 supercell")
    sp.add_argument("--in", dest="input", default=None, help="input structure file")
    sp.add_argument("--mult", type=int, nargs=3, default=[4, 4, 1], metavar=("N1", "N2", "N3"),
                    help="supercell multipliers")
    sp.add_argument("-o", "--out", default=None, help="output supercell file")

    sp = add("defect", cmd_defect, "place an Er defect configuration in a pristine supercell")
    sp.add_argument("--in", dest="input", default=None, help="input supercell file")
    sp.add_argument("--kind", choices=[k.value for k in DefectKind], default=None, help="defect configuration")
    sp.add_argument("--vacancy-site", type=int, default=None,
                    help="explicit index of the carbon to remove (vacancy kinds only)")
    sp.add_argument("-o", "--out", default=None, help="output defected-structure file")

    sp = add("kpath", cmd_kpath, "sample a high-symmetry path through the hexagonal Brillouin zone")
    sp.add_argument("--structure", default=None, help="take the cell from this structure file")
    sp.add_argument("--a", type=float, default=DEFAULT_A, help="lattice constant a if no structure is given")
    sp.add_argument("--c", type=float, default=DEFAULT_C, help="lattice constant c if no structure is given")
    sp.add_argument("--path", default="-".join(DEFAULT_PATH), help="vertex labels, e.g. G-M-K-G-A-L-H-A")
    sp.add_argument("--points", type=int, default=113, help="total number of k-points")
    sp.add_argument("-o", "--out", default=None, help="output k-path file")

    sp = add("deck", cmd_deck, "emit a key = value input deck for an external DFT code")
    sp.add_argument("--structure", default=None, help="structure file referenced by the deck")
    sp.add_argument("--kpath", default=None, help="k-path file for the NSCF block")
    sp.add_argument("--scf-tolerance", type=float, default=1e-4, help="SCF energy tolerance (Ry)")
    sp.add_argument("--max-iterations", type=int, default=100, help="SCF iteration cap")
    sp.add_argument("--hubbard-u", type=float, default=7.21, help="Hubbard U on Er 4f (eV)")
    sp.add_argument("--scf-kpoints", type=int, default=2, help="number of SCF k-points")
    sp.add_argument("--scf-kpoint", type=float, nargs=3, action="append", default=None, metavar=("FX", "FY", "FZ"),
                    help="SCF k-point coordinate (repeat per point); unset by default")
    sp.add_argument("--nscf-kpoints", type=int, default=113, help="number of NSCF path k-points")
    sp.add_argument("--functional", default="PBE-GGA+U", help="exchange-correlation tag")
    sp.add_argument("-o", "--out", default=None, help="output deck file")

    sp = add("bands", cmd_bands, "generate eigenvalues with a model band engine")
    sp.add_argument("--engine", choices=["tb", "synthetic"], default="tb", help="band engine")
    sp.add_argument("--structure", default=None, help="structure file (tb engine)")
    sp.add_argument("--params", default=None, help="tight-binding parameter file; bundled SiC set if omitted")
    sp.add_argument("--spec", default=None, help="synthetic band spec file (synthetic engine)")
    sp.add_argument("--kpath", default=None, help="k-path file")
    sp.add_argument("--electrons", type=int, default=None, help="override the electron count (tb engine)")
    sp.add_argument("-o", "--out", default=None, help="output eigenvalue file")

    sp = add("analyze", cmd_analyze, "band edges, gap and flat defect bands of an eigenvalue file")
    sp.add_argument("--eig", default=None, help="eigenvalue file")
    sp.add_argument("--window", type=float, nargs=2, default=None, metavar=("LO", "HI"),
                    help="energy window for flat-band detection (eV); full spectrum if omitted")
    sp.add_argument("--pristine", default=None, help="pristine eigenvalue file; its gap sets the window")
    sp.add_argument("--delta", type=float, default=DEFAULT_FLAT_DELTA, help="flat-band bandwidth threshold (eV)")
    sp.add_argument("-o", "--out", default=None, help="write a JSON report here")

    sp = add("dos", cmd_dos, "Gaussian-smeared density of states as CSV")
    sp.add_argument("--eig", default=None, help="eigenvalue file")
    sp.add_argument("--sigma", type=float, default=DEFAULT_SIGMA, help="Gaussian standard deviation (eV)")
    sp.add_argument("--grid", type=int, default=2001, help="number of energy grid points")
    sp.add_argument("--emin", type=float, default=None, help="grid start (eV); min eigenvalue - 6 sigma if omitted")
    sp.add_argument("--emax", type=float, default=None, help="grid end (eV); max eigenvalue + 6 sigma if omitted")
    sp.add_argument("--normalize", action="store_true", help="shift energies so the VBM is zero first")
    sp.add_argument("-o", "--out", default=None, help="output CSV")

    sp = add("formation", cmd_formation, "relative formation energies and stability ranking")
    sp.add_argument("--ledger", default=None, help="ledger JSON with pristine_E_T and entries (eV/atom)")
    sp.add_argument("--reference", default=None,
                    help="reference configuration; lowest per-atom energy if omitted")
    sp.add_argument("-o", "--out", default=None, help="write the completed ledger JSON here")

    sp = add("plot", cmd_plot, "SVG band-structure or DOS plot")
    sp.add_argument("--kind", choices=["bands", "dos"], default="bands", help="plot type")
    sp.add_argument("--eig", default=None, help="eigenvalue file (bands)")
    sp.add_argument("--dos", default=None, help="DOS CSV (dos)")
    sp.add_argument("--normalize", action="store_true", help="shift energies so the VBM is zero (bands)")
    sp.add_argument("--emin", type=float, default=None, help="lower energy limit (bands)")
    sp.add_argument("--emax", type=float, default=None, help="upper energy limit (bands)")
    sp.add_argument("--title", default=None, help="plot title")
    sp.add_argument("-o", "--out", default=None, help="output SVG")

    sp = add("audit", cmd_audit, "check an SCF log of 'iter <n> dE <value> Ry' lines for convergence")
    sp.add_argument("--log", default=None, help="convergence log file")
    sp.add_argument("--threshold", type=float, default=1e-4, help="residual threshold (Ry), strict")
    sp.add_argument("--max-iterations", type=int, default=100, help="iteration cap")

    sp = add("run", cmd_run, "run the full pipeline from a manifest")

    sp = add("fixtures", cmd_fixtures, "regenerate the bundled synthetic eigenvalue fixtures")
    sp.add_argument("-o", "--out", default="fixtures", help="output directory")
    return p


def _apply_manifest(parser, argv):
    """Re-parse with manifest values installed as subcommand defaults."""
    args = parser.parse_args(argv)
    if not getattr(args, "manifest", None) or args.command == "run":
        return args
    manifest = RunManifest.load(args.manifest)
    defaults = manifest.defaults_for(args.command)
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    sub.choices[args.command].set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_manifest(parser, argv)
        if args.verbose:
            logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s")
        if not getattr(args, "func", None):
            parser.print_help()
            return EXIT_USAGE
        return args.func(args)
    except PolydefError as exc:
        _fail(exc.exit_code, exc.kind, str(exc))
        return exc.exit_code
    except OSError as exc:
        _fail(InputFileError.exit_code, InputFileError.kind, str(exc))
        return InputFileError.exit_code
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to exit 1
        _fail(1, "internal", f"{type(exc).__name__}: {exc}")
        return 1


def _fail(code, kind, message):
    msg = json.dumps(" ".join(str(message).split()), ensure_ascii=False)
    print(f"polydef: error code={code} kind={kind} message={msg}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())

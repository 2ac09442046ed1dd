import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polydef.crystal import (
    AtomSite,
    CrystalStructure,
    DegenerateQueryWarning,
    LatticeCell,
    StackingSequence,
    all_stackings,
    build_polytype,
    classify_sites,
    distances_from,
    interatomic_distance,
    layer_classes,
    minimum_distance,
    read_structure,
    structure_to_dict,
    write_extxyz,
    write_structure,
)
from polydef.defects import expand_supercell
from polydef.errors import ParseError, ValidationError


def brute_stackings(n):
    out = []
    for code in range(3 ** n):
        letters = []
        for _ in range(n):
            letters.append("ABC"[code % 3])
            code //= 3
        letters = letters[::-1]
        if all(letters[i] != letters[(i + 1) % n] for i in range(n)):
            out.append("".join(letters))
    return sorted(out)


def brute_class(seq, i):
    n = len(seq)
    return "h" if seq[i - 1] == seq[(i + 1) % n] else "k"


@pytest.mark.parametrize("n", range(2, 9))
def test_stacking_enumeration_matches_brute_force(n):
    got = list(all_stackings(n))
    assert sorted(got) == brute_stackings(n)
    # proper 3-colourings of an n-cycle
    assert len(got) == 2 ** n + 2 * (-1) ** n


@pytest.mark.parametrize("n", range(2, 9))
def test_every_enumerated_stacking_builds_and_classifies(n):
    for seq in all_stackings(n):
        s = build_polytype(seq)
        assert len(s) == 2 * n
        assert layer_classes(s) == [brute_class(seq, i) for i in range(n)]
        assert classify_sites(s) == s


def test_abcb_geometry(cell8):
    assert len(cell8) == 8
    assert cell8.count("Si") == 4 and cell8.count("C") == 4
    assert layer_classes(cell8) == ["h", "k", "h", "k"]
    assert layer_classes(cell8, "C") == ["h", "k", "h", "k"]
    cell8.validate()
    assert cell8.cell.volume == pytest.approx(3.09 ** 2 * math.sqrt(3) / 2 * 10.08, rel=1e-12)


def test_known_polytypes():
    assert layer_classes(build_polytype("AB")) == ["h", "h"]
    assert layer_classes(build_polytype("ABC")) == ["k", "k", "k"]
    assert layer_classes(build_polytype("ABCACB")) == ["h", "k", "k", "h", "k", "k"]


def test_nearest_si_c_distance(cell8):
    d = distances_from(cell8, 0)
    c_idx = [i for i, sp in enumerate(cell8.species) if sp == "C"]
    assert min(d[c_idx]) == pytest.approx(3 * 10.08 / 16, abs=1e-12)
    assert minimum_distance(cell8) == pytest.approx(1.89, abs=1e-12)


@pytest.mark.parametrize("seq", ["AB", "ABC", "ABCB", "ABCACB"])
def test_ideal_ratio_gives_equal_bonds(seq):
    # with c/a = n*sqrt(2/3) every Si has four C neighbours at the same distance
    a = 3.08
    # 3x3 in-plane so the three basal neighbours are distinct sites
    s = expand_supercell(build_polytype(seq, a, len(seq) * a * math.sqrt(2.0 / 3.0)), 3, 3, 1).structure
    c_idx = np.array([i for i, sp in enumerate(s.species) if sp == "C"])
    for i, sp in enumerate(s.species):
        if sp != "Si":
            continue
        d = np.sort(distances_from(s, i)[c_idx])
        assert np.ptp(d[:4]) < 1e-6
        assert d[4] - d[3] > 0.5


def test_distance_symmetry_and_self_warning(cell8):
    for i in range(len(cell8)):
        for j in range(len(cell8)):
            if i != j:
                assert interatomic_distance(cell8, i, j) == pytest.approx(interatomic_distance(cell8, j, i), abs=1e-12)
    with pytest.warns(DegenerateQueryWarning):
        assert interatomic_distance(cell8, 3, 3) == 0.0
    with pytest.raises(IndexError):
        interatomic_distance(cell8, 0, 99)


@given(st.integers(-2, 2), st.integers(-2, 2), st.integers(-2, 2))
def test_distance_invariant_under_lattice_translation(n1, n2, n3):
    s = build_polytype("ABCB")
    frac = s.frac_array()
    shift = np.array([n1, n2, n3], float)
    d0 = interatomic_distance(s, 0, 5)
    lat = s.cell.matrix
    moved = (frac[5] + shift) - frac[0]
    # brute force over a wide image range
    best = min(np.linalg.norm((moved + np.array([i, j, k])) @ lat)
               for i in range(-4, 5) for j in range(-4, 5) for k in range(-4, 5))
    assert d0 == pytest.approx(best, abs=1e-12)


@pytest.mark.parametrize("bad, fragment", [
    ("ABBA", "index 2"), ("ABA", "index 0"), ("ABX", "'X'"), ("A", "at least 2"),
])
def test_invalid_stacking_names_the_problem(bad, fragment):
    with pytest.raises(ValidationError, match=fragment):
        StackingSequence.parse(bad)


def test_atom_site_validation():
    with pytest.raises(ValidationError):
        AtomSite("Xx", (0, 0, 0))
    with pytest.raises(ValidationError):
        AtomSite("Si", (1.0, 0, 0))
    with pytest.raises(ValidationError):
        AtomSite("Si", (0, 0, 0), site_class="q")
    with pytest.raises(ValidationError):
        LatticeCell(-1, 2)


def test_validate_rejects_overlap_and_bad_stoichiometry():
    cell = LatticeCell(3.09, 10.08)
    s = CrystalStructure(cell, [AtomSite("Si", (0, 0, 0)), AtomSite("C", (0, 0, 0.05))])
    with pytest.raises(ValidationError, match="minimum interatomic distance"):
        s.validate()
    s = build_polytype("AB")
    broken = CrystalStructure(s.cell, s.sites[:3], s.stacking)
    with pytest.raises(ValidationError, match="equal Si and C"):
        broken.validate()


def test_classify_without_stacking_fails(cell8):
    bare = CrystalStructure(cell8.cell, cell8.sites, None)
    with pytest.raises(ValidationError):
        classify_sites(bare)


def _rounded(s):
    return structure_to_dict(s)


@settings(max_examples=60)
@given(
    st.sampled_from([s for n in range(2, 7) for s in all_stackings(n)]),
    st.floats(2.5, 4.0, allow_nan=False),
    st.floats(4.0, 30.0, allow_nan=False),
    st.lists(st.tuples(st.sampled_from(["Si", "C", "Er", "Ge"]),
                       st.tuples(*[st.floats(0, 1, exclude_max=True)] * 3)), max_size=4),
)
def test_structure_roundtrip(tmp_path_factory, seq, a, c, extra):
    s = build_polytype(seq, a, c)
    sites = s.sites + tuple(AtomSite(sp, f) for sp, f in extra)
    s = CrystalStructure(s.cell, sites, s.stacking)
    p = tmp_path_factory.mktemp("rt") / "s.json"
    write_structure(s, p)
    back = read_structure(p)
    assert _rounded(back) == _rounded(s)
    text = p.read_text()
    write_structure(back, p)
    assert p.read_text() == text
    # a second pass is exact
    assert read_structure(p) == back


def test_parse_errors_carry_line_numbers(tmp_path, cell8):
    p = tmp_path / "s.json"
    write_structure(cell8, p)
    lines = p.read_text().splitlines()
    idx = next(i for i, ln in enumerate(lines) if '"Si"' in ln)
    lines[idx] = lines[idx].replace('"Si"', '"Qq"')
    p.write_text("\n".join(lines))
    with pytest.raises(ParseError, match=f"line {idx + 1}"):
        read_structure(p)
    p.write_text('{"cell": {"a": 3.0,, }')
    with pytest.raises(ParseError, match="line 1, column"):
        read_structure(p)


def test_extxyz_export(tmp_path, cell8):
    p = tmp_path / "s.xyz"
    write_extxyz(cell8, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "8"
    assert 'Lattice="3.0900000000' in lines[1]
    assert len(lines) == 10 and lines[2].split()[0] == "Si"


def test_no_warnings_on_normal_build():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        build_polytype("ABCB").validate()

import numpy as np
import pytest
from hypothesis import given, strategies as st

from polydef.crystal import build_polytype, distances_from, read_structure, write_structure
from polydef.defects import (
    DefectConfiguration,
    DefectKind,
    apply_defect,
    doping_concentration,
    expand_supercell,
    first_shell,
    nearest_neighbor,
    read_defected,
    read_supercell,
    select_site,
    write_defected,
    write_supercell,
)
from polydef.errors import NotFoundError, ValidationError


def test_supercell_counts_and_uniqueness(supercell128):
    s = supercell128.structure
    assert len(s) == 128
    assert s.count("Si") == 64 and s.count("C") == 64
    # every position is distinct modulo the supercell lattice
    frac = s.frac_array()
    keys = {tuple(np.round(f % 1.0, 9) % 1.0) for f in frac}
    assert len(keys) == 128
    assert s.cell.a == pytest.approx(4 * 3.09)
    assert s.cell.c == pytest.approx(10.08)
    s.validate()


def test_supercell_preserves_local_environment(cell8, supercell128):
    # the 6 shortest distances around an image equal those around its parent
    s = supercell128.structure
    for n in (0, 17, 90):
        p = supercell128.parent_index[n]
        d_parent = np.sort(distances_from(expand_supercell(cell8, 3, 3, 1).structure, p * 9))[1:7]
        d_image = np.sort(distances_from(s, n))[1:7]
        assert np.allclose(d_parent, d_image, atol=1e-9)


@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 2))
def test_supercell_multiplicity(n1, n2, n3):
    base = build_polytype("ABC")
    sc = expand_supercell(base, n1, n2, n3)
    assert len(sc) == len(base) * n1 * n2 * n3
    assert np.bincount(sc.parent_index).tolist() == [n1 * n2 * n3] * len(base)
    assert sc.structure.cell.volume == pytest.approx(base.cell.volume * n1 * n2 * n3)
    assert len(sc.structure.stacking) == 3 * n3


def test_bad_multipliers(cell8):
    for m in [(0, 1, 1), (1, -2, 1), (1.5, 1, 1)]:
        with pytest.raises(ValidationError):
            expand_supercell(cell8, *m)


def centre_oracle(structure, species, cls):
    centre = 0.5 * structure.cell.matrix.sum(axis=0)
    best = None
    for n, site in enumerate(structure.sites):
        if site.species != species or site.site_class != cls:
            continue
        d = float(np.linalg.norm(np.array(site.frac) @ structure.cell.matrix - centre))
        if best is None or d < best[1] - 1e-6:
            best = (n, d)
    return best[0]


@pytest.mark.parametrize("kind", list(DefectKind))
def test_defect_placement(supercell128, kind):
    d = apply_defect(supercell128, kind)
    s = d.structure
    assert s.count("Er") == 1
    assert d.substituted_site == centre_oracle(supercell128.structure, "Si", kind.site_class)
    assert supercell128.structure.sites[d.substituted_site].site_class == kind.site_class
    assert doping_concentration(d) == 0.0078125
    assert round(100 * doping_concentration(d), 2) == 0.78
    if kind.has_vacancy:
        assert len(s) == 127 and s.count("C") == 63
        shell = first_shell(supercell128.structure, d.substituted_site, "C")
        assert len(shell) == 4
        assert d.removed_site in shell
        assert "removed C" in d.log
    else:
        assert len(s) == 128 and d.removed_site is None
    assert f"site {d.substituted_site}" in d.log


def test_vacancy_is_axial_neighbour(supercell128):
    d = apply_defect(supercell128, "ErHV")
    base = supercell128.structure
    idx, dist = nearest_neighbor(base, d.substituted_site, "C")
    assert idx == d.removed_site
    assert dist == pytest.approx(1.89, abs=1e-9)
    v = (np.array(base.sites[idx].frac) - np.array(base.sites[d.substituted_site].frac))
    v -= np.round(v)
    cart = v @ base.cell.matrix
    assert abs(cart[2]) / np.linalg.norm(cart) == pytest.approx(1.0)


def test_vacancy_override(supercell128):
    auto = apply_defect(supercell128, "ErKV")
    shell = first_shell(supercell128.structure, auto.substituted_site, "C")
    other = next(n for n in shell if n != auto.removed_site)
    d = apply_defect(supercell128, "ErKV", vacancy_site=other)
    assert d.removed_site == other and "user override" in d.log
    with pytest.raises(ValidationError):
        apply_defect(supercell128, "ErKV", vacancy_site=auto.substituted_site)
    with pytest.raises(ValidationError):
        apply_defect(supercell128, "ErK", vacancy_site=other)


def test_defect_preconditions(supercell128):
    d = apply_defect(supercell128, "ErH")
    with pytest.raises(ValidationError):
        apply_defect(d, "ErK")
    with pytest.raises(ValidationError):
        apply_defect(d.structure, "ErK")
    with pytest.raises(ValidationError, match="unknown defect kind"):
        DefectConfiguration("ErX")
    with pytest.raises(ValidationError):
        expand_supercell(d.structure, 2, 1, 1)
    with pytest.raises(ValidationError):
        doping_concentration(supercell128.structure)


def test_missing_site_class():
    s = build_polytype("ABC")  # all k
    with pytest.raises(NotFoundError):
        select_site(s, "Si", "h")


def test_supercell_and_defect_roundtrip(tmp_path, supercell128, cell8):
    p = tmp_path / "sc.json"
    write_supercell(supercell128, p)
    back = read_supercell(p)
    assert back.multipliers == (4, 4, 1) and back.parent_index == supercell128.parent_index
    text = p.read_text()
    write_supercell(back, p)
    assert p.read_text() == text
    q = tmp_path / "plain.json"
    write_structure(cell8, q)
    assert read_supercell(q).multipliers == (1, 1, 1)
    for kind in DefectKind:
        d = apply_defect(back, kind)
        f = tmp_path / f"{kind.value}.json"
        write_defected(d, f)
        r = read_defected(f)
        assert (r.config, r.substituted_site, r.removed_site, r.log, r.pristine_count) == (
            d.config, d.substituted_site, d.removed_site, d.log, d.pristine_count)
        assert len(read_structure(f)) == len(d.structure)
        with pytest.raises(ValidationError):
            read_supercell(f)

import pytest

from polydef.fixtures import (
    EXPECTED_LEVELS,
    FIXTURE_NAMES,
    HOST_CBM,
    HOST_VBM,
    REPORTED_GAPS,
    fixture_path,
    fixture_spec,
    load_fixture,
    write_fixtures,
)
from polydef.spectra import analyze, find_band_edges, normalize_to_vbm, split_by_edge


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_gap_is_exact(name):
    eig = normalize_to_vbm(load_fixture(name))
    r = find_band_edges(eig)
    assert r.vbm == 0.0
    assert r.gap == REPORTED_GAPS[name]
    assert round(r.gap, 2) == REPORTED_GAPS[name]


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_flat_levels_near_each_edge(name):
    eig = load_fixture(name)
    r = analyze(eig, (HOST_VBM, HOST_CBM))
    near = split_by_edge(r.flat_bands, HOST_VBM, HOST_CBM)
    assert (len(near["vbm"]), len(near["cbm"])) == EXPECTED_LEVELS[name]
    assert all(f.bandwidth < 0.2 for f in r.flat_bands)


def test_closed_form_agrees_with_sampled_edges():
    for name in FIXTURE_NAMES:
        vbm, cbm = fixture_spec(name).closed_form_edges()
        r = find_band_edges(load_fixture(name))
        assert (r.vbm, r.cbm) == (vbm, cbm)


def test_regenerated_fixtures_are_byte_identical(tmp_path):
    for p in write_fixtures(tmp_path):
        bundled = fixture_path(p.name.split(".")[0]).with_name(p.name)
        assert p.read_bytes() == bundled.read_bytes(), p.name

import json

import pytest
from hypothesis import given, settings, strategies as st

from polydef.energetics import (
    default_reference,
    format_ranking,
    format_table,
    per_atom,
    read_ledger,
    read_ledger_input,
    relative_formation_energies,
    stability_ranking,
    write_ledger,
)
from polydef.errors import ParseError, ValidationError

# per-atom energies whose differences reproduce the published relative values
TABLE = {"Er_h": -7.5185, "Er_k": -9.0, "Er_hV": -7.6596, "Er_kV": -7.6598}
EXPECTED = {"Er_h": "-1.4815", "Er_k": "0.0000", "Er_hV": "-1.3404", "Er_kV": "-1.3402"}


def test_table_values():
    ledger = relative_formation_energies(-7.9, TABLE)
    assert ledger.reference == "Er_k"
    assert {k: f"{v:.4f}" for k, v in ledger.results.items()} == EXPECTED
    assert ledger.results["Er_k"] == 0.0
    ranking = stability_ranking(ledger)
    assert [r.name for r in ranking] == ["Er_h", "Er_hV", "Er_kV", "Er_k"]
    assert ranking[2].gap_to_previous == pytest.approx(0.0002)
    assert not any(r.tied for r in ranking)


def test_formatting():
    ledger = relative_formation_energies(-7.9, TABLE)
    table = format_table(ledger)
    assert "Er_k                         0.0000  (reference)" in table
    assert table.splitlines()[2].split() == ["Er_h", "-1.4815"]
    assert format_ranking(stability_ranking(ledger)).splitlines()[0] == "1. Er_h: -1.4815"


energy = st.floats(-50, 50, allow_nan=False)


@settings(max_examples=100)
@given(st.floats(-1e3, 1e3, allow_nan=False))
def test_translation_invariance(offset):
    base = relative_formation_energies(-7.9, TABLE)
    moved = relative_formation_energies(-7.9 + offset, {k: v + offset for k, v in TABLE.items()})
    assert moved.reference == base.reference
    for k in TABLE:
        assert moved.results[k] == pytest.approx(base.results[k], abs=1e-9)


@given(energy, st.dictionaries(st.sampled_from(["a", "b", "c", "d", "e"]), energy, min_size=1))
def test_reference_is_zero_and_minimum(e_t, entries):
    ledger = relative_formation_energies(e_t, entries)
    assert ledger.results[ledger.reference] == 0.0
    assert entries[ledger.reference] == min(entries.values())
    # the most negative energy as reference leaves every other E_R at or below zero
    assert all(v <= 1e-9 for v in ledger.results.values())
    for k, v in ledger.results.items():
        assert v == pytest.approx(entries[ledger.reference] - entries[k], abs=1e-9)


def test_explicit_reference_and_errors():
    ledger = relative_formation_energies(-7.9, TABLE, reference="Er_h")
    assert ledger.results["Er_h"] == 0.0
    assert ledger.results["Er_k"] == pytest.approx(1.4815)
    with pytest.raises(ValidationError, match="not among"):
        relative_formation_energies(-7.9, TABLE, reference="Er_x")
    with pytest.raises(ValidationError, match="duplicate"):
        relative_formation_energies(-7.9, [("a", 1.0), ("a", 2.0)])
    with pytest.raises(ValidationError):
        relative_formation_energies(-7.9, {})


def test_ties_are_flagged():
    ledger = relative_formation_energies(0.0, {"a": -1.0, "b": -2.0, "c": -2.0})
    ranking = stability_ranking(ledger)
    assert default_reference(ledger.entries) == "b"
    assert [r.tied for r in ranking] == [False, True, True]


def test_per_atom():
    assert per_atom(-1011.2, 128) == pytest.approx(-7.9)
    with pytest.raises(ValidationError):
        per_atom(1.0, 0)


def test_duplicate_keys_in_file(tmp_path):
    p = tmp_path / "l.json"
    p.write_text('{"pristine_E_T": -7.9, "entries": {"a": -1.0, "a": -2.0}}')
    with pytest.raises(ValidationError, match="duplicate"):
        read_ledger_input(p)
    p.write_text('{"pristine_E_T": -7.9,\n "entries": }')
    with pytest.raises(ParseError, match="line 2"):
        read_ledger_input(p)


@settings(max_examples=60)
@given(energy, st.dictionaries(st.text("abcdefgh_", min_size=1, max_size=6), energy, min_size=1, max_size=6))
def test_ledger_roundtrip(tmp_path_factory, e_t, entries):
    ledger = relative_formation_energies(e_t, entries)
    p = tmp_path_factory.mktemp("ledger") / "l.json"
    write_ledger(ledger, p)
    back = read_ledger(p)
    assert back == ledger
    assert json.loads(p.read_text())["results"] == ledger.results

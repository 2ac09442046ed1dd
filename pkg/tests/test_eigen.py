import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp

from polydef.errors import InputFileError, ParseError, StructuralError, ValidationError
from polydef.spectra.eigen import EigenvalueSet, format_eigenvalues, parse_eigenvalue_text, parse_eigenvalues, write_eigenvalues

SMALL = """# nk=2 nbands=3 electrons=2 spin=2 units=eV
k 1 0.0 0.0 0.0 0.5
-1.0 0.5 2.0
k 2 0.5 0.0 0.0 0.5
-1.2
0.4 1.9
"""


def test_parse_small_file_with_wrapping():
    eig = parse_eigenvalue_text(SMALL)
    assert eig.nk == 2 and eig.nbands == 3 and eig.electrons == 2
    assert eig.bands.tolist() == [[-1.0, 0.5, 2.0], [-1.2, 0.4, 1.9]]
    assert eig.weights_normalized
    assert eig.s is None and eig.labels is None


def test_missing_band_names_the_k_index():
    text = SMALL.replace("0.4 1.9", "0.4")
    with pytest.raises(StructuralError, match="k index 2 has 2 bands, expected 3"):
        parse_eigenvalue_text(text)
    text = SMALL.replace("-1.0 0.5 2.0", "-1.0 0.5")
    with pytest.raises(StructuralError, match="k index 1 has 2 bands"):
        parse_eigenvalue_text(text)


def test_non_numeric_token_reports_line_and_column():
    text = SMALL.replace("0.4 1.9", "0.4 abc")
    with pytest.raises(ParseError, match=r"line 6, column 5: cannot parse 'abc'"):
        parse_eigenvalue_text(text)


@pytest.mark.parametrize("mutate, match", [
    (lambda t: t.replace("nk=2", "nk=3"), "nk=3"),
    (lambda t: t.replace("k 2 ", "k 7 "), "out of sequence"),
    (lambda t: t.replace("-1.2\n", "-1.2 5 6 7\n"), "more than nbands"),
    (lambda t: t.split("\n", 1)[1], "header"),
    (lambda t: t.replace("units=eV", "units=Ry"), "units"),
    (lambda t: t.replace("0.5\n-1.0", "0.0\n-1.0", 1), "weights must be positive"),
])
def test_structural_errors(mutate, match):
    with pytest.raises(ParseError, match=match):
        parse_eigenvalue_text(mutate(SMALL))


def test_unsorted_eigenvalues_are_sorted_with_warning(caplog):
    eig = parse_eigenvalue_text(SMALL.replace("-1.0 0.5 2.0", "2.0 -1.0 0.5"))
    assert eig.bands[0].tolist() == [-1.0, 0.5, 2.0]
    assert eig.warnings and "k index 1" in eig.warnings[0]


def test_missing_file(tmp_path):
    with pytest.raises(InputFileError):
        parse_eigenvalues(tmp_path / "none.eig")


def test_eigenvalue_set_validation():
    with pytest.raises(ValidationError):
        EigenvalueSet(np.zeros((1, 3)), [1.0], [[1.0, 0.0]], 2)
    with pytest.raises(ValidationError):
        EigenvalueSet(np.zeros((1, 3)), [1.0], [[0.0, 1.0]], 2, spin_degeneracy=3)
    eig = EigenvalueSet(np.zeros((1, 3)), [1.0], [[0.0, 1.0]], 2)
    with pytest.raises(ValueError):
        eig.bands[0, 0] = 5.0


finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False, width=64)


@st.composite
def eigen_sets(draw):
    nk = draw(st.integers(1, 12))
    nb = draw(st.integers(1, 14))
    bands = np.sort(draw(hnp.arrays(float, (nk, nb), elements=finite)), axis=1)
    frac = draw(hnp.arrays(float, (nk, 3), elements=st.floats(-1, 1, allow_nan=False)))
    weights = draw(hnp.arrays(float, nk, elements=st.floats(1e-6, 1.0)))
    spin = draw(st.sampled_from([1, 2]))
    electrons = draw(st.integers(0, 2 * nb))
    s = draw(st.none() | st.just(np.cumsum(np.arange(nk, dtype=float) * 0.1)))
    labels = draw(st.none() | st.lists(st.sampled_from([None, "Γ", "M", "K"]), min_size=nk, max_size=nk))
    if labels is not None and not any(labels):
        labels = None
    ref = draw(st.sampled_from([None, "VBM"]))
    return EigenvalueSet(frac, weights, bands, electrons, spin, ref, s, labels)


@settings(max_examples=80)
@given(eigen_sets())
def test_eigenvalue_roundtrip(tmp_path_factory, eig):
    p = tmp_path_factory.mktemp("eig") / "x.eig"
    write_eigenvalues(eig, p)
    back = parse_eigenvalues(p)
    assert back.same_as(eig)
    assert format_eigenvalues(back) == p.read_text()

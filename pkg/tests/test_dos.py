import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polydef.errors import ValidationError
from polydef.fixtures import HOST_CBM, HOST_VBM, load_fixture
from polydef.spectra import compute_dos
from polydef.spectra.dos import default_window
from polydef.spectra.eigen import EigenvalueSet


def reference_dos(eig, energies, sigma):
    out = []
    for e in energies:
        total = 0.0
        for k in range(eig.nk):
            for x in eig.bands[k]:
                total += eig.spin_degeneracy * eig.weights[k] * math.exp(-0.5 * ((e - x) / sigma) ** 2)
        out.append(total / (sigma * math.sqrt(2 * math.pi)))
    return np.array(out)


@st.composite
def synthetic_sets(draw):
    nk = draw(st.integers(1, 8))
    nb = draw(st.integers(1, 6))
    bands = np.sort(np.array(draw(st.lists(st.lists(st.floats(-5, 5), min_size=nb, max_size=nb),
                                           min_size=nk, max_size=nk))), axis=1)
    w = np.array(draw(st.lists(st.floats(0.05, 1.0), min_size=nk, max_size=nk)))
    spin = draw(st.sampled_from([1, 2]))
    return EigenvalueSet(np.zeros((nk, 3)), w, bands, 0, spin)


@settings(max_examples=60)
@given(synthetic_sets(), st.floats(0.02, 0.3))
def test_integral_counts_states(eig, sigma):
    lo, hi = default_window(eig, sigma)
    n = int(math.ceil((hi - lo) / (sigma / 5))) + 1
    dos = compute_dos(eig, lo, hi, n, sigma)
    expected = eig.spin_degeneracy * eig.nbands * eig.weights.sum()
    assert abs(dos.integral() - expected) <= 1e-6 * expected


@settings(max_examples=30)
@given(synthetic_sets(), synthetic_sets())
def test_linearity(a, b):
    # states of two sets on a common k-grid add up
    nk = min(a.nk, b.nk)
    w = np.full(nk, 1.0 / nk)
    ea = EigenvalueSet(np.zeros((nk, 3)), w, a.bands[:nk], 0, 2)
    eb = EigenvalueSet(np.zeros((nk, 3)), w, b.bands[:nk], 0, 2)
    both = EigenvalueSet(np.zeros((nk, 3)), w, np.sort(np.hstack([ea.bands, eb.bands]), axis=1), 0, 2)
    args = (-7.0, 7.0, 301, 0.1)
    assert np.allclose(compute_dos(both, *args).values,
                       compute_dos(ea, *args).values + compute_dos(eb, *args).values, rtol=1e-12, atol=1e-14)


def test_matches_explicit_sum():
    eig = load_fixture("er_hv")
    grid = np.linspace(-1.0, 3.0, 41)
    dos = compute_dos(eig, -1.0, 3.0, 41, 0.05)
    assert np.allclose(dos.values, reference_dos(eig, grid, 0.05), rtol=1e-12, atol=1e-300)


def test_gap_tail_follows_gaussian_bound():
    eig = load_fixture("pristine")
    sigma = 0.05
    dos = compute_dos(eig, HOST_VBM, HOST_CBM, 2231, sigma)
    d_edge = np.minimum(dos.grid - HOST_VBM, HOST_CBM - dos.grid)
    total = eig.spin_degeneracy * eig.nbands * eig.weights.sum()
    bound = total * np.exp(-0.5 * (d_edge / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
    assert np.all(dos.values <= bound * (1 + 1e-12))
    # a unit-area Gaussian drops below 1e-8 states/eV only about 7 sigma out
    assert dos.values[d_edge >= 7 * sigma].max() < 1e-8
    assert dos.values[d_edge >= 4 * sigma].max() > 1e-8


def test_thread_count_does_not_change_bits():
    eig = load_fixture("er_kv")
    a = compute_dos(eig, -7, 8, 3001, 0.05, threads=1)
    b = compute_dos(eig, -7, 8, 3001, 0.05, threads=5)
    assert a.values.tobytes() == b.values.tobytes()


@pytest.mark.parametrize("args", [(-1, 1, 10, 0.0), (1, -1, 10, 0.1), (-1, 1, 1, 0.1)])
def test_bad_arguments(args):
    eig = load_fixture("pristine")
    with pytest.raises(ValidationError):
        compute_dos(eig, *args)

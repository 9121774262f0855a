import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from biasrank.gfcore import Subspace, UsageError, forms_kernel
from biasrank.harness.generators import SplitMix64, random_subset, random_subspace
from biasrank.sumset import (
    GroupSubset,
    bogolyubov_search,
    fourier_coefficients,
    gamma_schedule,
    rep_counts,
    rep_counts_fft,
    spectrum,
    verify_containment,
)

seeds = st.integers(0, 2**40)


def test_rep_counts_of_nonzero_residues():
    E = GroupSubset.from_points(5, 1, [(1,), (2,), (3,), (4,)])
    assert rep_counts(E, 1).counts.tolist() == [4, 3, 3, 3, 3]


def test_rep_counts_total_mass():
    E = random_subset(SplitMix64(2), 3, 3, 0.4)
    for b in (1, 2):
        assert sum(rep_counts(E, b).counts) == E.size ** (2 * b)


@given(seeds, st.sampled_from([(5, 2), (3, 3)]), st.integers(1, 3))
def test_fft_counts_equal_exact_counts(seed, shape, b):
    p, n = shape
    E = random_subset(SplitMix64(seed), p, n, 0.3)
    counts, gap = rep_counts_fft(E, b)
    assert gap < 0.25
    assert counts.tolist() == [int(c) for c in rep_counts(E, b).counts]


def test_spectrum_of_the_full_group():
    assert spectrum(GroupSubset.full(5, 2), 0.01) == [(0, 0)]


def test_spectrum_of_a_subspace_is_its_annihilator():
    U = Subspace.span(5, 3, [(1, 2, 0)])
    spec = spectrum(GroupSubset.from_subspace(U), 1.0)
    assert forms_kernel(5, 3, spec) == U
    assert len(spec) == 25


@given(seeds)
def test_chang_bound_on_random_halves(seed):
    E = random_subset(SplitMix64(seed), 5, 3, 0.5)
    assert len(spectrum(E, (0.5 / 2) ** 0.5)) <= 8


def test_parseval():
    E = random_subset(SplitMix64(4), 5, 2, 0.4)
    assert np.sum(fourier_coefficients(E) ** 2) == pytest.approx(25 * E.size)


def test_bogolyubov_on_nonzero_residues():
    E = GroupSubset.from_points(5, 1, [(1,), (2,), (3,), (4,)])
    res = bogolyubov_search(E)
    assert res.b == 1 and res.U == Subspace.full(5, 1) and res.min_reps == 3


@given(seeds)
def test_bogolyubov_on_a_subspace_returns_it(seed):
    W = random_subspace(SplitMix64(seed), 5, 3, 1)
    res = bogolyubov_search(GroupSubset.from_subspace(W))
    assert res.U == W and res.b == 1


@given(seeds)
def test_returned_subspaces_are_contained(seed):
    rng = SplitMix64(seed)
    E = random_subset(rng, 5, 3, 0.2 + 0.4 * rng.below(1001) / 1000)
    res = bogolyubov_search(E)
    if res is not None:
        assert res.b <= 3 and res.U.codim <= 3
        assert verify_containment(E, res.b, res.U) == res.min_reps > 0


def test_gamma_schedule():
    assert gamma_schedule(0.5, 1) == pytest.approx(0.25)
    assert gamma_schedule(0.5, 2) == pytest.approx(0.5)


def test_empty_set_is_rejected():
    with pytest.raises(UsageError):
        bogolyubov_search(GroupSubset.from_indices(5, 2, []))
    with pytest.raises(UsageError):
        rep_counts(GroupSubset.full(3, 1), 4)

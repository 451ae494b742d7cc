"""Shared test helpers: independent oracles kept free of package internals."""

import itertools

import numpy as np
import pytest


def signed_permutation_match(components: np.ndarray, sources: np.ndarray):
    """Exhaustive signed-permutation oracle.

    Searches all q! * 2^q (permutation, sign) assignments for the one
    minimizing the total squared error between unit-normalized rows. For
    unit rows the error of one pair is 2 - 2 * sign * corr, so the search
    runs on the signed correlation matrix.

    Returns (perm, signs, corrs) where perm[i] is the source row matched
    to component i and corrs are the matched |correlations|.
    """
    q = components.shape[0]
    comp = components / np.linalg.norm(components, axis=1, keepdims=True)
    src = sources / np.linalg.norm(sources, axis=1, keepdims=True)
    corr = comp @ src.T
    best_err = np.inf
    best = None
    for perm in itertools.permutations(range(q)):
        for signs in itertools.product((1.0, -1.0), repeat=q):
            err = sum(2.0 - 2.0 * signs[i] * corr[i, perm[i]] for i in range(q))
            if err < best_err:
                best_err = err
                best = (perm, signs)
    perm, signs = best
    corrs = np.array([abs(corr[i, perm[i]]) for i in range(q)])
    return perm, signs, corrs


@pytest.fixture
def rng():
    return np.random.default_rng(20250809)

"""Privacy metrics: cell-entropy and transition-entropy.

Cell-entropy scores a single location set by the spread of its cells' query
probabilities.  Transition-entropy scores how well a set hides the real
location once the adversary conditions on the previously submitted sets,
propagating a posterior over set members through within-set transition
probabilities.  All vectors returned here are aligned index-for-index with
the cells of the location set they describe.
"""

from __future__ import annotations

import numpy as np

from .grid import (
    HistoryModel,
    LocationSet,
    normalize_transition_rows,
    normalized_priors,
    query_probability,
)


def entropy(p: np.ndarray) -> float:
    """Shannon entropy in bits, with the convention 0 * log2(0) = 0."""
    p = np.asarray(p, dtype=float)
    nz = p > 0.0
    return float(-(p[nz] * np.log2(p[nz])).sum())


def cell_entropy(h: HistoryModel, ls: LocationSet, normalized: bool = False) -> float:
    """Entropy of the set's query probabilities.

    The raw form (default) feeds the map-wide query probabilities straight
    into the entropy sum; those need not sum to 1 over the set, so the value
    has no log2(k) cap.  The normalized form renormalizes within the set
    first, caps at log2(k), and is the variant used for cross-algorithm
    comparison plots.
    """
    if normalized:
        return entropy(normalized_priors(h, ls))
    b = np.array([query_probability(h, c) for c in ls.cells])
    return entropy(b)


def posterior_from_counts(counts: np.ndarray, priors: np.ndarray) -> np.ndarray:
    """Propagate a prior over sources through a transition count matrix.

    ``counts[x, y]`` holds transitions from source x into target y; each row
    is normalized over the targets (uniform when the row is all zero), then
    mixed by the prior.  The result sums to 1 whenever the prior does.
    """
    rows = normalize_transition_rows(counts)
    return priors @ rows


def posterior_pair(
    h: HistoryModel,
    prev: LocationSet,
    prev_priors: np.ndarray,
    nxt: LocationSet,
) -> np.ndarray:
    """Posterior real-location probabilities over the next set's cells.

    Each next cell accumulates, over every previous cell, the probability of
    that previous cell being real times the within-set transition probability
    into the next cell.
    """
    counts = h.counts_matrix(prev.cells, nxt.cells)
    return posterior_from_counts(counts, np.asarray(prev_priors, dtype=float))


def transition_entropy_pair(
    h: HistoryModel, prev: LocationSet, nxt: LocationSet
) -> float:
    """Transition-entropy of ``nxt`` given ``prev``, in bits.

    Priors over the previous set are its normalized query probabilities;
    the value lies in [0, log2(k_next)].
    """
    return entropy(posterior_pair(h, prev, normalized_priors(h, prev), nxt))


def posterior_trajectory(
    h: HistoryModel, steps: list[LocationSet]
) -> np.ndarray:
    """Posterior over the final set of a trajectory of location sets.

    Forward recursion: the first set's priors are its normalized query
    probabilities; each later set's posterior mixes the previous posterior
    through the pairwise transition rows.  Query probabilities of the
    intermediate sets are deliberately not consulted; only the transition
    structure carries information forward.  Outputs are normalized at every
    step by construction.
    """
    if not steps:
        raise ValueError("trajectory must contain at least one location set")
    post = normalized_priors(h, steps[0])
    for prev, nxt in zip(steps, steps[1:]):
        post = posterior_pair(h, prev, post, nxt)
    return post


def transition_entropy_trajectory(
    h: HistoryModel, steps: list[LocationSet]
) -> float:
    """Entropy in bits of the final set's trajectory posterior."""
    return entropy(posterior_trajectory(h, steps))

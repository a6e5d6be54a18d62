"""Most-likely-path adversary over a queried trajectory.

``viterbi_attack`` decodes the single state sequence with the highest joint
probability under the attacker's side information: the normalized prior of
the first location set times the chained transition probabilities between
consecutive sets.  ``brute_force_path`` recovers the same answer by scoring
every state sequence, which makes it a slow independent oracle.
``protection_rate`` turns an estimate into the fraction of steps where the
attacker guessed wrong.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InstanceTooLarge, LengthMismatch
from .grid import (
    CellId,
    HistoryModel,
    LocationSet,
    normalize_transition_rows,
    normalized_priors,
)


@dataclass(frozen=True)
class AttackResult:
    """One decoded trajectory.

    ``estimated`` holds the attacker's cell guess per step, ``path_score``
    the joint probability of that path.  ``protected_steps`` counts steps the
    attacker got wrong; only a caller that knows the true path can fill it,
    so the attack itself leaves it None.
    """

    estimated: tuple[CellId, ...]
    path_score: float
    protected_steps: int | None = None


def _argmax_lowest_cell_column(scores: np.ndarray, cells: np.ndarray) -> int:
    """Index of the max score; ties resolve to the lowest cell id."""
    perm = np.argsort(cells, kind="stable")
    return int(perm[np.argmax(scores[perm])])


def viterbi_attack(
    h: HistoryModel, steps: list[LocationSet], log_space: bool = False
) -> AttackResult:
    """Decode the most probable cell sequence across the submitted sets.

    The first column is the first set's normalized priors; each later column
    keeps, per cell, the best score reachable from the previous column times
    the transition probability, with a back pointer.  Argmax ties (pointers
    and the final column) break toward the lowest cell id.  Scores multiply
    raw probabilities; pass ``log_space=True`` for long trajectories where
    the product would underflow (the returned path_score is then the
    exponentiated log score and may round to 0.0).
    """
    if len(steps) < 1:
        raise ValueError("trajectory must have at least one step")
    priors = normalized_priors(h, steps[0])
    if log_space:
        with np.errstate(divide="ignore"):
            mu = np.log2(priors)
    else:
        mu = priors.copy()

    pointers: list[np.ndarray] = []
    for j in range(1, len(steps)):
        rows = normalize_transition_rows(
            h.counts_matrix(steps[j - 1].cells, steps[j].cells)
        )
        if log_space:
            with np.errstate(divide="ignore"):
                scores = mu[:, None] + np.log2(rows)
        else:
            scores = mu[:, None] * rows
        prev_cells = np.asarray(steps[j - 1].cells)
        perm = np.argsort(prev_cells, kind="stable")
        ptr = perm[np.argmax(scores[perm], axis=0)]
        pointers.append(ptr)
        mu = scores[ptr, np.arange(steps[j].k)]

    last = _argmax_lowest_cell_column(mu, np.asarray(steps[-1].cells))
    best = float(mu[last])
    positions = [last]
    for ptr in reversed(pointers):
        positions.append(int(ptr[positions[-1]]))
    positions.reverse()
    estimated = tuple(steps[j].cells[p] for j, p in enumerate(positions))
    score = float(2.0**best) if log_space else best
    return AttackResult(estimated=estimated, path_score=score)


def brute_force_path(h: HistoryModel, steps: list[LocationSet]) -> AttackResult:
    """Score every state sequence and keep the best.

    Products accumulate left to right, matching the recursive decoder's
    arithmetic exactly; score ties prefer the path whose cell ids are
    smallest when compared from the last step backwards, which is the order
    in which backtracking fixes the path.
    """
    if len(steps) < 1:
        raise ValueError("trajectory must have at least one step")
    n_paths = math.prod(s.k for s in steps)
    if n_paths > 1_000_000:
        raise InstanceTooLarge(f"{n_paths} candidate paths exceed the 1e6 cap")
    priors = normalized_priors(h, steps[0])
    rows = [
        normalize_transition_rows(
            h.counts_matrix(steps[j - 1].cells, steps[j].cells)
        )
        for j in range(1, len(steps))
    ]

    best_score = -1.0
    best_rev: tuple[CellId, ...] | None = None
    best_cells: tuple[CellId, ...] | None = None
    for pos in itertools.product(*(range(s.k) for s in steps)):
        score = priors[pos[0]]
        for j in range(1, len(steps)):
            score = score * rows[j - 1][pos[j - 1], pos[j]]
        cells = tuple(steps[j].cells[p] for j, p in enumerate(pos))
        rev = cells[::-1]
        if score > best_score or (
            score == best_score and best_rev is not None and rev < best_rev
        ):
            best_score = float(score)
            best_rev = rev
            best_cells = cells
    assert best_cells is not None
    return AttackResult(estimated=best_cells, path_score=best_score)


def protection_rate(result: AttackResult, truth: list[CellId]) -> float:
    """Fraction of steps where the attacker's guess misses the true cell."""
    if len(result.estimated) != len(truth):
        raise LengthMismatch(
            f"estimated {len(result.estimated)} steps, truth has {len(truth)}"
        )
    misses = sum(1 for e, t in zip(result.estimated, truth) if e != t)
    return misses / len(truth)

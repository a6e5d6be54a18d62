"""Dummy generation algorithms.

Five ways to pick the k-1 fake cells submitted alongside a real location:

* ``random_gen``: uniform cells, the classic baseline.
* ``dls_gen``: query-probability matching, greedily maximizing the set's
  normalized cell-entropy (dummy-location-selection style baseline).
* ``exhaustive_gen``: scores up to a capped number of candidate subsets of a
  shared dummy pool by pairwise transition-entropy and keeps the best.
* ``greedy_gen``: grows the set one member at a time, always adding the pool
  cell that maximizes the partial set's transition-entropy.
* ``rdg_gen``: robust dummy generation; grows the set by maximizing the
  entropy of a max-product weight vector, the same quantity a most-likely-
  path attacker propagates, so the chosen dummies blunt that attack.

All argmax ties break toward the lowest cell index, and every generator is
deterministic given the context seed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import EmptyHistory, KTooLarge, PoolTooLarge
from .grid import CellId, HistoryModel, LocationSet, normalized_priors


@dataclass(frozen=True)
class GeneratorContext:
    """Shared inputs for the generators.

    ``pool_multiplier`` scales the dummy pool to pool_multiplier * k cells;
    ``exhaustive_subset_cap`` bounds how many candidate subsets the
    exhaustive search scores.
    """

    history: HistoryModel
    rng_seed: int = 0
    pool_multiplier: int = 4
    exhaustive_subset_cap: int = 1000

    def __post_init__(self) -> None:
        if self.pool_multiplier < 1:
            raise ValueError("pool_multiplier must be >= 1")
        if self.exhaustive_subset_cap < 1:
            raise ValueError("exhaustive_subset_cap must be >= 1")

    def with_seed(self, seed: int) -> "GeneratorContext":
        return replace(self, rng_seed=seed)


def _check_k(h: HistoryModel, k: int) -> None:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > h.grid.num_cells:
        raise KTooLarge(f"k={k} exceeds the {h.grid.num_cells}-cell grid")


def random_gen(ctx: GeneratorContext, real: CellId, k: int) -> LocationSet:
    """Real location plus k-1 distinct uniformly random cells."""
    h = ctx.history
    _check_k(h, k)
    rng = np.random.default_rng(ctx.rng_seed)
    candidates = np.delete(np.arange(h.grid.num_cells), real)
    dummies = rng.choice(candidates, size=k - 1, replace=False)
    return LocationSet(cells=(real, *(int(d) for d in dummies)), real_index=0)


def _rank_by_query_similarity(h: HistoryModel, real: CellId) -> np.ndarray:
    """All cells except ``real``, nearest query count first, ties by index."""
    if h.total_queries == 0:
        raise EmptyHistory("dummy selection needs a populated history")
    distance = np.abs(h.query_count - h.query_count[real])
    order = np.lexsort((np.arange(h.grid.num_cells), distance))
    return order[order != real]


def dls_gen(ctx: GeneratorContext, real: CellId, k: int) -> LocationSet:
    """Query-probability-matching baseline.

    Candidates are the 2k cells whose query counts sit nearest the real
    cell's; the k-1 dummies are then chosen greedily to maximize the
    normalized cell-entropy of the growing set.
    """
    h = ctx.history
    _check_k(h, k)
    ranked = _rank_by_query_similarity(h, real)
    candidates = ranked[: min(2 * k, len(ranked))]

    cand_counts = h.query_count[candidates].astype(float)
    chosen: list[int] = []
    chosen_sum = float(h.query_count[real])
    chosen_xlog = _xlog2x(float(h.query_count[real]))
    available = np.ones(len(candidates), dtype=bool)
    for _ in range(k - 1):
        sums = chosen_sum + cand_counts
        xlog = chosen_xlog + _xlog2x_vec(cand_counts)
        with np.errstate(divide="ignore", invalid="ignore"):
            scores = np.where(sums > 0.0, np.log2(sums) - xlog / sums, 0.0)
        scores[~available] = -np.inf
        pick = _argmax_lowest_cell(scores, candidates)
        available[pick] = False
        chosen.append(int(candidates[pick]))
        chosen_sum += cand_counts[pick]
        chosen_xlog += _xlog2x(cand_counts[pick])
    return LocationSet(cells=(real, *chosen), real_index=0)


def _xlog2x(x: float) -> float:
    return x * math.log2(x) if x > 0.0 else 0.0


def _xlog2x_vec(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    nz = x > 0.0
    np.log2(x, out=out, where=nz)
    return out * x


def _argmax_lowest_cell(scores: np.ndarray, cells: np.ndarray) -> int:
    """Position of the maximal score; ties resolve to the lowest cell id."""
    best = scores.max()
    tied = np.flatnonzero(scores == best)
    return int(tied[np.argmin(cells[tied])])


def dummy_pool(ctx: GeneratorContext, real: CellId, k: int) -> list[CellId]:
    """Shared candidate pool of pool_multiplier * k cells.

    Ranked by closeness of query count to the real cell's (ties by cell
    index) so that any subset already scores well on cell-entropy.
    """
    h = ctx.history
    _check_k(h, k)
    size = ctx.pool_multiplier * k
    if size >= h.grid.num_cells:
        raise PoolTooLarge(
            f"pool of {size} cells cannot exclude the real cell on a "
            f"{h.grid.num_cells}-cell grid"
        )
    ranked = _rank_by_query_similarity(h, real)
    return [int(c) for c in ranked[:size]]


def _entropy_rows(p: np.ndarray) -> np.ndarray:
    """Entropy in bits of each row of a matrix of probability vectors."""
    out = np.zeros_like(p)
    nz = p > 0.0
    np.log2(p, out=out, where=nz)
    out *= p
    return -out.sum(axis=-1)


def _normalized_subrows(counts: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Per-subset transition rows, shape (sources, subsets, subset_size).

    Rows normalize over each subset's columns; all-zero rows fall back to
    uniform, mirroring the single-set transition probabilities.
    """
    sub = counts[:, cols].astype(float)
    sums = sub.sum(axis=2)
    rows = np.empty_like(sub)
    pos = sums > 0.0
    np.divide(sub, sums[:, :, None], out=rows, where=pos[:, :, None])
    rows[~pos] = 1.0 / cols.shape[1]
    return rows


def _pair_entropy_scores(
    counts: np.ndarray, priors: np.ndarray, cols: np.ndarray
) -> np.ndarray:
    """Transition-entropy of each candidate subset, batched."""
    rows = _normalized_subrows(counts, cols)
    post = np.einsum("x,xmy->my", priors, rows)
    return _entropy_rows(post)


def _maxweight_scores(
    counts: np.ndarray, weights: np.ndarray, cols: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Entropy of the normalized max-product weight vector per subset.

    Unlike the posterior, which sums over source cells, each target keeps
    only its single strongest weighted incoming transition.  Returns the
    entropies and the normalized weight matrices.
    """
    rows = _normalized_subrows(counts, cols)
    w2 = (weights[:, None, None] * rows).max(axis=0)
    w2 /= w2.sum(axis=1, keepdims=True)
    return _entropy_rows(w2), w2


def exhaustive_gen(
    ctx: GeneratorContext, prev: LocationSet, real: CellId, k: int
) -> LocationSet:
    """Best of up to ``exhaustive_subset_cap`` sampled dummy subsets.

    Enumerates every (k-1)-subset of the pool when that count fits under the
    cap, otherwise samples that many distinct subsets; keeps the subset whose
    completed set maximizes transition-entropy with respect to ``prev``.
    Ties keep the first subset found.
    """
    h = ctx.history
    pool = dummy_pool(ctx, real, k)
    priors = normalized_priors(h, prev)
    counts = h.counts_matrix(prev.cells, (real, *pool))

    total = math.comb(len(pool), k - 1)
    m = min(total, ctx.exhaustive_subset_cap)
    if total <= ctx.exhaustive_subset_cap:
        subsets = np.fromiter(
            itertools.chain.from_iterable(
                itertools.combinations(range(1, len(pool) + 1), k - 1)
            ),
            dtype=np.int64,
            count=m * (k - 1),
        ).reshape(m, k - 1)
    else:
        rng = np.random.default_rng(ctx.rng_seed)
        seen: set[tuple[int, ...]] = set()
        rows = []
        while len(rows) < m:
            pick = np.sort(rng.choice(len(pool), size=k - 1, replace=False)) + 1
            key = tuple(int(p) for p in pick)
            if key not in seen:
                seen.add(key)
                rows.append(pick)
        subsets = np.asarray(rows, dtype=np.int64)

    cols = np.concatenate(
        [np.zeros((m, 1), dtype=np.int64), subsets], axis=1
    )
    scores = _pair_entropy_scores(counts, priors, cols)
    best = int(np.argmax(scores))  # argmax keeps the first maximal subset
    dummies = tuple(pool[j - 1] for j in subsets[best])
    return LocationSet(cells=(real, *dummies), real_index=0)


def greedy_gen(
    ctx: GeneratorContext, prev: LocationSet, real: CellId, k: int
) -> LocationSet:
    """Stepwise transition-entropy maximization over the dummy pool.

    Starting from the real location alone, each round scores every remaining
    pool cell by the transition-entropy of the partial set extended with it,
    and commits the best one.
    """
    h = ctx.history
    pool = dummy_pool(ctx, real, k)
    priors = normalized_priors(h, prev)
    counts = h.counts_matrix(prev.cells, (real, *pool))
    pool_cells = np.asarray(pool, dtype=np.int64)

    selected = [0]
    remaining = list(range(1, len(pool) + 1))
    for _ in range(k - 1):
        cols = np.array(
            [selected + [j] for j in remaining], dtype=np.int64
        )
        scores = _pair_entropy_scores(counts, priors, cols)
        pick = _argmax_lowest_cell(scores, pool_cells[np.array(remaining) - 1])
        selected.append(remaining.pop(pick))
    return LocationSet(
        cells=(real, *(pool[j - 1] for j in selected[1:])), real_index=0
    )


def rdg_gen(
    ctx: GeneratorContext,
    prev: LocationSet,
    prev_posterior: np.ndarray,
    real: CellId,
    k: int,
) -> tuple[LocationSet, np.ndarray]:
    """Robust dummy generation.

    Grows the set greedily like ``greedy_gen`` but scores each candidate by
    the entropy of the normalized max-product weight vector over the partial
    set: every member keeps only its strongest weighted incoming transition
    from the previous set.  Flattening that vector is what frustrates a
    most-likely-path attacker.  Returns the chosen set together with its
    final weight vector for the caller to carry into the next query.
    """
    h = ctx.history
    pool = dummy_pool(ctx, real, k)
    weights = np.asarray(prev_posterior, dtype=float)
    if weights.shape != (prev.k,):
        raise ValueError(
            f"prev_posterior has shape {weights.shape}, expected ({prev.k},)"
        )
    counts = h.counts_matrix(prev.cells, (real, *pool))
    pool_cells = np.asarray(pool, dtype=np.int64)

    selected = [0]
    remaining = list(range(1, len(pool) + 1))
    for _ in range(k - 1):
        cols = np.array(
            [selected + [j] for j in remaining], dtype=np.int64
        )
        scores, _ = _maxweight_scores(counts, weights, cols)
        pick = _argmax_lowest_cell(scores, pool_cells[np.array(remaining) - 1])
        selected.append(remaining.pop(pick))

    final_cols = np.asarray([selected], dtype=np.int64)
    _, w2 = _maxweight_scores(counts, weights, final_cols)
    cells = (real, *(pool[j - 1] for j in selected[1:]))
    return LocationSet(cells=cells, real_index=0), w2[0]

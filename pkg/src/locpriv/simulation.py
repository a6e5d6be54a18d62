"""Benchmark protocol: seeded histories, trajectory sweeps, aggregated rows.

A run sweeps (algorithm, k, path length) combinations.  Each repetition
samples a real trajectory from the history's transition structure, builds
one location set per step with the chosen generator (conditioning on the
previously submitted set where the algorithm calls for it), then records
normalized cell-entropy, chained transition-entropy, and the most-likely-
path attacker's protection rate.

Every repetition's randomness derives from a stable hash of
(seed, algorithm, k, length, repetition), so results do not depend on
execution order and parallel runs reproduce serial ones byte for byte.
"""

from __future__ import annotations

import hashlib
import logging
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .attack import protection_rate, viterbi_attack
from .errors import EmptyHistory, LocPrivError
from .generators import (
    GeneratorContext,
    dls_gen,
    exhaustive_gen,
    greedy_gen,
    random_gen,
    rdg_gen,
)
from .grid import (
    CellId,
    GridSpec,
    HistoryModel,
    LocationSet,
    build_history,
    normalized_priors,
)
from .metrics import cell_entropy, posterior_pair, transition_entropy_trajectory

logger = logging.getLogger(__name__)

ALGORITHMS = ("random", "dls", "exhaustive", "greedy", "rdg")


@dataclass(frozen=True)
class SynthParams:
    """Shape of the synthetic side information.

    ``skew`` is the popularity exponent (0 = near-flat query counts),
    ``locality`` the decay of movement over grid distance (higher = shorter
    hops), ``cluster_radius`` the size of contiguous popularity districts
    on the map (0 scatters popularity cell by cell), ``trunk_bias`` the
    probability that a step takes the cell's habitual next hop instead of
    diffusing (0 = no habitual routes), ``trunk_span`` how many popularity
    ranks down those hops land
    (0 = anywhere), ``trunk_fanout`` how many habitual destinations each
    cell keeps, and ``records``/``record_length`` how many walks of how
    many cells are folded into the history.
    """

    skew: float = 1.0
    locality: float = 0.5
    cluster_radius: float = 2.0
    trunk_bias: float = 0.0
    trunk_span: int = 0
    trunk_fanout: int = 1
    records: int = 500
    record_length: int = 24

    def __post_init__(self) -> None:
        if self.skew < 0 or self.locality < 0 or self.cluster_radius < 0:
            raise ValueError("skew, locality, and cluster_radius must be >= 0")
        if not 0.0 <= self.trunk_bias <= 1.0:
            raise ValueError("trunk_bias must be in [0, 1]")
        if self.trunk_span < 0:
            raise ValueError("trunk_span must be >= 0")
        if self.trunk_fanout < 1:
            raise ValueError("trunk_fanout must be >= 1")
        if self.records < 1 or self.record_length < 1:
            raise ValueError("records and record_length must be >= 1")


@dataclass(frozen=True)
class CorpusSource:
    """History built from a binned trajectory corpus file."""

    path: str


@dataclass(frozen=True)
class ExperimentConfig:
    grid: GridSpec = GridSpec(n=16)
    history_source: SynthParams | CorpusSource = SynthParams()
    k_values: tuple[int, ...] = tuple(range(2, 31))
    path_lengths: tuple[int, ...] = (2, 3, 4)
    repetitions: int = 3000
    algorithms: tuple[str, ...] = ALGORITHMS
    seed: int = 0
    pool_multiplier: int = 4
    exhaustive_subset_cap: int = 1000
    adaptive_adversary: bool = False
    rdg_carry: str = "posterior"
    workers: int = 1

    def __post_init__(self) -> None:
        if any(k < 2 for k in self.k_values) or not self.k_values:
            raise ValueError("k_values must be >= 2")
        if any(l < 2 for l in self.path_lengths) or not self.path_lengths:
            raise ValueError("path_lengths must be >= 2")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown or not self.algorithms:
            raise ValueError(f"unknown algorithms: {sorted(unknown)}")
        if self.rdg_carry not in ("posterior", "weights"):
            raise ValueError("rdg_carry must be 'posterior' or 'weights'")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class ResultRow:
    """Aggregate of all successful repetitions of one sweep combination."""

    algorithm: str
    k: int
    path_length: int
    mean_cell_entropy: float
    mean_transition_entropy: float
    mean_protection_rate: float
    stddev_cell_entropy: float
    stddev_transition_entropy: float
    stddev_protection_rate: float
    repetitions: int


def derive_seed(*parts: object) -> int:
    """Stable 64-bit seed from the joined string forms of ``parts``."""
    msg = "|".join(str(p) for p in parts).encode()
    return int.from_bytes(
        hashlib.blake2b(msg, digest_size=8).digest(), "big"
    )


def synth_history(grid: GridSpec, params: SynthParams, seed: int) -> HistoryModel:
    """Seeded synthetic movement log with exploitable structure.

    Cell popularity follows a power law with exponent ``skew`` over a
    seeded cell ranking; with ``cluster_radius`` > 0 the ranking is
    arranged into contiguous hot spots (districts of a city), otherwise it
    scatters cell by cell.  Walks start at popularity-weighted cells and
    at each step either take a habitual hop or diffuse: with probability
    ``trunk_bias`` the walker moves to one of the cell's ``trunk_fanout``
    fixed partner cells, drawn at roughly ``trunk_span`` popularity ranks
    quieter (within about +-25%, or anywhere when the span is 0), the way
    commuting runs from hubs toward outskirts; otherwise it moves to a
    popular nearby cell, preferring high popularity damped by
    ``exp(-locality * dist)`` over grid distance, never standing still.
    ``records`` walks of ``record_length`` cells are folded into the
    returned history.
    """
    rng = np.random.default_rng(seed)
    n2 = grid.num_cells

    # rank placement: smoothed white-noise field gives contiguous districts,
    # a plain permutation scatters ranks cell by cell.  A fixed blob radius
    # means larger grids hold more districts, not larger ones
    coords = np.column_stack(divmod(np.arange(n2), grid.n)).astype(float)
    dist = np.hypot(
        coords[:, None, 0] - coords[None, :, 0],
        coords[:, None, 1] - coords[None, :, 1],
    )
    if params.cluster_radius > 0:
        field = np.exp(
            -((dist / params.cluster_radius) ** 2) / 2.0
        ) @ rng.standard_normal(n2)
        ranks = np.empty(n2, dtype=np.int64)
        ranks[np.argsort(-field)] = np.arange(n2)
    else:
        ranks = rng.permutation(n2)

    popularity = (ranks + 1.0) ** (-params.skew)
    popularity /= popularity.sum()
    kernel = popularity[None, :] * np.exp(-params.locality * dist)
    np.fill_diagonal(kernel, 0.0)
    row_cdf = np.cumsum(kernel / kernel.sum(axis=1, keepdims=True), axis=1)
    start_cdf = np.cumsum(popularity)

    # habitual next hops: trunk_fanout fixed partner cells each, drawn a
    # jittered span of ranks quieter.  One direction for every cell keeps
    # partner cells inside the popularity band a whole route travels through
    fan = params.trunk_fanout
    trunk = np.zeros((n2, fan), dtype=np.int64)
    if params.trunk_bias > 0:
        if params.trunk_span > 0:
            lo = max(1, round(0.75 * params.trunk_span))
            hi = max(lo, round(1.25 * params.trunk_span))
            offset = rng.integers(lo, hi + 1, size=(n2, fan))
            target = ranks[:, None] + offset
            target = np.where(target > n2 - 1, 2 * (n2 - 1) - target, target)
            by_rank = np.argsort(ranks)
            trunk = by_rank[target]
            same = trunk == np.arange(n2)[:, None]
            trunk[same] = by_rank[
                (ranks[:, None].repeat(fan, 1)[same] + 1) % n2
            ]
        else:
            trunk = rng.integers(n2 - 1, size=(n2, fan))
            trunk += trunk >= np.arange(n2)[:, None]

    records = []
    for i in range(params.records):
        cell = min(
            int(np.searchsorted(start_cdf, rng.random(), side="right")), n2 - 1
        )
        walk = [cell]
        for _ in range(params.record_length - 1):
            if params.trunk_bias > 0 and rng.random() < params.trunk_bias:
                cell = int(trunk[cell, rng.integers(fan)])
            else:
                cell = min(
                    int(
                        np.searchsorted(row_cdf[cell], rng.random(), side="right")
                    ),
                    n2 - 1,
                )
            walk.append(cell)
        records.append((f"synth-{i}", walk))
    return build_history(records, grid)


def sample_trajectory(h: HistoryModel, length: int, seed: int) -> list[CellId]:
    """Random walk of ``length`` cells through the history's structure.

    The start cell follows the overall query distribution; each later step
    follows the current cell's full-map transition counts, falling back to a
    uniform cell when the history never saw the current cell move.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    if h.total_queries == 0 or not h.transitions:
        raise EmptyHistory("trajectory sampling needs queries and transitions")
    rng = np.random.default_rng(seed)
    start_p = h.query_count / h.total_queries
    path = [int(rng.choice(h.grid.num_cells, p=start_p))]
    for _ in range(length - 1):
        row = h.out_row(path[-1])
        if row:
            targets = sorted(row)
            counts = np.array([row[t] for t in targets], dtype=float)
            nxt = rng.choice(targets, p=counts / counts.sum())
        else:
            nxt = rng.choice(h.grid.num_cells)
        path.append(int(nxt))
    return path


def generate_trajectory_sets(
    h: HistoryModel,
    algorithm: str,
    truth: list[CellId],
    k: int | list[int],
    base_seed: int,
    pool_multiplier: int = 4,
    exhaustive_subset_cap: int = 1000,
    adaptive: bool = False,
    rdg_carry: str = "posterior",
) -> tuple[list[LocationSet], HistoryModel]:
    """One location set per step of ``truth`` using ``algorithm``.

    Transition-aware generators condition each step on the previously
    submitted set; their first step, which has no predecessor, falls back to
    query-probability matching.  ``k`` may be a single value or one value
    per step.  The vector carried between rdg steps is the sum-product
    posterior by default; ``rdg_carry='weights'`` carries the generator's
    max-product weights instead.  With ``adaptive`` on, every submitted set
    (and all ordered pairs between consecutive sets) is folded into the
    adversary's counts as it appears; the possibly grown model is returned
    alongside the sets.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if rdg_carry not in ("posterior", "weights"):
        raise ValueError("rdg_carry must be 'posterior' or 'weights'")
    ks = [k] * len(truth) if isinstance(k, int) else list(k)
    if len(ks) != len(truth):
        raise ValueError("need one k per trajectory step")

    adversary = h
    sets: list[LocationSet] = []
    carried: np.ndarray | None = None
    for j, real in enumerate(truth):
        ctx = GeneratorContext(
            history=adversary,
            rng_seed=derive_seed(base_seed, "step", j),
            pool_multiplier=pool_multiplier,
            exhaustive_subset_cap=exhaustive_subset_cap,
        )
        if algorithm == "random":
            ls = random_gen(ctx, real, ks[j])
        elif algorithm == "dls" or j == 0:
            ls = dls_gen(ctx, real, ks[j])
            if algorithm == "rdg":
                carried = normalized_priors(adversary, ls)
        elif algorithm == "exhaustive":
            ls = exhaustive_gen(ctx, sets[-1], real, ks[j])
        elif algorithm == "greedy":
            ls = greedy_gen(ctx, sets[-1], real, ks[j])
        else:
            assert carried is not None
            ls, max_weights = rdg_gen(ctx, sets[-1], carried, real, ks[j])
            if rdg_carry == "weights":
                carried = max_weights
            else:
                carried = posterior_pair(adversary, sets[-1], carried, ls)
        sets.append(ls)
        if adaptive:
            pairs = (
                [(a, b) for a in sets[-2].cells for b in ls.cells]
                if len(sets) > 1
                else []
            )
            adversary = adversary.with_observations(
                extra_queries=list(ls.cells), extra_transitions=pairs
            )
    return sets, adversary


def _one_repetition(
    h: HistoryModel,
    cfg: ExperimentConfig,
    algorithm: str,
    k: int,
    length: int,
    rep: int,
) -> tuple[float, float, float] | None:
    base = derive_seed(cfg.seed, algorithm, k, length, rep)
    try:
        truth = sample_trajectory(h, length, derive_seed(base, "traj"))
        sets, adversary = generate_trajectory_sets(
            h,
            algorithm,
            truth,
            k,
            base,
            pool_multiplier=cfg.pool_multiplier,
            exhaustive_subset_cap=cfg.exhaustive_subset_cap,
            adaptive=cfg.adaptive_adversary,
            rdg_carry=cfg.rdg_carry,
        )
        cell_h = statistics.fmean(
            cell_entropy(adversary, s, normalized=True) for s in sets
        )
        trans_h = transition_entropy_trajectory(adversary, sets)
        prot = protection_rate(viterbi_attack(adversary, sets), truth)
    except LocPrivError as exc:
        logger.warning(
            "repetition %d of %s k=%d length=%d failed: %s",
            rep, algorithm, k, length, exc,
        )
        return None
    return cell_h, trans_h, prot


def config_history(cfg: ExperimentConfig) -> HistoryModel:
    """The side-information model an experiment runs against."""
    if isinstance(cfg.history_source, SynthParams):
        return synth_history(
            cfg.grid, cfg.history_source, derive_seed(cfg.seed, "history")
        )
    from .geolife import read_corpus

    records = read_corpus(cfg.history_source.path)
    return build_history(records, cfg.grid)


def run_experiment(cfg: ExperimentConfig) -> list[ResultRow]:
    """Sweep all configured combinations and aggregate per-repetition stats.

    A repetition that raises a domain error is logged and excluded; the
    row's ``repetitions`` field counts only successes.  Aggregation folds
    repetition results in index order, so worker count cannot change rows.
    """
    h = config_history(cfg)
    rows: list[ResultRow] = []
    for algorithm in cfg.algorithms:
        for k in cfg.k_values:
            for length in cfg.path_lengths:
                reps = range(cfg.repetitions)
                if cfg.workers > 1:
                    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                        outcomes = list(
                            pool.map(
                                lambda r: _one_repetition(
                                    h, cfg, algorithm, k, length, r
                                ),
                                reps,
                            )
                        )
                else:
                    outcomes = [
                        _one_repetition(h, cfg, algorithm, k, length, r)
                        for r in reps
                    ]
                kept = [o for o in outcomes if o is not None]
                excluded = len(outcomes) - len(kept)
                if excluded:
                    logger.warning(
                        "%s k=%d length=%d: excluded %d of %d repetitions",
                        algorithm, k, length, excluded, cfg.repetitions,
                    )
                if not kept:
                    continue
                data = np.asarray(kept)
                means = data.mean(axis=0)
                stds = data.std(axis=0)
                rows.append(
                    ResultRow(
                        algorithm=algorithm,
                        k=k,
                        path_length=length,
                        mean_cell_entropy=float(means[0]),
                        mean_transition_entropy=float(means[1]),
                        mean_protection_rate=float(means[2]),
                        stddev_cell_entropy=float(stds[0]),
                        stddev_transition_entropy=float(stds[1]),
                        stddev_protection_rate=float(stds[2]),
                        repetitions=len(kept),
                    )
                )
    return rows

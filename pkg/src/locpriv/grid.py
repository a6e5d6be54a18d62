"""Grid map, adversary side information, and the elementary probabilities.

Cells of an n x n grid are identified by a single row-major integer index
(``index = row * n + col``).  The adversary's side information is a
:class:`HistoryModel`: per-cell query counts plus per-ordered-pair transition
counts harvested from observed movement records.  Everything downstream
(metrics, generators, the attack) consumes the three probability primitives
defined here: map-wide query probability, within-set normalized priors, and
within-set transition probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AllZeroPriors, CellOutOfGrid, EmptyHistory

CellId = int

# Equirectangular approximation, good enough for km-scale urban boxes.
KM_PER_DEG_LAT = 110.574
KM_PER_DEG_LON_EQUATOR = 111.320


@dataclass(frozen=True)
class GridSpec:
    """Geometry of the square grid map.

    ``origin_lat``/``origin_lon`` locate the south-west corner of the map
    bounding box; ``cell_size_km`` is the edge length of one cell.  The
    geographic fields only matter for GPS ingestion; purely synthetic runs
    can leave them at the defaults.
    """

    n: int
    origin_lat: float = 0.0
    origin_lon: float = 0.0
    cell_size_km: float = 0.01

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"grid side must be >= 1, got {self.n}")
        if self.cell_size_km <= 0:
            raise ValueError(f"cell size must be positive, got {self.cell_size_km}")

    @property
    def num_cells(self) -> int:
        return self.n * self.n

    def contains(self, cell: CellId) -> bool:
        return 0 <= cell < self.num_cells

    def cell_at(self, row: int, col: int) -> CellId:
        return row * self.n + col

    def row_col(self, cell: CellId) -> tuple[int, int]:
        return divmod(cell, self.n)

    def cell_for_point(self, lat: float, lon: float) -> CellId | None:
        """Bin a GPS point into its cell, or None when outside the box.

        Binning truncates toward the containing cell; points exactly on the
        far edge of the box count as outside.
        """
        dy_km = (lat - self.origin_lat) * KM_PER_DEG_LAT
        dx_km = (lon - self.origin_lon) * KM_PER_DEG_LON_EQUATOR * math.cos(
            math.radians(self.origin_lat)
        )
        row = math.floor(dy_km / self.cell_size_km)
        col = math.floor(dx_km / self.cell_size_km)
        if 0 <= row < self.n and 0 <= col < self.n:
            return self.cell_at(row, col)
        return None


@dataclass(frozen=True)
class LocationSet:
    """One query's k cells: the real location plus k-1 dummies.

    ``real_index`` is known to the simulator only; the attacker side never
    reads it.  Cell order is meaningful solely as an alignment for
    probability vectors.
    """

    cells: tuple[CellId, ...]
    real_index: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "cells", tuple(self.cells))
        if len(self.cells) < 1:
            raise ValueError("a location set needs at least one cell")
        if len(set(self.cells)) != len(self.cells):
            raise ValueError(f"cells must be distinct, got {self.cells}")
        if any(c < 0 for c in self.cells):
            raise ValueError("cell indices must be nonnegative")
        if not 0 <= self.real_index < len(self.cells):
            raise ValueError(
                f"real_index {self.real_index} out of range for k={len(self.cells)}"
            )

    @property
    def k(self) -> int:
        return len(self.cells)

    @property
    def real(self) -> CellId:
        return self.cells[self.real_index]


@dataclass(frozen=True)
class TrajectoryQuery:
    """An ordered sequence of location sets submitted by one user."""

    steps: tuple[LocationSet, ...]
    user_id: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.steps:
            raise ValueError("a trajectory needs at least one step")

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True, eq=False)
class HistoryModel:
    """Aggregated side information: query counts and transition counts.

    Counts are exact integers; probabilities are derived in double precision
    at use time and never stored.  Instances are treated as immutable after
    construction and are safe to share across threads.
    """

    grid: GridSpec
    query_count: np.ndarray
    transitions: dict[CellId, dict[CellId, int]] = field(repr=False)
    total_queries: int

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HistoryModel):
            return NotImplemented
        return (
            self.grid == other.grid
            and self.total_queries == other.total_queries
            and np.array_equal(self.query_count, other.query_count)
            and self.transitions == other.transitions
        )

    def transition_count(self, source: CellId, target: CellId) -> int:
        return self.transitions.get(source, {}).get(target, 0)

    def out_row(self, source: CellId) -> dict[CellId, int]:
        """All recorded successors of ``source`` with their counts."""
        return self.transitions.get(source, {})

    def counts_matrix(
        self, sources: tuple[CellId, ...], targets: tuple[CellId, ...]
    ) -> np.ndarray:
        """Transition counts from each source to each target, shape (s, t)."""
        out = np.zeros((len(sources), len(targets)), dtype=np.int64)
        for i, src in enumerate(sources):
            row = self.transitions.get(src)
            if not row:
                continue
            for j, dst in enumerate(targets):
                c = row.get(dst)
                if c:
                    out[i, j] = c
        return out

    def with_observations(
        self,
        extra_queries: list[CellId] = (),
        extra_transitions: list[tuple[CellId, CellId]] = (),
    ) -> "HistoryModel":
        """New model with additional observed queries and transitions."""
        qc = self.query_count.copy()
        for c in extra_queries:
            if not self.grid.contains(c):
                raise CellOutOfGrid(f"cell {c} outside {self.grid.n}x{self.grid.n} grid")
            qc[c] += 1
        trans = {src: dict(row) for src, row in self.transitions.items()}
        for a, b in extra_transitions:
            if not (self.grid.contains(a) and self.grid.contains(b)):
                raise CellOutOfGrid(f"transition ({a}, {b}) outside grid")
            row = trans.setdefault(a, {})
            row[b] = row.get(b, 0) + 1
        return HistoryModel(
            grid=self.grid,
            query_count=qc,
            transitions=trans,
            total_queries=int(qc.sum()),
        )


def build_history(
    records: list[tuple[str, list[CellId]]], grid: GridSpec
) -> HistoryModel:
    """Aggregate movement records into the adversary's history model.

    Each record is ``(user_id, ordered cells)``.  Every cell occurrence
    increments its query count; every adjacent pair within a single record
    increments that ordered pair's transition count.  Pairs never span
    records.
    """
    query_count = np.zeros(grid.num_cells, dtype=np.int64)
    transitions: dict[CellId, dict[CellId, int]] = {}
    for user_id, cells in records:
        for c in cells:
            if not grid.contains(c):
                raise CellOutOfGrid(
                    f"cell {c} of record for {user_id!r} outside "
                    f"{grid.n}x{grid.n} grid"
                )
            query_count[c] += 1
        for a, b in zip(cells, cells[1:]):
            row = transitions.setdefault(a, {})
            row[b] = row.get(b, 0) + 1
    return HistoryModel(
        grid=grid,
        query_count=query_count,
        transitions=transitions,
        total_queries=int(query_count.sum()),
    )


def query_probability(h: HistoryModel, cell: CellId) -> float:
    """Fraction of all recorded queries that landed on ``cell``."""
    if h.total_queries == 0:
        raise EmptyHistory("query probability undefined for an empty history")
    return float(h.query_count[cell]) / h.total_queries


def normalized_priors(h: HistoryModel, ls: LocationSet) -> np.ndarray:
    """Query probabilities of the set's cells, renormalized to sum to 1.

    The map-wide total cancels, so the result is the cells' query counts
    divided by their within-set sum.
    """
    if h.total_queries == 0:
        raise EmptyHistory("priors undefined for an empty history")
    counts = h.query_count[np.fromiter(ls.cells, dtype=np.int64, count=ls.k)]
    total = counts.sum()
    if total == 0:
        raise AllZeroPriors(f"every cell of {ls.cells} has zero query count")
    return counts.astype(float) / float(total)


def normalize_transition_rows(counts: np.ndarray, alpha: float = 0.0) -> np.ndarray:
    """Row-normalize a nonnegative count matrix into probability rows.

    A row summing to zero becomes the uniform distribution over its columns.
    ``alpha`` adds optional Laplace smoothing before normalizing; the default
    of 0 keeps small worked examples exactly reproducible.
    """
    c = np.asarray(counts, dtype=float)
    if alpha > 0.0:
        c = c + alpha
    sums = c.sum(axis=1)
    rows = np.empty_like(c)
    zero = sums == 0.0
    if zero.any():
        rows[zero] = 1.0 / c.shape[1]
    nonzero = ~zero
    rows[nonzero] = c[nonzero] / sums[nonzero, None]
    return rows


def transition_probabilities(
    h: HistoryModel,
    source: CellId,
    next_set: LocationSet,
    alpha: float = 0.0,
) -> np.ndarray:
    """Probability of moving from ``source`` to each cell of the next set.

    The denominator is restricted to the next set's cells, not the whole
    map.  A source with no recorded transitions into the set yields the
    uniform vector.
    """
    counts = h.counts_matrix((source,), next_set.cells)
    return normalize_transition_rows(counts, alpha=alpha)[0]

"""Shared fixtures: small hand-built models and seeded mid-size histories."""

from __future__ import annotations

import numpy as np
import pytest

from locpriv import (
    GridSpec,
    HistoryModel,
    SynthParams,
    build_history,
    synth_history,
)


@pytest.fixture
def grid2() -> GridSpec:
    return GridSpec(n=2)


@pytest.fixture
def grid4() -> GridSpec:
    return GridSpec(n=4)


@pytest.fixture
def worked_example(grid2: GridSpec) -> HistoryModel:
    """The three-cell instance whose posterior is (6/20, 9/20, 5/20).

    Query counts (3,1,1) over cells 0..2 give within-set priors
    (3/5, 1/5, 1/5); the transition rows restricted to {0,1,2} are
    (1/3,1/3,1/3), (1/4,2/4,1/4), and (1/4,3/4,0).
    """
    return HistoryModel(
        grid=grid2,
        query_count=np.array([3, 1, 1, 0], dtype=np.int64),
        transitions={
            0: {0: 1, 1: 1, 2: 1},
            1: {0: 1, 1: 2, 2: 1},
            2: {0: 1, 1: 3},
        },
        total_queries=5,
    )


@pytest.fixture
def uniform_history(grid4: GridSpec) -> HistoryModel:
    """Every cell queried twice, every ordered pair seen once."""
    n2 = grid4.num_cells
    return HistoryModel(
        grid=grid4,
        query_count=np.full(n2, 2, dtype=np.int64),
        transitions={a: {b: 1 for b in range(n2)} for a in range(n2)},
        total_queries=2 * n2,
    )


@pytest.fixture(scope="session")
def bench_history() -> HistoryModel:
    """Mid-size seeded history for generator and attack tests."""
    return synth_history(
        GridSpec(n=8),
        SynthParams(skew=1.0, locality=1.5, records=200, record_length=16),
        seed=42,
    )


def make_history(records, n: int) -> HistoryModel:
    return build_history(records, GridSpec(n=n))

"""Entropy metrics and posterior propagation, checked against independent
oracles: direct formula evaluation, joint-sum expansion, and the nested-sum
form of the trajectory recursion."""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from locpriv import (
    AllZeroPriors,
    EmptyHistory,
    GridSpec,
    LocationSet,
    build_history,
    cell_entropy,
    entropy,
    normalized_priors,
    posterior_pair,
    posterior_trajectory,
    query_probability,
    random_gen,
    GeneratorContext,
    transition_entropy_pair,
    transition_entropy_trajectory,
)

GOLDEN_POSTERIOR = (6 / 20, 9 / 20, 5 / 20)
GOLDEN_ENTROPY = -sum(p * math.log2(p) for p in GOLDEN_POSTERIOR)


def _restricted_row(h, src, cells):
    """Pure-python transition row: counts into `cells`, renormalized."""
    counts = [h.transition_count(src, y) for y in cells]
    total = sum(counts)
    if total == 0:
        return [1.0 / len(cells)] * len(cells)
    return [c / total for c in counts]


class TestEntropy:
    def test_certainty(self):
        assert entropy(np.array([1.0])) == 0.0

    def test_uniform_four(self):
        assert entropy(np.array([0.25] * 4)) == pytest.approx(2.0, abs=1e-15)

    def test_golden_posterior_value(self):
        assert entropy(np.array(GOLDEN_POSTERIOR)) == pytest.approx(
            GOLDEN_ENTROPY, abs=1e-15
        )
        assert GOLDEN_ENTROPY == pytest.approx(1.5394910703, abs=1e-9)

    def test_zero_entries_ignored(self):
        assert entropy(np.array([0.5, 0.5, 0.0])) == pytest.approx(1.0, abs=1e-15)

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(
            st.floats(min_value=1e-9, max_value=1.0), min_size=1, max_size=40
        )
    )
    def test_bounds(self, raw):
        p = np.array(raw) / sum(raw)
        h = entropy(p)
        assert -1e-9 <= h <= math.log2(len(p)) + 1e-9

    def test_maximum_iff_uniform(self):
        k = 8
        assert entropy(np.full(k, 1 / k)) == pytest.approx(3.0, abs=1e-9)
        tilted = np.full(k, 1 / k)
        tilted[0] += 0.01
        tilted[1] -= 0.01
        assert entropy(tilted) < 3.0 - 1e-9


class TestCellEntropy:
    def test_composition_oracle(self, bench_history):
        # independently: per-cell query probabilities, then the raw formula
        ls = LocationSet(cells=(3, 11, 29, 40, 55), real_index=0)
        probs = [query_probability(bench_history, c) for c in ls.cells]
        expect = -sum(p * math.log2(p) for p in probs if p > 0)
        assert cell_entropy(bench_history, ls) == pytest.approx(expect, abs=1e-12)

    def test_normalized_composition_oracle(self, bench_history):
        ls = LocationSet(cells=(3, 11, 29, 40, 55), real_index=0)
        p = normalized_priors(bench_history, ls)
        assert cell_entropy(bench_history, ls, normalized=True) == pytest.approx(
            entropy(p), abs=1e-12
        )

    def test_identical_probabilities_hit_log2k(self, uniform_history):
        ls = LocationSet(cells=(0, 3, 7, 12), real_index=0)
        assert cell_entropy(uniform_history, ls, normalized=True) == pytest.approx(
            2.0, abs=1e-12
        )

    def test_single_live_cell_is_zero(self, grid4):
        h = build_history([("u", [5, 5, 5])], grid4)
        ls = LocationSet(cells=(5, 1, 2), real_index=0)
        assert cell_entropy(h, ls, normalized=True) == 0.0

    def test_raw_uses_map_wide_probabilities(self, worked_example):
        # raw form keeps the global denominator: probabilities (3/5, 1/5)
        ls = LocationSet(cells=(0, 1), real_index=0)
        expect = -(0.6 * math.log2(0.6) + 0.2 * math.log2(0.2))
        assert cell_entropy(worked_example, ls) == pytest.approx(expect, abs=1e-12)

    def test_normalized_at_most_log2k(self, bench_history):
        rng = np.random.default_rng(5)
        for _ in range(50):
            k = int(rng.integers(2, 12))
            cells = tuple(
                int(c)
                for c in rng.choice(bench_history.grid.num_cells, k, replace=False)
            )
            ls = LocationSet(cells=cells, real_index=0)
            try:
                v = cell_entropy(bench_history, ls, normalized=True)
            except AllZeroPriors:
                continue
            assert v <= math.log2(k) + 1e-9

    def test_empty_history(self, grid4):
        with pytest.raises(EmptyHistory):
            cell_entropy(
                build_history([], grid4), LocationSet(cells=(0,), real_index=0)
            )


class TestPosteriorPair:
    def test_golden_instance(self, worked_example):
        prev = LocationSet(cells=(0, 1, 2), real_index=0)
        nxt = LocationSet(cells=(0, 1, 2), real_index=0)
        priors = normalized_priors(worked_example, prev)
        post = posterior_pair(worked_example, prev, priors, nxt)
        np.testing.assert_allclose(post, GOLDEN_POSTERIOR, atol=1e-12)

    def test_degenerate_single_prev(self, worked_example):
        prev = LocationSet(cells=(2,), real_index=0)
        nxt = LocationSet(cells=(0, 1, 2), real_index=0)
        post = posterior_pair(worked_example, prev, np.array([1.0]), nxt)
        np.testing.assert_allclose(post, [1 / 4, 3 / 4, 0.0], atol=1e-15)

    def test_joint_sum_oracle(self, bench_history):
        # sum prior(x) * Pr(x -> y) over every (x, y) pair, in pure python
        rng = np.random.default_rng(11)
        for _ in range(25):
            cells = rng.choice(bench_history.grid.num_cells, 10, replace=False)
            prev = LocationSet(cells=tuple(int(c) for c in cells[:5]), real_index=0)
            nxt = LocationSet(cells=tuple(int(c) for c in cells[5:]), real_index=0)
            try:
                priors = normalized_priors(bench_history, prev)
            except AllZeroPriors:
                continue
            post = posterior_pair(bench_history, prev, priors, nxt)
            for y_idx, y in enumerate(nxt.cells):
                expect = sum(
                    priors[x_idx]
                    * _restricted_row(bench_history, x, nxt.cells)[y_idx]
                    for x_idx, x in enumerate(prev.cells)
                )
                assert post[y_idx] == pytest.approx(expect, abs=1e-12)

    def test_sums_to_one(self, bench_history):
        rng = np.random.default_rng(13)
        for _ in range(30):
            cells = rng.choice(bench_history.grid.num_cells, 8, replace=False)
            prev = LocationSet(cells=tuple(int(c) for c in cells[:4]), real_index=0)
            nxt = LocationSet(cells=tuple(int(c) for c in cells[4:]), real_index=0)
            try:
                priors = normalized_priors(bench_history, prev)
            except AllZeroPriors:
                continue
            post = posterior_pair(bench_history, prev, priors, nxt)
            assert post.sum() == pytest.approx(1.0, abs=1e-12)
            assert ((post >= -1e-15) & (post <= 1 + 1e-15)).all()

    def test_permuting_next_cells_permutes_posterior(self, worked_example):
        prev = LocationSet(cells=(0, 1, 2), real_index=0)
        priors = normalized_priors(worked_example, prev)
        a = posterior_pair(
            worked_example, prev, priors, LocationSet(cells=(0, 1, 2), real_index=0)
        )
        b = posterior_pair(
            worked_example, prev, priors, LocationSet(cells=(2, 0, 1), real_index=0)
        )
        np.testing.assert_allclose(a, [b[1], b[2], b[0]], atol=1e-15)


class TestTransitionEntropyPair:
    def test_golden_entropy(self, worked_example):
        prev = LocationSet(cells=(0, 1, 2), real_index=0)
        nxt = LocationSet(cells=(0, 1, 2), real_index=0)
        v = transition_entropy_pair(worked_example, prev, nxt)
        assert v == pytest.approx(GOLDEN_ENTROPY, abs=1e-12)

    def test_uniform_everything_hits_log2k(self, uniform_history):
        prev = LocationSet(cells=(0, 1, 2), real_index=0)
        nxt = LocationSet(cells=(4, 9, 14, 2), real_index=0)
        assert transition_entropy_pair(
            uniform_history, prev, nxt
        ) == pytest.approx(2.0, abs=1e-12)

    def test_pseudocode_transcription_oracle(self, bench_history):
        # literal loop: accumulate each next cell's posterior, then entropy
        rng = np.random.default_rng(17)
        for _ in range(20):
            cells = rng.choice(bench_history.grid.num_cells, 9, replace=False)
            prev = LocationSet(cells=tuple(int(c) for c in cells[:4]), real_index=0)
            nxt = LocationSet(cells=tuple(int(c) for c in cells[4:]), real_index=0)
            try:
                priors = normalized_priors(bench_history, prev)
            except AllZeroPriors:
                continue
            post = []
            for y_idx in range(nxt.k):
                total = 0.0
                for x_idx, x in enumerate(prev.cells):
                    total += (
                        priors[x_idx]
                        * _restricted_row(bench_history, x, nxt.cells)[y_idx]
                    )
                post.append(total)
            norm = sum(post)
            expect = -sum(p / norm * math.log2(p / norm) for p in post if p > 0)
            assert transition_entropy_pair(
                bench_history, prev, nxt
            ) == pytest.approx(expect, abs=1e-10)

    def test_all_zero_priors(self, grid4):
        h = build_history([("u", [0, 1])], grid4)
        prev = LocationSet(cells=(5, 6), real_index=0)
        nxt = LocationSet(cells=(0, 1), real_index=0)
        with pytest.raises(AllZeroPriors):
            transition_entropy_pair(h, prev, nxt)


def _nested_sum_posterior(h, steps):
    """Direct expansion: sum over all source chains of prior times the
    chained restricted transition probabilities."""
    k_last = steps[-1].k
    out = [0.0] * k_last
    priors = normalized_priors(h, steps[0])
    rows = [
        [
            _restricted_row(h, x, steps[j + 1].cells)
            for x in steps[j].cells
        ]
        for j in range(len(steps) - 1)
    ]
    for chain in itertools.product(*(range(s.k) for s in steps)):
        w = priors[chain[0]]
        for j in range(1, len(steps)):
            w *= rows[j - 1][chain[j - 1]][chain[j]]
        out[chain[-1]] += w
    return out


class TestPosteriorTrajectory:
    def test_length_one_is_normalized_priors(self, worked_example):
        ls = LocationSet(cells=(0, 1, 2), real_index=0)
        np.testing.assert_allclose(
            posterior_trajectory(worked_example, [ls]),
            normalized_priors(worked_example, ls),
            atol=1e-15,
        )

    def test_length_two_equals_pair(self, worked_example):
        prev = LocationSet(cells=(0, 1, 2), real_index=0)
        nxt = LocationSet(cells=(0, 1, 2), real_index=0)
        np.testing.assert_allclose(
            posterior_trajectory(worked_example, [prev, nxt]),
            posterior_pair(
                worked_example, prev, normalized_priors(worked_example, prev), nxt
            ),
            atol=1e-15,
        )

    def test_nested_sum_oracle_exhaustive_small(self, bench_history):
        rng = np.random.default_rng(23)
        checked = 0
        for _ in range(120):
            k = int(rng.integers(1, 4))
            length = int(rng.integers(1, 5))
            steps = []
            ok = True
            for j in range(length):
                cells = rng.choice(
                    bench_history.grid.num_cells, k, replace=False
                )
                steps.append(
                    LocationSet(cells=tuple(int(c) for c in cells), real_index=0)
                )
            try:
                got = posterior_trajectory(bench_history, steps)
            except AllZeroPriors:
                continue
            expect = _nested_sum_posterior(bench_history, steps)
            np.testing.assert_allclose(got, expect, atol=1e-10)
            checked += 1
        assert checked >= 80

    def test_intermediate_zero_count_sets_allowed(self, grid4):
        # only the first step's priors are read; later sets may be unqueried
        h = build_history([("u", [0, 1, 0, 2])], grid4)
        steps = [
            LocationSet(cells=(0, 1), real_index=0),
            LocationSet(cells=(14, 15), real_index=0),  # zero query counts
            LocationSet(cells=(1, 2), real_index=0),
        ]
        post = posterior_trajectory(h, steps)
        assert post.sum() == pytest.approx(1.0, abs=1e-12)

    def test_first_step_zero_priors_raises(self, grid4):
        h = build_history([("u", [0, 1])], grid4)
        with pytest.raises(AllZeroPriors):
            posterior_trajectory(
                h,
                [
                    LocationSet(cells=(14, 15), real_index=0),
                    LocationSet(cells=(0, 1), real_index=0),
                ],
            )


class TestTransitionEntropyTrajectory:
    def test_length_two_equals_pair_entropy(self, worked_example):
        prev = LocationSet(cells=(0, 1, 2), real_index=0)
        nxt = LocationSet(cells=(0, 1, 2), real_index=0)
        assert transition_entropy_trajectory(
            worked_example, [prev, nxt]
        ) == pytest.approx(
            transition_entropy_pair(worked_example, prev, nxt), abs=1e-15
        )

    def test_oracle_composition(self, bench_history):
        rng = np.random.default_rng(29)
        for _ in range(15):
            steps = [
                LocationSet(
                    cells=tuple(
                        int(c)
                        for c in rng.choice(
                            bench_history.grid.num_cells, 3, replace=False
                        )
                    ),
                    real_index=0,
                )
                for _ in range(3)
            ]
            try:
                got = transition_entropy_trajectory(bench_history, steps)
            except AllZeroPriors:
                continue
            expect_vec = _nested_sum_posterior(bench_history, steps)
            expect = -sum(p * math.log2(p) for p in expect_vec if p > 0)
            assert got == pytest.approx(expect, abs=1e-10)

    def test_entropy_under_log2k(self, bench_history):
        rng = np.random.default_rng(31)
        ctx = GeneratorContext(history=bench_history, rng_seed=3)
        for seed in range(10):
            steps = [
                random_gen(ctx.with_seed(seed * 7 + j), int(rng.integers(64)), 5)
                for j in range(3)
            ]
            v = transition_entropy_trajectory(bench_history, steps)
            assert 0.0 <= v <= math.log2(5) + 1e-9

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reltm import _kernels
from reltm.automata import clause_evaluate, init_bank, train_step_binary
from reltm.convolution import (
    WindowSet,
    clause_evaluate_conv,
    pad_windows,
    select_feedback_window,
    train_step_conv,
)


def team(includes, n_literals, n_states=100):
    t = np.full(n_literals, n_states, dtype=np.int16)
    for k in includes:
        t[k] = n_states + 1
    return t


class TestWindowSet:
    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            WindowSet(np.zeros((0, 4), dtype=np.uint8))

    def test_rejects_non_2d(self):
        with pytest.raises(ValueError):
            WindowSet(np.zeros(4, dtype=np.uint8))

    def test_default_provenance(self):
        ws = WindowSet(np.zeros((3, 2), dtype=np.uint8))
        assert ws.provenance == (0, 1, 2)
        assert len(ws) == 3


class TestConvEvaluate:
    def test_fires_if_any_window_fires(self):
        t = team([0], 2)
        ws = WindowSet(np.array([[0, 1], [1, 0]], dtype=np.uint8))
        assert clause_evaluate_conv(t, ws, 100) == 1

    def test_zero_when_no_window_fires(self):
        t = team([0], 2)
        ws = WindowSet(np.array([[0, 1], [0, 0]], dtype=np.uint8))
        assert clause_evaluate_conv(t, ws, 100) == 0

    def test_width_mismatch_rejected(self):
        with pytest.raises(ValueError):
            clause_evaluate_conv(team([0], 3), np.zeros((1, 2), np.uint8), 100)

    @settings(max_examples=2000, deadline=None)
    @given(st.data())
    def test_or_decomposition(self, data):
        width = data.draw(st.integers(1, 6))
        n_windows = data.draw(st.integers(1, 4))
        includes = data.draw(st.sets(st.integers(0, width - 1)))
        W = np.array(
            data.draw(st.lists(
                st.lists(st.integers(0, 1), min_size=width, max_size=width),
                min_size=n_windows, max_size=n_windows)),
            dtype=np.uint8,
        )
        t = team(includes, width)
        for mode in ("learn", "classify"):
            per_window = max(
                clause_evaluate(t, W[w], 100, mode=mode)
                for w in range(n_windows)
            )
            assert clause_evaluate_conv(t, W, 100, mode=mode) == per_window

    def test_degenerate_single_window_equals_plain(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            t = rng.integers(99, 103, size=5).astype(np.int16)
            x = rng.integers(0, 2, size=5).astype(np.uint8)
            assert clause_evaluate_conv(t, x[None, :], 100) == \
                clause_evaluate(t, x, 100)


class TestFeedbackWindow:
    def test_single_firing_window_always_chosen(self):
        t = team([0], 2)
        ws = WindowSet(np.array([[0, 1], [1, 0]], dtype=np.uint8))
        for seed in range(20):
            w = select_feedback_window(t, ws, 100, np.random.default_rng(seed))
            assert w.tolist() == [1, 0]

    def test_uniform_over_firing_windows(self):
        t = team([0], 2)
        ws = WindowSet(np.array([[1, 0], [0, 1], [1, 1]], dtype=np.uint8))
        rng = np.random.default_rng(0)
        counts = {0: 0, 2: 0}
        for _ in range(10_000):
            w = select_feedback_window(t, ws, 100, rng)
            counts[0 if w.tolist() == [1, 0] else 2] += 1
        for c in counts.values():
            assert abs(c / 10_000 - 0.5) < 0.02

    def test_fallback_when_nothing_fires(self):
        t = team([0], 2)
        ws = WindowSet(np.array([[0, 1], [0, 0]], dtype=np.uint8))
        w = select_feedback_window(t, ws, 100, np.random.default_rng(0))
        assert w.shape == (2,)

    def test_window_order_invariance(self):
        # permuting windows changes neither conv output nor the selection law
        t = team([0], 2)
        W = np.array([[1, 0], [0, 1], [1, 1]], dtype=np.uint8)
        Wrev = W[::-1].copy()
        assert clause_evaluate_conv(t, W, 100) == clause_evaluate_conv(t, Wrev, 100)
        rng = np.random.default_rng(1)
        seen = {tuple(select_feedback_window(t, Wrev, 100, rng)) for _ in range(200)}
        assert seen == {(1, 0), (1, 1)}


class TestTrainStepConv:
    def test_single_window_bit_identical_to_plain(self):
        n_states, T, s = 100, 15, 3.0
        for seed in range(4):
            rng1 = np.random.default_rng(seed)
            rng2 = np.random.default_rng(seed)
            bank1 = init_bank(8, 6, n_states, rng1)
            bank2 = init_bank(8, 6, n_states, rng2)
            data_rng = np.random.default_rng(seed)
            for _ in range(30):
                x = data_rng.integers(0, 2, size=6).astype(np.uint8)
                y = int(data_rng.integers(0, 2))
                v1 = train_step_binary(bank1, x, y, n_states, T, s, rng1)
                v2 = train_step_conv(bank2, x[None, :], y, n_states, T, s, rng2)
                assert v1 == v2
                assert np.array_equal(bank1, bank2)

    def test_learns_existential_pattern(self):
        # label 1 iff some window contains the bit pattern (1, 1)
        rng = np.random.default_rng(3)
        bank = init_bank(10, 2, 100, rng)
        data_rng = np.random.default_rng(4)
        for _ in range(3000):
            y = int(data_rng.integers(0, 2))
            other = data_rng.integers(0, 2, size=2).astype(np.uint8)
            if other.sum() == 2:
                other[data_rng.integers(0, 2)] = 0
            target = np.array([1, 1], dtype=np.uint8) if y else other
            W = np.stack([other, target])
            train_step_conv(bank, W, y, 100, 10, 3.0, data_rng)
        both = np.array([[0, 1], [1, 1]], dtype=np.uint8)
        neither = np.array([[0, 1], [1, 0]], dtype=np.uint8)
        assert _kernels.bank_vote_sum(bank, both, 100, False) >= 0
        assert _kernels.bank_vote_sum(bank, neither, 100, False) < 0


class TestPadWindows:
    def test_counts_and_padding(self):
        a = np.ones((2, 3), dtype=np.uint8)
        b = np.ones((1, 3), dtype=np.uint8)
        Xpad, wcounts = pad_windows([a, b])
        assert Xpad.shape == (2, 2, 3)
        assert wcounts.tolist() == [2, 1]
        assert np.all(Xpad[1, 1] == 0)

    def test_rejects_mixed_widths(self):
        with pytest.raises(ValueError):
            pad_windows([np.ones((1, 3), np.uint8), np.ones((1, 2), np.uint8)])

    def test_rejects_empty_list(self):
        with pytest.raises(ValueError):
            pad_windows([])

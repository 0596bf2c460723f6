"""Numba-compiled training and inference kernels.

All kernels operate on raw arrays:

* ``state``: int16 automaton states, shape ``(n_clauses, n_literals)``,
  values in ``[1, 2 * n_states]``.  States ``<= n_states`` mean Exclude,
  states ``> n_states`` mean Include.  The first ``n_clauses // 2`` rows
  are positive-polarity clauses, the rest negative.
* ``X``: uint8 literal windows, shape ``(n_windows, n_literals)``.  A
  non-convolutional sample is simply a single-window matrix.

Randomness comes exclusively from the ``numpy.random.Generator`` passed
in (PCG64 under ``numpy.random.default_rng``).  The draw order is fixed
and documented per kernel so that training is bit-reproducible given a
seed: window selection draws happen during clause evaluation (only when
a sample has more than one window), then one gate draw per clause, then
one draw per automaton inside the Type I branches (skipped for the
boosted true-positive branch).
"""

import numpy as np
from numba import njit


@njit(cache=True)
def clause_output(state_row, x, n_states, learn):
    """Conjunction of included literals; empty clause is 1 when learning, else 0."""
    any_include = False
    for k in range(state_row.shape[0]):
        if state_row[k] > n_states:
            any_include = True
            if x[k] == 0:
                return 0
    if not any_include:
        return 1 if learn else 0
    return 1


@njit(cache=True)
def _evaluate_windows(state, X, n_states, learn, outs, sel, rng):
    """Per-clause existential OR over windows, reservoir-picking a firing window.

    When no window fires the selection is irrelevant for feedback (the
    weak Type I branch ignores literal values), so no fallback draw is
    consumed.  Single-window samples consume no selection draws at all,
    which keeps the non-convolutional path's draw order identical to a
    plain per-example update.
    """
    n_clauses = state.shape[0]
    n_windows = X.shape[0]
    for j in range(n_clauses):
        out = 0
        pick = 0
        fired = 0
        for w in range(n_windows):
            if clause_output(state[j], X[w], n_states, learn) == 1:
                out = 1
                fired += 1
                if n_windows > 1:
                    if rng.random() < 1.0 / fired:
                        pick = w
        outs[j] = out
        sel[j] = pick


@njit(cache=True)
def _type_i(state_row, x, out, n_states, s, boost, rng):
    for k in range(state_row.shape[0]):
        if out == 1 and x[k] == 1:
            if boost or rng.random() < (s - 1.0) / s:
                if state_row[k] < 2 * n_states:
                    state_row[k] += 1
        else:
            if rng.random() < 1.0 / s:
                if state_row[k] > 1:
                    state_row[k] -= 1


@njit(cache=True)
def _type_ii(state_row, x, out, n_states):
    if out == 0:
        return
    for k in range(state_row.shape[0]):
        if x[k] == 0 and state_row[k] <= n_states:
            state_row[k] += 1


@njit(cache=True)
def train_bank_step(state, X, y, n_states, threshold, s, boost, rng):
    """One online update of a single clause bank on one (windowed) sample."""
    n_clauses = state.shape[0]
    half = n_clauses // 2
    outs = np.empty(n_clauses, np.uint8)
    sel = np.empty(n_clauses, np.int64)
    _evaluate_windows(state, X, n_states, True, outs, sel, rng)

    v = 0
    for j in range(n_clauses):
        if j < half:
            v += outs[j]
        else:
            v -= outs[j]
    vc = v
    if vc > threshold:
        vc = threshold
    elif vc < -threshold:
        vc = -threshold
    if y == 1:
        eps = (threshold - vc) / (2.0 * threshold)
    else:
        eps = (threshold + vc) / (2.0 * threshold)

    for j in range(n_clauses):
        if rng.random() >= eps:
            continue
        positive = j < half
        x = X[sel[j]]
        if positive == (y == 1):
            _type_i(state[j], x, outs[j], n_states, s, boost, rng)
        else:
            _type_ii(state[j], x, outs[j], n_states)
    return v


@njit(cache=True)
def bank_vote_sum(state, X, n_states, learn):
    """Existential clause outputs over windows, summed with polarity."""
    n_clauses = state.shape[0]
    half = n_clauses // 2
    v = 0
    for j in range(n_clauses):
        out = 0
        for w in range(X.shape[0]):
            if clause_output(state[j], X[w], n_states, learn) == 1:
                out = 1
                break
        if j < half:
            v += out
        else:
            v -= out
    return v


@njit(cache=True)
def _shuffle(order, rng):
    for i in range(order.shape[0] - 1, 0, -1):
        j = rng.integers(0, i + 1)
        tmp = order[i]
        order[i] = order[j]
        order[j] = tmp


@njit(cache=True)
def fit_binary(state, Xpad, wcounts, y, epochs, n_states, threshold, s, boost, rng):
    """Epoch loop for a single bank; samples are shuffled each epoch."""
    n_samples = y.shape[0]
    order = np.arange(n_samples)
    for _ in range(epochs):
        _shuffle(order, rng)
        for i in range(n_samples):
            idx = order[i]
            train_bank_step(
                state, Xpad[idx, : wcounts[idx]], y[idx],
                n_states, threshold, s, boost, rng,
            )


@njit(cache=True)
def fit_multiclass(states, Xpad, wcounts, y, epochs, n_states, threshold, s, boost, rng):
    """One-vs-rest epochs: the target bank sees y=1, one sampled other bank y=0."""
    n_classes = states.shape[0]
    n_samples = y.shape[0]
    order = np.arange(n_samples)
    for _ in range(epochs):
        _shuffle(order, rng)
        for i in range(n_samples):
            idx = order[i]
            X = Xpad[idx, : wcounts[idx]]
            target = y[idx]
            train_bank_step(states[target], X, 1, n_states, threshold, s, boost, rng)
            if n_classes > 1:
                neg = rng.integers(0, n_classes - 1)
                if neg >= target:
                    neg += 1
                train_bank_step(states[neg], X, 0, n_states, threshold, s, boost, rng)


@njit(cache=True)
def vote_sums_dataset(states, Xpad, wcounts, n_states):
    """Classify-mode vote sums, shape (n_samples, n_classes)."""
    n_samples = Xpad.shape[0]
    n_classes = states.shape[0]
    votes = np.empty((n_samples, n_classes), np.int64)
    for i in range(n_samples):
        X = Xpad[i, : wcounts[i]]
        for c in range(n_classes):
            votes[i, c] = bank_vote_sum(states[c], X, n_states, False)
    return votes

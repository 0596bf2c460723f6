"""Two-action Tsetlin automata, conjunctive clauses and the binary machine.

State layout: an automaton holds an integer in ``[1, 2 * n_states]``.
Values up to ``n_states`` select the Exclude action, values above it
Include.  Reward moves the state away from the Exclude/Include boundary,
penalty moves it toward (and across) the boundary; both saturate.

A clause team is one row of ``n_literals`` automata.  Clause banks hold
``n_clauses`` teams, the first half voting with positive polarity, the
second half negative.

Randomness: every stochastic routine takes a ``numpy.random.Generator``
(PCG64 via ``numpy.random.default_rng``).  The module-level functions
here are the readable reference path used directly by tests; the numba
kernels in :mod:`reltm._kernels` consume draws in the same order, so a
single-window kernel step is bit-identical to :func:`train_step_binary`
under the same seed.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from . import _kernels

REWARD = "reward"
PENALTY = "penalty"


def to_literals(X, include_negated=True):
    """Append negated features: (n, f) -> (n, 2f) laid out [x, 1-x]."""
    X = np.ascontiguousarray(np.asarray(X, dtype=np.uint8))
    if not include_negated:
        return X
    return np.ascontiguousarray(np.hstack([X, 1 - X]))


def ta_action(value, n_states):
    """'include' iff the state is on the upper half."""
    return "include" if value > n_states else "exclude"


def ta_transition(value, n_states, event):
    """Apply one reward/penalty to a single automaton state."""
    if event == REWARD:
        step = 1 if value > n_states else -1
    elif event == PENALTY:
        step = -1 if value > n_states else 1
    else:
        raise ValueError(f"unknown event {event!r}")
    return min(2 * n_states, max(1, value + step))


def clause_evaluate(team, x, n_states, mode="classify"):
    """Conjunction over included literals.

    An empty include set yields 1 in learn mode (fresh clauses must be
    able to receive Type I feedback) and 0 in classify mode (no vacuous
    votes).
    """
    team = np.asarray(team)
    x = np.asarray(x, dtype=np.uint8)
    if team.shape[0] != x.shape[0]:
        raise ValueError(f"team width {team.shape[0]} != input width {x.shape[0]}")
    if mode not in ("learn", "classify"):
        raise ValueError(f"unknown mode {mode!r}")
    include = team > n_states
    if not include.any():
        return 1 if mode == "learn" else 0
    return int(np.all(x[include] == 1))


def vote_sum(outputs):
    """Positive-polarity half minus negative-polarity half."""
    outputs = np.asarray(outputs)
    half = outputs.shape[0] // 2
    return int(outputs[:half].sum() - outputs[half:].sum())


def clip_vote(v, threshold):
    return max(-threshold, min(threshold, int(v)))


def type_i_feedback(team, x, s, rng, n_states, boost=False):
    """Pattern-growing feedback, mutating ``team`` in place.

    Where the clause fires and the literal is 1, the automaton is pushed
    one step toward (deeper) Include with probability (s-1)/s, or always
    when ``boost`` is set.  Everywhere else it is pushed one step toward
    Exclude with probability 1/s.
    """
    out = clause_evaluate(team, x, n_states, mode="learn")
    for k in range(team.shape[0]):
        if out == 1 and x[k] == 1:
            if boost or rng.random() < (s - 1.0) / s:
                if team[k] < 2 * n_states:
                    team[k] += 1
        else:
            if rng.random() < 1.0 / s:
                if team[k] > 1:
                    team[k] -= 1
    return team


def type_ii_feedback(team, x, n_states):
    """Discrimination feedback: on a firing clause, push excluded 0-literals toward Include."""
    out = clause_evaluate(team, x, n_states, mode="learn")
    if out == 0:
        return team
    for k in range(team.shape[0]):
        if x[k] == 0 and team[k] <= n_states:
            team[k] += 1
    return team


def train_step_binary(state, x, y, n_states, threshold, s, rng, boost=False):
    """One online update of a clause bank on a plain (single-window) sample.

    Returns the (unclipped) vote sum.  Feedback gates use one uniform
    draw per clause against eps/(2T); a clipped sum already at the
    signed target makes the step an identity.
    """
    n_clauses = state.shape[0]
    half = n_clauses // 2
    outs = [clause_evaluate(state[j], x, n_states, mode="learn") for j in range(n_clauses)]
    v = vote_sum(outs)
    vc = clip_vote(v, threshold)
    eps = (threshold - vc) / (2.0 * threshold) if y == 1 else (threshold + vc) / (2.0 * threshold)
    for j in range(n_clauses):
        if rng.random() >= eps:
            continue
        positive = j < half
        if positive == (y == 1):
            _type_i_with_output(state[j], x, outs[j], s, rng, n_states, boost)
        else:
            if outs[j] == 1:
                for k in range(state.shape[1]):
                    if x[k] == 0 and state[j, k] <= n_states:
                        state[j, k] += 1
    return v


def _type_i_with_output(team, x, out, s, rng, n_states, boost):
    # Same rules as type_i_feedback, but with the clause output already known.
    for k in range(team.shape[0]):
        if out == 1 and x[k] == 1:
            if boost or rng.random() < (s - 1.0) / s:
                if team[k] < 2 * n_states:
                    team[k] += 1
        else:
            if rng.random() < 1.0 / s:
                if team[k] > 1:
                    team[k] -= 1


def init_bank(n_clauses, n_literals, n_states, rng):
    """Boundary-random start: every automaton at n_states or n_states + 1."""
    return rng.integers(
        n_states, n_states + 2, size=(n_clauses, n_literals)
    ).astype(np.int16)


class TsetlinMachine(ClassifierMixin, BaseEstimator):
    """Binary Tsetlin machine classifier over dense binary feature vectors.

    Parameters
    ----------
    n_clauses : total clause count, half per polarity (must be even).
    threshold : voting target T used for clipping and feedback annealing.
    s : specificity, > 1; higher values yield more specific patterns.
    n_states : states per automaton action.
    epochs : passes over the (shuffled) training set.
    boost_true_positive : give the strong Type I branch probability 1.
    include_negated : extend features with their negations.
    random_state : seed for the PCG64 generator driving all randomness.
    """

    def __init__(self, n_clauses=20, threshold=15, s=3.0, n_states=100,
                 epochs=100, boost_true_positive=False, include_negated=True,
                 random_state=None):
        self.n_clauses = n_clauses
        self.threshold = threshold
        self.s = s
        self.n_states = n_states
        self.epochs = epochs
        self.boost_true_positive = boost_true_positive
        self.include_negated = include_negated
        self.random_state = random_state

    def _validate_params(self):
        if self.n_clauses < 2 or self.n_clauses % 2:
            raise ValueError("n_clauses must be even and >= 2")
        if self.threshold < 1:
            raise ValueError("threshold must be >= 1")
        if self.s <= 1.0:
            raise ValueError("s must be > 1")
        if not 1 <= self.n_states <= 16000:
            raise ValueError("n_states must be in [1, 16000]")

    def fit(self, X, y):
        self._validate_params()
        X = np.asarray(X, dtype=np.uint8)
        y = np.asarray(y, dtype=np.int64)
        if X.shape[0] == 0:
            raise ValueError("empty training set")
        lits = to_literals(X, self.include_negated)
        rng = np.random.default_rng(self.random_state)
        self.n_features_in_ = X.shape[1]
        self.state_ = init_bank(self.n_clauses, lits.shape[1], self.n_states, rng)
        wcounts = np.ones(lits.shape[0], dtype=np.int64)
        _kernels.fit_binary(
            self.state_, lits[:, None, :], wcounts, y, self.epochs,
            self.n_states, self.threshold, self.s, self.boost_true_positive, rng,
        )
        return self

    def vote_sums(self, X):
        X = np.asarray(X, dtype=np.uint8)
        lits = to_literals(X, self.include_negated)
        wcounts = np.ones(lits.shape[0], dtype=np.int64)
        votes = _kernels.vote_sums_dataset(
            self.state_[None, :, :], lits[:, None, :], wcounts, self.n_states
        )
        return votes[:, 0]

    def predict(self, X):
        return (self.vote_sums(X) >= 0).astype(np.int64)

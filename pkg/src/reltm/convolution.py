"""Convolution over variable-assignment windows.

A windowed sample is a small stack of literal vectors, one per variable
assignment.  A clause fires on the sample iff it fires on at least one
window (exists-semantics); feedback for a firing clause is applied on a
uniformly chosen firing window, reinforcing one witness of the
existential.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels


@dataclass
class WindowSet:
    """Stack of same-width literal vectors with per-window provenance ids."""

    windows: np.ndarray
    provenance: tuple = field(default=())

    def __post_init__(self):
        self.windows = np.ascontiguousarray(np.asarray(self.windows, dtype=np.uint8))
        if self.windows.ndim != 2 or self.windows.shape[0] == 0:
            raise ValueError("window set must be a nonempty 2D bit matrix")
        if not self.provenance:
            self.provenance = tuple(range(self.windows.shape[0]))

    def __len__(self):
        return self.windows.shape[0]


def _window_matrix(ws):
    return ws.windows if isinstance(ws, WindowSet) else np.asarray(ws, dtype=np.uint8)


def clause_evaluate_conv(team, ws, n_states, mode="classify"):
    """1 iff any window makes the clause fire."""
    team = np.asarray(team)
    W = _window_matrix(ws)
    if W.shape[1] != team.shape[0]:
        raise ValueError(f"window width {W.shape[1]} != team width {team.shape[0]}")
    learn = mode == "learn"
    if mode not in ("learn", "classify"):
        raise ValueError(f"unknown mode {mode!r}")
    for w in range(W.shape[0]):
        if _kernels.clause_output(team, W[w], n_states, learn) == 1:
            return 1
    return 0


def select_feedback_window(team, ws, n_states, rng):
    """Pick the window a firing clause's feedback is computed on.

    Uniform among firing windows; when no window fires, uniform among
    all windows (the choice is then immaterial to Type I/II, but keeps
    the operator total).
    """
    W = _window_matrix(ws)
    if W.shape[0] == 0:
        raise ValueError("empty window set")
    firing = [
        w for w in range(W.shape[0])
        if _kernels.clause_output(team, W[w], n_states, True) == 1
    ]
    pool = firing if firing else range(W.shape[0])
    return W[rng.choice(np.fromiter(pool, dtype=np.int64))]


def train_step_conv(state, ws, y, n_states, threshold, s, rng, boost=False):
    """One bank update where clause outputs are existential over windows."""
    W = np.ascontiguousarray(_window_matrix(ws))
    return _kernels.train_bank_step(
        state, W, y, n_states, threshold, s, boost, rng
    )


def pad_windows(window_matrices):
    """Stack variable-count window sets into (Xpad, wcounts) for the kernels.

    Padding rows are all-zero and never touched (the kernels only read
    the first ``wcounts[i]`` windows of sample ``i``).
    """
    mats = [_window_matrix(w) for w in window_matrices]
    if not mats:
        raise ValueError("no samples")
    width = mats[0].shape[1]
    for m in mats:
        if m.shape[1] != width:
            raise ValueError("inconsistent literal widths across samples")
    wmax = max(m.shape[0] for m in mats)
    Xpad = np.zeros((len(mats), wmax, width), dtype=np.uint8)
    wcounts = np.empty(len(mats), dtype=np.int64)
    for i, m in enumerate(mats):
        Xpad[i, : m.shape[0]] = m
        wcounts[i] = m.shape[0]
    return Xpad, wcounts

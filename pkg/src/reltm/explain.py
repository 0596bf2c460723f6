"""Interpretability surfaces: clause dumps, local snapshots, Horn export, cost.

Clause text grammar (used by the global dump and snapshots):

    class=<label> polarity=<+|-> clause=<idx>: <literal> AND <literal> ...

where a literal is an atom string or ``NOT(atom)``; an empty include set
renders as ``-``.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass

import numpy as np

from .logic import Atom, HornClause, Program, Var


@dataclass(frozen=True)
class CostParams:
    """Unit costs: alpha = bit AND, beta = integer add, gamma = automaton update."""

    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        if min(self.alpha, self.beta, self.gamma) < 0:
            raise ValueError("costs must be nonnegative")


def literal_names(index, include_negated):
    names = [str(a) for a in index.atoms]
    if include_negated:
        names += [f"NOT({a})" for a in index.atoms]
    return names


def clause_includes(team, n_states):
    """Indices of literals the team currently includes."""
    return [k for k in range(len(team)) if team[k] > n_states]


def render_clause(includes, names):
    if not includes:
        return "-"
    return " AND ".join(names[k] for k in includes)


def _banks(model):
    """(label, state) pairs for a multiclass or single-bank model."""
    if not hasattr(model, "state_"):
        raise ValueError("model is not trained")
    if hasattr(model, "classes_"):
        return list(zip(model.classes_, model.state_))
    return [(1, model.state_)]


def global_dump(model, index):
    """Every clause of every bank, rendered in stable order."""
    names = literal_names(index, model.include_negated)
    lines = []
    for label, state in _banks(model):
        half = state.shape[0] // 2
        for j in range(state.shape[0]):
            pol = "+" if j < half else "-"
            body = render_clause(clause_includes(state[j], model.n_states), names)
            lines.append(f"class={label} polarity={pol} clause={j}: {body}")
    return "\n".join(lines) + "\n"


_DUMP_RE = re.compile(r"^class=(\S+) polarity=([+-]) clause=(\d+): (.*)$")


def parse_global_dump(text):
    """Inverse of global_dump: list of (label, polarity, idx, [literal, ...])."""
    out = []
    for raw in text.splitlines():
        if not raw.strip():
            continue
        m = _DUMP_RE.match(raw)
        if not m:
            raise ValueError(f"bad dump line {raw!r}")
        label, pol, idx, body = m.groups()
        literals = [] if body == "-" else body.split(" AND ")
        out.append((label, pol, int(idx), literals))
    return out


def local_snapshot(model, windows, index):
    """Per-class firing clauses for one encoded instance.

    Identical firing clauses are grouped; their count is the vote
    contribution, so per-class totals equal the engine's vote sums.
    ``windows`` is the instance's presence-bit window matrix.
    """
    from .convolution import clause_evaluate_conv

    names = literal_names(index, model.include_negated)
    W = np.asarray(windows, dtype=np.uint8)
    if W.ndim == 1:
        W = W[None, :]
    if model.include_negated:
        W = np.hstack([W, 1 - W])
    snapshot = {}
    totals = {}
    for label, state in _banks(model):
        half = state.shape[0] // 2
        grouped = {}
        total = 0
        for j in range(state.shape[0]):
            if clause_evaluate_conv(state[j], W, model.n_states, mode="classify") != 1:
                continue
            pol = "+" if j < half else "-"
            body = render_clause(clause_includes(state[j], model.n_states), names)
            grouped[(body, pol)] = grouped.get((body, pol), 0) + 1
            total += 1 if pol == "+" else -1
        snapshot[label] = [
            {"clause": body, "polarity": pol, "votes": votes}
            for (body, pol), votes in sorted(grouped.items(), key=lambda kv: (kv[0][1], kv[0][0]))
        ]
        totals[label] = total
    labels = [label for label, _ in _banks(model)]
    winner = labels[int(np.argmax([totals[l] for l in labels]))]
    return {"classes": snapshot, "totals": totals, "winner": winner}


def format_snapshot(snap):
    lines = []
    for label, clauses in snap["classes"].items():
        lines.append(f"class {label} (total {snap['totals'][label]:+d})")
        for row in clauses:
            lines.append(f"  {row['polarity']} {row['votes']:4d}  {row['clause']}")
    lines.append(f"winner: {snap['winner']}")
    return "\n".join(lines) + "\n"


def export_horn(model, index, heads):
    """Positive clauses as Horn rules `head :- included literals`.

    ``heads`` maps each class label to its head atom (for a single-bank
    model, the map {1: head}).  Empty clauses are skipped with a
    warning; the result parses with the logic-module grammar.
    """
    clauses = []
    seen = set()
    skipped = 0
    o = len(index)
    for label, state in _banks(model):
        head = heads[label]
        half = state.shape[0] // 2
        for j in range(half):
            includes = clause_includes(state[j], model.n_states)
            if not includes:
                skipped += 1
                continue
            body = tuple(
                index.atoms[k] if k < o
                else Atom(index.atoms[k - o].relation, index.atoms[k - o].args, True)
                for k in includes
            )
            rule = HornClause(head, body)
            if rule not in seen:
                seen.add(rule)
                clauses.append(rule)
    if skipped:
        warnings.warn(f"skipped {skipped} empty positive clauses")
    return Program(clauses)


def movement_class_heads(labels, query_var="Per1", relation="CurrentlyAt"):
    """Heads CurrentlyAt(Per1, Loc_k) for generalized movement labels."""
    return {l: Atom(relation, (Var(query_var), Var(l))) for l in labels}


def kb_metrics(persons, locations, max_statements=3, dataset=None,
               lexicon=None):
    """Feature widths of both encodings and their compaction ratio."""
    from .qa import (DEFAULT_LEXICON, movement_index_constants,
                     movement_index_generalized, parse_instance)

    width_constants = len(movement_index_constants(persons, locations,
                                                   max_statements=max_statements))
    width_generalized = len(movement_index_generalized(max_statements))
    metrics = {
        "width_constants": width_constants,
        "width_generalized": width_generalized,
        "compaction_ratio": width_constants / width_generalized,
    }
    if dataset is not None:
        lexicon = lexicon or DEFAULT_LEXICON
        distinct = set()
        for inst in dataset.instances:
            parsed = parse_instance(
                list(inst.statements) + [inst.question], lexicon,
                answer=inst.answer, instance_id=inst.id,
            )
            distinct.update(parsed.statement_atoms)
            distinct.add(parsed.query_atom)
        metrics["measured_distinct_atoms"] = len(distinct)
    return metrics


def cost_estimate(d, o, m, v, params=CostParams(), convolutional=False):
    """Worst-case training cost d * [g(2o+1)m + (v! if conv) a*2o*m + b(m-1)]."""
    if min(d, o, m, v) < 0:
        raise ValueError("inputs must be nonnegative")
    windows = math.factorial(v) if convolutional else 1
    return d * (
        params.gamma * (2 * o + 1) * m
        + windows * params.alpha * 2 * o * m
        + params.beta * (m - 1)
    )

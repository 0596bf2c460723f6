"""Versioned plain-text model serialization.

Layout:

    rtm-model v1
    kind=<binary|multiclass|relational>
    <hyperparameter key>=<value> lines
    meta.<key>=<value> lines (free-form run metadata)
    one line per clause: `<polarity> <class id> <state,state,...>`

The round trip is lossless: automaton states, hyperparameters and class
labels are restored exactly.
"""

from __future__ import annotations

import numpy as np

from .automata import TsetlinMachine
from .encoder import AtomIndex, RelationalTsetlinMachine, variable_atom_patterns
from .logic import RelationSymbol
from .multiclass import MultiClassTsetlinMachine

HEADER = "rtm-model v1"

_COMMON_KEYS = ("n_clauses", "threshold", "s", "n_states", "epochs",
                "boost_true_positive", "include_negated", "random_state")


def _fmt(value):
    if isinstance(value, bool):
        return "1" if value else "0"
    if value is None:
        return "none"
    return repr(value) if isinstance(value, float) else str(value)


def _parse_value(key, raw):
    if raw == "none":
        return None
    if key in ("s",):
        return float(raw)
    if key in ("boost_true_positive", "include_negated", "convolution"):
        return raw == "1"
    if key in ("mode",):
        return raw
    return int(raw)


def save_model(model, path=None, meta=None):
    """Serialize a trained machine; returns the text, optionally writing it."""
    if not hasattr(model, "state_"):
        raise ValueError("model is not trained")
    lines = [HEADER]
    if isinstance(model, MultiClassTsetlinMachine):
        kind = "multiclass"
        banks = list(zip([str(c) for c in model.classes_], model.state_))
        extra_keys = ()
    elif isinstance(model, RelationalTsetlinMachine):
        kind = "relational"
        banks = [("1", model.state_)]
        extra_keys = ("mode", "convolution", "max_free_variables")
    elif isinstance(model, TsetlinMachine):
        kind = "binary"
        banks = [("1", model.state_)]
        extra_keys = ()
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    lines.append(f"kind={kind}")
    for key in _COMMON_KEYS + tuple(extra_keys):
        lines.append(f"{key}={_fmt(getattr(model, key))}")
    if kind == "multiclass":
        ckind = "int" if np.issubdtype(model.classes_.dtype, np.integer) else "str"
        lines.append(f"classes_kind={ckind}")
        lines.append("classes=" + ",".join(str(c) for c in model.classes_))
    if kind == "relational":
        if model.mode != "generalized":
            raise ValueError("only generalized-mode relational models serialize")
        rels = sorted({(a.relation, len(a.args)) for a in model.index_.atoms})
        lines.append("relations=" + ",".join(f"{n}/{a}" for n, a in rels))
        variables = sorted({str(t) for a in model.index_.atoms for t in a.args})
        lines.append(f"n_variables={len(variables)}")
    for label, state in banks:
        half = state.shape[0] // 2
        for j in range(state.shape[0]):
            pol = "+" if j < half else "-"
            states = ",".join(str(int(v)) for v in state[j])
            lines.append(f"{pol} {label} {states}")
    if meta:
        # meta lines sit with the other key=value lines on read; keep them
        # before the clause block for readability on write-after-train runs.
        lines = lines[:2] + [f"meta.{k}={v}" for k, v in sorted(meta.items())] + lines[2:]
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def load_model(path=None, text=None):
    """Rebuild a machine from its serialized form; returns (model, meta)."""
    if text is None:
        with open(path) as fh:
            text = fh.read()
    lines = [l for l in text.splitlines() if l.strip()]
    if not lines or lines[0] != HEADER:
        raise ValueError("not an rtm-model v1 file")
    params, meta, clause_lines = {}, {}, []
    classes = None
    classes_kind = "str"
    relations = None
    n_variables = None
    for line in lines[1:]:
        if line[0] in "+-" and " " in line:
            clause_lines.append(line)
            continue
        key, _, value = line.partition("=")
        if key == "classes":
            classes = value.split(",")
        elif key == "classes_kind":
            classes_kind = value
        elif key == "relations":
            relations = [
                RelationSymbol(part.split("/")[0], int(part.split("/")[1]))
                for part in value.split(",")
            ]
        elif key == "n_variables":
            n_variables = int(value)
        elif key.startswith("meta."):
            meta[key[5:]] = value
        elif key == "kind":
            params["kind"] = value
        else:
            params[key] = _parse_value(key, value)

    kind = params.pop("kind")
    bank_states = {}
    bank_order = []
    for line in clause_lines:
        pol, label, states = line.split(" ", 2)
        row = np.array([int(v) for v in states.split(",")], dtype=np.int16)
        if label not in bank_states:
            bank_states[label] = []
            bank_order.append(label)
        bank_states[label].append(row)

    if kind == "multiclass":
        model = MultiClassTsetlinMachine(**{k: params[k] for k in _COMMON_KEYS})
        caster = int if classes_kind == "int" else str
        model.classes_ = np.array([caster(c) for c in classes])
        model.state_ = np.stack([np.stack(bank_states[str(c)]) for c in classes])
        model.n_literals_ = model.state_.shape[2]
    elif kind == "relational":
        keys = _COMMON_KEYS + ("mode", "convolution", "max_free_variables")
        model = RelationalTsetlinMachine(**{k: params[k] for k in keys})
        model.state_ = np.stack(bank_states["1"])
        model.index_ = AtomIndex(tuple(variable_atom_patterns(relations, n_variables)))
    else:
        model = TsetlinMachine(**{k: params[k] for k in _COMMON_KEYS})
        model.state_ = np.stack(bank_states["1"])
        lits = model.state_.shape[1]
        model.n_features_in_ = lits // 2 if model.include_negated else lits
    return model, meta

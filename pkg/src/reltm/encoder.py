"""Mapping atom-set observations onto propositional Tsetlin machine inputs.

The relational path detaches observations from their constants: target
constants become bound variables Z1.. (left to right), leftover input
constants become free variables, and all permutations of the free
variables yield the convolution windows.  Atom patterns over variables
are the propositional features.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from . import _kernels
from .automata import init_bank
from .convolution import WindowSet, pad_windows, train_step_conv
from .logic import Atom, Const, RelationSymbol, Var

MAX_FREE_VARIABLES = 5


@dataclass(frozen=True)
class Observation:
    """Input atom set plus target atoms with truth values (possibly noisy)."""

    inputs: tuple
    targets: tuple  # of (Atom, 0/1)

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "targets", tuple(self.targets))


@dataclass(frozen=True)
class VariableBinding:
    """Injective constant -> variable map, split into target-bound and free."""

    mapping: dict
    bound: tuple
    free: tuple

    def substitute(self, atom):
        args = tuple(self.mapping.get(t, t) for t in atom.args)
        return Atom(atom.relation, args, atom.negated)


@dataclass
class AtomIndex:
    """Bijective, deterministically ordered atom-pattern -> feature map."""

    atoms: tuple

    def __post_init__(self):
        self.atoms = tuple(sorted(set(self.atoms), key=_atom_key))
        self._pos = {a: i for i, a in enumerate(self.atoms)}

    def __len__(self):
        return len(self.atoms)

    def position(self, atom):
        try:
            return self._pos[atom]
        except KeyError:
            raise KeyError(f"atom {atom} outside the indexed schema") from None

    def encode(self, atoms):
        """Presence bit vector over the indexed patterns."""
        bits = np.zeros(len(self.atoms), dtype=np.uint8)
        for atom in atoms:
            bits[self.position(atom)] = 1
        return bits

    def decode(self, bits):
        return tuple(a for a, b in zip(self.atoms, bits) if b)


def _atom_key(atom):
    return (atom.relation, tuple(str(t) for t in atom.args))


def obtain_constants(atoms):
    """Constants in first-appearance order, deduplicated."""
    out = []
    for atom in atoms:
        for t in atom.args:
            if isinstance(t, Const) and t not in out:
                out.append(t)
    return out


def variables_replace_constants(obs, prefix="Z"):
    """Detach an observation from its constants.

    Target constants are bound to Z1.. left to right; the same
    substitution is applied to the inputs, and leftover input constants
    get fresh free variables.  Detaching twice is the identity.
    """
    binding = {}
    target_atoms = [a for a, _ in obs.targets]
    for const in obtain_constants(target_atoms):
        binding[const] = Var(f"{prefix}{len(binding) + 1}")
    bound = tuple(binding.values())
    for const in obtain_constants(obs.inputs):
        if const not in binding:
            binding[const] = Var(f"{prefix}{len(binding) + 1}")
    free = tuple(v for v in binding.values() if v not in bound)
    vb = VariableBinding(binding, bound, free)
    detached = Observation(
        tuple(vb.substitute(a) for a in obs.inputs),
        tuple((vb.substitute(a), val) for a, val in obs.targets),
    )
    return detached, vb


def generate_variable_permutations(inputs, binding, index,
                                   max_free_variables=MAX_FREE_VARIABLES):
    """One encoded window per permutation of the free variables (v! total)."""
    free = binding.free
    if len(free) > max_free_variables:
        raise ValueError(
            f"{len(free)} free variables exceed the cap of {max_free_variables}"
        )
    windows = []
    for perm in itertools.permutations(free):
        subst = dict(zip(free, perm))
        atoms = [
            Atom(a.relation, tuple(subst.get(t, t) for t in a.args), a.negated)
            for a in inputs
        ]
        windows.append(index.encode(atoms))
    return WindowSet(np.asarray(windows, dtype=np.uint8))


def encode(atoms, index):
    return index.encode(atoms)


def feature_width(entity_sizes, relations_per_sample, mode):
    """Propositional width estimate for one relation signature.

    Constants mode multiplies the entity-set cardinalities; generalized
    mode only depends on the per-sample relation count r, giving
    r ** (e + 1) for e entity slots.
    """
    entity_sizes = list(entity_sizes)
    r = relations_per_sample
    if mode == "constants":
        return int(math.prod(entity_sizes) * r)
    if mode == "generalized":
        return int(r ** (len(entity_sizes) + 1))
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class Schema:
    """Declared relations with typed argument slots plus entity vocabularies."""

    relations: tuple  # of (name, (type, ...))
    vocab: dict       # type name -> tuple of constants

    def __str__(self):
        lines = [
            f"relation {name}({', '.join(types)})" for name, types in self.relations
        ]
        lines += [
            f"entity {t}: {', '.join(names)}" for t, names in self.vocab.items()
        ]
        return "\n".join(lines) + "\n"


def parse_schema(text):
    """Schema grammar: `relation Name(Type, ...)` and `entity Type: a, b` lines."""
    relations, vocab = [], {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = re.match(r"^relation (\w+)\((.*)\)$", line)
        if m:
            types = tuple(t.strip() for t in m.group(2).split(",") if t.strip())
            if not types:
                raise ValueError(f"line {lineno}: relation needs at least one slot")
            relations.append((m.group(1), types))
            continue
        m = re.match(r"^entity (\w+):\s*(.*)$", line)
        if m:
            names = tuple(n.strip() for n in m.group(2).split(",") if n.strip())
            vocab[m.group(1)] = names
            continue
        raise ValueError(f"line {lineno}: bad schema line {line!r}")
    return Schema(tuple(relations), vocab)


def schema_index(schema, mode="constants"):
    """Atom-pattern index for a declared schema, in either encoding mode."""
    atoms = []
    if mode == "constants":
        for name, types in schema.relations:
            pools = [[Const(c) for c in schema.vocab[t]] for t in types]
            for combo in itertools.product(*pools):
                atoms.append(Atom(name, combo))
    elif mode == "generalized":
        counts = {t: 0 for name, types in schema.relations for t in types}
        for name, types in schema.relations:
            for t in types:
                counts[t] = max(counts[t], 3)
        pools_by_type = {t: [Var(f"{t[:3]}{i + 1}") for i in range(n)]
                         for t, n in counts.items()}
        for name, types in schema.relations:
            for combo in itertools.product(*(pools_by_type[t] for t in types)):
                atoms.append(Atom(name, combo))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return AtomIndex(tuple(atoms))


def variable_atom_patterns(relations, n_variables, prefix="Z"):
    """All atom patterns over Z1..Zn for the given relation symbols."""
    variables = [Var(f"{prefix}{i + 1}") for i in range(n_variables)]
    atoms = []
    for rel in relations:
        for combo in itertools.product(variables, repeat=rel.arity):
            atoms.append(Atom(rel.name, combo))
    return atoms


def relational_train_step(state, index, obs, n_states, threshold, s, rng,
                          boost=False, convolution=True,
                          max_free_variables=MAX_FREE_VARIABLES):
    """Alg-style wiring: detach, permute, then one convolutional bank update."""
    detached, binding = variables_replace_constants(obs)
    if convolution:
        ws = generate_variable_permutations(
            detached.inputs, binding, index, max_free_variables
        )
    else:
        ws = WindowSet(index.encode(detached.inputs)[None, :])
    y = detached.targets[0][1]
    return train_step_conv(state, ws, y, n_states, threshold, s, rng, boost=boost)


class RelationalTsetlinMachine(BaseEstimator):
    """Binary Tsetlin machine over atom-set observations.

    ``mode='generalized'`` detaches every observation from its constants
    and (with ``convolution=True``) trains over all free-variable
    permutation windows; ``mode='constants'`` encodes ground atoms
    directly, which is extensionally plain propositional training.

    Only positive presence literals are used by default, matching the
    Horn-clause reading of the learned conjunctions.
    """

    def __init__(self, n_clauses=40, threshold=15, s=3.0, n_states=100,
                 epochs=100, boost_true_positive=False, mode="generalized",
                 convolution=True, include_negated=False,
                 max_free_variables=MAX_FREE_VARIABLES, random_state=None):
        self.n_clauses = n_clauses
        self.threshold = threshold
        self.s = s
        self.n_states = n_states
        self.epochs = epochs
        self.boost_true_positive = boost_true_positive
        self.mode = mode
        self.convolution = convolution
        self.include_negated = include_negated
        self.max_free_variables = max_free_variables
        self.random_state = random_state

    def _build_index(self, observations):
        relations = {}
        for obs in observations:
            for atom in obs.inputs:
                relations[atom.relation] = len(atom.args)
        rels = [RelationSymbol(n, a) for n, a in sorted(relations.items())]
        if self.mode == "generalized":
            z = max(
                (len(obtain_constants(list(o.inputs) + [a for a, _ in o.targets]))
                 for o in observations),
                default=0,
            )
            return AtomIndex(tuple(variable_atom_patterns(rels, z)))
        constants = []
        for obs in observations:
            for c in obtain_constants(obs.inputs):
                if c not in constants:
                    constants.append(c)
        atoms = []
        for rel in rels:
            for combo in itertools.product(constants, repeat=rel.arity):
                atoms.append(Atom(rel.name, combo))
        return AtomIndex(tuple(atoms))

    def encode_observation(self, obs):
        """Window set for one observation under the fitted atom index."""
        if self.mode == "generalized":
            detached, binding = variables_replace_constants(obs)
            if self.convolution:
                return generate_variable_permutations(
                    detached.inputs, binding, self.index_, self.max_free_variables
                )
            return WindowSet(self.index_.encode(detached.inputs)[None, :])
        return WindowSet(self.index_.encode(obs.inputs)[None, :])

    def _literal_windows(self, ws):
        W = ws.windows
        if self.include_negated:
            W = np.hstack([W, 1 - W])
        return np.ascontiguousarray(W)

    def fit(self, observations):
        if self.mode not in ("constants", "generalized"):
            raise ValueError(f"unknown mode {self.mode!r}")
        observations = list(observations)
        if not observations:
            raise ValueError("empty training set")
        self.index_ = self._build_index(observations)
        mats = [self._literal_windows(self.encode_observation(o)) for o in observations]
        y = np.array([o.targets[0][1] for o in observations], dtype=np.int64)
        Xpad, wcounts = pad_windows(mats)
        rng = np.random.default_rng(self.random_state)
        self.state_ = init_bank(self.n_clauses, Xpad.shape[2], self.n_states, rng)
        _kernels.fit_binary(
            self.state_, Xpad, wcounts, y, self.epochs,
            self.n_states, self.threshold, self.s, self.boost_true_positive, rng,
        )
        return self

    def vote_sums(self, observations):
        mats = [self._literal_windows(self.encode_observation(o)) for o in observations]
        Xpad, wcounts = pad_windows(mats)
        votes = _kernels.vote_sums_dataset(
            self.state_[None, :, :], Xpad, wcounts, self.n_states
        )
        return votes[:, 0]

    def predict(self, observations):
        return (self.vote_sums(observations) >= 0).astype(np.int64)

"""Deterministic generators for the movement and parentage tasks, plus bAbI IO.

Everything is driven by a seeded PCG64 generator, so identical configs
produce byte-identical dataset files.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass

import numpy as np

from .logic import Atom, Const, HornClause, Program, Var, least_herbrand_model

DEFAULT_PERSONS = ("William", "Susan", "Mary", "John", "Sarah", "James")
DEFAULT_LOCATIONS = ("office", "garden", "pantry", "kitchen", "foyer")
MOVEMENT_VERBS = ("moved", "went", "walked")

# Grandparent(X, Y) :- Parent(X, Z), Parent(Z, Y).
GRANDPARENT_RULE = HornClause(
    Atom("Grandparent", (Var("X"), Var("Y"))),
    (Atom("Parent", (Var("X"), Var("Z"))), Atom("Parent", (Var("Z"), Var("Y")))),
)


@dataclass(frozen=True)
class QAInstance:
    id: int
    statements: tuple
    question: str
    answer: str
    support: int  # 1-based index of the supporting statement


@dataclass
class GenConfig:
    persons: tuple = DEFAULT_PERSONS
    locations: tuple = DEFAULT_LOCATIONS
    max_statements: int = 3
    n_instances: int = 1000
    noise_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.persons or not self.locations:
            raise ValueError("person and location vocabularies must be nonempty")
        if set(self.persons) & set(self.locations):
            raise ValueError("person and location vocabularies must be disjoint")
        if not 0.0 <= self.noise_rate <= 1.0:
            raise ValueError("noise_rate must be in [0, 1]")
        if not 1 <= self.max_statements:
            raise ValueError("max_statements must be >= 1")


@dataclass
class Dataset:
    task: str
    instances: list
    persons: tuple = ()
    locations: tuple = ()

    @property
    def answers(self):
        return [inst.answer for inst in self.instances]


def _choice(rng, seq):
    return seq[rng.integers(0, len(seq))]


_CONFIG_TUPLES = ("persons", "locations")
_CONFIG_INTS = ("max_statements", "n_instances", "seed")


def load_config(text):
    """GenConfig from `key=value` lines; list values are comma-separated."""
    kwargs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not hasattr(GenConfig, key):
            raise ValueError(f"line {lineno}: unknown config line {line!r}")
        if key in _CONFIG_TUPLES:
            kwargs[key] = tuple(v.strip() for v in value.split(",") if v.strip())
        elif key in _CONFIG_INTS:
            kwargs[key] = int(value)
        else:
            kwargs[key] = float(value)
    return GenConfig(**kwargs)


def format_config(config):
    lines = []
    for key in ("persons", "locations", "max_statements", "n_instances",
                "noise_rate", "seed"):
        value = getattr(config, key)
        if key in _CONFIG_TUPLES:
            value = ",".join(value)
        lines.append(f"{key}={value}")
    return "\n".join(lines) + "\n"


def generate_movement(config, rng=None):
    """Single-supporting-fact stories: persons move, the query asks where one is.

    The answer is the location of the query person's last move (earlier
    moves are superseded).  Exact duplicate consecutive statements are
    avoided; revisit-order ambiguity is deliberately left in.
    """
    if len(config.locations) < 2:
        raise ValueError("movement task needs at least 2 locations")
    rng = np.random.default_rng(config.seed) if rng is None else rng
    instances = []
    for idx in range(config.n_instances):
        k = int(rng.integers(1, config.max_statements + 1))
        moves = []
        statements = []
        for _ in range(k):
            while True:
                person = _choice(rng, config.persons)
                location = _choice(rng, config.locations)
                if not moves or moves[-1] != (person, location):
                    break
            verb = _choice(rng, MOVEMENT_VERBS)
            moves.append((person, location))
            statements.append(f"{person} {verb} to the {location}.")
        appearing = []
        for person, _ in moves:
            if person not in appearing:
                appearing.append(person)
        query_person = _choice(rng, appearing)
        support, answer = max(
            (i + 1, loc) for i, (p, loc) in enumerate(moves) if p == query_person
        )
        instances.append(QAInstance(
            idx, tuple(statements), f"Where is {query_person}?", answer, support
        ))
    return Dataset("movement", instances, tuple(config.persons), tuple(config.locations))


def _grandparent_label(facts, pair):
    program = Program(
        [HornClause(Atom("Parent", tuple(Const(c) for c in f))) for f in facts]
        + [GRANDPARENT_RULE]
    )
    query = Atom("Grandparent", (Const(pair[0]), Const(pair[1])))
    return query in least_herbrand_model(program)


def generate_parentage(config, rng=None):
    """Parent-fact stories with grandparent yes/no queries, labeled by the LHM."""
    if len(config.persons) < 3:
        raise ValueError("parentage task needs at least 3 persons")
    rng = np.random.default_rng(config.seed) if rng is None else rng
    instances = []
    for idx in range(config.n_instances):
        group = list(rng.choice(
            len(config.persons), size=min(4, len(config.persons)), replace=False
        ))
        people = [config.persons[g] for g in group]
        n_facts = int(rng.integers(2, config.max_statements + 1)) if config.max_statements > 2 else 2
        facts = []
        while len(facts) < n_facts:
            a, b = _choice(rng, people), _choice(rng, people)
            if a != b and (a, b) not in facts and (b, a) not in facts:
                facts.append((a, b))
        grandpairs = [
            (a, c)
            for a, b in facts for b2, c in facts
            if b == b2 and a != c
        ]
        want_positive = rng.random() < 0.5
        if want_positive and grandpairs:
            pair = _choice(rng, grandpairs)
        else:
            while True:
                pair = (_choice(rng, people), _choice(rng, people))
                if pair[0] != pair[1] and pair not in grandpairs:
                    break
        label = _grandparent_label(facts, pair)
        statements = tuple(f"{a} is a parent of {b}." for a, b in facts)
        support = 1
        if label:
            for i, (a, b) in enumerate(facts):
                if a == pair[0] and any(f == (b, pair[1]) for f in facts):
                    support = i + 1
                    break
        instances.append(QAInstance(
            idx, statements,
            f"Is {pair[0]} a grandparent of {pair[1]}?",
            "yes" if label else "no", support,
        ))
    return Dataset("parentage", instances, tuple(config.persons), ())


def label_universe(dataset):
    if dataset.task == "movement":
        return list(dataset.locations)
    if dataset.task == "parentage":
        return ["no", "yes"]
    raise ValueError(f"unknown task {dataset.task!r}")


def inject_noise(dataset, rate, rng=None):
    """Replace each answer, with the given probability, by a wrong label.

    Inputs (statements and questions) are untouched; apply to the
    training split only.
    """
    if not 0.0 <= rate <= 1.0:
        raise ValueError("rate must be in [0, 1]")
    rng = np.random.default_rng(0) if rng is None else rng
    labels = label_universe(dataset)
    noisy = []
    for inst in dataset.instances:
        if rate > 0 and rng.random() < rate:
            wrong = [l for l in labels if l != inst.answer]
            if dataset.task == "movement":
                # prefer in-story locations so the wrong answer stays
                # resolvable under entity generalization
                mentioned = [
                    l for l in wrong
                    if any(s.rstrip(".").endswith(" " + l) for s in inst.statements)
                ]
                wrong = mentioned or wrong
            inst = dataclasses.replace(inst, answer=_choice(rng, wrong))
        noisy.append(inst)
    return Dataset(dataset.task, noisy, dataset.persons, dataset.locations)


def split(dataset, train_frac=0.8):
    """Head/tail split by instance; do this before any noise injection."""
    cut = int(round(len(dataset.instances) * train_frac))
    head = Dataset(dataset.task, dataset.instances[:cut], dataset.persons, dataset.locations)
    tail = Dataset(dataset.task, dataset.instances[cut:], dataset.persons, dataset.locations)
    return head, tail


def write_babi(dataset, path):
    """bAbI text format: numbered statements, tab-separated question lines."""
    with open(path, "w") as fh:
        fh.write(format_babi(dataset))


def format_babi(dataset):
    lines = []
    for inst in dataset.instances:
        for i, s in enumerate(inst.statements):
            lines.append(f"{i + 1} {s}")
        q = len(inst.statements) + 1
        lines.append(f"{q} {inst.question}\t{inst.answer}\t{inst.support}")
    return "\n".join(lines) + "\n"


def read_babi(path=None, text=None, task="movement"):
    """Parse bAbI-format text back into a Dataset (IDs reset per story)."""
    if text is None:
        with open(path) as fh:
            text = fh.read()
    instances = []
    statements = []
    expected_id = 1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        m = re.match(r"^(\d+) (.*)$", raw)
        if not m:
            raise ValueError(f"line {lineno}: malformed bAbI line {raw!r}")
        line_id, rest = int(m.group(1)), m.group(2)
        if line_id == 1 and "\t" not in rest:
            if statements:
                raise ValueError(f"line {lineno}: story without a question")
            expected_id = 1
        if line_id != expected_id:
            raise ValueError(f"line {lineno}: non-monotone statement id {line_id}")
        if "\t" in rest:
            question, answer, support = rest.split("\t")
            if not statements:
                raise ValueError(f"line {lineno}: question before any statement")
            instances.append(QAInstance(
                len(instances), tuple(statements), question, answer, int(support)
            ))
            statements = []
            expected_id = 1
        else:
            statements.append(rest)
            expected_id = line_id + 1
    if statements:
        raise ValueError("trailing statements without a question")
    return Dataset(task, instances)

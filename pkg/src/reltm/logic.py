"""Ground Horn-program machinery: Herbrand base, forward chaining, fixpoint.

Terms, atoms and clauses are immutable; interpretations are plain
frozensets of ground atoms.  Negated body atoms are evaluated by
closed-world absence and are only sound for the single-stratum programs
this package produces (negation is never applied to a head derived in
the same program).

Text format (round-tripping parser/printer):

    head :- body1, body2, not body3.
    fact(a).
    % comment

An identifier denotes a variable iff it is a single uppercase letter or
matches ``Z<digits>``, ``Per<digits>`` or ``Loc<digits>``.  Everything
else is a constant (note ``S1``-style sentence-order tags are
constants).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

_VARIABLE_RE = re.compile(r"^(?:[A-Z]|Z\d+|Per\d+|Loc\d+)$")


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class RelationSymbol:
    name: str
    arity: int


@dataclass(frozen=True)
class Atom:
    relation: str
    args: tuple
    negated: bool = False

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    @property
    def is_ground(self):
        return all(isinstance(t, Const) for t in self.args)

    def positive(self):
        return self if not self.negated else Atom(self.relation, self.args)

    def __str__(self):
        body = f"{self.relation}({', '.join(str(t) for t in self.args)})"
        return f"not {body}" if self.negated else body


@dataclass(frozen=True)
class HornClause:
    head: Atom
    body: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))
        if self.head.negated:
            raise ValueError("clause head cannot be negated")

    @property
    def is_fact(self):
        return not self.body

    def variables(self):
        seen = []
        for atom in (self.head, *self.body):
            for t in atom.args:
                if isinstance(t, Var) and t not in seen:
                    seen.append(t)
        return seen

    def __str__(self):
        if self.is_fact:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(str(a) for a in self.body)}."


@dataclass
class Program:
    clauses: list

    @property
    def facts(self):
        return [c.head for c in self.clauses if c.is_fact]

    @property
    def rules(self):
        return [c for c in self.clauses if not c.is_fact]

    def constants(self):
        out = []
        for c in self.clauses:
            for atom in (c.head, *c.body):
                for t in atom.args:
                    if isinstance(t, Const) and t not in out:
                        out.append(t)
        return out

    def relations(self):
        seen = {}
        for c in self.clauses:
            for atom in (c.head, *c.body):
                prev = seen.get(atom.relation)
                if prev is not None and prev != len(atom.args):
                    raise ValueError(f"relation {atom.relation} used with arities {prev} and {len(atom.args)}")
                seen[atom.relation] = len(atom.args)
        return [RelationSymbol(n, a) for n, a in seen.items()]

    def __str__(self):
        return "\n".join(str(c) for c in self.clauses) + ("\n" if self.clauses else "")


def is_variable_name(name):
    return bool(_VARIABLE_RE.match(name))


def parse_term(token):
    token = token.strip()
    if not re.match(r"^\w+$", token):
        raise ValueError(f"bad term {token!r}")
    return Var(token) if is_variable_name(token) else Const(token)


def parse_atom(text):
    text = text.strip()
    negated = False
    if text.startswith("not "):
        negated = True
        text = text[4:].strip()
    m = re.match(r"^(\w+)\((.*)\)$", text)
    if not m:
        raise ValueError(f"bad atom {text!r}")
    args = [parse_term(t) for t in m.group(2).split(",")] if m.group(2).strip() else []
    if not args:
        raise ValueError(f"zero-arity atom {text!r}")
    return Atom(m.group(1), tuple(args), negated)


def parse_clause(line):
    line = line.strip()
    if not line.endswith("."):
        raise ValueError(f"clause must end with '.': {line!r}")
    line = line[:-1]
    if ":-" in line:
        head_txt, body_txt = line.split(":-", 1)
        body = tuple(parse_atom(part) for part in _split_atoms(body_txt))
    else:
        head_txt, body = line, ()
    head = parse_atom(head_txt)
    if head.negated:
        raise ValueError(f"negated head in {line!r}")
    return HornClause(head, body)


def _split_atoms(text):
    # Split on commas at paren depth 0.
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p for p in (q.strip() for q in parts) if p]


def parse_program(text):
    clauses = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        # '.' never occurs inside a term, so several clauses may share a line
        for chunk in line.split("."):
            if chunk.strip():
                clauses.append(parse_clause(chunk.strip() + "."))
    return Program(clauses)


def print_program(program):
    return str(program)


def herbrand_base(constants, relations):
    """All ground atoms over the given constants and relation symbols."""
    constants = list(constants)
    relations = list(relations)
    if not constants or not relations:
        raise ValueError("need at least one constant and one relation")
    atoms = set()
    for rel in relations:
        if rel.arity < 1:
            raise ValueError(f"relation {rel.name} must have arity >= 1")
        for combo in itertools.product(constants, repeat=rel.arity):
            atoms.add(Atom(rel.name, combo))
    return frozenset(atoms)


def _substitute(atom, binding):
    args = tuple(binding.get(t, t) if isinstance(t, Var) else t for t in atom.args)
    return Atom(atom.relation, args, atom.negated)


def ground(program, constants=None):
    """Instantiate every clause under every constant substitution."""
    constants = list(constants) if constants is not None else program.constants()
    out = []
    for clause in program.clauses:
        variables = clause.variables()
        if not variables:
            out.append(clause)
            continue
        for combo in itertools.product(constants, repeat=len(variables)):
            binding = dict(zip(variables, combo))
            out.append(HornClause(
                _substitute(clause.head, binding),
                tuple(_substitute(a, binding) for a in clause.body),
            ))
    return out


def immediate_consequence(program, interpretation, ground_clauses=None):
    """One forward-chaining step: TP(I) = {heads applicable under I} + I.

    Negated body atoms are satisfied iff their positive form is absent
    from I (closed world).
    """
    interpretation = frozenset(interpretation)
    if ground_clauses is None:
        ground_clauses = ground(program)
    derived = set(interpretation)
    for clause in ground_clauses:
        ok = True
        for atom in clause.body:
            present = atom.positive() in interpretation
            if atom.negated == present:
                ok = False
                break
        if ok:
            derived.add(clause.head)
    return frozenset(derived)


def least_herbrand_model(program):
    """Least fixpoint of the immediate-consequence operator from the empty set."""
    ground_clauses = ground(program)
    current = frozenset()
    while True:
        nxt = immediate_consequence(program, current, ground_clauses)
        if nxt == current:
            return current
        current = nxt

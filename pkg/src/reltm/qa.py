"""Closed-domain QA pipeline: template parsing, entity generalization, encoding.

Sentences are matched against a closed template lexicon (one relation
per simple sentence).  Instances are reduced to relation-entity
bindings, optionally generalized to typed positional placeholders
(Per1, Loc2, ...) so learned clauses are vocabulary-independent, and
encoded as presence bit vectors (or permutation window stacks) for the
multiclass engine.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

import numpy as np

from .encoder import AtomIndex, Observation
from .logic import Atom, Const, Var


@dataclass(frozen=True)
class Template:
    kind: str           # "statement" or "query"
    pattern: str        # e.g. "{Person} went to the {Location}."
    relation: str
    slots: tuple        # entity type per placeholder, in order

    def regex(self):
        out, i = [], 0
        for m in re.finditer(r"\{(\w+)\}", self.pattern):
            out.append(re.escape(self.pattern[i:m.start()]))
            out.append(r"(\w+)")
            i = m.end()
        out.append(re.escape(self.pattern[i:]))
        return re.compile("^" + "".join(out) + "$")


@dataclass
class Lexicon:
    templates: list

    @classmethod
    def parse(cls, text):
        """Lexicon grammar: one `kind: pattern => Relation` rule per line."""
        templates = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            m = re.match(r"^(statement|query):\s*(.+?)\s*=>\s*(\w+)$", line)
            if not m:
                raise ValueError(f"bad lexicon line {line!r}")
            kind, pattern, relation = m.groups()
            slots = tuple(re.findall(r"\{(\w+)\}", pattern))
            templates.append(Template(kind, pattern, relation, slots))
        return cls(templates)

    def __str__(self):
        return "\n".join(
            f"{t.kind}: {t.pattern} => {t.relation}" for t in self.templates
        ) + "\n"


DEFAULT_LEXICON = Lexicon.parse("""
statement: {Person} went to the {Location}. => MoveTo
statement: {Person} moved to the {Location}. => MoveTo
statement: {Person} walked to the {Location}. => MoveTo
statement: {Person} is a parent of {Person}. => Parent
query: Where is {Person}? => Q
query: Is {Person} a grandparent of {Person}? => Grandparent
""")

MOVEMENT_VERBS = ("went", "moved", "walked")


def parse_sentence(text, lexicon=DEFAULT_LEXICON):
    """Match exactly one template; returns (atom, kind, entity type map)."""
    hits = []
    for t in lexicon.templates:
        m = t.regex().match(text.strip())
        if m:
            hits.append((t, m.groups()))
    if not hits:
        raise ValueError(f"no template matches {text!r}")
    if len(hits) > 1:
        raise ValueError(f"multiple templates match {text!r}")
    template, entities = hits[0]
    atom = Atom(template.relation, tuple(Const(e) for e in entities))
    types = dict(zip(entities, template.slots))
    return atom, template.kind, types


@dataclass(frozen=True)
class ParsedInstance:
    statement_atoms: tuple   # ground atoms in statement order
    query_atom: Atom
    entity_types: dict       # entity name -> type name
    answer: str | None = None
    id: int = 0


def parse_instance(lines, lexicon=DEFAULT_LEXICON, answer=None, instance_id=0):
    """Parse an ordered statement block ending in the question."""
    atoms, types = [], {}
    query = None
    for line in lines:
        atom, kind, t = parse_sentence(line, lexicon)
        if kind == "query":
            if query is not None:
                raise ValueError("more than one question in instance")
            query = atom
        else:
            if query is not None:
                raise ValueError("statement after the question")
            atoms.append(atom)
        types.update(t)
    if query is None:
        raise ValueError("instance has no question")
    return ParsedInstance(tuple(atoms), query, types, answer, instance_id)


_TYPE_PREFIX = {"Person": "Per", "Location": "Loc"}


def _prefix(type_name):
    return _TYPE_PREFIX.get(type_name, type_name[:3].capitalize())


@dataclass(frozen=True)
class GeneralizedInstance:
    statement_atoms: tuple
    query_atom: Atom
    binding: dict            # Const -> Var, injective
    labels: tuple            # positional answer labels present, e.g. (Loc1, Loc2)
    answer_label: str | None


def generalize_entities(parsed):
    """Replace constants by typed positional placeholders, query entities first."""
    binding = {}
    counters = {}

    def bind(const, type_name):
        if const in binding:
            return
        counters[type_name] = counters.get(type_name, 0) + 1
        binding[const] = Var(f"{_prefix(type_name)}{counters[type_name]}")

    for term in parsed.query_atom.args:
        bind(term, parsed.entity_types[term.name])
    for atom in parsed.statement_atoms:
        for term in atom.args:
            bind(term, parsed.entity_types[term.name])

    def substitute(atom):
        return Atom(atom.relation, tuple(binding[t] for t in atom.args), atom.negated)

    labels = tuple(
        v.name for v in binding.values() if v.name.startswith("Loc")
    )
    answer_label = None
    if parsed.answer is not None:
        key = Const(parsed.answer)
        if key in binding:
            answer_label = binding[key].name
    return GeneralizedInstance(
        tuple(substitute(a) for a in parsed.statement_atoms),
        substitute(parsed.query_atom),
        binding,
        labels,
        answer_label,
    )


def label_map(binding, label):
    """Positional label -> original constant."""
    for const, var in binding.items():
        if var.name == label:
            return const.name
    raise KeyError(f"label {label} not bound in this instance")


def label_unmap(binding, constant):
    """Original constant -> positional label."""
    key = Const(constant)
    if key not in binding:
        raise KeyError(f"constant {constant} not bound in this instance")
    return binding[key].name


def permute_instance(gen, permute_type="Per"):
    """Atom windows for all renamings of the person placeholders.

    The query-person swap is included: Per1 participates in the
    permutation.  Statement order and location placeholders are kept
    intact, so the answer label is invariant across windows.
    """
    variables = sorted(
        {t for a in (*gen.statement_atoms, gen.query_atom) for t in a.args
         if isinstance(t, Var) and t.name.startswith(permute_type)},
        key=lambda v: v.name,
    )
    windows = []
    for perm in itertools.permutations(variables):
        subst = dict(zip(variables, perm))

        def rename(atom):
            return Atom(atom.relation,
                        tuple(subst.get(t, t) for t in atom.args), atom.negated)

        windows.append(tuple(rename(a) for a in gen.statement_atoms) + (rename(gen.query_atom),))
    return windows


def encode_with_order(atoms, tag_sentence_order):
    """Optionally prefix each statement atom with its position constant S1.."""
    if not tag_sentence_order:
        return tuple(atoms)
    return tuple(
        Atom(a.relation, (Const(f"S{i + 1}"), *a.args), a.negated)
        for i, a in enumerate(atoms)
    )


def movement_index_constants(persons, locations, order_tags=False,
                             max_statements=3):
    """Ground-atom feature index for the movement task (constants mode)."""
    atoms = []
    orders = [Const(f"S{t + 1}") for t in range(max_statements)] if order_tags else [None]
    for p in persons:
        atoms.append(Atom("Q", (Const(p),)))
        for l in locations:
            for s in orders:
                args = (Const(p), Const(l)) if s is None else (s, Const(p), Const(l))
                atoms.append(Atom("MoveTo", args))
    return AtomIndex(tuple(atoms))


def movement_index_generalized(max_statements=3, order_tags=False):
    """Positional-placeholder feature index (width independent of vocabulary)."""
    atoms = []
    orders = [Const(f"S{t + 1}") for t in range(max_statements)] if order_tags else [None]
    for i in range(max_statements):
        atoms.append(Atom("Q", (Var(f"Per{i + 1}"),)))
        for j in range(max_statements):
            for s in orders:
                args = (Var(f"Per{i + 1}"), Var(f"Loc{j + 1}"))
                if s is not None:
                    args = (s, *args)
                atoms.append(Atom("MoveTo", args))
    return AtomIndex(tuple(atoms))


def encode_movement(instances, mode="generalized", convolution=False,
                    negative_literals=False, lexicon=DEFAULT_LEXICON,
                    persons=None, locations=None, max_statements=3):
    """Encode parsed movement instances for the multiclass engine.

    Returns (windows, labels, index, parsed) where ``windows`` is a list
    of per-instance presence-bit window matrices, ``labels`` the class
    label per instance (location constant in constants mode, positional
    Loc placeholder in generalized mode).  Negative-literal mode
    requires sentence-order tags, so the two options are tied together.
    """
    order_tags = negative_literals
    if mode == "constants":
        if persons is None or locations is None:
            raise ValueError("constants mode needs the person/location vocabularies")
        index = movement_index_constants(persons, locations, order_tags, max_statements)
    elif mode == "generalized":
        index = movement_index_generalized(max_statements, order_tags)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    windows_per_instance, labels, parsed_list = [], [], []
    for parsed in instances:
        if mode == "constants":
            atoms = encode_with_order(parsed.statement_atoms, order_tags)
            atoms = atoms + (parsed.query_atom,)
            mats = [index.encode(atoms)]
            labels.append(parsed.answer)
        else:
            gen = generalize_entities(parsed)
            atom_windows = (
                permute_instance(gen) if convolution
                else [(*gen.statement_atoms, gen.query_atom)]
            )
            mats = [
                index.encode(encode_with_order(w[:-1], order_tags) + (w[-1],))
                for w in atom_windows
            ]
            if gen.answer_label is None and parsed.answer is not None:
                # noisy answer naming an unmentioned location: fall back
                # to the first unused placeholder, which is wrong by
                # construction (it denotes no in-story location)
                labels.append(f"Loc{min(len(gen.labels) + 1, max_statements)}")
            else:
                labels.append(gen.answer_label)
        windows_per_instance.append(np.asarray(mats, dtype=np.uint8))
        parsed_list.append(parsed)
    return windows_per_instance, labels, index, parsed_list


def parentage_observations(instances):
    """Movement-agnostic view of parentage instances as atom observations."""
    out = []
    for parsed in instances:
        value = 1 if parsed.answer == "yes" else 0
        out.append(Observation(parsed.statement_atoms, ((parsed.query_atom, value),)))
    return out

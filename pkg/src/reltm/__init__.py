"""Propositional and relational Tsetlin machines for closed-domain QA.

Learning happens in teams of finite two-action automata whose joined
actions form conjunctive clauses; voting over clause polarities yields
classifications, and the included literals of positive clauses read
back directly as Horn rules.
"""

from .automata import (
    TsetlinMachine,
    clause_evaluate,
    clip_vote,
    init_bank,
    ta_action,
    ta_transition,
    to_literals,
    train_step_binary,
    type_i_feedback,
    type_ii_feedback,
    vote_sum,
)
from .convolution import (
    WindowSet,
    clause_evaluate_conv,
    pad_windows,
    select_feedback_window,
    train_step_conv,
)
from .encoder import (
    AtomIndex,
    Observation,
    RelationalTsetlinMachine,
    VariableBinding,
    feature_width,
    generate_variable_permutations,
    obtain_constants,
    variable_atom_patterns,
    variables_replace_constants,
)
from .explain import (
    CostParams,
    cost_estimate,
    export_horn,
    global_dump,
    kb_metrics,
    local_snapshot,
    parse_global_dump,
)
from .logic import (
    Atom,
    Const,
    HornClause,
    Program,
    RelationSymbol,
    Var,
    herbrand_base,
    immediate_consequence,
    least_herbrand_model,
    parse_clause,
    parse_program,
)
from .model_io import load_model, save_model
from .multiclass import MultiClassTsetlinMachine, evaluate, predict_multiclass
from .qa import (
    Lexicon,
    ParsedInstance,
    encode_movement,
    generalize_entities,
    parse_instance,
    parse_sentence,
    parentage_observations,
    permute_instance,
)

__version__ = "0.1.0"

__all__ = [
    "TsetlinMachine",
    "MultiClassTsetlinMachine",
    "RelationalTsetlinMachine",
    "WindowSet",
    "AtomIndex",
    "Observation",
    "VariableBinding",
    "Atom",
    "Const",
    "Var",
    "RelationSymbol",
    "HornClause",
    "Program",
    "Lexicon",
    "ParsedInstance",
    "CostParams",
    "ta_action",
    "ta_transition",
    "to_literals",
    "clause_evaluate",
    "clause_evaluate_conv",
    "vote_sum",
    "clip_vote",
    "init_bank",
    "type_i_feedback",
    "type_ii_feedback",
    "train_step_binary",
    "train_step_conv",
    "select_feedback_window",
    "pad_windows",
    "predict_multiclass",
    "evaluate",
    "herbrand_base",
    "immediate_consequence",
    "least_herbrand_model",
    "parse_clause",
    "parse_program",
    "obtain_constants",
    "variables_replace_constants",
    "generate_variable_permutations",
    "variable_atom_patterns",
    "feature_width",
    "parse_sentence",
    "parse_instance",
    "generalize_entities",
    "permute_instance",
    "encode_movement",
    "parentage_observations",
    "global_dump",
    "parse_global_dump",
    "local_snapshot",
    "export_horn",
    "kb_metrics",
    "cost_estimate",
    "save_model",
    "load_model",
]

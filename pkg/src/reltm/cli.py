"""Command-line orchestration: generate, train, eval, explain, export-horn, metrics."""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import datasets, explain, model_io, qa
from .encoder import RelationalTsetlinMachine
from .multiclass import MultiClassTsetlinMachine, evaluate


@dataclass
class RunReport:
    task: str
    mode: str
    seed: int
    feature_width: int
    n_clauses: int
    accuracy: float
    f_macro: float
    f_micro: float
    labels: list
    confusion: np.ndarray
    wall_time_s: float

    def format(self):
        lines = [
            "rtm-report v1",
            f"task={self.task}",
            f"mode={self.mode}",
            f"seed={self.seed}",
            f"feature_width={self.feature_width}",
            f"n_clauses={self.n_clauses}",
            f"accuracy={self.accuracy:.6f}",
            f"f_macro={self.f_macro:.6f}",
            f"f_micro={self.f_micro:.6f}",
            f"wall_time_s={self.wall_time_s:.3f}",
        ]
        for label, row in zip(self.labels, self.confusion):
            lines.append(f"confusion {label}=" + ",".join(str(int(v)) for v in row))
        return "\n".join(lines) + "\n"


def _seed(args):
    if args.seed is not None:
        return args.seed
    env = os.environ.get("RTM_SEED")
    return int(env) if env else 0


def _parse_dataset(path, task):
    return datasets.read_babi(path, task=task)


def _parsed_instances(dataset):
    return [
        qa.parse_instance(
            list(inst.statements) + [inst.question],
            answer=inst.answer, instance_id=inst.id,
        )
        for inst in dataset.instances
    ]


def _flag(value):
    return value == "on"


def cmd_generate(args):
    if args.config:
        with open(args.config) as fh:
            config = datasets.load_config(fh.read())
    else:
        config = datasets.GenConfig(
            persons=tuple(args.persons.split(",")),
            locations=tuple(args.locations.split(",")),
            max_statements=args.max_statements,
            n_instances=args.instances,
            seed=_seed(args),
        )
    gen = datasets.generate_movement if args.task == "movement" else datasets.generate_parentage
    dataset = gen(config)
    if args.noise > 0:
        train, test = datasets.split(dataset, args.train_frac)
        train = datasets.inject_noise(
            train, args.noise, np.random.default_rng(_seed(args) + 1)
        )
        dataset = datasets.Dataset(
            dataset.task, train.instances + test.instances,
            dataset.persons, dataset.locations,
        )
    datasets.write_babi(dataset, args.out)
    print(f"wrote {len(dataset.instances)} instances to {args.out}")
    return 0


def _ensure_vocab(dataset, parsed):
    """Fill missing person/location vocabularies from the parsed instances."""
    if dataset.persons and dataset.locations:
        return
    persons, locations = set(), set()
    for inst in parsed:
        for entity, type_name in inst.entity_types.items():
            (persons if type_name == "Person" else locations).add(entity)
    dataset.persons = dataset.persons or tuple(sorted(persons))
    dataset.locations = dataset.locations or tuple(sorted(locations))


def _train_movement(args, dataset, seed):
    parsed = _parsed_instances(dataset)
    if args.mode == "constants":
        _ensure_vocab(dataset, parsed)
    windows, labels, index, _ = qa.encode_movement(
        parsed, mode=args.mode, convolution=_flag(args.conv),
        negative_literals=_flag(args.negative_literals),
        persons=dataset.persons or None, locations=dataset.locations or None,
    )
    model = MultiClassTsetlinMachine(
        n_clauses=args.clauses, threshold=args.threshold, s=args.specificity,
        n_states=args.states, epochs=args.epochs,
        include_negated=_flag(args.negative_literals), random_state=seed,
    )
    model.fit(windows, np.array(labels))
    return model, index


def _train_parentage(args, dataset, seed):
    parsed = _parsed_instances(dataset)
    obs = qa.parentage_observations(parsed)
    model = RelationalTsetlinMachine(
        n_clauses=args.clauses, threshold=args.threshold, s=args.specificity,
        n_states=args.states, epochs=args.epochs,
        mode=args.mode if args.mode != "generalized" else "generalized",
        convolution=_flag(args.conv), random_state=seed,
    )
    model.fit(obs)
    return model, model.index_


def cmd_train(args):
    seed = _seed(args)
    dataset = _parse_dataset(args.train, args.task)
    if args.task == "movement":
        model, index = _train_movement(args, dataset, seed)
    else:
        model, index = _train_parentage(args, dataset, seed)
    meta = {
        "task": args.task, "mode": args.mode,
        "conv": args.conv, "negative_literals": args.negative_literals,
        "seed": str(seed),
        "persons": ",".join(dataset.persons),
        "locations": ",".join(dataset.locations),
    }
    model_io.save_model(model, args.out, meta=meta)
    print(f"model written to {args.out} (feature width {len(index)})")
    return 0


def _restore(args):
    model, meta = model_io.load_model(args.model)
    dataset = _parse_dataset(args.test, meta["task"])
    if meta.get("persons"):
        dataset.persons = tuple(meta["persons"].split(","))
    if meta.get("locations"):
        dataset.locations = tuple(p for p in meta["locations"].split(",") if p)
    parsed = _parsed_instances(dataset)
    if meta["task"] == "movement":
        windows, labels, index, parsed = qa.encode_movement(
            parsed, mode=meta["mode"], convolution=_flag(meta["conv"]),
            negative_literals=_flag(meta["negative_literals"]),
            persons=dataset.persons or None, locations=dataset.locations or None,
        )
        return model, meta, windows, labels, index, parsed
    obs = qa.parentage_observations(parsed)
    labels = [o.targets[0][1] for o in obs]
    return model, meta, obs, labels, model.index_, parsed


def cmd_eval(args):
    start = time.time()
    model, meta, X, labels, index, _ = _restore(args)
    preds = model.predict(X)
    metrics = evaluate(np.asarray(labels), preds)
    report = RunReport(
        task=meta["task"], mode=meta["mode"], seed=int(meta["seed"]),
        feature_width=len(index), n_clauses=model.n_clauses,
        accuracy=metrics["accuracy"], f_macro=metrics["f_macro"],
        f_micro=metrics["f_micro"], labels=list(metrics["labels"]),
        confusion=metrics["confusion"], wall_time_s=time.time() - start,
    )
    text = report.format()
    sys.stdout.write(text)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text)
    return 0


def cmd_explain(args):
    model, meta, X, labels, index, parsed = _restore(args)
    if args.instance >= len(X):
        print(f"instance {args.instance} out of range", file=sys.stderr)
        return 1
    if meta["task"] == "movement":
        windows = X[args.instance]
    else:
        windows = model.encode_observation(X[args.instance]).windows
    snap = explain.local_snapshot(model, windows, index)
    sys.stdout.write(explain.format_snapshot(snap))
    return 0


def cmd_export_horn(args):
    model, meta = model_io.load_model(args.model)
    if meta["task"] == "movement":
        if meta["mode"] != "generalized":
            print("export-horn needs a generalized-mode model", file=sys.stderr)
            return 1
        windows_index = qa.movement_index_generalized(
            order_tags=_flag(meta["negative_literals"])
        )
        heads = explain.movement_class_heads(model.classes_)
        program = explain.export_horn(model, windows_index, heads)
    else:
        from .logic import Atom, Var
        head = Atom("Grandparent", (Var("Z1"), Var("Z2")))
        program = explain.export_horn(model, model.index_, {1: head})
    text = str(program)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_metrics(args):
    if args.schema:
        from .encoder import parse_schema, schema_index
        with open(args.schema) as fh:
            schema = parse_schema(fh.read())
        for mode in ("constants", "generalized"):
            print(f"schema_width_{mode}={len(schema_index(schema, mode))}")
        return 0
    persons = tuple(args.persons.split(","))
    locations = tuple(args.locations.split(","))
    dataset = _parse_dataset(args.train, "movement") if args.train else None
    m = explain.kb_metrics(persons, locations, args.max_statements, dataset)
    for key, value in m.items():
        print(f"{key}={value}")
    if args.cost:
        d, o, mm, v = (int(x) for x in args.cost.split(","))
        cost = explain.cost_estimate(d, o, mm, v, convolutional=_flag(args.conv))
        print(f"cost_estimate={cost}")
    return 0


def _add_common_train_flags(p):
    p.add_argument("--mode", choices=["constants", "generalized"], default="generalized")
    p.add_argument("--conv", choices=["on", "off"], default="off")
    p.add_argument("--negative-literals", dest="negative_literals",
                   choices=["on", "off"], default="off")
    p.add_argument("--clauses", type=int, default=200)
    p.add_argument("--threshold", type=int, default=15)
    p.add_argument("--specificity", type=float, default=3.0)
    p.add_argument("--states", type=int, default=100)
    p.add_argument("--epochs", type=int, default=100)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="reltm",
        description="Rule-induction engine for propositional and relational Tsetlin machines",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a synthetic QA dataset")
    g.add_argument("--task", choices=["movement", "parentage"], default="movement")
    g.add_argument("--instances", type=int, default=1000)
    g.add_argument("--persons", default=",".join(datasets.DEFAULT_PERSONS))
    g.add_argument("--locations", default=",".join(datasets.DEFAULT_LOCATIONS))
    g.add_argument("--max-statements", dest="max_statements", type=int, default=3)
    g.add_argument("--noise", type=float, default=0.0)
    g.add_argument("--train-frac", dest="train_frac", type=float, default=0.8)
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--config", default=None,
                   help="key=value generator config file (overrides other flags)")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    t = sub.add_parser("train", help="train a model on a bAbI-format file")
    t.add_argument("--task", choices=["movement", "parentage"], default="movement")
    _add_common_train_flags(t)
    t.add_argument("--seed", type=int, default=None)
    t.add_argument("--train", required=True)
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", help="evaluate a trained model")
    e.add_argument("--model", required=True)
    e.add_argument("--test", required=True)
    e.add_argument("--report", default=None)
    e.set_defaults(func=cmd_eval)

    x = sub.add_parser("explain", help="local clause snapshot for one instance")
    x.add_argument("--model", required=True)
    x.add_argument("--test", required=True)
    x.add_argument("--instance", type=int, default=0)
    x.set_defaults(func=cmd_explain)

    h = sub.add_parser("export-horn", help="export learned clauses as a Horn program")
    h.add_argument("--model", required=True)
    h.add_argument("--out", default=None)
    h.set_defaults(func=cmd_export_horn)

    m = sub.add_parser("metrics", help="KB width / compaction and cost estimates")
    m.add_argument("--persons", default=",".join(datasets.DEFAULT_PERSONS))
    m.add_argument("--locations", default=",".join(datasets.DEFAULT_LOCATIONS))
    m.add_argument("--max-statements", dest="max_statements", type=int, default=3)
    m.add_argument("--train", default=None)
    m.add_argument("--schema", default=None,
                   help="schema declaration file; widths are computed from it")
    m.add_argument("--cost", default=None, metavar="d,o,m,v")
    m.add_argument("--conv", choices=["on", "off"], default="off")
    m.set_defaults(func=cmd_metrics)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

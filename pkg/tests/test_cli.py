import os

import pytest

from reltm.cli import build_parser, main
from reltm.datasets import read_babi


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def run(*argv):
    return main(list(argv))


def generate(workdir, name="data.txt", n=300, seed=0, extra=()):
    code = run("generate", "--task", "movement", "--instances", str(n),
               "--seed", str(seed), "--out", str(workdir / name), *extra)
    assert code == 0
    return workdir / name


def train(workdir, data, name="model.rtm", extra=()):
    code = run("train", "--task", "movement", "--train", str(data),
               "--clauses", "40", "--epochs", "20", "--seed", "0",
               "--out", str(workdir / name), *extra)
    assert code == 0
    return workdir / name


class TestGenerate:
    def test_writes_babi_file(self, workdir):
        path = generate(workdir, n=50)
        ds = read_babi(path)
        assert len(ds.instances) == 50

    def test_seed_determinism(self, workdir):
        a = generate(workdir, "a.txt", seed=3)
        b = generate(workdir, "b.txt", seed=3)
        assert a.read_text() == b.read_text()

    def test_env_seed_fallback(self, workdir, monkeypatch):
        monkeypatch.setenv("RTM_SEED", "3")
        code = run("generate", "--instances", "20",
                   "--out", str(workdir / "env.txt"))
        assert code == 0
        explicit = generate(workdir, "explicit.txt", n=20, seed=3)
        assert (workdir / "env.txt").read_text() == explicit.read_text()

    def test_config_file(self, workdir):
        cfg = workdir / "gen.cfg"
        cfg.write_text("persons=Ann,Joe\nlocations=yard,shed\n"
                       "n_instances=25\nseed=1\n")
        code = run("generate", "--config", str(cfg),
                   "--out", str(workdir / "cfg.txt"))
        assert code == 0
        ds = read_babi(workdir / "cfg.txt")
        assert len(ds.instances) == 25
        assert all("Ann" in s or "Joe" in s
                   for i in ds.instances for s in i.statements)

    def test_noise_flag_flips_training_answers_only(self, workdir):
        clean = generate(workdir, "clean.txt", n=100, seed=0)
        noisy = generate(workdir, "noisy.txt", n=100, seed=0,
                         extra=("--noise", "1.0", "--train-frac", "0.8"))
        a = read_babi(clean)
        b = read_babi(noisy)
        head = sum(x.answer != y.answer
                   for x, y in zip(a.instances[:80], b.instances[:80]))
        tail = sum(x.answer != y.answer
                   for x, y in zip(a.instances[80:], b.instances[80:]))
        assert head == 80
        assert tail == 0

    def test_bad_config_exits_2(self, workdir):
        cfg = workdir / "bad.cfg"
        cfg.write_text("nonsense=1\n")
        assert run("generate", "--config", str(cfg),
                   "--out", str(workdir / "x.txt")) == 2


class TestTrainEval:
    def test_train_eval_report(self, workdir, capsys):
        data = generate(workdir)
        model = train(workdir, data)
        capsys.readouterr()  # flush generate/train chatter
        report = workdir / "report.txt"
        assert run("eval", "--model", str(model), "--test", str(data),
                   "--report", str(report)) == 0
        out = capsys.readouterr().out
        assert out.startswith("rtm-report v1\n")
        assert report.read_text() == out
        fields = dict(
            line.split("=", 1) for line in out.splitlines()
            if "=" in line and not line.startswith("confusion")
        )
        assert fields["task"] == "movement"
        assert fields["mode"] == "generalized"
        assert float(fields["accuracy"]) > 0.9  # train-set sanity bound
        assert "confusion " in out

    def test_constants_mode_and_conv_flags(self, workdir, capsys):
        data = generate(workdir, n=200)
        model = train(workdir, data, "c.rtm",
                      extra=("--mode", "constants", "--conv", "off"))
        capsys.readouterr()
        assert run("eval", "--model", str(model), "--test", str(data)) == 0
        assert "mode=constants" in capsys.readouterr().out

    def test_missing_train_file_exits_2(self, workdir):
        assert run("train", "--train", str(workdir / "nope.txt"),
                   "--out", str(workdir / "m.rtm")) == 2

    def test_corrupt_model_exits_2(self, workdir):
        data = generate(workdir, n=20)
        bad = workdir / "bad.rtm"
        bad.write_text("not a model\n")
        assert run("eval", "--model", str(bad), "--test", str(data)) == 2


class TestExplain:
    def test_snapshot_output(self, workdir, capsys):
        data = generate(workdir, n=100)
        model = train(workdir, data)
        assert run("explain", "--model", str(model), "--test", str(data),
                   "--instance", "0") == 0
        out = capsys.readouterr().out
        assert "winner: " in out
        assert "class " in out

    def test_instance_out_of_range(self, workdir):
        data = generate(workdir, n=10)
        model = train(workdir, data)
        assert run("explain", "--model", str(model), "--test", str(data),
                   "--instance", "99") == 1


class TestExportHorn:
    def test_movement_program_parses(self, workdir):
        data = generate(workdir, n=200)
        model = train(workdir, data)
        out = workdir / "rules.pl"
        assert run("export-horn", "--model", str(model),
                   "--out", str(out)) == 0
        from reltm.logic import parse_program
        program = parse_program(out.read_text())
        assert program.clauses
        assert all(c.head.relation == "CurrentlyAt" for c in program.clauses)

    def test_constants_mode_rejected(self, workdir, capsys):
        data = generate(workdir, n=50)
        model = train(workdir, data, "c.rtm", extra=("--mode", "constants"))
        assert run("export-horn", "--model", str(model)) == 1


class TestMetrics:
    def test_widths_and_ratio(self, capsys):
        assert run("metrics", "--persons", "a,b,c,d,e,f",
                   "--locations", "u,v,w,x,y") == 0
        out = dict(l.split("=") for l in capsys.readouterr().out.splitlines())
        assert out["width_constants"] == "36"
        assert out["width_generalized"] == "12"
        assert float(out["compaction_ratio"]) == pytest.approx(3.0)

    def test_cost_estimate(self, capsys):
        assert run("metrics", "--cost", "1,1,1,0") == 0
        out = capsys.readouterr().out
        assert "cost_estimate=5.0" in out

    def test_schema_file(self, workdir, capsys):
        schema = workdir / "movement.schema"
        schema.write_text("relation MoveTo(Person, Location)\n"
                          "entity Person: Ann, Joe\n"
                          "entity Location: yard, shed\n")
        assert run("metrics", "--schema", str(schema)) == 0
        out = capsys.readouterr().out
        assert "schema_width_constants=4" in out

    def test_measured_atoms_from_train_file(self, workdir, capsys):
        data = generate(workdir, n=50)
        assert run("metrics", "--train", str(data)) == 0
        assert "measured_distinct_atoms=" in capsys.readouterr().out


class TestParser:
    def test_missing_subcommand_rejected(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_unknown_subcommand_rejected(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["frobnicate"])

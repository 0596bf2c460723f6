import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reltm.automata import TsetlinMachine
from reltm.multiclass import (
    MultiClassTsetlinMachine,
    evaluate,
    predict_multiclass,
)


def three_cluster_data(n=300, seed=0):
    # class k has bit k set plus noise bits
    rng = np.random.default_rng(seed)
    y = rng.integers(0, 3, size=n)
    X = rng.integers(0, 2, size=(n, 6)).astype(np.uint8)
    X[:, :3] = 0
    X[np.arange(n), y] = 1
    return X, y


class TestPredict:
    def test_argmax(self):
        votes = np.array([[-44, -88, 51], [10, 3, -2]])
        assert predict_multiclass(votes).tolist() == [2, 0]

    def test_tie_breaks_to_lowest_index(self):
        votes = np.array([[5, 5, 1]])
        assert predict_multiclass(votes).tolist() == [0]

    def test_five_class_row(self):
        votes = np.array([[-35, 49, -36, -106, -113]])
        assert predict_multiclass(votes).tolist() == [1]

    @given(st.lists(st.lists(st.integers(-50, 50), min_size=3, max_size=3),
                    min_size=1, max_size=10),
           st.integers(-100, 100))
    def test_argmax_invariant_under_shared_offset(self, rows, offset):
        votes = np.array(rows)
        assert np.array_equal(
            predict_multiclass(votes), predict_multiclass(votes + offset)
        )


class TestEstimator:
    def test_learns_three_classes(self):
        X, y = three_cluster_data()
        m = MultiClassTsetlinMachine(n_clauses=20, epochs=30,
                                     random_state=0).fit(X, y)
        assert (m.predict(X) == y).mean() == 1.0

    def test_string_labels(self):
        X, y = three_cluster_data()
        names = np.array(["ant", "bee", "cow"])
        m = MultiClassTsetlinMachine(n_clauses=20, epochs=30,
                                     random_state=0).fit(X, names[y])
        assert set(m.classes_) == {"ant", "bee", "cow"}
        assert (m.predict(X) == names[y]).mean() == 1.0

    def test_two_classes_couple_like_binary_pair(self):
        # with k=2 the sampled negative is deterministic, so each step is
        # a coupled pair of binary updates and training is deterministic
        X, y = three_cluster_data()
        y = (y > 0).astype(int)
        a = MultiClassTsetlinMachine(n_clauses=10, epochs=5,
                                     random_state=1).fit(X, y)
        b = MultiClassTsetlinMachine(n_clauses=10, epochs=5,
                                     random_state=1).fit(X, y)
        assert np.array_equal(a.state_, b.state_)

    def test_bank_isolation(self):
        # one step touches at most the target bank and one sampled negative;
        # either may happen to stay put, but no second negative ever moves
        from reltm import _kernels
        from reltm.automata import init_bank
        for seed in range(10):
            rng = np.random.default_rng(seed)
            states = np.stack([init_bank(4, 6, 100, rng) for _ in range(4)])
            before = states.copy()
            Xpad = np.ones((1, 1, 6), dtype=np.uint8)
            wcounts = np.ones(1, dtype=np.int64)
            _kernels.fit_multiclass(states, Xpad, wcounts,
                                    np.array([1], dtype=np.int64), 1,
                                    100, 5, 3.0, False, rng)
            changed = {c for c in range(4)
                       if not np.array_equal(states[c], before[c])}
            assert len(changed - {1}) <= 1

    def test_feature_width_mismatch_rejected(self):
        X, y = three_cluster_data()
        m = MultiClassTsetlinMachine(n_clauses=10, epochs=2,
                                     random_state=0).fit(X, y)
        with pytest.raises(ValueError):
            m.predict(X[:, :4])

    def test_validation(self):
        X, y = three_cluster_data()
        with pytest.raises(ValueError):
            MultiClassTsetlinMachine(n_clauses=5).fit(X, y)
        with pytest.raises(ValueError):
            MultiClassTsetlinMachine(s=0.5).fit(X, y)
        with pytest.raises(ValueError):
            MultiClassTsetlinMachine().fit(X[:0], y[:0])
        with pytest.raises(ValueError):
            MultiClassTsetlinMachine().fit(X, np.zeros_like(y))

    def test_determinism_and_windowed_input(self):
        X, y = three_cluster_data(n=100)
        windows = [x[None, :] for x in X]
        a = MultiClassTsetlinMachine(n_clauses=10, epochs=5,
                                     random_state=2).fit(X, y)
        b = MultiClassTsetlinMachine(n_clauses=10, epochs=5,
                                     random_state=2).fit(windows, y)
        assert np.array_equal(a.state_, b.state_)
        assert np.array_equal(a.predict(X), b.predict(windows))


class TestEvaluate:
    def test_perfect(self):
        y = np.array([0, 1, 2, 1])
        m = evaluate(y, y)
        assert m["accuracy"] == 1.0
        assert m["f_macro"] == 1.0
        assert m["f_micro"] == 1.0

    def test_all_wrong_two_class(self):
        y = np.array([0, 0, 1, 1])
        p = np.array([1, 1, 0, 0])
        m = evaluate(y, p)
        assert m["accuracy"] == 0.0
        assert m["f_macro"] == 0.0

    def test_confusion_rows_are_support(self):
        y = np.array([0, 0, 1, 2, 2, 2])
        p = np.array([0, 1, 1, 2, 0, 2])
        m = evaluate(y, p)
        assert m["confusion"].sum(axis=1).tolist() == [2, 1, 3]
        assert m["confusion"][2, 0] == 1

    def test_matches_sklearn(self):
        from sklearn.metrics import accuracy_score, f1_score
        rng = np.random.default_rng(0)
        y = rng.integers(0, 4, size=200)
        p = rng.integers(0, 4, size=200)
        m = evaluate(y, p)
        assert m["accuracy"] == pytest.approx(accuracy_score(y, p))
        assert m["f_macro"] == pytest.approx(f1_score(y, p, average="macro"))
        assert m["f_micro"] == pytest.approx(f1_score(y, p, average="micro"))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            evaluate(np.array([]), np.array([]))

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)),
                    min_size=1, max_size=50))
    def test_accuracy_in_unit_interval(self, pairs):
        y = np.array([a for a, _ in pairs])
        p = np.array([b for _, b in pairs])
        m = evaluate(y, p)
        assert 0.0 <= m["accuracy"] <= 1.0
        assert 0.0 <= m["f_macro"] <= 1.0


class TestAgainstBinary:
    def test_binary_machine_agrees_on_separable_data(self):
        X, y = three_cluster_data()
        y = (y == 2).astype(int)
        tm = TsetlinMachine(n_clauses=20, epochs=30, random_state=0).fit(X, y)
        mc = MultiClassTsetlinMachine(n_clauses=20, epochs=30,
                                      random_state=0).fit(X, y)
        assert (tm.predict(X) == y).mean() == 1.0
        assert (mc.predict(X) == y).mean() == 1.0

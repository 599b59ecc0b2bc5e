import pytest
from hypothesis import given, strategies as st
from scipy import stats

from puc.evaluation import (
    EvaluationError,
    discordant_counts,
    jaccard_per_dimension,
    load_published,
    mcnemar_exact,
    overall_accuracy,
    paired_t_test,
    unit_identification_accuracy,
    value_accuracy,
)


def test_jaccard_example():
    pred, truth = ["length", "length", "mass"], ["length", "mass", "mass"]
    assert jaccard_per_dimension(pred, truth, "length") == 0.5
    assert jaccard_per_dimension(pred, truth, "mass") == 0.5
    assert jaccard_per_dimension(pred, truth, "volume") is None


def test_accuracy_examples():
    assert overall_accuracy(["a"] * 49 + ["b"], ["a"] * 50) == 0.98
    rows = [(1.0, "litre"), (2.0, "litre"), (3.0, "cubic foot")]
    assert unit_identification_accuracy(rows, [(1.0, "litre")] * 3) == pytest.approx(2 / 3)
    assert value_accuracy([(1.0, "x"), (None, "x")], [(1.0 + 1e-12, "y"), (None, "y")]) == 1.0
    with pytest.raises(EvaluationError, match="length mismatch"):
        overall_accuracy(["a"], ["a", "b"])
    with pytest.raises(EvaluationError):
        overall_accuracy([], [])


@pytest.mark.parametrize("n01, n10, p", [(6, 0, 0.03125), (1, 1, 1.0), (5, 1, 0.21875),
                                         (0, 1, 1.0), (10, 0, 2 / 1024)])
def test_mcnemar_examples(n01, n10, p):
    assert mcnemar_exact(n01, n10) == pytest.approx(p, rel=1e-12)


@given(st.integers(0, 60), st.integers(0, 60))
def test_mcnemar_symmetric_and_matches_binomial(a, b):
    if a + b == 0:
        with pytest.raises(EvaluationError):
            mcnemar_exact(a, b)
        return
    p = mcnemar_exact(a, b)
    assert p == mcnemar_exact(b, a)
    assert 0 < p <= 1
    ref = stats.binomtest(a, a + b, 0.5).pvalue
    assert p == pytest.approx(ref, rel=1e-9)


def test_discordant_counts():
    assert discordant_counts([1, 1, 0, 1, 0], [0, 1, 1, 0, 0]) == (2, 1)


_scores = st.lists(st.floats(0, 1, allow_nan=False), min_size=2, max_size=20)


@given(_scores, st.data())
def test_paired_t_matches_scipy_and_is_antisymmetric(a, data):
    b = data.draw(st.lists(st.floats(0, 1, allow_nan=False), min_size=len(a), max_size=len(a)))
    diffs = [x - y for x, y in zip(a, b)]
    if max(diffs) - min(diffs) < 1e-6:
        return  # near-constant differences: t is numerically meaningless
    r = paired_t_test(a, b)
    ref = stats.ttest_rel(a, b)
    assert r.statistic == pytest.approx(ref.statistic, rel=1e-7)
    assert r.pvalue == pytest.approx(ref.pvalue, rel=1e-6, abs=1e-300)
    assert r.df == len(a) - 1
    flipped = paired_t_test(b, a)
    assert flipped.statistic == pytest.approx(-r.statistic, rel=1e-12)
    assert flipped.pvalue == pytest.approx(r.pvalue, rel=1e-12)


def test_paired_t_degenerate():
    with pytest.raises(EvaluationError, match="zero-variance"):
        paired_t_test([0.5, 0.6], [0.4, 0.5])
    with pytest.raises(EvaluationError):
        paired_t_test([0.5], [0.4])


def test_published_dimension_fixture_reproduces_aggregates():
    d = load_published("dimension_inference")
    truth = d["truth"]
    assert len(truth) == 24
    for system, pred in d["predictions"].items():
        pred = [p or "unknown" for p in pred]
        assert round(overall_accuracy(pred, truth), 2) == d["published"]["overall_accuracy"][system]
        for dim, j in d["published"]["jaccard"][system].items():
            got = jaccard_per_dimension(pred, truth, dim)
            assert round(got or 0.0, 2) == j, (system, dim)


def test_published_unit_fixture_shape():
    u = load_published("unit_identification")
    assert len(u["datasets"]) == 15
    assert set(u["accuracy"]) == {"CCUT", "GQ", "Pint", "Quantulum", "PUC"}
    assert all(len(v) == 15 for v in u["accuracy"].values())
    assert u["accuracy"]["PUC"][0] == 0.70 and u["accuracy"]["Quantulum"][0] == 1.0
    assert u["overall"]["PUC"] == 0.94


def test_unknown_published_name():
    with pytest.raises(EvaluationError):
        load_published("nope")

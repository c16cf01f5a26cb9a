from fractions import Fraction

from folcheck.metrics import MetricsSummary, confusion_summary


def test_spec_synthetic_four_case_matrix():
    # labels (T,T,F,F) with verdicts (T,F,F,F)
    pairs = [(True, True), (True, False), (False, False), (False, False)]
    summary = confusion_summary(pairs, total=4, compiled=4)
    assert (summary.tp, summary.fn, summary.tn, summary.fp) == (1, 1, 2, 0)
    assert summary.accuracy == Fraction(3, 4)
    assert summary.recall == Fraction(1, 2)
    assert summary.precision == Fraction(1)
    assert summary.specificity == Fraction(1)
    assert summary.false_positive_rate == Fraction(0)


def test_rates_are_exact_rationals():
    pairs = [(True, True)] * 1 + [(True, False)] * 2
    summary = confusion_summary(pairs, total=3, compiled=3)
    assert summary.recall == Fraction(1, 3)
    assert summary.f1 == Fraction(1, 2)  # 2*1*(1/3) / (1 + 1/3)


def test_empty_run_reports_absent_rates_not_nan():
    summary = confusion_summary([], total=0, compiled=0)
    payload = summary.to_json()
    assert summary.accuracy is None
    assert payload["accuracy"] is None
    assert payload["compile_rate"] is None
    assert payload["f1"] is None


def test_f1_zero_when_precision_and_recall_zero():
    # one false positive, one false negative: P = 0, R = 0 -> f1 = 0
    pairs = [(False, True), (True, False)]
    summary = confusion_summary(pairs, total=2, compiled=2)
    assert summary.precision == Fraction(0)
    assert summary.recall == Fraction(0)
    assert summary.f1 == Fraction(0)


def test_specificity_equals_one_minus_fpr():
    pairs = [(False, True)] * 3 + [(False, False)] * 5 + [(True, True)] * 2
    summary = confusion_summary(pairs, total=10, compiled=10)
    assert summary.specificity == 1 - summary.false_positive_rate


def test_unpredicted_cases_excluded_from_matrix():
    pairs = [(True, None), (True, True)]
    summary = confusion_summary(pairs, total=2, compiled=1)
    assert summary.labeled == 1
    assert summary.accuracy == Fraction(1)


def test_json_rates_render_as_reduced_fractions():
    summary = MetricsSummary(total=4, compiled=3, tp=1, fp=0, tn=2, fn=1)
    payload = summary.to_json()
    assert payload["compile_rate"] == "3/4"
    assert payload["accuracy"] == "3/4"
    assert payload["recall"] == "1/2"
    assert payload["confusion"] == {"tp": 1, "fp": 0, "tn": 2, "fn": 1}


def test_per_attempt_histogram_serialized_sorted():
    summary = MetricsSummary(2, 2, 0, 0, 0, 0, {2: 1, 1: 5}, unresolved=3)
    payload = summary.to_json()
    assert list(payload["per_attempt"]) == ["1", "2"]
    assert payload["unresolved"] == 3

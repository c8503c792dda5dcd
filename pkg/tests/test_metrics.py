import itertools
import math
import random

import pytest

from metric_audit.corpus import AnswerRecord, QuestionRecord, SimilarityRecord
from metric_audit.errors import DataError, StatError
from metric_audit.metrics import (
    MetricScore,
    majority_answer,
    majority_baseline,
    random_chance,
    score_clipscore,
    score_dsg,
    score_questions,
    score_tifa,
    score_vpeval,
)


def yn(qid, gold="yes", prompt="p1", metric="tifa", deps=()):
    return QuestionRecord(
        question_id=qid, prompt_id=prompt, metric=metric, text=f"{qid}?",
        qtype="yes_no", choices=("yes", "no"), gold=gold, depends_on=tuple(deps),
    )


def mc(qid, choices, gold, prompt="p1", metric="tifa", deps=()):
    return QuestionRecord(
        question_id=qid, prompt_id=prompt, metric=metric, text=f"{qid}?",
        qtype="multiple_choice", choices=tuple(choices), gold=gold, depends_on=tuple(deps),
    )


def ans(qid, predicted, source="vqa"):
    return AnswerRecord(question_id=qid, source=source, predicted=predicted)


# --- flat scoring -----------------------------------------------------------------

def test_two_of_three_correct():
    qs = [yn("q1"), yn("q2"), yn("q3")]
    answers = [ans("q1", "yes"), ans("q2", "yes"), ans("q3", "no")]
    got = score_tifa(qs, answers, "vqa")
    assert got.value == pytest.approx(2 / 3)
    assert got.n_questions == 3
    assert got.metric == "tifa"


def test_all_correct():
    qs = [yn("q1"), yn("q2")]
    answers = [ans("q1", "yes"), ans("q2", "yes")]
    assert score_tifa(qs, answers, "vqa").value == 1.0


def test_mixed_gold_types():
    qs = [yn("q1"), yn("q2"), mc("q3", ["dog", "cat"], "dog"), mc("q4", ["2", "3"], "2")]
    answers = [ans("q1", "yes"), ans("q2", "no"), ans("q3", "dog"), ans("q4", "2")]
    assert score_tifa(qs, answers, "vqa").value == 0.75


def test_match_is_case_insensitive_and_trimmed():
    qs = [mc("q1", ["Dog", "cat"], "Dog")]
    answers = [ans("q1", "  dog ")]
    assert score_tifa(qs, answers, "vqa").value == 1.0


def test_missing_answer_lists_question_ids():
    qs = [yn("q1"), yn("q2")]
    with pytest.raises(DataError, match="q2"):
        score_tifa(qs, [ans("q1", "yes")], "vqa")


def test_empty_group_rejected():
    with pytest.raises(StatError):
        score_vpeval([], [], "vqa")


def test_vpeval_equals_tifa_on_same_records():
    rng = random.Random(3)
    qs = []
    answers = []
    for i in range(12):
        if rng.random() < 0.5:
            qs.append(yn(f"q{i}", gold=rng.choice(["yes", "no"])))
            answers.append(ans(f"q{i}", rng.choice(["yes", "no"])))
        else:
            qs.append(mc(f"q{i}", ["a", "b", "c", "d"], rng.choice("abcd")))
            answers.append(ans(f"q{i}", rng.choice("abcd")))
    assert score_vpeval(qs, answers, "vqa") == score_tifa(qs, answers, "vqa")


def test_question_order_permutation_invariant():
    qs = [yn("q1"), yn("q2", gold="no"), mc("q3", ["a", "b"], "a")]
    answers = [ans("q1", "yes"), ans("q2", "yes"), ans("q3", "a")]
    base = score_tifa(qs, answers, "vqa").value
    for perm in itertools.permutations(qs):
        assert score_tifa(list(perm), answers, "vqa").value == base


# --- dependency gating --------------------------------------------------------------

def test_dog_red_dog_gating():
    # "Is there a dog?" answered no (gold yes); "Is the dog red?" answered yes
    # (gold yes) but depends on q1 -> both count incorrect.
    qs = [
        yn("q1", metric="dsg"),
        yn("q2", metric="dsg", deps=["q1"]),
    ]
    answers = [ans("q1", "no"), ans("q2", "yes")]
    assert score_dsg(qs, answers, "vqa").value == 0.0
    flat = [yn("q1"), yn("q2")]
    assert score_tifa(flat, answers, "vqa").value == 0.5


def test_gating_not_triggered_when_parent_correct():
    qs = [yn("q1", metric="dsg"), yn("q2", metric="dsg", deps=["q1"])]
    answers = [ans("q1", "yes"), ans("q2", "yes")]
    assert score_dsg(qs, answers, "vqa").value == 1.0


def test_three_chain_gating():
    qs = [
        yn("q1", metric="dsg"),
        yn("q2", metric="dsg", deps=["q1"]),
        yn("q3", metric="dsg", deps=["q2"]),
    ]
    answers = [ans("q1", "yes"), ans("q2", "no"), ans("q3", "yes")]
    assert score_dsg(qs, answers, "vqa").value == pytest.approx(1 / 3)


def random_dag_fixture(rng, n):
    qs = []
    for i in range(n):
        deps = [f"q{j}" for j in range(i) if rng.random() < 0.35]
        qs.append(yn(f"q{i}", gold=rng.choice(["yes", "no"]), metric="dsg", deps=deps))
    answers = [ans(f"q{i}", rng.choice(["yes", "no"])) for i in range(n)]
    return qs, answers


def test_gating_never_beats_flat_on_random_dags():
    rng = random.Random(77)
    for _ in range(300):
        qs, answers = random_dag_fixture(rng, rng.randrange(1, 12))
        gated = score_dsg(qs, answers, "vqa").value
        flat = score_tifa(qs, answers, "vqa").value
        assert gated <= flat + 1e-12


def test_score_questions_dispatch():
    qs = [yn("q1", metric="dsg"), yn("q2", metric="dsg", deps=["q1"])]
    answers = [ans("q1", "no"), ans("q2", "yes")]
    assert score_questions(qs, answers, "vqa").value == 0.0


# --- similarity ingestion -------------------------------------------------------------

def sim(pid, source, variant, score):
    return SimilarityRecord(prompt_id=pid, source=source, caption_variant=variant, score=score)


def test_clipscore_value_passthrough():
    records = [sim("p1", "m1", "full_prompt", 0.306)]
    got = score_clipscore(records, "p1", "m1")
    assert got.value == 0.306
    assert got.n_questions == 0
    assert got.metric == "clipscore"


def test_clipscore_missing_and_duplicate():
    with pytest.raises(DataError, match="no"):
        score_clipscore([], "p1", "m1")
    records = [sim("p1", "m1", "full_prompt", 0.3), sim("p1", "m1", "full_prompt", 0.4)]
    with pytest.raises(DataError, match="2"):
        score_clipscore(records, "p1", "m1")


def test_clipscore_ignores_other_variants():
    records = [
        sim("p1", "m1", "full_prompt", 0.25),
        sim("p1", "m1", "q1::0", 0.9),
    ]
    assert score_clipscore(records, "p1", "m1").value == 0.25


# --- baselines ---------------------------------------------------------------------


def enumerate_chance(questions):
    """Exact expected random-chance score by enumerating correctness patterns."""
    probs = [1 / len(q.choices) for q in questions]
    index = {q.question_id: i for i, q in enumerate(questions)}
    gated = all(q.metric == "dsg" for q in questions)
    total = 0.0
    for pattern in itertools.product([True, False], repeat=len(questions)):
        weight = 1.0
        for hit, p in zip(pattern, probs):
            weight *= p if hit else 1 - p
        eff = list(pattern)
        if gated:
            changed = True
            while changed:
                changed = False
                for i, q in enumerate(questions):
                    if eff[i] and any(not eff[index[d]] for d in q.depends_on):
                        eff[i] = False
                        changed = True
        total += weight * (sum(eff) / len(eff))
    return total


def test_random_chance_yes_no():
    qs = [yn(f"q{i}") for i in range(10)]
    se = math.sqrt(0.25 / (100_000 * 10))
    got = random_chance(qs, trials=100_000, seed=11)
    assert abs(got - 0.5) < 3 * se


def test_random_chance_four_choice():
    qs = [mc(f"q{i}", ["a", "b", "c", "d"], "a") for i in range(10)]
    se = math.sqrt(0.25 * 0.75 / (100_000 * 10))
    got = random_chance(qs, trials=100_000, seed=11)
    assert abs(got - 0.25) < 3 * se


def test_random_chance_dsg_chain_matches_enumeration():
    qs = [yn("q1", metric="dsg"), yn("q2", metric="dsg", deps=["q1"])]
    exact = enumerate_chance(qs)
    assert exact == pytest.approx(0.375)
    # per-trial variance from the enumerated distribution {0: .5, .5: .25, 1: .25}
    var = (0.25 * 0.25 + 1.0 * 0.25) - exact**2
    se = math.sqrt(var / 100_000)
    got = random_chance(qs, trials=100_000, seed=23)
    assert abs(got - exact) < 3 * se


def enumerate_chance_variance(questions):
    """Exact per-trial variance of the random-chance score, by enumeration."""
    probs = [1 / len(q.choices) for q in questions]
    index = {q.question_id: i for i, q in enumerate(questions)}
    gated = all(q.metric == "dsg" for q in questions)
    mean = sq = 0.0
    for pattern in itertools.product([True, False], repeat=len(questions)):
        weight = 1.0
        for hit, p in zip(pattern, probs):
            weight *= p if hit else 1 - p
        eff = list(pattern)
        if gated:
            changed = True
            while changed:
                changed = False
                for i, q in enumerate(questions):
                    if eff[i] and any(not eff[index[d]] for d in q.depends_on):
                        eff[i] = False
                        changed = True
        value = sum(eff) / len(eff)
        mean += weight * value
        sq += weight * value * value
    return sq - mean * mean


def test_random_chance_converges_to_enumeration_on_random_dags():
    rng = random.Random(5)
    trials = 60_000
    for trial in range(5):
        qs, _ = random_dag_fixture(rng, rng.randrange(2, 8))
        exact = enumerate_chance(qs)
        se = math.sqrt(enumerate_chance_variance(qs) / trials)
        got = random_chance(qs, trials=trials, seed=trial)
        assert abs(got - exact) < 3 * se


def test_random_chance_deterministic_given_seed():
    qs = [yn(f"q{i}") for i in range(5)]
    assert random_chance(qs, 1000, seed=9) == random_chance(qs, 1000, seed=9)


def test_majority_baseline_all_yes():
    qs = [yn(f"q{i}", gold="yes") for i in range(4)]
    assert majority_baseline(qs) == 1.0


def test_majority_baseline_skewed_yes():
    qs = [yn(f"q{i}", gold="yes") for i in range(997)] + [yn(f"n{i}", gold="no") for i in range(3)]
    assert majority_baseline(qs) == pytest.approx(0.997)


def test_majority_baseline_first_choice():
    qs = [mc(f"q{i}", ["a", "b", "c", "d"], "a") for i in range(94)] + [
        mc(f"x{i}", ["a", "b", "c", "d"], "b") for i in range(6)
    ]
    assert majority_baseline(qs) == pytest.approx(0.94)


def test_majority_baseline_equals_score_under_constant_answers():
    rng = random.Random(13)
    for metric in ("tifa", "dsg"):
        for _ in range(50):
            n = rng.randrange(1, 10)
            qs = []
            for i in range(n):
                deps = [f"q{j}" for j in range(i) if metric == "dsg" and rng.random() < 0.3]
                if rng.random() < 0.6 or metric == "dsg":
                    qs.append(yn(f"q{i}", gold=rng.choice(["yes", "no"]), metric=metric, deps=deps))
                else:
                    qs.append(mc(f"q{i}", ["a", "b", "c"], rng.choice("abc"), metric=metric))
            answers = [ans(q.question_id, majority_answer(q)) for q in qs]
            assert majority_baseline(qs) == score_questions(qs, answers, "vqa").value


def test_majority_baseline_gates_dsg():
    qs = [yn("q1", gold="no", metric="dsg"), yn("q2", gold="yes", metric="dsg", deps=["q1"])]
    # constant "yes" misses q1, so q2 is poisoned despite matching
    assert majority_baseline(qs) == 0.0


# --- MetricScore invariants -------------------------------------------------------

def test_metric_score_validation():
    with pytest.raises(ValueError):
        MetricScore("p1", "m1", "tifa", 1.5, 3)
    with pytest.raises(ValueError):
        MetricScore("p1", "m1", "tifa", 0.5, 0)
    with pytest.raises(ValueError):
        MetricScore("p1", "m1", "clipscore", 0.5, 2)
    with pytest.raises(ValueError):
        MetricScore("p1", "m1", "clipscore", 1.5, 0)
    with pytest.raises(ValueError):
        MetricScore("p1", "m1", "bleu", 0.5, 1)

"""Per-(prompt, source, metric) consistency scores and their baselines.

QA metrics are the fraction of correctly answered questions (flat for the
TIFA/VPEval rules, dependency-gated for DSG); the similarity metric ingests
one cosine-similarity record per (prompt, source). Answer matching is
case-insensitive exact string equality after trimming; no synonym matching.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import (
    FULL_PROMPT_VARIANT,
    QUESTION_METRICS,
    SCORE_METRICS,
    AnswerRecord,
    QuestionRecord,
    SimilarityRecord,
)
from .errors import DataError, StatError


@dataclass(frozen=True)
class MetricScore:
    prompt_id: str
    source: str
    metric: str
    value: float
    n_questions: int

    def __post_init__(self):
        if self.metric not in SCORE_METRICS:
            raise ValueError(f"unknown metric {self.metric!r}")
        if self.metric == "clipscore":
            if self.n_questions != 0:
                raise ValueError("similarity scores carry no questions")
            if not -1.0 <= self.value <= 1.0:
                raise ValueError(f"similarity score {self.value} outside [-1, 1]")
        else:
            if self.n_questions < 1:
                raise ValueError("QA scores require at least one question")
            if not 0.0 <= self.value <= 1.0:
                raise ValueError(f"QA score {self.value} outside [0, 1]")

    def to_json(self) -> dict:
        return {
            "prompt_id": self.prompt_id,
            "source": self.source,
            "metric": self.metric,
            "value": self.value,
            "n_questions": self.n_questions,
        }


@dataclass(frozen=True)
class VerdictSet:
    """Per-question correctness for one (prompt, metric, source) group."""

    verdicts: dict[str, bool]
    predictions: dict[str, str]


def answers_match(predicted: str, gold: str) -> bool:
    return predicted.strip().lower() == gold.strip().lower()


def _single_group(questions: list[QuestionRecord]) -> tuple[str, str]:
    if not questions:
        raise StatError("cannot score an empty question group")
    prompt_ids = {q.prompt_id for q in questions}
    metrics = {q.metric for q in questions}
    if len(prompt_ids) != 1 or len(metrics) != 1:
        raise DataError(
            f"expected one (prompt, metric) group, got prompts={sorted(prompt_ids)} metrics={sorted(metrics)}"
        )
    return prompt_ids.pop(), metrics.pop()


def _raw_verdicts(
    questions: list[QuestionRecord], answers, source: str
) -> VerdictSet:
    by_key = {}
    for a in answers:
        if a.source == source:
            by_key[a.question_id] = a
    missing = [q.question_id for q in questions if q.question_id not in by_key]
    if missing:
        raise DataError(
            f"missing answers from source {source!r} for questions: {', '.join(sorted(missing))}"
        )
    verdicts = {}
    predictions = {}
    for q in questions:
        predicted = by_key[q.question_id].predicted
        predictions[q.question_id] = predicted
        verdicts[q.question_id] = answers_match(predicted, q.gold)
    return VerdictSet(verdicts=verdicts, predictions=predictions)


def gate_by_dependencies(
    questions: list[QuestionRecord], raw: dict[str, bool]
) -> dict[str, bool]:
    """A question counts only if it and every ancestor in its dependency
    closure answered correctly."""
    by_id = {q.question_id: q for q in questions}
    memo: dict[str, bool] = {}

    def ok(qid: str) -> bool:
        if qid not in memo:
            q = by_id[qid]
            memo[qid] = raw[qid] and all(ok(d) for d in q.depends_on if d in by_id)
        return memo[qid]

    return {q.question_id: ok(q.question_id) for q in questions}


def _fraction(verdicts: dict[str, bool]) -> float:
    return sum(verdicts.values()) / len(verdicts)


def score_tifa(questions: list[QuestionRecord], answers, source: str) -> MetricScore:
    """Flat percent-correct over one (prompt, metric) question group."""
    prompt_id, metric = _single_group(questions)
    raw = _raw_verdicts(questions, answers, source)
    return MetricScore(prompt_id, source, metric, _fraction(raw.verdicts), len(questions))


def score_vpeval(questions: list[QuestionRecord], answers, source: str) -> MetricScore:
    """Flat percent-correct over ingested per-question verdict records."""
    return score_tifa(questions, answers, source)


def score_dsg(questions: list[QuestionRecord], answers, source: str) -> MetricScore:
    """Percent-correct where an incorrect ancestor poisons its dependents."""
    prompt_id, metric = _single_group(questions)
    raw = _raw_verdicts(questions, answers, source)
    gated = gate_by_dependencies(questions, raw.verdicts)
    return MetricScore(prompt_id, source, metric, _fraction(gated), len(questions))


def score_questions(questions: list[QuestionRecord], answers, source: str) -> MetricScore:
    """Dispatch on the group's metric: gated for dsg, flat otherwise."""
    _, metric = _single_group(questions)
    if metric == "dsg":
        return score_dsg(questions, answers, source)
    return score_tifa(questions, answers, source)


def score_clipscore(
    similarities: list[SimilarityRecord], prompt_id: str, source: str
) -> MetricScore:
    """Ingest the one full-prompt cosine similarity for (prompt, source)."""
    matches = [
        s
        for s in similarities
        if s.prompt_id == prompt_id
        and s.source == source
        and s.caption_variant == FULL_PROMPT_VARIANT
    ]
    if not matches:
        raise DataError(
            f"no '{FULL_PROMPT_VARIANT}' similarity record for (prompt {prompt_id!r}, source {source!r})"
        )
    if len(matches) > 1:
        raise DataError(
            f"{len(matches)} '{FULL_PROMPT_VARIANT}' similarity records for "
            f"(prompt {prompt_id!r}, source {source!r}); expected exactly one"
        )
    return MetricScore(prompt_id, source, "clipscore", matches[0].score, 0)


# ---------------------------------------------------------------------------
# Baselines
# ---------------------------------------------------------------------------


def _topological(questions: list[QuestionRecord]) -> list[int]:
    """Indices of questions ordered so that dependencies come first."""
    index = {q.question_id: i for i, q in enumerate(questions)}
    indegree = [0] * len(questions)
    dependents: list[list[int]] = [[] for _ in questions]
    for i, q in enumerate(questions):
        for dep in q.depends_on:
            if dep in index:
                indegree[i] += 1
                dependents[index[dep]].append(i)
    order = [i for i, d in enumerate(indegree) if d == 0]
    head = 0
    while head < len(order):
        cur = order[head]
        head += 1
        for nxt in dependents[cur]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                order.append(nxt)
    if len(order) != len(questions):
        raise DataError("dependency graph contains a cycle")
    return order


def random_chance(
    questions: list[QuestionRecord], trials: int, seed: int, gated: bool | None = None
) -> float:
    """Monte-Carlo expected score when every question is answered uniformly
    at random over its choices; dependency gating is applied inside each
    trial for dsg groups. Deterministic given the seed."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not questions:
        raise StatError("cannot estimate chance on an empty question group")
    metrics = {q.metric for q in questions}
    if gated is None:
        if len(metrics) != 1:
            raise DataError(f"mixed metrics in one chance estimate: {sorted(metrics)}")
        gated = metrics.pop() == "dsg"
    rng = np.random.default_rng(seed)
    n = len(questions)
    probs = np.array([1.0 / len(q.choices) for q in questions])
    correct = rng.random((trials, n)) < probs[None, :]
    if gated:
        index = {q.question_id: i for i, q in enumerate(questions)}
        for i in _topological(questions):
            for dep in questions[i].depends_on:
                correct[:, i] &= correct[:, index[dep]]
    return float(correct.mean(axis=1).mean())


def majority_baseline(questions: list[QuestionRecord], gated: bool | None = None) -> float:
    """Score achieved by answering "yes" to every yes/no question and the
    first listed choice to every multiple-choice question (gating applied
    for dsg groups)."""
    if not questions:
        raise StatError("cannot compute a baseline on an empty question group")
    if gated is None:
        metrics = {q.metric for q in questions}
        if len(metrics) != 1:
            raise DataError(f"mixed metrics in one baseline: {sorted(metrics)}")
        gated = metrics.pop() == "dsg"
    raw = {
        q.question_id: answers_match(majority_answer(q), q.gold) for q in questions
    }
    if gated:
        raw = gate_by_dependencies(questions, raw)
    return sum(raw.values()) / len(raw)


def majority_answer(question: QuestionRecord) -> str:
    """The skew-exploiting constant answer: "yes" for yes/no, else the first choice."""
    return "yes" if question.qtype == "yes_no" else question.choices[0]


# ---------------------------------------------------------------------------
# Corpus-level scoring helpers
# ---------------------------------------------------------------------------


def score_corpus(corpus) -> list[MetricScore]:
    """Score every (prompt, metric, source) group with complete answers, plus
    every ingested full-prompt similarity; deterministic order."""
    scores: list[MetricScore] = []
    groups: dict[tuple[str, str], list[QuestionRecord]] = {}
    for q in corpus.questions:
        groups.setdefault((q.prompt_id, q.metric), []).append(q)
    answers_by_group: dict[tuple[str, str, str], list[AnswerRecord]] = {}
    sources_by_group: dict[tuple[str, str], set[str]] = {}
    for a in corpus.answers:
        q = corpus.questions_by_id[a.question_id]
        key = (q.prompt_id, q.metric, a.source)
        answers_by_group.setdefault(key, []).append(a)
        sources_by_group.setdefault((q.prompt_id, q.metric), set()).add(a.source)
    for (pid, metric) in sorted(groups):
        qgroup = groups[(pid, metric)]
        for source in sorted(sources_by_group.get((pid, metric), ())):
            group_answers = answers_by_group[(pid, metric, source)]
            scores.append(score_questions(qgroup, group_answers, source))
    sim_keys = sorted(
        {
            (s.prompt_id, s.source)
            for s in corpus.similarities
            if s.caption_variant == FULL_PROMPT_VARIANT
        }
    )
    for pid, source in sim_keys:
        scores.append(score_clipscore(corpus.similarities, pid, source))
    return scores


def load_scores(path) -> list[MetricScore]:
    """Read a scores file (one object per line) back into MetricScore records."""
    from .corpus import read_jsonl

    out = []
    for lineno, obj in read_jsonl(path):
        try:
            out.append(
                MetricScore(
                    prompt_id=obj["prompt_id"],
                    source=obj["source"],
                    metric=obj["metric"],
                    value=float(obj["value"]),
                    n_questions=int(obj["n_questions"]),
                )
            )
        except (KeyError, ValueError) as exc:
            raise DataError(f"bad score record: {exc}", path=str(path), line=lineno)
    return out

"""Ablation transforms: shuffled images, within-example shuffled text,
retrieval-style QA over similarity records, and text-only QA formatting.

Every transform is a deterministic function of (input, seed): group-local
seeds are derived from the global seed and the group key, so results do not
depend on processing order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import ImageRef, PromptRecord, QuestionRecord, SimilarityRecord
from .errors import DataError, StatError
from .metrics import MetricScore, gate_by_dependencies
from .seeding import derive_seed
from .textprops import tokenize

ABLATION_KINDS = ("shuffle_images", "shuffle_text", "retrieval_qa", "text_only_qa")

# Rendering order for ablation bar series.
VARIANT_ORDER = ("original", "shuffled_images", "shuffled_text", "retrieval_qa", "text_only_qa")


@dataclass(frozen=True)
class AblationPlan:
    kind: str
    seed: int
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ABLATION_KINDS:
            raise ValueError(f"unknown ablation kind {self.kind!r}")

    def provenance(self) -> dict:
        return {"kind": self.kind, "seed": self.seed, "options": dict(self.options)}


# ---------------------------------------------------------------------------
# Ablation 1: shuffled images
# ---------------------------------------------------------------------------


def shuffle_images(
    image_refs: list[ImageRef],
    prompts_by_id: dict[str, PromptRecord],
    seed: int,
    derangement: bool = False,
) -> list[ImageRef]:
    """Permute image keys within each (dataset, source) group.

    Every image is used exactly once. With ``derangement`` no prompt keeps its
    own image (a size-1 group is then an error); without it, coincidental
    self-assignment is allowed.
    """
    groups: dict[tuple[str, str], list[ImageRef]] = {}
    for ref in image_refs:
        prompt = prompts_by_id.get(ref.prompt_id)
        if prompt is None:
            raise DataError(f"image references unknown prompt id {ref.prompt_id!r}")
        groups.setdefault((prompt.dataset, ref.source), []).append(ref)

    out: list[ImageRef] = []
    for (dataset, source) in sorted(groups):
        members = sorted(groups[(dataset, source)], key=lambda r: r.prompt_id)
        n = len(members)
        if n == 1 and derangement:
            raise StatError(
                f"cannot derange a single-image group (dataset {dataset!r}, source {source!r})"
            )
        rng = np.random.default_rng(derive_seed(seed, "shuffle_images", dataset, source))
        perm = rng.permutation(n)
        if derangement:
            while np.any(perm == np.arange(n)):
                perm = rng.permutation(n)
        for i, ref in enumerate(members):
            donor = members[int(perm[i])]
            out.append(
                ImageRef(
                    prompt_id=ref.prompt_id,
                    source=ref.source,
                    image_key=donor.image_key,
                    extra=dict(ref.extra),
                )
            )
    return out


# ---------------------------------------------------------------------------
# Ablation 2: shuffled text (within an example)
# ---------------------------------------------------------------------------


def shuffle_text(text: str, seed: int) -> str:
    """Uniformly permute a text's tokens, keeping a terminal punctuation
    token (if any) terminal. The token multiset is preserved; tokens are
    re-joined with single spaces."""
    seq = tokenize(text)
    if len(seq) == 0:
        return ""
    tokens = list(seq.tokens)
    tail: list[str] = []
    if not seq.is_word[-1]:
        tail = [tokens.pop()]
    rng = np.random.default_rng(derive_seed(seed, "shuffle_text", text))
    order = rng.permutation(len(tokens))
    shuffled = [tokens[int(i)] for i in order]
    return " ".join(shuffled + tail)


def shuffle_prompt_records(prompts: list[PromptRecord], seed: int) -> list[PromptRecord]:
    """Shuffled-text copies of prompt records; parses are dropped because they
    no longer describe the reordered text."""
    return [
        PromptRecord(
            id=p.id,
            dataset=p.dataset,
            text=shuffle_text(p.text, seed),
            parse=None,
            extra=dict(p.extra),
        )
        for p in prompts
    ]


def shuffle_question_records(questions: list[QuestionRecord], seed: int) -> list[QuestionRecord]:
    """Shuffled-text copies of question records (choices and gold unchanged)."""
    return [
        QuestionRecord(
            question_id=q.question_id,
            prompt_id=q.prompt_id,
            metric=q.metric,
            text=shuffle_text(q.text, seed),
            qtype=q.qtype,
            choices=q.choices,
            gold=q.gold,
            depends_on=q.depends_on,
            extra=dict(q.extra),
        )
        for q in questions
    ]


# ---------------------------------------------------------------------------
# Ablation 3: retrieval-style QA through similarity records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RetrievalCaptionSet:
    """One caption per answer choice, in choice order."""

    question_id: str
    prompt_id: str
    captions: tuple[tuple[str, str], ...]  # (choice, caption)
    correct_index: int


def caption_variant(question_id: str, index: int) -> str:
    """The caption_variant key a similarity record must carry for caption ``index``."""
    return f"{question_id}::{index}"


def build_retrieval_captions(question: QuestionRecord) -> RetrievalCaptionSet:
    """Form one "{question}? {choice}" caption per choice.

    A single trailing "?" is stripped from the question first so the caption
    never reads "??".
    """
    if len(question.choices) < 2:
        raise DataError(
            f"question {question.question_id!r} needs at least 2 choices to build captions"
        )
    stem = question.text
    if stem.endswith("?"):
        stem = stem[:-1]
    captions = tuple((choice, f"{stem}? {choice}") for choice in question.choices)
    return RetrievalCaptionSet(
        question_id=question.question_id,
        prompt_id=question.prompt_id,
        captions=captions,
        correct_index=question.choices.index(question.gold),
    )


def retrieval_caption_records(questions: list[QuestionRecord]) -> list[dict]:
    """Flat per-caption records for the emitted retrieval-caption file."""
    records = []
    for q in questions:
        cs = build_retrieval_captions(q)
        for i, (choice, caption) in enumerate(cs.captions):
            records.append(
                {
                    "question_id": q.question_id,
                    "prompt_id": q.prompt_id,
                    "caption_variant": caption_variant(q.question_id, i),
                    "choice_index": i,
                    "choice": choice,
                    "caption": caption,
                    "is_gold": i == cs.correct_index,
                }
            )
    return records


def score_retrieval_qa(
    questions: list[QuestionRecord],
    similarities: list[SimilarityRecord],
    source: str,
) -> list[MetricScore]:
    """Score questions by strict argmax over their captions' similarities.

    A question is correct iff the unique highest-scoring caption is the gold
    one; ties are scored incorrect. Aggregation per (prompt, metric) group
    follows the group's rule (flat, or dependency-gated for dsg).
    """
    sims: dict[tuple[str, str, str], float] = {}
    for s in similarities:
        sims[(s.prompt_id, s.source, s.caption_variant)] = s.score

    verdicts: dict[str, bool] = {}
    missing: list[tuple[str, str]] = []
    for q in questions:
        cs = build_retrieval_captions(q)
        scores = []
        for i, (_, caption) in enumerate(cs.captions):
            key = (q.prompt_id, source, caption_variant(q.question_id, i))
            if key not in sims:
                missing.append((q.question_id, caption))
                continue
            scores.append(sims[key])
        if missing:
            continue
        top = max(scores)
        winners = [i for i, v in enumerate(scores) if v == top]
        verdicts[q.question_id] = winners == [cs.correct_index]
    if missing:
        listed = "; ".join(f"({qid!r}, {caption!r})" for qid, caption in missing[:10])
        raise DataError(f"missing similarity records for source {source!r}: {listed}")

    groups: dict[tuple[str, str], list[QuestionRecord]] = {}
    for q in questions:
        groups.setdefault((q.prompt_id, q.metric), []).append(q)
    out: list[MetricScore] = []
    for (pid, metric) in sorted(groups):
        group = groups[(pid, metric)]
        raw = {q.question_id: verdicts[q.question_id] for q in group}
        if metric == "dsg":
            raw = gate_by_dependencies(group, raw)
        value = sum(raw.values()) / len(raw)
        out.append(MetricScore(pid, source, metric, value, len(group)))
    return out


# ---------------------------------------------------------------------------
# Ablation 4: text-only QA formatting
# ---------------------------------------------------------------------------


def format_text_only_qa(question: QuestionRecord) -> str:
    """The prompt handed to a text-only QA model in place of the VQA model."""
    choices = ", ".join(question.choices)
    return f"Question: {question.text} Choices: {choices} Answer:"


def text_only_qa_records(questions: list[QuestionRecord]) -> list[dict]:
    return [
        {
            "question_id": q.question_id,
            "prompt_id": q.prompt_id,
            "prompt": format_text_only_qa(q),
            "choices": list(q.choices),
        }
        for q in questions
    ]

"""Canonical data model and ingestion for all record files.

All record files are line-delimited JSON (one object per line). Unknown keys
are preserved on round-trip but otherwise ignored. An optional first line of
the form ``{"__ablation__": {...}}`` is treated as a provenance header (written
by the ablation transforms) and skipped by every loader.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DataError
from .textprops import parse_bracketed, tokenize

QUESTION_METRICS = ("tifa", "vpeval", "dsg")
SCORE_METRICS = ("clipscore", "tifa", "vpeval", "dsg")
QTYPES = ("yes_no", "multiple_choice")

PROVENANCE_KEY = "__ablation__"

FULL_PROMPT_VARIANT = "full_prompt"


@dataclass(frozen=True)
class PromptRecord:
    id: str
    dataset: str
    text: str
    parse: str | None = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        obj = {"id": self.id, "dataset": self.dataset, "text": self.text}
        if self.parse is not None:
            obj["parse"] = self.parse
        obj.update(self.extra)
        return obj


@dataclass(frozen=True)
class ImageRef:
    prompt_id: str
    source: str
    image_key: str
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        obj = {
            "prompt_id": self.prompt_id,
            "source": self.source,
            "image_key": self.image_key,
        }
        obj.update(self.extra)
        return obj


@dataclass(frozen=True)
class QuestionRecord:
    question_id: str
    prompt_id: str
    metric: str
    text: str
    qtype: str
    choices: tuple[str, ...]
    gold: str
    depends_on: tuple[str, ...] = ()
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        obj = {
            "question_id": self.question_id,
            "prompt_id": self.prompt_id,
            "metric": self.metric,
            "text": self.text,
            "qtype": self.qtype,
            "choices": list(self.choices),
            "gold": self.gold,
        }
        if self.depends_on:
            obj["depends_on"] = list(self.depends_on)
        obj.update(self.extra)
        return obj


@dataclass(frozen=True)
class AnswerRecord:
    question_id: str
    source: str
    predicted: str
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        obj = {
            "question_id": self.question_id,
            "source": self.source,
            "predicted": self.predicted,
        }
        obj.update(self.extra)
        return obj


@dataclass(frozen=True)
class SimilarityRecord:
    prompt_id: str
    source: str
    caption_variant: str
    score: float
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        obj = {
            "prompt_id": self.prompt_id,
            "source": self.source,
            "caption_variant": self.caption_variant,
            "score": self.score,
        }
        obj.update(self.extra)
        return obj


@dataclass(frozen=True)
class Lexicon:
    """word -> rating mapping with a cached minimum, used for the
    assign-missing-words-the-lowest-score policy. Lookups are lowercased."""

    entries: tuple[tuple[str, float], ...]
    min_rating: float

    def as_dict(self) -> dict[str, float]:
        return dict(self.entries)

    def get(self, word: str) -> float | None:
        return self.as_dict().get(word.lower())

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.as_dict()

    def max_rating(self) -> float:
        return max(v for _, v in self.entries)


@dataclass(frozen=True)
class ClassList:
    """Object-class labels plus the lowercased single tokens they split into
    (on spaces and underscores), minus stopwords."""

    labels: frozenset[str]
    label_tokens: frozenset[str]


# ---------------------------------------------------------------------------
# Readers
# ---------------------------------------------------------------------------


def read_jsonl(path):
    """Yield (line_number, object) for each JSON line; skips a provenance header."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            try:
                obj = json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise DataError(f"malformed JSON: {exc.msg}", path=str(path), line=lineno)
            if not isinstance(obj, dict):
                raise DataError("record is not an object", path=str(path), line=lineno)
            if lineno == 1 and PROVENANCE_KEY in obj:
                continue
            yield lineno, obj


def read_provenance(path) -> dict | None:
    """Return the provenance header of an ablated record file, if any."""
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().strip()
    if not first:
        return None
    try:
        obj = json.loads(first)
    except json.JSONDecodeError:
        return None
    if isinstance(obj, dict) and PROVENANCE_KEY in obj:
        return obj[PROVENANCE_KEY]
    return None


def _require(obj: dict, keys: tuple[str, ...], path: str, lineno: int) -> None:
    missing = [k for k in keys if k not in obj]
    if missing:
        raise DataError(f"missing required keys: {', '.join(missing)}", path=path, line=lineno)


def _extras(obj: dict, known: tuple[str, ...]) -> dict:
    return {k: v for k, v in sorted(obj.items()) if k not in known}


def load_prompts(path) -> list[PromptRecord]:
    """Load and validate a prompts file.

    Rejects duplicate ids, empty prompt text, and unbalanced or leafless
    bracketed parses; errors carry the offending line or prompt id.
    """
    path = str(path)
    records: list[PromptRecord] = []
    seen: set[str] = set()
    for lineno, obj in read_jsonl(path):
        _require(obj, ("id", "dataset", "text"), path, lineno)
        pid = obj["id"]
        if not isinstance(pid, str) or not pid:
            raise DataError("prompt id must be a non-empty string", path=path, line=lineno)
        if pid in seen:
            raise DataError(f"duplicate prompt id {pid!r}", path=path, line=lineno)
        seen.add(pid)
        text = obj["text"]
        if not isinstance(text, str) or not text:
            raise DataError(f"prompt {pid!r} has empty text", path=path, line=lineno)
        parse = obj.get("parse")
        if parse is not None:
            try:
                tree = parse_bracketed(parse)
            except DataError as exc:
                raise DataError(f"prompt {pid!r} has an invalid parse: {exc}", path=path, line=lineno)
            leaf_text = " ".join(tree.leaves())
            if len(tokenize(leaf_text)) < 1:
                raise DataError(f"prompt {pid!r} parse has no tokens", path=path, line=lineno)
        records.append(
            PromptRecord(
                id=pid,
                dataset=str(obj["dataset"]),
                text=text,
                parse=parse,
                extra=_extras(obj, ("id", "dataset", "text", "parse")),
            )
        )
    return records


def load_images(path, prompts: list[PromptRecord]) -> list[ImageRef]:
    """Load image references; (prompt_id, source) pairs must be unique and resolve."""
    path = str(path)
    prompt_ids = {p.id for p in prompts}
    records: list[ImageRef] = []
    seen: set[tuple[str, str]] = set()
    for lineno, obj in read_jsonl(path):
        _require(obj, ("prompt_id", "source", "image_key"), path, lineno)
        key = (obj["prompt_id"], obj["source"])
        if key in seen:
            raise DataError(f"duplicate image for (prompt {key[0]!r}, source {key[1]!r})", path=path, line=lineno)
        seen.add(key)
        if obj["prompt_id"] not in prompt_ids:
            raise DataError(f"image references unknown prompt id {obj['prompt_id']!r}", path=path, line=lineno)
        records.append(
            ImageRef(
                prompt_id=obj["prompt_id"],
                source=obj["source"],
                image_key=str(obj["image_key"]),
                extra=_extras(obj, ("prompt_id", "source", "image_key")),
            )
        )
    return records


def _find_cycle(nodes: list[str], edges: dict[str, tuple[str, ...]]) -> list[str] | None:
    """Return one dependency cycle as a list of ids, or None if acyclic."""
    WHITE, GREY, BLACK = 0, 1, 2
    color = {n: WHITE for n in nodes}
    parent: dict[str, str] = {}

    def dfs(start: str) -> list[str] | None:
        stack = [(start, iter(edges.get(start, ())))]
        color[start] = GREY
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if nxt not in color:
                    continue
                if color[nxt] == GREY:
                    cycle = [nxt, node]
                    cur = node
                    while cur != nxt:
                        cur = parent[cur]
                        cycle.append(cur)
                    cycle.reverse()
                    return cycle
                if color[nxt] == WHITE:
                    parent[nxt] = node
                    color[nxt] = GREY
                    stack.append((nxt, iter(edges.get(nxt, ()))))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()
        return None

    for n in nodes:
        if color[n] == WHITE:
            found = dfs(n)
            if found:
                return found
    return None


def load_questions(path, prompts: list[PromptRecord]) -> list[QuestionRecord]:
    """Load questions; enforces gold membership, yes/no choice shape,
    dependency resolution and acyclicity per (prompt, metric) group."""
    path = str(path)
    prompt_ids = {p.id for p in prompts}
    records: list[QuestionRecord] = []
    seen: set[str] = set()
    for lineno, obj in read_jsonl(path):
        _require(obj, ("question_id", "prompt_id", "metric", "text", "qtype", "choices", "gold"), path, lineno)
        qid = obj["question_id"]
        if qid in seen:
            raise DataError(f"duplicate question id {qid!r}", path=path, line=lineno)
        seen.add(qid)
        if obj["prompt_id"] not in prompt_ids:
            raise DataError(f"question {qid!r} references unknown prompt id {obj['prompt_id']!r}", path=path, line=lineno)
        metric = obj["metric"]
        if metric not in QUESTION_METRICS:
            raise DataError(f"question {qid!r} has unknown metric {metric!r}", path=path, line=lineno)
        qtype = obj["qtype"]
        if qtype not in QTYPES:
            raise DataError(f"question {qid!r} has unknown qtype {qtype!r}", path=path, line=lineno)
        choices = tuple(obj["choices"])
        gold = obj["gold"]
        if gold not in choices:
            raise DataError(f"question {qid!r} gold {gold!r} is not among its choices", path=path, line=lineno)
        if qtype == "yes_no" and choices != ("yes", "no"):
            raise DataError(f"yes/no question {qid!r} must have choices ['yes', 'no']", path=path, line=lineno)
        depends_on = tuple(obj.get("depends_on") or ())
        if depends_on and metric != "dsg":
            raise DataError(f"question {qid!r} has dependencies but metric {metric!r} does not gate", path=path, line=lineno)
        records.append(
            QuestionRecord(
                question_id=qid,
                prompt_id=obj["prompt_id"],
                metric=metric,
                text=str(obj["text"]),
                qtype=qtype,
                choices=choices,
                gold=gold,
                depends_on=depends_on,
                extra=_extras(obj, ("question_id", "prompt_id", "metric", "text", "qtype", "choices", "gold", "depends_on")),
            )
        )

    groups: dict[tuple[str, str], list[QuestionRecord]] = {}
    for rec in records:
        groups.setdefault((rec.prompt_id, rec.metric), []).append(rec)
    for (pid, metric), group in groups.items():
        ids = {q.question_id for q in group}
        for q in group:
            for dep in q.depends_on:
                if dep not in ids:
                    raise DataError(
                        f"question {q.question_id!r} depends on {dep!r}, which is not in "
                        f"the same (prompt {pid!r}, metric {metric!r}) group",
                        path=path,
                    )
        cycle = _find_cycle(
            [q.question_id for q in group], {q.question_id: q.depends_on for q in group}
        )
        if cycle:
            raise DataError(
                f"dependency cycle in (prompt {pid!r}, metric {metric!r}): " + " -> ".join(cycle),
                path=path,
            )
    return records


def load_answers(path, questions: list[QuestionRecord]) -> list[AnswerRecord]:
    """Load predicted answers; one record per (question_id, source)."""
    path = str(path)
    question_ids = {q.question_id for q in questions}
    records: list[AnswerRecord] = []
    seen: set[tuple[str, str]] = set()
    for lineno, obj in read_jsonl(path):
        _require(obj, ("question_id", "source", "predicted"), path, lineno)
        qid = obj["question_id"]
        if qid not in question_ids:
            raise DataError(f"answer references unknown question id {qid!r}", path=path, line=lineno)
        key = (qid, obj["source"])
        if key in seen:
            raise DataError(f"duplicate answer for (question {qid!r}, source {obj['source']!r})", path=path, line=lineno)
        seen.add(key)
        records.append(
            AnswerRecord(
                question_id=qid,
                source=obj["source"],
                predicted=str(obj["predicted"]),
                extra=_extras(obj, ("question_id", "source", "predicted")),
            )
        )
    return records


def load_similarities(path, prompts: list[PromptRecord]) -> list[SimilarityRecord]:
    """Load cosine-similarity records; scores must be finite and in [-1, 1]."""
    path = str(path)
    prompt_ids = {p.id for p in prompts}
    records: list[SimilarityRecord] = []
    seen: set[tuple[str, str, str]] = set()
    for lineno, obj in read_jsonl(path):
        _require(obj, ("prompt_id", "source", "caption_variant", "score"), path, lineno)
        pid = obj["prompt_id"]
        if pid not in prompt_ids:
            raise DataError(f"similarity references unknown prompt id {pid!r}", path=path, line=lineno)
        score = obj["score"]
        if not isinstance(score, (int, float)) or not math.isfinite(score):
            raise DataError(f"similarity score must be finite, got {score!r}", path=path, line=lineno)
        if not -1.0 <= score <= 1.0:
            raise DataError(f"similarity score {score!r} outside [-1, 1]", path=path, line=lineno)
        key = (pid, obj["source"], obj["caption_variant"])
        if key in seen:
            raise DataError(f"duplicate similarity record for {key!r}", path=path, line=lineno)
        seen.add(key)
        records.append(
            SimilarityRecord(
                prompt_id=pid,
                source=obj["source"],
                caption_variant=obj["caption_variant"],
                score=float(score),
                extra=_extras(obj, ("prompt_id", "source", "caption_variant", "score")),
            )
        )
    return records


def load_lexicon(path) -> Lexicon:
    """Load a ``word<TAB>rating`` lexicon; keys are lowercased, duplicates rejected."""
    path = str(path)
    entries: dict[str, float] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DataError("expected exactly one tab separator", path=path, line=lineno)
            word = parts[0].strip().lower()
            try:
                rating = float(parts[1])
            except ValueError:
                raise DataError(f"non-numeric rating {parts[1]!r}", path=path, line=lineno)
            if word in entries:
                raise DataError(f"duplicate lexicon entry {word!r}", path=path, line=lineno)
            entries[word] = rating
    if not entries:
        raise DataError("lexicon file is empty", path=path)
    return Lexicon(entries=tuple(entries.items()), min_rating=min(entries.values()))


def split_label(label: str) -> list[str]:
    """Lowercased tokens of a class label, split on spaces and underscores."""
    return [t for t in label.replace("_", " ").lower().split() if t]


def load_classlist(path, stopwords: frozenset[str] | None = None) -> ClassList:
    """Load a one-label-per-line class list and derive its token set."""
    from .textprops import default_stopwords

    if stopwords is None:
        stopwords = default_stopwords()
    path = str(path)
    labels: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            label = line.strip()
            if label:
                labels.add(label)
    if not labels:
        raise DataError("class list file is empty", path=path)
    tokens = {t for label in labels for t in split_label(label) if t not in stopwords}
    return ClassList(labels=frozenset(labels), label_tokens=frozenset(tokens))


# ---------------------------------------------------------------------------
# Writers
# ---------------------------------------------------------------------------


def save_records(path, records, provenance: dict | None = None) -> None:
    """Write records as JSON lines (optionally prefixed by a provenance header)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if provenance is not None:
            fh.write(json.dumps({PROVENANCE_KEY: provenance}, sort_keys=True) + "\n")
        for rec in records:
            obj = rec.to_json() if hasattr(rec, "to_json") else rec
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# Corpus bundle
# ---------------------------------------------------------------------------


@dataclass
class Corpus:
    """An immutable, fully cross-referenced record set; safe to share across threads."""

    prompts: list[PromptRecord]
    images: list[ImageRef] = field(default_factory=list)
    questions: list[QuestionRecord] = field(default_factory=list)
    answers: list[AnswerRecord] = field(default_factory=list)
    similarities: list[SimilarityRecord] = field(default_factory=list)

    def __post_init__(self):
        self.prompts_by_id = {p.id: p for p in self.prompts}
        self.questions_by_id = {q.question_id: q for q in self.questions}
        self.answers_by_key = {(a.question_id, a.source): a for a in self.answers}

    def datasets(self) -> list[str]:
        return sorted({p.dataset for p in self.prompts})

    def sources(self) -> list[str]:
        named = {a.source for a in self.answers} | {s.source for s in self.similarities}
        named |= {i.source for i in self.images}
        return sorted(named)

    def answer_sources(self) -> list[str]:
        return sorted({a.source for a in self.answers})

    def question_group(self, prompt_id: str, metric: str) -> list[QuestionRecord]:
        return [q for q in self.questions if q.prompt_id == prompt_id and q.metric == metric]

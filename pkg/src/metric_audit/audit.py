"""Answer-distribution shortcut audit: question statistics, the score vs.
question-count correlation, shortcut flags, and the desiderata rubric."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import StatError
from .metrics import majority_baseline, random_chance
from .seeding import derive_seed
from .stats import DEFAULT_ALPHA, DEFAULT_TAU, ProfileCell, spearman

DEFAULT_YES_BIAS_PCT = 90.0
DEFAULT_FIRST_ANSWER_PCT = 90.0
DEFAULT_QC_RHO = 0.4

RUBRIC_VALUES = ("yes", "no", "mixed", "n/a")

# Static design facts about each metric (interpretability, external models);
# the three judgement columns are computed from the audited corpus.
METRIC_DESIGN = {
    "clipscore": {"human_interpretable": "no", "external_models": "joint image-text encoder"},
    "tifa": {"human_interpretable": "yes", "external_models": "LM, VQA"},
    "vpeval": {"human_interpretable": "yes", "external_models": "LM, VQA, detector, OCR"},
    "dsg": {"human_interpretable": "yes", "external_models": "LM, VQA"},
}


@dataclass(frozen=True)
class QuestionStats:
    """Distribution statistics for one (metric, dataset) question group.

    Percentages are on a 0-100 scale; conditional percentages are None when
    the conditioning subset is empty (rendered as N/A).
    """

    metric: str
    dataset: str
    total: int
    pct_yes_no: float
    pct_gold_yes_given_yn: float | None
    pct_gold_no_given_yn: float | None
    pct_multiple_choice: float
    pct_gold_first_given_mc: float | None

    def to_json(self) -> dict:
        return {
            "metric": self.metric,
            "dataset": self.dataset,
            "total": self.total,
            "pct_yes_no": self.pct_yes_no,
            "pct_gold_yes_given_yn": self.pct_gold_yes_given_yn,
            "pct_gold_no_given_yn": self.pct_gold_no_given_yn,
            "pct_multiple_choice": self.pct_multiple_choice,
            "pct_gold_first_given_mc": self.pct_gold_first_given_mc,
        }


def question_stats(questions, metric: str, dataset: str) -> QuestionStats:
    """Exact distribution percentages over one question group."""
    if not questions:
        raise StatError(f"no questions for (metric {metric!r}, dataset {dataset!r})")
    total = len(questions)
    yn = [q for q in questions if q.qtype == "yes_no"]
    mc = [q for q in questions if q.qtype == "multiple_choice"]
    pct_yn = 100.0 * len(yn) / total
    pct_mc = 100.0 * len(mc) / total
    if yn:
        gold_yes = sum(1 for q in yn if q.gold == "yes")
        gold_no = sum(1 for q in yn if q.gold == "no")
        pct_yes = 100.0 * gold_yes / len(yn)
        pct_no = 100.0 * gold_no / len(yn)
    else:
        pct_yes = pct_no = None
    if mc:
        first = sum(1 for q in mc if q.gold == q.choices[0])
        pct_first = 100.0 * first / len(mc)
    else:
        pct_first = None
    return QuestionStats(
        metric=metric,
        dataset=dataset,
        total=total,
        pct_yes_no=pct_yn,
        pct_gold_yes_given_yn=pct_yes,
        pct_gold_no_given_yn=pct_no,
        pct_multiple_choice=pct_mc,
        pct_gold_first_given_mc=pct_first,
    )


def grouped_question_stats(questions, prompts_by_id) -> list[QuestionStats]:
    """QuestionStats per (metric, dataset), deterministically ordered."""
    groups: dict[tuple[str, str], list] = {}
    for q in questions:
        dataset = prompts_by_id[q.prompt_id].dataset
        groups.setdefault((q.metric, dataset), []).append(q)
    return [question_stats(groups[key], *key) for key in sorted(groups)]


def question_count_correlation(
    scores,
    alpha: float = DEFAULT_ALPHA,
    tau: float = DEFAULT_TAU,
) -> list[ProfileCell]:
    """Spearman between per-prompt question counts and scores, one cell per
    (source, metric). The similarity metric carries no questions and is skipped."""
    groups: dict[tuple[str, str], list] = {}
    for s in scores:
        if s.metric == "clipscore":
            continue
        groups.setdefault((s.source, s.metric), []).append(s)
    cells: list[ProfileCell] = []
    for (source, metric), group in sorted(groups.items()):
        group = sorted(group, key=lambda r: r.prompt_id)
        xs = [float(s.n_questions) for s in group]
        ys = [float(s.value) for s in group]
        if len(xs) < 3:
            cells.append(ProfileCell(source, metric, "n_questions", len(xs), 0, None, "insufficient-n"))
            continue
        try:
            result = spearman(xs, ys, alpha=alpha, tau=tau)
        except StatError as exc:
            cells.append(ProfileCell(source, metric, "n_questions", len(xs), 0, None, str(exc)))
            continue
        cells.append(ProfileCell(source, metric, "n_questions", len(xs), 0, result))
    return cells


def corpus_baselines(corpus, trials: int, seed: int) -> dict[tuple[str, str], dict]:
    """Majority-class and random-chance baselines per (metric, dataset),
    averaged over prompts exactly like the real metric scores are."""
    groups: dict[tuple[str, str], dict[str, list]] = {}
    for q in corpus.questions:
        dataset = corpus.prompts_by_id[q.prompt_id].dataset
        groups.setdefault((q.metric, dataset), {}).setdefault(q.prompt_id, []).append(q)
    out: dict[tuple[str, str], dict] = {}
    for (metric, dataset) in sorted(groups):
        per_prompt = groups[(metric, dataset)]
        majority_values = []
        chance_values = []
        for pid in sorted(per_prompt):
            qgroup = per_prompt[pid]
            majority_values.append(majority_baseline(qgroup))
            chance_values.append(
                random_chance(qgroup, trials, derive_seed(seed, "random_chance", metric, pid))
            )
        out[(metric, dataset)] = {
            "majority": sum(majority_values) / len(majority_values),
            "random_chance": sum(chance_values) / len(chance_values),
            "n_prompts": len(majority_values),
        }
    return out


@dataclass(frozen=True)
class ShortcutThresholds:
    yes_bias_pct: float = DEFAULT_YES_BIAS_PCT
    first_answer_pct: float = DEFAULT_FIRST_ANSWER_PCT
    question_count_rho: float = DEFAULT_QC_RHO

    def to_json(self) -> dict:
        return {
            "yes_bias_pct": self.yes_bias_pct,
            "first_answer_pct": self.first_answer_pct,
            "question_count_rho": self.question_count_rho,
        }


@dataclass(frozen=True)
class MetricShortcuts:
    """Shortcut flags for one (metric, dataset) with their supporting numbers."""

    metric: str
    dataset: str
    yes_bias: bool
    first_answer_bias: bool
    question_count_dependence: bool
    supporting: dict
    thresholds: ShortcutThresholds

    def to_json(self) -> dict:
        return {
            "metric": self.metric,
            "dataset": self.dataset,
            "flags": {
                "yes_bias": self.yes_bias,
                "first_answer_bias": self.first_answer_bias,
                "question_count_dependence": self.question_count_dependence,
            },
            "supporting": self.supporting,
            "thresholds": self.thresholds.to_json(),
        }


def shortcut_flags(
    stats: QuestionStats,
    baselines: dict | None,
    qc_cells: list[ProfileCell],
    thresholds: ShortcutThresholds = ShortcutThresholds(),
) -> MetricShortcuts:
    """Flag shortcut opportunities for one (metric, dataset) group.

    The percentage flags use strict inequality (a value exactly at the
    threshold does not flag); the question-count flag requires a significant
    |rho| at or above its threshold for at least one image source.
    """
    yes_bias = (
        stats.pct_gold_yes_given_yn is not None
        and stats.pct_gold_yes_given_yn > thresholds.yes_bias_pct
    )
    first_bias = (
        stats.pct_gold_first_given_mc is not None
        and stats.pct_gold_first_given_mc > thresholds.first_answer_pct
    )
    qc_hits = []
    strongest = None
    for cell in qc_cells:
        if cell.metric != stats.metric or cell.result is None:
            continue
        res = cell.result
        if strongest is None or abs(res.rho) > abs(strongest[1].rho):
            strongest = (cell.source, res)
        if res.significant and abs(res.rho) >= thresholds.question_count_rho:
            qc_hits.append(cell.source)
    supporting = {
        "pct_gold_yes_given_yn": stats.pct_gold_yes_given_yn,
        "pct_gold_first_given_mc": stats.pct_gold_first_given_mc,
        "majority_baseline": baselines.get("majority") if baselines else None,
        "random_chance": baselines.get("random_chance") if baselines else None,
        "question_count_rho": strongest[1].rho if strongest else None,
        "question_count_p": strongest[1].p_value if strongest else None,
        "question_count_source": strongest[0] if strongest else None,
        "question_count_flagged_sources": sorted(qc_hits),
    }
    return MetricShortcuts(
        metric=stats.metric,
        dataset=stats.dataset,
        yes_bias=yes_bias,
        first_answer_bias=first_bias,
        question_count_dependence=bool(qc_hits),
        supporting=supporting,
        thresholds=thresholds,
    )


# ---------------------------------------------------------------------------
# Desiderata rubric
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RubricRow:
    metric: str
    sensitive_to_text: str
    sensitive_to_image: str
    robust_to_shortcuts: str
    evidence: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "metric": self.metric,
            "human_interpretable": METRIC_DESIGN.get(self.metric, {}).get("human_interpretable"),
            "external_models": METRIC_DESIGN.get(self.metric, {}).get("external_models"),
            "sensitive_to_text": self.sensitive_to_text,
            "sensitive_to_image": self.sensitive_to_image,
            "robust_to_shortcuts": self.robust_to_shortcuts,
            "evidence": self.evidence,
        }


def _axis_label(cells: list[ProfileCell], tau: float) -> str:
    """Judge one sensitivity axis from its correlation cells.

    Heuristic (documented in every report): "no" when nothing is significant,
    "mixed" when significant cells disagree in sign within a property or when
    significance is sparse/weak, "yes" when at least half the cells are
    significant with consistent signs and at least one is moderate-to-strong.
    """
    evaluable = [c for c in cells if c.result is not None]
    if not evaluable:
        return "no"
    significant = [c for c in evaluable if c.result.significant]
    if not significant:
        return "no"
    by_property: dict[str, set[int]] = {}
    for c in significant:
        sign = 1 if c.result.rho > 0 else -1
        by_property.setdefault(c.property_name, set()).add(sign)
    if any(len(signs) > 1 for signs in by_property.values()):
        return "mixed"
    strong = any(abs(c.result.rho) >= tau for c in significant)
    if strong and len(significant) * 2 >= len(evaluable):
        return "yes"
    return "mixed"


def _axis_evidence(cells: list[ProfileCell]) -> dict:
    picks = {}
    for c in cells:
        if c.result is None:
            continue
        best = picks.get(c.property_name)
        if best is None or abs(c.result.rho) > abs(best.result.rho):
            picks[c.property_name] = c
    return {
        name: f"rho={cell.result.rho:+.2f}{'*' if cell.result.significant else ''} "
        f"(source {cell.source}, n={cell.result.n})"
        for name, cell in sorted(picks.items())
    }


def derive_rubric(
    metric: str,
    linguistic_cells: list[ProfileCell],
    visual_cells: list[ProfileCell],
    flags: list[MetricShortcuts],
    tau: float = DEFAULT_TAU,
) -> RubricRow:
    """One desiderata rubric row for a metric, with evidence pointers."""
    ling = [c for c in linguistic_cells if c.metric == metric]
    vis = [c for c in visual_cells if c.metric == metric]
    own_flags = [f for f in flags if f.metric == metric]
    if metric == "clipscore":
        robust = "n/a"
    elif any(
        f.yes_bias or f.first_answer_bias or f.question_count_dependence for f in own_flags
    ):
        robust = "no"
    elif own_flags:
        robust = "yes"
    else:
        robust = "n/a"
    evidence = {
        "text": _axis_evidence(ling),
        "image": _axis_evidence(vis),
        "shortcuts": {
            f"{f.dataset}": {
                "yes_bias": f.yes_bias,
                "first_answer_bias": f.first_answer_bias,
                "question_count_dependence": f.question_count_dependence,
            }
            for f in own_flags
        },
    }
    return RubricRow(
        metric=metric,
        sensitive_to_text=_axis_label(ling, tau),
        sensitive_to_image=_axis_label(vis, tau),
        robust_to_shortcuts=robust,
        evidence=evidence,
    )

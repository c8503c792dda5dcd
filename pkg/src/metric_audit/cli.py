"""Command-line pipeline over a config-declared corpus.

Subcommands: validate, props, score, correlate, matrix, ablate <kind>,
audit, report, all. Configuration comes from a JSON file (--config) with
flag overrides; relative paths inside the config resolve against the config
file's directory. Exit codes: 0 ok, 2 config error, 3 data error,
4 statistical precondition error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .ablate import (
    ABLATION_KINDS,
    AblationPlan,
    retrieval_caption_records,
    score_retrieval_qa,
    shuffle_images,
    shuffle_prompt_records,
    shuffle_question_records,
    text_only_qa_records,
)
from .audit import (
    ShortcutThresholds,
    corpus_baselines,
    derive_rubric,
    grouped_question_stats,
    question_count_correlation,
    shortcut_flags,
)
from .corpus import (
    Corpus,
    load_answers,
    load_classlist,
    load_images,
    load_lexicon,
    load_prompts,
    load_questions,
    load_similarities,
    save_records,
)
from .errors import ConfigError, DataError, MetricAuditError, StatError
from .metrics import majority_baseline, random_chance, score_corpus
from .report import (
    ReportBundle,
    question_stats_markdown,
    render_bars,
    render_baselines,
    render_correlation_table,
    render_heatmap,
    render_question_stats,
    render_rubric,
    render_shortcut_flags,
    write_bundle,
)
from .seeding import derive_seed
from .stats import DEFAULT_ALPHA, DEFAULT_TAU, correlate_profiles, metric_matrix
from .textprops import (
    default_stopwords,
    flesch_kincaid_grade,
    load_stopwords,
    parse_bracketed,
    prompt_length,
    yngve_score,
)
from .visprops import MISSING_POLICIES, class_overlap, lexical_mean

SEED_ENV_VAR = "METRIC_AUDIT_SEED"

PATH_KEYS = (
    "prompts", "images", "questions", "answers", "similarities",
    "concreteness", "imageability", "classes", "stopwords",
)

LINGUISTIC_PROPERTIES = ("grade_level", "yngve", "length")
VISUAL_PROPERTIES = ("concreteness", "imageability", "class_overlap")


@dataclass
class RunConfig:
    paths: dict = field(default_factory=dict)
    seed: int | None = None
    alpha: float = DEFAULT_ALPHA
    tau: float = DEFAULT_TAU
    thresholds: ShortcutThresholds = field(default_factory=ShortcutThresholds)
    missing_policy: str = "lowest"
    yngve_aggregate: str = "mean"
    trials: int = 100_000
    exact_p: bool = False
    derangement: bool = False
    out: str = "out"
    ablated: dict = field(default_factory=dict)

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        base = Path(path).parent
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except FileNotFoundError:
            raise ConfigError([f"config file not found: {path}"])
        except json.JSONDecodeError as exc:
            raise ConfigError([f"config file is not valid JSON: {exc}"])
        cfg = cls()
        paths = raw.get("paths", {})
        cfg.paths = {k: str(base / v) for k, v in paths.items() if v is not None}
        for key in ("seed", "alpha", "tau", "missing_policy", "yngve_aggregate",
                    "trials", "exact_p", "derangement", "out"):
            if key in raw:
                setattr(cfg, key, raw[key])
        if "out" in raw:
            cfg.out = str(base / raw["out"])
        if "thresholds" in raw:
            cfg.thresholds = ShortcutThresholds(
                yes_bias_pct=raw["thresholds"].get("yes_bias_pct", ShortcutThresholds.yes_bias_pct),
                first_answer_pct=raw["thresholds"].get("first_answer_pct", ShortcutThresholds.first_answer_pct),
                question_count_rho=raw["thresholds"].get("question_count_rho", ShortcutThresholds.question_count_rho),
            )
        for variant, entry in raw.get("ablated", {}).items():
            cfg.ablated[variant] = {k: str(base / v) for k, v in entry.items()}
        return cfg

    def apply_flags(self, args: argparse.Namespace) -> None:
        if getattr(args, "seed", None) is not None:
            self.seed = args.seed
        elif self.seed is None and os.environ.get(SEED_ENV_VAR):
            self.seed = int(os.environ[SEED_ENV_VAR])
        for flag in ("alpha", "tau", "missing_policy", "trials", "out"):
            value = getattr(args, flag, None)
            if value is not None:
                setattr(self, flag, value)
        if getattr(args, "exact_p", False):
            self.exact_p = True
        if getattr(args, "derangement", False):
            self.derangement = True

    def validate(self, required_paths: tuple[str, ...] = (), need_seed: bool = False) -> None:
        """Collect every configuration problem before failing."""
        problems: list[str] = []
        for key in required_paths:
            if key not in self.paths:
                problems.append(f"missing required path entry: {key}")
        for key, value in sorted(self.paths.items()):
            if key not in PATH_KEYS:
                problems.append(f"unknown path entry: {key}")
            elif not Path(value).exists():
                problems.append(f"{key} path does not exist: {value}")
        for variant, entry in sorted(self.ablated.items()):
            for k, v in sorted(entry.items()):
                if not Path(v).exists():
                    problems.append(f"ablated[{variant}].{k} path does not exist: {v}")
        if self.missing_policy not in MISSING_POLICIES:
            problems.append(f"missing_policy must be one of {MISSING_POLICIES}, got {self.missing_policy!r}")
        if self.yngve_aggregate not in ("mean", "max"):
            problems.append(f"yngve_aggregate must be 'mean' or 'max', got {self.yngve_aggregate!r}")
        if not 0 < self.alpha < 1:
            problems.append(f"alpha must be in (0, 1), got {self.alpha}")
        if not 0 <= self.tau <= 1:
            problems.append(f"tau must be in [0, 1], got {self.tau}")
        if self.trials < 1:
            problems.append(f"trials must be >= 1, got {self.trials}")
        if need_seed and self.seed is None:
            problems.append(
                f"a seed is required for stochastic subcommands (use --seed, the config, or ${SEED_ENV_VAR})"
            )
        if problems:
            raise ConfigError(problems)

    def stopword_set(self):
        if "stopwords" in self.paths:
            return load_stopwords(self.paths["stopwords"])
        return default_stopwords()


def load_corpus(config: RunConfig) -> Corpus:
    prompts = load_prompts(config.paths["prompts"])
    images = load_images(config.paths["images"], prompts) if "images" in config.paths else []
    questions = (
        load_questions(config.paths["questions"], prompts) if "questions" in config.paths else []
    )
    answers = (
        load_answers(config.paths["answers"], questions) if "answers" in config.paths else []
    )
    similarities = (
        load_similarities(config.paths["similarities"], prompts)
        if "similarities" in config.paths
        else []
    )
    return Corpus(prompts=prompts, images=images, questions=questions,
                  answers=answers, similarities=similarities)


# ---------------------------------------------------------------------------
# Profile computation shared by props / correlate / audit / report
# ---------------------------------------------------------------------------


def compute_profiles(config: RunConfig, corpus: Corpus) -> list[dict]:
    """Per-prompt property records (linguistic always; visual when lexicons
    and a class list are configured)."""
    stopwords = config.stopword_set()
    conc = load_lexicon(config.paths["concreteness"]) if "concreteness" in config.paths else None
    imag = load_lexicon(config.paths["imageability"]) if "imageability" in config.paths else None
    classes = load_classlist(config.paths["classes"], stopwords) if "classes" in config.paths else None
    profiles = []
    for prompt in sorted(corpus.prompts, key=lambda p: p.id):
        record: dict = {"prompt_id": prompt.id, "dataset": prompt.dataset}
        record["grade_level"] = flesch_kincaid_grade(prompt.text)
        record["length"] = prompt_length(prompt.text, stopwords)
        if prompt.parse is not None:
            record["yngve"] = yngve_score(parse_bracketed(prompt.parse), config.yngve_aggregate)
        else:
            record["yngve"] = None
        if conc is not None:
            record["concreteness"] = lexical_mean(prompt.text, conc, stopwords, config.missing_policy)
        if imag is not None:
            record["imageability"] = lexical_mean(prompt.text, imag, stopwords, config.missing_policy)
        if classes is not None:
            record["class_overlap"] = class_overlap(prompt.text, classes, stopwords)
        if conc is not None or imag is not None:
            record["missing_word_policy"] = config.missing_policy
        profiles.append(record)
    return profiles


def profile_mapping(profiles: list[dict], key: str) -> dict[str, float]:
    out = {}
    for rec in profiles:
        value = rec.get(key)
        if value is not None:
            out[rec["prompt_id"]] = float(value)
    return out


def compute_baseline_scores(config: RunConfig, corpus: Corpus) -> list:
    """Majority and random-chance rows in MetricScore form (synthetic sources)."""
    from .metrics import MetricScore

    groups: dict[tuple[str, str], list] = {}
    for q in corpus.questions:
        groups.setdefault((q.prompt_id, q.metric), []).append(q)
    rows = []
    for (pid, metric) in sorted(groups):
        qgroup = groups[(pid, metric)]
        rows.append(MetricScore(pid, "majority_baseline", metric,
                                majority_baseline(qgroup), len(qgroup)))
        rows.append(MetricScore(
            pid, "random_chance", metric,
            random_chance(qgroup, config.trials, derive_seed(config.seed, "random_chance", metric, pid)),
            len(qgroup),
        ))
    return rows


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_validate(config: RunConfig, args) -> int:
    config.validate(required_paths=("prompts",))
    problems: list[str] = []
    counts: dict[str, int] = {}
    prompts, questions = [], []
    try:
        prompts = load_prompts(config.paths["prompts"])
        counts["prompts"] = len(prompts)
    except DataError as exc:
        problems.append(str(exc))
    loaders = (
        ("images", lambda p: load_images(p, prompts)),
        ("questions", lambda p: load_questions(p, prompts)),
        ("similarities", lambda p: load_similarities(p, prompts)),
        ("concreteness", load_lexicon),
        ("imageability", load_lexicon),
        ("classes", load_classlist),
        ("stopwords", load_stopwords),
    )
    for key, loader in loaders:
        if key not in config.paths:
            continue
        try:
            loaded = loader(config.paths[key])
            if key == "questions":
                questions = loaded
            counts[key] = len(loaded) if hasattr(loaded, "__len__") else 1
        except DataError as exc:
            problems.append(str(exc))
    if "answers" in config.paths:
        try:
            counts["answers"] = len(load_answers(config.paths["answers"], questions))
        except DataError as exc:
            problems.append(str(exc))
    result = {"ok": not problems, "counts": counts, "problems": problems}
    print(json.dumps(result, sort_keys=True))
    return 0 if not problems else DataError("").exit_code


def cmd_props(config: RunConfig, args) -> int:
    config.validate(required_paths=("prompts",))
    corpus = load_corpus(config)
    profiles = compute_profiles(config, corpus)
    out = Path(config.out)
    save_records(out / "profiles.jsonl", profiles)
    print(f"wrote {len(profiles)} profiles to {out / 'profiles.jsonl'}")
    return 0


def cmd_score(config: RunConfig, args) -> int:
    need_seed = bool(getattr(args, "baselines", False))
    config.validate(required_paths=("prompts", "questions"), need_seed=need_seed)
    corpus = load_corpus(config)
    scores = score_corpus(corpus)
    if getattr(args, "baselines", False):
        scores = scores + compute_baseline_scores(config, corpus)
    out = Path(config.out)
    save_records(out / "scores.jsonl", scores)
    print(f"wrote {len(scores)} scores to {out / 'scores.jsonl'}")
    return 0


def _correlation_cells(config: RunConfig, scores, properties, profiles):
    cells = []
    for prop in properties:
        mapping = profile_mapping(profiles, prop)
        cells.extend(
            correlate_profiles(
                scores, mapping, prop,
                alpha=config.alpha, tau=config.tau,
                exact_p=config.exact_p, seed=config.seed,
            )
        )
    return cells


def cmd_correlate(config: RunConfig, args) -> int:
    required = ("prompts", "questions")
    config.validate(required_paths=required, need_seed=config.exact_p)
    corpus = load_corpus(config)
    profiles = compute_profiles(config, corpus)
    scores = score_corpus(corpus)
    out = Path(config.out)
    (out / "tables").mkdir(parents=True, exist_ok=True)
    ling = _correlation_cells(config, scores, LINGUISTIC_PROPERTIES, profiles)
    table = render_correlation_table(ling, "linguistic")
    (out / "tables" / "linguistic.csv").write_text(table.to_csv(), encoding="utf-8")
    written = ["tables/linguistic.csv"]
    if all(k in config.paths for k in ("concreteness", "imageability", "classes")):
        vis = _correlation_cells(config, scores, VISUAL_PROPERTIES, profiles)
        vtable = render_correlation_table(vis, "visual")
        (out / "tables" / "visual.csv").write_text(vtable.to_csv(), encoding="utf-8")
        written.append("tables/visual.csv")
    print(f"wrote {', '.join(written)} under {out}")
    return 0


def cmd_matrix(config: RunConfig, args) -> int:
    config.validate(required_paths=("prompts", "questions"))
    corpus = load_corpus(config)
    scores = score_corpus(corpus)
    out = Path(config.out)
    sources = sorted({s.source for s in scores})
    written = 0
    for source in sources:
        try:
            matrix = metric_matrix(scores, source, alpha=config.alpha, tau=config.tau)
        except StatError:
            continue  # source lacks two metrics; nothing to correlate
        payload = render_heatmap(matrix, source)
        (out / "matrices").mkdir(parents=True, exist_ok=True)
        (out / "matrices" / f"{source}.csv").write_text(payload.to_csv(), encoding="utf-8")
        (out / "matrices" / f"{source}.json").write_text(
            json.dumps(payload.to_json_payload(), sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
        written += 1
    print(f"wrote {written} metric matrices under {out / 'matrices'}")
    return 0


def cmd_ablate(config: RunConfig, args) -> int:
    kind = args.kind
    if kind not in ABLATION_KINDS:
        raise ConfigError([f"unknown ablation kind {kind!r}; choose from {ABLATION_KINDS}"])
    stochastic = kind in ("shuffle_images", "shuffle_text")
    required = ("prompts", "images") if kind == "shuffle_images" else ("prompts", "questions")
    config.validate(required_paths=required, need_seed=stochastic)
    corpus = load_corpus(config)
    plan = AblationPlan(
        kind=kind,
        seed=config.seed if config.seed is not None else 0,
        options={"derangement": config.derangement} if kind == "shuffle_images" else {},
    )
    out = Path(config.out) / "ablations" / kind
    provenance = plan.provenance()
    if kind == "shuffle_images":
        shuffled = shuffle_images(corpus.images, corpus.prompts_by_id, plan.seed, config.derangement)
        save_records(out / "images.jsonl", shuffled, provenance=provenance)
        print(f"wrote {len(shuffled)} reassigned images to {out / 'images.jsonl'}")
    elif kind == "shuffle_text":
        prompts = shuffle_prompt_records(corpus.prompts, plan.seed)
        questions = shuffle_question_records(corpus.questions, plan.seed)
        save_records(out / "prompts.jsonl", prompts, provenance=provenance)
        save_records(out / "questions.jsonl", questions, provenance=provenance)
        print(f"wrote shuffled prompts and questions to {out}")
    elif kind == "retrieval_qa":
        records = retrieval_caption_records(corpus.questions)
        save_records(out / "captions.jsonl", records, provenance=provenance)
        print(f"wrote {len(records)} retrieval captions to {out / 'captions.jsonl'}")
    else:  # text_only_qa
        records = text_only_qa_records(corpus.questions)
        save_records(out / "qa_prompts.jsonl", records, provenance=provenance)
        print(f"wrote {len(records)} text-only QA prompts to {out / 'qa_prompts.jsonl'}")
    return 0


def _retrieval_sources(corpus: Corpus) -> list[str]:
    """Similarity sources that cover every retrieval caption of every question."""
    from .ablate import build_retrieval_captions, caption_variant

    needed = set()
    for q in corpus.questions:
        cs = build_retrieval_captions(q)
        for i in range(len(cs.captions)):
            needed.add((q.prompt_id, caption_variant(q.question_id, i)))
    by_source: dict[str, set] = {}
    for s in corpus.similarities:
        by_source.setdefault(s.source, set()).add((s.prompt_id, s.caption_variant))
    return sorted(src for src, have in by_source.items() if needed and needed <= have)


def _ablated_scores(config: RunConfig, corpus: Corpus) -> list[tuple[str, str, float]]:
    """Bar series (metric, variant, mean score) for every computable variant."""
    from .metrics import MetricScore

    series: dict[tuple[str, str], list[float]] = {}

    def add(variant: str, scores: list[MetricScore]) -> None:
        for s in scores:
            if s.source in ("majority_baseline", "random_chance"):
                continue
            series.setdefault((s.metric, variant), []).append(s.value)

    add("original", score_corpus(corpus))
    for source in _retrieval_sources(corpus):
        add("retrieval_qa", score_retrieval_qa(corpus.questions, corpus.similarities, source))
    for variant, entry in sorted(config.ablated.items()):
        if "answers" in entry:
            answers = load_answers(entry["answers"], corpus.questions)
            ablated = Corpus(prompts=corpus.prompts, questions=corpus.questions, answers=answers)
            add(variant, score_corpus(ablated))
        if "similarities" in entry:
            sims = load_similarities(entry["similarities"], corpus.prompts)
            sub = Corpus(prompts=corpus.prompts, questions=corpus.questions, similarities=sims)
            for source in _retrieval_sources(sub):
                add(variant, score_retrieval_qa(corpus.questions, sims, source))
    return [
        (metric, variant, sum(vals) / len(vals))
        for (metric, variant), vals in sorted(series.items())
        if vals
    ]


def _audit_pieces(config: RunConfig, corpus: Corpus, profiles):
    scores = score_corpus(corpus)
    stats = grouped_question_stats(corpus.questions, corpus.prompts_by_id)
    baselines = corpus_baselines(corpus, config.trials, config.seed)
    qc_cells = question_count_correlation(scores, alpha=config.alpha, tau=config.tau)
    flags = []
    for st_row in stats:
        flags.append(
            shortcut_flags(
                st_row,
                baselines.get((st_row.metric, st_row.dataset)),
                qc_cells,
                config.thresholds,
            )
        )
    ling = _correlation_cells(config, scores, LINGUISTIC_PROPERTIES, profiles)
    vis_available = all(k in config.paths for k in ("concreteness", "imageability", "classes"))
    vis = _correlation_cells(config, scores, VISUAL_PROPERTIES, profiles) if vis_available else []
    metrics_present = sorted({s.metric for s in scores})
    rubric = [derive_rubric(m, ling, vis, flags, tau=config.tau) for m in metrics_present]
    return scores, stats, baselines, qc_cells, flags, ling, vis, rubric


def cmd_audit(config: RunConfig, args) -> int:
    config.validate(required_paths=("prompts", "questions"), need_seed=True)
    corpus = load_corpus(config)
    profiles = compute_profiles(config, corpus)
    scores, stats, baselines, qc_cells, flags, _, _, rubric = _audit_pieces(config, corpus, profiles)
    out = Path(config.out)
    (out / "tables").mkdir(parents=True, exist_ok=True)
    stats_table = render_question_stats(stats)
    (out / "tables" / "question_stats.csv").write_text(stats_table.to_csv(), encoding="utf-8")
    (out / "question_stats.md").write_text(question_stats_markdown(stats) + "\n", encoding="utf-8")
    qc_table = render_correlation_table(qc_cells, "question_count")
    (out / "tables" / "question_count.csv").write_text(qc_table.to_csv(), encoding="utf-8")
    shortcut_payload = {
        "thresholds": config.thresholds.to_json(),
        "per_metric": [f.to_json() for f in flags],
        "baselines": {
            f"{metric}/{dataset}": entry for (metric, dataset), entry in sorted(baselines.items())
        },
        "rubric": [r.to_json() for r in rubric],
    }
    (out / "shortcuts.json").write_text(
        json.dumps(shortcut_payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    print(f"wrote question stats, question-count correlations and shortcuts under {out}")
    return 0


def _input_digests(config: RunConfig) -> dict:
    digests = {}
    for key, value in sorted(config.paths.items()):
        h = hashlib.sha256()
        with open(value, "rb") as fh:
            for chunk in iter(lambda: fh.read(65536), b""):
                h.update(chunk)
        digests[key] = h.hexdigest()
    return digests


def _conventions(config: RunConfig) -> dict:
    return {
        "answer_matching": "case-insensitive exact string match after trimming; no synonym matching",
        "dependency_gating": "an incorrect answer poisons the full dependency closure of descendants",
        "flesch_kincaid": "standard grade-level constants 0.39/11.8/15.59; stopwords included",
        "yngve_aggregate": f"{config.yngve_aggregate} leaf depth",
        "class_overlap": "multi-word class labels matched through their lowercased token set",
        "missing_word_policy": config.missing_policy,
        "p_values": "two-tailed t approximation (seeded permutation test behind --exact-p)",
        "retrieval_tie_rule": "an argmax tie over captions scores the question incorrect",
        "score_scale": "scores stored in [0,1]; tables show the x100 scale",
        "significance": f"alpha={config.alpha}; bold threshold tau={config.tau}",
        "shortcut_thresholds": json.dumps(config.thresholds.to_json(), sort_keys=True),
    }


def cmd_report(config: RunConfig, args) -> int:
    config.validate(required_paths=("prompts", "questions"), need_seed=True)
    corpus = load_corpus(config)
    profiles = compute_profiles(config, corpus)
    scores, stats, baselines, qc_cells, flags, ling, vis, rubric = _audit_pieces(
        config, corpus, profiles
    )
    meta = {
        "version": __version__,
        "created_at": datetime.now(timezone.utc).isoformat(),
        "seed": config.seed,
        "alpha": config.alpha,
        "tau": config.tau,
        "trials": config.trials,
        "missing_policy": config.missing_policy,
        "yngve_aggregate": config.yngve_aggregate,
        "thresholds": config.thresholds.to_json(),
        "exact_p": config.exact_p,
        "input_digests": _input_digests(config),
        "conventions": _conventions(config),
    }
    bundle = ReportBundle(meta=meta)
    bundle.add_table(render_correlation_table(ling, "linguistic"))
    if vis:
        bundle.add_table(render_correlation_table(vis, "visual"))
    bundle.add_table(render_question_stats(stats))
    bundle.add_table(render_baselines(baselines))
    bundle.add_table(render_correlation_table(qc_cells, "question_count"))
    bundle.add_table(render_shortcut_flags(flags))
    bundle.add_table(render_rubric(rubric))
    bars = _ablated_scores(config, corpus)
    if bars:
        bundle.add_table(render_bars(bars))
    for source in sorted({s.source for s in scores}):
        try:
            bundle.add_matrix(render_heatmap(
                metric_matrix(scores, source, alpha=config.alpha, tau=config.tau), source))
        except StatError:
            continue
    write_bundle(config.out, bundle, svg=getattr(args, "svg", False))
    print(f"wrote report bundle to {config.out}")
    return 0


def cmd_all(config: RunConfig, args) -> int:
    config.validate(required_paths=("prompts", "questions"), need_seed=True)
    for step in (cmd_props, cmd_score, cmd_correlate, cmd_matrix, cmd_audit, cmd_report):
        code = step(config, args)
        if code != 0:
            return code
    return 0


# ---------------------------------------------------------------------------
# Argument parsing / entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metric-audit",
        description="Audit the construct validity of text-image consistency metrics.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override its values")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--alpha", type=float, default=None)
        p.add_argument("--tau", type=float, default=None)
        p.add_argument("--missing-policy", dest="missing_policy",
                       choices=MISSING_POLICIES, default=None)
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--exact-p", dest="exact_p", action="store_true")
        p.add_argument("--derangement", action="store_true")
        p.add_argument("--out", default=None)

    for name, fn, extra in (
        ("validate", cmd_validate, None),
        ("props", cmd_props, None),
        ("score", cmd_score, "baselines"),
        ("correlate", cmd_correlate, None),
        ("matrix", cmd_matrix, None),
        ("audit", cmd_audit, None),
        ("report", cmd_report, "svg"),
        ("all", cmd_all, "svg"),
    ):
        p = sub.add_parser(name)
        common(p)
        if extra == "baselines":
            p.add_argument("--baselines", action="store_true",
                           help="append majority/random-chance rows to the scores file")
        if extra == "svg":
            p.add_argument("--svg", action="store_true", help="emit heatmap SVGs")
        p.set_defaults(func=fn)

    p = sub.add_parser("ablate")
    p.add_argument("kind", choices=ABLATION_KINDS)
    common(p)
    p.set_defaults(func=cmd_ablate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            config = RunConfig.from_file(args.config)
        else:
            config = RunConfig()
        config.apply_flags(args)
        return args.func(config, args)
    except MetricAuditError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ConfigError):
            payload["problems"] = exc.problems
        print(json.dumps(payload, sort_keys=True), file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())

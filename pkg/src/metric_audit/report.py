"""Rendering of analysis outputs: starred/bold correlation tables, heatmap
grids, ablation bar series, question-distribution tables, and the rubric.

Every table is formatted exactly once into string cells; the CSV files and
the markdown report are both serialized from those same cells, so a number
can never differ between the two. Full-precision values ride along in
``*_raw`` columns (``repr`` round-trips exactly).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ablate import VARIANT_ORDER
from .audit import MetricShortcuts, QuestionStats, RubricRow
from .stats import CorrelationMatrix, ProfileCell

NA = "—"


def fmt2(x: float) -> str:
    return f"{x:.2f}"


def raw(x: float) -> str:
    return repr(float(x))


def marked_cell(rho: float, significant: bool, strong: bool) -> str:
    """Two decimals, "*" when significant, bold when significant and strong."""
    cell = fmt2(rho)
    if significant:
        cell += "*"
    if significant and strong:
        cell = f"**{cell}**"
    return cell


@dataclass(frozen=True)
class TablePayload:
    name: str
    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        writer.writerows(self.rows)
        return buf.getvalue()

    def to_markdown(self) -> str:
        lines = [
            "| " + " | ".join(self.columns) + " |",
            "| " + " | ".join("---" for _ in self.columns) + " |",
        ]
        for row in self.rows:
            lines.append("| " + " | ".join(row) + " |")
        return "\n".join(lines)


@dataclass(frozen=True)
class MatrixPayload:
    name: str
    labels: tuple[str, ...]
    rho: np.ndarray
    p: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["metric"] + list(self.labels))
        for i, label in enumerate(self.labels):
            writer.writerow(
                [label] + [NA if np.isnan(v) else raw(v) for v in self.rho[i]]
            )
        return buf.getvalue()

    def to_json_payload(self) -> dict:
        def grid(m):
            return [[None if np.isnan(v) else float(v) for v in row] for row in m]

        return {"labels": list(self.labels), "rho": grid(self.rho), "p": grid(self.p)}

    def to_markdown(self) -> str:
        rows = []
        for i, label in enumerate(self.labels):
            rows.append(
                tuple(
                    [label]
                    + [NA if np.isnan(v) else fmt2(v) for v in self.rho[i]]
                )
            )
        return TablePayload(
            name=self.name, columns=tuple(["metric"] + list(self.labels)), rows=tuple(rows)
        ).to_markdown()


def render_correlation_table(cells: list[ProfileCell], name: str) -> TablePayload:
    """Correlation cells as a table with starred/bold significance marking."""
    columns = (
        "source", "metric", "property", "rho", "n", "p",
        "significant", "strong", "marked", "n_dropped", "rho_raw", "p_raw", "note",
    )
    rows = []
    for cell in cells:
        if cell.result is None:
            rows.append((
                cell.source, cell.metric, cell.property_name, NA, str(cell.n_used), NA,
                "", "", NA, str(cell.n_dropped), "", "", cell.reason or "",
            ))
            continue
        res = cell.result
        rows.append((
            cell.source, cell.metric, cell.property_name,
            fmt2(res.rho), str(res.n), fmt2(res.p_value),
            "true" if res.significant else "false",
            "true" if res.strong else "false",
            marked_cell(res.rho, res.significant, res.strong),
            str(cell.n_dropped), raw(res.rho), raw(res.p_value), "",
        ))
    return TablePayload(name=name, columns=columns, rows=tuple(rows))


def render_heatmap(matrix: CorrelationMatrix, name: str) -> MatrixPayload:
    return MatrixPayload(name=name, labels=matrix.labels, rho=matrix.rho, p=matrix.p)


def render_bars(series: list[tuple[str, str, float]], name: str = "ablation_bars") -> TablePayload:
    """(metric, variant, value) triples ordered by metric then the fixed
    variant order; values also shown on the x100 scale used in the tables.
    Missing variants are simply absent."""
    columns = ("metric", "variant", "value_x100", "value_raw")
    order = {v: i for i, v in enumerate(VARIANT_ORDER)}
    rows = []
    for metric, variant, value in sorted(
        series, key=lambda t: (t[0], order.get(t[1], len(order)), t[1])
    ):
        rows.append((metric, variant, fmt2(value * 100.0), raw(value)))
    return TablePayload(name=name, columns=columns, rows=tuple(rows))


def _pct_cell(value: float | None) -> tuple[str, str]:
    if value is None:
        return "N/A", ""
    return f"{value:.1f}", raw(value)


def render_question_stats(stats: list[QuestionStats], name: str = "question_stats") -> TablePayload:
    columns = (
        "metric", "dataset", "total",
        "pct_yes_no", "pct_gold_yes_given_yn", "pct_gold_no_given_yn",
        "pct_multiple_choice", "pct_gold_first_given_mc",
        "pct_yes_no_raw", "pct_gold_yes_given_yn_raw", "pct_gold_no_given_yn_raw",
        "pct_multiple_choice_raw", "pct_gold_first_given_mc_raw",
    )
    rows = []
    for s in stats:
        shown, rawvals = [], []
        for value in (s.pct_yes_no, s.pct_gold_yes_given_yn, s.pct_gold_no_given_yn,
                      s.pct_multiple_choice, s.pct_gold_first_given_mc):
            a, b = _pct_cell(value)
            shown.append(a)
            rawvals.append(b)
        rows.append(tuple([s.metric, s.dataset, str(s.total)] + shown + rawvals))
    return TablePayload(name=name, columns=columns, rows=tuple(rows))


def question_stats_markdown(stats: list[QuestionStats]) -> str:
    """Transposed markdown layout: one column per (metric, dataset) group,
    one row per distribution statistic."""
    groups = [(s.metric, s.dataset) for s in stats]
    header = [f"{m} ({d})" for m, d in groups]
    rows = [
        ("Total # of questions", [str(s.total) for s in stats]),
        ("% yes/no questions", [_pct_cell(s.pct_yes_no)[0] for s in stats]),
        ("% gold answer yes (of yes/no)", [_pct_cell(s.pct_gold_yes_given_yn)[0] for s in stats]),
        ("% gold answer no (of yes/no)", [_pct_cell(s.pct_gold_no_given_yn)[0] for s in stats]),
        ("% multiple choice", [_pct_cell(s.pct_multiple_choice)[0] for s in stats]),
        ("% gold is first choice (of MC)", [_pct_cell(s.pct_gold_first_given_mc)[0] for s in stats]),
    ]
    payload = TablePayload(
        name="question_stats_transposed",
        columns=tuple(["statistic"] + header),
        rows=tuple(tuple([label] + values) for label, values in rows),
    )
    return payload.to_markdown()


def render_baselines(baselines: dict, name: str = "baselines") -> TablePayload:
    columns = ("metric", "dataset", "majority_x100", "random_chance_x100",
               "majority_raw", "random_chance_raw", "n_prompts")
    rows = []
    for (metric, dataset) in sorted(baselines):
        entry = baselines[(metric, dataset)]
        rows.append((
            metric, dataset,
            fmt2(entry["majority"] * 100.0), fmt2(entry["random_chance"] * 100.0),
            raw(entry["majority"]), raw(entry["random_chance"]), str(entry["n_prompts"]),
        ))
    return TablePayload(name=name, columns=columns, rows=tuple(rows))


def render_rubric(rows: list[RubricRow], name: str = "rubric") -> TablePayload:
    from .audit import METRIC_DESIGN

    columns = ("metric", "human_interpretable", "external_models",
               "sensitive_to_text", "sensitive_to_image", "robust_to_shortcuts")
    out = []
    for row in rows:
        design = METRIC_DESIGN.get(row.metric, {})
        out.append((
            row.metric,
            design.get("human_interpretable", ""),
            design.get("external_models", ""),
            row.sensitive_to_text, row.sensitive_to_image, row.robust_to_shortcuts,
        ))
    return TablePayload(name=name, columns=columns, rows=tuple(out))


def render_shortcut_flags(flags: list[MetricShortcuts], name: str = "shortcut_flags") -> TablePayload:
    columns = ("metric", "dataset", "yes_bias", "first_answer_bias",
               "question_count_dependence", "pct_gold_yes_given_yn",
               "pct_gold_first_given_mc", "question_count_rho",
               "majority_x100", "random_chance_x100")
    rows = []
    for f in flags:
        sup = f.supporting
        rows.append((
            f.metric, f.dataset,
            "true" if f.yes_bias else "false",
            "true" if f.first_answer_bias else "false",
            "true" if f.question_count_dependence else "false",
            _pct_cell(sup.get("pct_gold_yes_given_yn"))[0],
            _pct_cell(sup.get("pct_gold_first_given_mc"))[0],
            fmt2(sup["question_count_rho"]) if sup.get("question_count_rho") is not None else NA,
            fmt2(sup["majority_baseline"] * 100) if sup.get("majority_baseline") is not None else NA,
            fmt2(sup["random_chance"] * 100) if sup.get("random_chance") is not None else NA,
        ))
    return TablePayload(name=name, columns=columns, rows=tuple(rows))


# ---------------------------------------------------------------------------
# Optional self-contained SVG heatmap (no plotting toolkit)
# ---------------------------------------------------------------------------


def _diverging_color(value: float) -> str:
    """Blue (-1) to white (0) to red (+1)."""
    v = max(-1.0, min(1.0, value))
    if v >= 0:
        r, g, b = 255, round(255 * (1 - v)), round(255 * (1 - v))
    else:
        r, g, b = round(255 * (1 + v)), round(255 * (1 + v)), 255
    return f"rgb({r},{g},{b})"


def heatmap_svg(matrix: MatrixPayload, cell: int = 64, margin: int = 90) -> str:
    n = len(matrix.labels)
    size = margin + n * cell + 10
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'font-family="sans-serif" font-size="12">'
    ]
    for i, label in enumerate(matrix.labels):
        y = margin + i * cell + cell // 2
        parts.append(f'<text x="{margin - 6}" y="{y + 4}" text-anchor="end">{label}</text>')
        x = margin + i * cell + cell // 2
        parts.append(
            f'<text x="{x}" y="{margin - 8}" text-anchor="middle" '
            f'transform="rotate(-45 {x} {margin - 8})">{label}</text>'
        )
    for i in range(n):
        for j in range(n):
            v = matrix.rho[i, j]
            x, y = margin + j * cell, margin + i * cell
            if np.isnan(v):
                fill, text = "rgb(230,230,230)", NA
            else:
                fill, text = _diverging_color(float(v)), fmt2(float(v))
            parts.append(
                f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" '
                f'fill="{fill}" stroke="white"/>'
            )
            parts.append(
                f'<text x="{x + cell // 2}" y="{y + cell // 2 + 4}" '
                f'text-anchor="middle">{text}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts)


# ---------------------------------------------------------------------------
# Bundle assembly
# ---------------------------------------------------------------------------


@dataclass
class ReportBundle:
    meta: dict
    tables: dict[str, TablePayload] = field(default_factory=dict)
    matrices: dict[str, MatrixPayload] = field(default_factory=dict)

    def add_table(self, payload: TablePayload) -> None:
        self.tables[payload.name] = payload

    def add_matrix(self, payload: MatrixPayload) -> None:
        self.matrices[payload.name] = payload


def conventions_block(meta: dict) -> list[str]:
    """The analysis conventions repeated at the top of every report."""
    conv = meta.get("conventions", {})
    lines = ["## Conventions", ""]
    for key in sorted(conv):
        lines.append(f"- {key}: {conv[key]}")
    lines.append("")
    return lines


def build_markdown(bundle: ReportBundle) -> str:
    lines = ["# Metric audit report", ""]
    meta = bundle.meta
    lines.append(
        f"Seed {meta.get('seed')} | alpha {meta.get('alpha')} | tau {meta.get('tau')} "
        f"| missing-word policy {meta.get('missing_policy')}"
    )
    lines.append("")
    lines.extend(conventions_block(meta))
    for name in sorted(bundle.tables):
        lines.append(f"## {name}")
        lines.append("")
        lines.append(bundle.tables[name].to_markdown())
        lines.append("")
    for name in sorted(bundle.matrices):
        lines.append(f"## matrix: {name}")
        lines.append("")
        lines.append(bundle.matrices[name].to_markdown())
        lines.append("")
    return "\n".join(lines) + "\n"


def write_bundle(outdir, bundle: ReportBundle, svg: bool = False) -> None:
    """Write tables/*.csv, matrices/*.csv+json, report.md, meta.json
    (and figures/*.svg when requested). Byte-identical across runs for
    identical inputs, except the created_at stamp inside meta.json."""
    outdir = Path(outdir)
    (outdir / "tables").mkdir(parents=True, exist_ok=True)
    (outdir / "matrices").mkdir(parents=True, exist_ok=True)
    for name in sorted(bundle.tables):
        (outdir / "tables" / f"{name}.csv").write_text(bundle.tables[name].to_csv(), encoding="utf-8")
    for name in sorted(bundle.matrices):
        payload = bundle.matrices[name]
        (outdir / "matrices" / f"{name}.csv").write_text(payload.to_csv(), encoding="utf-8")
        (outdir / "matrices" / f"{name}.json").write_text(
            json.dumps(payload.to_json_payload(), sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
    if svg:
        (outdir / "figures").mkdir(parents=True, exist_ok=True)
        for name in sorted(bundle.matrices):
            (outdir / "figures" / f"{name}.svg").write_text(
                heatmap_svg(bundle.matrices[name]), encoding="utf-8"
            )
    (outdir / "report.md").write_text(build_markdown(bundle), encoding="utf-8")
    (outdir / "meta.json").write_text(
        json.dumps(bundle.meta, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )

"""Correlate prompt properties with metric scores; compare metrics pairwise."""

import numpy as np

from metric_audit.metrics import MetricScore
from metric_audit.report import render_correlation_table, render_heatmap
from metric_audit.stats import correlate_profiles, metric_matrix, spearman

# The Spearman engine: rank correlation with average ranks for ties and a
# two-tailed t-approximation p-value.
res = spearman([1, 2, 2, 4], [1, 3, 2, 4])
print(f"rho={res.rho:.4f} n={res.n} p={res.p_value:.4f} significant={res.significant}")

print()

# Build a synthetic study: 30 prompts whose scores fall as length grows.
n = 30
lengths = {f"p{i:02d}": float(3 + i) for i in range(n)}
scores = []
for metric in ("tifa", "vpeval", "dsg"):
    for i in range(n):
        scores.append(MetricScore(f"p{i:02d}", "model_a", metric, 1.0 / (1.0 + i), i + 1))
rng = np.random.default_rng(0)
for i in range(n):  # similarity scores unrelated to length
    scores.append(MetricScore(f"p{i:02d}", "model_a", "clipscore", float(rng.uniform(-0.2, 0.6)), 0))

cells = correlate_profiles(scores, lengths, "length")
table = render_correlation_table(cells, "length_vs_scores")
print(table.to_markdown())

print()

# Pairwise metric-by-metric matrix for one source (pairwise prompt deletion,
# exact unit diagonal). Identical ranks between QA metrics show up as 1.00.
matrix = metric_matrix(scores, "model_a")
print(render_heatmap(matrix, "model_a").to_markdown())

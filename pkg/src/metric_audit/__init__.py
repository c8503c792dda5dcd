"""Construct-validity auditing for text-image consistency metrics.

A numpy-backed library (plus a small CLI) that computes linguistic and
visual properties of prompts, aggregates similarity- and QA-based metric
scores, correlates properties with scores, applies four ablation
transforms, and quantifies answer-distribution shortcuts against
majority-class and random-chance baselines.
"""

__version__ = "0.1.0"

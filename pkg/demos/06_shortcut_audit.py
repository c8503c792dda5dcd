"""Audit a skewed question distribution for answer shortcuts."""

from metric_audit.audit import (
    question_count_correlation,
    question_stats,
    shortcut_flags,
)
from metric_audit.corpus import QuestionRecord
from metric_audit.metrics import MetricScore
from metric_audit.report import render_question_stats

# A question set with the biases this audit is built to catch: yes/no golds
# almost always "yes", multiple-choice golds almost always first.
questions = []
for i in range(500):
    gold = "no" if i < 2 else "yes"  # 99.6% yes
    questions.append(QuestionRecord(f"y{i}", "p1", "tifa", "is it there?", "yes_no",
                                    ("yes", "no"), gold))
for i in range(400):
    gold = "b" if i < 25 else "a"  # 93.75% first-choice
    questions.append(QuestionRecord(f"m{i}", "p1", "tifa", "which one?", "multiple_choice",
                                    ("a", "b", "c", "d"), gold))

stats = question_stats(questions, "tifa", "coco")
print(render_question_stats([stats]).to_markdown())
print()

# Scores that fall as the question count grows (more questions, more chances
# to miss) complete the shortcut picture.
scores = [MetricScore(f"p{i}", "model_a", "tifa", 1.0 - i / 40.0, i + 1) for i in range(20)]
qc_cells = question_count_correlation(scores)

flags = shortcut_flags(stats, {"majority": 0.97, "random_chance": 0.44}, qc_cells)
print(f"yes bias:                  {flags.yes_bias}")
print(f"first-answer bias:         {flags.first_answer_bias}")
print(f"question-count dependence: {flags.question_count_dependence}")
print(f"thresholds: {flags.thresholds.to_json()}")

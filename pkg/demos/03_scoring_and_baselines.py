"""Aggregate QA answers into metric scores and compare against baselines."""

from metric_audit.corpus import AnswerRecord, QuestionRecord, SimilarityRecord
from metric_audit.metrics import (
    majority_baseline,
    random_chance,
    score_clipscore,
    score_dsg,
    score_tifa,
)


def yes_no(qid, gold="yes", metric="tifa", deps=()):
    return QuestionRecord(question_id=qid, prompt_id="p1", metric=metric,
                          text=f"{qid}?", qtype="yes_no", choices=("yes", "no"),
                          gold=gold, depends_on=tuple(deps))


# Flat percent-correct: 2 of 3 answered right.
questions = [yes_no("q1"), yes_no("q2"), yes_no("q3", gold="no")]
answers = [
    AnswerRecord("q1", "vqa", "yes"),
    AnswerRecord("q2", "vqa", "no"),
    AnswerRecord("q3", "vqa", "no"),
]
print("flat score:", score_tifa(questions, answers, "vqa").value)

# Dependency gating: the parent question is wrong, so the child loses credit
# even though its own answer matches.
chain = [yes_no("d1", metric="dsg"), yes_no("d2", metric="dsg", deps=["d1"])]
chain_answers = [AnswerRecord("d1", "vqa", "no"), AnswerRecord("d2", "vqa", "yes")]
print("gated score:", score_dsg(chain, chain_answers, "vqa").value)

# Similarity ingestion: one full-prompt record per (prompt, source).
sims = [SimilarityRecord("p1", "real", "full_prompt", 0.306)]
print("similarity score:", score_clipscore(sims, "p1", "real").value)

print()

# Baselines tell you whether a high score means anything. With yes-skewed
# golds, always answering "yes" already lands near the top.
skewed = [yes_no(f"s{i}", gold="yes") for i in range(9)] + [yes_no("s9", gold="no")]
print("majority baseline on 90%-yes golds:", majority_baseline(skewed))
print("random chance   on the same group:", round(random_chance(skewed, 100_000, seed=7), 3))

# Gating drags random chance below the flat 0.5 on dependency chains.
print("random chance on a 2-question chain:",
      round(random_chance(chain, 100_000, seed=7), 3), "(enumerated value: 0.375)")

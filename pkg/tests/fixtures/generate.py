"""Regenerate the bundled fixture corpus.

Run from the repository root:

    python tests/fixtures/generate.py

The fixture is small but exercises every pipeline surface: two datasets,
two model sources plus a deterministic stub, all three QA metrics with
dependency chains, full-prompt similarities, and retrieval-caption
similarities from a hash-based stub. Everything is deterministic.
"""

import hashlib
import json
import random
from pathlib import Path

HERE = Path(__file__).parent

RNG = random.Random(20240601)

# (id, dataset, text, parse_style); texts grow in length and syllable density
# so the linguistic properties rise with the prompt index.
PROMPTS = [
    ("p01", "coco", "a big bear", "flat"),
    ("p02", "coco", "a dog runs fast", "flat"),
    ("p03", "coco", "a red dog sits on grass", "flat"),
    ("p04", "coco", "two small cats sleep near a warm fire", "flat"),
    ("p05", "coco", "a purple dog is laying across a flower bed", "flat"),
    ("p06", "coco", "an orange cat watches a bird from the kitchen window", "flat"),
    ("p07", "coco", "a shiny red fire truck is parked beside the crowded station", "flat"),
    ("p08", "coco", "A big burly grizzly bear is shown with grass in the background", "flat"),
    ("w01", "winoground", "fire truck", "chain"),
    ("w02", "winoground", "truck fire near houses", "chain"),
    ("w03", "winoground", "a bird chases an insect over water", "chain"),
    ("w04", "winoground", "an insect quietly chases a colorful bird over shallow water", "chain"),
]

NOUNS = {
    "p01": "bear", "p02": "dog", "p03": "dog", "p04": "cat", "p05": "dog",
    "p06": "cat", "p07": "truck", "p08": "bear",
    "w01": "truck", "w02": "truck", "w03": "bird", "w04": "insect",
}

COLORS = ["red", "blue", "green", "purple"]
ANIMALS = ["dog", "cat", "bird", "fish"]


def parse_for(text, style):
    tokens = text.split()
    if style == "flat":
        inner = " ".join(f"(X {t})" for t in tokens)
        return f"(S {inner})"
    # right-branching chain
    tree = f"(X {tokens[-1]})"
    for t in reversed(tokens[:-1]):
        tree = f"(S (X {t}) {tree})"
    return tree if len(tokens) > 1 else f"(S {tree})"


def hash_unit(caption):
    """Deterministic similarity in [-1, 1] from the caption bytes (stub rule)."""
    digest = hashlib.sha256(caption.encode("utf-8")).hexdigest()
    return round(int(digest[:12], 16) / float(0xFFFFFFFFFFFF) * 2.0 - 1.0, 6)


def build_questions():
    questions = []
    for index, (pid, dataset, text, _) in enumerate(PROMPTS, start=1):
        noun = NOUNS[pid]
        # tifa: 2-4 questions, mixed types, yes-skewed golds with rare "no"
        n_tifa = 2 + (index % 3)
        for j in range(n_tifa):
            qid = f"{pid}_tifa_{j}"
            if j % 2 == 0:
                gold = "no" if (index + j) % 9 == 0 else "yes"
                questions.append({
                    "question_id": qid, "prompt_id": pid, "metric": "tifa",
                    "text": f"Is there a {noun} in the image?", "qtype": "yes_no",
                    "choices": ["yes", "no"], "gold": gold,
                })
            else:
                choices = ANIMALS if noun in ANIMALS else [noun] + COLORS[:3]
                gold = choices[0] if (index + j) % 7 else choices[1]
                questions.append({
                    "question_id": qid, "prompt_id": pid, "metric": "tifa",
                    "text": "What type of thing is shown?", "qtype": "multiple_choice",
                    "choices": choices, "gold": gold,
                })
        # vpeval: 1 yes/no + 1 multiple choice
        questions.append({
            "question_id": f"{pid}_vp_0", "prompt_id": pid, "metric": "vpeval",
            "text": f"Does the image contain a {noun}?", "qtype": "yes_no",
            "choices": ["yes", "no"], "gold": "yes",
        })
        color_gold = COLORS[0] if index % 5 else COLORS[1]
        questions.append({
            "question_id": f"{pid}_vp_1", "prompt_id": pid, "metric": "vpeval",
            "text": "What color is the main object?", "qtype": "multiple_choice",
            "choices": COLORS, "gold": color_gold,
        })
        # dsg: yes/no chain with dependencies, golds always yes
        n_dsg = 2 + (index % 2)
        for j in range(n_dsg):
            questions.append({
                "question_id": f"{pid}_dsg_{j}", "prompt_id": pid, "metric": "dsg",
                "text": f"Is the {noun} attribute {j} present?", "qtype": "yes_no",
                "choices": ["yes", "no"], "gold": "yes",
                **({"depends_on": [f"{pid}_dsg_{j-1}"]} if j else {}),
            })
    return questions


def majority_answer(q):
    return "yes" if q["qtype"] == "yes_no" else q["choices"][0]


def wrong_answer(q):
    if q["qtype"] == "yes_no":
        return "no" if q["gold"] == "yes" else "yes"
    others = [c for c in q["choices"] if c != q["gold"]]
    return RNG.choice(others)


def build_answers(questions):
    answers = []
    order = {pid: i for i, (pid, _, _, _) in enumerate(PROMPTS, start=1)}
    for q in questions:
        index = order[q["prompt_id"]]
        for source, p_correct in (
            ("real", 0.85),
            ("t2i_a", max(0.15, 0.97 - 0.075 * index)),
        ):
            correct = RNG.random() < p_correct
            answers.append({
                "question_id": q["question_id"], "source": source,
                "predicted": q["gold"] if correct else wrong_answer(q),
            })
        answers.append({
            "question_id": q["question_id"], "source": "stub",
            "predicted": majority_answer(q),
        })
    return answers


def build_similarities(questions):
    sims = []
    for index, (pid, dataset, text, _) in enumerate(PROMPTS, start=1):
        sims.append({"prompt_id": pid, "source": "real", "caption_variant": "full_prompt",
                     "score": round(0.22 + 0.012 * index + RNG.uniform(-0.004, 0.004), 6)})
        sims.append({"prompt_id": pid, "source": "t2i_a", "caption_variant": "full_prompt",
                     "score": round(0.25 + 0.010 * index + RNG.uniform(-0.004, 0.004), 6)})
    # retrieval captions from the hash-based similarity stub
    for q in questions:
        stem = q["text"][:-1] if q["text"].endswith("?") else q["text"]
        for i, choice in enumerate(q["choices"]):
            caption = f"{stem}? {choice}"
            sims.append({
                "prompt_id": q["prompt_id"], "source": "stub_clip",
                "caption_variant": f"{q['question_id']}::{i}",
                "score": hash_unit(caption),
            })
    return sims


CONCRETENESS = {
    "bear": 4.9, "dog": 4.85, "cat": 4.86, "bird": 4.9, "insect": 4.76,
    "truck": 4.85, "fire": 4.69, "grass": 4.94, "flower": 4.93, "bed": 4.9,
    "window": 4.83, "kitchen": 4.87, "station": 4.4, "water": 4.94, "houses": 4.8,
    "big": 3.38, "small": 3.43, "red": 4.24, "purple": 4.04, "orange": 4.75,
    "shiny": 3.9, "warm": 3.4, "crowded": 3.6, "colorful": 3.8, "shallow": 3.5,
    "runs": 4.3, "sits": 4.1, "sleep": 4.0, "watches": 3.2, "parked": 4.1,
    "laying": 3.9, "chases": 3.7, "shown": 2.8, "fast": 3.4, "near": 2.6,
    "burly": 2.9, "background": 3.1, "quietly": 2.2, "two": 3.9,
}

IMAGEABILITY = {k: round(min(5.0, v * 0.95 + 0.2), 3) for k, v in CONCRETENESS.items()}
# leave one mid-frequency word out of the imageability lexicon to exercise
# the missing-word policies
IMAGEABILITY.pop("burly")

CLASSES = [
    "grizzly_bear", "dog", "cat", "bird", "fire truck", "grass", "flower_bed",
    "kitchen window", "water", "insect", "station", "bed", "couch", "pizza",
]


def write_jsonl(path, objs):
    with open(path, "w", encoding="utf-8") as fh:
        for obj in objs:
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def main():
    prompts = [
        {"id": pid, "dataset": dataset, "text": text, "parse": parse_for(text, style)}
        for pid, dataset, text, style in PROMPTS
    ]
    images = [
        {"prompt_id": pid, "source": source, "image_key": f"{source}/{pid}.png"}
        for pid, _, _, _ in PROMPTS
        for source in ("real", "t2i_a")
    ]
    questions = build_questions()
    answers = build_answers(questions)
    similarities = build_similarities(questions)

    write_jsonl(HERE / "prompts.jsonl", prompts)
    write_jsonl(HERE / "images.jsonl", images)
    write_jsonl(HERE / "questions.jsonl", questions)
    write_jsonl(HERE / "answers.jsonl", answers)
    write_jsonl(HERE / "similarities.jsonl", similarities)

    with open(HERE / "concreteness.tsv", "w", encoding="utf-8") as fh:
        for word in sorted(CONCRETENESS):
            fh.write(f"{word}\t{CONCRETENESS[word]}\n")
    with open(HERE / "imageability.tsv", "w", encoding="utf-8") as fh:
        for word in sorted(IMAGEABILITY):
            fh.write(f"{word}\t{IMAGEABILITY[word]}\n")
    with open(HERE / "classes.txt", "w", encoding="utf-8") as fh:
        fh.write("\n".join(CLASSES) + "\n")

    config = {
        "paths": {
            "prompts": "prompts.jsonl",
            "images": "images.jsonl",
            "questions": "questions.jsonl",
            "answers": "answers.jsonl",
            "similarities": "similarities.jsonl",
            "concreteness": "concreteness.tsv",
            "imageability": "imageability.tsv",
            "classes": "classes.txt",
        },
        "seed": 7,
        "alpha": 0.05,
        "tau": 0.4,
        "missing_policy": "lowest",
        "trials": 5000,
        "out": "out",
    }
    with open(HERE / "config.json", "w", encoding="utf-8") as fh:
        json.dump(config, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"fixture corpus written under {HERE}")


if __name__ == "__main__":
    main()

"""The four ablation transforms, applied to a toy corpus."""

from metric_audit.ablate import (
    build_retrieval_captions,
    format_text_only_qa,
    score_retrieval_qa,
    shuffle_images,
    shuffle_text,
)
from metric_audit.corpus import ImageRef, PromptRecord, QuestionRecord, SimilarityRecord

# 1. Shuffle images within a (dataset, source) group; derangement guarantees
#    nobody keeps their own image.
prompts = {f"p{i}": PromptRecord(id=f"p{i}", dataset="coco", text="a dog") for i in range(4)}
refs = [ImageRef(prompt_id=pid, source="model_a", image_key=f"img-{pid}") for pid in prompts]
for ref in shuffle_images(refs, prompts, seed=7, derangement=True):
    print(f"{ref.prompt_id} now shows {ref.image_key}")

print()

# 2. Shuffle text within an example; the terminal "?" stays put and the
#    token multiset is preserved.
question = "What are the animals in the image?"
print(f"original: {question}")
print(f"shuffled: {shuffle_text(question, seed=3)}")

print()

# 3. Retrieval-style QA: one caption per answer choice; a question counts
#    only when the gold caption has the strictly highest similarity.
q = QuestionRecord(question_id="q1", prompt_id="p0", metric="tifa",
                   text="What type of animal is this animal?", qtype="multiple_choice",
                   choices=("dog", "cat", "bird", "fish"), gold="dog")
caption_set = build_retrieval_captions(q)
for _, caption in caption_set.captions:
    print(caption)
sims = [
    SimilarityRecord("p0", "clip", f"q1::{i}", s)
    for i, s in enumerate([0.31, 0.20, 0.18, 0.05])
]
print("retrieval verdict:", score_retrieval_qa([q], sims, "clip")[0].value)

print()

# 4. Text-only QA: the exact prompt handed to a language model instead of a
#    VQA model.
print(format_text_only_qa(q))

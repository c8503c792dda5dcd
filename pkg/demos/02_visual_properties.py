"""Score prompts on concreteness, imageability, and object-class overlap."""

from metric_audit.corpus import ClassList, Lexicon
from metric_audit.visprops import class_overlap, lexical_mean

# A tiny concreteness lexicon; real runs load 40k-word TSV files.
ratings = {"dog": 4.85, "bear": 4.90, "grass": 4.94, "idea": 1.61, "sky": 4.5}
lexicon = Lexicon(entries=tuple(ratings.items()), min_rating=min(ratings.values()))

text = "a dog on grass thinking about a zorp"

# Three policies for words missing from the lexicon ("zorp"): assign the
# lexicon minimum (default), assign zero, or omit the word.
for policy in ("lowest", "zero", "omit"):
    value = lexical_mean(text, lexicon, policy=policy)
    print(f"policy={policy:6}  mean concreteness = {value:.3f}")

print()

# Class overlap: the share of non-stopword tokens that are object-class
# tokens. Multi-word labels match through their token set, so "grizzly_bear"
# covers both "grizzly" and "bear".
classes = ClassList(
    labels=frozenset({"grizzly_bear", "grass", "fire truck"}),
    label_tokens=frozenset({"grizzly", "bear", "grass", "fire", "truck"}),
)
for text in ("grizzly bear grass", "a dog on grass", "a purple couch"):
    print(f"{text!r:25} overlap = {class_overlap(text, classes):.2f}")

"""Tokenize prompts and score readability, syntactic complexity, and length."""

from metric_audit.textprops import (
    count_syllables,
    flesch_kincaid_grade,
    parse_bracketed,
    prompt_length,
    tokenize,
    yngve_score,
)

# Treebank-style tokenization: terminal punctuation splits off, contractions
# split at the apostrophe, internal periods stay attached.
for text in ["a big bear", "What are the animals in the image?", "don't stop", "a 3.5 inch pizza"]:
    seq = tokenize(text)
    print(f"{text!r:45} -> {list(seq.tokens)}")

print()

# Syllables feed the grade-level formula (vowel-group heuristic, min 1).
for word in ["bear", "burly", "grizzly", "background", "table"]:
    print(f"{word:12} {count_syllables(word)} syllable(s)")

print()

# Longer, denser prompts read harder.
short = "a big bear"
long_ = "A big burly grizzly bear is shown with grass in the background"
print(f"grade({short!r})  = {flesch_kincaid_grade(short):.2f}")
print(f"grade({long_!r}) = {flesch_kincaid_grade(long_):.2f}")

print()

# Yngve complexity sums right-sibling counts along root-to-leaf paths, so
# left-branching trees cost more than their right-branching mirrors.
right = parse_bracketed("(S (A x) (S (A y) (S (A z) (B w))))")
left = parse_bracketed("(S (S (S (B w) (A z)) (A y)) (A x))")
print(f"right-branching mean depth: {yngve_score(right):.2f}")
print(f"left-branching mean depth:  {yngve_score(left):.2f}")
print(f"unary chain:                {yngve_score(parse_bracketed('(S (NP (NN dog)))')):.2f}")

print()

# Prompt length counts non-stopword word tokens (bundled 179-word list).
print(f"length({long_!r}) = {prompt_length(long_)}")

"""Visual-prior properties of prompts: concreteness, imageability, class overlap.

All three are proxied through the prompt text: per-word lexicon ratings are
averaged over non-stopword word tokens, and class overlap is the fraction of
those tokens that appear among the object-class label tokens.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import ClassList, Lexicon
from .errors import StatError
from .textprops import default_stopwords, tokenize

MISSING_POLICIES = ("lowest", "zero", "omit")


@dataclass(frozen=True)
class VisualProfile:
    prompt_id: str
    concreteness: float
    imageability: float
    class_overlap: float
    missing_word_policy: str


def _scorable_tokens(text: str, stopwords: frozenset[str]) -> list[str]:
    return [w.lower() for w in tokenize(text).words() if w.lower() not in stopwords]


def _lookup_terms(token: str) -> list[str]:
    # hyphenated words are split before lookup; lexicons index bare words
    if "-" in token:
        return [part for part in token.split("-") if part]
    return [token]


def lexical_mean(
    text: str,
    lexicon: Lexicon,
    stopwords: frozenset[str] | None = None,
    policy: str = "lowest",
) -> float:
    """Mean lexicon rating over non-stopword word tokens.

    A token missing from the lexicon contributes the lexicon minimum
    (policy "lowest"), 0.0 (policy "zero"), or is excluded (policy "omit").
    """
    if policy not in MISSING_POLICIES:
        raise ValueError(f"unknown missing-word policy {policy!r}")
    if stopwords is None:
        stopwords = default_stopwords()
    entries = lexicon.as_dict()
    terms: list[str] = []
    for token in _scorable_tokens(text, stopwords):
        terms.extend(_lookup_terms(token))
    if not terms:
        raise StatError("no scorable tokens: every word token is a stopword")
    values: list[float] = []
    for term in terms:
        rating = entries.get(term)
        if rating is not None:
            values.append(rating)
        elif policy == "lowest":
            values.append(lexicon.min_rating)
        elif policy == "zero":
            values.append(0.0)
        # "omit" drops the term
    if not values:
        raise StatError("no scorable tokens: all words missing from the lexicon under policy 'omit'")
    return sum(values) / len(values)


def class_overlap(
    text: str,
    classes: ClassList,
    stopwords: frozenset[str] | None = None,
) -> float:
    """Fraction of non-stopword word tokens that are object-class label tokens.

    Tokens are lowercased and duplicates count once per occurrence in both
    numerator and denominator.
    """
    if stopwords is None:
        stopwords = default_stopwords()
    tokens = _scorable_tokens(text, stopwords)
    if not tokens:
        raise StatError("no scorable tokens: every word token is a stopword")
    hits = sum(1 for t in tokens if t in classes.label_tokens)
    return hits / len(tokens)


def visual_profile(
    prompt_id: str,
    text: str,
    concreteness_lexicon: Lexicon,
    imageability_lexicon: Lexicon,
    classes: ClassList,
    stopwords: frozenset[str] | None = None,
    policy: str = "lowest",
) -> VisualProfile:
    """Bundle the three visual-prior measures for one prompt."""
    return VisualProfile(
        prompt_id=prompt_id,
        concreteness=lexical_mean(text, concreteness_lexicon, stopwords, policy),
        imageability=lexical_mean(text, imageability_lexicon, stopwords, policy),
        class_overlap=class_overlap(text, classes, stopwords),
        missing_word_policy=policy,
    )

"""Linguistic properties of prompts: tokenization, readability, syntactic complexity, length.

The tokenizer reimplements the Penn Treebank rule cascade (terminal punctuation,
contractions, commas, quotes) so that no external NLP toolkit is required; its
behavior is pinned by fixture tests. Readability is the Kincaid grade-level
formula, complexity is the Yngve right-sibling depth measure over constituency
trees, and length is the non-stopword word-token count.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .errors import DataError, StatError

# ---------------------------------------------------------------------------
# Tokenization (Treebank rule cascade)
# ---------------------------------------------------------------------------

_STARTING_QUOTES = [
    (re.compile(r'^\"'), r"`` "),
    (re.compile(r"(``)"), r" \1 "),
    # Unlike the classic cascade we do not rewrite a standalone '' into ``;
    # that rewrite breaks idempotency on re-tokenized output.
    (re.compile(r'([ \(\[{<])(\")'), r"\1 `` "),
]

_PUNCTUATION = [
    # Lookahead (rather than consuming the next char) keeps runs like "::" stable.
    (re.compile(r"([:,])(?=[^\d])"), r" \1 "),
    (re.compile(r"([:,])$"), r" \1 "),
    (re.compile(r"\.\.\."), r" ... "),
    (re.compile(r"[;@#$%&]"), r" \g<0> "),
    # Final-period rule: split a sentence-terminal period (optionally followed
    # by closing quotes/brackets) but leave internal periods like "3.5" intact.
    (re.compile(r'([^\.])(\.)([\]\)}>"\']*)\s*$'), r"\1 \2\3 "),
    (re.compile(r"[?!]"), r" \g<0> "),
    (re.compile(r"([^'])' "), r"\1 ' "),
]

_PARENS_BRACKETS = (re.compile(r"[\]\[\(\)\{\}\<\>]"), r" \g<0> ")

_DOUBLE_DASHES = (re.compile(r"--"), r" -- ")

_ENDING_QUOTES = [
    (re.compile(r'"'), " '' "),
    (re.compile(r"(\S)(\'\')"), r"\1 \2 "),
    (re.compile(r"([^' ])('[sS]|'[mM]|'[dD]|') "), r"\1 \2 "),
    (re.compile(r"([^' ])('ll|'LL|'re|'RE|'ve|'VE|n't|N'T) "), r"\1 \2 "),
]

_CONTRACTIONS2 = [
    re.compile(r"(?i)\b(can)(not)\b"),
    re.compile(r"(?i)\b(d)('ye)\b"),
    re.compile(r"(?i)\b(gim)(me)\b"),
    re.compile(r"(?i)\b(gon)(na)\b"),
    re.compile(r"(?i)\b(got)(ta)\b"),
    re.compile(r"(?i)\b(lem)(me)\b"),
    re.compile(r"(?i)\b(more)('n)\b"),
    re.compile(r"(?i)\b(wan)(na)(?=\s)"),
]

_CONTRACTIONS3 = [
    re.compile(r"(?i) ('t)(is)\b"),
    re.compile(r"(?i) ('t)(was)\b"),
]

_ALNUM = re.compile(r"[0-9A-Za-z]")


@dataclass(frozen=True)
class TokenSequence:
    """Tokens plus a parallel flag marking word tokens (vs. pure punctuation)."""

    tokens: tuple[str, ...]
    is_word: tuple[bool, ...]

    def __post_init__(self):
        if len(self.tokens) != len(self.is_word):
            raise ValueError("tokens and is_word must have equal length")

    def words(self) -> list[str]:
        return [t for t, w in zip(self.tokens, self.is_word) if w]

    def joined(self) -> str:
        return " ".join(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)


def tokenize(text: str) -> TokenSequence:
    """Split ``text`` into Treebank-style tokens.

    Terminal punctuation becomes its own token, contractions split at the
    apostrophe ("don't" -> "do", "n't"), commas/quotes/brackets are separated,
    and internal periods ("3.5") are kept. Deterministic; empty input yields
    an empty sequence. Idempotent on its own space-joined output.
    """
    for regexp, substitution in _STARTING_QUOTES:
        text = regexp.sub(substitution, text)
    for regexp, substitution in _PUNCTUATION:
        text = regexp.sub(substitution, text)
    regexp, substitution = _PARENS_BRACKETS
    text = regexp.sub(substitution, text)
    regexp, substitution = _DOUBLE_DASHES
    text = regexp.sub(substitution, text)

    text = " " + text + " "

    for regexp, substitution in _ENDING_QUOTES:
        text = regexp.sub(substitution, text)
    for regexp in _CONTRACTIONS2:
        text = regexp.sub(r" \1 \2 ", text)
    for regexp in _CONTRACTIONS3:
        text = regexp.sub(r" \1 \2 ", text)

    tokens = tuple(text.split())
    flags = tuple(bool(_ALNUM.search(t)) for t in tokens)
    return TokenSequence(tokens, flags)


# ---------------------------------------------------------------------------
# Syllables, sentences, readability
# ---------------------------------------------------------------------------

_VOWELS = frozenset("aeiouy")

_SENTENCE_END = re.compile(r"[.!?]+(?=\s|$)")


def count_syllables(word: str) -> int:
    """Heuristic syllable count: maximal vowel groups (a,e,i,o,u,y), with a
    trailing silent 'e' subtracted unless the word ends in consonant+'le'.
    Never returns less than 1."""
    w = "".join(ch for ch in word.lower() if ch.isalpha())
    if not w:
        return 1
    groups = 0
    prev_vowel = False
    for ch in w:
        is_vowel = ch in _VOWELS
        if is_vowel and not prev_vowel:
            groups += 1
        prev_vowel = is_vowel
    if w.endswith("e"):
        keeps_le = len(w) >= 3 and w.endswith("le") and w[-3] not in _VOWELS
        if not keeps_le:
            groups -= 1
    return max(groups, 1)


def count_sentences(text: str) -> int:
    """Number of '.', '!' or '?' runs followed by whitespace or end of text;
    at least 1 (short prompts often carry no terminal punctuation)."""
    return max(1, len(_SENTENCE_END.findall(text)))


def flesch_kincaid_grade(text: str) -> float:
    """Kincaid grade level: 0.39*(words/sentences) + 11.8*(syllables/words) - 15.59.

    Words are word tokens (punctuation excluded, stopwords included).
    Raises StatError when the text has no word tokens.
    """
    words = tokenize(text).words()
    if not words:
        raise StatError("cannot compute grade level: text has no word tokens")
    sentences = count_sentences(text)
    syllables = sum(count_syllables(w) for w in words)
    n = len(words)
    return 0.39 * (n / sentences) + 11.8 * (syllables / n) - 15.59


# ---------------------------------------------------------------------------
# Constituency trees (Penn-Treebank bracketed format) and Yngve complexity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParseTree:
    """A constituency-tree node: either internal (has children) or a leaf
    (a preterminal carrying one token). Exactly one of the two."""

    label: str
    children: tuple["ParseTree", ...] = ()
    leaf: str | None = None

    def __post_init__(self):
        if (self.leaf is None) == (len(self.children) == 0):
            raise ValueError("a node must have children xor a leaf token")

    def leaves(self) -> list[str]:
        if self.leaf is not None:
            return [self.leaf]
        out: list[str] = []
        for child in self.children:
            out.extend(child.leaves())
        return out

    def to_bracketed(self) -> str:
        if self.leaf is not None:
            return f"({self.label} {self.leaf})"
        inner = " ".join(c.to_bracketed() for c in self.children)
        return f"({self.label} {inner})"


_PTB_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def parse_bracketed(text: str) -> ParseTree:
    """Parse a Penn-Treebank-style bracketed string into a ParseTree.

    Accepts an empty root label, as in the common "( (S ...))" file shells.
    Raises DataError on unbalanced brackets, trailing material, or an
    empty tree.
    """
    toks = _PTB_TOKEN.findall(text)
    if not toks:
        raise DataError("empty parse string")
    pos = 0

    def parse_node() -> ParseTree:
        nonlocal pos
        if toks[pos] != "(":
            raise DataError(f"expected '(' at token {pos} in parse")
        pos += 1
        if pos >= len(toks):
            raise DataError("unbalanced parse: unexpected end of input")
        label = ""
        if toks[pos] not in ("(", ")"):
            label = toks[pos]
            pos += 1
        items: list[ParseTree | str] = []
        while pos < len(toks) and toks[pos] != ")":
            if toks[pos] == "(":
                items.append(parse_node())
            else:
                items.append(toks[pos])
                pos += 1
        if pos >= len(toks):
            raise DataError("unbalanced parse: missing ')'")
        pos += 1  # consume ')'
        if not items:
            raise DataError(f"empty constituent '({label})' in parse")
        if len(items) == 1 and isinstance(items[0], str):
            return ParseTree(label=label, leaf=items[0])
        # PTB preterminals hold exactly one token; stray bare tokens inside a
        # larger constituent are wrapped so downstream shape logic stays uniform.
        children = tuple(
            it if isinstance(it, ParseTree) else ParseTree(label="", leaf=it)
            for it in items
        )
        return ParseTree(label=label, children=children)

    root = parse_node()
    if pos != len(toks):
        raise DataError("trailing material after the first balanced tree")
    return root


def yngve_depths(tree: ParseTree) -> list[int]:
    """Per-leaf Yngve depth, left to right.

    Walking from the root to a leaf, every traversed node costs as many units
    as it has right siblings; the leaf's depth is the sum of those costs.
    Depends only on tree shape, not on node labels.
    """
    depths: list[int] = []

    def walk(node: ParseTree, acc: int) -> None:
        if node.leaf is not None:
            depths.append(acc)
            return
        last = len(node.children) - 1
        for i, child in enumerate(node.children):
            walk(child, acc + (last - i))

    walk(tree, 0)
    return depths


def yngve_score(tree: ParseTree, aggregate: str = "mean") -> float:
    """Aggregate Yngve depth over the tree's leaves.

    ``aggregate`` is "mean" (default, the usual psycholinguistic convention)
    or "max". A unary chain scores 0.0; left-branching structures score
    higher than their right-branching mirrors.
    """
    depths = yngve_depths(tree)
    if not depths:
        raise StatError("cannot score an empty tree")
    if aggregate == "mean":
        return sum(depths) / len(depths)
    if aggregate == "max":
        return float(max(depths))
    raise ValueError(f"unknown aggregate {aggregate!r} (use 'mean' or 'max')")


# ---------------------------------------------------------------------------
# Stopwords and prompt length
# ---------------------------------------------------------------------------


def load_stopwords(path) -> frozenset[str]:
    """Read a one-word-per-line stopword file (lowercased on load)."""
    with open(path, encoding="utf-8") as fh:
        words = {line.strip().lower() for line in fh if line.strip()}
    if not words:
        raise DataError("stopword file is empty", path=str(path))
    return frozenset(words)


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    """The bundled 179-entry English stopword list."""
    data = resources.files("metric_audit").joinpath("data/stopwords.txt").read_text("utf-8")
    return frozenset(w.strip().lower() for w in data.splitlines() if w.strip())


def prompt_length(text: str, stopwords: frozenset[str] | None = None) -> int:
    """Number of word tokens that are not stopwords (case-insensitive)."""
    if stopwords is None:
        stopwords = default_stopwords()
    return sum(1 for w in tokenize(text).words() if w.lower() not in stopwords)


@dataclass(frozen=True)
class LinguisticProfile:
    """The three per-prompt linguistic measures used by the correlation study."""

    prompt_id: str
    grade_level: float
    yngve: float
    length: int


def linguistic_profile(
    prompt_id: str,
    text: str,
    parse: ParseTree | None,
    stopwords: frozenset[str] | None = None,
    yngve_aggregate: str = "mean",
) -> LinguisticProfile:
    """Bundle grade level, Yngve complexity and length for one prompt.

    ``parse`` may be None when the prompt carries no tree; the Yngve value is
    then NaN so callers can drop it pairwise.
    """
    grade = flesch_kincaid_grade(text)
    yngve = yngve_score(parse, yngve_aggregate) if parse is not None else float("nan")
    return LinguisticProfile(
        prompt_id=prompt_id,
        grade_level=grade,
        yngve=yngve,
        length=prompt_length(text, stopwords),
    )

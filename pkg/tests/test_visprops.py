import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metric_audit.corpus import ClassList, Lexicon
from metric_audit.errors import StatError
from metric_audit.visprops import class_overlap, lexical_mean, visual_profile


def make_lexicon(entries):
    return Lexicon(entries=tuple(entries.items()), min_rating=min(entries.values()))


LEX = make_lexicon({"dog": 4.85, "bear": 4.90, "idea": 1.61, "zorp-floor": 1.04})
LEX_FLOOR = make_lexicon({"dog": 4.85, "floor": 1.04})
NO_STOPS = frozenset()


def test_two_value_mean():
    assert lexical_mean("dog bear", LEX, NO_STOPS) == pytest.approx(4.875)


def test_missing_word_lowest_policy():
    got = lexical_mean("dog zorp", LEX_FLOOR, NO_STOPS, policy="lowest")
    assert got == pytest.approx((4.85 + 1.04) / 2)
    assert got == pytest.approx(2.945)


def test_missing_word_zero_policy():
    got = lexical_mean("dog zorp", LEX_FLOOR, NO_STOPS, policy="zero")
    assert got == pytest.approx(4.85 / 2)


def test_missing_word_omit_policy():
    assert lexical_mean("dog zorp", LEX_FLOOR, NO_STOPS, policy="omit") == pytest.approx(4.85)


def test_error_messages_distinguish_causes():
    with pytest.raises(StatError, match="stopword"):
        lexical_mean("the a", LEX, frozenset({"the", "a"}))
    with pytest.raises(StatError, match="omit"):
        lexical_mean("zorp blarg", LEX, NO_STOPS, policy="omit")


def test_stopwords_excluded_from_mean():
    got = lexical_mean("the dog", LEX, frozenset({"the"}), policy="omit")
    assert got == pytest.approx(4.85)


def test_hyphen_split_before_lookup():
    lex = make_lexicon({"fire": 4.0, "truck": 5.0})
    assert lexical_mean("fire-truck", lex, NO_STOPS) == pytest.approx(4.5)


def test_unknown_policy_rejected():
    with pytest.raises(ValueError):
        lexical_mean("dog", LEX, NO_STOPS, policy="median")


def test_lowest_policy_pulls_mean_below_omit():
    # one missing word, lexicon minimum below the mean of present words
    lo = lexical_mean("dog zorp", LEX_FLOOR, NO_STOPS, policy="lowest")
    om = lexical_mean("dog zorp", LEX_FLOOR, NO_STOPS, policy="omit")
    assert lo < om


CLASSES = ClassList(labels=frozenset({"bear"}), label_tokens=frozenset({"bear"}))


def test_overlap_half():
    assert class_overlap("a big bear", CLASSES, frozenset({"a"})) == 0.5


def test_overlap_zero():
    assert class_overlap("a purple couch", CLASSES, frozenset({"a"})) == 0.0


def test_overlap_multiword_labels_match_tokenwise():
    classes = ClassList(
        labels=frozenset({"grizzly_bear", "grass"}),
        label_tokens=frozenset({"grizzly", "bear", "grass"}),
    )
    assert class_overlap("grizzly bear grass", classes, NO_STOPS) == 1.0


def test_overlap_needs_scorable_tokens():
    with pytest.raises(StatError):
        class_overlap("the the", CLASSES, frozenset({"the"}))


def test_overlap_case_insensitive_and_order_invariant():
    a = class_overlap("Bear big", CLASSES, NO_STOPS)
    b = class_overlap("big bear", CLASSES, NO_STOPS)
    c = class_overlap("BIG BEAR", CLASSES, NO_STOPS)
    assert a == b == c == 0.5


word = st.text(alphabet="abcdefghijklmnopqrstuvwxyz", min_size=1, max_size=8)


@given(tokens=st.lists(word, min_size=1, max_size=10), data=st.data())
@settings(max_examples=100, deadline=None)
def test_overlap_permutation_invariance(tokens, data):
    labels = frozenset(data.draw(st.lists(st.sampled_from(tokens), max_size=5)))
    classes = ClassList(labels=labels, label_tokens=labels)
    text = " ".join(tokens)
    base = class_overlap(text, classes, NO_STOPS)
    perm = data.draw(st.permutations(tokens))
    assert class_overlap(" ".join(perm), classes, NO_STOPS) == pytest.approx(base)


def test_adding_nonmatching_token_strictly_decreases_overlap():
    classes = ClassList(labels=frozenset({"bear"}), label_tokens=frozenset({"bear"}))
    before = class_overlap("bear bear", classes, NO_STOPS)
    after = class_overlap("bear bear couch", classes, NO_STOPS)
    assert before == 1.0
    assert after < before


def test_visual_profile_bundle():
    conc = make_lexicon({"dog": 4.85, "grass": 4.5})
    imag = make_lexicon({"dog": 4.0, "grass": 3.0})
    classes = ClassList(labels=frozenset({"dog"}), label_tokens=frozenset({"dog"}))
    prof = visual_profile("p1", "dog grass", conc, imag, classes, NO_STOPS)
    assert prof.prompt_id == "p1"
    assert prof.concreteness == pytest.approx(4.675)
    assert prof.imageability == pytest.approx(3.5)
    assert prof.class_overlap == 0.5
    assert prof.missing_word_policy == "lowest"
    assert 0.0 <= prof.class_overlap <= 1.0

import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deops.context import (
    BOUNDARY_TOKENS,
    SentenceFilter,
    Side,
    extract_left_contexts,
    extract_right_contexts,
    load_blacklist,
    passing_mask,
    sentence_passes,
)
from deops.corpus import Corpus, Sentence, build_index
from deops.scoring import collect_candidates

from .oracle import naive_contexts, random_corpus

RO = SentenceFilter.romanian()


def corpus_and_index(sentences):
    corpus = Corpus.from_sentences(sentences)
    return corpus, build_index(corpus)


@pytest.mark.parametrize(
    "tokens, filt, expected",
    [
        (("nu", "am", "vreo", "idee"), RO, False),
        (("am", "vreo", "idee"), RO, True),
        (("ai", "vreo", "idee", "?"), RO, False),
        (("n-am", "vreo", "idee"), RO, False),
        (("ai", "vreo", "idee", "?"), SentenceFilter(frozenset({"nu"}), False), True),
        (("nuanta", "vreo"), RO, True),
    ],
)
def test_sentence_passes(tokens, filt, expected):
    assert sentence_passes(Sentence(0, tokens), filt) is expected


def test_prefix_forms():
    filt = SentenceFilter(frozenset({"nu", "n-", "fără"}))
    assert filt.exact == {"nu", "fără"}
    assert filt.prefixes == ("n-",)


def test_load_blacklist(tmp_path):
    path = tmp_path / "bl.txt"
    path.write_text("# well-known\nNot\nn't\n\nn-\n", encoding="utf-8")
    assert load_blacklist(path) == {"not", "n't", "n-"}


def test_passing_mask_matches_sentence_passes():
    sentences = random_corpus(np.random.default_rng(3))
    corpus = Corpus.from_sentences(sentences)
    filt = SentenceFilter(frozenset({"t1", "n-"}), True)
    mask = passing_mask(corpus, filt)
    assert mask.tolist() == [sentence_passes(s, filt) for s in corpus]


def test_left_context_stops_at_comma():
    corpus, index = corpus_and_index([["he", "said", ",", "she", "doubts", "any", "claim"]])
    (span,) = extract_left_contexts(corpus, index, {"any"})
    assert span.tokens == ("she", "doubts")
    assert span.side is Side.LEFT
    assert (span.trigger, span.trigger_pos) == ("any", 5)
    assert list(span.span) == [3, 4]


def test_left_context_at_sentence_start_is_empty():
    corpus, index = corpus_and_index([["any", "apples"]])
    (span,) = extract_left_contexts(corpus, index, {"any"})
    assert span.tokens == ()


def test_left_contexts_toy(toy_corpus, toy_index):
    spans = extract_left_contexts(toy_corpus, toy_index, {"any"})
    assert [s.tokens for s in spans] == [("he", "denied"), ("she", "doubts")]


def test_left_contexts_respect_filter():
    corpus, index = corpus_and_index([
        ["nu", "am", "vreo", "idee"],
        ["am", "vreo", "idee"],
        ["ai", "vreo", "idee", "?"],
    ])
    spans = extract_left_contexts(corpus, index, {"vreo"}, RO)
    assert [(s.sentence_id, s.tokens) for s in spans] == [(1, ("am",))]


def test_right_context_stops_at_comma():
    corpus, index = corpus_and_index([["she", "doubts", "any", "claim", ",", "he", "said"]])
    (span,) = extract_right_contexts(corpus, index, {"doubts"})
    assert span.tokens == ("any", "claim")


def test_right_context_period_is_not_a_candidate():
    corpus, index = corpus_and_index([["he", "denied", "."]])
    (span,) = extract_right_contexts(corpus, index, {"denied"})
    assert span.tokens == (".",)
    assert collect_candidates([span]) == {}


def test_right_contexts_toy(toy_corpus, toy_index):
    spans = extract_right_contexts(toy_corpus, toy_index, {"denied"})
    assert [s.tokens for s in spans] == [("any", "wrongdoing"), ("the", "report")]


def test_right_contexts_unfiltered_by_default():
    corpus, index = corpus_and_index([["nu", "a", "negat", "orice"]])
    assert len(extract_right_contexts(corpus, index, {"negat"})) == 1
    assert extract_right_contexts(corpus, index, {"negat"}, RO) == []


def test_multiple_triggers_in_one_sentence():
    corpus, index = corpus_and_index([["x", "any", "y", "ever", "z"]])
    spans = extract_left_contexts(corpus, index, ["any", "ever"])
    assert [s.tokens for s in spans] == [("x",), ("x", "any", "y")]


def test_absent_trigger_warns(toy_corpus, toy_index, caplog):
    with caplog.at_level(logging.WARNING):
        spans = extract_left_contexts(toy_corpus, toy_index, ["any", "vreun"])
    assert len(spans) == 2
    assert "vreun" in caplog.text


def test_empty_trigger_set_rejected(toy_corpus, toy_index):
    with pytest.raises(ValueError):
        extract_left_contexts(toy_corpus, toy_index, [])


def check_span_invariants(corpus, spans, triggers, filt):
    for span in spans:
        toks = corpus.sentence(span.sentence_id).tokens
        assert toks[span.trigger_pos] == span.trigger
        assert span.tokens == toks[span.start:span.stop]
        assert not set(span.tokens) & BOUNDARY_TOKENS
        if span.side is Side.LEFT:
            assert span.stop == span.trigger_pos
            assert span.start == 0 or toks[span.start - 1] in BOUNDARY_TOKENS
        else:
            assert span.start == span.trigger_pos + 1
            assert span.stop == len(toks) or toks[span.stop] in BOUNDARY_TOKENS


sentence_lists = st.lists(
    st.lists(st.sampled_from(["a", "b", "c", ",", ";", "?", "nu", "n-a"]), min_size=1, max_size=10),
    min_size=1,
    max_size=25,
)


@given(sentence_lists, st.sets(st.sampled_from(["a", "b", "c", ",", "nu"]), min_size=1), st.booleans())
@settings(max_examples=150)
def test_contexts_match_oracle(sentences, triggers, questions):
    corpus, index = corpus_and_index(sentences)
    filt = SentenceFilter(frozenset({"nu", "n-"}), questions)
    left = extract_left_contexts(corpus, index, triggers, filt)
    right = extract_right_contexts(corpus, index, triggers)
    expect_left = naive_contexts(sentences, triggers, "LEFT", filt.blacklist_tokens, questions)
    expect_right = naive_contexts(sentences, triggers, "RIGHT")
    assert [(s.sentence_id, s.trigger_pos, s.tokens) for s in left] == expect_left
    assert [(s.sentence_id, s.trigger_pos, s.tokens) for s in right] == expect_right
    check_span_invariants(corpus, left, triggers, filt)
    check_span_invariants(corpus, right, triggers, None)
    passing = sum(sentence_passes(s, filt) * sum(t in triggers for t in s.tokens) for s in corpus)
    assert len(left) == passing
    assert len(right) == sum(t in triggers for s in sentences for t in s)

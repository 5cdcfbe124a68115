"""NPI contexts (left of a clue) and DE contexts (right of an operator).

A context runs from the trigger to the nearest comma or semicolon on one
side, or to the sentence edge. Sentence filtering drops sentences that hold
a well-known DE operator or a question mark, so that the left-context
search has to find operators other than the obvious ones.
"""

import enum
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

BOUNDARY_TOKENS = frozenset({",", ";"})
QUESTION_TOKEN = "?"


class Side(str, enum.Enum):
    LEFT = "LEFT"
    RIGHT = "RIGHT"


@dataclass(frozen=True)
class ContextSpan:
    """One context: ``tokens`` are the sentence tokens at ``start:stop``."""

    sentence_id: int
    trigger: str
    trigger_pos: int
    side: Side
    start: int
    stop: int
    tokens: tuple

    @property
    def span(self):
        return range(self.start, self.stop)


@dataclass(frozen=True)
class SentenceFilter:
    """Blacklist of well-known DE operators plus an optional question filter.

    Blacklist entries ending in ``-`` are prefix forms: ``n-`` blocks
    ``n-am``, ``n-a`` and so on. Other entries match exactly.
    """

    blacklist_tokens: frozenset = frozenset()
    filter_questions: bool = False

    @property
    def exact(self):
        return frozenset(t for t in self.blacklist_tokens if not t.endswith("-"))

    @property
    def prefixes(self):
        return tuple(sorted(t for t in self.blacklist_tokens if t.endswith("-")))

    def blocks(self, token):
        if token in self.blacklist_tokens:
            return True
        if self.filter_questions and token == QUESTION_TOKEN:
            return True
        return any(token.startswith(p) for p in self.prefixes)

    @classmethod
    def romanian(cls):
        """Negations ``nu`` and ``n-`` plus questions."""
        return cls(frozenset({"nu", "n-"}), True)

    @classmethod
    def from_file(cls, path, filter_questions=False):
        return cls(load_blacklist(path), filter_questions)

    def as_dict(self):
        return {
            "blacklist": sorted(self.blacklist_tokens),
            "filter_questions": self.filter_questions,
        }


NO_FILTER = SentenceFilter()


def load_blacklist(path):
    """One token per line; blank lines and ``#`` comments are ignored."""
    tokens = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            tokens.add(line.lower())
    return frozenset(tokens)


def sentence_passes(sentence, sentence_filter):
    """False when the sentence holds a blacklisted token (or a ``?``, if filtered)."""
    return not any(sentence_filter.blocks(tok) for tok in sentence.tokens)


def passing_mask(corpus, sentence_filter):
    """Boolean array over sentence ids, vectorized :func:`sentence_passes`."""
    mask = np.ones(corpus.sentence_count, dtype=bool)
    if sentence_filter is None:
        return mask
    bad = [i for i, tok in enumerate(corpus.vocab) if sentence_filter.blocks(tok)]
    if bad:
        hits = np.flatnonzero(np.isin(corpus.token_ids, np.asarray(bad, dtype=np.int32)))
        mask[corpus.sentence_ids(hits)] = False
    return mask


def _trigger_positions(corpus, index, triggers):
    triggers = list(dict.fromkeys(triggers))
    if not triggers:
        raise ValueError("at least one trigger token is required")
    chunks = []
    for tok in triggers:
        tid = corpus.token_id(tok)
        if tid is None:
            logger.warning("trigger %r does not occur in the corpus", tok)
            continue
        chunks.append(index.positions(tid))
    if not chunks:
        return np.zeros(0, dtype=np.int64)
    return np.sort(np.concatenate(chunks).astype(np.int64))


def _boundary_positions(corpus, boundaries):
    ids = [corpus.token_id(t) for t in boundaries]
    ids = [i for i in ids if i is not None]
    if not ids:
        return np.zeros(0, dtype=np.int64)
    return np.flatnonzero(np.isin(corpus.token_ids, np.asarray(ids, dtype=np.int32)))


def _extract(corpus, index, triggers, side, sentence_filter, boundaries):
    positions = _trigger_positions(corpus, index, triggers)
    sids = corpus.sentence_ids(positions)
    if sentence_filter is not None:
        keep = passing_mask(corpus, sentence_filter)[sids]
        positions, sids = positions[keep], sids[keep]
    offsets = corpus.offsets
    sent_start = offsets[sids]
    bounds = _boundary_positions(corpus, boundaries)
    if side is Side.LEFT:
        j = np.searchsorted(bounds, positions, side="left")
        prev = np.where(j > 0, bounds[np.maximum(j - 1, 0)] if len(bounds) else -1, -1)
        lo = np.maximum(prev + 1, sent_start)
        hi = positions
    else:
        j = np.searchsorted(bounds, positions, side="right")
        sent_stop = offsets[sids + 1]
        if len(bounds):
            nxt = np.where(j < len(bounds), bounds[np.minimum(j, len(bounds) - 1)], sent_stop)
        else:
            nxt = sent_stop
        lo = positions + 1
        hi = np.minimum(nxt, sent_stop)

    vocab = corpus.vocab
    ids = corpus.token_ids
    spans = []
    for sid, p, a, b, base in zip(sids.tolist(), positions.tolist(), lo.tolist(), hi.tolist(), sent_start.tolist()):
        spans.append(ContextSpan(
            sentence_id=sid,
            trigger=vocab[ids[p]],
            trigger_pos=p - base,
            side=side,
            start=a - base,
            stop=b - base,
            tokens=tuple(vocab[t] for t in ids[a:b].tolist()),
        ))
    return spans


def extract_left_contexts(corpus, index, triggers, sentence_filter=NO_FILTER, boundaries=BOUNDARY_TOKENS):
    """NPI contexts: one span per trigger occurrence in a passing sentence.

    Each span covers the tokens between the nearest preceding boundary (or
    the sentence start) and the trigger. Empty spans are kept. Spans are
    ordered by sentence id, then position.
    """
    return _extract(corpus, index, triggers, Side.LEFT, sentence_filter, boundaries)


def extract_right_contexts(corpus, index, triggers, sentence_filter=None, boundaries=BOUNDARY_TOKENS):
    """DE contexts: tokens after each trigger up to the next boundary or sentence end.

    No sentence filter is applied unless one is passed explicitly.
    """
    return _extract(corpus, index, triggers, Side.RIGHT, sentence_filter, boundaries)

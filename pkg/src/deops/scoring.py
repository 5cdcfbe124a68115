"""Candidate collection and ratio scoring.

A candidate ``x`` is scored by how much more often it shows up in the
contexts of interest than in the corpus at large::

    score(x) = (contexts containing x / all contexts) / rel_freq(x)

The same routine ranks DE-operator candidates (over NPI contexts) and
pseudo-NPI candidates (over DE contexts).
"""

import enum
import unicodedata
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .errors import NoContextsError

TSV_HEADER = ("rank", "token", "score", "context_hits", "context_total", "rel_freq")


class RelFreqMode(str, enum.Enum):
    SENTENCE = "sentence"  # containment(x) / sentence_count
    TOKEN = "token"  # occurrences(x) / token_total


def is_punctuation(token):
    return all(unicodedata.category(ch).startswith("P") for ch in token)


@dataclass(frozen=True)
class RankedCandidate:
    token: str
    context_hits: int
    context_total: int
    freq_count: int
    freq_total: int

    @property
    def rel_freq(self):
        return self.freq_count / self.freq_total

    @property
    def exact_score(self):
        return Fraction(self.context_hits * self.freq_total, self.context_total * self.freq_count)

    @property
    def score(self):
        # one rounding step from exact integers
        return (self.context_hits * self.freq_total) / (self.context_total * self.freq_count)


def collect_candidates(spans, exclusions=frozenset(), min_context_count=1):
    """Count, for each token, the number of spans containing it.

    A token counts once per span however often it repeats there.
    Punctuation and ``exclusions`` are dropped, as are tokens seen in fewer
    than ``min_context_count`` spans.
    """
    hits = Counter()
    for span in spans:
        hits.update(set(span.tokens))
    return {
        tok: n
        for tok, n in hits.items()
        if n >= min_context_count and tok not in exclusions and not is_punctuation(tok)
    }


def _rank_key(cand):
    return (-cand.exact_score, -cand.context_hits, cand.token)


def score_candidates(candidates, context_total, index, relfreq_mode=RelFreqMode.SENTENCE):
    """Turn a ``token -> context_hits`` mapping into a ranked list.

    Sorted by score descending; ties go to more context hits, then to the
    lexicographically smaller token.
    """
    if context_total <= 0:
        raise NoContextsError("no contexts to score against")
    mode = RelFreqMode(relfreq_mode)
    ranked = []
    for tok, hits in candidates.items():
        if mode is RelFreqMode.SENTENCE:
            count, total = index.containment(tok), index.sentence_count
        else:
            count, total = index.occurrences(tok), index.token_total
        if count == 0:
            raise KeyError(f"candidate {tok!r} is not in the index")
        ranked.append(RankedCandidate(tok, int(hits), int(context_total), count, total))
    ranked.sort(key=_rank_key)
    return ranked


def rank_spans(spans, index, exclusions=frozenset(), relfreq_mode=RelFreqMode.SENTENCE, min_context_count=1):
    """Collect and score in one go; the span count is the context total."""
    candidates = collect_candidates(spans, exclusions, min_context_count)
    return score_candidates(candidates, len(spans), index, relfreq_mode)


def write_ranking(ranked, path):
    """TSV with a header row; floats are written with full round-trip precision."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(TSV_HEADER) + "\n")
        for rank, c in enumerate(ranked, 1):
            row = (rank, c.token, repr(c.score), c.context_hits, c.context_total, repr(c.rel_freq))
            fh.write("\t".join(map(str, row)) + "\n")


def read_ranking(path):
    """Tokens of a ranking TSV, in rank order."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if tuple(header[:2]) != TSV_HEADER[:2]:
            raise ValueError(f"{path}: not a ranking file (bad header)")
        return [line.split("\t")[1] for line in fh if line.strip()]

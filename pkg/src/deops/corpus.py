"""Sentence-per-line corpora, tokenization, and the occurrence index.

A :class:`Corpus` stores every token occurrence as an integer id in one flat
``int32`` array, with sentence boundaries given by an ``offsets`` array.
:class:`CorpusIndex` adds the per-token statistics the scorers need:
occurrence counts, sentence containment counts, and postings.
"""

import hashlib
import json
import logging
import re
import unicodedata
from array import array
from collections.abc import Sequence
from dataclasses import asdict, dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import CacheError, EmptyCorpusError, IngestError

logger = logging.getLogger(__name__)

#: Characters always split off as standalone tokens.
DELIMITER_CHARS = ",;.?!"

CACHE_FORMAT = 1


@dataclass(frozen=True)
class TokenizerConfig:
    lowercase: bool = True
    split_chars: str = DELIMITER_CHARS
    unicode_form: str | None = "NFC"

    def as_dict(self):
        return asdict(self)


DEFAULT_TOKENIZER = TokenizerConfig()


@lru_cache(maxsize=None)
def _split_pattern(chars):
    return re.compile("[" + re.escape(chars) + "]") if chars else None


def tokenize(line, config=DEFAULT_TOKENIZER):
    """Split one line of raw text into normalized tokens.

    Whitespace separates tokens, every character of ``config.split_chars``
    becomes a token of its own, and text is lowercased. Diacritics are kept
    as they are (only canonical Unicode composition is applied).

    >>> tokenize("He said, she doubts any claim.")
    ['he', 'said', ',', 'she', 'doubts', 'any', 'claim', '.']
    """
    if config.unicode_form:
        line = unicodedata.normalize(config.unicode_form, line)
    if config.lowercase:
        line = line.lower()
    pattern = _split_pattern(config.split_chars)
    if pattern is not None:
        line = pattern.sub(r" \g<0> ", line)
    return line.split()


@dataclass(frozen=True)
class Sentence:
    id: int
    tokens: tuple


class _SentenceView(Sequence):
    def __init__(self, corpus):
        self._corpus = corpus

    def __len__(self):
        return self._corpus.sentence_count

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self._corpus.sentence(j) for j in range(*i.indices(len(self)))]
        return self._corpus.sentence(i)


class Corpus:
    """An immutable, tokenized corpus.

    Parameters
    ----------
    vocab : sequence of str
        Token surface forms; the position of a token is its id.
    token_ids : array of int
        Every token occurrence, sentences concatenated in order.
    offsets : array of int
        ``offsets[i]:offsets[i + 1]`` delimits sentence ``i`` in ``token_ids``.
    source_digest : str
        SHA-256 hex digest of the raw input.
    tokenizer_config : TokenizerConfig
    """

    def __init__(self, vocab, token_ids, offsets, source_digest, tokenizer_config=DEFAULT_TOKENIZER):
        self.vocab = tuple(vocab)
        self.token_ids = np.ascontiguousarray(token_ids, dtype=np.int32)
        self.offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        self.source_digest = source_digest
        self.tokenizer_config = tokenizer_config
        if len(self.offsets) < 2:
            raise EmptyCorpusError("corpus has no sentences")
        if self.offsets[0] != 0 or self.offsets[-1] != len(self.token_ids):
            raise ValueError("offsets do not cover token_ids")
        if np.any(np.diff(self.offsets) <= 0):
            raise ValueError("every sentence must contain at least one token")
        self.token_ids.flags.writeable = False
        self.offsets.flags.writeable = False
        self._ids = {tok: i for i, tok in enumerate(self.vocab)}

    @classmethod
    def from_sentences(cls, sentences, tokenizer_config=DEFAULT_TOKENIZER):
        """Build a corpus from already-tokenized sentences (empty ones are skipped).

        The digest is computed over the space-joined, newline-terminated lines,
        i.e. the text :func:`write_corpus` would produce.
        """
        builder = _Builder()
        digest = hashlib.sha256()
        for tokens in sentences:
            tokens = list(tokens)
            if tokens:
                digest.update((" ".join(tokens) + "\n").encode("utf-8"))
                builder.add(tokens)
        return builder.finish(digest.hexdigest(), tokenizer_config)

    @property
    def sentence_count(self):
        return len(self.offsets) - 1

    @property
    def token_total(self):
        return len(self.token_ids)

    @property
    def sentences(self):
        return _SentenceView(self)

    def __len__(self):
        return self.sentence_count

    def __iter__(self):
        for i in range(self.sentence_count):
            yield self.sentence(i)

    def sentence(self, i):
        if i < 0:
            i += self.sentence_count
        if not 0 <= i < self.sentence_count:
            raise IndexError(f"sentence id {i} out of range")
        ids = self.token_ids[self.offsets[i]:self.offsets[i + 1]]
        return Sentence(i, tuple(self.vocab[j] for j in ids.tolist()))

    def token_id(self, token):
        """Id of ``token``, or None when it never occurs."""
        return self._ids.get(token)

    def sentence_ids(self, positions):
        """Map flat token positions to sentence ids."""
        return np.searchsorted(self.offsets, positions, side="right") - 1


class _Builder:
    def __init__(self):
        self.index = {}
        self.vocab = []
        self.ids = array("i")
        self.offsets = array("q", [0])

    def add(self, tokens):
        index, vocab = self.index, self.vocab
        row = []
        for tok in tokens:
            i = index.get(tok)
            if i is None:
                i = index[tok] = len(vocab)
                vocab.append(tok)
            row.append(i)
        self.ids.extend(row)
        self.offsets.append(len(self.ids))

    def finish(self, digest, config):
        if len(self.offsets) < 2:
            raise EmptyCorpusError("input contains no non-empty lines")
        return Corpus(
            self.vocab,
            np.frombuffer(self.ids, dtype=np.int32) if self.ids else np.zeros(0, np.int32),
            np.frombuffer(self.offsets, dtype=np.int64),
            digest,
            config,
        )


def ingest(stream, config=DEFAULT_TOKENIZER):
    """Read a sentence-per-line stream into a :class:`Corpus`.

    ``stream`` may yield ``bytes`` (decoded as UTF-8, the normal case) or
    ``str``. Blank lines are skipped; sentence ids follow input order.
    """
    builder = _Builder()
    digest = hashlib.sha256()
    for lineno, raw in enumerate(stream, 1):
        if isinstance(raw, str):
            text = raw
            digest.update(raw.encode("utf-8"))
        else:
            digest.update(raw)
            try:
                text = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise IngestError(f"invalid UTF-8 ({exc.reason})", lineno) from exc
        if lineno == 1:
            text = text.lstrip("\ufeff")
        tokens = tokenize(text, config)
        if tokens:
            builder.add(tokens)
    return builder.finish(digest.hexdigest(), config)


def read_corpus(path, config=DEFAULT_TOKENIZER):
    with open(path, "rb") as fh:
        return ingest(fh, config)


def write_corpus(corpus, path):
    """Write one space-joined sentence per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sentence in corpus:
            fh.write(" ".join(sentence.tokens) + "\n")


def file_digest(path, chunk_size=1 << 20):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        while chunk := fh.read(chunk_size):
            digest.update(chunk)
    return digest.hexdigest()


class CorpusIndex:
    """Per-token statistics over a :class:`Corpus`.

    ``occurrence_counts[t]`` and ``containment_counts[t]`` are indexed by
    token id. Postings are kept as one array of flat positions sorted by
    (token id, position), sliced per token by ``posting_starts``.
    """

    def __init__(self, corpus, occurrence_counts, containment_counts, posting_positions, posting_starts):
        self.corpus = corpus
        self.occurrence_counts = occurrence_counts
        self.containment_counts = containment_counts
        self.posting_positions = posting_positions
        self.posting_starts = posting_starts
        for arr in (occurrence_counts, containment_counts, posting_positions, posting_starts):
            arr.flags.writeable = False

    @property
    def sentence_count(self):
        return self.corpus.sentence_count

    @property
    def token_total(self):
        return self.corpus.token_total

    @property
    def source_digest(self):
        return self.corpus.source_digest

    def occurrences(self, token):
        i = self.corpus.token_id(token)
        return 0 if i is None else int(self.occurrence_counts[i])

    def containment(self, token):
        """Number of distinct sentences containing ``token``."""
        i = self.corpus.token_id(token)
        return 0 if i is None else int(self.containment_counts[i])

    def positions(self, token_id):
        """Flat positions of every occurrence of ``token_id``, ascending."""
        return self.posting_positions[self.posting_starts[token_id]:self.posting_starts[token_id + 1]]

    def postings(self, token):
        """Ordered ``(sentence id, position)`` pairs for ``token``."""
        i = self.corpus.token_id(token)
        if i is None:
            return []
        flat = self.positions(i).astype(np.int64)
        sids = self.corpus.sentence_ids(flat)
        pos = flat - self.corpus.offsets[sids]
        return list(zip(sids.tolist(), pos.tolist()))

    def tokens(self):
        return self.corpus.vocab

    def __eq__(self, other):
        if not isinstance(other, CorpusIndex):
            return NotImplemented
        return (
            self.corpus.source_digest == other.corpus.source_digest
            and self.corpus.vocab == other.corpus.vocab
            and np.array_equal(self.corpus.token_ids, other.corpus.token_ids)
            and np.array_equal(self.corpus.offsets, other.corpus.offsets)
            and np.array_equal(self.occurrence_counts, other.occurrence_counts)
            and np.array_equal(self.containment_counts, other.containment_counts)
            and np.array_equal(self.posting_positions, other.posting_positions)
            and np.array_equal(self.posting_starts, other.posting_starts)
        )

    __hash__ = None


def _shard_counts(corpus, lo, hi):
    # counts for sentences lo..hi-1
    vocab_size = len(corpus.vocab)
    start, stop = corpus.offsets[lo], corpus.offsets[hi]
    ids = corpus.token_ids[start:stop].astype(np.int64)
    occ = np.bincount(ids, minlength=vocab_size)
    lengths = np.diff(corpus.offsets[lo:hi + 1])
    sids = np.repeat(np.arange(hi - lo, dtype=np.int64), lengths)
    keys = np.unique(sids * vocab_size + ids)
    cont = np.bincount(keys % vocab_size, minlength=vocab_size)
    return occ, cont


def build_index(corpus, shards=None):
    """Compute occurrence, containment and posting statistics for ``corpus``.

    Counting is done over ``shards`` contiguous sentence ranges and summed;
    the result does not depend on the shard count.
    """
    n = corpus.sentence_count
    if shards is None:
        shards = max(1, corpus.token_total // 4_000_000)
    shards = max(1, min(int(shards), n))
    bounds = np.linspace(0, n, shards + 1).astype(np.int64)
    vocab_size = len(corpus.vocab)
    occurrences = np.zeros(vocab_size, dtype=np.int64)
    containment = np.zeros(vocab_size, dtype=np.int64)
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        if hi > lo:
            occ, cont = _shard_counts(corpus, int(lo), int(hi))
            occurrences += occ
            containment += cont
    pos_dtype = np.int32 if corpus.token_total < 2**31 else np.int64
    order = np.argsort(corpus.token_ids, kind="stable").astype(pos_dtype)
    starts = np.zeros(vocab_size + 1, dtype=np.int64)
    np.cumsum(occurrences, out=starts[1:])
    return CorpusIndex(corpus, occurrences, containment, order, starts)


def _cache_key(digest, config):
    return {"format": CACHE_FORMAT, "source_digest": digest, "tokenizer": config.as_dict()}


def _text_array(text):
    return np.frombuffer(text.encode("utf-8"), dtype=np.uint8)


def save_index(index, path):
    """Persist a corpus and its index as an uncompressed ``.npz`` file."""
    corpus = index.corpus
    key = _cache_key(corpus.source_digest, corpus.tokenizer_config)
    with open(path, "wb") as fh:
        np.savez(
            fh,
            key=_text_array(json.dumps(key, sort_keys=True)),
            vocab=_text_array("\n".join(corpus.vocab)),
            token_ids=corpus.token_ids,
            offsets=corpus.offsets,
            occurrences=index.occurrence_counts,
            containment=index.containment_counts,
            posting_positions=index.posting_positions,
            posting_starts=index.posting_starts,
        )


def load_index(path, source_digest=None, config=None):
    """Load an index written by :func:`save_index`.

    When ``source_digest``/``config`` are given the cache key must match
    them, otherwise :class:`CacheError` is raised.
    """
    try:
        with np.load(path, allow_pickle=False) as data:
            arrays = {name: data[name] for name in data.files}
        key = json.loads(arrays["key"].tobytes().decode("utf-8"))
        vocab_text = arrays["vocab"].tobytes().decode("utf-8")
    except (OSError, ValueError, KeyError, EOFError) as exc:
        raise CacheError(f"unreadable index cache {path}: {exc}") from exc
    if key.get("format") != CACHE_FORMAT:
        raise CacheError(f"index cache {path} has unsupported format {key.get('format')}")
    tok_config = TokenizerConfig(**key["tokenizer"])
    if source_digest is not None and key["source_digest"] != source_digest:
        raise CacheError(f"index cache {path} was built from different input")
    if config is not None and tok_config != config:
        raise CacheError(f"index cache {path} was built with another tokenizer config")
    try:
        corpus = Corpus(
            vocab_text.split("\n") if vocab_text else [],
            arrays["token_ids"],
            arrays["offsets"],
            key["source_digest"],
            tok_config,
        )
        index = CorpusIndex(
            corpus,
            arrays["occurrences"],
            arrays["containment"],
            arrays["posting_positions"],
            arrays["posting_starts"],
        )
    except (KeyError, ValueError, EmptyCorpusError) as exc:
        raise CacheError(f"corrupt index cache {path}: {exc}") from exc
    n = len(corpus.vocab)
    if (
        len(index.occurrence_counts) != n
        or len(index.containment_counts) != n
        or len(index.posting_starts) != n + 1
        or len(index.posting_positions) != corpus.token_total
    ):
        raise CacheError(f"corrupt index cache {path}: inconsistent array sizes")
    return index


def load_or_build(corpus_path, cache_path=None, config=DEFAULT_TOKENIZER):
    """Return ``(index, cache_hit)`` for a corpus file, reusing a valid cache.

    A cache that is missing, corrupt or keyed to other input is rebuilt
    (with a warning in the latter two cases) and rewritten.
    """
    if cache_path is not None and Path(cache_path).exists():
        digest = file_digest(corpus_path)
        try:
            return load_index(cache_path, digest, config), True
        except CacheError as exc:
            logger.warning("%s; rebuilding", exc)
    index = build_index(read_corpus(corpus_path, config))
    if cache_path is not None:
        save_index(index, cache_path)
    return index, False

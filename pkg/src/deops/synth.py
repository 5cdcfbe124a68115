"""Synthetic corpora with planted DE operators and pseudo-NPIs.

Operator sentences look like ``prefix OP gap [PNPI] suffix .`` where the
pseudo-NPI appears with probability ``q`` and is drawn from the operator's
linked pNPIs. Links form a ring: operator ``i`` links to pNPIs
``i, i+1, ..., i+links_per_operator-1`` (mod the pNPI count), so a small
seed reaches only some operators directly and the rest must be found
through newly learned pNPIs. Background sentences are Zipf-distributed
filler that occasionally contains a pNPI outside any operator's scope.
"""

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .corpus import Corpus
from .errors import SynthSpecError
from .evaluation import GoldLabelSet, Label

_POOL_CHUNK = 1 << 18


@dataclass(frozen=True)
class SynthSpec:
    rng_seed: int = 0
    sentence_count: int = 100_000
    n_operators: int = 20
    n_pnpis: int = 12
    background_vocab: int = 2000
    zipf_exponent: float = 1.0
    seed_size: int = 2
    q: float = 0.7
    operator_rate: float = 0.2
    links_per_operator: int = 2
    seed_covers_all: bool = False
    pnpi_noise: float = 0.05
    comma_rate: float = 0.3
    max_prefix: int = 3
    max_gap: int = 2
    max_suffix: int = 3
    background_length: tuple = (4, 10)

    def __post_init__(self):
        object.__setattr__(self, "background_length", tuple(self.background_length))
        if self.n_operators < 1 or self.n_pnpis < 1:
            raise SynthSpecError("need at least one planted operator and one pNPI")
        if not 1 <= self.seed_size <= self.n_pnpis:
            raise SynthSpecError(f"seed_size must be in 1..{self.n_pnpis}")
        if not 0 < self.q <= 1:
            raise SynthSpecError(f"q must be in (0, 1], got {self.q}")
        if not 0 < self.operator_rate <= 1:
            raise SynthSpecError(f"operator_rate must be in (0, 1], got {self.operator_rate}")
        if not 1 <= self.links_per_operator <= self.n_pnpis:
            raise SynthSpecError("links_per_operator must be in 1..n_pnpis")
        for name in ("pnpi_noise", "comma_rate"):
            if not 0 <= getattr(self, name) <= 1:
                raise SynthSpecError(f"{name} must be in [0, 1]")
        lo, hi = self.background_length
        if not 1 <= lo <= hi:
            raise SynthSpecError("background_length must be (min, max) with 1 <= min <= max")
        if self.sentence_count < 1 or self.background_vocab < 1:
            raise SynthSpecError("sentence_count and background_vocab must be positive")
        if min(self.max_prefix, self.max_gap, self.max_suffix) < 0:
            raise SynthSpecError("length bounds must be non-negative")

    @property
    def operators(self):
        return [f"op{i:02d}" for i in range(self.n_operators)]

    @property
    def pnpis(self):
        return [f"pn{i:02d}" for i in range(self.n_pnpis)]

    @property
    def background(self):
        width = len(str(self.background_vocab - 1))
        return [f"w{i:0{width}d}" for i in range(self.background_vocab)]

    @property
    def seed_tokens(self):
        return self.pnpis[:self.seed_size]

    def links(self):
        """pNPI indices linked to each operator."""
        if self.seed_covers_all:
            return [list(range(self.seed_size)) for _ in range(self.n_operators)]
        return [
            [(i + j) % self.n_pnpis for j in range(self.links_per_operator)]
            for i in range(self.n_operators)
        ]

    def as_dict(self):
        d = asdict(self)
        d["background_length"] = list(self.background_length)
        return d

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise SynthSpecError(f"unknown spec fields: {', '.join(sorted(unknown))}")
        return cls(**data)

    @classmethod
    def from_file(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def generate_sentences(spec):
    """Token lists of the synthetic corpus (deterministic in ``spec.rng_seed``)."""
    sentence_seq, background_seq = np.random.SeedSequence(spec.rng_seed).spawn(2)
    rng = np.random.default_rng(sentence_seq)
    bg_rng = np.random.default_rng(background_seq)
    ops, pnpis, bg = spec.operators, spec.pnpis, spec.background
    links = spec.links()
    weights = 1.0 / np.arange(1, len(bg) + 1) ** spec.zipf_exponent
    weights /= weights.sum()
    lo, hi = spec.background_length
    pool, cursor = [], 0

    def draw(n):
        nonlocal pool, cursor
        if cursor + n > len(pool):
            fresh = bg_rng.choice(len(bg), size=max(n, _POOL_CHUNK), p=weights)
            pool = pool[cursor:] + [bg[i] for i in fresh.tolist()]
            cursor = 0
        out = pool[cursor:cursor + n]
        cursor += n
        return out

    sentences = []
    for _ in range(spec.sentence_count):
        if rng.random() < spec.operator_rate:
            o = int(rng.integers(spec.n_operators))
            prefix = draw(int(rng.integers(spec.max_prefix + 1)))
            gap = draw(int(rng.integers(spec.max_gap + 1)))
            suffix = draw(int(rng.integers(spec.max_suffix + 1)))
            words = prefix + [ops[o]] + gap
            if rng.random() < spec.q:
                words.append(pnpis[links[o][int(rng.integers(len(links[o])))]])
            tail = len(words)
            words += suffix
            if rng.random() < spec.comma_rate:
                # before the operator or after the pNPI, never between them
                if prefix and (not suffix or rng.random() < 0.5):
                    words.insert(int(rng.integers(1, len(prefix) + 1)), ",")
                elif suffix:
                    words.insert(int(rng.integers(tail, len(words))), ",")
        else:
            words = draw(int(rng.integers(lo, hi + 1)))
            if rng.random() < spec.pnpi_noise:
                words.insert(int(rng.integers(len(words) + 1)), pnpis[int(rng.integers(spec.n_pnpis))])
            if len(words) >= 2 and rng.random() < spec.comma_rate:
                words.insert(int(rng.integers(1, len(words))), ",")
        words.append(".")
        sentences.append(words)
    return sentences


def generate_synthetic_corpus(spec):
    """Return ``(Corpus, GoldLabelSet)``: planted operators are DE, all else NOT_DE."""
    corpus = Corpus.from_sentences(generate_sentences(spec))
    labels = {tok: Label.NOT_DE for tok in corpus.vocab if tok not in (".", ",")}
    for op in spec.operators:
        labels[op] = Label.DE
    return corpus, GoldLabelSet(labels)

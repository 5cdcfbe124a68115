"""Iterative co-learning of DE operators and pseudo-NPIs.

Each iteration ``t``:

1. *DE learning*: rank DE-operator candidates from the left contexts of the
   current clue set (seed NPIs plus learned pseudo-NPIs).
2. *pNPI learning*: take the top ``n`` operators, rank pseudo-NPI
   candidates from their right contexts, append the best ``n_r`` new ones
   to the clue set and increment ``n``.

Iteration 0 is the plain seed-only DE ranking; ``iterations`` further
rounds follow.
"""

import json
import logging
import platform
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .context import NO_FILTER, SentenceFilter, extract_left_contexts, extract_right_contexts
from .corpus import build_index
from .errors import ConfigError, SeedCoverageError
from .scoring import RelFreqMode, rank_spans, write_ranking

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
PNPI_NAME = "pnpis.tsv"


@dataclass(frozen=True)
class CoLearnConfig:
    n0: int = 10
    n_r: int = 1
    iterations: int = 9
    relfreq_mode: RelFreqMode = RelFreqMode.SENTENCE
    min_context_count: int = 1
    filter_de_contexts: bool = False

    def __post_init__(self):
        object.__setattr__(self, "relfreq_mode", RelFreqMode(self.relfreq_mode))
        if self.n0 < 1:
            raise ConfigError(f"n0 must be >= 1, got {self.n0}")
        if self.n_r < 1:
            raise ConfigError(f"n_r must be >= 1, got {self.n_r}")
        if self.iterations < 0:
            raise ConfigError(f"iterations must be >= 0, got {self.iterations}")
        if self.min_context_count < 1:
            raise ConfigError(f"min_context_count must be >= 1, got {self.min_context_count}")

    def as_dict(self):
        d = asdict(self)
        d["relfreq_mode"] = self.relfreq_mode.value
        return d


@dataclass
class IterationRecord:
    iteration: int
    pnpis: tuple
    de_cutoff: int
    de_ranking: list
    context_total: int
    chosen: tuple = ()
    pnpi_ranking: list | None = None


@dataclass
class CoLearnState:
    iteration: int
    pnpis: list
    de_cutoff: int
    n_r: int
    seed_size: int
    de_ranking: list = field(default_factory=list)
    history: list = field(default_factory=list)
    early_termination: dict | None = None

    @classmethod
    def initial(cls, seeds, n0=10, n_r=1):
        seeds = list(dict.fromkeys(seeds))
        if not seeds:
            raise ConfigError("seed set is empty")
        return cls(iteration=0, pnpis=seeds, de_cutoff=n0, n_r=n_r, seed_size=len(seeds))

    @property
    def de_set(self):
        """The top ``n`` DE candidates of the current ranking."""
        return [c.token for c in self.de_ranking[:self.de_cutoff]]


def de_step(corpus, index, state, sentence_filter=NO_FILTER, config=CoLearnConfig()):
    """Rank DE-operator candidates from left contexts of the clue set."""
    spans = extract_left_contexts(corpus, index, state.pnpis, sentence_filter)
    if not spans:
        raise SeedCoverageError(state.pnpis)
    seen = {s.trigger for s in spans}
    silent = [t for t in state.pnpis if t not in seen]
    if silent:
        logger.warning("iteration %d: no contexts for %s", state.iteration, ", ".join(silent))
    exclusions = set(state.pnpis) | set(sentence_filter.exact)
    ranking = rank_spans(spans, index, exclusions, config.relfreq_mode, config.min_context_count)
    state.de_ranking = ranking
    state.history.append(IterationRecord(
        iteration=state.iteration,
        pnpis=tuple(state.pnpis),
        de_cutoff=state.de_cutoff,
        de_ranking=ranking,
        context_total=len(spans),
    ))
    return ranking


def pnpi_step(corpus, index, state, sentence_filter=NO_FILTER, config=CoLearnConfig()):
    """Learn up to ``n_r`` new pseudo-NPIs from the current top-``n`` operators.

    Returns the new tokens. On candidate exhaustion fewer (possibly zero)
    tokens are returned and ``state.early_termination`` is set; with zero
    new tokens the iteration counter and ``n`` stay unchanged.
    """
    record = state.history[-1]
    de_set = state.de_set
    ranking = []
    if de_set:
        de_filter = sentence_filter if config.filter_de_contexts else None
        spans = extract_right_contexts(corpus, index, de_set, de_filter)
        if spans:
            exclusions = set(de_set) | set(state.pnpis)
            ranking = rank_spans(spans, index, exclusions, config.relfreq_mode, config.min_context_count)
    known = set(state.pnpis)
    new = [c.token for c in ranking if c.token not in known][:state.n_r]
    record.pnpi_ranking = ranking
    record.chosen = tuple(new)
    if len(new) < state.n_r:
        state.early_termination = {
            "iteration": state.iteration,
            "reason": "pseudo-NPI candidates exhausted",
            "requested": state.n_r,
            "added": new,
        }
        logger.warning("iteration %d: only %d pseudo-NPI candidates left", state.iteration, len(new))
    if new:
        state.pnpis.extend(new)
        state.de_cutoff += 1
        state.iteration += 1
    return new


def _write_pnpis(state, path):
    added_at = {}
    for rec in state.history:
        for tok in rec.chosen:
            added_at[tok] = rec.iteration + 1
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("order\ttoken\tsource\titeration\n")
        for i, tok in enumerate(state.pnpis, 1):
            if i <= state.seed_size:
                fh.write(f"{i}\t{tok}\tseed\t0\n")
            else:
                fh.write(f"{i}\t{tok}\tlearned\t{added_at[tok]}\n")


def _write_manifest(path, manifest):
    text = json.dumps(manifest, indent=2, sort_keys=True, ensure_ascii=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


def build_manifest(corpus, seeds, config, sentence_filter, extra=None):
    manifest = {
        "format": 1,
        "corpus": {
            "source_digest": corpus.source_digest,
            "sentence_count": corpus.sentence_count,
            "token_total": corpus.token_total,
        },
        "tokenizer": corpus.tokenizer_config.as_dict(),
        "filter": sentence_filter.as_dict(),
        "colearn": config.as_dict(),
        "seeds": list(dict.fromkeys(seeds)),
        "policies": {
            "pnpi_set": "append-only; learned pseudo-NPIs are never re-ranked or removed",
            "relative_frequency": config.relfreq_mode.value,
            "ties": "score desc, context_hits desc, token asc",
            "context_boundaries": [",", ";"],
        },
        "versions": {
            "deops": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
    }
    if extra:
        manifest.update(extra)
    return manifest


def run(corpus, seeds, config=CoLearnConfig(), sentence_filter=NO_FILTER, index=None, out_dir=None, manifest_extra=None):
    """Run the full co-learning loop and return the final :class:`CoLearnState`.

    With ``out_dir`` set, each iteration's DE ranking is written to
    ``iter_<t>.tsv`` as soon as it exists, the pNPI ranking to
    ``pnpi_rank_<t>.tsv``, the ordered clue set to ``pnpis.tsv``, and the
    configuration plus final status to ``manifest.json``. If a step fails,
    what has been completed stays on disk and the manifest records the error.
    """
    if index is None:
        index = build_index(corpus)
    state = CoLearnState.initial(seeds, config.n0, config.n_r)
    out = Path(out_dir) if out_dir is not None else None
    manifest = build_manifest(corpus, seeds, config, sentence_filter, manifest_extra)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        manifest["status"] = "running"
        _write_manifest(out / MANIFEST_NAME, manifest)

    try:
        while True:
            t = state.iteration
            de_step(corpus, index, state, sentence_filter, config)
            if out is not None:
                write_ranking(state.de_ranking, out / f"iter_{t}.tsv")
                _write_pnpis(state, out / PNPI_NAME)
            if t >= config.iterations or state.early_termination:
                break
            pnpi_step(corpus, index, state, sentence_filter, config)
            if out is not None:
                write_ranking(state.history[-1].pnpi_ranking, out / f"pnpi_rank_{t}.tsv")
                _write_pnpis(state, out / PNPI_NAME)
            if state.iteration == t:
                break
    except Exception as exc:
        if out is not None:
            manifest["status"] = "failed"
            manifest["error"] = f"{type(exc).__name__}: {exc}"
            manifest["completed_iterations"] = len(state.history)
            _write_manifest(out / MANIFEST_NAME, manifest)
        raise

    manifest["status"] = "early_termination" if state.early_termination else "completed"
    manifest["early_termination"] = state.early_termination
    manifest["completed_iterations"] = len(state.history)
    if out is not None:
        _write_manifest(out / MANIFEST_NAME, manifest)
    return state


def load_manifest(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def settings_from_manifest(manifest):
    """Return ``(seeds, CoLearnConfig, SentenceFilter)`` recorded in a manifest."""
    config = CoLearnConfig(**manifest["colearn"])
    filt = manifest["filter"]
    sentence_filter = SentenceFilter(frozenset(filt["blacklist"]), filt["filter_questions"])
    return list(manifest["seeds"]), config, sentence_filter

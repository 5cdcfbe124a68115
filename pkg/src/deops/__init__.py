"""Discover downward-entailing operators from raw text by co-learning them
with pseudo negative-polarity items."""

__version__ = "0.1.0"

from .colearn import CoLearnConfig, CoLearnState, de_step, pnpi_step, run  # noqa: E402
from .context import (  # noqa: E402
    ContextSpan,
    SentenceFilter,
    Side,
    extract_left_contexts,
    extract_right_contexts,
    sentence_passes,
)
from .corpus import Corpus, CorpusIndex, Sentence, TokenizerConfig, build_index, ingest, read_corpus, tokenize  # noqa: E402
from .evaluation import GoldLabelSet, Label, PrecisionReport, precision_at_k, precision_curve  # noqa: E402
from .scoring import RankedCandidate, RelFreqMode, collect_candidates, score_candidates  # noqa: E402
from .synth import SynthSpec, generate_synthetic_corpus  # noqa: E402

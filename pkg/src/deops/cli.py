"""Command-line front end: ``deops index|run|eval|synth``.

Exit statuses: 0 success, 1 unexpected failure, 2 configuration error,
3 seed-coverage error, 4 I/O error, 5 malformed data (labels, rankings,
out-of-range cutoffs, empty corpus), 6 run stopped early because pseudo-NPI
candidates ran out.
"""

import argparse
import json
import logging
import re
import sys
from pathlib import Path

from .colearn import CoLearnConfig, load_manifest, run, settings_from_manifest
from .context import SentenceFilter, load_blacklist
from .corpus import DEFAULT_TOKENIZER, file_digest, load_or_build, tokenize, write_corpus
from .errors import (
    CacheError,
    ConfigError,
    EmptyCorpusError,
    IngestError,
    LabelParseError,
    RankRangeError,
    SeedCoverageError,
    SynthSpecError,
)
from .evaluation import (
    format_iteration_table,
    format_reports,
    iteration_table,
    load_labels,
    precision_curve,
    write_labels,
)
from .scoring import RelFreqMode, read_ranking
from .synth import SynthSpec, generate_synthetic_corpus

logger = logging.getLogger("deops")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_COVERAGE = 3
EXIT_IO = 4
EXIT_DATA = 5
EXIT_EARLY_STOP = 6


def read_seeds(path, config=DEFAULT_TOKENIZER):
    seeds = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        toks = tokenize(line, config)
        if len(toks) != 1:
            raise ConfigError(f"{path}: line {lineno}: seed must be a single token, got {line!r}")
        seeds.append(toks[0])
    if not seeds:
        raise ConfigError(f"{path}: seed file is empty")
    return seeds


def parse_ks(text):
    try:
        ks = [int(x) for x in re.split(r"[,\s]+", text.strip()) if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad cutoff list {text!r}") from None
    if not ks or min(ks) < 1:
        raise argparse.ArgumentTypeError("cutoffs must be positive integers")
    return ks


def default_cache_path(corpus_path):
    return Path(str(corpus_path) + ".index.npz")


def cmd_index(args):
    cache = Path(args.cache) if args.cache else default_cache_path(args.corpus)
    index, hit = load_or_build(args.corpus, cache)
    print(f"sentence_count\t{index.sentence_count}")
    print(f"token_total\t{index.token_total}")
    print(f"vocabulary\t{len(index.corpus.vocab)}")
    print(f"cache\t{cache}\t{'reused' if hit else 'written'}")
    return EXIT_OK


def _filter_from_args(args):
    if args.no_blacklist:
        blacklist = frozenset()
    elif args.blacklist:
        blacklist = load_blacklist(args.blacklist)
    else:
        blacklist = SentenceFilter.romanian().blacklist_tokens
    return SentenceFilter(blacklist, args.filter_questions)


def cmd_run(args):
    if args.replay:
        manifest = load_manifest(args.replay)
        seeds, config, sentence_filter = settings_from_manifest(manifest)
        inputs = manifest.get("inputs", {})
        corpus_path = args.corpus or inputs.get("corpus_path")
        if not corpus_path:
            raise ConfigError("manifest does not name a corpus; pass --corpus")
        expected = manifest["corpus"]["source_digest"]
        if file_digest(corpus_path) != expected:
            raise ConfigError(f"{corpus_path} does not match the manifest's corpus digest")
    else:
        for name in ("corpus", "seeds"):
            if not getattr(args, name):
                raise ConfigError(f"--{name} is required (or use --replay)")
        corpus_path = args.corpus
        seeds = read_seeds(args.seeds)
        sentence_filter = _filter_from_args(args)
        config = CoLearnConfig(
            n0=args.n0,
            n_r=args.nr,
            iterations=args.iters,
            relfreq_mode=args.relfreq,
            min_context_count=args.min_count,
            filter_de_contexts=args.filter_de_contexts,
        )
        inputs = {
            "corpus_path": str(Path(corpus_path).resolve()),
            "seeds_path": str(Path(args.seeds).resolve()),
            "blacklist_path": str(Path(args.blacklist).resolve()) if args.blacklist and not args.no_blacklist else None,
        }
    index, _ = load_or_build(corpus_path, args.cache)
    state = run(
        index.corpus,
        seeds,
        config,
        sentence_filter,
        index=index,
        out_dir=args.out,
        manifest_extra={"inputs": inputs},
    )
    last = state.history[-1]
    print(f"iterations\t{len(state.history)}")
    print(f"pnpis\t{' '.join(state.pnpis)}")
    print(f"top\t{' '.join(c.token for c in last.de_ranking[:config.n0])}")
    print(f"output\t{args.out}")
    if state.early_termination:
        print(f"early_termination\t{state.early_termination['reason']}", file=sys.stderr)
        return EXIT_EARLY_STOP
    return EXIT_OK


def _run_rankings(run_dir):
    found = {}
    for path in Path(run_dir).glob("iter_*.tsv"):
        m = re.fullmatch(r"iter_(\d+)\.tsv", path.name)
        if m:
            found[int(m.group(1))] = read_ranking(path)
    if not found:
        raise ConfigError(f"{run_dir}: no iter_<t>.tsv files")
    return found


def cmd_eval(args):
    gold = load_labels(args.labels)
    if args.run_dir:
        text = format_iteration_table(iteration_table(_run_rankings(args.run_dir), gold, args.ks))
    else:
        text = format_reports(precision_curve(read_ranking(args.ranking), gold, args.ks))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def cmd_synth(args):
    spec = SynthSpec.from_file(args.spec) if args.spec else SynthSpec()
    if args.rng_seed is not None:
        spec = SynthSpec.from_dict({**spec.as_dict(), "rng_seed": args.rng_seed})
    corpus, gold = generate_synthetic_corpus(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_corpus(corpus, out / "corpus.txt")
    write_labels(gold, out / "labels.tsv")
    (out / "seeds.txt").write_text("\n".join(spec.seed_tokens) + "\n", encoding="utf-8")
    (out / "spec.json").write_text(json.dumps(spec.as_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"sentence_count\t{corpus.sentence_count}")
    print(f"token_total\t{corpus.token_total}")
    print(f"output\t{out}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="deops", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress at INFO level")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="tokenize a corpus and cache its index")
    p.add_argument("--corpus", required=True, help="UTF-8 text, one sentence per line")
    p.add_argument("--cache", help="cache file (default: <corpus>.index.npz)")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("run", help="co-learn DE operators and pseudo-NPIs")
    p.add_argument("--corpus")
    p.add_argument("--seeds", help="seed NPIs, one token per line")
    bl = p.add_mutually_exclusive_group()
    bl.add_argument("--blacklist", help="well-known DE operators, one per line; trailing '-' marks a prefix")
    bl.add_argument("--no-blacklist", action="store_true", help="disable the default blacklist {nu, n-}")
    p.add_argument("--filter-questions", action=argparse.BooleanOptionalAction, default=True,
                   help="drop sentences containing '?' from NPI-context extraction (default: on)")
    p.add_argument("--filter-de-contexts", action="store_true",
                   help="also apply the sentence filter to DE-context extraction")
    p.add_argument("--relfreq", choices=[m.value for m in RelFreqMode], default=RelFreqMode.SENTENCE.value)
    p.add_argument("--min-count", type=int, default=1, help="minimum contexts per candidate")
    p.add_argument("--n0", type=int, default=10, help="initial DE cutoff n")
    p.add_argument("--nr", type=int, default=1, help="pseudo-NPIs added per iteration")
    p.add_argument("--iters", type=int, default=9, help="co-learning iterations after the baseline")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--cache", help="index cache file to reuse or write")
    p.add_argument("--replay", help="re-run with the settings recorded in a manifest.json")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval", help="precision at k against gold labels")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--ranking", help="ranking TSV")
    src.add_argument("--run-dir", help="run directory; reports every iter_<t>.tsv")
    p.add_argument("--labels", required=True, help="token<TAB>label TSV (DE, NOT_DE, HARD)")
    p.add_argument("--ks", type=parse_ks, default=[10, 20, 30], help="comma-separated cutoffs")
    p.add_argument("--out", help="also write the report here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="generate a planted-operator corpus")
    p.add_argument("--spec", help="JSON file with SynthSpec fields")
    p.add_argument("--rng-seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except Exception as exc:
        code = _exit_code(exc)
        if code is None:
            raise
        print(f"deops {args.command}: error: {exc}", file=sys.stderr)
        return code


def _exit_code(exc):
    # SeedCoverageError before the broader groups it could fall into
    if isinstance(exc, SeedCoverageError):
        return EXIT_COVERAGE
    if isinstance(exc, (ConfigError, SynthSpecError)):
        return EXIT_CONFIG
    if isinstance(exc, (OSError, IngestError, CacheError)):
        return EXIT_IO
    if isinstance(exc, (LabelParseError, RankRangeError, EmptyCorpusError, ValueError)):
        return EXIT_DATA
    return None


if __name__ == "__main__":
    sys.exit(main())

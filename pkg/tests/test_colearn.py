import filecmp
import logging

import numpy as np
import pytest

import deops.colearn as colearn
from deops.colearn import CoLearnConfig, CoLearnState, de_step, load_manifest, pnpi_step, run, settings_from_manifest
from deops.context import NO_FILTER, SentenceFilter
from deops.corpus import Corpus, build_index
from deops.errors import ConfigError, SeedCoverageError
from deops.synth import SynthSpec, generate_synthetic_corpus

from .oracle import naive_colearn, naive_contexts, random_corpus


@pytest.fixture(scope="module")
def small_synth():
    spec = SynthSpec(sentence_count=5000, rng_seed=7)
    corpus, gold = generate_synthetic_corpus(spec)
    return spec, corpus, build_index(corpus), gold


def test_de_step_toy(toy_corpus, toy_index):
    state = CoLearnState.initial(["any"])
    ranking = de_step(toy_corpus, toy_index, state)
    assert [c.token for c in ranking] == ["doubts", "she", "denied", "he"]
    assert [c.score for c in ranking] == [2.0, 2.0, 1.0, 2 / 3]
    assert state.history[0].pnpis == ("any",)
    assert state.history[0].context_total == 2


def test_de_step_with_absent_seed_warns(toy_corpus, toy_index, caplog):
    state = CoLearnState.initial(["vreun", "any"])
    with caplog.at_level(logging.WARNING):
        ranking = de_step(toy_corpus, toy_index, state)
    assert ranking[0].token == "doubts"
    assert "vreun" in caplog.text


def test_de_step_without_contexts(toy_corpus, toy_index):
    state = CoLearnState.initial(["vreo", "vreun"])
    with pytest.raises(SeedCoverageError) as err:
        de_step(toy_corpus, toy_index, state)
    assert err.value.missing == ("vreo", "vreun")


def test_de_step_excludes_blacklist():
    corpus = Corpus.from_sentences([["a", "nu", "b"], ["c", "n-a", "b"], ["d", "b"], ["e"]])
    index = build_index(corpus)
    state = CoLearnState.initial(["b"])
    ranking = de_step(corpus, index, state, SentenceFilter.romanian())
    assert [c.token for c in ranking] == ["d"]


def toy_state_with_denied(toy_corpus, toy_index, seeds=("any",), n0=10):
    state = CoLearnState.initial(seeds, n0=n0)
    ranking = de_step(toy_corpus, toy_index, state)
    state.de_ranking = [c for c in ranking if c.token == "denied"]
    return state


def test_pnpi_step_toy(toy_corpus, toy_index):
    state = toy_state_with_denied(toy_corpus, toy_index)
    new = pnpi_step(toy_corpus, toy_index, state)
    ranking = state.history[0].pnpi_ranking
    assert {c.token: c.score for c in ranking} == {"report": 2.0, "the": 2.0, "wrongdoing": 2.0}
    assert new == ["report"]
    assert state.pnpis == ["any", "report"]
    assert state.de_cutoff == 11
    assert state.iteration == 1


def test_pnpi_step_skips_known_clues(toy_corpus, toy_index):
    state = toy_state_with_denied(toy_corpus, toy_index, seeds=("any", "report"))
    assert pnpi_step(toy_corpus, toy_index, state) == ["the"]


def test_pnpi_step_exhaustion():
    corpus = Corpus.from_sentences([["a", "any"], ["a", "b"]])
    index = build_index(corpus)
    state = CoLearnState.initial(["any"])
    de_step(corpus, index, state)
    assert pnpi_step(corpus, index, state) == ["b"]
    de_step(corpus, index, state)
    assert pnpi_step(corpus, index, state) == []
    assert state.early_termination["iteration"] == 1
    assert state.iteration == 1 and state.de_cutoff == 11


def test_run_exhaustion_stops_cleanly(tmp_path):
    corpus = Corpus.from_sentences([["a", "any"], ["a", "b"]])
    state = run(corpus, ["any"], CoLearnConfig(iterations=5), out_dir=tmp_path)
    assert len(state.history) == 2
    assert state.pnpis == ["any", "b"]
    assert load_manifest(tmp_path / "manifest.json")["status"] == "early_termination"


def test_config_validation():
    with pytest.raises(ConfigError):
        CoLearnConfig(n0=0)
    with pytest.raises(ConfigError):
        CoLearnConfig(n_r=0)
    with pytest.raises(ConfigError):
        CoLearnConfig(iterations=-1)
    with pytest.raises(ConfigError):
        CoLearnState.initial([])


def test_run_schedule_paper_parameters(small_synth):
    spec, corpus, index, _ = small_synth
    state = run(corpus, spec.seed_tokens, CoLearnConfig(n0=10, n_r=1, iterations=9), index=index)
    assert len(state.history) == 10
    assert len(state.pnpis) == 11
    assert state.de_cutoff == 19
    for t, rec in enumerate(state.history):
        assert rec.iteration == t
        assert rec.de_cutoff == 10 + t
        assert len(rec.pnpis) == 2 + t
        top = {c.token for c in rec.de_ranking[:rec.de_cutoff]}
        assert not top & set(rec.pnpis)
        assert not set(rec.chosen) & set(rec.pnpis)


def test_run_zero_iterations_is_baseline(small_synth):
    spec, corpus, index, _ = small_synth
    state = run(corpus, spec.seed_tokens, CoLearnConfig(iterations=0), index=index)
    baseline = de_step(corpus, index, CoLearnState.initial(spec.seed_tokens))
    assert len(state.history) == 1
    assert state.history[0].de_ranking == baseline
    assert state.pnpis == spec.seed_tokens


@pytest.mark.parametrize("seed", range(8))
def test_run_matches_naive_loop(seed):
    rng = np.random.default_rng(100 + seed)
    sentences = random_corpus(rng, max_sentences=150, max_vocab=40)
    vocab = sorted({t for s in sentences for t in s} - {",", ";", "?", "."})
    seeds = rng.choice(vocab, size=2, replace=False).tolist()
    blacklist = {"t3", "n-"}
    expected, clues = naive_colearn(sentences, seeds, 3, 2, 4, blacklist, True)
    corpus = Corpus.from_sentences(sentences)
    try:
        state = run(corpus, seeds, CoLearnConfig(n0=3, n_r=2, iterations=4),
                    SentenceFilter(frozenset(blacklist), True))
    except SeedCoverageError:
        assert naive_contexts(sentences, set(seeds), "LEFT", blacklist, True) == []
        return
    got = [[(c.token, c.exact_score, c.context_hits) for c in rec.de_ranking] for rec in state.history]
    assert got == expected
    assert state.pnpis == clues


def test_outputs_and_replay(tmp_path, small_synth):
    spec, corpus, index, _ = small_synth
    config = CoLearnConfig(iterations=3)
    run(corpus, spec.seed_tokens, config, NO_FILTER, index=index, out_dir=tmp_path / "a")
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == ["iter_0.tsv", "iter_1.tsv", "iter_2.tsv", "iter_3.tsv", "manifest.json",
                     "pnpi_rank_0.tsv", "pnpi_rank_1.tsv", "pnpi_rank_2.tsv", "pnpis.tsv"]
    manifest = load_manifest(tmp_path / "a" / "manifest.json")
    assert manifest["corpus"]["source_digest"] == corpus.source_digest
    assert manifest["status"] == "completed"
    seeds, config2, filt = settings_from_manifest(manifest)
    assert (seeds, config2, filt) == (spec.seed_tokens, config, NO_FILTER)
    run(corpus, seeds, config2, filt, out_dir=tmp_path / "b")
    cmp = filecmp.dircmp(tmp_path / "a", tmp_path / "b")
    assert not cmp.diff_files and not cmp.left_only and not cmp.right_only
    pnpis = (tmp_path / "a" / "pnpis.tsv").read_text().splitlines()
    assert pnpis[0] == "order\ttoken\tsource\titeration"
    assert pnpis[1] == "1\tpn00\tseed\t0"
    assert len(pnpis) == 1 + 2 + 3


def test_failure_keeps_completed_iterations(tmp_path, small_synth, monkeypatch):
    spec, corpus, index, _ = small_synth
    real = colearn.extract_right_contexts
    calls = []

    def flaky(*args, **kwargs):
        calls.append(1)
        if len(calls) == 2:
            raise RuntimeError("disk on fire")
        return real(*args, **kwargs)

    monkeypatch.setattr(colearn, "extract_right_contexts", flaky)
    with pytest.raises(RuntimeError):
        run(corpus, spec.seed_tokens, CoLearnConfig(iterations=5), index=index, out_dir=tmp_path)
    assert (tmp_path / "iter_0.tsv").exists() and (tmp_path / "iter_1.tsv").exists()
    assert not (tmp_path / "iter_2.tsv").exists()
    manifest = load_manifest(tmp_path / "manifest.json")
    assert manifest["status"] == "failed"
    assert manifest["completed_iterations"] == 2
    assert "disk on fire" in manifest["error"]

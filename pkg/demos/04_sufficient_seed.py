"""
When the seed is already enough
===============================

Here every planted operator co-occurs with a seed item in every one of its
sentences. The baseline ranking already has all operators on top, and
adding pseudo-NPIs leaves precision where it was.
"""

from deops import CoLearnConfig, SynthSpec, generate_synthetic_corpus, precision_at_k, run

spec = SynthSpec(rng_seed=0, sentence_count=100_000, q=1.0, seed_covers_all=True)
corpus, gold = generate_synthetic_corpus(spec)
state = run(corpus, spec.seed_tokens, CoLearnConfig(iterations=9))

for rec in state.history:
    rep = precision_at_k(rec.de_ranking, gold, 30)
    print(rec.iteration, f"p@30={rep.precision:.3f}", "clues:", len(rec.pnpis))

# The learned "pseudo-NPIs" are background words: nothing better is left to find.
print(state.pnpis[spec.seed_size:])

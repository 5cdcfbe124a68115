"""
NPI contexts, DE contexts and ratio scores on a toy corpus
==========================================================

A left context runs from an NPI back to the nearest comma, semicolon or
sentence start; a right context from an operator forward to the next one.
Candidates are ranked by how over-represented they are in those contexts.
"""

from deops import Corpus, build_index, extract_left_contexts, extract_right_contexts
from deops.scoring import rank_spans

corpus = Corpus.from_sentences([
    ["he", "denied", "any", "wrongdoing"],
    ["she", "doubts", "any", "claim", ",", "he", "said"],
    ["apples", "are", "red"],
    ["he", "denied", "the", "report"],
])
index = build_index(corpus)

left = extract_left_contexts(corpus, index, {"any"})
for span in left:
    print(span.sentence_id, span.side.value, span.tokens)

# score = (fraction of contexts containing x) / (fraction of sentences containing x)
for c in rank_spans(left, index, exclusions={"any"}):
    print(f"{c.token:10s} {c.context_hits}/{c.context_total} / {c.rel_freq:.2f} = {c.score:.3f}")

# The reverse direction: what follows a known operator?
right = extract_right_contexts(corpus, index, {"denied"})
for c in rank_spans(right, index, exclusions={"denied"}):
    print(f"{c.token:10s} {c.score:.3f}")

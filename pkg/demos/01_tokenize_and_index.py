"""
Tokenizing a corpus and reading its statistics
==============================================

One sentence per line goes in; a numpy-backed index of token counts comes out.
"""

import io

from deops import build_index, ingest, tokenize

# Delimiter punctuation is split off, text is lowercased, diacritics stay.
print(tokenize("Guvernul a criticat, din nou, orice reacție."))

raw = """Nu am vreo idee.
Ministrul a negat vreun contact, a spus purtătorul de cuvânt.

Ai vreo idee?
Ea s-a abținut de la vot.
"""
corpus = ingest(io.BytesIO(raw.encode("utf-8")))
print(corpus.sentence_count, "sentences,", corpus.token_total, "tokens")  # blank line skipped
print(corpus.source_digest[:16])

index = build_index(corpus)
for tok in ("vreo", "a", "."):
    # containment: sentences holding the token; occurrences: all of its tokens
    print(tok, index.containment(tok), index.occurrences(tok), index.postings(tok))

# The counts live in arrays indexed by token id.
print(index.containment_counts[:10], index.occurrence_counts.sum() == index.token_total)

"""Precision at k against gold labels.

Items labeled HARD keep their rank but never count as hits; unlabeled
items are counted separately and treated as NOT_DE.
"""

import enum
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path

from .errors import LabelParseError, RankRangeError

REPORT_HEADER = ("k", "de_count", "hard_count", "not_de_count", "unlabeled_count", "precision")


class Label(str, enum.Enum):
    DE = "DE"
    NOT_DE = "NOT_DE"
    HARD = "HARD"


def normalize_token(token):
    return unicodedata.normalize("NFC", token.strip()).lower()


@dataclass
class GoldLabelSet:
    labels: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.labels)

    def __contains__(self, token):
        return token in self.labels

    def get(self, token):
        return self.labels.get(token)

    def tokens_with(self, label):
        return sorted(t for t, lab in self.labels.items() if lab is Label(label))


def load_labels(path):
    """Read ``token<TAB>label`` lines; ``#`` starts a comment, a header row is optional."""
    labels = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in raw.split("\t")]
        if len(parts) != 2 or not parts[0]:
            raise LabelParseError(f"expected 'token<TAB>label', got {raw!r}", lineno)
        token, label = normalize_token(parts[0]), parts[1].upper()
        if (token, label) == ("token", "LABEL") and not labels:
            continue
        try:
            value = Label(label)
        except ValueError:
            raise LabelParseError(f"unknown label {parts[1]!r} (want DE, NOT_DE or HARD)", lineno) from None
        if labels.get(token, value) is not value:
            raise LabelParseError(f"conflicting labels for {token!r}", lineno)
        labels[token] = value
    return GoldLabelSet(labels)


def write_labels(gold, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("token\tlabel\n")
        for token in sorted(gold.labels):
            fh.write(f"{token}\t{gold.labels[token].value}\n")


@dataclass(frozen=True)
class PrecisionReport:
    k: int
    de_count: int
    hard_count: int
    not_de_count: int
    unlabeled_count: int

    @property
    def precision(self):
        return self.de_count / self.k

    def row(self):
        return (self.k, self.de_count, self.hard_count, self.not_de_count, self.unlabeled_count, self.precision)


def _token(item):
    return item if isinstance(item, str) else item.token


def precision_at_k(ranked, gold, k):
    """Count labels among the top ``k`` items of ``ranked``.

    ``ranked`` holds tokens or objects with a ``token`` attribute.
    """
    if k < 1 or k > len(ranked):
        raise RankRangeError(f"k={k} outside 1..{len(ranked)}")
    counts = {Label.DE: 0, Label.HARD: 0, Label.NOT_DE: 0, None: 0}
    for item in ranked[:k]:
        counts[gold.get(_token(item))] += 1
    return PrecisionReport(k, counts[Label.DE], counts[Label.HARD], counts[Label.NOT_DE], counts[None])


def precision_curve(ranked, gold, ks):
    return [precision_at_k(ranked, gold, k) for k in ks]


def iteration_table(rankings, gold, ks):
    """DE counts per cutoff for several iterations.

    ``rankings`` maps iteration number to a ranked list. Returns a list of
    ``(iteration, PrecisionReport)`` pairs in iteration, then k order.
    """
    return [(it, rep) for it in sorted(rankings) for rep in precision_curve(rankings[it], gold, ks)]


def format_reports(reports):
    lines = ["\t".join(REPORT_HEADER)]
    lines += ["\t".join(map(str, rep.row())) for rep in reports]
    return "\n".join(lines) + "\n"


def format_iteration_table(table):
    lines = ["\t".join(("iteration",) + REPORT_HEADER)]
    for it, rep in table:
        lines.append("\t".join((str(it),) + tuple(map(str, rep.row()))))
    return "\n".join(lines) + "\n"

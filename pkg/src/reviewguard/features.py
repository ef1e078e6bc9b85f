"""Structural text metrics and SR-vs-DR summary statistics.

Every metric is defined here, explicitly, rather than delegated to a
readability library: the tokenizer splits on whitespace and strips edge
punctuation, the sentence splitter breaks on terminal punctuation runs
with an abbreviation guard, and the syllable counter is the classic
vowel-group scheme with silent-e and consonant-le adjustments. These
definitions are the contract the rest of the pipeline (and the test
oracles) rely on.
"""

import math
import re
from dataclasses import dataclass
from importlib import resources

from .errors import EmptyTextError, ReviewGuardError, ZeroVarianceError
from .jsonio import sha256_text
from .stats import student_t_two_sided_p

VOWELS = frozenset("aeiouy")

_SENTENCE_BREAK = re.compile(r"[.?!]+(?=\s|$)")
_EDGE_PUNCT = re.compile(r"^[^0-9A-Za-z]+|[^0-9A-Za-z]+$")

# Rows of the structural report, in display order.
REPORT_METRICS = (
    "rating score",
    "confidence score",
    "linsear write formula",
    "sentence count",
    "lexicon count",
    "syllable count",
    "difficult words",
    "monosyllable count",
)

DISPLAY_RHO_THRESHOLD = 0.1


def _load_wordset(name: str) -> frozenset:
    text = resources.files("reviewguard.data").joinpath(name).read_text("utf-8")
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


EASY_WORDS = _load_wordset("easy_words.txt")
ABBREVIATIONS = _load_wordset("abbreviations.txt")

EASY_WORDS_HASH = sha256_text("\n".join(sorted(EASY_WORDS)))[:16]


def tokenize(text: str) -> list:
    """Whitespace split, edge punctuation stripped, empties dropped."""
    tokens = []
    for chunk in text.split():
        word = _EDGE_PUNCT.sub("", chunk)
        if word:
            tokens.append(word)
    return tokens


def split_sentences(text: str) -> list:
    """Split on runs of terminal punctuation followed by whitespace/end.

    A break is suppressed when the word just before the punctuation is a
    known abbreviation. Always returns at least one sentence for
    non-empty text.
    """
    sentences = []
    start = 0
    for match in _SENTENCE_BREAK.finditer(text):
        prefix = text[start : match.start()]
        tail = prefix.rstrip().rsplit(None, 1)
        last_word = tail[-1] if tail else ""
        if last_word.replace(".", "").lower() in ABBREVIATIONS:
            continue
        segment = text[start : match.end()].strip()
        if segment:
            sentences.append(segment)
        start = match.end()
    rest = text[start:].strip()
    if rest:
        sentences.append(rest)
    if not sentences:
        stripped = text.strip()
        sentences = [stripped] if stripped else []
    return sentences


def syllables(word: str) -> int:
    """Vowel-group count with silent-e and consonant-le adjustments, min 1."""
    word = word.lower()
    letters = [c for c in word if c.isalpha()]
    if not letters:
        return 1
    count = 0
    prev_vowel = False
    for c in letters:
        is_vowel = c in VOWELS
        if is_vowel and not prev_vowel:
            count += 1
        prev_vowel = is_vowel
    if len(letters) >= 2 and letters[-1] == "e" and letters[-2] not in VOWELS:
        count -= 1
    if (
        len(letters) >= 3
        and letters[-1] == "e"
        and letters[-2] == "l"
        and letters[-3] not in VOWELS
    ):
        count += 1
    return max(1, count)


@dataclass
class StructuralFeatures:
    review_id: str
    sentence_count: int
    lexicon_count: int
    syllable_count: int
    difficult_words: int
    monosyllable_count: int
    linsear_write: float

    def to_json(self) -> dict:
        return {
            "review_id": self.review_id,
            "sentence_count": self.sentence_count,
            "lexicon_count": self.lexicon_count,
            "syllable_count": self.syllable_count,
            "difficult_words": self.difficult_words,
            "monosyllable_count": self.monosyllable_count,
            "linsear_write": self.linsear_write,
        }


def structural_features(text: str, review_id: str = "") -> StructuralFeatures:
    if not text or not text.strip():
        raise EmptyTextError("empty review")
    tokens = tokenize(text)
    if not tokens:
        raise EmptyTextError("empty review")
    counts = [syllables(t) for t in tokens]
    difficult = sum(
        1 for t, c in zip(tokens, counts) if c >= 2 and t.lower() not in EASY_WORDS
    )
    return StructuralFeatures(
        review_id=review_id,
        sentence_count=len(split_sentences(text)),
        lexicon_count=len(tokens),
        syllable_count=sum(counts),
        difficult_words=difficult,
        monosyllable_count=sum(1 for c in counts if c == 1),
        linsear_write=linsear_write(text),
    )


def linsear_write(text: str) -> float:
    """Grade level from easy/hard word points over the first 100 words.

    Words of <= 2 syllables score 1 point, words of >= 3 syllables score
    3; the point total is divided by the number of sentences the sample
    touches, halved if above 20, else reduced by 2 and halved.
    """
    sentences = split_sentences(text)
    if not sentences or not tokenize(text):
        raise EmptyTextError("text contains no words")
    sample_tokens = []
    sentences_in_sample = 0
    for sentence in sentences:
        tokens = tokenize(sentence)
        if not tokens:
            continue
        remaining = 100 - len(sample_tokens)
        if remaining <= 0:
            break
        sample_tokens.extend(tokens[:remaining])
        sentences_in_sample += 1
    points = sum(1 if syllables(t) <= 2 else 3 for t in sample_tokens)
    r = points / max(1, sentences_in_sample)
    if r > 20:
        return r / 2.0
    return (r - 2.0) / 2.0


# -- rank correlation -------------------------------------------------


@dataclass
class CorrelationResult:
    metric: str
    rho: float
    p_value: float
    n: int

    def stars(self) -> str:
        if self.p_value < 0.001:
            return "***"
        if self.p_value < 0.01:
            return "**"
        if self.p_value < 0.05:
            return "*"
        return ""

    def displayed(self) -> bool:
        return abs(self.rho) > DISPLAY_RHO_THRESHOLD

    def to_json(self) -> dict:
        return {
            "metric": self.metric,
            "rho": self.rho,
            "p_value": self.p_value,
            "n": self.n,
            "stars": self.stars(),
            "displayed": self.displayed(),
        }


def average_ranks(values) -> list:
    """1-based ranks; tied values share the average of their positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _pearson(x, y) -> float:
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    if sxx == 0.0 or syy == 0.0:
        raise ZeroVarianceError("constant input vector")
    return sxy / math.sqrt(sxx * syy)


def spearman(x, y, metric: str = "") -> CorrelationResult:
    """Spearman rho with average ranks for ties; two-sided Student-t p."""
    x = list(x)
    y = list(y)
    if len(x) != len(y):
        raise ReviewGuardError(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 3:
        raise ReviewGuardError(f"spearman needs n >= 3, got {n}")
    rho = _pearson(average_ranks(x), average_ranks(y))
    rho = min(1.0, max(-1.0, rho))
    if abs(rho) == 1.0:
        p = 0.0
    else:
        t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
        p = student_t_two_sided_p(t, n - 2)
    return CorrelationResult(metric=metric, rho=rho, p_value=p, n=n)


# -- group summaries ---------------------------------------------------


@dataclass
class GroupSummary:
    metric: str
    mean_sr: float
    mean_dr: float
    sd_sr: float
    sd_dr: float
    n_sr: int
    n_dr: int

    def to_json(self) -> dict:
        return {
            "metric": self.metric,
            "mean_sr": self.mean_sr,
            "mean_dr": self.mean_dr,
            "sd_sr": self.sd_sr,
            "sd_dr": self.sd_dr,
            "n_sr": self.n_sr,
            "n_dr": self.n_dr,
        }


def _mean_sd(values) -> tuple:
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)


def structure_report(samples) -> dict:
    """Metric battery over annotated real reviews.

    ``samples`` is a list of (is_sr, metrics) pairs where metrics maps
    report metric names to numbers (missing entries drop the sample from
    that metric's row, with the drop counted). Correlations pair each
    metric with the binary SR indicator (1 = SR, 0 = DR).
    """
    samples = list(samples)
    n_sr_total = sum(1 for is_sr, _ in samples if is_sr)
    n_dr_total = len(samples) - n_sr_total
    if n_sr_total == 0 or n_dr_total == 0:
        raise ReviewGuardError(
            f"need both classes: {n_sr_total} SR / {n_dr_total} DR in scope"
        )
    summaries = []
    correlations = []
    excluded = {}
    for metric in REPORT_METRICS:
        rows = [(is_sr, m[metric]) for is_sr, m in samples
                if metric in m and m[metric] is not None]
        excluded[metric] = len(samples) - len(rows)
        sr_values = [v for is_sr, v in rows if is_sr]
        dr_values = [v for is_sr, v in rows if not is_sr]
        if not sr_values or not dr_values:
            continue
        mean_sr, sd_sr = _mean_sd(sr_values)
        mean_dr, sd_dr = _mean_sd(dr_values)
        summaries.append(GroupSummary(
            metric=metric, mean_sr=mean_sr, mean_dr=mean_dr,
            sd_sr=sd_sr, sd_dr=sd_dr, n_sr=len(sr_values), n_dr=len(dr_values),
        ))
        indicator = [1.0 if is_sr else 0.0 for is_sr, _ in rows]
        values = [v for _, v in rows]
        try:
            correlations.append(spearman(values, indicator, metric=metric))
        except ZeroVarianceError:
            excluded[metric] = len(samples)
    return {
        "scope": "real reviews only",
        "easy_word_list_hash": EASY_WORDS_HASH,
        "summaries": summaries,
        "correlations": correlations,
        "excluded_missing_metadata": excluded,
    }


def format_report_row(summary: GroupSummary, corr: CorrelationResult) -> str:
    """Aligned-text row, e.g. ``confidence score 3.68 (3.75) -0.046 ***``."""
    stars = f" {corr.stars()}" if corr.stars() else ""
    return (
        f"{summary.metric} {summary.mean_sr:.2f} ({summary.mean_dr:.2f}) "
        f"{corr.rho:.3f}{stars}"
    )

"""Review-quality signals: sentiment tests, AI-text scoring, similarity.

Model inference lives behind HTTP backends; this module owns the
orchestration and the statistics. The AI-text score is the ratio of the
observer model's log-perplexity to the observer/performer cross
log-perplexity, computed from per-token records a logprob backend
supplies; low scores indicate machine-generated text.
"""

import math
from dataclasses import dataclass, field

from .errors import DegenerateTableError, ReviewGuardError
from .stats import chi2_sf

SENTIMENT_LABELS = ("NEG", "NEU", "POS")

DEFAULT_BINOCULARS_THRESHOLD = 0.9

HISTOGRAM_BIN_WIDTH = 0.02


@dataclass
class SentimentLabel:
    review_id: str
    label: str
    scores: list
    tie: bool = False

    def to_json(self) -> dict:
        return {
            "review_id": self.review_id,
            "label": self.label,
            "scores": list(self.scores),
            "tie": self.tie,
        }


def label_from_scores(review_id: str, scores) -> SentimentLabel:
    """Argmax with NEG < NEU < POS tie-breaking; ties are flagged."""
    scores = [float(s) for s in scores]
    if len(scores) != len(SENTIMENT_LABELS):
        raise ReviewGuardError(f"expected 3 scores, got {len(scores)}")
    total = sum(scores)
    if abs(total - 1.0) > 1e-6:
        raise ReviewGuardError(f"scores sum to {total}, expected 1")
    best = max(scores)
    winners = [i for i, s in enumerate(scores) if s == best]
    return SentimentLabel(
        review_id=review_id,
        label=SENTIMENT_LABELS[winners[0]],
        scores=scores,
        tie=len(winners) > 1,
    )


def classify_sentiment(items, client) -> list:
    """items: (review_id, text) pairs; returns order-preserving labels.

    Per-item backend failures become failure markers instead of
    aborting the batch.
    """
    items = list(items)
    if not items:
        return []
    texts = [text for _, text in items]
    try:
        rows, _ = client.classify(texts)
    except ReviewGuardError as exc:
        return [{"review_id": rid, "error": str(exc)} for rid, _ in items]
    labels = []
    for (review_id, _), scores in zip(items, rows):
        try:
            labels.append(label_from_scores(review_id, scores))
        except ReviewGuardError as exc:
            labels.append({"review_id": review_id, "error": str(exc)})
    return labels


# -- chi-square --------------------------------------------------------


@dataclass
class ChiSquareResult:
    statistic: float
    df: int
    p_value: float
    observed: list
    expected: list

    def to_json(self) -> dict:
        return {
            "statistic": self.statistic,
            "df": self.df,
            "p_value": self.p_value,
            "observed": [list(r) for r in self.observed],
            "expected": [list(r) for r in self.expected],
        }


def chi_square(table) -> ChiSquareResult:
    """Pearson chi-square over a 2x3 contingency table of counts."""
    rows = [list(map(float, r)) for r in table]
    if len(rows) != 2 or any(len(r) != 3 for r in rows):
        raise ReviewGuardError("expected a 2x3 table")
    row_sums = [sum(r) for r in rows]
    col_sums = [sum(r[j] for r in rows) for j in range(3)]
    total = sum(row_sums)
    if any(s <= 0 for s in row_sums) or any(s <= 0 for s in col_sums):
        raise DegenerateTableError("degenerate table: zero marginal")
    expected = [[row_sums[i] * col_sums[j] / total for j in range(3)] for i in range(2)]
    statistic = sum(
        (rows[i][j] - expected[i][j]) ** 2 / expected[i][j]
        for i in range(2)
        for j in range(3)
    )
    df = (2 - 1) * (3 - 1)
    return ChiSquareResult(
        statistic=statistic,
        df=df,
        p_value=chi2_sf(statistic, df),
        observed=rows,
        expected=expected,
    )


def format_chi2_note(result: ChiSquareResult) -> str:
    """Render the test note, e.g. ``χ²=397.7***, p < 0.001``."""
    stars = "***" if result.p_value < 0.001 else "**" if result.p_value < 0.01 \
        else "*" if result.p_value < 0.05 else ""
    if result.p_value < 0.001:
        return f"χ²={result.statistic:.1f}{stars}, p < 0.001"
    return f"χ²={result.statistic:.1f}{stars}, p = {result.p_value:.3g}"


def sentiment_table(labels_by_class: dict) -> list:
    """Build the SR/DR x NEG/NEU/POS count table from label lists."""
    table = []
    for cls in ("SR", "DR"):
        counts = {name: 0 for name in SENTIMENT_LABELS}
        for label in labels_by_class.get(cls, []):
            counts[label.label] += 1
        table.append([counts[name] for name in SENTIMENT_LABELS])
    return table


def sentiment_percentages(table) -> list:
    """Row-wise percentages; each row sums to 100 up to rounding."""
    out = []
    for row in table:
        total = sum(row)
        out.append([100.0 * c / total if total else 0.0 for c in row])
    return out


# -- AI-generated-text scoring ------------------------------------------


@dataclass
class BinocularsResult:
    review_id: str
    log_ppl: float
    x_log_ppl: float
    score: float
    verdict: str
    threshold: float

    def to_json(self) -> dict:
        return {
            "review_id": self.review_id,
            "log_ppl": self.log_ppl,
            "x_log_ppl": self.x_log_ppl,
            "score": self.score,
            "verdict": self.verdict,
            "threshold": self.threshold,
        }


def binoculars_score(token_records, review_id: str = "",
                     threshold: float = DEFAULT_BINOCULARS_THRESHOLD) -> BinocularsResult:
    """Score one text from per-token observer logprobs and cross-entropies."""
    records = list(token_records)
    if not records:
        raise ReviewGuardError("no token records")
    lp = [float(r["lp_observer"]) for r in records]
    ce = [float(r["ce_cross"]) for r in records]
    if any(not math.isfinite(v) for v in lp + ce):
        raise ReviewGuardError("non-finite token record values")
    if any(v <= 0 for v in ce):
        raise ReviewGuardError("cross-entropy values must be positive")
    log_ppl = -sum(lp) / len(lp)
    x_log_ppl = sum(ce) / len(ce)
    if log_ppl <= 0:
        raise ReviewGuardError(f"observer log-perplexity must be positive, got {log_ppl}")
    score = log_ppl / x_log_ppl
    return BinocularsResult(
        review_id=review_id,
        log_ppl=log_ppl,
        x_log_ppl=x_log_ppl,
        score=score,
        verdict="ai-like" if score < threshold else "human-like",
        threshold=threshold,
    )


def calibrate_threshold(scored_examples) -> dict:
    """Pick the accuracy-maximizing threshold on a labeled fixture.

    ``scored_examples``: (score, is_ai) pairs. Candidate thresholds are
    midpoints between adjacent sorted scores; ties prefer the lowest
    threshold.
    """
    examples = sorted(scored_examples)
    if not examples:
        raise ReviewGuardError("calibration needs a labeled fixture")
    scores = [s for s, _ in examples]
    candidates = [scores[0] - 0.01]
    candidates += [(a + b) / 2 for a, b in zip(scores, scores[1:])]
    candidates += [scores[-1] + 0.01]
    best = None
    for threshold in candidates:
        correct = sum(
            1 for score, is_ai in examples if (score < threshold) == bool(is_ai)
        )
        accuracy = correct / len(examples)
        if best is None or accuracy > best["accuracy"]:
            best = {"threshold": threshold, "accuracy": accuracy}
    return best


def temporal_ai_counts(results, verdict_by_review: dict, paper_by_review: dict) -> list:
    """Dense (venue, year, SR/DR) counts of ai-like reviews.

    Every venue/year pair present in the joined corpus gets both class
    rows, zeros included, sorted by venue then year.
    """
    grid = set()
    counts: dict = {}
    for result in results:
        paper = paper_by_review.get(result.review_id)
        verdict = verdict_by_review.get(result.review_id)
        if paper is None or verdict is None:
            continue
        grid.add((paper.venue, paper.year))
        if result.verdict == "ai-like":
            key = (paper.venue, paper.year, verdict)
            counts[key] = counts.get(key, 0) + 1
    for paper in paper_by_review.values():
        grid.add((paper.venue, paper.year))
    rows = []
    for venue, year in sorted(grid):
        for verdict in ("SR", "DR"):
            rows.append({
                "venue": venue,
                "year": year,
                "verdict_class": verdict,
                "ai_like": counts.get((venue, year, verdict), 0),
            })
    return rows


# -- abstract/review similarity ------------------------------------------


@dataclass
class SimilarityStats:
    group: str
    similarities: list
    histogram: list = field(default_factory=list)
    peak_bin_center: float = 0.0
    peak_tie: bool = False
    failures: list = field(default_factory=list)
    clamped: int = 0

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "n": len(self.similarities),
            "histogram": list(self.histogram),
            "bin_width": HISTOGRAM_BIN_WIDTH,
            "peak_bin_center": self.peak_bin_center,
            "peak_tie": self.peak_tie,
            "failures": list(self.failures),
            "clamped": self.clamped,
        }


def cosine(u, v) -> float:
    if len(u) != len(v):
        raise ReviewGuardError(f"dimension mismatch: {len(u)} vs {len(v)}")
    dot = sum(a * b for a, b in zip(u, v))
    nu = math.sqrt(sum(a * a for a in u))
    nv = math.sqrt(sum(b * b for b in v))
    if nu == 0.0 or nv == 0.0:
        raise ReviewGuardError("zero-norm vector")
    return dot / (nu * nv)


def _histogram(values) -> tuple:
    n_bins = int(round(2.0 / HISTOGRAM_BIN_WIDTH))
    counts = [0] * n_bins
    for v in values:
        index = int((v + 1.0) / HISTOGRAM_BIN_WIDTH)
        index = min(max(index, 0), n_bins - 1)
        counts[index] += 1
    peak = max(counts) if counts else 0
    winners = [i for i, c in enumerate(counts) if c == peak]
    center = -1.0 + (winners[0] + 0.5) * HISTOGRAM_BIN_WIDTH
    return counts, center, len(winners) > 1


def similarity_distribution(pairs, client) -> dict:
    """Cosine similarity of abstract/review embedding pairs, per group.

    ``pairs``: (group, pair_id, abstract_text, review_text). Embeddings
    come from the backend in one order-preserving batch per call; a
    zero-norm vector yields a per-pair failure marker, out-of-range
    cosines are clamped and counted.
    """
    pairs = list(pairs)
    stats: dict = {}
    if not pairs:
        return stats
    texts = []
    for _, _, abstract, review in pairs:
        texts.append(abstract)
        texts.append(review)
    vectors, _ = client.embed(texts)
    dims = {len(v) for v in vectors}
    if len(dims) > 1:
        raise ReviewGuardError(f"inconsistent embedding dimensions: {sorted(dims)}")
    for index, (group, pair_id, _, _) in enumerate(pairs):
        entry = stats.setdefault(
            group, SimilarityStats(group=group, similarities=[])
        )
        try:
            value = cosine(vectors[2 * index], vectors[2 * index + 1])
        except ReviewGuardError as exc:
            entry.failures.append({"pair_id": pair_id, "error": str(exc)})
            continue
        if value > 1.0 or value < -1.0:
            if value > 1.0 + 1e-9 or value < -1.0 - 1e-9:
                entry.failures.append({"pair_id": pair_id, "error": f"cosine {value} out of range"})
                continue
            value = min(1.0, max(-1.0, value))
            entry.clamped += 1
        entry.similarities.append(value)
    for entry in stats.values():
        counts, center, tie = _histogram(entry.similarities)
        entry.histogram = counts
        entry.peak_bin_center = center
        entry.peak_tie = tie
    return stats

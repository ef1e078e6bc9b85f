"""Trimmed-consensus scoring and conflicting-review selection.

For each paper the consensus is the mean of its review scores after one
highest and one lowest score are removed (one occurrence each when
extremes are tied). The gaps between the original extremes and the
consensus, diff_high and diff_low, flag a paper as conflicting when
either reaches the threshold.
"""

import logging
from dataclasses import dataclass

from .errors import InsufficientReviewsError

log = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 3.0


@dataclass
class ConsensusResult:
    paper_id: str
    n_reviews: int
    consensus: float
    diff_high: float
    diff_low: float
    conflicting: bool

    def to_json(self) -> dict:
        return {
            "paper_id": self.paper_id,
            "n_reviews": self.n_reviews,
            "consensus": self.consensus,
            "diff_high": self.diff_high,
            "diff_low": self.diff_low,
            "conflicting": self.conflicting,
        }

    @classmethod
    def from_json(cls, row: dict) -> "ConsensusResult":
        return cls(
            paper_id=row["paper_id"],
            n_reviews=int(row["n_reviews"]),
            consensus=float(row["consensus"]),
            diff_high=float(row["diff_high"]),
            diff_low=float(row["diff_low"]),
            conflicting=bool(row["conflicting"]),
        )


def consensus(scores, threshold: float = DEFAULT_THRESHOLD, paper_id: str = "") -> ConsensusResult:
    """Score one paper; requires at least three ratings."""
    scores = list(scores)
    if len(scores) < 3:
        raise InsufficientReviewsError(
            f"consensus needs >= 3 scores, got {len(scores)}"
            + (f" for paper {paper_id}" if paper_id else "")
        )
    highest = max(scores)
    lowest = min(scores)
    trimmed = sorted(scores)[1:-1]
    value = sum(trimmed) / len(trimmed)
    diff_high = highest - value
    diff_low = value - lowest
    return ConsensusResult(
        paper_id=paper_id,
        n_reviews=len(scores),
        consensus=value,
        diff_high=diff_high,
        diff_low=diff_low,
        conflicting=diff_high >= threshold or diff_low >= threshold,
    )


def select_conflicting(store, threshold: float = DEFAULT_THRESHOLD) -> tuple:
    """Apply the rule storewide; returns (results, summary).

    Papers lacking three parseable ratings are excluded from the
    denominator (their reviews stay available elsewhere). Results are
    sorted by paper_id.
    """
    results = []
    excluded = 0
    for paper in store.papers():
        scores = [r.rating for r in store.reviews_for(paper.paper_id) if r.rating is not None]
        if len(scores) < 3:
            excluded += 1
            log.info("paper %s excluded: %d parseable ratings", paper.paper_id, len(scores))
            continue
        results.append(consensus(scores, threshold=threshold, paper_id=paper.paper_id))
    results.sort(key=lambda r: r.paper_id)
    considered = len(results)
    conflicting = sum(1 for r in results if r.conflicting)
    percentage = (100.0 * conflicting / considered) if considered else 0.0
    summary = {
        "considered": considered,
        "conflicting": conflicting,
        "excluded": excluded,
        "threshold": threshold,
        "percentage": percentage,
        "totals": format_totals(conflicting, considered),
    }
    return results, summary


def format_totals(conflicting: int, considered: int) -> str:
    """Render a totals cell like ``6,634 (14.6%)``."""
    pct = (100.0 * conflicting / considered) if considered else 0.0
    return f"{conflicting:,} ({pct:.1f}%)"

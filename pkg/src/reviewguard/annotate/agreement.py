"""Inter-rater agreement statistics for the validation protocol.

Cohen's kappa compares two raters through observed vs chance agreement
from their marginal label distributions; Fleiss's kappa generalizes to
m raters over an item x category count matrix. The round-level report
treats every taxonomy category as a binary presence/absence label,
averages pairwise Cohen values over annotator pairs and categories, and
averages per-category Fleiss values the same way.
"""

from dataclasses import dataclass, field
from itertools import combinations

from ..errors import ReviewGuardError
from ..taxonomy import CATEGORY_ORDER


def cohen_kappa(a, b) -> float:
    """kappa = (p_o - p_e) / (1 - p_e) over two equal-length label sequences.

    Degenerate full agreement on a single label (p_e = 1, p_o = 1)
    returns 1.0.
    """
    a = list(a)
    b = list(b)
    if len(a) != len(b):
        raise ReviewGuardError(f"length mismatch: {len(a)} vs {len(b)}")
    if not a:
        raise ReviewGuardError("empty label sequences")
    n = len(a)
    p_o = sum(1 for x, y in zip(a, b) if x == y) / n

    counts_a: dict = {}
    counts_b: dict = {}
    for x in a:
        counts_a[x] = counts_a.get(x, 0) + 1
    for y in b:
        counts_b[y] = counts_b.get(y, 0) + 1
    p_e = sum(counts_a.get(label, 0) * counts_b.get(label, 0) for label in counts_a) / (n * n)

    if p_e >= 1.0:
        return 1.0
    kappa = (p_o - p_e) / (1.0 - p_e)
    return min(1.0, max(-1.0, kappa))


def fleiss_kappa(table, m: int) -> float:
    """Fleiss's kappa over an item x category count matrix with m raters per item."""
    if m < 2:
        raise ReviewGuardError(f"fleiss kappa needs >= 2 raters, got {m}")
    rows = [list(row) for row in table]
    if not rows:
        raise ReviewGuardError("empty rating matrix")
    for i, row in enumerate(rows):
        if sum(row) != m:
            raise ReviewGuardError(f"row {i} sums to {sum(row)}, expected {m}")
    n_items = len(rows)
    n_cats = len(rows[0])

    # Per-item agreement P_i, then its mean.
    p_bar = sum(
        (sum(c * c for c in row) - m) / (m * (m - 1)) for row in rows
    ) / n_items
    # Chance agreement from pooled category proportions.
    totals = [sum(row[j] for row in rows) for j in range(n_cats)]
    grand = n_items * m
    p_e = sum((t / grand) ** 2 for t in totals)

    if p_e >= 1.0:
        return 1.0
    kappa = (p_bar - p_e) / (1.0 - p_e)
    return min(1.0, max(-1.0, kappa))


@dataclass
class AgreementReport:
    round_label: str
    n_items: int
    raters: list
    per_category: dict
    cohen_avg: float
    fleiss_avg: float
    excluded_categories: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "round": self.round_label,
            "n_items": self.n_items,
            "raters": list(self.raters),
            "per_category": self.per_category,
            "cohen_avg": self.cohen_avg,
            "fleiss_avg": self.fleiss_avg,
            "excluded_categories": list(self.excluded_categories),
            "summary": format_kappa_summary(self.cohen_avg, self.fleiss_avg),
        }


def format_kappa_summary(cohen_avg: float, fleiss_avg: float) -> str:
    """Render the round summary, e.g. ``0.4899 and 0.4740``."""
    return f"{cohen_avg:.4f} and {fleiss_avg:.4f}"


def agreement_report(records, reference=None, round_label: str = "") -> AgreementReport:
    """Round-level agreement over annotation records plus a machine reference.

    Categories used by no rater in the round have undefined kappa; they
    are excluded from the averages and listed in the report footnote.
    """
    by_rater: dict = {}
    for record in list(records) + list(reference or []):
        by_rater.setdefault(record.annotator_id, {})[record.review_id] = record.categories()

    raters = sorted(by_rater)
    if len(raters) < 2:
        raise ReviewGuardError(f"agreement needs >= 2 annotators, got {len(raters)}")
    item_sets = [set(by_rater[r]) for r in raters]
    items = sorted(set.intersection(*item_sets))
    if not items:
        raise ReviewGuardError("annotators share no items (disjoint item sets)")

    m = len(raters)
    per_category: dict = {}
    excluded = []
    cohen_values = []
    fleiss_values = []
    for code in CATEGORY_ORDER:
        used = any(code in by_rater[r][item] for r in raters for item in items)
        if not used:
            excluded.append(code)
            continue
        vectors = {
            r: [1 if code in by_rater[r][item] else 0 for item in items] for r in raters
        }
        pair_kappas = {}
        for r1, r2 in combinations(raters, 2):
            pair_kappas[f"{r1}|{r2}"] = cohen_kappa(vectors[r1], vectors[r2])
        cohen_cat = sum(pair_kappas.values()) / len(pair_kappas)
        table = [
            [sum(vectors[r][i] for r in raters), m - sum(vectors[r][i] for r in raters)]
            for i in range(len(items))
        ]
        fleiss_cat = fleiss_kappa(table, m)
        per_category[code] = {
            "pairs": pair_kappas,
            "cohen_avg": cohen_cat,
            "fleiss": fleiss_cat,
        }
        cohen_values.append(cohen_cat)
        fleiss_values.append(fleiss_cat)

    if not cohen_values:
        raise ReviewGuardError("no category was used by any rater in this round")
    return AgreementReport(
        round_label=round_label,
        n_items=len(items),
        raters=raters,
        per_category=per_category,
        cohen_avg=sum(cohen_values) / len(cohen_values),
        fleiss_avg=sum(fleiss_values) / len(fleiss_values),
        excluded_categories=excluded,
    )

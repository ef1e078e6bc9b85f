"""Synthetic review generation: six deficient archetypes plus one
sufficient review per conflicting paper.

Every generated record is validated (minimum length, no long verbatim
span copied from the abstract, no category echo left in the body) and
carries full provenance. Generation failures never shrink the output
silently: they land in the gap manifest so the 7-per-paper count
identity always reconciles.
"""

import datetime
import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from string import Template

from .annotate.prompts import load_template, template_hash
from .errors import BackendError, ReviewGuardError
from .taxonomy import CATEGORY_ORDER, SR, category

log = logging.getLogger(__name__)

DEFAULT_MIN_TOKENS = 40
DEFAULT_OVERLAP_NGRAM = 12


@dataclass
class SyntheticReview:
    synthetic_id: str
    paper_id: str
    target_category: str
    text: str
    model_id: str
    template_hash: str
    sampling: dict
    created_at: str

    def to_json(self) -> dict:
        return {
            "synthetic_id": self.synthetic_id,
            "paper_id": self.paper_id,
            "target_category": self.target_category,
            "text": self.text,
            "model_id": self.model_id,
            "template_hash": self.template_hash,
            "sampling": dict(self.sampling),
            "created_at": self.created_at,
        }

    @classmethod
    def from_json(cls, row: dict) -> "SyntheticReview":
        return cls(
            synthetic_id=row["synthetic_id"],
            paper_id=row["paper_id"],
            target_category=row["target_category"],
            text=row["text"],
            model_id=row.get("model_id", ""),
            template_hash=row.get("template_hash", ""),
            sampling=dict(row.get("sampling", {})),
            created_at=row.get("created_at", ""),
        )


@dataclass
class AugmentConfig:
    min_tokens: int = DEFAULT_MIN_TOKENS
    overlap_ngram: int = DEFAULT_OVERLAP_NGRAM
    retries: int = 1


def _now_iso() -> str:
    return datetime.datetime.now(tz=datetime.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def template_name_for(code: str) -> str:
    return f"augment_{code.lower()}"


def _tokens(text: str) -> list:
    return [t for t in re.split(r"\s+", text.lower()) if t]


def ngram_overlap(text: str, source: str, n: int) -> bool:
    """True when text shares an n-token contiguous span with source."""
    a = _tokens(text)
    b = _tokens(source)
    if len(a) < n or len(b) < n:
        return False
    grams = {tuple(b[i : i + n]) for i in range(len(b) - n + 1)}
    return any(tuple(a[i : i + n]) in grams for i in range(len(a) - n + 1))


def strip_category_echo(text: str, code: str) -> str:
    """Drop lines that merely echo the target category name or code."""
    names = {code.lower(), category(code).name.lower()}
    kept = []
    for line in text.splitlines():
        bare = line.strip().strip(":#*-").strip().lower()
        if bare in names or (bare.startswith("category") and any(n in bare for n in names)):
            continue
        kept.append(line)
    return "\n".join(kept).strip()


def check_record(record: SyntheticReview, abstract: str, config: AugmentConfig) -> list:
    """Return the list of failed rule names (empty means valid)."""
    failures = []
    if len(_tokens(record.text)) < config.min_tokens:
        failures.append("length")
    if ngram_overlap(record.text, abstract, config.overlap_ngram):
        failures.append("overlap")
    return failures


def generate_for_paper(paper, client, config: AugmentConfig | None = None,
                       templates: dict | None = None, now=_now_iso) -> tuple:
    """Generate the 7-record set for one conflicting paper.

    Returns (records, gaps); categories that still fail validation or
    the backend after one retry become gap entries instead of records.
    """
    if not paper.abstract.strip():
        raise ReviewGuardError(f"paper {paper.paper_id} has an empty abstract")
    config = config or AugmentConfig()
    records = []
    gaps = []
    for code in CATEGORY_ORDER:
        tpl_text = (templates or {}).get(code) or load_template(template_name_for(code))
        prompt = Template(tpl_text).substitute(
            title=paper.title,
            abstract=paper.abstract,
            category_name=category(code).name,
            category_definition=category(code).definition,
        )
        outcome = _generate_one(paper, code, prompt, tpl_text, client, config, now)
        if isinstance(outcome, SyntheticReview):
            records.append(outcome)
        else:
            gaps.append(outcome)
    return records, gaps


def _generate_one(paper, code, prompt, tpl_text, client, config, now):
    attempts = 0
    reason = "unknown"
    for attempt in range(config.retries + 1):
        attempts = attempt + 1
        try:
            text, _ = client.chat([{"role": "user", "content": prompt}])
        except BackendError as exc:
            reason = f"backend: {exc}"
            continue
        candidate = SyntheticReview(
            synthetic_id=f"{paper.paper_id}::{code}",
            paper_id=paper.paper_id,
            target_category=code,
            text=strip_category_echo(text, code),
            model_id=client.config.model_id,
            template_hash=template_hash(tpl_text),
            sampling={"temperature": client.config.temperature, "top_p": client.config.top_p},
            created_at=now(),
        )
        failures = check_record(candidate, paper.abstract, config)
        if not failures:
            return candidate
        reason = "validation: " + ",".join(failures)
    log.warning("paper %s category %s: gap after %d attempts (%s)",
                paper.paper_id, code, attempts, reason)
    return {"paper_id": paper.paper_id, "category": code, "reason": reason,
            "attempts": attempts}


def generate_batch(store, paper_ids, client, config: AugmentConfig | None = None,
                   now=_now_iso, max_workers: int | None = None) -> tuple:
    """Generate for many papers with bounded parallelism across papers.

    Per-paper category generation stays sequential. Output is ordered by
    (paper_id, category rank) no matter the completion order.
    """
    config = config or AugmentConfig()
    paper_ids = sorted(set(paper_ids))
    workers = max_workers or client.config.max_in_flight

    def run(paper_id):
        return generate_for_paper(store.paper(paper_id), client, config=config, now=now)

    all_records = []
    all_gaps = []
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        for records, gaps in pool.map(run, paper_ids):
            all_records.extend(records)
            all_gaps.extend(gaps)
    rank = {code: i for i, code in enumerate(CATEGORY_ORDER)}
    all_records.sort(key=lambda r: (r.paper_id, rank[r.target_category]))
    all_gaps.sort(key=lambda g: (g["paper_id"], rank[g["category"]]))
    return all_records, all_gaps


def validate_synthetic(batch, abstracts: dict | None = None,
                       config: AugmentConfig | None = None) -> dict:
    """Batch validation report: per-rule pass/fail counts plus offenders."""
    batch = list(batch)
    config = config or AugmentConfig()
    abstracts = abstracts or {}
    length_failures = []
    overlap_failures = []
    duplicate_failures = []
    seen_texts: dict = {}
    for record in batch:
        if len(_tokens(record.text)) < config.min_tokens:
            length_failures.append(record.synthetic_id)
        abstract = abstracts.get(record.paper_id)
        if abstract and ngram_overlap(record.text, abstract, config.overlap_ngram):
            overlap_failures.append(record.synthetic_id)
        key = (record.paper_id, record.text)
        if key in seen_texts:
            duplicate_failures.append(record.synthetic_id)
        else:
            seen_texts[key] = record.synthetic_id
    n = len(batch)
    return {
        "n_records": n,
        "length": {"fail": len(length_failures), "pass": n - len(length_failures),
                   "failed_ids": length_failures},
        "overlap": {"fail": len(overlap_failures), "pass": n - len(overlap_failures),
                    "failed_ids": overlap_failures},
        "duplicate": {"fail": len(duplicate_failures), "pass": n - len(duplicate_failures),
                      "failed_ids": duplicate_failures},
    }


def reconcile_counts(n_papers: int, n_records: int, n_gaps: int) -> bool:
    """The count identity: 7 x papers processed = records + gap entries."""
    return len(CATEGORY_ORDER) * n_papers == n_records + n_gaps


def expected_synthetic_total(n_conflicting: int) -> int:
    return len(CATEGORY_ORDER) * n_conflicting

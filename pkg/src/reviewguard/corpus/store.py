"""Append-only, idempotent local store for papers and reviews.

Layout under the store root:

* ``papers.jsonl`` / ``reviews.jsonl`` -- canonical record files, one
  entity per line, rewritten atomically in deterministic order;
* ``journal.jsonl`` -- write-ahead log, one line per upsert that actually
  changed state (no-op upserts are not journaled, which is what makes
  re-running an ingest byte-identical);
* ``progress.json`` -- per venue/year pagination watermark for resume.

A single writer owns mutation; readers are safe once ``commit`` returns.
"""

import threading
from pathlib import Path

from ..errors import StoreError
from ..jsonio import canonical_dumps, append_jsonl, read_json, read_jsonl, write_json, write_jsonl
from .records import PaperRecord, ReviewRecord

PAPERS_FILE = "papers.jsonl"
REVIEWS_FILE = "reviews.jsonl"
JOURNAL_FILE = "journal.jsonl"
PROGRESS_FILE = "progress.json"

# Default venue rating scale; sources rarely declare one.
DEFAULT_RATING_SCALE = (1, 10)


class Store:
    def __init__(self, root, rating_scales=None):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._papers = {}
        self._reviews = {}
        self._dirty = False
        self._lock = threading.Lock()
        self._rating_scales = dict(rating_scales or {})
        self._load()

    def _load(self) -> None:
        papers_path = self.root / PAPERS_FILE
        reviews_path = self.root / REVIEWS_FILE
        if papers_path.exists():
            for row in read_jsonl(papers_path):
                record = PaperRecord.from_json(row)
                self._papers[record.paper_id] = record
        if reviews_path.exists():
            for row in read_jsonl(reviews_path):
                record = ReviewRecord.from_json(row)
                self._reviews[record.review_id] = record

    # -- scale handling -------------------------------------------------

    def rating_scale(self, venue: str) -> tuple:
        return tuple(self._rating_scales.get(venue, DEFAULT_RATING_SCALE))

    def _flag_out_of_scale(self, review: ReviewRecord, venue: str) -> None:
        if review.rating is None:
            return
        lo, hi = self.rating_scale(venue)
        if not (lo <= review.rating <= hi):
            review.raw_fields["_rating_out_of_scale"] = "true"

    # -- mutation -------------------------------------------------------

    def upsert_paper(self, record: PaperRecord) -> bool:
        """Insert or replace; returns True when state actually changed."""
        with self._lock:
            existing = self._papers.get(record.paper_id)
            if existing is not None and existing.to_json() == record.to_json():
                return False
            self._papers[record.paper_id] = record
            self._journal("paper", record.paper_id)
            self._dirty = True
            return True

    def upsert_review(self, record: ReviewRecord) -> bool:
        with self._lock:
            paper = self._papers.get(record.paper_id)
            if paper is None:
                raise StoreError(
                    f"review {record.review_id} references unknown paper {record.paper_id}"
                )
            self._flag_out_of_scale(record, paper.venue)
            existing = self._reviews.get(record.review_id)
            if existing is not None and existing.to_json() == record.to_json():
                return False
            self._reviews[record.review_id] = record
            if record.review_id not in paper.review_ids:
                paper.review_ids.append(record.review_id)
                paper.review_ids.sort()
                self._journal("paper", paper.paper_id)
            self._journal("review", record.review_id)
            self._dirty = True
            return True

    def _journal(self, entity: str, key: str) -> None:
        append_jsonl(self.root / JOURNAL_FILE, {"entity": entity, "id": key})

    def commit(self) -> None:
        """Rewrite record files when anything changed since load/commit."""
        with self._lock:
            if not self._dirty:
                return
            papers = sorted(self._papers.values(), key=lambda p: (p.venue, p.year, p.paper_id))
            write_jsonl(self.root / PAPERS_FILE, (p.to_json() for p in papers))
            reviews = sorted(self._reviews.values(), key=self._review_sort_key)
            write_jsonl(self.root / REVIEWS_FILE, (r.to_json() for r in reviews))
            self._dirty = False

    def _review_sort_key(self, review: ReviewRecord):
        paper = self._papers[review.paper_id]
        return (paper.venue, paper.year, paper.paper_id, review.review_id)

    # -- progress watermarks for resumable ingest -----------------------

    def get_progress(self, venue: str, year: int) -> dict:
        path = self.root / PROGRESS_FILE
        if not path.exists():
            return {}
        return read_json(path).get(f"{venue}/{year}", {})

    def set_progress(self, venue: str, year: int, offset: int, complete: bool) -> None:
        path = self.root / PROGRESS_FILE
        state = read_json(path) if path.exists() else {}
        entry = {"offset": offset, "complete": complete}
        if state.get(f"{venue}/{year}") == entry:
            return
        state[f"{venue}/{year}"] = entry
        write_json(path, state)

    # -- read paths -----------------------------------------------------

    def paper(self, paper_id: str) -> PaperRecord:
        try:
            return self._papers[paper_id]
        except KeyError:
            raise StoreError(f"unknown paper {paper_id}") from None

    def papers(self, venue=None, year=None, paper_ids=None):
        """Papers sorted by (venue, year, paper_id), optionally filtered."""
        wanted = set(paper_ids) if paper_ids is not None else None
        out = [
            p
            for p in self._papers.values()
            if (venue is None or p.venue == venue)
            and (year is None or p.year == year)
            and (wanted is None or p.paper_id in wanted)
        ]
        out.sort(key=lambda p: (p.venue, p.year, p.paper_id))
        return out

    def reviews_for(self, paper_id: str):
        paper = self.paper(paper_id)
        return sorted(
            (self._reviews[rid] for rid in paper.review_ids if rid in self._reviews),
            key=lambda r: r.review_id,
        )

    def review(self, review_id: str) -> ReviewRecord:
        try:
            return self._reviews[review_id]
        except KeyError:
            raise StoreError(f"unknown review {review_id}") from None

    def load(self, venue=None, year=None, paper_ids=None):
        """Yield papers, each followed by its reviews, in deterministic order."""
        for paper in self.papers(venue=venue, year=year, paper_ids=paper_ids):
            yield paper
            yield from self.reviews_for(paper.paper_id)

    def check_integrity(self) -> list:
        """Full-scan referential check; returns a list of problem strings."""
        problems = []
        for review in self._reviews.values():
            if review.paper_id not in self._papers:
                problems.append(f"review {review.review_id} -> missing paper {review.paper_id}")
        for paper in self._papers.values():
            for rid in paper.review_ids:
                if rid not in self._reviews:
                    problems.append(f"paper {paper.paper_id} lists missing review {rid}")
        return problems

    def counts(self) -> tuple:
        return len(self._papers), len(self._reviews)

    def state_digest(self) -> str:
        """Canonical digest over all records; used in dataset manifests."""
        import hashlib

        h = hashlib.sha256()
        for paper in self.papers():
            h.update(canonical_dumps(paper.to_json()).encode("utf-8"))
            for review in self.reviews_for(paper.paper_id):
                h.update(canonical_dumps(review.to_json()).encode("utf-8"))
        return h.hexdigest()

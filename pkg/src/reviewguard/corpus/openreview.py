"""HTTP acquisition from an OpenReview-v2-style notes API.

The client only assumes the note-listing contract
(``/notes?content.venueid=...&offset=...&limit=...`` and
``/notes?forum=<paper>``); everything venue-specific lives in the
config's venue map. Fetching is resumable through the store's progress
watermarks and idempotent through its journaled upserts.
"""

import datetime
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import httpx

from ..errors import IngestError
from ..jsonio import canonical_dumps
from .records import PaperRecord, ReviewRecord, parse_rating
from .store import Store

log = logging.getLogger(__name__)

TOKEN_ENV = "REVIEWGUARD_OPENREVIEW_TOKEN"

DEFAULT_VENUE_MAP = {
    "ICLR": "ICLR.cc/{year}/Conference",
    "NeurIPS": "NeurIPS.cc/{year}/Conference",
}

RETRYABLE_STATUS = {408, 429, 500, 502, 503, 504}

# Review metadata keys that stay out of the concatenated text body.
METADATA_KEYS = {"rating", "confidence"}


@dataclass
class ApiConfig:
    base_url: str
    token_env: str = TOKEN_ENV
    page_limit: int = 100
    max_in_flight: int = 4
    timeout: float = 30.0
    max_attempts: int = 3
    backoff_base: float = 0.5
    venue_map: dict = field(default_factory=lambda: dict(DEFAULT_VENUE_MAP))
    data_cutoff: str | None = None

    def venue_id(self, venue: str, year: int) -> str:
        try:
            template = self.venue_map[venue]
        except KeyError:
            raise IngestError(f"venue {venue!r} has no source mapping") from None
        return template.format(year=year)

    def cutoff_ms(self) -> int | None:
        if not self.data_cutoff:
            return None
        day = datetime.date.fromisoformat(self.data_cutoff)
        end = datetime.datetime.combine(day, datetime.time.max, tzinfo=datetime.timezone.utc)
        return int(end.timestamp() * 1000)


def _value(content_field):
    """Unwrap v2 ``{"value": x}`` content fields; pass v1 fields through."""
    if isinstance(content_field, dict) and "value" in content_field:
        return content_field["value"]
    return content_field


def _is_review(note: dict) -> bool:
    invitations = note.get("invitations") or []
    if isinstance(invitations, str):
        invitations = [invitations]
    invitation = note.get("invitation")
    if invitation:
        invitations = list(invitations) + [invitation]
    if any("Official_Review" in inv for inv in invitations):
        return True
    return "rating" in (note.get("content") or {})


def _iso_from_ms(ms) -> str | None:
    if not isinstance(ms, (int, float)):
        return None
    dt = datetime.datetime.fromtimestamp(ms / 1000.0, tz=datetime.timezone.utc)
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


def _parse_paper(note: dict, venue: str, year: int) -> PaperRecord | None:
    content = note.get("content") or {}
    paper_id = note.get("id")
    title = _value(content.get("title"))
    abstract = _value(content.get("abstract"))
    if not paper_id or not isinstance(title, str) or not isinstance(abstract, str):
        log.warning("skipping malformed submission note: %s", canonical_dumps(note))
        return None
    return PaperRecord(paper_id=paper_id, venue=venue, year=year, title=title, abstract=abstract)


def _parse_review(note: dict, paper_id: str) -> ReviewRecord | None:
    review_id = note.get("id")
    content = note.get("content") or {}
    if not review_id:
        log.warning("skipping malformed review note: %s", canonical_dumps(note))
        return None
    raw_fields = {}
    text_parts = []
    for key, value in content.items():
        unwrapped = _value(value)
        raw_fields[key] = unwrapped if isinstance(unwrapped, str) else canonical_dumps(unwrapped)
        if key in METADATA_KEYS:
            continue
        if isinstance(unwrapped, str) and unwrapped.strip():
            # Source field order preserved; fields joined by blank lines.
            text_parts.append(unwrapped.strip())
    return ReviewRecord(
        review_id=review_id,
        paper_id=paper_id,
        text="\n\n".join(text_parts),
        rating=parse_rating(_value(content.get("rating"))),
        confidence=parse_rating(_value(content.get("confidence"))),
        created_at=_iso_from_ms(note.get("cdate")),
        raw_fields=raw_fields,
    )


class OpenReviewClient:
    def __init__(self, api: ApiConfig, transport=None, sleep=time.sleep):
        self.api = api
        self._sleep = sleep
        headers = {}
        token = os.environ.get(api.token_env or "", "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        self._http = httpx.Client(
            base_url=api.base_url, headers=headers, timeout=api.timeout, transport=transport
        )

    def close(self) -> None:
        self._http.close()

    def _get_notes(self, params: dict) -> dict:
        last_error = None
        for attempt in range(1, self.api.max_attempts + 1):
            try:
                response = self._http.get("/notes", params=params)
            except httpx.HTTPError as exc:
                last_error = exc
            else:
                if response.status_code == 200:
                    return response.json()
                if response.status_code not in RETRYABLE_STATUS:
                    raise IngestError(
                        f"source returned HTTP {response.status_code} for {params}"
                    )
                last_error = IngestError(f"HTTP {response.status_code}")
            if attempt < self.api.max_attempts:
                self._sleep(self.api.backoff_base * 2 ** (attempt - 1))
        raise IngestError(f"network failure after {self.api.max_attempts} attempts: {last_error}")

    def list_submissions(self, venue_id: str, offset: int) -> list:
        payload = self._get_notes(
            {"content.venueid": venue_id, "offset": offset, "limit": self.api.page_limit}
        )
        return payload.get("notes", [])

    def list_forum(self, forum_id: str) -> list:
        notes = []
        offset = 0
        while True:
            payload = self._get_notes(
                {"forum": forum_id, "offset": offset, "limit": self.api.page_limit}
            )
            page = payload.get("notes", [])
            notes.extend(page)
            if len(page) < self.api.page_limit:
                return notes
            offset += self.api.page_limit


def fetch_venue(store: Store, venue: str, year: int, api: ApiConfig,
                transport=None, resume: bool = True, sleep=time.sleep) -> tuple:
    """Ingest one venue/year; returns (papers, reviews) processed this run.

    Papers without any review are not stored. A network failure aborts
    with a resume token naming the last unfinished page; already-fetched
    pages are journaled and survive the abort.
    """
    client = OpenReviewClient(api, transport=transport, sleep=sleep)
    venue_id = api.venue_id(venue, year)
    cutoff = api.cutoff_ms()
    offset = 0
    progress = store.get_progress(venue, year) if resume else {}
    if progress and not progress.get("complete", False):
        offset = int(progress.get("offset", 0))
    n_papers = 0
    n_reviews = 0
    try:
        while True:
            try:
                notes = client.list_submissions(venue_id, offset)
            except IngestError as exc:
                store.commit()
                raise IngestError(
                    str(exc), resume_token={"venue": venue, "year": year, "offset": offset}
                ) from exc

            papers = []
            for note in notes:
                if cutoff is not None and isinstance(note.get("cdate"), (int, float)) \
                        and note["cdate"] > cutoff:
                    continue
                paper = _parse_paper(note, venue, year)
                if paper is not None:
                    papers.append(paper)

            def fetch_replies(paper):
                return paper, client.list_forum(paper.paper_id)

            with ThreadPoolExecutor(max_workers=max(1, api.max_in_flight)) as pool:
                try:
                    fetched = list(pool.map(fetch_replies, papers))
                except IngestError as exc:
                    store.commit()
                    raise IngestError(
                        str(exc), resume_token={"venue": venue, "year": year, "offset": offset}
                    ) from exc

            # Store writes stay on this thread: single-writer discipline.
            for paper, forum_notes in fetched:
                reviews = []
                for note in forum_notes:
                    if note.get("id") == paper.paper_id or not _is_review(note):
                        continue
                    if cutoff is not None and isinstance(note.get("cdate"), (int, float)) \
                            and note["cdate"] > cutoff:
                        continue
                    review = _parse_review(note, paper.paper_id)
                    if review is not None:
                        reviews.append(review)
                if not reviews:
                    continue
                store.upsert_paper(paper)
                for review in reviews:
                    store.upsert_review(review)
                n_papers += 1
                n_reviews += len(reviews)

            exhausted = len(notes) < api.page_limit
            offset += api.page_limit
            store.set_progress(venue, year, offset, complete=exhausted)
            if exhausted:
                break
        store.commit()
        return n_papers, n_reviews
    finally:
        client.close()

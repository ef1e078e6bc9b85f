"""Paper and review record types plus source-field parsing rules."""

from dataclasses import dataclass, field


@dataclass
class PaperRecord:
    paper_id: str
    venue: str
    year: int
    title: str
    abstract: str
    review_ids: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "paper_id": self.paper_id,
            "venue": self.venue,
            "year": self.year,
            "title": self.title,
            "abstract": self.abstract,
            "review_ids": list(self.review_ids),
        }

    @classmethod
    def from_json(cls, row: dict) -> "PaperRecord":
        return cls(
            paper_id=row["paper_id"],
            venue=row["venue"],
            year=int(row["year"]),
            title=row.get("title", ""),
            abstract=row.get("abstract", ""),
            review_ids=list(row.get("review_ids", [])),
        )


@dataclass
class ReviewRecord:
    review_id: str
    paper_id: str
    text: str
    rating: int | None = None
    confidence: int | None = None
    created_at: str | None = None
    raw_fields: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "review_id": self.review_id,
            "paper_id": self.paper_id,
            "text": self.text,
            "rating": self.rating,
            "confidence": self.confidence,
            "created_at": self.created_at,
            "raw_fields": dict(self.raw_fields),
        }

    @classmethod
    def from_json(cls, row: dict) -> "ReviewRecord":
        return cls(
            review_id=row["review_id"],
            paper_id=row["paper_id"],
            text=row.get("text", ""),
            rating=row.get("rating"),
            confidence=row.get("confidence"),
            created_at=row.get("created_at"),
            raw_fields=dict(row.get("raw_fields", {})),
        )


def parse_rating(raw) -> int | None:
    """Extract an integer score from a source rating field.

    Sources encode ratings as "N: description"; the integer before the
    first colon wins, then a plain integer parse, then None.
    """
    if raw is None:
        return None
    if isinstance(raw, bool):
        return None
    if isinstance(raw, int):
        return raw
    text = str(raw).strip()
    if not text:
        return None
    head, sep, _ = text.partition(":")
    if sep:
        try:
            return int(head.strip())
        except ValueError:
            pass
    try:
        return int(text)
    except ValueError:
        return None

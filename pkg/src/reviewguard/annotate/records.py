"""Annotation record type and its verdict/subtype invariant."""

from dataclasses import dataclass, field

from ..errors import ReviewGuardError
from ..taxonomy import DR, SR, SUBTYPE_ORDER

SOURCES = ("llm", "human", "synthetic-template")


class AnnotationInvariantError(ReviewGuardError):
    """Verdict/subtype combination violates the taxonomy contract."""


@dataclass
class AnnotationRecord:
    review_id: str
    verdict: str
    subtypes: list = field(default_factory=list)
    rationale: str = ""
    source: str = "llm"
    annotator_id: str = ""
    round: int = 0
    template_hash: str | None = None
    criteria_version: str | None = None

    def __post_init__(self):
        self.subtypes = sorted(set(self.subtypes), key=SUBTYPE_ORDER.index)
        self.validate()

    def validate(self) -> None:
        if self.verdict not in (SR, DR):
            raise AnnotationInvariantError(f"verdict must be SR or DR, got {self.verdict!r}")
        unknown = set(self.subtypes) - set(SUBTYPE_ORDER)
        if unknown:
            raise AnnotationInvariantError(f"unknown subtypes: {sorted(unknown)}")
        if self.verdict == DR and not self.subtypes:
            raise AnnotationInvariantError(
                f"verdict DR requires at least one subtype (review {self.review_id})"
            )
        if self.verdict == SR and self.subtypes:
            raise AnnotationInvariantError(
                f"verdict SR must carry no subtypes (review {self.review_id})"
            )
        if self.source not in SOURCES:
            raise AnnotationInvariantError(f"unknown source {self.source!r}")
        if self.round < 0:
            raise AnnotationInvariantError(f"round must be >= 0, got {self.round}")

    def key(self) -> tuple:
        return (self.review_id, self.annotator_id, self.round)

    def categories(self) -> set:
        """The category set this record asserts: {SR} or its subtypes."""
        return {SR} if self.verdict == SR else set(self.subtypes)

    def to_json(self) -> dict:
        return {
            "review_id": self.review_id,
            "verdict": self.verdict,
            "subtypes": list(self.subtypes),
            "rationale": self.rationale,
            "source": self.source,
            "annotator_id": self.annotator_id,
            "round": self.round,
            "template_hash": self.template_hash,
            "criteria_version": self.criteria_version,
        }

    @classmethod
    def from_json(cls, row: dict) -> "AnnotationRecord":
        return cls(
            review_id=row["review_id"],
            verdict=row["verdict"],
            subtypes=list(row.get("subtypes", [])),
            rationale=row.get("rationale", ""),
            source=row.get("source", "llm"),
            annotator_id=row.get("annotator_id", ""),
            round=int(row.get("round", 0)),
            template_hash=row.get("template_hash"),
            criteria_version=row.get("criteria_version"),
        )

"""Strict extraction of annotation records from model output."""

import json

from ..errors import AnnotationParseError
from ..taxonomy import SUBTYPE_ORDER
from .records import AnnotationInvariantError, AnnotationRecord


def extract_json_array(raw: str) -> list:
    """Return the first balanced JSON array in raw text.

    Tracks string and escape state so brackets inside review quotes do
    not fool the scan.
    """
    start = None
    depth = 0
    in_string = False
    escaped = False
    for i, ch in enumerate(raw):
        if start is None:
            if ch == "[":
                start = i
                depth = 1
            continue
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth == 0:
                snippet = raw[start : i + 1]
                try:
                    return json.loads(snippet)
                except json.JSONDecodeError as exc:
                    raise AnnotationParseError(
                        f"balanced array is not valid JSON: {exc.msg}", raw=raw
                    ) from exc
    raise AnnotationParseError("no balanced JSON array in model output", raw=raw)


def parse_annotation(raw: str, expected_ids, annotator_id: str = "llm",
                     source: str = "llm", round_: int = 0,
                     template_hash: str | None = None,
                     criteria_version: str | None = None) -> list:
    """Parse model output into validated records covering expected_ids exactly."""
    if not raw or not raw.strip():
        raise AnnotationParseError("empty model output", raw=raw)
    expected = set(expected_ids)
    items = extract_json_array(raw)
    if not isinstance(items, list):
        raise AnnotationParseError("model output is not a JSON array", raw=raw)

    records = []
    seen = set()
    for item in items:
        if not isinstance(item, dict):
            raise AnnotationParseError(f"array element is not an object: {item!r}", raw=raw)
        review_id = item.get("review_id")
        if review_id not in expected:
            raise AnnotationParseError(f"unexpected review_id {review_id!r}", raw=raw)
        if review_id in seen:
            raise AnnotationParseError(f"duplicate review_id {review_id!r}", raw=raw)
        seen.add(review_id)
        subtypes = item.get("subtypes", [])
        if not isinstance(subtypes, list):
            raise AnnotationParseError(f"subtypes must be a list for {review_id}", raw=raw)
        unknown = set(subtypes) - set(SUBTYPE_ORDER)
        if unknown:
            raise AnnotationParseError(
                f"unknown subtype strings for {review_id}: {sorted(unknown)}", raw=raw
            )
        try:
            records.append(AnnotationRecord(
                review_id=review_id,
                verdict=item.get("verdict", ""),
                subtypes=subtypes,
                rationale=str(item.get("rationale", "")),
                source=source,
                annotator_id=annotator_id,
                round=round_,
                template_hash=template_hash,
                criteria_version=criteria_version,
            ))
        except AnnotationInvariantError as exc:
            raise AnnotationParseError(str(exc), raw=raw) from exc

    missing = expected - seen
    if missing:
        raise AnnotationParseError(
            f"incomplete coverage: missing {sorted(missing)}", raw=raw
        )
    return records


def render_annotation_reply(records) -> str:
    """Inverse of parse_annotation for fixtures and round-trip checks."""
    payload = [
        {
            "review_id": r.review_id,
            "verdict": r.verdict,
            "subtypes": list(r.subtypes),
            "rationale": r.rationale,
        }
        for r in records
    ]
    return json.dumps(payload, ensure_ascii=False, indent=2)

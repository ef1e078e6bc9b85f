"""Append-only annotation store shared by the CLI and the validation server.

Every write is appended; the effective view keeps the latest record per
(review_id, annotator_id, round) key. Machine-pass records (round 0)
are never superseded by later appends: the original audit trail stays
as written.
"""

import threading
from pathlib import Path

from ..errors import ReviewGuardError
from ..jsonio import append_jsonl, read_jsonl
from .records import AnnotationRecord


class AnnotationStore:
    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._records: dict = {}
        if self.path.exists():
            for row in read_jsonl(self.path):
                record = AnnotationRecord.from_json(row)
                self._records[record.key()] = record

    def append(self, record: AnnotationRecord) -> None:
        with self._lock:
            key = record.key()
            existing = self._records.get(key)
            if existing is not None and existing.round == 0 and existing.source == "llm":
                raise ReviewGuardError(
                    f"machine-pass record for {key} is append-only and already present"
                )
            append_jsonl(self.path, record.to_json())
            self._records[key] = record

    def extend(self, records) -> int:
        n = 0
        for record in records:
            self.append(record)
            n += 1
        return n

    def get(self, review_id: str, annotator_id: str, round_: int) -> AnnotationRecord | None:
        return self._records.get((review_id, annotator_id, round_))

    def for_round(self, round_: int) -> list:
        out = [r for r in self._records.values() if r.round == round_]
        out.sort(key=lambda r: r.key())
        return out

    def machine_pass(self) -> list:
        out = [r for r in self._records.values() if r.round == 0 and r.source == "llm"]
        out.sort(key=lambda r: r.key())
        return out

    def machine_label(self, review_id: str) -> AnnotationRecord | None:
        for record in self.machine_pass():
            if record.review_id == review_id:
                return record
        return None

    def annotators(self, round_: int) -> list:
        return sorted({r.annotator_id for r in self.for_round(round_)})

    def all_records(self) -> list:
        out = list(self._records.values())
        out.sort(key=lambda r: r.key())
        return out

"""Macro-averaged scoring of external detector predictions.

Zero-division cells follow the 0/0 -> 0 convention (degenerate models
legitimately produce all-zero rows) and every such cell is annotated in
the report, one note per affected class or label.
"""

from dataclasses import dataclass, field

from .errors import CoverageError, ReviewGuardError
from .taxonomy import DR, SR, SUBTYPE_ORDER

BINARY_CLASSES = (SR, DR)


@dataclass
class PredictionRecord:
    example_id: str
    task: str
    pred_binary: str | None = None
    pred_labels: list | None = None
    scores: list | None = None

    def __post_init__(self):
        if self.task not in ("binary", "multilabel"):
            raise ReviewGuardError(f"unknown task {self.task!r}")
        if self.task == "binary":
            if self.pred_binary not in BINARY_CLASSES or self.pred_labels is not None:
                raise ReviewGuardError(
                    f"binary prediction {self.example_id} must set pred_binary only"
                )
        else:
            if self.pred_binary is not None or self.pred_labels is None:
                raise ReviewGuardError(
                    f"multilabel prediction {self.example_id} must set pred_labels only"
                )
            if len(self.pred_labels) != len(SUBTYPE_ORDER) \
                    or any(b not in (0, 1) for b in self.pred_labels):
                raise ReviewGuardError(
                    f"prediction {self.example_id} has a malformed label vector"
                )

    def to_json(self) -> dict:
        return {
            "example_id": self.example_id,
            "task": self.task,
            "pred_binary": self.pred_binary,
            "pred_labels": self.pred_labels,
            "scores": self.scores,
        }

    @classmethod
    def from_json(cls, row: dict) -> "PredictionRecord":
        return cls(
            example_id=row["example_id"],
            task=row["task"],
            pred_binary=row.get("pred_binary"),
            pred_labels=row.get("pred_labels"),
            scores=row.get("scores"),
        )


@dataclass
class EvalReport:
    task: str
    regime: str
    per_class: dict
    macro_precision: float
    macro_recall: float
    macro_f1: float
    micro_precision: float
    micro_recall: float
    micro_f1: float
    support: dict
    zero_division_notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "task": self.task,
            "regime": self.regime,
            "per_class": self.per_class,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "micro_precision": self.micro_precision,
            "micro_recall": self.micro_recall,
            "micro_f1": self.micro_f1,
            "support": self.support,
            "zero_division_notes": list(self.zero_division_notes),
        }

    @classmethod
    def from_json(cls, row: dict) -> "EvalReport":
        return cls(
            task=row["task"],
            regime=row.get("regime", ""),
            per_class=row["per_class"],
            macro_precision=row["macro_precision"],
            macro_recall=row["macro_recall"],
            macro_f1=row["macro_f1"],
            micro_precision=row.get("micro_precision", 0.0),
            micro_recall=row.get("micro_recall", 0.0),
            micro_f1=row.get("micro_f1", 0.0),
            support=row.get("support", {}),
            zero_division_notes=list(row.get("zero_division_notes", [])),
        )


def _check_coverage(pred_ids, gold_ids) -> None:
    pred_set = set(pred_ids)
    if len(pred_set) != len(pred_ids):
        dupes = sorted({i for i in pred_ids if pred_ids.count(i) > 1})
        raise CoverageError(f"duplicate predictions for {dupes}", extra=dupes)
    gold_set = set(gold_ids)
    missing = sorted(gold_set - pred_set)
    extra = sorted(pred_set - gold_set)
    if missing or extra:
        raise CoverageError(
            f"coverage mismatch: {len(missing)} missing, {len(extra)} extra",
            missing=missing, extra=extra,
        )


def _prf(tp: int, fp: int, fn: int, label: str, notes: list) -> dict:
    parts = []
    if tp + fp == 0:
        precision = 0.0
        parts.append("precision")
    else:
        precision = tp / (tp + fp)
    if tp + fn == 0:
        recall = 0.0
        parts.append("recall")
    else:
        recall = tp / (tp + fn)
    if precision + recall == 0.0:
        f1 = 0.0
        if tp + fp == 0 or tp + fn == 0:
            parts.append("f1")
    else:
        f1 = 2 * precision * recall / (precision + recall)
    if parts:
        notes.append(f"{label}: zero division in {', '.join(parts)} -> 0")
    return {"precision": precision, "recall": recall, "f1": f1,
            "tp": tp, "fp": fp, "fn": fn}


def _finalize(task, regime, per_class, support, notes) -> EvalReport:
    n = len(per_class)
    tp = sum(c["tp"] for c in per_class.values())
    fp = sum(c["fp"] for c in per_class.values())
    fn = sum(c["fn"] for c in per_class.values())
    micro_p = tp / (tp + fp) if tp + fp else 0.0
    micro_r = tp / (tp + fn) if tp + fn else 0.0
    micro_f1 = 2 * micro_p * micro_r / (micro_p + micro_r) if micro_p + micro_r else 0.0
    return EvalReport(
        task=task,
        regime=regime,
        per_class=per_class,
        macro_precision=sum(c["precision"] for c in per_class.values()) / n,
        macro_recall=sum(c["recall"] for c in per_class.values()) / n,
        macro_f1=sum(c["f1"] for c in per_class.values()) / n,
        micro_precision=micro_p,
        micro_recall=micro_r,
        micro_f1=micro_f1,
        support=support,
        zero_division_notes=notes,
    )


def macro_binary(preds, gold: dict, regime: str = "") -> EvalReport:
    """Per-class P/R/F1 over {SR, DR}, macro = unweighted mean of the two."""
    preds = list(preds)
    _check_coverage([p.example_id for p in preds], list(gold))
    predicted = {p.example_id: p.pred_binary for p in preds}
    notes: list = []
    per_class = {}
    for cls in BINARY_CLASSES:
        tp = sum(1 for i, g in gold.items() if g == cls and predicted[i] == cls)
        fp = sum(1 for i, g in gold.items() if g != cls and predicted[i] == cls)
        fn = sum(1 for i, g in gold.items() if g == cls and predicted[i] != cls)
        per_class[cls] = _prf(tp, fp, fn, cls, notes)
    support = {cls: sum(1 for g in gold.values() if g == cls) for cls in BINARY_CLASSES}
    return _finalize("binary", regime, per_class, support, notes)


def macro_multilabel(preds, gold: dict, regime: str = "") -> EvalReport:
    """Per-label P/R/F1 over the six subtypes, macro over labels."""
    preds = list(preds)
    _check_coverage([p.example_id for p in preds], list(gold))
    for example_id, bits in gold.items():
        if len(bits) != len(SUBTYPE_ORDER):
            raise ReviewGuardError(f"gold vector for {example_id} is malformed")
    predicted = {p.example_id: p.pred_labels for p in preds}
    notes: list = []
    per_class = {}
    for j, label in enumerate(SUBTYPE_ORDER):
        tp = sum(1 for i, bits in gold.items() if bits[j] == 1 and predicted[i][j] == 1)
        fp = sum(1 for i, bits in gold.items() if bits[j] == 0 and predicted[i][j] == 1)
        fn = sum(1 for i, bits in gold.items() if bits[j] == 1 and predicted[i][j] == 0)
        per_class[label] = _prf(tp, fp, fn, label, notes)
    support = {
        label: sum(bits[j] for bits in gold.values())
        for j, label in enumerate(SUBTYPE_ORDER)
    }
    return _finalize("multilabel", regime, per_class, support, notes)


def regime_report(reports: dict, baseline: str = "R_R") -> dict:
    """Cross-regime comparison with ratio-to-baseline annotations."""
    if len(reports) < 2:
        raise ReviewGuardError("regime comparison needs >= 2 reports")
    if baseline not in reports:
        raise ReviewGuardError(f"baseline regime {baseline!r} missing from reports")
    metrics = ("macro_precision", "macro_recall", "macro_f1")
    base = reports[baseline]
    cells = {
        regime: {m: getattr(report, m) for m in metrics}
        for regime, report in reports.items()
    }
    ratios: dict = {}
    for regime, values in cells.items():
        ratios[regime] = {}
        for m in metrics:
            base_value = getattr(base, m)
            ratios[regime][m] = "n/a" if base_value == 0 else values[m] / base_value
    max_flags = {
        m: max(cells, key=lambda regime: cells[regime][m]) for m in metrics
    }
    return {
        "baseline": baseline,
        "metrics": list(metrics),
        "cells": cells,
        "ratios": ratios,
        "max_flags": max_flags,
    }


def format_metric(value: float) -> str:
    """Four-decimal metric cell, e.g. ``0.7073``."""
    return f"{value:.4f}"

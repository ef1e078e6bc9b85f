"""Train/test regime assembly over real and synthetic annotated reviews.

Splits are paper-level: every example derived from a paper (its real
reviews and its synthetic reviews alike) lands in that paper's split,
which is the only assignment that prevents cross-split leakage between
a real review and the synthetics generated from the same paper.
Stratification operates on papers, keyed by whether the paper carries
any real deficient review.
"""

import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ReviewGuardError, StratificationError
from .jsonio import read_json, read_jsonl, write_json, write_jsonl
from .taxonomy import DR, SR, SUBTYPE_ORDER, subtype_bits

REGIMES = ("R_R", "R_S", "RS_R", "RS_RS")
SPLITS = ("train", "validation", "test")
DEFAULT_RATIOS = (0.8, 0.1, 0.1)

# Which origins each split may contain, per regime. Validation mirrors
# the training composition (it steers training-time selection).
REGIME_ORIGINS = {
    "R_R": {"train": ("real",), "validation": ("real",), "test": ("real",)},
    "R_S": {"train": ("real",), "validation": ("real",), "test": ("synthetic",)},
    "RS_R": {"train": ("real", "synthetic"), "validation": ("real", "synthetic"),
             "test": ("real",)},
    "RS_RS": {"train": ("real", "synthetic"), "validation": ("real", "synthetic"),
              "test": ("real", "synthetic")},
}


@dataclass
class EncodedExample:
    example_id: str
    text: str
    origin: str
    binary_target: str
    multilabel_target: list
    paper_id: str
    split: str = ""

    def __post_init__(self):
        if self.binary_target == SR and any(self.multilabel_target):
            raise ReviewGuardError(
                f"SR example {self.example_id} must have an all-zero label vector"
            )
        if self.binary_target == DR and not any(self.multilabel_target):
            raise ReviewGuardError(
                f"DR example {self.example_id} must set at least one label bit"
            )

    def to_json(self) -> dict:
        return {
            "example_id": self.example_id,
            "text": self.text,
            "origin": self.origin,
            "binary_target": self.binary_target,
            "multilabel_target": list(self.multilabel_target),
            "paper_id": self.paper_id,
            "split": self.split,
        }

    @classmethod
    def from_json(cls, row: dict) -> "EncodedExample":
        return cls(
            example_id=row["example_id"],
            text=row.get("text", ""),
            origin=row["origin"],
            binary_target=row["binary_target"],
            multilabel_target=list(row["multilabel_target"]),
            paper_id=row["paper_id"],
            split=row.get("split", ""),
        )


@dataclass
class DatasetManifest:
    regime: str
    seed: int
    ratios: tuple
    split_counts: dict
    paper_counts: dict
    source_hashes: dict = field(default_factory=dict)
    subtype_order: tuple = SUBTYPE_ORDER

    def to_json(self) -> dict:
        return {
            "regime": self.regime,
            "seed": self.seed,
            "ratios": list(self.ratios),
            "split_counts": self.split_counts,
            "paper_counts": self.paper_counts,
            "source_hashes": dict(self.source_hashes),
            "subtype_order": list(self.subtype_order),
        }


def encode_real(review, annotation) -> EncodedExample:
    return EncodedExample(
        example_id=review.review_id,
        text=review.text,
        origin="real",
        binary_target=annotation.verdict,
        multilabel_target=subtype_bits(annotation.subtypes),
        paper_id=review.paper_id,
    )


def encode_synthetic(synthetic) -> EncodedExample:
    if synthetic.target_category == SR:
        binary, bits = SR, [0] * len(SUBTYPE_ORDER)
    else:
        binary, bits = DR, subtype_bits([synthetic.target_category])
    return EncodedExample(
        example_id=synthetic.synthetic_id,
        text=synthetic.text,
        origin="synthetic",
        binary_target=binary,
        multilabel_target=bits,
        paper_id=synthetic.paper_id,
    )


def _allocate(n: int, ratios) -> list:
    """Largest-remainder allocation of n papers over the split ratios."""
    raw = [n * r for r in ratios]
    counts = [int(x) for x in raw]
    remainder = n - sum(counts)
    order = sorted(range(len(ratios)), key=lambda i: (-(raw[i] - counts[i]), i))
    for i in order[:remainder]:
        counts[i] += 1
    return counts


def assign_paper_splits(paper_strata: dict, ratios, seed: int) -> dict:
    """Deterministic stratified paper-to-split assignment."""
    if abs(sum(ratios) - 1.0) > 1e-9 or len(ratios) != 3:
        raise ReviewGuardError(f"ratios must be 3 values summing to 1, got {ratios}")
    assignment = {}
    strata: dict = {}
    for paper_id, stratum in paper_strata.items():
        strata.setdefault(stratum, []).append(paper_id)
    for stratum in sorted(strata):
        papers = sorted(strata[stratum])
        random.Random(f"{seed}:{stratum}").shuffle(papers)
        counts = _allocate(len(papers), ratios)
        index = 0
        for split, count in zip(SPLITS, counts):
            for paper_id in papers[index : index + count]:
                assignment[paper_id] = split
            index += count
    return assignment


def build(regime: str, real_examples, synthetic_examples, out_dir,
          ratios=DEFAULT_RATIOS, seed: int = 0, source_hashes: dict | None = None) -> DatasetManifest:
    """Assemble one regime into out_dir/{train,validation,test}.jsonl + manifest."""
    if regime not in REGIMES:
        raise ReviewGuardError(f"unknown regime {regime!r}; expected one of {REGIMES}")
    real_examples = list(real_examples)
    synthetic_examples = list(synthetic_examples)
    if not real_examples:
        raise ReviewGuardError("annotated corpus is empty")
    if regime != "R_R" and not synthetic_examples:
        raise ReviewGuardError(f"regime {regime} needs a non-empty synthetic store")

    paper_strata: dict = {}
    for example in real_examples + synthetic_examples:
        paper_strata.setdefault(example.paper_id, "sr")
    for example in real_examples:
        if example.binary_target == DR:
            paper_strata[example.paper_id] = "dr"
    assignment = assign_paper_splits(paper_strata, ratios, seed)

    origins = REGIME_ORIGINS[regime]
    by_split: dict = {split: [] for split in SPLITS}
    for example in real_examples + synthetic_examples:
        split = assignment[example.paper_id]
        if example.origin in origins[split]:
            example.split = split
            by_split[split].append(example)

    split_counts: dict = {}
    for split in SPLITS:
        counts: dict = {}
        for example in by_split[split]:
            origin_counts = counts.setdefault(example.origin, {SR: 0, DR: 0})
            origin_counts[example.binary_target] += 1
        split_counts[split] = counts
        class_totals = {
            cls: sum(origin_counts[cls] for origin_counts in counts.values())
            for cls in (SR, DR)
        }
        missing = [cls for cls, total in class_totals.items() if total == 0]
        if missing:
            raise StratificationError(
                f"stratification impossible: split {split} lacks {missing} "
                f"(counts: {split_counts})"
            )

    out_dir = Path(out_dir)
    for split in SPLITS:
        rows = sorted(by_split[split], key=lambda e: (e.paper_id, e.origin, e.example_id))
        write_jsonl(out_dir / f"{split}.jsonl", (e.to_json() for e in rows))

    manifest = DatasetManifest(
        regime=regime,
        seed=seed,
        ratios=tuple(ratios),
        split_counts=split_counts,
        paper_counts={
            split: len({e.paper_id for e in by_split[split]}) for split in SPLITS
        },
        source_hashes=dict(source_hashes or {}),
    )
    write_json(out_dir / "manifest.json", manifest.to_json())
    return manifest


def leakage_check(out_dir) -> dict:
    """Verify split hygiene on the emitted files themselves.

    Fails iff a paper_id appears in more than one split, or a synthetic
    example derived from a test-split paper appears in train.
    """
    out_dir = Path(out_dir)
    if not (out_dir / "manifest.json").exists():
        raise ReviewGuardError(f"no manifest.json under {out_dir}")
    read_json(out_dir / "manifest.json")

    papers_by_split: dict = {}
    examples: dict = {}
    for split in SPLITS:
        path = out_dir / f"{split}.jsonl"
        if not path.exists():
            continue
        for row in read_jsonl(path):
            example = EncodedExample.from_json(row)
            papers_by_split.setdefault(example.paper_id, set()).add(split)
            examples.setdefault(split, []).append(example)

    violations = []
    for paper_id, splits in sorted(papers_by_split.items()):
        if len(splits) > 1:
            violations.append(
                f"paper {paper_id} appears in multiple splits: {sorted(splits)}"
            )
    test_papers = {
        e.paper_id for e in examples.get("test", [])
    }
    for example in examples.get("train", []):
        if example.origin == "synthetic" and example.paper_id in test_papers:
            violations.append(
                f"synthetic example {example.example_id} from test paper "
                f"{example.paper_id} appears in train"
            )
    return {"passed": not violations, "violations": violations}

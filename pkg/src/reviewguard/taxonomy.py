"""Responsibility taxonomy: SR plus the six deficient-review subtypes.

The operational definitions live in ``data/taxonomy.json`` so they can be
audited and reused by prompt templates without touching code. Subtype
order is canonical and shared by every multi-label encoding in the
pipeline.
"""

import json
from dataclasses import dataclass
from importlib import resources

SR = "SR"
DR = "DR"

SUBTYPE_ORDER = (
    "SUPERFICIALITY",
    "LACK_OF_CONSTRUCTIVENESS",
    "CURSORY_JUDGMENT",
    "OVERLY_HARSH_MALICIOUS",
    "UNINFORMED",
    "OTHERS",
)

# SR plus each subtype: the 7 generation/annotation targets.
CATEGORY_ORDER = (SR,) + SUBTYPE_ORDER


@dataclass(frozen=True)
class Category:
    code: str
    name: str
    definition: str


def _load_raw() -> dict:
    text = resources.files("reviewguard.data").joinpath("taxonomy.json").read_text("utf-8")
    return json.loads(text)


_RAW = _load_raw()

SUBTYPES = {
    entry["code"]: Category(entry["code"], entry["name"], entry["definition"])
    for entry in _RAW["subtypes"]
}
VERDICTS = {
    code: Category(code, entry["name"], entry["definition"])
    for code, entry in _RAW["verdicts"].items()
}

assert tuple(SUBTYPES) == SUBTYPE_ORDER, "taxonomy.json out of sync with canonical order"


def category(code: str) -> Category:
    """Look up SR or a subtype by canonical code."""
    if code == SR:
        return VERDICTS[SR]
    if code in SUBTYPES:
        return SUBTYPES[code]
    raise KeyError(f"unknown category code: {code!r}")


def all_categories() -> list[Category]:
    """SR followed by the six subtypes, in canonical order."""
    return [category(code) for code in CATEGORY_ORDER]


def subtype_bits(subtypes) -> list[int]:
    """Encode a subtype collection as the canonical 6-bit vector."""
    present = set(subtypes)
    unknown = present - set(SUBTYPE_ORDER)
    if unknown:
        raise ValueError(f"unknown subtype codes: {sorted(unknown)}")
    return [1 if code in present else 0 for code in SUBTYPE_ORDER]


def bits_to_subtypes(bits) -> list[str]:
    if len(bits) != len(SUBTYPE_ORDER):
        raise ValueError(f"expected {len(SUBTYPE_ORDER)} bits, got {len(bits)}")
    return [code for code, bit in zip(SUBTYPE_ORDER, bits) if bit]

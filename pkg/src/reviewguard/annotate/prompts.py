"""Prompt assembly for the annotation pass.

Templates are editable text files with ``$name`` placeholders; the
template hash travels with every record the run produces. Review texts
are embedded as JSON so that no review content can break the output
schema the model is asked to follow.
"""

import json
import logging
from importlib import resources
from string import Template

from ..errors import ReviewGuardError
from ..jsonio import sha256_text
from ..taxonomy import SUBTYPE_ORDER, all_categories

log = logging.getLogger(__name__)

DEFAULT_CHAR_BUDGET = 60000
TRUNCATION_MARKER = " ...[truncated]"
_MIN_REVIEW_CHARS = 80


def load_template(name: str = "annotation") -> str:
    return resources.files("reviewguard.data").joinpath(f"templates/{name}.txt").read_text("utf-8")


def template_hash(template: str) -> str:
    return sha256_text(template)[:16]


def definitions_block() -> str:
    return "\n".join(f"- {c.code} ({c.name}): {c.definition}" for c in all_categories())


def build_annotation_prompt(paper, reviews, template: str | None = None,
                            char_budget: int = DEFAULT_CHAR_BUDGET) -> str:
    """Render the annotation prompt for one paper and its reviews.

    When the rendered prompt exceeds the character budget, review texts
    are cut back starting from the last review, each cut marked with a
    truncation marker.
    """
    if not paper.abstract.strip():
        raise ReviewGuardError(f"paper {paper.paper_id} has an empty abstract")
    reviews = list(reviews)
    if not reviews:
        raise ReviewGuardError(f"paper {paper.paper_id} has no reviews to annotate")
    if template is None:
        template = load_template()
    tpl = Template(template)

    texts = [r.text for r in reviews]

    def render() -> str:
        payload = [
            {
                "review_id": r.review_id,
                "rating": r.rating,
                "confidence": r.confidence,
                "text": text,
            }
            for r, text in zip(reviews, texts)
        ]
        return tpl.substitute(
            title=paper.title,
            abstract=paper.abstract,
            definitions=definitions_block(),
            reviews_json=json.dumps(payload, ensure_ascii=False, indent=2),
            subtype_codes=", ".join(SUBTYPE_ORDER),
        )

    prompt = render()
    truncated = False
    while len(prompt) > char_budget:
        index = _last_cuttable(texts)
        if index is None:
            raise ReviewGuardError(
                f"prompt for paper {paper.paper_id} cannot fit budget {char_budget}"
            )
        keep = max(_MIN_REVIEW_CHARS, len(texts[index]) // 2)
        base = texts[index][:keep]
        if base.endswith(TRUNCATION_MARKER):
            texts[index] = base
        else:
            texts[index] = base + TRUNCATION_MARKER
        truncated = True
        prompt = render()
    if truncated:
        log.warning(
            "prompt for paper %s truncated to fit %d-char budget", paper.paper_id, char_budget
        )
    return prompt


def _last_cuttable(texts) -> int | None:
    for index in range(len(texts) - 1, -1, -1):
        stripped = texts[index]
        if stripped.endswith(TRUNCATION_MARKER):
            stripped = stripped[: -len(TRUNCATION_MARKER)]
        if len(stripped) > _MIN_REVIEW_CHARS:
            return index
    return None

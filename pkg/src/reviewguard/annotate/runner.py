"""LLM annotation driver: one prompt per paper, strict parse, one repair retry."""

import logging
from concurrent.futures import ThreadPoolExecutor

from ..errors import AnnotationParseError
from .parsing import parse_annotation
from .prompts import DEFAULT_CHAR_BUDGET, build_annotation_prompt, load_template, template_hash

log = logging.getLogger(__name__)

REPAIR_INSTRUCTION = (
    "Your previous reply could not be parsed: {error}. "
    "Reply again with only the corrected JSON array, nothing else."
)


def annotate_papers(store, paper_ids, client, template: str | None = None,
                    criteria_version: str = "v1",
                    char_budget: int = DEFAULT_CHAR_BUDGET,
                    max_workers: int | None = None) -> tuple:
    """Annotate every review of the given papers.

    Returns (records, failures). Records are committed in paper_id order
    regardless of completion order; each failure entry names the paper
    and carries the raw payload of the second parse attempt.
    """
    if template is None:
        template = load_template()
    tpl_hash = template_hash(template)
    paper_ids = sorted(set(paper_ids))
    workers = max_workers or client.config.max_in_flight

    def annotate_one(paper_id):
        paper = store.paper(paper_id)
        reviews = store.reviews_for(paper_id)
        prompt = build_annotation_prompt(paper, reviews, template=template,
                                         char_budget=char_budget)
        expected = [r.review_id for r in reviews]
        messages = [{"role": "user", "content": prompt}]
        reply, _ = client.chat(messages)
        try:
            return parse_annotation(
                reply, expected, annotator_id=client.config.model_id,
                source="llm", round_=0, template_hash=tpl_hash,
                criteria_version=criteria_version,
            )
        except AnnotationParseError as exc:
            log.warning("paper %s: parse failed (%s); requesting repair", paper_id, exc)
            repair = messages + [
                {"role": "assistant", "content": reply},
                {"role": "user", "content": REPAIR_INSTRUCTION.format(error=exc)},
            ]
            reply2, _ = client.chat(repair)
            return parse_annotation(
                reply2, expected, annotator_id=client.config.model_id,
                source="llm", round_=0, template_hash=tpl_hash,
                criteria_version=criteria_version,
            )

    results = {}
    failures = []
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        for paper_id, outcome in zip(paper_ids, pool.map(_guard(annotate_one), paper_ids)):
            results[paper_id] = outcome

    records = []
    for paper_id in paper_ids:
        outcome = results[paper_id]
        if isinstance(outcome, Exception):
            failures.append({
                "paper_id": paper_id,
                "error": str(outcome),
                "raw": getattr(outcome, "raw", None),
            })
        else:
            records.extend(outcome)
    return records, failures


def _guard(fn):
    def wrapped(arg):
        try:
            return fn(arg)
        except Exception as exc:  # noqa: BLE001 - per-paper isolation
            return exc

    return wrapped

"""LLM-driven review annotation and inter-rater agreement."""

from .records import AnnotationInvariantError, AnnotationRecord
from .prompts import build_annotation_prompt, load_template, template_hash
from .parsing import parse_annotation, render_annotation_reply, extract_json_array
from .agreement import (
    AgreementReport,
    agreement_report,
    cohen_kappa,
    fleiss_kappa,
    format_kappa_summary,
)
from .runner import annotate_papers
from .storage import AnnotationStore

__all__ = [
    "AnnotationInvariantError",
    "AnnotationRecord",
    "build_annotation_prompt",
    "load_template",
    "template_hash",
    "parse_annotation",
    "render_annotation_reply",
    "extract_json_array",
    "AgreementReport",
    "agreement_report",
    "cohen_kappa",
    "fleiss_kappa",
    "format_kappa_summary",
    "annotate_papers",
    "AnnotationStore",
]

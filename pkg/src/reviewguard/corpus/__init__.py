"""Acquisition and local persistence of papers and reviews."""

from .records import PaperRecord, ReviewRecord, parse_rating
from .store import Store
from .openreview import ApiConfig, OpenReviewClient, fetch_venue

__all__ = [
    "PaperRecord",
    "ReviewRecord",
    "parse_rating",
    "Store",
    "ApiConfig",
    "OpenReviewClient",
    "fetch_venue",
]

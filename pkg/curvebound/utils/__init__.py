# utils/__init__.py
from .logs import setup_logging
from .output import canonical_json, csv_text, to_jsonable, write_csv, write_json, write_text
from .progress import CheckTracker

__all__ = ["CheckTracker", "canonical_json", "csv_text", "setup_logging", "to_jsonable", "write_csv", "write_json",
           "write_text"]

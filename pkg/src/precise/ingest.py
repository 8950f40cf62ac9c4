"""Corpus loading and inclusion filtering.

Reports arrive as csv (``id,text`` header) or jsonl records and pass through
three checks in a fixed order: empty text, characters outside the whitelist,
then word count. The first failing check names the rejection reason; kept and
rejected reports always partition the input.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

from .textseg import tokenize_words

REASON_EMPTY = "EMPTY"
REASON_TOO_SHORT = "TOO_SHORT"
REASON_INVALID_CHARS = "INVALID_CHARS"
REJECTION_REASONS = (REASON_EMPTY, REASON_INVALID_CHARS, REASON_TOO_SHORT)

DEFAULT_MIN_WORDS = 5
# Punctuation allowed alongside letters, digits, and whitespace.
DEFAULT_ALLOWED_PUNCTUATION = frozenset(".,;:?!'\"()/%-+")


class CorpusFormatError(ValueError):
    """A corpus file failed to parse or violated a record invariant."""


@dataclass(frozen=True)
class Report:
    id: str
    text: str
    source: str


@dataclass(frozen=True)
class Rejection:
    report: Report
    reason: str


@dataclass(frozen=True)
class FilterOutcome:
    kept: Tuple[Report, ...]
    rejected: Tuple[Rejection, ...]


def _check_record(report_id: object, text: object, where: str, seen: set) -> Tuple[str, str]:
    if not isinstance(report_id, str) or not report_id.strip():
        raise CorpusFormatError(f"{where}: record id must be a nonempty string, got {report_id!r}")
    if not isinstance(text, str):
        raise CorpusFormatError(f"{where}: text must be a string, got {type(text).__name__}")
    if report_id in seen:
        raise CorpusFormatError(f"{where}: duplicate report id {report_id!r}")
    seen.add(report_id)
    return report_id, text


def _load_csv(path: Path) -> List[Report]:
    reports: List[Report] = []
    seen: set = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise CorpusFormatError(f"{path}: empty csv file")
        missing = {"id", "text"} - set(reader.fieldnames)
        if missing:
            raise CorpusFormatError(f"{path}: csv header missing column(s) {sorted(missing)}")
        for row in reader:
            where = f"{path}:line {reader.line_num}"
            rid, text = _check_record(row.get("id"), row.get("text"), where, seen)
            reports.append(Report(id=rid, text=text, source=where))
    return reports


def _load_jsonl(path: Path) -> List[Report]:
    reports: List[Report] = []
    seen: set = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            where = f"{path}:line {lineno}"
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{where}: invalid json ({exc.msg})") from exc
            if not isinstance(record, dict):
                raise CorpusFormatError(f"{where}: record must be an object")
            if "id" not in record or "text" not in record:
                raise CorpusFormatError(f"{where}: record missing 'id' or 'text'")
            rid, text = _check_record(record["id"], record["text"], where, seen)
            reports.append(Report(id=rid, text=text, source=where))
    return reports


def load_reports(path: Union[str, Path], format: str = "auto") -> List[Report]:
    """Load a corpus file, preserving record order.

    ``format`` is "csv", "jsonl", or "auto" (chosen from the file extension).
    """
    p = Path(path)
    fmt = format
    if fmt == "auto":
        suffix = p.suffix.lower()
        if suffix == ".csv":
            fmt = "csv"
        elif suffix in (".jsonl", ".ndjson"):
            fmt = "jsonl"
        else:
            raise CorpusFormatError(f"{p}: cannot infer format from extension {suffix!r}")
    if fmt == "csv":
        return _load_csv(p)
    if fmt == "jsonl":
        return _load_jsonl(p)
    raise ValueError(f"unknown corpus format {fmt!r}")


def _invalid_chars(text: str, allowed_punctuation: frozenset) -> bool:
    for ch in text:
        if ch.isalpha() or ch.isdigit() or ch.isspace():
            continue
        if ch in allowed_punctuation:
            continue
        return True
    return False


def filter_reports(
    reports: Iterable[Report],
    min_words: int = DEFAULT_MIN_WORDS,
    allowed_punctuation: frozenset = DEFAULT_ALLOWED_PUNCTUATION,
) -> FilterOutcome:
    """Partition reports into kept and rejected under the inclusion criteria.

    Checks run in the order EMPTY, INVALID_CHARS, TOO_SHORT; the first failure
    is the recorded reason. Rejection is data, not an error.
    """
    if min_words < 1:
        raise ValueError(f"min_words must be >= 1, got {min_words}")
    kept: List[Report] = []
    rejected: List[Rejection] = []
    for report in reports:
        if not report.text.strip():
            rejected.append(Rejection(report, REASON_EMPTY))
        elif _invalid_chars(report.text, allowed_punctuation):
            rejected.append(Rejection(report, REASON_INVALID_CHARS))
        elif len(tokenize_words(report.text)) < min_words:
            rejected.append(Rejection(report, REASON_TOO_SHORT))
        else:
            kept.append(report)
    return FilterOutcome(kept=tuple(kept), rejected=tuple(rejected))


def write_rejections(rejected: Sequence[Rejection], path: Union[str, Path]) -> None:
    """Write the rejection sidecar: one ``{"id", "reason"}`` object per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for rej in rejected:
            fh.write(json.dumps({"id": rej.report.id, "reason": rej.reason}) + "\n")


def write_reports_csv(reports: Sequence[Report], path: Union[str, Path]) -> None:
    """Write kept reports back out in the same csv shape they are loaded from."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "text"])
        for report in reports:
            writer.writerow([report.id, report.text])

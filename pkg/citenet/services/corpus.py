"""
Corpus ingestion and screening: parse judgment records, extract cited
provisions, remove duplicates, and apply the date / keyword / jurisdiction /
manual-exclusion screen.
"""

import hashlib
import io
import json
import logging
import os
import re
from typing import BinaryIO, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from pydantic import ValidationError

from citenet.errors import ConfigError, CorpusFormatError, DuplicateDocumentError, InputError
from citenet.models import CitationRuleSet, JudgmentDoc, ScreeningConfig, ScreeningReport
from citenet.utils.rule_library import RuleLibrary

logger = logging.getLogger(__name__)

Source = Union[bytes, bytearray, str, os.PathLike, BinaryIO]

RECORDS = "records"
RAW_TEXT = "raw_text"

RAW_HEADER = re.compile(r"^#\s*doc_id\s*=")

REASON_DUPLICATE = "duplicate"
REASON_DATE = "date window"
REASON_KEYWORD = "missing keywords"
REASON_JURISDICTION = "jurisdiction"
REASON_MANUAL = "manual exclusion"


def read_source(source: Source) -> str:
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    elif isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as f:
            data = f.read()
    else:
        data = source.read()
        if isinstance(data, str):
            return data

    try:
        return data.decode("utf-8-sig")
    except UnicodeDecodeError as e:
        raise CorpusFormatError(f"corpus is not valid UTF-8 ({e.reason} at byte {e.start})") from e


def _describe(error: ValidationError) -> str:
    parts = []
    for err in error.errors():
        location = ".".join(str(part) for part in err["loc"]) or "record"
        parts.append(f"{location}: {err['msg']}")
    return "; ".join(parts)


def _check_unique(docs: Sequence[JudgmentDoc]) -> None:
    seen, duplicates = set(), []
    for doc in docs:
        if doc.doc_id in seen:
            duplicates.append(doc.doc_id)
        seen.add(doc.doc_id)
    if duplicates:
        raise DuplicateDocumentError(duplicates)


def parse_corpus(source: Source, format: str = RECORDS) -> List[JudgmentDoc]:
    """
    Parse a corpus into judgments, in file order.

    `records` is newline-delimited JSON, one judgment per line. `raw_text`
    is plain text where each judgment starts with a header line
    `# doc_id=...; court=...; decision_date=...; cause_of_action=...; tags=a,b`.
    """
    text = read_source(source)
    if format == RECORDS:
        docs = _parse_records(text)
    elif format == RAW_TEXT:
        docs = _parse_raw_text(text)
    else:
        raise InputError(f"Unsupported corpus format: {format}")

    _check_unique(docs)
    logger.info("Parsed %d judgments (%s format)", len(docs), format)
    return docs


def _parse_records(text: str) -> List[JudgmentDoc]:
    docs = []
    for line_number, line in enumerate(io.StringIO(text), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as e:
            raise CorpusFormatError(f"malformed record ({e.msg})", line_number) from e
        if not isinstance(record, dict):
            raise CorpusFormatError("record is not an object", line_number)

        try:
            docs.append(JudgmentDoc.model_validate(record))
        except ValidationError as e:
            raise CorpusFormatError(f"invalid record: {_describe(e)}", line_number) from e
    return docs


def _parse_header(line: str, line_number: int) -> Dict[str, object]:
    fields: Dict[str, object] = {}
    for part in line.lstrip("#").split(";"):
        if not part.strip():
            continue
        key, sep, value = part.partition("=")
        if not sep:
            raise CorpusFormatError(f"header field without '=': {part.strip()!r}", line_number)
        fields[key.strip()] = value.strip()

    if "tags" in fields:
        fields["tags"] = [tag.strip() for tag in str(fields["tags"]).split(",") if tag.strip()]
    return fields


def _parse_raw_text(text: str) -> List[JudgmentDoc]:
    docs = []
    header: Optional[Dict[str, object]] = None
    header_line = 0
    body: List[str] = []

    def flush():
        if header is None:
            return
        try:
            docs.append(JudgmentDoc.model_validate({**header, "raw_text": "\n".join(body).strip()}))
        except ValidationError as e:
            raise CorpusFormatError(f"invalid document header: {_describe(e)}", header_line) from e

    for line_number, line in enumerate(io.StringIO(text), start=1):
        line = line.rstrip("\r\n")
        if RAW_HEADER.match(line):
            flush()
            header, header_line, body = _parse_header(line, line_number), line_number, []
        elif header is None:
            if line.strip():
                raise CorpusFormatError("text before the first document header", line_number)
        else:
            body.append(line)
    flush()
    return docs


def extract_citations(doc: JudgmentDoc, rules: Union[RuleLibrary, CitationRuleSet]) -> JudgmentDoc:
    """
    Populate a judgment's citations from its raw text. Repeated mentions of
    one provision collapse to a single citation; an empty result is legal.
    """
    if doc.raw_text is None:
        raise InputError(f"{doc.doc_id}: no raw_text to extract citations from")

    library = rules if isinstance(rules, RuleLibrary) else RuleLibrary(rules)
    citations = tuple(dict.fromkeys(library.find_citations(doc.raw_text)))
    if not citations:
        logger.warning("No citations found in %s", doc.doc_id)
    return doc.model_copy(update={"citations": citations})


def content_key(doc: JudgmentDoc) -> Tuple:
    """
    Duplicate key: sha256 of whitespace-normalized text when present,
    otherwise (court, decision_date, sorted citations).
    """
    if doc.raw_text is not None:
        normalized = " ".join(doc.raw_text.split())
        return ("text", hashlib.sha256(normalized.encode("utf-8")).hexdigest())
    citations = tuple(sorted(p.identity for p in doc.citations))
    return ("structure", doc.court, doc.decision_date.isoformat(), citations)


def deduplicate(docs: Sequence[JudgmentDoc]) -> Tuple[List[JudgmentDoc], List[str]]:
    """Keep the first occurrence of every duplicate group, preserving order"""
    kept, removed = [], []
    seen = set()
    for doc in docs:
        key = content_key(doc)
        if key in seen:
            removed.append(doc.doc_id)
            continue
        seen.add(key)
        kept.append(doc)

    if removed:
        logger.info("Removed %d duplicate record(s): %s", len(removed), ", ".join(removed))
    return kept, removed


def _has_keywords(doc: JudgmentDoc, keywords: Iterable[str]) -> bool:
    haystack = f"{doc.raw_text or ''} {doc.metadata_text()}".casefold()
    return all(keyword.casefold() in haystack for keyword in keywords)


def screen(docs: Sequence[JudgmentDoc], config: ScreeningConfig) -> Tuple[List[JudgmentDoc], ScreeningReport]:
    """
    Apply the screen in fixed order: date window, required keywords,
    jurisdiction, manual exclusions. Each removal is counted under its stage.
    """
    survivors = []
    removed: List[Tuple[str, str]] = []
    counts = {REASON_DATE: 0, REASON_KEYWORD: 0, REASON_JURISDICTION: 0, REASON_MANUAL: 0}
    jurisdiction = config.jurisdiction.casefold() if config.jurisdiction else None

    for doc in docs:
        if not (config.date_from <= doc.decision_date <= config.date_to):
            reason = REASON_DATE
        elif not _has_keywords(doc, config.required_keywords):
            reason = REASON_KEYWORD
        elif jurisdiction is not None and jurisdiction not in doc.court.casefold():
            reason = REASON_JURISDICTION
        elif doc.doc_id in config.exclusion_ids:
            reason = REASON_MANUAL
        else:
            survivors.append(doc)
            continue
        counts[reason] += 1
        removed.append((doc.doc_id, reason))

    report = ScreeningReport(
        initial_count=len(docs),
        date_filtered=counts[REASON_DATE],
        keyword_filtered=counts[REASON_KEYWORD],
        jurisdiction_filtered=counts[REASON_JURISDICTION],
        manually_excluded=counts[REASON_MANUAL],
        final_count=len(survivors),
        removed_ids=removed,
    )
    return survivors, report


def screen_corpus(docs: Sequence[JudgmentDoc], config: ScreeningConfig) -> Tuple[List[JudgmentDoc], ScreeningReport]:
    """Deduplicate, then screen; the report covers both steps"""
    unique, duplicates = deduplicate(docs)
    survivors, report = screen(unique, config)

    report = ScreeningReport(
        **{**report.model_dump(), "initial_count": len(docs),
           "duplicates_removed": len(duplicates),
           "removed_ids": [(doc_id, REASON_DUPLICATE) for doc_id in duplicates] + report.removed_ids},
    )
    logger.info("Screening kept %d of %d judgments", report.final_count, report.initial_count)
    return survivors, report


def load_screening_config(path: Union[str, os.PathLike]) -> ScreeningConfig:
    if not os.path.exists(path):
        raise ConfigError(f"screening config not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            return ScreeningConfig.model_validate(json.load(f))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e})") from e
    except ValidationError as e:
        raise ConfigError(f"{path}: {_describe(e)}") from e


def load_rules(path: Optional[Union[str, os.PathLike]] = None) -> CitationRuleSet:
    """Read and compile a ruleset; the bundled one when no path is given"""
    return RuleLibrary.load(str(path) if path is not None else None).ruleset

"""Reading annotated corpora and writing extraction records."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from .textmodel import AnnotatedDocument, parse_annotated_document


def read_corpus(paths: Iterable[str | Path]) -> list[AnnotatedDocument]:
    """Load documents from ``.jsonl`` files, plain markup files, or directories of either.

    JSON-lines records look like ``{"doc_id": ..., "text": ...}``; a plain file
    is one document whose id is the file stem.
    """
    docs = []
    for path in paths:
        path = Path(path)
        if path.is_dir():
            docs.extend(read_corpus(sorted(p for p in path.iterdir() if p.is_file())))
        elif path.suffix == ".jsonl":
            with path.open(encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, 1):
                    if not line.strip():
                        continue
                    record = json.loads(line)
                    doc_id = str(record.get("doc_id", f"{path.stem}:{lineno}"))
                    docs.append(parse_annotated_document(record["text"], doc_id))
        else:
            docs.append(parse_annotated_document(path.read_text(encoding="utf-8"), path.stem))
    return docs


def write_corpus(records: Iterable[tuple[str, str]], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for doc_id, text in records:
            fh.write(json.dumps({"doc_id": doc_id, "text": text}, ensure_ascii=False) + "\n")


def extraction_record(doc: AnnotatedDocument, extraction) -> dict:
    return {
        "doc_id": extraction.doc_id,
        "char_start": extraction.char_range[0],
        "char_end": extraction.char_range[1],
        "text": extraction.surface_text,
        "rule_id": extraction.rule_id,
        "score": extraction.score,
        "probes": [
            {"category": m.terminal.category, "text": doc.text(m.char_range), "confidence": m.confidence}
            for m in extraction.parse.terminal_matches()
            if m.is_probe
        ],
    }


def dump_extractions(pairs, fh) -> int:
    """Write ``(doc, extraction)`` pairs as JSON lines; returns the record count."""
    n = 0
    for doc, extraction in pairs:
        fh.write(json.dumps(extraction_record(doc, extraction), ensure_ascii=False) + "\n")
        n += 1
    return n

"""Operator command line: validate, stats, ask, repl, serve.

Exit codes: 0 success, 1 domain failure (violations found, no answer),
2 environment failure (missing directory, unparseable KB, bad weights).
Honors KBQA_KB_DIR, KBQA_PORT and KBQA_WEIGHTS; flags override env.
"""

from __future__ import annotations

import dataclasses
import json
import sys
from pathlib import Path

import click

from .config import DEFAULT_CONFIG
from .errors import KgqaError, ParseError, ValidationError
from .ranking import RankWeights
from .service import AskRequest, DialogService
from .store import SnapshotHolder, collect_violations, compute_stats, load_kb


def _fail(message: str, code: int = 2):
    click.echo(message, err=True)
    sys.exit(code)


def _resolve_kb_dir(kb_dir: str | None) -> Path:
    if not kb_dir:
        _fail("no KB directory given (argument or KBQA_KB_DIR)")
    path = Path(kb_dir)
    if not path.is_dir():
        _fail(f"KB directory not found: {path}")
    return path


def _load_weights(weights_path: str | None) -> RankWeights | None:
    if not weights_path:
        return None
    try:
        return RankWeights.load(weights_path)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        _fail(f"cannot load weights {weights_path}: {exc}")


def _make_service(kb_dir: str | None, weights_path: str | None, locale: str) -> DialogService:
    path = _resolve_kb_dir(kb_dir)
    holder = SnapshotHolder(path)
    try:
        holder.load()
    except (ParseError, ValidationError, OSError) as exc:
        _fail(f"cannot load KB from {path}: {exc}")
    config = dataclasses.replace(DEFAULT_CONFIG, locale=locale)
    return DialogService(holder, _load_weights(weights_path), config)


@click.group()
def main():
    """Knowledge-graph question answering over a structured KB directory."""


@main.command()
@click.argument("kb_dir", required=False, envvar="KBQA_KB_DIR")
def validate(kb_dir):
    """Check a KB directory; print violations and exit 1 if any."""
    path = _resolve_kb_dir(kb_dir)
    try:
        violations = collect_violations(path)
    except ParseError as exc:
        _fail(f"parse failure: {exc}")
    for violation in violations:
        click.echo(str(violation))
    click.echo(f"{len(violations)} violations")
    sys.exit(1 if violations else 0)


@main.command()
@click.argument("kb_dir", required=False, envvar="KBQA_KB_DIR")
@click.option("--qa-count", type=int, default=None, help="Legacy QA-pair count (default: meta.json).")
def stats(kb_dir, qa_count):
    """Print knowledge-management metrics for a KB directory."""
    path = _resolve_kb_dir(kb_dir)
    try:
        kb = load_kb(path)
    except (ParseError, ValidationError) as exc:
        _fail(f"cannot load KB from {path}: {exc}")
    if qa_count is not None and qa_count < 0:
        _fail("--qa-count must be >= 0")
    s = compute_stats(kb, qa_count)
    click.echo(f"QA pairs {s.qa_count}")
    click.echo(f"Entities {s.entity_count}")
    click.echo(f"Properties {s.property_count}")
    click.echo(f"CVT properties {s.cvt_property_count}")
    click.echo(f"Compr1 {s.compr1_rounded if s.compr1 is not None else 'undefined'}")
    click.echo(f"Compr2 {s.compr2_rounded if s.compr2 is not None else 'undefined'}")
    click.echo(f"CVTr {str(s.cvt_ratio_percent) + '%' if s.cvt_ratio is not None else 'undefined'}")


def _render_response(doc: dict) -> tuple[str, int]:
    """Plain-text rendering with stable field order, plus the exit code."""
    lines = [f"status: {doc['status']}"]
    exit_code = 0
    answer = doc.get("answer")
    if doc["status"] == "answered" and answer:
        kind = answer["kind"]
        if kind == "simple_text":
            lines.append(f"answer: {answer['text']}")
        elif kind == "key_value_tabs":
            lines.append("answer (tabs):")
            for tab in answer["tabs"]:
                lines.append(f"  [{tab['key']}] {tab['body']}")
        elif kind == "table":
            lines.append(f"answer (table {answer['schema_id']}):")
            lines.append("  " + " | ".join(answer["columns"]))
            for row in answer["rows"]:
                lines.append("  " + " | ".join(str(row[c]) for c in answer["columns"]))
            cell = answer.get("highlighted_cell")
            if cell:
                lines.append(f"highlighted: row {cell['row']} column {cell['column']}")
            if answer.get("missing_conditions"):
                lines.append("missing conditions: " + ", ".join(answer["missing_conditions"]))
        elif kind == "no_answer":
            lines.append(f"answer: none ({answer['reason']})")
            exit_code = 1
        if answer.get("explanation"):
            lines.append("explanation:")
            for step in answer["explanation"]:
                lines.append(f"  - {step['text']}")
        if answer.get("tips"):
            lines.append(f"tips: {answer['tips']}")
    elif doc["status"] == "recommended":
        for i, rec in enumerate(doc["recommendations"], start=1):
            lines.append(f"  {i}. {rec['display']}")
    else:
        exit_code = 1
    return "\n".join(lines), exit_code


@main.command()
@click.argument("kb_dir", required=False)
@click.argument("question", required=False)
@click.option("--weights", "weights_path", envvar="KBQA_WEIGHTS", default=None)
@click.option("--debug", is_flag=True, default=False, help="Include ranked graphs in JSON output.")
@click.option("--json", "as_json", is_flag=True, default=False, help="Emit the HTTP API structure.")
@click.option("--locale", default="zh", show_default=True)
def ask(kb_dir, question, weights_path, debug, as_json, locale):
    """Answer one question: ask [KB_DIR] QUESTION (KB_DIR may come from env)."""
    import os

    if question is None:
        kb_dir, question = os.environ.get("KBQA_KB_DIR"), kb_dir
    if question is None:
        _fail("no question given")
    service = _make_service(kb_dir, weights_path, locale)
    try:
        doc = service.ask_dict(AskRequest(question=question, debug=debug))
    except ValueError as exc:
        _fail(str(exc), code=1)
    except KgqaError as exc:
        _fail(f"pipeline failure: {exc}")
    if as_json:
        click.echo(json.dumps(doc, ensure_ascii=False, indent=2))
        real_answer = doc["status"] == "answered" and doc["answer"]["kind"] != "no_answer"
        sys.exit(0 if real_answer or doc["status"] == "recommended" else 1)
    text, exit_code = _render_response(doc)
    click.echo(text)
    sys.exit(exit_code)


@main.command()
@click.argument("kb_dir", required=False, envvar="KBQA_KB_DIR")
@click.option("--weights", "weights_path", envvar="KBQA_WEIGHTS", default=None)
@click.option("--locale", default="zh", show_default=True)
def repl(kb_dir, weights_path, locale):
    """Interactive loop sharing one session; empty line or EOF exits."""
    service = _make_service(kb_dir, weights_path, locale)
    session_id = DialogService.new_session_id()
    click.echo("kgqa repl - empty line to exit")
    while True:
        try:
            question = input("? ").strip()
        except (EOFError, KeyboardInterrupt):
            break
        if not question:
            break
        try:
            doc = service.ask_dict(AskRequest(question=question, session_id=session_id))
        except KgqaError as exc:
            click.echo(f"error: {exc}", err=True)
            continue
        text, _ = _render_response(doc)
        click.echo(text)


@main.command()
@click.argument("kb_dir", required=False, envvar="KBQA_KB_DIR")
@click.option("--port", type=int, envvar="KBQA_PORT", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--weights", "weights_path", envvar="KBQA_WEIGHTS", default=None)
def serve(kb_dir, port, host, weights_path):
    """Serve the HTTP API."""
    import uvicorn

    from .http_api import create_app

    path = _resolve_kb_dir(kb_dir)
    try:
        app = create_app(path, _load_weights(weights_path))
    except (ParseError, ValidationError) as exc:
        _fail(f"cannot load KB from {path}: {exc}")
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()

"""Operator command line.

Subcommands: validate, ask, repl, serve, eval, gen. Exit codes: 0 on
success, 1 on data or question failures, 2 on usage errors.
"""

from __future__ import annotations

import json
import sys
from datetime import date
from pathlib import Path

import click

from . import corpus
from .engine import Answered, Engine
from .errors import GridQAError
from .session import DEFAULT_TTL_SECONDS, SessionRegistry


def _fail(exc: Exception, code: str = "error") -> "SystemExit":
    click.echo(f"error[{code}]: {exc}", err=True)
    return SystemExit(1)


def _parse_date(_ctx, _param, value: str | None) -> date | None:
    if value is None:
        return None
    try:
        return date.fromisoformat(value)
    except ValueError:
        raise click.UsageError(f"invalid date {value!r}, expected YYYY-MM-DD") from None


def _load(data: str, evaluation_date: date | None = None) -> Engine:
    try:
        return Engine.load(data, evaluation_date=evaluation_date)
    except GridQAError as exc:
        raise _fail(exc, exc.code) from None
    except OSError as exc:
        raise _fail(exc, "io") from None


_data_option = click.option(
    "--data", default="demo", show_default=True, envvar="GRIDQA_DATA",
    help="Data directory with schema/vertices/edges/lexicon files.",
)
_date_option = click.option(
    "--evaluation-date", default=None, callback=_parse_date, envvar="GRIDQA_EVALUATION_DATE",
    help="Reference date for durations (YYYY-MM-DD).",
)


@click.group()
@click.version_option(package_name="gridqa")
def main() -> None:
    """Knowledge-graph question answering for power equipment data."""


@main.command()
@_data_option
@click.option("--json", "as_json", is_flag=True, help="Emit stats as JSON.")
def validate(data: str, as_json: bool) -> None:
    """Load and validate every data file, then print stats."""
    engine = _load(data)
    stats = {
        "classes": len(engine.schema.classes),
        "edge_types": len(engine.schema.edge_types),
        "vertices": len(engine.store.vertices),
        "edges": len(engine.store.edges),
        "lexicon_entries": len(engine.lexicon),
    }
    if as_json:
        click.echo(json.dumps(stats, indent=2, sort_keys=True))
    else:
        click.echo(
            f"{stats['classes']} classes, {stats['edge_types']} edge types, "
            f"{stats['vertices']} vertices, {stats['edges']} edges, "
            f"lexicon {stats['lexicon_entries']} entries"
        )


def _render(result: Answered) -> str:
    answer = result.answer
    lines: list[str] = []
    if result.traversal.question_type == "count":
        lines.append(f"count: {len(answer.answers)}")
    elif not answer.answers:
        lines.append("no answers" + (f" ({answer.empty_reason})" if answer.empty_reason else ""))
    else:
        by_id = {v.id: v for v in answer.vertices}
        for vid in answer.answers:
            vertex = by_id[vid]
            name = vertex.attrs.get("name") or vertex.attrs.get("defect_type") or vid
            detail = ", ".join(
                f"{k}={v}" for k, v in sorted(vertex.to_json()["attrs"].items()) if k != "name"
            )
            lines.append(f"{vid:<10} {vertex.class_name:<14} {name}" + (f"  [{detail}]" if detail else ""))
    lines.append(f"pseudo-query: {answer.pseudo_query}")
    stats = answer.stats
    lines.append(
        f"{len(answer.answers)} answer(s), {stats.get('vertices_touched', 0)} vertices touched,"
        f" {stats.get('elapsed_ms', 0):.1f}ms"
    )
    return "\n".join(lines)


@main.command()
@click.argument("question")
@_data_option
@_date_option
@click.option("--json", "as_json", is_flag=True, help="Emit the full answer document as JSON.")
@click.option(
    "--deps-file", type=click.Path(exists=True, dir_okay=False), default=None,
    help="CoNLL-U dependency tree overriding the built-in tagger.",
)
def ask(question: str, data: str, evaluation_date: date | None, as_json: bool, deps_file: str | None) -> None:
    """Answer one question against the graph."""
    if not question.strip():
        raise click.UsageError("empty question")
    engine = _load(data, evaluation_date)
    deps = Path(deps_file).read_text() if deps_file else None
    try:
        result = engine.answer(question, deps=deps)
    except GridQAError as exc:
        raise _fail(exc, exc.code) from None
    if as_json:
        click.echo(json.dumps(result.to_json(), indent=2, sort_keys=True))
    else:
        click.echo(_render(result))


@main.command()
@_data_option
@_date_option
@click.option("--ttl", default=DEFAULT_TTL_SECONDS, show_default=True, help="Session TTL in seconds.")
def repl(data: str, evaluation_date: date | None, ttl: int) -> None:
    """Interactive multi-round session.

    Plain lines are questions (follow-ups once context exists). Commands:
    /fresh resets context, /anchor <vertex> pins a knowledge node,
    /context prints the inherited target and constraints, /quit exits.
    """
    engine = _load(data, evaluation_date)
    registry = SessionRegistry(engine, ttl_seconds=ttl)
    session_id = registry.create().id
    has_context = False
    click.echo("gridqa repl — /fresh, /anchor <vertex>, /context, /quit")
    while True:
        try:
            line = input("? ").strip()
        except (EOFError, KeyboardInterrupt):
            click.echo("")
            break
        if not line:
            continue
        if line in ("/quit", "/exit"):
            break
        try:
            if line == "/fresh":
                session_id = registry.create().id
                has_context = False
                click.echo("context cleared")
            elif line.startswith("/anchor"):
                parts = line.split(maxsplit=1)
                if len(parts) != 2:
                    click.echo("usage: /anchor <vertex-id>", err=True)
                    continue
                session = registry.anchor(session_id, parts[1])
                has_context = True
                click.echo(f"anchored: {json.dumps(session.context_json()['constraints'])}")
            elif line == "/context":
                click.echo(json.dumps(registry.get(session_id).context_json(), indent=2, sort_keys=True))
            else:
                mode = "follow_up" if has_context else "fresh"
                result = registry.ask(session_id, line, mode)
                has_context = True
                click.echo(_render(result))
        except GridQAError as exc:
            click.echo(f"error[{exc.code}]: {exc}", err=True)


@main.command()
@_data_option
@_date_option
@click.option("--host", default="127.0.0.1", show_default=True, envvar="GRIDQA_HOST")
@click.option("--port", default=8000, show_default=True, envvar="GRIDQA_PORT", type=int)
@click.option("--ttl", default=DEFAULT_TTL_SECONDS, show_default=True, envvar="GRIDQA_TTL", help="Session TTL in seconds.")
@click.option(
    "--static", "static_dir", default=None, envvar="GRIDQA_STATIC",
    help="Directory with a built UI bundle to serve at / (default: frontend/dist when present).",
)
def serve(data: str, evaluation_date: date | None, host: str, port: int, ttl: int, static_dir: str | None) -> None:
    """Run the HTTP/JSON API (and bundled UI when present)."""
    import uvicorn

    from .server import create_app

    engine = _load(data, evaluation_date)
    if static_dir is None and Path("frontend/dist").is_dir():
        static_dir = "frontend/dist"
    app = create_app(engine, SessionRegistry(engine, ttl_seconds=ttl), static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command(name="eval")
@_data_option
@_date_option
@click.option("--cases", "cases_path", default=None, help="Case file path (default: <data>/cases.json).")
@click.option("--json", "as_json", is_flag=True, help="Emit the report as JSON.")
@click.option("--concurrency", default=4, show_default=True, type=int)
def eval_cmd(data: str, evaluation_date: date | None, cases_path: str | None, as_json: bool, concurrency: int) -> None:
    """Replay the evaluation corpus and print the category report."""
    engine = _load(data, evaluation_date)
    path = Path(cases_path) if cases_path else Path(data) / "cases.json"
    try:
        cases = corpus.load_cases(path.read_text())
    except OSError as exc:
        raise _fail(exc, "io") from None
    except GridQAError as exc:
        raise _fail(exc, exc.code) from None
    report = corpus.evaluate(engine, cases, concurrency=concurrency)
    if as_json:
        click.echo(json.dumps(report.to_json(), indent=2, sort_keys=True))
    else:
        click.echo(report.to_text())


@main.command()
@click.argument("out_dir", type=click.Path(file_okay=False))
@click.option("--seed", default=42, show_default=True, type=int)
@click.option("--vertices", default=10_000, show_default=True, type=int)
@click.option("--cases", default=50, show_default=True, type=int)
def gen(out_dir: str, seed: int, vertices: int, cases: int) -> None:
    """Generate a deterministic synthetic data directory."""
    try:
        stats = corpus.generate(out_dir, seed=seed, vertex_count=vertices, case_count=cases)
    except GridQAError as exc:
        raise _fail(exc, exc.code) from None
    click.echo(
        f"wrote {stats['vertices']} vertices, {stats['edges']} edges, "
        f"{stats['cases']} cases to {out_dir} (seed {stats['seed']})"
    )


if __name__ == "__main__":
    sys.exit(main())

"""Command line entry point: serve the turn API or run the terminal REPL.

Every flag has a CINEBOT_* environment variable equivalent.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile

from ..catalog import default_catalog, load_catalog, load_genre_synonyms
from ..nlg import load_templates
from ..nlu import load_patterns
from ..policy import PolicyConfig
from .engine import Engine
from .http import create_app
from .repl import run_repl
from .store import SessionStore


def _env(name: str, default=None):
    return os.environ.get(f"CINEBOT_{name}", default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cinebot",
        description="Conversational movie recommender: turn API server and REPL.",
    )
    parser.add_argument("--catalog", default=_env("CATALOG"), help="catalog JSONL path (default: bundled sample)")
    parser.add_argument("--synonyms", default=_env("SYNONYMS"), help="genre synonym JSON path")
    parser.add_argument("--templates", default=_env("TEMPLATES"), help="response template JSON path")
    parser.add_argument("--patterns", default=_env("PATTERNS"), help="pattern registry JSON path")
    parser.add_argument("--policy-config", default=_env("POLICY_CONFIG"), help="policy config JSON path")
    parser.add_argument("--session-dir", default=_env("SESSION_DIR"), help="directory for session snapshots and transcripts")
    parser.add_argument("--listen", default=_env("LISTEN", "127.0.0.1:8080"), help="host:port for the HTTP API")
    parser.add_argument("--seed", type=int, default=_env("SEED"), help="fixed session seed (REPL and new sessions)")
    parser.add_argument("--idle-ttl", type=float, default=_env("IDLE_TTL", 24 * 3600), help="seconds of inactivity before a session expires")
    parser.add_argument("--ui-dir", default=_env("UI_DIR"), help="static directory with the web chat build")
    parser.add_argument("--repl", action="store_true", default=_env("REPL") == "1", help="run an interactive terminal session instead of serving")
    parser.add_argument("--trace", action="store_true", default=_env("TRACE") == "1", help="log per-turn policy rule firings")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def build_engine(args: argparse.Namespace) -> Engine:
    if args.catalog:
        synonyms = load_genre_synonyms(args.synonyms) if args.synonyms else None
        catalog, _report = load_catalog(args.catalog, synonyms)
    else:
        catalog, _report = default_catalog()
    config = (
        PolicyConfig.from_file(args.policy_config)
        if args.policy_config
        else PolicyConfig()
    )
    if args.trace and not config.trace:
        config = PolicyConfig(
            result_threshold=config.result_threshold,
            max_elicit_questions=config.max_elicit_questions,
            elicitation_order=config.elicitation_order,
            count_disclosure=config.count_disclosure,
            recap_on_elicit=config.recap_on_elicit,
            trace=True,
        )
    session_dir = args.session_dir or os.path.join(tempfile.gettempdir(), "cinebot-sessions")
    return Engine(
        catalog=catalog,
        registry=load_patterns(args.patterns),
        templates=load_templates(args.templates),
        config=config,
        store=SessionStore(session_dir),
        idle_ttl=float(args.idle_ttl),
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose or args.trace else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    engine = build_engine(args)

    if args.repl:
        seed = int(args.seed) if args.seed is not None else None
        run_repl(engine, seed=seed)
        return 0

    import uvicorn

    host, _, port = args.listen.rpartition(":")
    app = create_app(engine, ui_dir=args.ui_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

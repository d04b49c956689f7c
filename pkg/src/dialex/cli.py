"""Command-line entry point.

Subcommands map one-to-one to pipeline stages plus `run` (all stages through
--stage) and `serve-annotation`. Exit codes: 0 success, 2 config error,
3 missing input, 4 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import annotation, pipeline

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MISSING_INPUT = 3
EXIT_RUNTIME = 4


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="YAML pipeline config file")
    parser.add_argument("--seed", type=int, help="override the pipeline seed")
    parser.add_argument("--workers", type=int, help="worker count for parallel stages")
    parser.add_argument("--embedder", help="mock[:dim:seed] | file:<dir> | http(s)://host:port")
    parser.add_argument("--cosine-cutoff", type=float, dest="cosine_cutoff")
    parser.add_argument("--alignment-cutoff", type=float, dest="alignment_cutoff")
    parser.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dialex", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in pipeline.STAGES:
        p = sub.add_parser(name, help=f"run the {name} stage")
        _add_common(p)
    run = sub.add_parser("run", help="run all stages in order")
    _add_common(run)
    run.add_argument("--stage", choices=pipeline.STAGES, help="stop after this stage")
    serve = sub.add_parser("serve-annotation", help="serve the annotation HTTP API")
    _add_common(serve)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8750)
    return parser


def _config_from_args(args: argparse.Namespace) -> pipeline.PipelineConfig:
    overrides = {
        key: getattr(args, key, None)
        for key in ("seed", "workers", "embedder", "cosine_cutoff", "alignment_cutoff", "out")
    }
    return pipeline.load_config(args.config, overrides)


def bootstrap_annotation_store(cfg: pipeline.PipelineConfig) -> annotation.TaskStore:
    """Create the bitext/wordpair tasks from the sampled item files, once."""
    store = annotation.TaskStore(cfg.out_path("annotation"))
    existing = {t["task_id"] for t in store.list_tasks()}
    for kind, filename in (("bitext", "annotation_bitext_items.jsonl"), ("wordpair", "annotation_wordpair_items.jsonl")):
        path = cfg.out_path(filename)
        if kind not in existing and path.exists():
            items = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]
            if items:
                store.create_task(
                    kind=kind,
                    items=items,
                    control_size=min(cfg.control_size, len(items)),
                    seed=cfg.seed,
                    task_id=kind,
                )
    return store


def _serve_annotation(cfg: pipeline.PipelineConfig, host: str, port: int) -> None:
    import uvicorn

    store = bootstrap_annotation_store(cfg)
    app = annotation.create_app(store, token=cfg.annotation_token or None)
    uvicorn.run(app, host=host, port=port, log_level="warning")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
    except pipeline.ConfigError as e:
        for err in e.errors:
            print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except pipeline.MissingInputError as e:
        print(e, file=sys.stderr)
        return EXIT_MISSING_INPUT

    try:
        if args.command == "run":
            pipeline.run_stages(cfg, upto=args.stage)
        elif args.command == "serve-annotation":
            _serve_annotation(cfg, args.host, args.port)
        else:
            result = pipeline.STAGE_FUNCS[args.command](cfg)
            print(json.dumps(result, ensure_ascii=False, sort_keys=True, default=str, indent=2))
    except pipeline.MissingInputError as e:
        print(e, file=sys.stderr)
        return EXIT_MISSING_INPUT
    except pipeline.ConfigError as e:
        for err in e.errors:
            print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as e:  # noqa: BLE001 - boundary: report and signal failure
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

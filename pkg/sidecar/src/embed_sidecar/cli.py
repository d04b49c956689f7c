"""embed-sidecar command line.

    embed-sidecar embed --model hash:64:0 --in sentences.jsonl --out bar.token.emb \
        --level token --pooling mean
    embed-sidecar serve --model hash:64:0 --port 8900
"""

from __future__ import annotations

import argparse
import sys

from .core import embed_file
from .encoder import ProviderConfig


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="embed-sidecar", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    embed = sub.add_parser("embed", help="embed a sentences JSONL file into the binary format")
    embed.add_argument("--model", default="hash:64:0", help="hash:<dim>:<seed> or hf:<name>")
    embed.add_argument("--in", dest="in_path", required=True, help="sentences JSONL input")
    embed.add_argument("--out", dest="out_path", required=True, help="embedding file output")
    embed.add_argument("--level", choices=("sentence", "token"), default="sentence")
    embed.add_argument("--pooling", choices=("cls", "mean", "native"), default="mean")
    embed.add_argument("--max-rows", type=int, default=512, help="per-sentence row budget")
    embed.add_argument("--device", default="cpu")
    embed.add_argument("--batch-size", type=int, default=32)

    serve = sub.add_parser("serve", help="serve POST /embed and GET /info")
    serve.add_argument("--model", default="hash:64:0")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8900)
    serve.add_argument("--pooling", choices=("cls", "mean", "native"), default="mean")
    serve.add_argument("--max-rows", type=int, default=512)
    serve.add_argument("--device", default="cpu")
    serve.add_argument("--batch-size", type=int, default=32)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = ProviderConfig(
        model=args.model,
        pooling=args.pooling,
        batch_size=args.batch_size,
        device=args.device,
        max_rows=args.max_rows,
    )
    if args.command == "embed":
        try:
            warnings = embed_file(config, args.in_path, args.out_path, level=args.level, pooling=args.pooling)
        except (ValueError, OSError) as e:
            print(f"error: {e}", file=sys.stderr)
            return 1
        for w in warnings:
            print(f"warning: {w.message}", file=sys.stderr)
        return 0
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(config), host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    sys.exit(main())

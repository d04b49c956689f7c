#!/usr/bin/env python3
"""Regenerate the committed golden files for the end-to-end fixture run.

Runs the full pipeline on fixtures/config.yaml (mock embedder, seed 42,
scripted annotators over the HTTP API) and copies the frozen outputs into
tests/golden/. Run from the repo root after any intentional behavior change:

    python3 tools/make_goldens.py
"""

import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))
sys.path.insert(0, str(ROOT / "tests"))

from fixture_run import GOLDEN_FILES, run_fixture_pipeline  # noqa: E402


def main() -> None:
    golden_dir = ROOT / "tests" / "golden"
    golden_dir.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        cfg = run_fixture_pipeline(ROOT / "fixtures" / "config.yaml", tmp)
        for name in GOLDEN_FILES:
            shutil.copyfile(cfg.out_path(name), golden_dir / name)
            print(f"froze {name}")


if __name__ == "__main__":
    main()

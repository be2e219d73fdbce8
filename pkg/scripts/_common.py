"""Shared argument handling for the experiment scripts."""

import argparse
from dataclasses import asdict
from pathlib import Path

from edgelab.cli import Recorder
from edgelab.config import load_file


def setup(cls, name: str, doc: str):
    p = argparse.ArgumentParser(description=doc)
    p.add_argument("--config", help="JSON config; defaults reproduce the acceptance settings")
    p.add_argument("--out-dir", default=f"runs/{name}")
    args = p.parse_args()
    cfg = load_file(cls, args.config) if args.config else cls()
    rec = Recorder(Path(args.out_dir), name, asdict(cfg), getattr(cfg, "seed", None))
    return cfg, rec

"""Command-line front end for the analytics pipeline.

Exit codes: 0 ok, 2 configuration error, 3 data error, 4 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import pipeline, synth
from .errors import ConfigError, DataError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_INTERNAL = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spamscope",
        description="Tweet-archive analytics: spam, bots, diffusion.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def _add_run_args(p):
        p.add_argument("--config", required=True, help="run config JSON")
        p.add_argument("--out", help="override output directory")
        p.add_argument("--seed", type=int, help="override config seed")
        p.add_argument("--workers", type=int, help="override worker count")

    for name in pipeline.STAGES:
        _add_run_args(sub.add_parser(name, help=f"run the {name} stage"))
    _add_run_args(sub.add_parser("run", help="run the full pipeline"))

    synth_p = sub.add_parser("synth", help="generate a synthetic archive + labels")
    synth_p.add_argument("--spec", required=True, help="synth spec JSON")
    synth_p.add_argument("--seed", type=int, default=0)
    synth_p.add_argument("--out", required=True, help="output directory")
    return parser


def _load_run_config(args) -> pipeline.RunConfig:
    cfg = pipeline.RunConfig.from_file(args.config)
    if args.out:
        cfg.out_dir = args.out
    if args.seed is not None:
        cfg.seed = args.seed
    if args.workers is not None:
        if args.workers < 1:
            raise ConfigError("workers must be >= 1")
        cfg.workers = args.workers
    return cfg


def _run_synth(args) -> int:
    spec = synth.SynthSpec.from_file(args.spec)
    os.makedirs(args.out, exist_ok=True)
    manifest = synth.generate_fixture(
        spec,
        seed=args.seed,
        archive_path=os.path.join(args.out, "archive.jsonl"),
        labels_path=os.path.join(args.out, "labels.csv"),
        annotations_path=os.path.join(args.out, "annotations.csv"),
    )
    print(json.dumps(manifest, sort_keys=True))
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    stage = args.command
    try:
        if stage == "synth":
            return _run_synth(args)
        cfg = _load_run_config(args)
        os.makedirs(cfg.out_dir, exist_ok=True)
        if stage == "run":
            summary = pipeline.run_pipeline(cfg)
            print(json.dumps({"ok": True, "out_dir": cfg.out_dir,
                              "stages": sorted(k for k in summary if k != "config")}))
        else:
            result = pipeline.STAGE_FUNCS[stage](cfg)
            print(json.dumps({"stage": stage, "result": result}, sort_keys=True))
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error [{stage}]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error [{stage}]: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001 - surfaced as exit code 4
        print(f"internal error [{stage}]: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

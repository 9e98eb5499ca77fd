"""Command line entry point: ``verify <manifest-or-space> [options]``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .fixtures import SPACES
from .manifest import ManifestError, parse_manifest
from .verify import random_suite, run

EXIT_CONFIG = 2


def parse_dims(text: str) -> list[int]:
    """``"1..5"``, ``"2,3"`` or ``"4"`` to a sorted list within 1..5."""
    dims: set[int] = set()
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            dims.update(range(int(lo), int(hi) + 1))
        elif part:
            dims.add(int(part))
    if not dims or min(dims) < 1 or max(dims) > 5:
        raise ValueError(f"dimensions must lie in 1..5, got {text!r}")
    return sorted(dims)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="verify",
        description="Check an n-plectic manifest, or run the randomized suites on a fixture space "
        f"({', '.join(SPACES)}).",
    )
    p.add_argument("target", help="manifest file, or a fixture space id for the randomized suites")
    p.add_argument("--seed", type=int, default=0, help="random seed for the suites (default 0)")
    p.add_argument("--dims", default="1..5", help="bracket dimensions for the suites, e.g. 1..5 or 2,3")
    p.add_argument("--count", type=int, default=50, help="random instances per suite (default 50)")
    p.add_argument("--json", action="store_true", help="one JSON record per line")
    p.add_argument("--threads", type=int, default=None, help="worker threads (NPLECTIC_THREADS caps this)")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.target in SPACES:
            dims = parse_dims(args.dims)
            report = random_suite(args.target, args.seed, dims, args.count, args.threads)
        else:
            text = Path(args.target).read_text(encoding="utf-8")
            report = run(parse_manifest(text), args.threads)
    except ManifestError as e:
        print(f"{args.target}: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, UnicodeDecodeError, ValueError) as e:
        print(f"verify: {e}", file=sys.stderr)
        return EXIT_CONFIG
    sys.stdout.write(report.render_json() if args.json else report.render())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())

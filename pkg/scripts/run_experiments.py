#!/usr/bin/env python3
"""Run the bundled reconstruction and rotation-averaging experiments.

Equivalent to ``diffavg repro`` but callable directly from a checkout:

    python3 scripts/run_experiments.py --size 65 --out-dir results
"""

import sys

from diffavg.cli import cli_main


def main() -> int:
    argv = sys.argv[1:]
    if not any(a.startswith("--out-dir") for a in argv):
        argv += ["--out-dir", "results"]
    return cli_main(["repro", *argv])


if __name__ == "__main__":
    sys.exit(main())

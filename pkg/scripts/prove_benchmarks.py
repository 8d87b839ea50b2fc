#!/usr/bin/env python3
"""Prove the six benchmark instances, save their certificates, and print
the comparison table against the quoted reference figures."""

import argparse
import pathlib
import sys

from heatsos import certify
from heatsos.cli import REPORT_INSTANCES, main as cli_main
from heatsos.prover import prove


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="certificates",
                    help="directory for the certificate files")
    args = ap.parse_args(argv)

    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    worst = 0
    for label, family, m, n in REPORT_INSTANCES:
        outcome = prove(family, m, n)
        if outcome.certificate is None:
            print(f"{label}: {outcome.status}: {outcome.message}",
                  file=sys.stderr)
            worst = max(worst, outcome.exit_code)
            continue
        name = label.replace("(", "_").replace(",", "_").replace(")", "")
        path = out_dir / f"{name}.json"
        certify.save_certificate(outcome.certificate, path)
        print(f"{label}: wrote {path}")
    print()
    return max(worst, cli_main(["report"]))


if __name__ == "__main__":
    raise SystemExit(main())

"""CLI: `melparity generate --out DIR` and `melparity compare PRIMARY GOLDEN`."""

from __future__ import annotations

import argparse
import json
import sys


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="melparity", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write golden fixtures with the reference extractor")
    p.add_argument("--out", type=str, default="goldens")

    p = sub.add_parser("compare", help="diff primary feature files against the goldens")
    p.add_argument("primary_dir")
    p.add_argument("golden_dir")
    p.add_argument("--json", action="store_true", help="emit the full report as JSON")

    args = parser.parse_args(argv)
    if args.command == "generate":
        from melparity.generate import generate_goldens

        index = generate_goldens(args.out)
        for entry in index["fixtures"]:
            print(f"{entry['name']:24s} {entry['shape'][0]}x{entry['shape'][1]:<6d} {entry['checksum_sha256'][:12]}")
        print(f"wrote {index['n_fixtures']} goldens -> {args.out}")
        return 0

    from melparity.compare import compare_dirs

    report = compare_dirs(args.primary_dir, args.golden_dir)
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        for row in report["fixtures"]:
            diff = "n/a" if row["max_abs_diff"] is None else f"{row['max_abs_diff']:.3e}"
            print(f"{row['status']:>14s}  {row['name']:24s} max|diff| = {diff}")
        print(f"{report['n_pass']}/{report['n_fixtures']} fixtures within {report['tolerance']}")
    return 0 if report["all_pass"] else 1


if __name__ == "__main__":
    sys.exit(main())

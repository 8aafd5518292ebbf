"""Diff a directory of primary feature files against the goldens."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from melparity.epkio import read_values
from melparity.generate import TOLERANCE


def compare_dirs(primary_dir: str | Path, golden_dir: str | Path) -> dict:
    """Per-fixture max-abs-diff and pass/fail at the parity tolerance."""
    golden_dir = Path(golden_dir)
    primary_dir = Path(primary_dir)
    with open(golden_dir / "index.json", encoding="utf-8") as fh:
        index = json.load(fh)
    rows = []
    for entry in index["fixtures"]:
        golden = read_values(golden_dir / entry["file"])
        primary_path = primary_dir / entry["file"]
        if not primary_path.is_file():
            rows.append({"name": entry["name"], "status": "missing", "max_abs_diff": None})
            continue
        primary = read_values(primary_path)
        if primary.shape != golden.shape:
            rows.append(
                {
                    "name": entry["name"],
                    "status": "shape-mismatch",
                    "max_abs_diff": None,
                    "primary_shape": list(primary.shape),
                    "golden_shape": list(golden.shape),
                }
            )
            continue
        diff = float(np.max(np.abs(primary.astype(np.float64) - golden.astype(np.float64))))
        rows.append(
            {
                "name": entry["name"],
                "status": "pass" if diff <= TOLERANCE else "fail",
                "max_abs_diff": diff,
            }
        )
    n_pass = sum(1 for r in rows if r["status"] == "pass")
    return {
        "tolerance": TOLERANCE,
        "n_fixtures": len(rows),
        "n_pass": n_pass,
        "all_pass": n_pass == len(rows),
        "fixtures": rows,
    }

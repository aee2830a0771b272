"""CSV tables, JSON-lines run records and the run manifest."""

from __future__ import annotations

import csv
import json
import time
from pathlib import Path

from qstatebench.harness.experiments import ExperimentResult

TABLE_HEADER = ("sweep_value", "algorithm", "mean_F", "std_F", "n_runs")


def write_csv(path: Path, header, rows) -> None:
    # floats go through repr(), so values round-trip exactly
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_jsonl(path: Path, records) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def write_result(out_dir: Path, result: ExperimentResult) -> list[Path]:
    """One CSV and one JSONL per table, plus the extra files. Returns the
    paths written."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for table, rows in result.tables.items():
        p = out_dir / f"{table}.csv"
        write_csv(p, TABLE_HEADER,
                  [(r.sweep_value, r.algorithm, r.mean_F, r.std_F, r.n_runs) for r in rows])
        q = out_dir / f"{table}_runs.jsonl"
        write_jsonl(q, result.records[table])
        written += [p, q]
    for stem, (header, rows) in result.files.items():
        p = out_dir / f"{stem}.csv"
        write_csv(p, header, rows)
        written.append(p)
    return written


def write_manifest(out_dir: Path, command: str, echo: dict, digest: str, seed: int,
                   summaries: dict, files: list[Path]) -> Path:
    manifest = {
        "command": command,
        "config": echo,
        "config_hash": digest,
        "seed": seed,
        "summaries": summaries,
        "files": sorted(p.name for p in files),
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    p = out_dir / "manifest.json"
    p.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return p

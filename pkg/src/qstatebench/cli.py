"""Command-line entry point: ``qstatebench <experiment> [flags]``.

Exit status is 0 on success, 1 for configuration or usage errors and 2 when
outputs cannot be written.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from qstatebench.errors import ConfigError, ConstraintError, InvalidInputError
from qstatebench.harness.config import build_spec, config_hash, load_file, spec_echo
from qstatebench.harness.experiments import EXPERIMENTS, ExperimentSpec, default_constraint
from qstatebench.harness.persist import write_manifest, write_result
from qstatebench.harness.runner import run_point

OUT_ENV = "QSTATEBENCH_OUT"
EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise _UsageError(message)


def _algorithms(text: str) -> list[str]:
    return [a.strip() for a in text.split(",") if a.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML or JSON experiment config")
    common.add_argument("--seed", type=int, help="master seed (non-negative)")
    common.add_argument("--runs", type=int, help="independent runs per sweep point")
    common.add_argument("--iters", type=int, help="iterations or episodes per run")
    common.add_argument("--out", type=Path, help=f"output directory (default ${OUT_ENV} or ./results)")
    common.add_argument("--algorithms", type=_algorithms, help="comma-separated subset of sgd,krotov,ql,dql")
    common.add_argument("--workers", type=int, help="worker processes (results do not depend on it)")
    common.add_argument("--n-pieces", type=int, dest="n_pieces", help="piece count N where a single N is used")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="qstatebench", description="Single-qubit control benchmark experiments.")
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)
    for name in (*EXPERIMENTS, "single-run"):
        sub.add_parser(name, parents=[common], help=f"run the {name} experiment")
    return parser


def _out_dir(args) -> Path:
    if args.out is not None:
        return args.out
    return Path(os.environ.get(OUT_ENV, "results"))


def _spec_from_args(args) -> ExperimentSpec:
    data = load_file(args.config) if args.config else {}
    if args.seed is not None and args.seed < 0:
        raise ConfigError("--seed must be non-negative")
    return build_spec(
        data,
        seed=args.seed,
        runs=args.runs,
        n_iter=args.iters if args.command != "s1" else None,
        algorithms=args.algorithms,
        workers=args.workers,
        n_pieces=args.n_pieces,
    )


def _single_run(spec: ExperimentSpec, out: Path) -> tuple[list[Path], dict]:
    out.mkdir(parents=True, exist_ok=True)
    written, summaries = [], {}
    for a in spec.algorithms:
        (res,) = run_point(a, spec.problem, default_constraint(a, spec.n_pieces), None, 1,
                           spec.master_seed, spec.config_for(a))
        p = out / f"run_{a}.json"
        p.write_text(json.dumps(res.to_record(include_trace=True), sort_keys=True) + "\n")
        written.append(p)
        summaries[a] = {"best_fidelity": res.best_fidelity, "i_f": res.i_f}
    return written, summaries


def run(args) -> int:
    spec = _spec_from_args(args)
    out = _out_dir(args)
    if args.command == "single-run":
        written, summaries = _single_run(spec, out)
    else:
        if args.command == "s1" and args.iters is not None:
            result = EXPERIMENTS["s1"](spec, max_iter=args.iters)
        else:
            result = EXPERIMENTS[args.command](spec)
        written = write_result(out, result)
        summaries = result.summaries()
    echo = spec_echo(spec)
    echo["command"] = args.command
    if args.command == "s1" and args.iters is not None:
        echo["s1_max_iter"] = args.iters
    write_manifest(out, args.command, echo, config_hash(echo), spec.master_seed, summaries, written)
    for p in written:
        print(p)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError:
        return EXIT_CONFIG
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return run(args)
    except (ConfigError, ConstraintError, InvalidInputError) as exc:
        print(f"qstatebench: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"qstatebench: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

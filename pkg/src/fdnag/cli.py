"""Command-line entry point: ``run``, ``gen-table`` and ``verify``.

Exit codes: 0 ok, 2 configuration error, 3 oracle or I/O error, 4 numerical error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .codec import CodecError, Genotype, SearchSpaceShape
from .config import RunSpec, load_runspec
from .denoise import NumericalError
from .engine import ConfigError, brute_force_optimum, run, run_continuous
from .oracle import (
    EXHAUSTIVE_CAP,
    FitnessOracle,
    OracleError,
    SyntheticFunction,
    SyntheticOracle,
    atomic_write_text,
    build_planted_tabular,
    format_fitness,
    load_tabular,
    tabular_oracle,
    write_tabular,
)
from .schedule import ScheduleError
from .selection import SelectionError

EXIT_CONFIG, EXIT_ORACLE, EXIT_NUMERIC = 2, 3, 4


def build_oracle(spec: RunSpec) -> FitnessOracle:
    o = spec.oracle_section()
    kind = o["type"]
    if kind in ("sphere", "rastrigin"):
        return SyntheticOracle(SyntheticFunction(kind, o["dim"]))
    shape = spec.shape
    if kind == "tabular":
        bench = load_tabular(o["path"], shape, allow_partial=o["allow_partial"], floor=o["floor"])
    else:
        bench = build_planted_tabular(shape, planted_optimum(shape, o["optimum"], o["table_seed"]),
                                      o["smoothness"], o["table_seed"])
    return tabular_oracle(bench, cache=o["cache"])


def planted_optimum(shape: SearchSpaceShape, text: str, seed: int) -> Genotype:
    if text:
        return Genotype.parse(text, shape)
    # no optimum given: draw one from the table seed
    rng = np.random.default_rng(seed)
    return Genotype(tuple(int(i) for i in rng.integers(0, shape.d2, size=shape.d1)))


def cmd_run(args) -> int:
    overrides = list(args.set or [])
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    if args.out is not None:
        overrides.append(f"out={args.out}")
    spec = load_runspec(args.config, overrides)
    cfg = spec.generation_config()
    oracle = build_oracle(spec)
    out = Path(spec["out"])

    if oracle.mode == "continuous":
        result = run_continuous(cfg, oracle.fn, oracle)
        summary = f"best {format_fitness(result.best_value)}"
    else:
        result = run(cfg, oracle)
        g, f = result.top1
        summary = f"{g} {format_fitness(f)}"

    atomic_write_text(out / "result.json", result.to_json(config_echo=spec.echo()))
    atomic_write_text(out / "trace.csv", result.trace.to_csv())
    print(summary)
    return 0


def cmd_gen_table(args) -> int:
    shape = SearchSpaceShape(args.d1, args.d2)
    optimum = planted_optimum(shape, args.optimum or "", args.seed)
    bench = build_planted_tabular(shape, optimum, args.smoothness, args.seed)
    write_tabular(bench, args.out)
    print(f"wrote {len(bench.table)} genotypes to {args.out} (optimum {optimum})")
    return 0


def cmd_verify(args) -> int:
    shape = SearchSpaceShape(args.d1, args.d2) if args.d1 and args.d2 else None
    bench = load_tabular(args.table, shape)
    g, f = brute_force_optimum(bench, cap=args.cap)
    print(f"{g} {format_fitness(f)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fdnag", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="generate architectures from a run config")
    r.add_argument("--config", help="INI run spec")
    r.add_argument("--seed", type=int)
    r.add_argument("--out", help="output directory for result.json and trace.csv")
    r.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key (repeatable)")
    r.set_defaults(func=cmd_run)

    g = sub.add_parser("gen-table", help="write a planted tabular benchmark")
    g.add_argument("--d1", type=int, default=6)
    g.add_argument("--d2", type=int, default=5)
    g.add_argument("--optimum", help="planted genotype, e.g. 4-0-3-1-4-0 (default: drawn from --seed)")
    g.add_argument("--smoothness", type=float, default=0.05)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen_table)

    v = sub.add_parser("verify", help="brute-force optimum of a table")
    v.add_argument("table")
    v.add_argument("--cap", type=int, default=EXHAUSTIVE_CAP)
    v.add_argument("--d1", type=int)
    v.add_argument("--d2", type=int)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except NumericalError as e:
        print(f"error: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OracleError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ORACLE
    except (ConfigError, ScheduleError, SelectionError, CodecError, ValueError) as e:
        print(f"error: config: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

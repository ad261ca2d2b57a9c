"""
Command-line interface.

Subcommands: wg-table, moments, spectrum, decay, tau-prime, selftest.
Experiment subcommands read an optional JSON config file; --seed,
--trials, --n and --out override its fields.  With --out STEM the run
writes STEM.json (canonical record), STEM.csv (plot data) and STEM.png
(rendered figure); without it the record is printed to stdout in the
format chosen by --format.

Exit codes: 0 ok, 2 config error, 3 capacity error, 4 selftest failure.
"""
from __future__ import annotations

import argparse
import io
import json
import sys
from pathlib import Path

from . import lab, plots, weingarten
from .errors import CapacityError, ConfigError

_DEFAULT_CONFIGS = {
    "moments": {
        "experiment": "moments",
        "model": [["D", "X1"], ["D", "X1", "D"], ["D", "X1", "D", "X2"],
                  ["D", "X1", "D", "X2", "D"], ["D", "X1", "D", "X2", "D", "X3"]],
        "generators": {
            "D": {"kind": "dyadic_diag"},
            "X1": {"kind": "wishart", "entry_variance": 2.0},
            "X2": {"kind": "wishart", "entry_variance": 2.0},
            "X3": {"kind": "wishart", "entry_variance": 2.0},
        },
        "n_list": [250],
        "trials": 10,
        "seed": 0,
    },
    "spectrum": {
        "experiment": "spectrum",
        "model": "anticommutator",
        "generators": {
            "A": {"kind": "dyadic_diag"},
            "B": {"kind": "wishart", "entry_variance": 2.0},
        },
        "n_list": [300],
        "trials": 10,
        "seed": 0,
    },
    "decay": {
        "experiment": "decay",
        "model": ["D", "X@1"],
        "generators": {
            "D": {"kind": "dyadic_diag"},
            "X": {"kind": "wishart", "entry_variance": 2.0},
        },
        "n_list": [64, 128, 256, 512],
        "trials": 200,
        "seed": 0,
    },
    "tau-prime": {
        "experiment": "tau-prime",
        "model": [[1.0, ["D", "X@1"]]],
        "generators": {
            "D": {"kind": "dyadic_diag"},
            "X": {"kind": "wishart", "entry_variance": 2.0},
        },
        "n_list": [50, 100, 200, 400],
        "trials": 50,
        "seed": 0,
    },
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cycmono",
        description="Predict and verify discrete limiting spectra of random matrix polynomials.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    wg = sub.add_parser("wg-table", help="dump an exact Weingarten table as CSV")
    wg.add_argument("--k", type=int, required=True, help="symmetric group degree")
    wg.add_argument("--n", type=int, required=True, help="matrix dimension (n >= k)")
    wg.add_argument("--out", type=str, default=None, help="output CSV path (default stdout)")
    wg.add_argument("--max-degree", type=int, default=None,
                    help="raise the degree capacity limit")

    for name in ("moments", "spectrum", "decay", "tau-prime"):
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", type=str, default=None, help="JSON config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--n", type=int, default=None,
                       help="run a single dimension (overrides n_list)")
        p.add_argument("--out", type=str, default=None,
                       help="output stem; writes STEM.json, STEM.csv, STEM.png")
        p.add_argument("--format", choices=("json", "csv"), default="json",
                       help="stdout format when --out is not given")
        if name == "spectrum":
            p.add_argument("--model", choices=lab.SPECTRUM_MODELS, default=None)
            p.add_argument("--k", type=int, default=None,
                           help="independent rotations for the rotation-sum model")

    sub.add_parser("selftest", help="run the exact-identity suites")
    return parser


def _load_config(args) -> lab.ExperimentConfig:
    if args.config is not None:
        with open(args.config, "r", encoding="utf-8") as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"malformed config file: {exc}") from exc
    else:
        obj = json.loads(json.dumps(_DEFAULT_CONFIGS[args.experiment_name]))
        obj["experiment"] = args.experiment_name
    config = lab.config_from_json(obj)
    if config.experiment != args.experiment_name:
        raise ConfigError(
            f"config is for experiment {config.experiment!r}, "
            f"but the {args.experiment_name!r} subcommand was invoked"
        )
    if args.seed is not None:
        config.seed = args.seed
    if args.trials is not None:
        config.trials = args.trials
    if args.n is not None:
        config.n_list = (args.n,)
    if args.out is not None:
        config.out = args.out
    if getattr(args, "model", None) is not None:
        config.model = args.model
    if getattr(args, "k", None) is not None:
        config.rotations = args.k
    return config


def _record_csv(record: lab.ResultRecord) -> str:
    buf = io.StringIO()
    experiment = record.config["experiment"]
    if experiment == "spectrum":
        # plot-friendly schema; an n column is prepended only for multi-n runs
        multi = len(record.per_n) > 1
        buf.write(("n," if multi else "") + "rank,empirical_mean,empirical_sd,predicted\n")
        for row in record.per_n:
            prefix = f"{row['n']}," if multi else ""
            merged = _merged_rows(row)
            for rank, (mean, sd, pred) in enumerate(merged, start=1):
                buf.write(f"{prefix}{rank},{mean!r},{sd!r},{pred!r}\n")
    elif experiment == "moments":
        buf.write(
            "n,word,empirical_mean,empirical_se,factorized_mean,"
            "factorized_se,diff_mean,diff_se\n"
        )
        for row in record.per_n:
            for r in row["rows"]:
                buf.write(
                    f"{row['n']},{r['word']},{r['empirical_mean']!r},"
                    f"{r['empirical_se']!r},{r['factorized_mean']!r},"
                    f"{r['factorized_se']!r},{r['diff_mean']!r},{r['diff_se']!r}\n"
                )
    elif experiment == "decay":
        buf.write("n,variance,fourth_central\n")
        for row in record.per_n:
            buf.write(f"{row['n']},{row['variance']!r},{row['fourth_central']!r}\n")
    else:  # tau-prime
        buf.write("n,mean,se,abs_error\n")
        for row in record.per_n:
            buf.write(f"{row['n']},{row['mean']!r},{row['se']!r},{row['abs_error']!r}\n")
    return buf.getvalue()


def _merged_rows(row: dict):
    """Merge the +/- rank summaries into properly arranged order."""
    entries = []
    for mean, sd, pred in zip(row["pos_mean"], row["pos_sd"], row["predicted_pos"]):
        entries.append((mean, sd, pred, 1))
    for mean, sd, pred in zip(row["neg_mean"], row["neg_sd"], row["predicted_neg"]):
        entries.append((mean, sd, pred, 0))
    entries.sort(key=lambda e: (-abs(e[0]), e[3] == 0))
    return [(mean, sd, pred) for mean, sd, pred, _ in entries[: len(row["pos_mean"])]]


def _emit(record: lab.ResultRecord, args) -> None:
    if record.config.get("out"):
        stem = Path(record.config["out"])
        stem.parent.mkdir(parents=True, exist_ok=True)
        json_path = stem.with_suffix(".json")
        csv_path = stem.with_suffix(".csv")
        png_path = stem.with_suffix(".png")
        json_path.write_text(lab.record_to_json(record), encoding="utf-8")
        csv_path.write_text(_record_csv(record), encoding="utf-8")
        plots.render(json.loads(lab.record_to_json(record)),
                     record.config["experiment"], png_path)
        print(f"wrote {json_path}, {csv_path}, {png_path}")
    elif args.format == "csv":
        sys.stdout.write(_record_csv(record))
    else:
        print(lab.record_to_json(record))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        if args.command == "wg-table":
            max_degree = args.max_degree if args.max_degree is not None else 6
            if args.out is not None:
                weingarten.write_table_csv(args.k, args.n, args.out, max_degree=max_degree)
                print(f"wrote {args.out}")
            else:
                table = weingarten.weingarten_table(args.k, args.n, max_degree=max_degree)
                sys.stdout.write("cycle_type,numerator,denominator\n")
                for ctype in sorted(table, reverse=True):
                    value = table[ctype]
                    label = "+".join(str(c) for c in ctype)
                    sys.stdout.write(f"{label},{value.numerator},{value.denominator}\n")
            return 0

        if args.command == "selftest":
            passed, lines = lab.selftest()
            for line in lines:
                print(line)
            print("selftest:", "PASS" if passed else "FAIL")
            return 0 if passed else 4

        args.experiment_name = args.command
        config = _load_config(args)
        record = lab.run(config)
        _emit(record, args)
        return 0
    except (ConfigError, weingarten.SingularGramError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

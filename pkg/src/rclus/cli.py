"""Command-line front end.

Examples::

    rclus --dataset cyg-ob1 --algo hier-single --k-min 2 --k-max 6
    rclus --generator tcopula --algo kmeans --w 0.025 --w 0.05 --w 0.1 --seed 7
    rclus --generator four-shapes --algo dbscan --eps 0.14 --minpts 5 --eps 0.165 --minpts 10
    rclus --csv stars.csv --algo hier-single --diagnostics 2

Exit codes: 0 success, 1 usage error, 2 data error, 3 computation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .clustering import DbscanConfig, dbscan
from .core import ComputationError, DataError, distance_for, write_csv, write_labels
from .report import ALGORITHMS, FORMATS, INDICES, RunManifest, dump_member_diagnostics, emit_report, run_sweep
from .simgen import GENERATORS

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_COMPUTE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rclus", description="Cluster validity sweeps with R_clus and baseline indices.")
    src = p.add_argument_group("data")
    src.add_argument("--csv", help="numeric CSV, rows = members")
    src.add_argument("--no-header", dest="header", action="store_false", help="CSV has no header row")
    src.add_argument("--delimiter", default=",")
    src.add_argument("--dataset", help="bundled dataset (cyg-ob1)")
    src.add_argument("--generator", choices=sorted(GENERATORS))
    src.add_argument(
        "--param", action="append", default=[], metavar="KEY=JSON",
        help="generator parameter, e.g. --param sizes=[50,50]",
    )
    src.add_argument("--labels", help="label file to evaluate (with --algo labels)")
    src.add_argument("--standardize", action="store_true", help="z-score every column first")

    run = p.add_argument_group("clustering")
    run.add_argument("--algo", choices=ALGORITHMS, default="kmeans")
    run.add_argument("--k-min", type=int, default=2)
    run.add_argument("--k-max", type=int, default=6)
    run.add_argument("--restarts", type=int, default=25)
    run.add_argument("--eps", type=float, action="append", default=[])
    run.add_argument("--minpts", type=int, action="append", default=[])
    run.add_argument("--seed", type=int, default=0)

    idx = p.add_argument_group("indices")
    idx.add_argument("--w", type=float, action="append", default=[], help="R_clus bin width (repeatable)")
    idx.add_argument("--index", action="append", choices=INDICES, default=[], help="restrict indices (repeatable)")
    idx.add_argument("--J", type=int, default=10, help="connectivity neighbours")
    idx.add_argument("--l", type=int, default=10, help="NNCER neighbours")

    out = p.add_argument_group("output")
    out.add_argument("--format", choices=FORMATS, default="tsv")
    out.add_argument("--out", help="write here instead of stdout")
    out.add_argument("--diagnostics", type=int, metavar="K", help="per-member R_clus table for one K")
    out.add_argument("--export-data", metavar="CSV", help="write the (generated) data and labels, then exit")
    return p


def _generator_params(pairs: list[str]) -> dict:
    params = {}
    for item in pairs:
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"bad --param {item!r}, expected KEY=VALUE")
        try:
            params[key] = json.loads(value)
        except json.JSONDecodeError:
            params[key] = value
    return params


def manifest_from_args(ns: argparse.Namespace) -> RunManifest:
    return RunManifest(
        csv=ns.csv,
        header=ns.header,
        delimiter=ns.delimiter,
        dataset=ns.dataset,
        generator=ns.generator,
        generator_params=_generator_params(ns.param),
        labels=ns.labels,
        standardize=ns.standardize,
        algo=ns.algo,
        k_min=ns.k_min,
        k_max=ns.k_max,
        widths=ns.w or [0.1],
        indices=ns.index or list(INDICES),
        J=ns.J,
        l=ns.l,
        restarts=ns.restarts,
        eps=ns.eps,
        min_pts=ns.minpts,
        seed=ns.seed,
        format=ns.format,
    ).validate()


def _export(manifest: RunManifest, target: str) -> None:
    from .report import load_data

    data, truth = load_data(manifest)
    write_csv(target, data)
    stem = Path(target).with_suffix("")
    if truth is not None:
        write_labels(f"{stem}.truth.labels", truth)
    if manifest.algo == "dbscan":
        dist = distance_for(manifest.metric, data)
        eps, mp = manifest.dbscan_pairs()[0]
        write_labels(f"{stem}.dbscan.labels", dbscan(dist, DbscanConfig(eps, mp)))


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        manifest = manifest_from_args(ns)
    except ValueError as e:
        print(f"rclus: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if ns.export_data:
            _export(manifest, ns.export_data)
            return EXIT_OK
        if ns.diagnostics is not None:
            payload = dump_member_diagnostics(manifest, ns.diagnostics)
            errors = []
        else:
            report = run_sweep(manifest)
            payload = emit_report(report, manifest.format)
            errors = report.errors
    except (DataError, OSError) as e:
        print(f"rclus: data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except (ComputationError, ValueError) as e:
        print(f"rclus: computation error: {e}", file=sys.stderr)
        return EXIT_COMPUTE
    if ns.out:
        Path(ns.out).write_bytes(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    for e in errors:
        print(f"rclus: {e}", file=sys.stderr)
    return EXIT_COMPUTE if errors else EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())

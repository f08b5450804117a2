"""Command-line front end: sweeps, Sturmian traces, EP hunts, metric checks.

Every run is deterministic for a fixed flag set, seed and package version:
output files are byte-identical across repeated invocations (no timestamps
anywhere), numbers are written in shortest round-trip form, and files are
written atomically (temp file, then rename).

Exit codes: 0 success, 2 usage error, 3 domain refusal (e.g. a metric
requested too close to an exceptional point), 4 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .core import ConvergenceError, Precision
from .epfinder import (
    ep_locate_1d,
    ep_locate_2d_bc,
    sweep,
)
from .metric import (
    ComplexSpectrumError,
    DegenerateBasisError,
    MetricConstructionError,
    build_metric,
    metric_conditioning_sweep,
)
from .models import BcModel, EpnModel, HermitianDemoModel
from .sturmian import bivariate_secular, branch_trace

DEFAULT_SEED = 42

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_REFUSED = 3
EXIT_NO_CONVERGENCE = 4


# --------------------------------------------------------------------------
# formatting / io helpers
# --------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, bool) or isinstance(v, np.bool_):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return str(v)


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def write_json(path: Path, payload: dict) -> None:
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _provenance(command: str, flags: dict, seed: int, precision: str) -> dict:
    return {
        "tool": "epspect",
        "version": __version__,
        "command": command,
        "flags": {k: v for k, v in sorted(flags.items()) if v is not None},
        "seed": seed,
        "precision": precision,
    }


def _parse_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = text.split(":")
        return float(lo), float(hi)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"range must look like 'lo:hi', got {text!r}"
        ) from exc


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}") from exc


# --------------------------------------------------------------------------
# model construction from flags
# --------------------------------------------------------------------------


def _make_model(args: argparse.Namespace, parser: argparse.ArgumentParser):
    if args.model == "epn":
        if getattr(args, "param", None) not in (None, "t"):
            parser.error("the epn family sweeps the parameter t")
        return EpnModel(args.n)
    if args.model == "bc":
        if getattr(args, "param", None) not in (None, "r"):
            parser.error("the bc family sweeps the parameter r")
        return BcModel(args.n, getattr(args, "y", 0.0) or 0.0)
    if args.model == "hermitian-demo":
        return HermitianDemoModel(args.n, args.seed)
    parser.error(f"unknown model {args.model!r}")


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def _cmd_sweep(args, parser) -> int:
    model = _make_model(args, parser)
    result = sweep(model, args.range, args.samples, precision=Precision(args.precision))
    out = Path(args.output or "sweep.csv")
    flags = {
        "model": args.model,
        "n": args.n,
        "y": getattr(args, "y", None),
        "param": model.param,
        "range": f"{args.range[0]}:{args.range[1]}",
        "samples": args.samples,
    }
    if args.model == "hermitian-demo":
        flags["seed"] = args.seed

    ntr = result.n_tracks
    if args.format == "json":
        payload = {
            "provenance": _provenance("sweep", flags, args.seed, args.precision),
            "grid": [float(p) for p in result.grid],
            "tracks": [
                [[float(v.real), float(v.imag)] for v in result.tracks[i]]
                for i in range(ntr)
            ],
            "real_flags": [
                [bool(b) for b in result.real_flags[i]] for i in range(ntr)
            ],
            "pairing_warnings": [bool(b) for b in result.warnings],
        }
        write_json(out, payload)
    else:
        header = ["index", model.param]
        for i in range(ntr):
            header += [f"re{i}", f"im{i}", f"real{i}"]
        header.append("pairing_warning")
        rows = []
        for k, p in enumerate(result.grid):
            row = [k, float(p)]
            for i in range(ntr):
                v = result.tracks[i, k]
                row += [v.real, v.imag, bool(result.real_flags[i, k])]
            row.append(bool(result.warnings[k]))
            rows.append(row)
        write_csv(out, header, rows)
    print(out)
    return EXIT_OK


def _cmd_sturmian(args, parser) -> int:
    s = bivariate_secular(args.n, args.y)
    trace = branch_trace(s, args.range, args.samples)
    out = Path(args.output or "sturmian.csv")
    header = ["energy", "r_plus", "r_minus", "in_model", "refined"]
    rows = [
        (p.energy, p.r_plus, p.r_minus, p.in_model, p.refined)
        for p in trace.points
    ]
    write_csv(out, header, rows)

    flags = {
        "n": args.n,
        "y": args.y,
        "range": f"{args.range[0]}:{args.range[1]}",
        "samples": args.samples,
    }
    sidecar = out.with_name(out.stem + "_poles.json")
    write_json(
        sidecar,
        {
            "provenance": _provenance("sturmian", flags, args.seed, args.precision),
            "poles": [
                {"energy": b.energy, "kind": b.kind, "multiplicity": b.multiplicity}
                for b in trace.poles
            ],
            "branch_merges": [
                {"energy": b.energy, "kind": b.kind, "multiplicity": b.multiplicity}
                for b in trace.merges
            ],
            "persistent_lines": list(trace.persistent_lines),
        },
    )
    print(out)
    print(sidecar)
    return EXIT_OK


def _critical_point_payload(pt) -> dict:
    def scrub(v):
        if isinstance(v, (tuple, list)):
            return [scrub(x) for x in v]
        if isinstance(v, (np.floating, float)):
            v = float(v)
            return v if np.isfinite(v) else None
        if isinstance(v, (np.integer, int)):
            return int(v)
        return v

    energy = (
        None
        if not np.isfinite(pt.energy.real)
        else [float(pt.energy.real), float(pt.energy.imag)]
    )
    return {
        "params": {k: scrub(float(v)) for k, v in pt.params.items()},
        "energy": energy,
        "kind": pt.kind,
        "order": int(pt.order),
        "residuals": {k: scrub(v) for k, v in pt.residuals.items()},
    }


def _cmd_find_ep(args, parser) -> int:
    flags = {
        "model": args.model,
        "n": args.n,
        "y": args.y,
        "param": args.param,
        "range": f"{args.range[0]}:{args.range[1]}",
        "scan_y": args.scan_y or None,
    }
    if args.scan_y:
        if args.model != "bc":
            parser.error("--scan-y only applies to the bc family")
        points = ep_locate_2d_bc(args.n, args.range)
    elif args.model == "bc":
        s = bivariate_secular(args.n, args.y or 0.0)
        points = ep_locate_1d(s, args.range)
    elif args.model == "epn":
        points = ep_locate_1d(EpnModel(args.n), args.range)
    else:
        parser.error("find-ep supports the bc and epn families")

    out = Path(args.output or "critical_points.json")
    write_json(
        out,
        {
            "provenance": _provenance("find-ep", flags, args.seed, args.precision),
            "critical_points": [_critical_point_payload(p) for p in points],
        },
    )
    print(out)
    return EXIT_OK


def _cmd_metric(args, parser) -> int:
    if args.model == "epn":
        if args.t is None:
            parser.error("metric for the epn family needs --t")
        model = EpnModel(args.n)
        matrix = model.matrix(args.t)
        at = {"t": args.t}
    elif args.model == "bc":
        if args.r is None:
            parser.error("metric for the bc family needs --r (and optionally --y)")
        model = BcModel(args.n, args.y or 0.0)
        matrix = model.matrix(args.r)
        at = {"y": args.y or 0.0, "r": args.r}
    else:
        parser.error("metric supports the epn and bc families")
    kappa = args.kappa
    met = build_metric(matrix, kappa, precision=args.precision if args.precision != "double" else "auto")
    flags = {"model": args.model, "n": args.n, **at}
    if kappa is not None:
        flags["kappa"] = ",".join(repr(k) for k in kappa)
    out = Path(args.output or "metric.json")
    write_json(
        out,
        {
            "provenance": _provenance("metric", flags, args.seed, args.precision),
            "theta": [
                [[float(v.real), float(v.imag)] for v in row] for row in met.theta
            ],
            "kappa": [float(k) for k in met.kappa],
            "residual": met.residual,
            "min_eig": met.min_eig,
            "cond": met.cond,
            "cond_basis": met.cond_basis,
        },
    )
    print(out)
    return EXIT_OK


def _cmd_metric_sweep(args, parser) -> int:
    if args.model != "epn":
        parser.error("metric-sweep currently supports the epn family")
    model = EpnModel(args.n)
    points = metric_conditioning_sweep(model, args.t_grid, args.kappa)
    out = Path(args.output or "metric_sweep.csv")
    header = ["t", "min_eig", "cond", "error"]
    rows = [(p.param, p.min_eig, p.cond, p.error or "") for p in points]
    write_csv(out, header, rows)
    print(out)
    return EXIT_OK


FIGURES = {
    1: ("sweep", {"model": "hermitian-demo", "n": 4, "seed": 1, "range": (-1.0, 1.0), "samples": 2001}),
    2: ("sweep", {"model": "epn", "n": 8, "range": (-0.5, 0.5), "samples": 201}),
    3: ("sweep", {"model": "epn", "n": 6, "range": (-0.3, 1.0), "samples": 131}),
    4: ("sturmian", {"n": 6, "y": 0.0, "range": (0.0, 5.0), "samples": 2000}),
    5: ("sturmian", {"n": 5, "y": -0.5, "range": (-1.0, 5.0), "samples": 2000}),
    6: ("sturmian", {"n": 5, "y": -0.8, "range": (-1.0, 5.0), "samples": 2000}),
}


def _plot_script(k: int, command: str, spec: dict, data_name: str, n_tracks: int) -> str:
    lines = [
        f"# plot commands for figure {k} (gnuplot syntax)",
        "set datafile separator ','",
        "set key off",
    ]
    if command == "sweep":
        lines += [
            f"set xlabel '{ 't' if spec['model'] != 'bc' else 'r' }'",
            "set ylabel 'Re E'",
            "plot \\",
        ]
        parts = [
            f"  '{data_name}' skip 1 using 2:{3 + 3 * i} with lines"
            for i in range(n_tracks)
        ]
        lines.append(", \\\n".join(parts))
    else:
        lines += [
            "set xlabel 'E'",
            "set ylabel 'r'",
            f"plot '{data_name}' skip 1 using 1:2 with dots, \\",
            f"     '{data_name}' skip 1 using 1:3 with dots",
        ]
    return "\n".join(lines) + "\n"


def _cmd_figure(args, parser) -> int:
    k = args.k
    if k not in FIGURES:
        parser.error("figure number must be 1..6")
    command, spec = FIGURES[k]
    outdir = Path(args.out_dir)
    data = outdir / f"figure{k}_data.csv"
    ns = argparse.Namespace(
        seed=spec.get("seed", DEFAULT_SEED),
        precision="double",
        format="csv",
        output=str(data),
        **{kk: vv for kk, vv in spec.items() if kk != "seed"},
    )
    if command == "sweep":
        ns.param = "t"
        ns.y = None
        _cmd_sweep(ns, parser)
    else:
        _cmd_sturmian(ns, parser)
    n_tracks = spec["n"]
    script = outdir / f"figure{k}_plot.txt"
    _atomic_write(script, _plot_script(k, command, spec, data.name, n_tracks))
    print(script)
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epspect",
        description="Spectra, exceptional points and metric operators of two "
        "solvable non-Hermitian matrix families.",
    )
    parser.add_argument("--version", action="version", version=f"epspect {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="PRNG seed (default 42)")
        p.add_argument(
            "--precision",
            choices=["double", "extended"],
            default="double",
            help="arithmetic tier for floating work",
        )
        p.add_argument("--output", help="output file path")

    p = sub.add_parser("sweep", help="eigenvalue tracks over a parameter grid")
    p.add_argument("--model", required=True, choices=["epn", "bc", "hermitian-demo"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--y", type=float, help="shift for the bc family")
    p.add_argument("--param", choices=["t", "r"], help="sweep parameter (model-implied)")
    p.add_argument("--range", type=_parse_range, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("sturmian", help="coupling-function branches r(E)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--range", type=_parse_range, required=True)
    p.add_argument("--samples", type=int, required=True)
    common(p)
    p.set_defaults(func=_cmd_sturmian)

    p = sub.add_parser("find-ep", help="locate and classify spectral degeneracies")
    p.add_argument("--model", required=True, choices=["bc", "epn"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--y", type=float, help="shift for the bc family")
    p.add_argument("--param", choices=["t", "r"])
    p.add_argument("--range", type=_parse_range, required=True)
    p.add_argument("--scan-y", action="store_true", help="scan the shift y (bc only)")
    common(p)
    p.set_defaults(func=_cmd_find_ep)

    p = sub.add_parser("metric", help="build a quasi-Hermiticity metric")
    p.add_argument("--model", required=True, choices=["epn", "bc"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=float, help="epn family parameter")
    p.add_argument("--y", type=float, help="bc shift")
    p.add_argument("--r", type=float, help="bc coupling parameter")
    p.add_argument("--kappa", type=_parse_floats, help="comma-separated weights")
    common(p)
    p.set_defaults(func=_cmd_metric)

    p = sub.add_parser("metric-sweep", help="metric conditioning along a grid")
    p.add_argument("--model", required=True, choices=["epn"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t-grid", dest="t_grid", type=_parse_floats, required=True)
    p.add_argument("--kappa", type=_parse_floats)
    common(p)
    p.set_defaults(func=_cmd_metric_sweep)

    p = sub.add_parser("figure", help="canonical data + plot script for figures 1..6")
    p.add_argument("k", type=int)
    p.add_argument("--out-dir", default=".")
    common(p)
    p.set_defaults(func=_cmd_figure)

    return parser


NEGATIVE_VALUE_FLAGS = {"--range", "--t", "--y", "--r", "--t-grid", "--kappa"}


def _join_negative_values(argv: list[str]) -> list[str]:
    """Turn `--range -1:1` into `--range=-1:1` so argparse accepts it."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else ""
        if (
            tok in NEGATIVE_VALUE_FLAGS
            and len(nxt) > 1
            and nxt[0] == "-"
            and (nxt[1].isdigit() or nxt[1] == ".")
        ):
            out.append(f"{tok}={nxt}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    args = parser.parse_args(_join_negative_values(argv))
    try:
        return args.func(args, parser)
    except (DegenerateBasisError, ComplexSpectrumError, MetricConstructionError) as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except ConvergenceError as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE


if __name__ == "__main__":
    raise SystemExit(main())

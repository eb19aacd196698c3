"""Command-line front end.

    quadlind spectrum --model m.json --out spec.csv --format csv
    quadlind steady --xx 8,1,0,1,1,0.9,0.1
    quadlind verify --L 2 --seed 7
    quadlind sweep --xx 20,1,0,1,1,1,0 --axis Gamma_1=0.5,1,2 --out sweep.csv

Exit status: 0 success, 1 validation error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, oracle
from .errors import QuadlindError, ValidationError
from .io import jsonable, load_model, model_to_dict, parse_xx_flag, write_csv, write_json
from .model import build_xx_chain, random_model
from .reports import (Report, bench_report, evolve_report, spectrum_report, steady_report,
                      verify_report, xx_compare_report)
from .sweep import Axis, run_sweep

COMMANDS = ("spectrum", "steady", "evolve", "xx-compare", "verify", "sweep", "bench")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--model", type=Path, help="JSON model file")
    src.add_argument("--xx", metavar="L,J,h_z,Gamma_1,Gamma_L,nbar_1,nbar_L",
                     help="inline boundary-driven XX chain")
    common.add_argument("--hbar", type=float, default=1.0, help="hbar for --xx (default 1)")
    common.add_argument("--out", type=Path, help="output file; a .summary.json is written next to it")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--tol", type=float, help="Hermiticity/PSD validation tolerance")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--lmax-oracle", type=int, default=oracle.L_MAX)

    p = _Parser(prog="quadlind", description="Quadratic fermionic Lindblad solver.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("spectrum", parents=[common], help="rapidities of P and the spectrum of M")
    sub.add_parser("steady", parents=[common], help="steady-state occupations and currents")
    ev = sub.add_parser("evolve", parents=[common], help="two-point matrix versus time")
    ev.add_argument("--times", default="0:10:11",
                    help="start:stop:num (inclusive) or comma-separated list")
    ev.add_argument("--c0", type=Path, help="JSON L x L initial two-point matrix (default: empty)")
    sub.add_parser("xx-compare", parents=[common], help="closed-form versus numerical rapidities")
    vf = sub.add_parser("verify", parents=[common], help="cross-check against the ED oracle")
    vf.add_argument("--L", type=int, help="size of a seeded random model")
    sw = sub.add_parser("sweep", parents=[common], help="XX-chain parameter sweep")
    sw.add_argument("--axis", action="append", default=[], metavar="NAME=VALUES",
                    help="name=v1,v2,... or name=start:stop:num; give once or twice")
    bn = sub.add_parser("bench", parents=[common], help="timing of the full solve")
    bn.add_argument("--sizes", default="128,256,512")
    bn.add_argument("--repeats", type=int, default=3)
    return p


def _model(args):
    if args.model is not None:
        return load_model(args.model, args.tol)
    if args.xx is not None:
        return build_xx_chain(parse_xx_flag(args.xx, args.hbar))
    return None


def _require_model(args):
    m = _model(args)
    if m is None:
        raise ValidationError("exactly one model source is required: --model or --xx")
    return m


def _parse_times(text: str) -> np.ndarray:
    try:
        if ":" in text:
            a, b, n = text.split(":")
            return np.linspace(float(a), float(b), int(n))
        return np.array([float(t) for t in text.split(",")])
    except ValueError as exc:
        raise ValidationError(f"--times: {exc}") from exc


def _dispatch(args) -> tuple[Report, dict]:
    cmd = args.command
    meta = {}
    if cmd == "spectrum":
        m = _require_model(args)
        meta["model"] = model_to_dict(m)
        return spectrum_report(m), meta
    if cmd == "steady":
        m = _require_model(args)
        meta["model"] = model_to_dict(m)
        return steady_report(m), meta
    if cmd == "evolve":
        m = _require_model(args)
        meta["model"] = model_to_dict(m)
        if args.c0 is not None:
            from .io import matrix_from_json
            C0 = matrix_from_json("c0", json.loads(args.c0.read_text()))
        else:
            C0 = np.zeros((m.L, m.L), dtype=complex)
        return evolve_report(m, C0, _parse_times(args.times)), meta
    if cmd == "xx-compare":
        if args.xx is None:
            m = _require_model(args)
            if m.xx is None:
                raise ValidationError("xx-compare needs an XX chain model (--xx or xx_chain JSON)")
            params = m.xx
        else:
            params = parse_xx_flag(args.xx, args.hbar)
        return xx_compare_report(params), meta
    if cmd == "verify":
        m = _model(args)
        if m is None:
            if args.L is None:
                raise ValidationError("verify needs --L (random model) or a model source")
            m = random_model(args.L, args.seed)
            meta["model"] = {"random": True, "L": args.L, "seed": args.seed}
        else:
            meta["model"] = model_to_dict(m)
        if m.L > args.lmax_oracle:
            raise ValidationError(f"L={m.L} exceeds --lmax-oracle={args.lmax_oracle}")
        return verify_report(m, lmax=args.lmax_oracle, seed=args.seed), meta
    if cmd == "sweep":
        if args.xx is None:
            raise ValidationError("sweep needs a base --xx parameter set")
        base = parse_xx_flag(args.xx, args.hbar)
        axes = [Axis.parse(a) for a in args.axis]
        manifest = Path(str(args.out) + ".manifest.jsonl") if args.out else None
        rows = run_sweep(base, axes, manifest)
        meta["axes"] = {a.name: list(a.values) for a in axes}
        n_err = sum(r["status"] == "error" for r in rows)
        n_flag = sum(r["status"] == "flagged" for r in rows)
        return Report("sweep", {"rows": rows, "errors": n_err, "flagged": n_flag}, rows), meta
    if cmd == "bench":
        try:
            sizes = [int(s) for s in args.sizes.split(",")]
        except ValueError as exc:
            raise ValidationError(f"--sizes: {exc}") from exc
        return bench_report(sizes, args.repeats), meta
    raise ValidationError(f"unknown command {cmd!r}")


def _fmt(v) -> str:
    if isinstance(v, (complex, np.complexfloating)):
        return f"{v.real:+.10g}{v.imag:+.10g}j"
    if isinstance(v, (float, np.floating)):
        return f"{v:.10g}"
    return "" if v is None else str(v)


def format_table(rows: list[dict]) -> str:
    if not rows:
        return "(no rows)"
    cols = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    cells = [[_fmt(r.get(c)) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(cols, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(x.rjust(w) for x, w in zip(row, widths)) for row in cells]
    return "\n".join(lines)


def _summary(report: Report, meta: dict, args, status: int) -> dict:
    data = {k: v for k, v in report.data.items() if k != "rows"}
    return {
        "command": report.command,
        "status": status,
        "ok": report.ok,
        "version": __version__,
        "seed": args.seed,
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        **meta,
        "result": data,
    }


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, meta = _dispatch(args)
    except QuadlindError as exc:
        print(f"quadlind {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    status = 0 if report.ok else 2
    print(format_table(report.rows), file=stdout)
    summary = _summary(report, meta, args, status)
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        if args.format == "csv":
            write_csv(args.out, report.rows)
        else:
            write_json(args.out, {"command": report.command, **meta, "data": report.data,
                                  "rows": report.rows})
        write_json(Path(str(args.out) + ".summary.json"), summary)
    else:
        print(json.dumps(jsonable(summary), allow_nan=False), file=stdout)
    return status


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

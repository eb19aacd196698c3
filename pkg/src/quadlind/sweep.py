"""Parameter sweeps over XX-chain parameters.

Grid points run in a process pool (size capped by ``QUADLIND_THREADS``).
Finished rows are appended to a JSON-lines manifest so an interrupted sweep
resumes where it stopped.  Output order is the grid order regardless of
completion order.
"""
from __future__ import annotations

import itertools
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ClosedFormError, QuadlindError, ValidationError
from .io import jsonable
from .model import XXChainParams, build_xx_chain
from .dynamics import spectral_gap
from .reports import full_solve
from .xx_analytic import check_condition, compare_analytic_numeric

SWEEPABLE = ("L", "J", "h_z", "Gamma_1", "Gamma_L", "nbar_1", "nbar_L", "hbar")


@dataclass(frozen=True)
class Axis:
    name: str
    values: tuple

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """``name=v1,v2,...`` or ``name=start:stop:num`` (inclusive linspace)."""
        if "=" not in text:
            raise ValidationError(f"axis must look like name=values, got {text!r}")
        name, spec = (s.strip() for s in text.split("=", 1))
        if name not in SWEEPABLE:
            raise ValidationError(f"unknown sweep axis {name!r}; choose from {SWEEPABLE}")
        try:
            if ":" in spec:
                start, stop, num = spec.split(":")
                values = tuple(float(v) for v in np.linspace(float(start), float(stop), int(num)))
            else:
                values = tuple(float(v) for v in spec.split(","))
        except ValueError as exc:
            raise ValidationError(f"axis {name}: {exc}") from exc
        if name == "L":
            if any(v != int(v) or v < 1 for v in values):
                raise ValidationError("axis L needs positive integers")
            values = tuple(int(v) for v in values)
        if not values:
            raise ValidationError(f"axis {name} is empty")
        return cls(name, values)


def grid(base: XXChainParams, axes: list[Axis]) -> list[XXChainParams]:
    if not 1 <= len(axes) <= 2:
        raise ValidationError(f"sweep takes 1 or 2 axes, got {len(axes)}")
    if len({a.name for a in axes}) != len(axes):
        raise ValidationError("sweep axes must be distinct")
    points = []
    for combo in itertools.product(*(a.values for a in axes)):
        points.append(base.replace(**{a.name: v for a, v in zip(axes, combo)}))
    return points


def _key(p: XXChainParams) -> str:
    return json.dumps({k: getattr(p, k) for k in SWEEPABLE}, sort_keys=True)


def evaluate_point(index: int, params: XXChainParams) -> dict:
    """One sweep row; failures are recorded in the row instead of raised."""
    row = {"index": index}
    row.update({k: getattr(params, k) for k in SWEEPABLE})
    row.update(status="ok", message="", lambda_min_re=None, lambda_max_re=None, gap=None,
               occupation_1=None, occupation_L=None, occupation_mean=None,
               current=None, current_spread=None, closed_form_deviation=None)
    try:
        model = build_xx_chain(params)
        spec, ss = full_solve(model)
        lam = spec.rapidities
        row.update(lambda_min_re=float(lam.real.min()), lambda_max_re=float(lam.real.max()),
                   gap=spectral_gap(spec), occupation_1=float(ss.occupations[0]),
                   occupation_L=float(ss.occupations[-1]),
                   occupation_mean=float(ss.occupations.mean()))
        if ss.currents is not None and ss.currents.size:
            row.update(current=float(ss.currents.mean()),
                       current_spread=float(np.ptp(ss.currents)))
    except QuadlindError as exc:
        row.update(status="error", message=f"{type(exc).__name__}: {exc}")
        return row
    if check_condition(params):
        try:
            row["closed_form_deviation"] = compare_analytic_numeric(params)
        except ClosedFormError as exc:
            row.update(status="flagged", message=f"closed form refused, numerics used: {exc}")
    return row


def worker_count() -> int:
    env = os.environ.get("QUADLIND_THREADS")
    n = os.cpu_count() or 1
    if env:
        try:
            n = min(n, max(1, int(env)))
        except ValueError as exc:
            raise ValidationError(f"QUADLIND_THREADS must be an integer, got {env!r}") from exc
    return n


def load_manifest(path: Path, points: list[XXChainParams]) -> dict[int, dict]:
    done = {}
    if not path.exists():
        return done
    keys = {i: _key(p) for i, p in enumerate(points)}
    for line in path.read_text().splitlines():
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError:
            continue  # torn final line from an interrupted run
        i = rec.get("index")
        if keys.get(i) == rec.get("key"):
            done[i] = rec["row"]
    return done


def run_sweep(base: XXChainParams, axes: list[Axis], manifest: Path | None = None,
              workers: int | None = None) -> list[dict]:
    points = grid(base, axes)
    done = load_manifest(manifest, points) if manifest else {}
    todo = [(i, p) for i, p in enumerate(points) if i not in done]
    workers = worker_count() if workers is None else workers
    fh = open(manifest, "a") if manifest else None
    try:
        def record(i, row):
            done[i] = row
            if fh:
                fh.write(json.dumps({"index": i, "key": _key(points[i]), "row": jsonable(row)}) + "\n")
                fh.flush()

        if workers > 1 and len(todo) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = {i: pool.submit(evaluate_point, i, p) for i, p in todo}
                for i, fut in futures.items():
                    record(i, fut.result())
        else:
            for i, p in todo:
                record(i, evaluate_point(i, p))
    finally:
        if fh:
            fh.close()
    return [done[i] for i in range(len(points))]

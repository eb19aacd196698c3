"""JSON model files and tabular result output.

Complex numbers are ``[re, im]`` pairs in JSON and ``<name>_re``,
``<name>_im`` column pairs in CSV.  Floats are written with ``repr`` so
re-parsing is bitwise exact.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .model import ModelSpec, ValidatedModel, XXChainParams, build_xx_chain, validate_model

XX_KEYS = ("L", "J", "h_z", "Gamma_1", "Gamma_L", "nbar_1", "nbar_L")


def _to_complex(x) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ValidationError(f"complex number must be [re, im], got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    raise ValidationError(f"not a number: {x!r}")


def matrix_from_json(name: str, rows) -> np.ndarray:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ValidationError(f"{name} must be a row-major nested array")
    try:
        return np.array([[_to_complex(x) for x in r] for r in rows], dtype=complex)
    except ValueError as exc:
        raise ValidationError(f"{name}: ragged rows ({exc})") from exc


def complex_to_json(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def matrix_to_json(m) -> list:
    return [[complex_to_json(z) for z in row] for row in np.asarray(m)]


def xx_params_from_dict(d: dict, hbar: float | None = None) -> XXChainParams:
    unknown = set(d) - set(XX_KEYS) - {"hbar"}
    if unknown:
        raise ValidationError(f"unknown xx_chain keys: {sorted(unknown)}")
    missing = [k for k in XX_KEYS if k not in d]
    if missing:
        raise ValidationError(f"xx_chain is missing keys: {missing}")
    kw = {k: float(d[k]) for k in XX_KEYS[1:]}
    if int(d["L"]) != d["L"]:
        raise ValidationError(f"L must be an integer, got {d['L']!r}")
    kw["hbar"] = float(d.get("hbar", 1.0 if hbar is None else hbar))
    return XXChainParams(L=int(d["L"]), **kw)


def parse_xx_flag(text: str, hbar: float = 1.0) -> XXChainParams:
    """Parse ``L,J,h_z,Gamma_1,Gamma_L,nbar_1,nbar_L``."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != len(XX_KEYS):
        raise ValidationError(f"--xx expects {len(XX_KEYS)} comma-separated values "
                              f"({','.join(XX_KEYS)}), got {len(parts)}")
    try:
        vals = [float(p) for p in parts]
    except ValueError as exc:
        raise ValidationError(f"--xx: {exc}") from exc
    return xx_params_from_dict(dict(zip(XX_KEYS, vals)), hbar=hbar)


def model_from_dict(d: dict, tol: float | None = None) -> ValidatedModel:
    tols = {} if tol is None else {"tol_hermitian": tol, "tol_psd": tol}
    if "xx_chain" in d:
        extra = set(d) - {"xx_chain", "hbar"}
        if extra:
            raise ValidationError(f"xx_chain cannot be combined with {sorted(extra)}")
        return build_xx_chain(xx_params_from_dict(d["xx_chain"], hbar=d.get("hbar")))
    missing = [k for k in ("h", "lambda_plus", "lambda_minus") if k not in d]
    if missing:
        raise ValidationError(f"model is missing keys: {missing}")
    spec = ModelSpec(matrix_from_json("h", d["h"]),
                     matrix_from_json("lambda_plus", d["lambda_plus"]),
                     matrix_from_json("lambda_minus", d["lambda_minus"]),
                     hbar=float(d.get("hbar", 1.0)), L=d.get("L"))
    return validate_model(spec, **tols)


def load_model(path, tol: float | None = None) -> ValidatedModel:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(d, dict):
        raise ValidationError(f"{path}: top level must be an object")
    return model_from_dict(d, tol)


def model_to_dict(model: ValidatedModel) -> dict:
    if model.xx is not None:
        p = model.xx
        return {"hbar": p.hbar, "xx_chain": {k: getattr(p, k) for k in XX_KEYS}}
    return {"L": model.L, "hbar": model.hbar, "h": matrix_to_json(model.h),
            "lambda_plus": matrix_to_json(model.lambda_plus),
            "lambda_minus": matrix_to_json(model.lambda_minus)}


def flatten_row(row: dict) -> dict:
    """Split complex values into ``_re``/``_im`` columns for CSV."""
    out = {}
    for k, v in row.items():
        if isinstance(v, (complex, np.complexfloating)):
            out[f"{k}_re"] = float(v.real)
            out[f"{k}_im"] = float(v.imag)
        elif isinstance(v, np.floating):
            out[k] = float(v)
        elif isinstance(v, np.integer):
            out[k] = int(v)
        elif v is None:
            out[k] = ""
        else:
            out[k] = v
    return out


def jsonable(x):
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return complex_to_json(x)
    if isinstance(x, np.floating):
        return jsonable(float(x))
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, float) and not np.isfinite(x):
        return None
    return x


def write_csv(path, rows: list[dict]) -> None:
    flat = [flatten_row(r) for r in rows]
    fields: list[str] = []
    for r in flat:
        for k in r:
            if k not in fields:
                fields.append(k)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        for r in flat:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})


def read_csv(path) -> list[dict]:
    """Read a CSV written by `write_csv`; ``_re``/``_im`` pairs become complex."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for r in rows:
        parsed = {}
        for k, v in r.items():
            if k.endswith("_im") and k[:-3] + "_re" in r:
                continue
            if k.endswith("_re") and k[:-3] + "_im" in r:
                re_, im_ = r[k], r[k[:-3] + "_im"]
                parsed[k[:-3]] = complex(float(re_), float(im_)) if re_ != "" else None
                continue
            parsed[k] = _parse_scalar(v)
        out.append(parsed)
    return out


def _parse_scalar(v: str):
    if v == "":
        return None
    for cast in (int, float):
        try:
            return cast(v)
        except ValueError:
            pass
    return v


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(jsonable(payload), indent=2, allow_nan=False) + "\n")

"""JSON and CSV formats for matrices, channels, codes and reports.

Matrices are row-major nested lists of floats. Infinite values are written as
the string ``"inf"`` so the output stays valid JSON.
"""

import csv
import json
import math
from pathlib import Path

import numpy as np

from .channels import GaussianChannel
from .entanglement import LOG_BASE
from .gecc import GECCode
from .symplectic import n_modes

SCHEMA_VERSION = 1


def number(x):
    """JSON-safe float: ``inf`` and ``nan`` become strings."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return x


def parse_number(x):
    return float(x) if isinstance(x, str) else x


def matrix(m):
    return [[number(v) for v in row] for row in np.asarray(m, dtype=float)]


def covariance_to_dict(gamma):
    return {"n_modes": n_modes(gamma), "data": matrix(gamma)}


def covariance_from_dict(obj):
    data = np.array(obj["data"], dtype=float)
    if n_modes(data) != obj["n_modes"]:
        raise ValueError(f"n_modes={obj['n_modes']} does not match a {data.shape} matrix")
    return data


def channel_to_dict(channel):
    return {"M": matrix(channel.M), "N": matrix(channel.N)}


def channel_from_dict(obj):
    try:
        return GaussianChannel(np.array(obj["M"], dtype=float), np.array(obj["N"], dtype=float))
    except KeyError as exc:
        raise ValueError(f"channel JSON lacks key {exc}") from None


def code_to_dict(code):
    return {"n": code.n, "S_E": matrix(code.S_E), "S_D": matrix(code.S_D)}


def code_from_dict(obj):
    try:
        return GECCode(int(obj["n"]), np.array(obj["S_E"], dtype=float), np.array(obj["S_D"], dtype=float))
    except KeyError as exc:
        raise ValueError(f"code JSON lacks key {exc}") from None


def degradation_to_dict(result):
    return {
        "D": number(result.D),
        "nu_minus_sq": number(result.nu_minus_squared),
        "log_negativity": number(result.log_negativity),
        "entanglement_breaking": bool(result.entanglement_breaking),
        "log_base": LOG_BASE,
    }


def search_result_to_dict(result, channel=None):
    from .nogo_search import realize

    out = {
        "best_D": number(result.best_D),
        "baseline_D": number(result.baseline_D),
        "violated": result.violated,
        "evaluations": result.evaluations,
        "skipped": result.skipped,
        "seed": result.seed,
        "method": result.method,
        "best_det_N_GC": number(result.best_det_N_GC),
        "best_det_M_GC": number(result.best_det_M_GC),
        "best_params": {
            "n": result.best_params.n,
            "r_max": result.best_params.r_max,
            "encoder_params": [number(v) for v in result.best_params.encoder_params],
            "decoder_params": [number(v) for v in result.best_params.decoder_params],
        },
        "best_code": code_to_dict(realize(result.best_params)),
        "trace": [number(v) for v in result.trace],
    }
    if channel is not None:
        out["channel"] = channel_to_dict(channel)
    return out


def envelope(command, payload, parameters=None):
    """Wraps a report with the schema version, log base and the flags that produced it."""
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "log_base": LOG_BASE,
        "parameters": parameters or {},
        **payload,
    }


def load_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def dump_json(obj, path=None):
    text = json.dumps(obj, indent=2, allow_nan=False)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
    return text


def _csv_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(v)


def write_csv(rows, path, columns):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter=",", lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_csv_cell(row.get(key, "")) for key in columns])

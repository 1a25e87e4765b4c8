"""Structured-text (JSON) file formats and delimited output writers.

Channel files:
    {"n": 2, "format": "dense", "coeffs": [... 4^n reals ...]}
    {"n": 2, "format": "lindblad", "generators": [{"pauli": "XI", "lambda": 0.1}]}
Noise-map files:
    {"n": 2, "theta": [[...]]}                      row-major matrix
    {"n": 2, "gate_noises": [<channel>, ...]}       per-gate calibration models
Free sets:      {"dim": 3, "points": [[...], ...]}
Operators:      {"dim": 4, "matrix": [[[re, im], ...], ...]}    row-major

Coefficient order follows the big-endian base-4 Pauli index convention.
CSV floats are written with 9 significant digits (never shortest
round-trip) so outputs are byte-comparable across runs and platforms.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .channels import LindbladModel, PauliChannel, lindblad_channel
from .implementability import FreeSet, LpResult, QuasiProgram
from .noise_map import NoiseMap, noise_map_from_gate_noises
from .pauli import PauliString

FLOAT_FMT = "{:.9g}"


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return FLOAT_FMT.format(float(value))
    if value is None:
        return ""
    return str(value)


def load_json(path: str | Path) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ValueError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed structured text in {path}: {exc}") from None


def channel_from_dict(data: dict) -> PauliChannel:
    if not isinstance(data, dict) or "n" not in data:
        raise ValueError("channel object needs an 'n' field")
    n = int(data["n"])
    fmt = data.get("format", "dense")
    if fmt == "dense":
        if "coeffs" not in data:
            raise ValueError("dense channel needs a 'coeffs' field")
        return PauliChannel(n, np.asarray(data["coeffs"], dtype=float))
    if fmt == "lindblad":
        gens = data.get("generators")
        if gens is None:
            raise ValueError("lindblad channel needs a 'generators' field")
        model = LindbladModel(
            n,
            tuple(
                (PauliString.from_label(g["pauli"]), float(g["lambda"])) for g in gens
            ),
        )
        return lindblad_channel(model)
    raise ValueError(f"unknown channel format {fmt!r}")


def channel_to_dict(c: PauliChannel) -> dict:
    return {"n": c.n, "format": "dense", "coeffs": [float(v) for v in c.coeffs]}


def lindblad_to_dict(model: LindbladModel) -> dict:
    return {
        "n": model.n,
        "format": "lindblad",
        "generators": [
            {"pauli": p.label(), "lambda": float(rate)} for p, rate in model.generators
        ],
    }


def load_channel(path: str | Path) -> PauliChannel:
    return channel_from_dict(load_json(path))


def noise_map_from_dict(data: dict) -> NoiseMap:
    if not isinstance(data, dict) or "n" not in data:
        raise ValueError("noise-map object needs an 'n' field")
    n = int(data["n"])
    if "theta" in data:
        return NoiseMap(n, np.asarray(data["theta"], dtype=float))
    if "gate_noises" in data:
        noises = [channel_from_dict(obj) for obj in data["gate_noises"]]
        return noise_map_from_gate_noises(noises)
    raise ValueError("noise-map object needs a 'theta' or 'gate_noises' field")


def noise_map_to_dict(m: NoiseMap) -> dict:
    return {"n": m.n, "theta": [[float(v) for v in row] for row in m.theta]}


def load_noise_map(path: str | Path) -> NoiseMap:
    return noise_map_from_dict(load_json(path))


def free_set_from_dict(data: dict) -> FreeSet:
    if not isinstance(data, dict) or "points" not in data:
        raise ValueError("free-set object needs a 'points' field")
    points = np.asarray(data["points"], dtype=float)
    if "dim" in data and points.shape[1] != int(data["dim"]):
        raise ValueError("free-set 'dim' does not match the point length")
    normalizer = data.get("normalizer")
    return FreeSet(points, None if normalizer is None else np.asarray(normalizer, float))


def operator_from_dict(data: dict) -> np.ndarray:
    if not isinstance(data, dict) or "matrix" not in data:
        raise ValueError("operator object needs a 'matrix' field")
    raw = data["matrix"]
    try:
        mat = np.array(
            [[complex(cell[0], cell[1]) for cell in row] for row in raw], dtype=complex
        )
    except (TypeError, IndexError):
        raise ValueError("operator matrix cells must be [re, im] pairs") from None
    if "dim" in data and mat.shape != (int(data["dim"]), int(data["dim"])):
        raise ValueError("operator 'dim' does not match the matrix shape")
    return mat


def operator_to_dict(mat: np.ndarray) -> dict:
    mat = np.asarray(mat, dtype=complex)
    return {
        "dim": mat.shape[0],
        "matrix": [[[float(c.real), float(c.imag)] for c in row] for row in mat],
    }


def quasi_program_to_dict(program: QuasiProgram) -> dict:
    return {
        "n": program.n,
        "entries": [
            {"pauli": PauliString.from_index(program.n, i).label(), "quasiprobability": float(x)}
            for i, x in zip(program.indices, program.quasiprobabilities)
        ],
        "cost": float(program.cost),
    }


def lp_result_to_dict(result: LpResult) -> dict:
    return {
        "p": float(result.p),
        "x": [float(v) for v in result.x],
        "iterations": int(result.iterations),
    }


def round_floats(obj: Any) -> Any:
    """Round every float to 9 significant digits for stable JSON output."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, (float, np.floating)):
        return float(FLOAT_FMT.format(float(obj)))
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    return obj


def dump_json(obj: Any, path: str | Path | None) -> str:
    text = json.dumps(round_floats(obj), indent=2, sort_keys=False) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def write_records(
    records: Iterable[dict],
    fieldnames: Sequence[str],
    path: str | Path | None,
    fmt: str = "csv",
) -> str:
    """Serialize records to CSV or JSON; returns the text, writing if asked."""
    records = list(records)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(fieldnames)
        for rec in records:
            writer.writerow([format_value(rec[k]) for k in fieldnames])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text
    if fmt == "json":
        return dump_json([{k: rec[k] for k in fieldnames} for rec in records], path)
    raise ValueError(f"unknown output format {fmt!r}")

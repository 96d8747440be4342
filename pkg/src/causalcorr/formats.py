"""File formats: JSON for distributions, states, operators, circuits and models; CSV for distributions."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from . import infotheory as it
from . import quantum_sim as qs
from .infotheory import JointDistribution
from .quantum_sim import DensityOperator, PureState

SIG_DIGITS = 12


class FormatError(ValueError):
    """Malformed or unrecognized input file."""


def state_to_dict(state: PureState) -> dict:
    return {"dims": list(state.dims), "re": state.amplitudes.real.tolist(), "im": state.amplitudes.imag.tolist()}


def density_to_dict(rho: DensityOperator) -> dict:
    return {"dims": list(rho.dims), "re": rho.matrix.real.tolist(), "im": rho.matrix.imag.tolist()}


def quantum_from_dict(data: dict) -> PureState | DensityOperator:
    try:
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
        dims = data["dims"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad state record: {exc}") from exc
    if re.shape != im.shape:
        raise FormatError("'re' and 'im' have different shapes")
    if re.ndim == 1:
        return PureState(dims, re + 1j * im)
    if re.ndim == 2:
        return DensityOperator(dims, re + 1j * im)
    raise FormatError("state amplitudes must be a vector or a square matrix")


def distribution_to_csv(dist: JointDistribution) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"x_{i + 1}" for i in range(dist.parties)] + ["p"])
    for idx in np.ndindex(*dist.alphabet_sizes):
        writer.writerow(list(idx) + [repr(float(dist.table[idx]))])
    return buf.getvalue()


def distribution_from_csv(text: str, alphabet_sizes=None) -> JointDistribution:
    """Parse ``x_1..x_m,p`` rows; missing atoms have mass 0.

    Alphabet sizes default to one more than the largest symbol seen per column.
    """
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][-1].strip() != "p":
        raise FormatError("CSV header must end with a 'p' column")
    m = len(rows[0]) - 1
    points, masses = [], []
    for row in rows[1:]:
        if not row:
            continue
        if len(row) != m + 1:
            raise FormatError(f"row {row} has {len(row)} fields, expected {m + 1}")
        points.append(tuple(int(v) for v in row[:m]))
        masses.append(float(row[m]))
    if not points:
        raise FormatError("CSV has no atoms")
    sizes = tuple(alphabet_sizes) if alphabet_sizes else tuple(max(p[i] for p in points) + 1 for i in range(m))
    table = np.zeros(sizes)
    for p, w in zip(points, masses):
        table[p] += w
    return JointDistribution(sizes, table.reshape(-1))


def load_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc


def load_measurable(path: str | Path) -> JointDistribution | PureState | DensityOperator:
    """A distribution (JSON or CSV) or a quantum state (JSON)."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        try:
            return distribution_from_csv(path.read_text())
        except OSError as exc:
            raise FormatError(str(exc)) from exc
    data = load_json(path)
    if not isinstance(data, dict):
        raise FormatError("expected a JSON object")
    if "probs" in data:
        try:
            return JointDistribution.from_dict(data)
        except KeyError as exc:
            raise FormatError(f"missing field {exc}") from exc
    if "re" in data:
        return quantum_from_dict(data)
    raise FormatError("JSON is neither a distribution nor a state")


PRESETS = {
    "ghz": lambda m: qs.ghz_state(m),
    "parity": lambda m: qs.parity_state(m),
    "P1": lambda m: it.ghz_distribution(m),
    "P3": lambda m: it.parity_distribution(m),
}


def preset(name: str):
    """``ghz:M``, ``parity:M``, ``P1:M``, ``P3:M`` or ``P2`` / ``psi2``."""
    if name == "P2":
        return it.parity_distribution(3)
    if name == "psi2":
        return qs.hadamard_ghz_state()
    kind, _, arg = name.partition(":")
    if kind not in PRESETS or not arg.isdigit():
        raise FormatError(f"unknown preset {name!r}")
    return PRESETS[kind](int(arg))


def _round(x: float) -> float | None:
    if math.isnan(x) or math.isinf(x):
        return None
    return float(f"{x:.{SIG_DIGITS}g}")


def normalize(obj: Any) -> Any:
    """Round floats to 12 significant digits and convert numpy scalars for JSON."""
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return normalize(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(float(obj))
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(normalize(obj), indent=2, sort_keys=False)


def fmt_float(x: float) -> str:
    return "nan" if math.isnan(x) else f"{x:.{SIG_DIGITS}g}"

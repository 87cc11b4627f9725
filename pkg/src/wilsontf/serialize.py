"""JSON and CSV interchange for signals, windows, coefficient tables,
phase planes, norm reports, and block partitions.

JSON is the canonical format (nested metadata round-trips losslessly);
CSV covers flat tables only.  Output is deterministic: keys are sorted
and floats use the shortest round-trip representation.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .blocks import BlockPartition
from .grid import FunctionSpec, GridSpec, Signal
from .norms import NormReport
from .stft import PhasePlaneArray
from .wilson import CoefficientTable, WilsonIndex
from .zakwin import DecayConstants, TightWindow

__all__ = [
    "signal_to_json",
    "signal_from_json",
    "signal_to_csv",
    "signal_from_csv",
    "window_to_json",
    "window_from_json",
    "table_to_json",
    "table_from_json",
    "table_to_csv",
    "plane_to_csv",
    "norm_report_to_json",
    "partition_to_json",
    "dumps",
]


def _finite(x: float):
    # JSON has no inf/nan; divergent values serialize as strings
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return x


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1)


def signal_to_json(f: Signal) -> dict:
    return {
        "grid": {"T": f.grid.half_width, "R": f.grid.rate},
        "dim": f.dim,
        "values": [[float(v.real), float(v.imag)] for v in f.values],
    }


def signal_from_json(obj: dict) -> Signal:
    try:
        grid = GridSpec(
            half_width=float(obj["grid"]["T"]), rate=int(obj["grid"]["R"])
        )
        vals = np.array(
            [complex(re, im) for re, im in obj["values"]], dtype=complex
        )
        return Signal(grid=grid, dim=int(obj["dim"]), values=vals)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed signal object: {exc}") from exc


def signal_to_csv(f: Signal) -> str:
    if f.dim != 1:
        raise ValueError("CSV signals are dim=1 only")
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["x", "re", "im"])
    for x, v in zip(f.grid.points(), f.values):
        writer.writerow([repr(float(x)), repr(float(v.real)), repr(float(v.imag))])
    return buf.getvalue()


def signal_from_csv(text: str, grid: GridSpec) -> Signal:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][:3] != ["x", "re", "im"]:
        raise ValueError("CSV signal needs an x,re,im header")
    vals = np.array(
        [complex(float(r[1]), float(r[2])) for r in rows[1:]], dtype=complex
    )
    return Signal(grid=grid, dim=1, values=vals)


def window_to_json(w: TightWindow) -> dict:
    obj = signal_to_json(w.psi)
    obj["tightness_residual"] = w.tightness_residual
    obj["decay"] = {"a": w.decay.a, "b": w.decay.b, "C": w.decay.C}
    obj["source"] = {"family": w.source.family,
                     "params": [p if not isinstance(p, FunctionSpec) else p.label()
                                for p in w.source.params]}
    return obj


def window_from_json(obj: dict) -> TightWindow:
    psi = signal_from_json(obj)
    try:
        decay = DecayConstants(
            a=float(obj["decay"]["a"]),
            b=float(obj["decay"]["b"]),
            C=float(obj["decay"]["C"]),
        )
        src = obj["source"]
        source = FunctionSpec(src["family"], tuple(src["params"]))
        return TightWindow(
            psi=psi,
            source=source,
            tightness_residual=float(obj["tightness_residual"]),
            decay=decay,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed window object: {exc}") from exc


def table_to_json(c: CoefficientTable) -> dict:
    return {
        "system": c.system,
        "entries": [
            {
                "l": list(idx.l),
                "n": list(idx.n),
                "re": float(v.real),
                "im": float(v.imag),
            }
            for idx, v in c.sorted_items()
        ],
    }


def table_from_json(obj: dict) -> CoefficientTable:
    try:
        entries = {
            WilsonIndex.of(e["l"], e["n"]): complex(e["re"], e["im"])
            for e in obj["entries"]
        }
        return CoefficientTable(entries=entries, system=dict(obj.get("system", {})))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed coefficient table: {exc}") from exc


def table_to_csv(c: CoefficientTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["l", "n", "re", "im"])
    for idx, v in c.sorted_items():
        if len(idx.l) != 1:
            raise ValueError("CSV tables are dim=1 only")
        writer.writerow(
            [idx.l[0], idx.n[0], repr(float(v.real)), repr(float(v.imag))]
        )
    return buf.getvalue()


def plane_to_csv(v: PhasePlaneArray) -> str:
    if v.dim != 1:
        raise ValueError("CSV planes are dim=1 only")
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["x", "xi", "re", "im", "abs"])
    xs = v.time_grid.points()
    xis = v.freq_grid.points()
    for j, x in enumerate(xs):
        row_vals = v.values[j]
        for k, xi in enumerate(xis):
            val = row_vals[k]
            writer.writerow(
                [
                    repr(float(x)),
                    repr(float(xi)),
                    repr(float(val.real)),
                    repr(float(val.imag)),
                    repr(float(abs(val))),
                ]
            )
    return buf.getvalue()


def norm_report_to_json(r: NormReport) -> dict:
    params = {
        k: _finite(v) if isinstance(v, float) else v
        for k, v in r.params.items()
    }
    return {
        "kind": r.kind,
        "value": _finite(r.value),
        "squared": r.squared,
        "tail": _finite(r.tail),
        "verdict": r.verdict,
        "params": params,
    }


def partition_to_json(p: BlockPartition) -> dict:
    return {
        "epsilon": p.epsilon,
        "cuts": list(p.cuts),
        "block_sums": list(p.block_sums),
    }

"""CSV and JSON formats: mode stacks, polar fields, trajectories, sweeps and reports.

Floats are written with 17 significant digits, which round-trips every
double exactly.  Every writer checks its rows against the declared column
set before touching the file.
"""

import csv
import io as _io
import json
import math
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError

MODE_COLUMNS = ("m", "r", "re", "im")
POLAR_COLUMNS = ("t", "r", "theta", "re", "im")
TRAJECTORY_COLUMNS = ("t", "m", "r", "re", "im")
SWEEP_COLUMNS = ("family", "param", "p", "q", "s", "T", "ratio", "ratio_2T", "grid_delta")
BESSEL_COLUMNS = ("nu", "r", "j", "j_prime", "j1_re", "j1_im", "j2_re", "j2_im", "e")
SMOOTHING_COLUMNS = ("member", "param", "beta", "branch", "T", "ratio", "ratio_refined", "grid_delta")
DICHOTOMY_COLUMNS = ("member", "param", "branch", "R", "A")
CONSERVATION_COLUMNS = ("flow", "t", "quantity", "drift")
REPORT_KEYS = ("estimate", "config", "samples", "sup_ratio", "deltas", "verdict")
VERDICTS = ("bounded", "inconclusive", "violated")


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    v = float(x)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def _render(columns, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        if len(row) != len(columns):
            raise InvalidArgumentError(f"row has {len(row)} fields, expected {len(columns)} ({','.join(columns)})")
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, columns, rows):
    """Validate all rows, then write the file in one go."""
    text = _render(tuple(columns), list(rows))
    Path(path).write_text(text)
    return Path(path)


def read_csv(path, columns=None):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if columns is not None and header != tuple(columns):
            raise InvalidArgumentError(f"{path}: header {header} does not match {tuple(columns)}")
        rows = [row for row in reader]
    return header, rows


# mode stacks


def mode_stack_rows(stack):
    for m, v in stack.modes.items():
        for r, z in zip(stack.grid.nodes, v):
            yield (m, r, z.real, z.imag)


def write_mode_stack(path, stack):
    return write_csv(path, MODE_COLUMNS, mode_stack_rows(stack))


def read_mode_stack(path):
    """{m: (r, values)} from an ``m,r,re,im`` file."""
    _, rows = read_csv(path, MODE_COLUMNS)
    out = {}
    for m, r, re, im in rows:
        out.setdefault(int(m), ([], []))
        out[int(m)][0].append(float(r))
        out[int(m)][1].append(complex(float(re), float(im)))
    return {m: (np.array(r), np.array(v)) for m, (r, v) in out.items()}


def write_polar_field(path, r, theta, samples, t=None):
    """Recomposed field samples[i, k] at (r_i, theta_k); t optional (one time or per row)."""
    samples = np.asarray(samples)
    rows = []
    for i, rv in enumerate(r):
        for k, th in enumerate(theta):
            z = samples[i, k]
            rows.append(((t,) if t is not None else ()) + (rv, th, z.real, z.imag))
    cols = POLAR_COLUMNS if t is not None else POLAR_COLUMNS[1:]
    return write_csv(path, cols, rows)


def write_trajectory(path, times, stacks):
    """Mode-stack time series: one stack per time."""
    rows = []
    for t, st in zip(times, stacks):
        for m, v in st.modes.items():
            for r, z in zip(st.grid.nodes, v):
                rows.append((t, m, r, z.real, z.imag))
    return write_csv(path, TRAJECTORY_COLUMNS, rows)


def sweep_rows(report):
    for s in report.get("samples", []):
        yield (
            s.get("member", report.get("estimate", "")), s.get("param", 0.0), s["p"], s["q"], s["s"],
            s["T"], s["ratio"], s["ratio_2T"], s.get("grid_delta", float("nan")),
        )


def write_sweep(path, report: dict):
    return write_csv(path, SWEEP_COLUMNS, sweep_rows(report))


def _flatten(report, columns, defaults=None):
    defaults = defaults or {}
    for s in report.get("samples", []):
        yield tuple(s.get(c, defaults.get(c, float("nan"))) for c in columns)


def write_smoothing(path, report: dict):
    return write_csv(path, SMOOTHING_COLUMNS, _flatten(report, SMOOTHING_COLUMNS))


def write_dichotomy(path, report: dict):
    return write_csv(path, DICHOTOMY_COLUMNS, _flatten(report, DICHOTOMY_COLUMNS))


def write_conservation(path, report: dict):
    return write_csv(path, CONSERVATION_COLUMNS, _flatten(report, CONSERVATION_COLUMNS))


# reports


def _clean(obj):
    # JSON has no inf/nan; encode them as strings so the output stays standard
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else fmt(v)
    if isinstance(obj, complex):
        return {"re": _clean(obj.real), "im": _clean(obj.imag)}
    return obj


def _restore(obj):
    if isinstance(obj, dict):
        return {k: _restore(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_restore(v) for v in obj]
    if obj in ("inf", "-inf", "nan"):
        return float(obj)
    return obj


def validate_report(d: dict):
    missing = [k for k in REPORT_KEYS if k not in d]
    if missing:
        raise InvalidArgumentError(f"report lacks keys {missing}")
    if d["verdict"] not in VERDICTS:
        raise InvalidArgumentError(f"unknown verdict {d['verdict']!r}")
    if not isinstance(d["samples"], list):
        raise InvalidArgumentError("report samples must be a list")


def report_json(report) -> str:
    d = report.to_dict() if hasattr(report, "to_dict") else dict(report)
    validate_report(d)
    return json.dumps(_clean(d), sort_keys=True, indent=2) + "\n"


def write_report(path, report):
    text = report_json(report)
    Path(path).write_text(text)
    return Path(path)


def read_report(path) -> dict:
    d = _restore(json.loads(Path(path).read_text()))
    validate_report(d)
    return d

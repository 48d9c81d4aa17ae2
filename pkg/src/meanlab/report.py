"""Structured experiment results and their JSON / CSV encodings.

A :class:`Report` is a flat list of :class:`Check` records (claimed bound
versus observed value) plus free-form scalar values and named traces.
Complex numbers travel as ``[re, im]`` pairs, vectors as lists of pairs and
matrices as row-major nested lists of pairs.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import InputError


@dataclass
class Check:
    """One asserted relation ``lhs <rel> rhs``.

    ``rel`` is ``"<="``, ``"=="`` or ``">="``; ``tol`` is an absolute slack
    added in the direction that forgives rounding.
    """

    name: str
    lhs: float
    rhs: float
    rel: str = "<="
    tol: float = 0.0
    passed: bool = field(init=False)

    def __post_init__(self):
        lhs, rhs = float(self.lhs), float(self.rhs)
        if self.rel == "<=":
            ok = lhs <= rhs + self.tol
        elif self.rel == ">=":
            ok = lhs + self.tol >= rhs
        elif self.rel == "==":
            ok = abs(lhs - rhs) <= self.tol
        else:
            raise InputError(f"unknown relation {self.rel!r}")
        self.lhs, self.rhs = lhs, rhs
        self.passed = bool(ok) and not (math.isnan(lhs) or math.isnan(rhs))

    @property
    def slack(self) -> float:
        if self.rel == ">=":
            return self.lhs - self.rhs
        if self.rel == "==":
            return -abs(self.lhs - self.rhs)
        return self.rhs - self.lhs

    def to_dict(self):
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rel": self.rel,
            "rhs": self.rhs,
            "tol": self.tol,
            "slack": self.slack,
            "passed": self.passed,
        }


@dataclass
class Report:
    name: str
    checks: list[Check] = field(default_factory=list)
    values: dict[str, Any] = field(default_factory=dict)
    traces: dict[str, Any] = field(default_factory=dict)

    def check(self, name, lhs, rhs, rel="<=", tol=0.0) -> Check:
        c = Check(name, lhs, rhs, rel, tol)
        self.checks.append(c)
        return c

    def extend(self, other: "Report", prefix: str = ""):
        for c in other.checks:
            c = Check(prefix + c.name, c.lhs, c.rhs, c.rel, c.tol)
            self.checks.append(c)
        for k, v in other.values.items():
            self.values[prefix + k] = v
        for k, v in other.traces.items():
            self.traces[prefix + k] = v

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def worst(self, prefix: str = "") -> Check | None:
        """The check with the least slack among those whose name starts with prefix."""
        cs = [c for c in self.checks if c.name.startswith(prefix)]
        return min(cs, key=lambda c: c.slack) if cs else None

    def to_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "n_checks": len(self.checks),
            "n_failed": len(self.failures),
            "checks": [c.to_dict() for c in self.checks],
            "values": to_jsonable(self.values),
            "traces": to_jsonable(self.traces),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)

    def trace_csv(self, key: str) -> str:
        return traces_to_csv(self.traces[key])


def to_jsonable(obj):
    """Recursively convert numpy / complex values into JSON-ready objects."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return repr(x)
        return x
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    return obj


def complex_to_json(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(v) -> complex:
    if isinstance(v, dict):
        return complex(float(v.get("re", 0.0)), float(v.get("im", 0.0)))
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise InputError(f"complex value must be [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float)):
        return complex(v)
    raise InputError(f"cannot read complex value from {v!r}")


def vector_to_json(v) -> list[list[float]]:
    return [complex_to_json(z) for z in np.asarray(v).ravel()]


def vector_from_json(data) -> np.ndarray:
    return np.array([complex_from_json(z) for z in data], dtype=complex)


def matrix_to_json(m) -> list:
    return [vector_to_json(row) for row in np.asarray(m)]


def matrix_from_json(data) -> np.ndarray:
    rows = [vector_from_json(r) for r in data]
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise InputError("matrix rows must be nonempty and of equal length")
    return np.array(rows, dtype=complex)


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def traces_to_csv(columns: dict[str, Any]) -> str:
    """Columns of equal length to CSV; complex columns split into _re/_im."""
    names, cols = [], []
    for k, v in columns.items():
        arr = np.asarray(v)
        if np.iscomplexobj(arr):
            names += [f"{k}_re", f"{k}_im"]
            cols += [arr.real, arr.imag]
        else:
            names.append(k)
            cols.append(arr)
    lengths = {len(c) for c in cols}
    if len(lengths) > 1:
        raise InputError(f"trace columns have unequal lengths {sorted(lengths)}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for row in zip(*cols):
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def atomic_write(path: str | os.PathLike, text: str):
    """Write text to path via a temporary file in the same directory and rename."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise

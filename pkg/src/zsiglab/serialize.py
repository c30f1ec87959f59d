"""Wire formats: decimal-string integers, 12-digit reals, orbit JSON lines."""

from __future__ import annotations

import fcntl
import json
import math
import sys
from contextlib import contextmanager
from decimal import ROUND_HALF_EVEN, Context
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .geometry import ProjectivePoint

# orbit coordinates and sequence terms routinely exceed CPython's default
# 4300-digit int<->str guard
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

_REAL_CONTEXT = Context(prec=12, rounding=ROUND_HALF_EVEN)


def real12(x: float) -> str:
    """Render a real with 12 significant digits, round-half-even."""
    if isinstance(x, Fraction):
        x = float(x)
    if math.isnan(x) or math.isinf(x):
        return str(x)
    d = _REAL_CONTEXT.create_decimal(x)
    if d == 0:
        return "0"
    d = d.normalize(_REAL_CONTEXT)
    return format(d, "f") if -6 <= d.adjusted() < 16 else format(d, "e")


def intstr(n: int) -> str:
    return str(int(n))


def fracstr(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def dumps(obj) -> str:
    """Canonical JSON text used for every report (stable key order)."""
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


@contextmanager
def locked(path: str | Path, mode: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, mode) as fh:
        fcntl.flock(fh.fileno(), fcntl.LOCK_EX)
        try:
            yield fh
        finally:
            fcntl.flock(fh.fileno(), fcntl.LOCK_UN)


def write_orbit_jsonl(path: str | Path, points: Iterable[ProjectivePoint]) -> None:
    with locked(path, "w") as fh:
        for n, pt in enumerate(points):
            fh.write(json.dumps({"n": n, "coords": [str(x) for x in pt.coords]}) + "\n")


def extend_orbit_jsonl(path: str | Path, points: list[ProjectivePoint]) -> int:
    """Append whatever part of ``points`` the file lacks; returns records added.

    The count of existing records is taken under the lock, so concurrent
    writers never duplicate an index.
    """
    with locked(path, "a+") as fh:
        fh.seek(0)
        have = sum(1 for line in fh if line.strip())
        fh.seek(0, 2)
        for n in range(have, len(points)):
            fh.write(json.dumps({"n": n, "coords": [str(x) for x in points[n].coords]}) + "\n")
        return max(0, len(points) - have)


def read_orbit_jsonl(path: str | Path) -> list[ProjectivePoint]:
    """Read an orbit file; records must carry consecutive n from 0."""
    points = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            rec = json.loads(line)
            if rec.get("n") != len(points):
                raise ValueError(f"{path}:{lineno}: expected n={len(points)}, got {rec.get('n')}")
            points.append(ProjectivePoint(tuple(int(c) for c in rec["coords"])))
    return points

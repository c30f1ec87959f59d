"""Primitive parts, primitive-divisor verdicts and Zsigmondy sets.

Membership is decided by gcd stripping alone: the primitive part of a_n is
|a_n| with every prime shared with an earlier nonzero term (or an excluded
prime) divided out, and a_n has a primitive divisor iff that part exceeds 1.
Factoring is only used to list the primitive primes for diagnostics.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable

from .arith import FactorBudget, decimal_digits, factor, is_probable_prime
from .errors import IndexOutOfRange, NotPrime, ResourceLimit, ZeroInput, ZeroTerm
from .geometry import HomogeneousForm, ProjectivePoint, evaluate_form
from .sequences import GcdGroup, SequenceSpec, TermStream
from .serialize import real12

# c_n above this size is not handed to the factorizer during a run
DIAGNOSTIC_FACTOR_DIGITS = 60
DEFAULT_REPORT_BUDGET = FactorBudget(trial_bound=10**5, rho_iterations=20_000, max_digits=DIAGNOSTIC_FACTOR_DIGITS)


def _strip(c: int, g: int) -> int:
    t = math.gcd(c, g)
    while t > 1:
        c //= t
        t = math.gcd(c, t)
    return c


def primitive_part(a: int, history: Iterable[int], excluded: Iterable[int] = ()) -> int:
    """|a| with every prime dividing a history term or an excluded prime removed."""
    if a == 0:
        raise ZeroInput("primitive part of 0 is undefined")
    c = abs(a)
    for h in history:
        if h and c > 1:
            c = _strip(c, abs(h))
    for p in excluded:
        if c > 1:
            c = _strip(c, p)
    return c


def has_primitive_divisor(a: int, history: Iterable[int], excluded: Iterable[int] = ()) -> bool:
    if a == 0:
        # 0 is divisible by every prime, and only finitely many are used up
        return True
    if abs(a) == 1:
        return False
    return primitive_part(a, (h for h in history if h), excluded) > 1


class SupportBasis:
    """Pairwise-coprime integers whose prime support is that of everything added.

    Adding a value first strips it against the basis, so the leftover is
    coprime to every generator and can simply be appended.
    """

    def __init__(self, values: Iterable[int] = ()):
        self.generators: list[int] = []
        for v in values:
            self.add(v)

    def strip(self, a: int) -> int:
        c = abs(a)
        for g in self.generators:
            if c == 1:
                break
            c = _strip(c, g)
        return c

    def add(self, value: int) -> int:
        """Merge ``value``; returns the part of it that was new."""
        if value == 0:
            return 1
        new = self.strip(value)
        if new > 1:
            self.generators.append(new)
        return new


@dataclass
class TermRecord:
    n: int
    value: int
    primitive_part: int
    has_primitive: bool
    b_n: float
    primitive_primes: list[int] | None = None

    @property
    def digits(self) -> int:
        return decimal_digits(self.value)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "value": str(self.value),
            "digits": self.digits,
            "primitive_part": str(self.primitive_part),
            "has_primitive": self.has_primitive,
            "b_n": real12(self.b_n),
            "primitive_primes": None if self.primitive_primes is None else [str(p) for p in self.primitive_primes],
        }


@dataclass
class ZsigmondyReport:
    spec: SequenceSpec
    horizon: int
    excluded_primes: tuple[int, ...]
    records: list[TermRecord] = field(default_factory=list)
    truncated: bool = False
    truncated_at: int | None = None
    statistics: dict = field(default_factory=dict)

    @property
    def zsigmondy_set(self) -> list[int]:
        return [r.n for r in self.records if not r.has_primitive]

    def record(self, n: int) -> TermRecord:
        first = self.records[0].n if self.records else 0
        i = n - first
        if not 0 <= i < len(self.records):
            raise IndexOutOfRange(f"index {n} not in report")
        return self.records[i]

    def to_json(self) -> dict:
        out = {
            "spec": self.spec.to_json(),
            "horizon": self.horizon,
            "excluded_primes": [str(p) for p in self.excluded_primes],
            "zsigmondy": self.zsigmondy_set,
            "truncated": self.truncated,
        }
        if self.truncated:
            out["truncated_at"] = self.truncated_at
        if self.statistics:
            out["statistics"] = self.statistics
        out["records"] = [r.to_json() for r in self.records]
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "digits", "c_n_digits", "has_primitive", "b_n"])
        for r in self.records:
            w.writerow([r.n, r.digits, decimal_digits(r.primitive_part), str(r.has_primitive).lower(), real12(r.b_n)])
        return buf.getvalue()


def _check_primes(excluded: Iterable[int]) -> tuple[int, ...]:
    out = tuple(sorted({int(p) for p in excluded}))
    for p in out:
        if not is_probable_prime(p):
            raise NotPrime(f"excluded entry {p} is not prime")
    return out


def zsigmondy_set(
    spec: SequenceSpec,
    n_max: int,
    excluded: Iterable[int] = (),
    *,
    budget: FactorBudget | None = DEFAULT_REPORT_BUDGET,
    stream: TermStream | None = None,
) -> ZsigmondyReport:
    """Run the sequence to ``n_max`` and classify every index.

    A :class:`ResourceLimit` from term generation ends the run early; the
    report is then flagged ``truncated`` and holds the indices done so far.
    ``budget=None`` skips listing primitive primes.
    """
    if n_max < spec.first_index:
        raise IndexOutOfRange(f"horizon {n_max} is below the first index {spec.first_index}")
    excl = _check_primes(excluded)
    stream = stream or TermStream(spec)
    report = ZsigmondyReport(spec=spec, horizon=n_max, excluded_primes=excl)
    basis = SupportBasis(excl)
    for n in range(spec.first_index, n_max + 1):
        try:
            a = stream.term(n)
        except ResourceLimit:
            report.truncated = True
            report.truncated_at = n
            break
        if a == 0:
            report.records.append(TermRecord(n, 0, 0, True, 0.0, None))
            continue
        c = basis.add(a)
        primes = None
        if c == 1:
            primes = []
        elif budget is not None and decimal_digits(c) <= budget.max_digits:
            fz = factor(c, budget)
            if fz.complete:
                primes = fz.primes
        report.records.append(TermRecord(n, a, c, c > 1, math.log(c), primes))
    if isinstance(spec, GcdGroup):
        report.statistics.update(_gcd_growth_statistic(report))
    return report


def _gcd_growth_statistic(report: ZsigmondyReport) -> dict:
    lo = report.horizon // 2
    vals = [math.log(r.value) / r.n for r in report.records if r.n > lo and r.value > 0]
    return {
        "max_log_an_over_n": real12(max(vals)) if vals else None,
        "max_log_an_over_n_range": [lo + 1, report.horizon],
        "count_an_equal_1": sum(1 for r in report.records if r.value == 1),
    }


def b_statistic(report: ZsigmondyReport, n: int) -> float:
    """Sum of ord_p(a_n) log p over the primitive primes, i.e. log c_n."""
    rec = report.record(n)
    if rec.value == 0:
        raise ZeroTerm(f"a_{n} = 0")
    return rec.b_n


def reduction_intersects(point: ProjectivePoint, form: HomogeneousForm, p: int) -> bool:
    """Does the point reduce mod p onto the hypersurface ``form = 0``?"""
    if not is_probable_prime(p):
        raise NotPrime(f"{p} is not prime")
    return evaluate_form(form, point) % p == 0

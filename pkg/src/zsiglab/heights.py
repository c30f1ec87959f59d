"""Weil, local and canonical heights on P^N(Q), plus the truncated counting function.

Natural logarithms throughout.  Logs are applied to exact integers only at
the reporting boundary; ``math.log`` accepts arbitrarily large ints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .arith import FactorBudget, factor, is_probable_prime, ord_p
from .errors import NotPrime, OnDivisor, ResourceLimit, ZeroInput
from .geometry import DEFAULT_DIGIT_CEILING, HomogeneousForm, Morphism, OrbitCache, ProjectivePoint, evaluate_form
from .serialize import real12


def weil_height(point: ProjectivePoint) -> float:
    return math.log(max(abs(x) for x in point.coords))


def local_height(point: ProjectivePoint, form: HomogeneousForm, p: int) -> float:
    """ord_p(F(P)) * log p."""
    value = evaluate_form(form, point)
    if value == 0:
        raise OnDivisor(f"{point} lies on {form} = 0")
    return ord_p(value, p) * math.log(p)


@dataclass
class HeightEstimate:
    """Partial values ``d^-n h(f^n P)``.

    ``max_coords[i]`` is the exact integer whose log gives the height of the
    i-th orbit point, so identities between estimates can be checked exactly.
    """

    degree: int
    values: list[tuple[int, float]] = field(default_factory=list)
    max_coords: list[int] = field(default_factory=list)
    final_estimate: float = 0.0
    cauchy_bound: float = 0.0
    truncated: bool = False

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "values": [[n, real12(v)] for n, v in self.values],
            "final_estimate": real12(self.final_estimate),
            "cauchy_bound": real12(self.cauchy_bound),
            "truncated": self.truncated,
        }


def canonical_height_estimate(
    f: Morphism,
    point: ProjectivePoint,
    n_max: int,
    *,
    cache: OrbitCache | None = None,
    digit_ceiling: int = DEFAULT_DIGIT_CEILING,
) -> HeightEstimate:
    """Approximate the canonical height by ``d^-n h(f^n P)`` for n <= n_max.

    The Cauchy bound is ``max_n d^n |v_{n+1} - v_n|`` over the computed
    values: an empirical stand-in for the O(1) in the height comparison, not
    a proven constant.  Raises ResourceLimit if the orbit outgrows
    ``digit_ceiling`` (use :func:`canonical_height_partial` to keep the prefix).
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    cache = cache or OrbitCache(f, point, digit_ceiling=digit_ceiling)
    est = HeightEstimate(degree=f.degree)
    for n in range(n_max + 1):
        _extend(est, cache, n)
    _finish(est)
    return est


def canonical_height_partial(f: Morphism, point: ProjectivePoint, n_max: int, *, cache: OrbitCache | None = None,
                             digit_ceiling: int = DEFAULT_DIGIT_CEILING) -> HeightEstimate:
    """As :func:`canonical_height_estimate` but stops quietly at the digit ceiling."""
    cache = cache or OrbitCache(f, point, digit_ceiling=digit_ceiling)
    est = HeightEstimate(degree=f.degree)
    for n in range(n_max + 1):
        try:
            _extend(est, cache, n)
        except ResourceLimit:
            est.truncated = True
            break
    _finish(est)
    return est


def _extend(est: HeightEstimate, cache: OrbitCache, n: int) -> None:
    pt = cache.point(n)
    m = max(abs(x) for x in pt.coords)
    est.max_coords.append(m)
    est.values.append((n, math.log(m) / est.degree**n))


def _finish(est: HeightEstimate) -> None:
    if est.values:
        est.final_estimate = est.values[-1][1]
    d = est.degree
    est.cauchy_bound = max(
        (d**n * abs(b - a) for (n, a), (_, b) in zip(est.values, est.values[1:])),
        default=0.0,
    )


class CountingResult(NamedTuple):
    sum: float
    complete: bool
    upper: float


def truncated_counting(value: int, s_primes: Iterable[int] = (), budget: FactorBudget | int | None = None) -> CountingResult:
    """Sum of log p over the distinct primes p | value outside ``s_primes``.

    When the factorizer leaves a cofactor, ``sum`` is a lower bound and
    ``upper`` adds log(cofactor).
    """
    if value == 0:
        raise ZeroInput("counting function undefined at 0")
    s = set(s_primes)
    for p in s:
        if not is_probable_prime(p):
            raise NotPrime(f"{p} is not prime")
    fz = factor(value, budget)
    total = sum(math.log(p) for p in fz.primes if p not in s)
    upper = total + (math.log(fz.cofactor) if fz.cofactor > 1 else 0.0)
    return CountingResult(total, fz.complete, upper)

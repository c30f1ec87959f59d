"""Integer sequence generators behind one interface.

Six families are supported: ``u^n - v^n``, Lucas U-sequences, elliptic
divisibility sequences (Ward), ``gcd(u^n - 1, v^n - 1)``, values of a form
along a morphism orbit, and numerators of ``f^n(alpha) - beta`` on P^1.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import IndexOutOfRange, NonIntegral
from .geometry import (
    DEFAULT_DIGIT_CEILING,
    HomogeneousForm,
    Morphism,
    OrbitCache,
    ProjectivePoint,
    evaluate_form,
    normalize,
)


class SequenceSpec:
    """Common base; subclasses are small frozen dataclasses."""

    kind: str = ""
    first_index: int = 1

    def validate(self) -> None:
        pass

    def params_json(self) -> dict:
        raise NotImplementedError

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": self.params_json()}

    @staticmethod
    def from_json(obj: dict) -> "SequenceSpec":
        kind = str(obj["kind"]).lower()
        try:
            cls = SPEC_KINDS[kind]
        except KeyError:
            raise ValueError(f"unknown sequence kind {obj['kind']!r}") from None
        return cls.from_params(obj.get("params", {}))


def _req(params: dict, key: str):
    if key not in params:
        raise ValueError(f"missing parameter {key!r}")
    return params[key]


def _fraction(x) -> Fraction:
    return Fraction(str(x))


@dataclass(frozen=True)
class PowerDiff(SequenceSpec):
    u: int
    v: int
    kind = "powerdiff"

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not self.u > self.v > 0:
            raise ValueError("powerdiff needs u > v > 0")
        if math.gcd(self.u, self.v) != 1:
            raise ValueError("powerdiff needs gcd(u, v) = 1")

    def params_json(self):
        return {"u": str(self.u), "v": str(self.v)}

    @classmethod
    def from_params(cls, p):
        return cls(int(_req(p, "u")), int(_req(p, "v")))


@dataclass(frozen=True)
class Lucas(SequenceSpec):
    """Lucas U-sequence ``U_0 = 0, U_1 = 1, U_{n+1} = p U_n - q U_{n-1}``."""

    p: int
    q: int
    kind = "lucas"

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.p * self.p - 4 * self.q == 0:
            raise ValueError("lucas discriminant p^2 - 4q must be nonzero")

    def is_nondegenerate(self) -> bool:
        """Coprime, q != 0 and alpha/beta not a root of unity."""
        if self.q == 0 or self.p == 0 or math.gcd(self.p, self.q) != 1:
            return False
        # alpha/beta is a root of unity exactly when p^2/q is 0, 1, 2, 3 or 4
        return not (self.p * self.p in (self.q, 2 * self.q, 3 * self.q, 4 * self.q))

    def params_json(self):
        return {"p": str(self.p), "q": str(self.q)}

    @classmethod
    def from_params(cls, p):
        return cls(int(_req(p, "p")), int(_req(p, "q")))


@dataclass(frozen=True)
class EDS(SequenceSpec):
    """Elliptic divisibility sequence fixed by ``a_1..a_4`` (``a_0 = 0``)."""

    init: tuple[int, int, int, int]
    kind = "eds"

    def __post_init__(self):
        object.__setattr__(self, "init", tuple(int(x) for x in self.init))
        self.validate()

    def validate(self):
        if len(self.init) != 4:
            raise ValueError("eds needs four initial terms a1..a4")
        a1, a2, a3, a4 = self.init
        if a1 != 1:
            raise ValueError("eds needs a1 = 1")
        if a2 * a3 == 0:
            raise ValueError("eds needs a2*a3 != 0")
        if a4 % a2:
            raise ValueError("eds needs a2 | a4")

    def params_json(self):
        return {"init": [str(x) for x in self.init]}

    @classmethod
    def from_params(cls, p):
        init = _req(p, "init")
        if isinstance(init, str):
            init = init.split(",")
        return cls(tuple(int(x) for x in init))


@dataclass(frozen=True)
class GcdGroup(SequenceSpec):
    u: int
    v: int
    kind = "gcdgroup"

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.u < 2 or self.v < 2:
            raise ValueError("gcdgroup needs u, v >= 2")

    def params_json(self):
        return {"u": str(self.u), "v": str(self.v)}

    @classmethod
    def from_params(cls, p):
        return cls(int(_req(p, "u")), int(_req(p, "v")))


@dataclass(frozen=True)
class DynValue(SequenceSpec):
    """``a_n = F(f^n(P))`` in normalized coordinates, n >= 0."""

    morphism: Morphism
    form: HomogeneousForm
    start: ProjectivePoint
    kind = "dynvalue"
    first_index = 0

    def __post_init__(self):
        self.validate()

    def validate(self):
        n = self.morphism.dim + 1
        if self.form.num_vars != n or len(self.start) != n:
            raise ValueError("morphism, form and start point must share P^N")

    def params_json(self):
        return {
            "morphism": self.morphism.to_json(),
            "form": self.form.to_json(),
            "start": [str(x) for x in self.start.coords],
        }

    @classmethod
    def from_params(cls, p):
        morph = _morphism_param(_req(p, "morphism"))
        n = morph.dim + 1
        form = HomogeneousForm.from_json(_req(p, "form"), n)
        return cls(morph, form, _point_param(_req(p, "start")))


@dataclass(frozen=True)
class WanderingNumerator(SequenceSpec):
    """Numerator of ``f^n(alpha) - beta`` for a map of P^1, n >= 0."""

    morphism: Morphism
    alpha: Fraction
    beta: Fraction
    kind = "wandering"
    first_index = 0

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        object.__setattr__(self, "beta", Fraction(self.beta))
        self.validate()

    def validate(self):
        if self.morphism.dim != 1:
            raise ValueError("wandering-target sequences need a map of P^1")

    @property
    def start(self) -> ProjectivePoint:
        return normalize([self.alpha.numerator, self.alpha.denominator])

    def params_json(self):
        return {
            "morphism": self.morphism.to_json(),
            "alpha": str(self.alpha),
            "beta": str(self.beta),
        }

    @classmethod
    def from_params(cls, p):
        return cls(_morphism_param(_req(p, "morphism")), _fraction(_req(p, "alpha")), _fraction(_req(p, "beta")))


def _morphism_param(obj) -> Morphism:
    if isinstance(obj, str):
        obj = [s.strip() for s in obj.split(";")]
    if obj and all(isinstance(x, str) for x in obj):
        return Morphism.parse(obj)
    return Morphism.from_json(obj)


def _point_param(obj) -> ProjectivePoint:
    if isinstance(obj, str):
        obj = obj.split(",")
    return normalize(int(x) for x in obj)


SPEC_KINDS: dict[str, type] = {
    cls.kind: cls for cls in (PowerDiff, Lucas, EDS, GcdGroup, DynValue, WanderingNumerator)
}


class TermStream:
    """Memoized terms of one spec.

    Concurrent readers are safe; every index is computed once under a lock.
    Dynamical kinds share an :class:`OrbitCache`, which may be passed in to
    reuse an orbit loaded from disk.
    """

    def __init__(self, spec: SequenceSpec, *, orbit: OrbitCache | None = None, digit_ceiling: int = DEFAULT_DIGIT_CEILING):
        self.spec = spec
        self._lock = threading.Lock()
        self._terms: dict[int, int] = {}
        self.orbit = None
        if isinstance(spec, (DynValue, WanderingNumerator)):
            self.orbit = orbit or OrbitCache(spec.morphism, spec.start, digit_ceiling=digit_ceiling)
        if isinstance(spec, EDS):
            self._terms.update({0: 0, **{i + 1: a for i, a in enumerate(spec.init)}})
        elif isinstance(spec, Lucas):
            self._terms.update({0: 0, 1: 1})

    def __getitem__(self, n: int) -> int:
        return self.term(n)

    def terms(self, n_max: int) -> list[int]:
        return [self.term(n) for n in range(self.spec.first_index, n_max + 1)]

    def term(self, n: int) -> int:
        if n < self.spec.first_index:
            raise IndexOutOfRange(f"{self.spec.kind} sequences start at n={self.spec.first_index}")
        hit = self._terms.get(n)
        if hit is not None:
            return hit
        with self._lock:
            if n not in self._terms:
                self._compute(n)
            return self._terms[n]

    def _compute(self, n: int) -> None:
        s = self.spec
        if isinstance(s, PowerDiff):
            self._terms[n] = s.u**n - s.v**n
        elif isinstance(s, GcdGroup):
            self._terms[n] = math.gcd(s.u**n - 1, s.v**n - 1)
        elif isinstance(s, Lucas):
            k = max(self._terms)
            a, b = self._terms[k - 1], self._terms[k]
            for i in range(k + 1, n + 1):
                a, b = b, s.p * b - s.q * a
                self._terms[i] = b
        elif isinstance(s, EDS):
            self._eds_upto(n)
        elif isinstance(s, DynValue):
            self._terms[n] = evaluate_form(s.form, self.orbit.point(n))
        elif isinstance(s, WanderingNumerator):
            x, y = self.orbit.point(n).coords
            self._terms[n] = x * s.beta.denominator - y * s.beta.numerator
        else:  # pragma: no cover
            raise TypeError(f"unsupported spec {s!r}")

    def _eds_upto(self, n: int) -> None:
        a = self._terms
        a2 = a[2]
        for k in range(max(a) + 1, n + 1):
            m = k // 2
            if k % 2:
                a[k] = a[m + 2] * a[m] ** 3 - a[m + 1] ** 3 * a[m - 1]
            else:
                num = a[m] * (a[m + 2] * a[m - 1] ** 2 - a[m - 2] * a[m + 1] ** 2)
                q, r = divmod(num, a2)
                if r:
                    raise NonIntegral(f"eds term a_{k} is not an integer (a_2 = {a2} does not divide {num})")
                a[k] = q


def term(spec: SequenceSpec, n: int) -> int:
    return TermStream(spec).term(n)

"""Projective points over Q, integer homogeneous forms and morphisms of P^N.

Points are kept in normalized coordinates (coprime integers, first nonzero
entry positive), so a form evaluated at a point is a well-defined integer.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
import random
import threading
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .arith import decimal_digits
from .errors import AllZero, BaseLocus, DimensionMismatch, NotLinear, ResourceLimit

DEFAULT_DIGIT_CEILING = 10**6
DEFAULT_PULLBACK_DEGREE_BOUND = 5000
DEFAULT_BASE_LOCUS_SAMPLES = 32

_LETTERS = "XYZW"


@dataclass(frozen=True)
class ProjectivePoint:
    coords: tuple[int, ...]

    def __post_init__(self):
        c = tuple(int(x) for x in self.coords)
        object.__setattr__(self, "coords", c)
        if not any(c):
            raise AllZero("projective point with all coordinates zero")
        if math.gcd(*c) != 1 or next(x for x in c if x) < 0:
            raise ValueError(f"coordinates {c} are not normalized; use normalize()")

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def __str__(self):
        return "[" + ",".join(map(str, self.coords)) + "]"


def normalize(raw: Iterable[int]) -> ProjectivePoint:
    """Divide out the content and make the first nonzero coordinate positive."""
    v = [int(x) for x in raw]
    g = math.gcd(*v)
    if g == 0:
        raise AllZero("cannot normalize the zero vector")
    if next(x for x in v if x) < 0:
        g = -g
    return ProjectivePoint(tuple(x // g for x in v))


def _var_names(num_vars: int) -> list[str]:
    if num_vars <= len(_LETTERS):
        return list(_LETTERS[:num_vars])
    return [f"X{i}" for i in range(num_vars)]


class HomogeneousForm:
    """Sparse homogeneous polynomial with integer coefficients.

    ``primitive=True`` (the default) divides out the content, which is how
    divisors are stored.  Morphism components are built with
    ``primitive=False`` because rescaling a single component changes the map.
    """

    __slots__ = ("num_vars", "degree", "_terms", "_hash")

    def __init__(self, terms: Mapping[Sequence[int], int], num_vars: int | None = None, *, primitive: bool = True):
        clean: dict[tuple[int, ...], int] = {}
        for exps, c in terms.items():
            c = int(c)
            if c:
                exps = tuple(int(e) for e in exps)
                clean[exps] = clean.get(exps, 0) + c
        clean = {e: c for e, c in clean.items() if c}
        if not clean:
            raise ValueError("the zero polynomial is not a form")
        lengths = {len(e) for e in clean}
        if len(lengths) != 1:
            raise DimensionMismatch("exponent vectors of differing length")
        n = lengths.pop()
        if num_vars is not None and num_vars != n:
            raise DimensionMismatch(f"expected {num_vars} variables, got {n}")
        degrees = {sum(e) for e in clean}
        if len(degrees) != 1:
            raise ValueError("polynomial is not homogeneous")
        if any(x < 0 for e in clean for x in e):
            raise ValueError("negative exponent")
        deg = degrees.pop()
        if deg < 1:
            raise ValueError("forms must have degree >= 1")
        if primitive:
            g = math.gcd(*clean.values())
            if g > 1:
                clean = {e: c // g for e, c in clean.items()}
        self.num_vars = n
        self.degree = deg
        self._terms = dict(sorted(clean.items(), reverse=True))
        self._hash = None

    @property
    def terms(self) -> dict[tuple[int, ...], int]:
        return dict(self._terms)

    def content(self) -> int:
        return math.gcd(*self._terms.values())

    def __eq__(self, other):
        if not isinstance(other, HomogeneousForm):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __repr__(self):
        return f"HomogeneousForm({self})"

    def __str__(self):
        names = _var_names(self.num_vars)
        parts = []
        for exps, c in self._terms.items():
            mono = "*".join(
                names[i] if e == 1 else f"{names[i]}^{e}" for i, e in enumerate(exps) if e
            )
            if abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            parts.append(("-" if c < 0 else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def _evaluate(self, values: Sequence, one=1):
        """Evaluate on any ring elements supporting + and * (ints, Polys)."""
        if len(values) != self.num_vars:
            raise DimensionMismatch(f"form in {self.num_vars} variables, got {len(values)} values")
        need = [max(e[i] for e in self._terms) for i in range(self.num_vars)]
        powers = []
        for v, top in zip(values, need):
            row = [one]
            for _ in range(top):
                row.append(row[-1] * v)
            powers.append(row)
        total = None
        for exps, c in self._terms.items():
            term = c
            for i, e in enumerate(exps):
                if e:
                    term = powers[i][e] * term
            total = term if total is None else total + term
        return total

    def __call__(self, values: Sequence[int]) -> int:
        return self._evaluate([int(v) for v in values])

    def linear_coefficients(self) -> list[int]:
        if self.degree != 1:
            raise NotLinear(f"form {self} has degree {self.degree}")
        coeffs = [0] * self.num_vars
        for exps, c in self._terms.items():
            coeffs[exps.index(1)] = c
        return coeffs

    def to_json(self) -> dict:
        return {
            "num_vars": self.num_vars,
            "terms": [[list(e), str(c)] for e, c in self._terms.items()],
        }

    @classmethod
    def from_json(cls, obj, num_vars: int | None = None, *, primitive: bool = True) -> "HomogeneousForm":
        if isinstance(obj, str):
            return cls.parse(obj, num_vars, primitive=primitive)
        n = obj.get("num_vars", num_vars)
        return cls({tuple(e): int(c) for e, c in obj["terms"]}, n, primitive=primitive)

    @classmethod
    def parse(cls, text: str, num_vars: int, *, primitive: bool = True) -> "HomogeneousForm":
        """Parse ``"X^2 + 3*X*Y"``; variables X,Y,Z,W or X0..XN (case-insensitive)."""
        import sympy
        from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

        gens = sympy.symbols(f"X0:{num_vars}")
        local = {f"X{i}": g for i, g in enumerate(gens)}
        if num_vars <= len(_LETTERS):
            local.update({_LETTERS[i]: g for i, g in enumerate(gens)})
        local.update({k.lower(): v for k, v in list(local.items())})
        expr = parse_expr(
            text, local_dict=local, transformations=standard_transformations + (convert_xor,)
        )
        poly = sympy.Poly(expr, *gens, domain="ZZ")
        return cls(dict(poly.terms()), num_vars, primitive=primitive)

    def to_sympy(self):
        import sympy

        gens = sympy.symbols(f"X0:{self.num_vars}")
        return sympy.Poly.from_dict(self._terms, *gens, domain="ZZ")


def evaluate_form(form: HomogeneousForm, point: ProjectivePoint | Sequence[int]) -> int:
    coords = point.coords if isinstance(point, ProjectivePoint) else point
    return form(coords)


def _random_points(num_vars: int, count: int, seed: int) -> list[list[int]]:
    rng = random.Random(seed)
    return [[rng.randint(-1000, 1000) for _ in range(num_vars)] for _ in range(count)]


class Morphism:
    """A self-map of P^N given by N+1 forms of a common degree d >= 2.

    ``degenerate`` records whether the forms were found to share a common
    factor (exact for N = 1) or a common zero at a sampled point (N >= 2).
    Evaluation still checks for base-locus points on every call.
    """

    def __init__(self, forms: Sequence[HomogeneousForm], *, samples: int = DEFAULT_BASE_LOCUS_SAMPLES):
        forms = tuple(forms)
        if len(forms) < 2:
            raise DimensionMismatch("a morphism of P^N needs N+1 >= 2 forms")
        n = len(forms)
        if any(f.num_vars != n for f in forms):
            raise DimensionMismatch("each form must have N+1 variables for N+1 forms")
        degrees = {f.degree for f in forms}
        if len(degrees) != 1:
            raise ValueError("forms of a morphism must share one degree")
        self.forms = forms
        self.degree = degrees.pop()
        if self.degree < 2:
            raise ValueError("morphism degree must be at least 2")
        self.dim = n - 1
        if self.dim == 1:
            self.degenerate = _binary_forms_share_factor(*forms)
            self.degeneracy_exact = True
        else:
            self.degenerate = any(
                not any(f(pt) for f in forms) for pt in _random_points(n, samples, seed=self.degree * 7919 + n)
            )
            self.degeneracy_exact = False

    @classmethod
    def parse(cls, texts: Sequence[str] | str) -> "Morphism":
        """Forms as a list, or one string separated by ';'."""
        if isinstance(texts, str):
            texts = [t for t in texts.split(";") if t.strip()]
        n = len(texts)
        return cls([HomogeneousForm.parse(t, n, primitive=False) for t in texts])

    def __eq__(self, other):
        return isinstance(other, Morphism) and self.forms == other.forms

    def __hash__(self):
        return hash(self.forms)

    def __repr__(self):
        return "Morphism([" + ", ".join(str(f) for f in self.forms) + "])"

    def __call__(self, point: ProjectivePoint) -> ProjectivePoint:
        return apply_morphism(self, point)

    def to_json(self) -> list:
        return [f.to_json() for f in self.forms]

    @classmethod
    def from_json(cls, obj) -> "Morphism":
        n = len(obj)
        return cls([HomogeneousForm.from_json(f, n, primitive=False) for f in obj])

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _binary_forms_share_factor(f: HomogeneousForm, g: HomogeneousForm) -> bool:
    import sympy

    x = sympy.Symbol("x")
    a = sympy.Poly(f._evaluate([sympy.Poly(x, x, domain="ZZ"), 1]), x, domain="ZZ")
    b = sympy.Poly(g._evaluate([sympy.Poly(x, x, domain="ZZ"), 1]), x, domain="ZZ")
    # both lose degree on dehomogenizing <=> Y divides both
    if a.degree() < f.degree and b.degree() < g.degree:
        return True
    return sympy.gcd(a, b).degree() > 0


def apply_morphism(f: Morphism, point: ProjectivePoint) -> ProjectivePoint:
    if len(point) != f.dim + 1:
        raise DimensionMismatch(f"point in P^{len(point) - 1} for a map of P^{f.dim}")
    values = [form(point.coords) for form in f.forms]
    if not any(values):
        raise BaseLocus(f"every component of {f!r} vanishes at {point}")
    return normalize(values)


class OrbitCache:
    """Append-only orbit ``points[n] = f^n(start)`` with thread-safe extension."""

    def __init__(self, morphism: Morphism, start: ProjectivePoint, *, digit_ceiling: int = DEFAULT_DIGIT_CEILING):
        if len(start) != morphism.dim + 1:
            raise DimensionMismatch("start point and morphism dimensions differ")
        self.morphism = morphism
        self.start = start
        self.digit_ceiling = digit_ceiling
        self._points = [start]
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._points)

    @property
    def points(self) -> list[ProjectivePoint]:
        return list(self._points)

    def _check_size(self, point: ProjectivePoint, n: int):
        limit_bits = self.digit_ceiling * 3.3219280948873626
        for x in point.coords:
            b = abs(x).bit_length()
            if b > limit_bits - 8 and decimal_digits(x) > self.digit_ceiling:
                raise ResourceLimit(
                    f"orbit index {n}: coordinate exceeds {self.digit_ceiling} decimal digits"
                )

    def point(self, n: int) -> ProjectivePoint:
        if n < 0:
            raise ValueError("orbit index must be non-negative")
        if n < len(self._points):
            return self._points[n]
        with self._lock:
            while len(self._points) <= n:
                nxt = apply_morphism(self.morphism, self._points[-1])
                self._check_size(nxt, len(self._points))
                self._points.append(nxt)
            return self._points[n]

    def save(self, path: str | Path) -> None:
        from .serialize import write_orbit_jsonl

        write_orbit_jsonl(path, self._points)

    def load(self, path: str | Path, *, verify: bool = False) -> int:
        """Adopt points from a JSON-lines file; returns how many were loaded."""
        from .serialize import read_orbit_jsonl

        pts = read_orbit_jsonl(path)
        if not pts or pts[0] != self.start:
            raise ValueError(f"{path}: orbit file does not start at {self.start}")
        if verify:
            for a, b in zip(pts, pts[1:]):
                if apply_morphism(self.morphism, a) != b:
                    raise ValueError(f"{path}: orbit file inconsistent with morphism")
        with self._lock:
            if len(pts) > len(self._points):
                self._points = list(pts)
        return len(pts)


def orbit_point(cache: OrbitCache, n: int) -> ProjectivePoint:
    return cache.point(n)


def _line_restriction_pullback(f: Morphism, F: HomogeneousForm, j: int, base, direction):
    """F(f^j(base*1 + direction*t)) as a univariate sympy Poly in t."""
    import sympy

    t = sympy.Symbol("t")
    vec = [sympy.Poly(a + b * t, t, domain="ZZ") for a, b in zip(base, direction)]
    one = sympy.Poly(1, t, domain="ZZ")
    for _ in range(j):
        vec = [form._evaluate(vec, one) for form in f.forms]
        vec = [v if isinstance(v, sympy.Poly) else sympy.Poly(v, t, domain="ZZ") for v in vec]
    out = F._evaluate(vec, one)
    if not isinstance(out, sympy.Poly):
        out = sympy.Poly(out, t, domain="ZZ")
    return out


def reduced_pullback_degree(
    f: Morphism,
    F: HomogeneousForm,
    j: int,
    *,
    max_degree: int = DEFAULT_PULLBACK_DEGREE_BOUND,
    seed: int = 0,
) -> tuple[int, bool]:
    """Degree of the reduced divisor of ``F o f^j`` and whether it is exact.

    For N = 1 the form is dehomogenized and its squarefree part taken
    exactly.  For N >= 2 the composite is restricted to a pseudorandom line;
    the restriction can only merge roots, so the result may undercount.
    """
    if F.num_vars != f.dim + 1:
        raise DimensionMismatch("divisor and morphism live on different P^N")
    if j < 0:
        raise ValueError("j must be non-negative")
    total = f.degree**j * F.degree
    if total > max_degree:
        raise ResourceLimit(f"composed degree {total} exceeds bound {max_degree}")
    if f.dim == 1:
        base, direction, exact = (0, 1), (1, 0), True
    else:
        rng = random.Random(seed * 1_000_003 + j)
        base = [rng.randint(-97, 97) for _ in range(f.dim + 1)]
        direction = [rng.randint(-97, 97) for _ in range(f.dim + 1)]
        exact = False
    g = _line_restriction_pullback(f, F, j, base, direction)
    if g.is_zero:
        raise BaseLocus("pullback vanishes identically on the test line")
    reduced = g.sqf_part().degree() if g.degree() > 0 else 0
    if g.degree() < total:
        reduced += 1
    return reduced, exact


def _rank(rows: list[list[int]]) -> int:
    m = [[Fraction(x) for x in row] for row in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        pivot = next((r for r in range(rank, len(m)) if m[r][c] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c] != 0:
                k = m[r][c] / m[rank][c]
                m[r] = [a - k * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def normal_crossings_linear_check(forms: Sequence[HomogeneousForm]) -> bool:
    """True iff the hyperplanes are in general position.

    Checks only subsets of size min(k, N+1): full rank there implies full
    rank for every smaller subset, pairwise non-proportionality included.
    """
    forms = list(forms)
    if not forms:
        return True
    n = forms[0].num_vars
    if any(F.num_vars != n for F in forms):
        raise DimensionMismatch("linear forms in differing numbers of variables")
    rows = [F.linear_coefficients() for F in forms]
    size = min(len(rows), n)
    return all(_rank([rows[i] for i in idx]) == size for idx in itertools.combinations(range(len(rows)), size))


def factor_form(F: HomogeneousForm) -> list[tuple[HomogeneousForm, int]]:
    """Irreducible factors over Z with multiplicities (content dropped)."""
    _, pieces = F.to_sympy().factor_list()
    out = []
    for poly, mult in pieces:
        out.append((HomogeneousForm(dict(poly.terms()), F.num_vars), mult))
    return out

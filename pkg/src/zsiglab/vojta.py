"""Degree thresholds of the conditional non-density results and desk experiments.

Every threshold is an exact rational comparison.  The experiment runner
pairs a Zsigmondy run for a dynamical sequence with those verdicts and with
the growth of B_n = log c_n against d^n times the canonical height.  Nothing
here decides non-density; reports only say whether the degree hypotheses
hold and what was observed up to the horizon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import FactorBudget
from .errors import DegreeTooSmall, LabError, ResourceLimit
from .geometry import (
    DEFAULT_DIGIT_CEILING,
    DEFAULT_PULLBACK_DEGREE_BOUND,
    HomogeneousForm,
    factor_form,
    normal_crossings_linear_check,
    reduced_pullback_degree,
)
from .heights import canonical_height_partial
from .primdiv import DEFAULT_REPORT_BUDGET, ZsigmondyReport, zsigmondy_set
from .sequences import DynValue, SequenceSpec, TermStream, WanderingNumerator
from .serialize import fracstr, real12

THM01, DEG_K_BIG, DEG_DJ_DJ, MIN_J = "Thm0.1", "DegKBig", "DegDjDj", "MinJ"


@dataclass(frozen=True)
class ThresholdVerdict:
    satisfied: bool
    lhs: Fraction
    rhs: Fraction
    which: str

    @classmethod
    def compare(cls, lhs, rhs, which: str) -> "ThresholdVerdict":
        lhs, rhs = Fraction(lhs), Fraction(rhs)
        return cls(lhs > rhs, lhs, rhs, which)

    def to_json(self) -> dict:
        return {"satisfied": self.satisfied, "lhs": fracstr(self.lhs), "rhs": fracstr(self.rhs), "which": self.which}


def _need_d3(d: int) -> None:
    if d <= 2:
        raise DegreeTooSmall(f"degree d={d}: the threshold needs d >= 3")


def check_theorem01(N: int, d: int, deg_f: int) -> ThresholdVerdict:
    """deg F > (N+1)(1 + 1/(d-2)) for a hypersurface in P^N."""
    _need_d3(d)
    return ThresholdVerdict.compare(deg_f, (N + 1) * (1 + Fraction(1, d - 2)), THM01)


def check_degk(d: int, deg_d: int, deg_neg_canonical: int) -> ThresholdVerdict:
    """deg D > (d-1)/(d-2) * deg(-K)."""
    _need_d3(d)
    return ThresholdVerdict.compare(deg_d, Fraction(d - 1, d - 2) * deg_neg_canonical, DEG_K_BIG)


def check_deltaj(d: int, deg_d: int, deg_neg_canonical: int, j: int, deg_delta_j: int) -> ThresholdVerdict:
    """deg(Delta_j)/d^j > deg D/(d-1) + deg(-K)/d^j."""
    if d < 2 or j < 0:
        raise ValueError("need d >= 2 and j >= 0")
    dj = d**j
    lhs = Fraction(deg_delta_j, dj)
    rhs = Fraction(deg_d, d - 1) + Fraction(deg_neg_canonical, dj)
    return ThresholdVerdict.compare(lhs, rhs, DEG_DJ_DJ)


def min_iterate_j(d: int, deg_d: int, deg_neg_canonical: int) -> int:
    """Smallest j >= 0 with d^j (d-2) deg D > (d-1) deg(-K)."""
    _need_d3(d)
    if deg_d < 1:
        raise ValueError("deg D must be positive")
    j = 0
    while d**j * (d - 2) * deg_d <= (d - 1) * deg_neg_canonical:
        j += 1
    return j


def reduced_pullback_verdict(d: int, deg_d: int, deg_neg_canonical: int, j: int) -> ThresholdVerdict:
    """The threshold at iterate j when the pullback is already reduced."""
    return check_deltaj(d, deg_d, deg_neg_canonical, j, d**j * deg_d)


@dataclass
class ExperimentConfig:
    spec: SequenceSpec
    horizon: int
    excluded_primes: tuple[int, ...] = ()
    factoring_budget: FactorBudget = DEFAULT_REPORT_BUDGET
    digit_ceiling: int = DEFAULT_DIGIT_CEILING
    j: int = 0
    pullback_degree_bound: int = DEFAULT_PULLBACK_DEGREE_BOUND

    def __post_init__(self):
        if not isinstance(self.spec, (DynValue, WanderingNumerator)):
            raise LabError("experiments need a dynvalue or wandering sequence")
        if self.horizon < 0 or self.j < 0:
            raise LabError("horizon and j must be non-negative")
        self.excluded_primes = tuple(sorted({int(p) for p in self.excluded_primes}))

    def to_json(self) -> dict:
        b = self.factoring_budget
        return {
            "spec": self.spec.to_json(),
            "horizon": self.horizon,
            "excluded_primes": [str(p) for p in self.excluded_primes],
            "factoring_budget": {"trial_bound": b.trial_bound, "rho_iterations": b.rho_iterations, "max_digits": b.max_digits},
            "digit_ceiling": self.digit_ceiling,
            "j": self.j,
            "pullback_degree_bound": self.pullback_degree_bound,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentConfig":
        budget = obj.get("factoring_budget") or {}
        base = DEFAULT_REPORT_BUDGET
        return cls(
            spec=SequenceSpec.from_json(obj["spec"]),
            horizon=int(obj["horizon"]),
            excluded_primes=tuple(int(p) for p in obj.get("excluded_primes", ())),
            factoring_budget=FactorBudget(
                trial_bound=int(budget.get("trial_bound", base.trial_bound)),
                rho_iterations=int(budget.get("rho_iterations", base.rho_iterations)),
                max_digits=int(budget.get("max_digits", base.max_digits)),
            ),
            digit_ceiling=int(obj.get("digit_ceiling", DEFAULT_DIGIT_CEILING)),
            j=int(obj.get("j", 0)),
            pullback_degree_bound=int(obj.get("pullback_degree_bound", DEFAULT_PULLBACK_DEGREE_BOUND)),
        )


def target_form(spec: SequenceSpec) -> HomogeneousForm:
    """The divisor whose values the sequence records."""
    if isinstance(spec, DynValue):
        return spec.form
    b = spec.beta
    return HomogeneousForm({(1, 0): b.denominator, (0, 1): -b.numerator}, 2)


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    zsigmondy: ZsigmondyReport
    verdicts: list[ThresholdVerdict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    normal_crossings: bool | None = None
    pullback: dict = field(default_factory=dict)
    height: object = None
    ratios: list[tuple[int, float | None]] = field(default_factory=list)
    kappa_hat: float | None = None
    statement: str = ""

    @property
    def truncated(self) -> bool:
        return self.zsigmondy.truncated or bool(self.height and self.height.truncated)

    def verdict(self, which: str) -> ThresholdVerdict | None:
        return next((v for v in self.verdicts if v.which == which), None)

    def to_json(self) -> dict:
        ratio = dict(self.ratios)
        return {
            "config": self.config.to_json(),
            "verdicts": [v.to_json() for v in self.verdicts],
            "normal_crossings": self.normal_crossings,
            "pullback": self.pullback,
            "statement": self.statement,
            "notes": self.notes,
            "truncated": self.truncated,
            "zsigmondy": self.zsigmondy.zsigmondy_set,
            "terms": [
                {
                    "n": r.n,
                    "digits": r.digits,
                    "b_n": real12(r.b_n),
                    "has_primitive": r.has_primitive,
                    "b_n_over_dn_height": None if ratio.get(r.n) is None else real12(ratio[r.n]),
                }
                for r in self.zsigmondy.records
            ],
            "height": {
                **(self.height.to_json() if self.height else {}),
                "kappa_hat": None if self.kappa_hat is None else real12(self.kappa_hat),
                "kappa_hat_note": "empirical minimum of B_n / (d^n * height estimate) over the second half of the run",
            },
        }

    def to_csv(self) -> str:
        return self.zsigmondy.to_csv()


def _normal_crossings(F: HomogeneousForm) -> tuple[bool | None, str]:
    pieces = factor_form(F)
    if any(m > 1 for _, m in pieces):
        return False, "divisor is not reduced"
    if all(g.degree == 1 for g, _ in pieces):
        ok = normal_crossings_linear_check([g for g, _ in pieces])
        return ok, "product of linear forms checked for general position"
    return None, "not a product of linear forms; normal crossings not verified"


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    spec = cfg.spec
    f = spec.morphism
    F = target_form(spec)
    N, d, deg_d = f.dim, f.degree, F.degree
    deg_k = N + 1

    stream = TermStream(spec, digit_ceiling=cfg.digit_ceiling)
    zrep = zsigmondy_set(spec, cfg.horizon, cfg.excluded_primes, budget=cfg.factoring_budget, stream=stream)
    report = ExperimentReport(config=cfg, zsigmondy=zrep)
    if zrep.truncated:
        report.notes.append(f"orbit hit the digit ceiling at n={zrep.truncated_at}")

    if d >= 3:
        report.verdicts.append(check_theorem01(N, d, deg_d))
        report.verdicts.append(check_degk(d, deg_d, deg_k))
    else:
        report.notes.append(f"degree d={d} < 3: degree thresholds undefined")

    try:
        deg_delta, exact = reduced_pullback_degree(f, F, cfg.j, max_degree=cfg.pullback_degree_bound)
        report.verdicts.append(check_deltaj(d, deg_d, deg_k, cfg.j, deg_delta))
        report.pullback = {"j": cfg.j, "deg_delta_j": deg_delta, "exact": exact, "composed_degree": d**cfg.j * deg_d}
    except ResourceLimit as exc:
        report.notes.append(f"pullback at j={cfg.j} skipped: {exc}")

    if d >= 3:
        jmin = min_iterate_j(d, deg_d, deg_k)
        report.verdicts.append(
            ThresholdVerdict.compare(
                Fraction(deg_d), Fraction(d - 1, d - 2) * Fraction(deg_k, d**jmin), MIN_J
            )
        )
        report.pullback["min_j"] = jmin
        try:
            deg_min, exact = reduced_pullback_degree(f, F, jmin, max_degree=cfg.pullback_degree_bound)
            report.pullback["reduced_at_min_j"] = deg_min == d**jmin * deg_d
            report.pullback["reduced_at_min_j_exact"] = exact
        except ResourceLimit as exc:
            report.notes.append(f"pullback at min j={jmin} skipped: {exc}")

    report.normal_crossings, nc_note = _normal_crossings(F)
    report.notes.append(nc_note)

    report.height = canonical_height_partial(f, spec.start, cfg.horizon, cache=stream.orbit)
    h_hat = report.height.final_estimate
    tail_from = cfg.horizon // 2
    tail = []
    for r in zrep.records:
        ratio = None
        if r.value != 0 and h_hat > 0:
            ratio = r.b_n / (d**r.n * h_hat)
            if r.n >= tail_from:
                tail.append(ratio)
        report.ratios.append((r.n, ratio))
    report.kappa_hat = min(tail) if tail else None

    hypotheses = report.verdict(THM01)
    if hypotheses is not None and hypotheses.satisfied and report.normal_crossings:
        report.statement = (
            f"degree and normal-crossings hypotheses hold; observations consistent with "
            f"non-density of Zsigmondy points at horizon {cfg.horizon}"
        )
    else:
        report.statement = "threshold unsatisfied: no prediction"
    return report

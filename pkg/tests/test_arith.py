import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zsiglab.arith import FactorBudget, decimal_digits, factor, is_probable_prime, ord_p
from zsiglab.errors import NotPrime, ZeroInput

from oracles import factor_oracle


def test_factor_small_composite():
    fz = factor(63)
    assert fz.factors == ((3, 2), (7, 1))
    assert fz.cofactor == 1 and not fz.budget_exhausted


def test_factor_unit():
    fz = factor(-1)
    assert fz.factors == () and fz.cofactor == 1 and fz.sign == -1
    assert fz.reassemble() == -1


def test_factor_fermat_f5():
    n = 2**32 + 1
    assert factor_oracle(n) == {641: 1, 6700417: 1}
    assert factor(n).factors == ((641, 1), (6700417, 1))


def test_factor_needs_rho():
    # both prime factors sit above the default trial bound
    n = 1000003 * 1000033 * 999983**2
    assert factor(n).factors == ((999983, 2), (1000003, 1), (1000033, 1))
    assert factor(2**67 - 1).factors == ((193707721, 1), (761838257287, 1))


def test_factor_zero():
    with pytest.raises(ZeroInput):
        factor(0)


def test_budget_exhaustion_reports_cofactor():
    fz = factor(2**32 + 1, FactorBudget(trial_bound=100, rho_iterations=1))
    assert fz.budget_exhausted
    assert fz.reassemble() == 2**32 + 1
    big = (10**30 + 57) * (10**31 + 33)
    fz = factor(big * 12, FactorBudget(max_digits=20))
    assert fz.factors == ((2, 2), (3, 1)) and fz.cofactor == big


def test_factor_is_deterministic():
    n = 10**18 + 9 * 10**17 + 123456789
    assert factor(n) == factor(n)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=-(10**24), max_value=10**24).filter(bool))
def test_reassembly(n):
    fz = factor(n)
    assert fz.reassemble() == n
    ps = fz.primes
    assert ps == sorted(set(ps))
    assert all(is_probable_prime(p) for p in ps)
    assert (fz.cofactor == 1) == (not fz.budget_exhausted)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=2, max_value=10**30), st.integers(min_value=1, max_value=400))
def test_factors_grow_with_budget(n, iters):
    small = factor(n, FactorBudget(trial_bound=1000, rho_iterations=iters))
    large = factor(n, FactorBudget(trial_bound=1000, rho_iterations=iters * 50))
    assert set(small.primes) <= set(large.primes)


def test_factor_matches_sympy_on_range():
    for n in range(2, 3000):
        assert dict(factor(n).factors) == factor_oracle(n)


@pytest.mark.parametrize("n,p,e", [(63, 3, 2), (63, 5, 0), (2**10 * 7, 2, 10), (-(3**77) * 5, 3, 77)])
def test_ord_p(n, p, e):
    assert ord_p(n, p) == e


def test_ord_p_errors():
    with pytest.raises(ZeroInput):
        ord_p(0, 3)
    with pytest.raises(NotPrime):
        ord_p(12, 4)


@given(st.integers(min_value=1, max_value=10**40), st.integers(min_value=1, max_value=10**40),
       st.sampled_from([2, 3, 5, 7, 101]))
def test_ord_p_additive(m, n, p):
    assert ord_p(m * n, p) == ord_p(m, p) + ord_p(n, p)


def test_probable_prime_known_values():
    assert is_probable_prime(2**127 - 1)
    assert not is_probable_prime(3215031751)  # strong pseudoprime to bases 2,3,5,7
    assert not is_probable_prime(3317044064679887385961981)
    primes = [p for p in range(2, 2000) if is_probable_prime(p)]
    assert primes == [p for p in range(2, 2000) if factor_oracle(p) == {p: 1}]


@given(st.integers(min_value=-(10**200), max_value=10**200))
def test_decimal_digits(n):
    assert decimal_digits(n) == len(str(abs(n)))


def test_prime_powers_above_trial_bound():
    p = 87178291199
    for k in (2, 3, 5, 7):
        assert factor(p**k).factors == ((p, k),)
    assert factor(p**6 * 1000003**2).factors == ((1000003, 2), (p, 6))

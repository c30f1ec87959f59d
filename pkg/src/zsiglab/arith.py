"""Exact integer utilities: valuations, probable primes and a budgeted factorizer.

Nothing downstream needs a complete factorization to decide primitive
divisors, so :func:`factor` is deliberately best effort: trial division
against a primorial, then Brent's variant of Pollard rho under an iteration
budget.  Whatever is left over is reported as a cofactor, never dropped.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache

from .errors import NotPrime, ZeroInput

# Bases 2..41 make Miller-Rabin deterministic below this bound.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_DETERMINISTIC_LIMIT = 3317044064679887385961981
_MR_EXTRA_ROUNDS = 16


def decimal_digits(n: int) -> int:
    """Number of decimal digits of ``|n|`` without building the string."""
    n = abs(n)
    if n < 10:
        return 1
    d = ((n.bit_length() - 1) * 30102999566398) // 10**14 + 1
    while n >= 10**d:
        d += 1
    while d > 1 and n < 10 ** (d - 1):
        d -= 1
    return d


def _mr_round(n: int, d: int, s: int, a: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_probable_prime(n: int) -> bool:
    """Strong probable-prime test with a fixed, reproducible witness set."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if not all(_mr_round(n, d, s, a) for a in _MR_BASES):
        return False
    if n < _MR_DETERMINISTIC_LIMIT:
        return True
    rng = random.Random(n)
    return all(_mr_round(n, d, s, rng.randrange(2, n - 1)) for _ in range(_MR_EXTRA_ROUNDS))


def ord_p(n: int, p: int) -> int:
    """Exponent of the prime ``p`` in ``n``."""
    if n == 0:
        raise ZeroInput("ord_p is undefined at 0")
    if not is_probable_prime(p):
        raise NotPrime(f"{p} is not prime")
    n = abs(n)
    k = 0
    # square the divisor while it still divides, then walk back down
    powers = [p]
    while n % powers[-1] == 0:
        n //= powers[-1]
        k += 1 << (len(powers) - 1)
        powers.append(powers[-1] * powers[-1])
    for i in range(len(powers) - 2, -1, -1):
        if n % powers[i] == 0:
            n //= powers[i]
            k += 1 << i
    return k


@lru_cache(maxsize=4)
def small_primes(bound: int) -> tuple[int, ...]:
    """All primes strictly below ``bound`` (simple sieve)."""
    if bound <= 2:
        return ()
    sieve = bytearray([1]) * bound
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(bound - 1) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, bound, i)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


def _product_tree(values) -> int:
    values = list(values)
    if not values:
        return 1
    while len(values) > 1:
        paired = [values[i] * values[i + 1] for i in range(0, len(values) - 1, 2)]
        if len(values) % 2:
            paired.append(values[-1])
        values = paired
    return values[0]


@lru_cache(maxsize=4)
def _primorial(bound: int) -> int:
    return _product_tree(small_primes(bound))


@dataclass(frozen=True)
class FactorBudget:
    """Effort limits for :func:`factor`.

    ``max_digits`` caps the size of a composite that rho (and the primality
    test) will be attempted on; anything larger is returned as cofactor.
    """

    trial_bound: int = 10**6
    rho_iterations: int = 100_000
    max_digits: int = 200


DEFAULT_BUDGET = FactorBudget()


@dataclass(frozen=True)
class Factorization:
    value: int
    factors: tuple[tuple[int, int], ...]
    cofactor: int = 1
    budget_exhausted: bool = False

    @property
    def sign(self) -> int:
        return -1 if self.value < 0 else 1

    @property
    def complete(self) -> bool:
        return not self.budget_exhausted

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def reassemble(self) -> int:
        out = self.sign * self.cofactor
        for p, e in self.factors:
            out *= p**e
        return out


def iroot(x: int, k: int) -> int:
    """Floor of the k-th root of x >= 0."""
    if x < 2:
        return x
    r = 1 << -(-x.bit_length() // k)
    while True:
        s = ((k - 1) * r + x // r ** (k - 1)) // k
        if s >= r:
            return r
        r = s


def perfect_power(x: int) -> tuple[int, int] | None:
    """(root, k) with root**k == x and k > 1 prime, if x is such a power."""
    for k in small_primes(x.bit_length() + 1):
        r = iroot(x, k)
        if r > 1 and r**k == x:
            return r, k
    return None


def _brent_rho(n: int, budget: list[int]) -> int | None:
    """Find a nontrivial divisor of composite ``n`` or return None.

    ``budget`` is a one-element list holding the remaining iteration count;
    it is decremented in place so the caller sees the spend.
    """
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    m = 64
    while budget[0] > 0:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        g = r = q = 1
        x = ys = y
        while g == 1 and budget[0] > 0:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            budget[0] -= r
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    return None


def factor(n: int, budget: FactorBudget | int | None = None) -> Factorization:
    """Factor ``n`` as far as ``budget`` allows.

    An ``int`` budget is read as the rho iteration allowance with default
    trial bound.  Results depend only on ``n`` and the budget.
    """
    if n == 0:
        raise ZeroInput("cannot factor 0")
    if budget is None:
        budget = DEFAULT_BUDGET
    elif isinstance(budget, int):
        budget = FactorBudget(rho_iterations=budget)

    found: dict[int, int] = {}
    m = abs(n)

    if m > 1 and budget.trial_bound > 2:
        g = math.gcd(m, _primorial(budget.trial_bound))
        for p in small_primes(budget.trial_bound):
            if g == 1:
                break
            if p * p > g:
                p = g
            if g % p == 0:
                g //= p
                e = ord_p(m, p)
                m //= p**e
                found[p] = e

    cofactor = 1
    if m > 1:
        if m < budget.trial_bound**2:
            found[m] = found.get(m, 0) + 1
        elif decimal_digits(m) > budget.max_digits:
            cofactor = m
        else:
            remaining = [budget.rho_iterations]
            stack = [m]
            while stack:
                x = stack.pop()
                if is_probable_prime(x):
                    found[x] = found.get(x, 0) + 1
                    continue
                pp = perfect_power(x)
                if pp is not None:
                    stack += [pp[0]] * pp[1]
                    continue
                d = _brent_rho(x, remaining) if remaining[0] > 0 else None
                if d is None:
                    cofactor *= x
                else:
                    stack += [x // d, d]

    return Factorization(
        value=n,
        factors=tuple(sorted(found.items())),
        cofactor=cofactor,
        budget_exhausted=cofactor != 1,
    )


def radical(fz: Factorization) -> int:
    """Product of the distinct listed primes (cofactor ignored)."""
    return math.prod(fz.primes)

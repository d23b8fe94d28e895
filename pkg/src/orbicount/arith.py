"""Exact integer and rational arithmetic primitives.

p-adic valuations of rationals, integer factorization (sieve-backed trial
division with a Brent/Pollard-rho fallback), perfect-power and k-full tests,
primitive normalization of rational coordinate vectors, and the small
sieve/Moebius helpers the enumeration code leans on.

All functions are pure and operate on arbitrary-precision integers or
``fractions.Fraction``; nothing here touches floating point except the
initial guess inside integer root extraction.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

__all__ = [
    "INFINITY",
    "Infinity",
    "Valuation",
    "valuation",
    "int_valuation",
    "factorize",
    "distinct_primes",
    "is_kth_power",
    "is_k_full",
    "primitive_coords",
    "is_prime",
    "primes_up_to",
    "mobius_sieve",
    "count_coprime",
    "signed_squarefree_divisors",
    "integer_kth_root",
    "euler_phi",
]

SIEVE_BOUND = 10**6  # precomputed smallest-prime-factor table covers n < this


class Infinity:
    """Valuation of zero.  Compares greater than every integer."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "INFINITY"

    def __eq__(self, other) -> bool:
        return isinstance(other, Infinity)

    def __hash__(self) -> int:
        return hash("arith.INFINITY")

    def __gt__(self, other) -> bool:
        return not isinstance(other, Infinity)

    def __ge__(self, other) -> bool:
        return True

    def __lt__(self, other) -> bool:
        return False

    def __le__(self, other) -> bool:
        return isinstance(other, Infinity)


INFINITY = Infinity()

Valuation = Union[int, Infinity]

Rational = Union[int, Fraction]


# --------------------------------------------------------------------------
# primality and sieves
# --------------------------------------------------------------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24; strong-probable-prime above."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n == p:
            return True
        if n % p == 0:
            return False
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_up_to(n: int) -> List[int]:
    """All primes <= n by a bytearray sieve of Eratosthenes."""
    if n < 2:
        return []
    sieve = bytearray(b"\x01") * (n + 1)
    sieve[:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            start = p * p
            sieve[start :: p] = b"\x00" * ((n - start) // p + 1)
    return [i for i, v in enumerate(sieve) if v]


_SPF: List[int] = []


def _spf_table() -> List[int]:
    """Smallest-prime-factor table up to SIEVE_BOUND, built lazily once."""
    global _SPF
    if not _SPF:
        spf = list(range(SIEVE_BOUND))
        for p in range(2, math.isqrt(SIEVE_BOUND) + 1):
            if spf[p] == p:
                for m in range(p * p, SIEVE_BOUND, p):
                    if spf[m] == m:
                        spf[m] = p
        _SPF = spf
    return _SPF


def mobius_sieve(n: int) -> np.ndarray:
    """Moebius function mu(0..n) as an int8 array."""
    mu = np.ones(n + 1, dtype=np.int8)
    if n >= 0:
        mu[0] = 0
    for p in primes_up_to(n):
        mu[p::p] *= -1
        sq = p * p
        if sq <= n:
            mu[sq::sq] = 0
    return mu


# --------------------------------------------------------------------------
# factorization
# --------------------------------------------------------------------------


def _rho_brent(n: int, rng: random.Random) -> int:
    """A nontrivial factor of composite odd n (Brent's cycle variant)."""
    if n % 2 == 0:
        return 2
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
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
        if g != n:
            return g


def _factor_large(n: int, out: Dict[int, int], rng: random.Random) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _rho_brent(n, rng)
    _factor_large(d, out, rng)
    _factor_large(n // d, out, rng)


def factorize(n: int) -> Dict[int, int]:
    """Complete prime factorization of n >= 1 as {prime: exponent}, keys ascending.

    Trial division against the smallest-prime-factor sieve handles n below
    SIEVE_BOUND directly and strips small primes otherwise; Brent rho splits
    any remaining cofactor.  factorize(1) == {}.
    """
    if n < 1:
        raise ValueError(f"factorize requires n >= 1, got {n}")
    out: Dict[int, int] = {}
    if n < SIEVE_BOUND:
        spf = _spf_table()
        while n > 1:
            p = spf[n]
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
        return dict(sorted(out.items()))
    for p in (2, 3, 5):
        while n % p == 0:
            n //= p
            out[p] = out.get(p, 0) + 1
    # wheel over 6k+-1 up to the sieve bound, then rho
    f = 7
    step = 4
    while f * f <= n and f < SIEVE_BOUND:
        if n % f == 0:
            e = 0
            while n % f == 0:
                n //= f
                e += 1
            out[f] = e
        f += step
        step = 6 - step
    if n > 1:
        if f * f > n:
            out[n] = out.get(n, 0) + 1
        else:
            _factor_large(n, out, random.Random(0xC0FFEE ^ n))
    return dict(sorted(out.items()))


def distinct_primes(n: int) -> Tuple[int, ...]:
    """Distinct prime divisors of n >= 1, ascending."""
    return tuple(factorize(n))


def euler_phi(n: int) -> int:
    phi = n
    for p in factorize(n):
        phi -= phi // p
    return phi


# --------------------------------------------------------------------------
# valuations
# --------------------------------------------------------------------------


def int_valuation(n: int, p: int) -> int:
    """v_p(n) for a nonzero integer.  No primality check; hot-path helper."""
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(x: Rational, p: int) -> Valuation:
    """p-adic valuation of a rational number; INFINITY exactly for x == 0.

    >>> valuation(Fraction(18, 5), 3)
    2
    >>> valuation(Fraction(18, 5), 5)
    -1
    """
    if not is_prime(p):
        raise ValueError(f"valuation requires a prime, got {p}")
    x = Fraction(x)
    if x == 0:
        return INFINITY
    return int_valuation(x.numerator, p) - int_valuation(x.denominator, p)


# --------------------------------------------------------------------------
# power structure of integers
# --------------------------------------------------------------------------


def integer_kth_root(n: int, k: int) -> int:
    """Largest r >= 0 with r**k <= n, for n >= 0, k >= 1.  Exact."""
    if n < 0 or k < 1:
        raise ValueError("integer_kth_root requires n >= 0 and k >= 1")
    if k == 1 or n < 2:
        return n
    if k == 2:
        return math.isqrt(n)
    r = int(round(n ** (1.0 / k)))
    r = max(r, 1)
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def is_kth_power(n: int, k: int) -> bool:
    """True iff every exponent in factorize(n) is divisible by k.

    Computed by exact k-th root extraction, which is equivalent for n >= 1.
    """
    if n < 1 or k < 1:
        raise ValueError("is_kth_power requires n >= 1 and k >= 1")
    if k == 1 or n == 1:
        return True
    return integer_kth_root(n, k) ** k == n


def is_k_full(n: int, k: int) -> bool:
    """True iff every exponent in factorize(n) is >= k (n=1 vacuously)."""
    if n < 1 or k < 1:
        raise ValueError("is_k_full requires n >= 1 and k >= 1")
    if k == 1 or n == 1:
        return True
    return all(e >= k for e in factorize(n).values())


# --------------------------------------------------------------------------
# coordinate normalization
# --------------------------------------------------------------------------


def primitive_coords(xs: Sequence[Rational]) -> Tuple[int, ...]:
    """Scale a rational vector to coprime integers, first nonzero entry positive.

    The output (y_0, ..., y_k) satisfies y_i / y_j = x_i / x_j for all defined
    ratios and gcd(y_0, ..., y_k) = 1.  Raises on empty or all-zero input.
    """
    fracs = [Fraction(x) for x in xs]
    if not fracs or all(f == 0 for f in fracs):
        raise ValueError("primitive_coords requires a nonzero vector")
    denom_lcm = 1
    for f in fracs:
        denom_lcm = denom_lcm * f.denominator // math.gcd(denom_lcm, f.denominator)
    ints = [int(f * denom_lcm) for f in fracs]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    ints = [v // g for v in ints]
    for v in ints:
        if v != 0:
            if v < 0:
                ints = [-w for w in ints]
            break
    return tuple(ints)


# --------------------------------------------------------------------------
# coprime counting
# --------------------------------------------------------------------------


def signed_squarefree_divisors(primes: Sequence[int]) -> List[int]:
    """Squarefree divisors of prod(primes), sign-encoding the Moebius value."""
    divs = [1]
    for p in primes:
        divs += [-d * p for d in divs]
    return divs


def count_coprime(limit: int, primes: Sequence[int]) -> int:
    """#{1 <= k <= limit : gcd(k, prod primes) = 1} by inclusion-exclusion."""
    if limit <= 0:
        return 0
    total = 0
    for d in signed_squarefree_divisors(primes):
        total += limit // d if d > 0 else -(limit // -d)
    return total

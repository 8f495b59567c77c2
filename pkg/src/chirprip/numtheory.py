"""Arithmetic in the prime field F_p.

Python integers are unbounded, so modular products never overflow; the
64-bit limits only matter for the primality certificate below.
"""

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import NotPrime, ZeroInverse, ZeroTheta

# Deterministic Miller-Rabin witnesses, valid for every n < 3.3e24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

TWO_PI = 2.0 * math.pi


def is_prime(n):
    """Deterministic primality test for n < 3.3e24 (covers all 64-bit n)."""
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n % q == 0:
            return n == q
    if n >= 3_317_044_064_679_887_385_961_981:
        raise ValueError("deterministic witness set only certifies n < 3.3e24")
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
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


def next_prime(n):
    """Smallest prime >= n."""
    n = max(n, 2)
    if n > 2 and n % 2 == 0:
        n += 1
    while not is_prime(n):
        n += 1 if n == 2 else 2
    return n


@dataclass(frozen=True)
class PrimeContext:
    """An odd prime p with its Gauss-sum constant sigma_p.

    ``sigma_p`` is 1 when p = 1 (mod 4) and i when p = 3 (mod 4).
    """

    p: int
    p_mod_4: int = field(init=False)
    sigma_p: complex = field(init=False)

    def __post_init__(self):
        p = int(self.p)
        if p % 2 == 0 or not is_prime(p):
            raise NotPrime(f"{self.p} is not an odd prime")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "p_mod_4", p % 4)
        object.__setattr__(self, "sigma_p", 1 + 0j if p % 4 == 1 else 1j)

    def residue(self, v):
        return int(v) % self.p

    @cached_property
    def legendre_table(self):
        """Legendre symbol of every residue, as an int8 array (small p only)."""
        p = self.p
        if p > 1 << 22:
            raise ValueError("lookup tables are only built for p < 2^22")
        table = -np.ones(p, dtype=np.int8)
        table[0] = 0
        xs = np.arange(1, (p + 1) // 2, dtype=np.int64)
        table[(xs * xs) % p] = 1
        return table

    @cached_property
    def inverse_table(self):
        """Multiplicative inverse of every nonzero residue (entry 0 is 0)."""
        p = self.p
        if p > 1 << 22:
            raise ValueError("lookup tables are only built for p < 2^22")
        inv = np.zeros(p, dtype=np.int64)
        for a in range(1, p):
            inv[a] = pow(a, -1, p)
        return inv


def legendre(ctx, a):
    """Legendre symbol (a/p) via Euler's criterion."""
    a %= ctx.p
    if a == 0:
        return 0
    return 1 if pow(a, (ctx.p - 1) // 2, ctx.p) == 1 else -1


def mod_inverse(ctx, a):
    """Inverse of a modulo p by the extended Euclidean algorithm."""
    p = ctx.p
    a %= p
    if a == 0:
        raise ZeroInverse(f"0 has no inverse modulo {p}")
    old_r, r = a, p
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    return old_s % p


def e_n(x, n):
    """exp(2 pi i x / n), with x reduced modulo n before scaling."""
    return cmath.exp(1j * TWO_PI * (int(x) % n) / n)


def e_p(ctx, numerator):
    return e_n(numerator, ctx.p)


def e_n_array(x, n):
    """Vectorized exp(2 pi i x / n) for an integer array x."""
    x = np.mod(np.asarray(x, dtype=np.int64), n)
    return np.exp(1j * TWO_PI * x / n)


def gauss_sum(ctx, theta):
    """Quadratic Gauss sum sum_{y in F_p} e_p(theta y^2), by direct summation.

    The closed form (theta/p) sigma_p sqrt(p) is deliberately not used here;
    it is what this function gets checked against.
    """
    p = ctx.p
    theta %= p
    if theta == 0:
        raise ZeroTheta("the Gauss sum is only defined for theta != 0")
    exps = np.fromiter(((theta * y * y) % p for y in range(p)), dtype=np.int64, count=p)
    return complex(e_n_array(exps, p).sum())


def gauss_sum_closed(ctx, theta):
    """(theta/p) * sigma_p * sqrt(p)."""
    if theta % ctx.p == 0:
        raise ZeroTheta("the Gauss sum is only defined for theta != 0")
    return legendre(ctx, theta) * ctx.sigma_p * math.sqrt(ctx.p)

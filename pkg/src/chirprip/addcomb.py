"""Set statistics in Z/nZ: sumsets, difference sets, additive energy, Fourier bias.

Also holds the cube {0..M-1}^r with its (2M)-ary Freiman embedding, and the
exponent tau of the sumset inequality |A+B| >= (|A||B|)^tau on that cube.
"""

import math
from dataclasses import dataclass
from itertools import product

import mpmath
import numpy as np

from .errors import BranchMisuse, EmptySet, ModulusMismatch, Overflow

INT63 = 1 << 63


@dataclass(frozen=True)
class ResidueSet:
    """Finite subset of Z/nZ stored as a sorted tuple of distinct residues."""

    modulus: int
    elements: tuple

    def __post_init__(self):
        n = int(self.modulus)
        if n < 1:
            raise ValueError("modulus must be positive")
        els = tuple(sorted({int(e) % n for e in self.elements}))
        object.__setattr__(self, "modulus", n)
        object.__setattr__(self, "elements", els)

    @classmethod
    def of(cls, elements, modulus):
        return cls(modulus, tuple(elements))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return int(x) % self.modulus in set(self.elements)

    def array(self):
        return np.array(self.elements, dtype=np.int64)

    def translate(self, t):
        return ResidueSet(self.modulus, tuple(e + t for e in self.elements))

    def negate(self):
        return ResidueSet(self.modulus, tuple(-e for e in self.elements))

    def dilate(self, k):
        return ResidueSet(self.modulus, tuple(k * e for e in self.elements))


def _check(A, B):
    if A.modulus != B.modulus:
        raise ModulusMismatch(f"moduli differ: {A.modulus} vs {B.modulus}")


def _combine(A, B, sign):
    _check(A, B)
    n = A.modulus
    if not len(A) or not len(B):
        return ResidueSet(n, ())
    if n < INT63 // 2:
        vals = np.mod(np.add.outer(A.array(), sign * B.array()), n)
        return ResidueSet(n, tuple(np.unique(vals).tolist()))
    return ResidueSet(n, tuple({(a + sign * b) % n for a in A for b in B}))


def sumset(A, B):
    return _combine(A, B, 1)


def difference_set(A, B):
    return _combine(A, B, -1)


def difference_counts(A):
    """Map x -> #{(a, a') in A^2 : a - a' = x}."""
    n = A.modulus
    if not len(A):
        return {}
    if n < INT63 // 2:
        d = np.mod(np.subtract.outer(A.array(), A.array()), n).ravel()
        vals, counts = np.unique(d, return_counts=True)
        return dict(zip(vals.tolist(), counts.tolist()))
    out = {}
    for a in A:
        for b in A:
            x = (a - b) % n
            out[x] = out.get(x, 0) + 1
    return out


def additive_energy(A, B=None):
    """E(A, B) = #{(a1, a2, b1, b2) : a1 + b1 = a2 + b2}.

    Computed as sum_x lam_A(x) lam_B(x), where lam counts differences:
    a1 + b1 = a2 + b2 exactly when a1 - a2 = b2 - b1.
    """
    if B is None:
        B = A
    _check(A, B)
    la = difference_counts(A)
    lb = la if B is A else difference_counts(B)
    return sum(c * lb.get(x, 0) for x, c in la.items())


@dataclass(frozen=True)
class EnergyReport:
    energy: int
    lower_bound: float  # |A|^2 |B|^2 / n
    upper_bound: int  # min(|A|, |B|) |A| |B|


def energy_report(A, B=None):
    if B is None:
        B = A
    e = additive_energy(A, B)
    na, nb = len(A), len(B)
    return EnergyReport(e, na * na * nb * nb / A.modulus, min(na, nb) * na * nb)


def fourier_coefficients(A):
    """hat{1_A}(theta) = (1/n) sum_{a in A} e_n(-theta a) for every theta in Z/nZ."""
    n = A.modulus
    theta = np.arange(n, dtype=np.int64)
    phase = np.mod(np.multiply.outer(theta, A.array()), n)
    return np.exp(-2j * np.pi * phase / n).sum(axis=1) / n


def fourier_bias(A):
    """max over nonzero theta of |hat{1_A}(theta)|, by a direct O(n |A|) DFT."""
    if not len(A):
        raise EmptySet("Fourier bias of the empty set")
    if A.modulus == 1:
        return 0.0
    return float(np.abs(fourier_coefficients(A)[1:]).max())


def is_coset(A):
    """True when A is a translate of a subgroup of Z/nZ."""
    if not len(A):
        return False
    n = A.modulus
    H = A.translate(-A.elements[0])
    g = math.gcd(n, *H.elements) if len(H) > 1 else n
    return len(H) == n // g and all(e % g == 0 for e in H)


# -- the cube and its embedding ------------------------------------------------


@dataclass(frozen=True)
class CubeSpec:
    M: int
    r: int

    def __post_init__(self):
        if self.M < 2 or self.r < 1:
            raise ValueError("cube needs M >= 2 and r >= 1")

    @property
    def base(self):
        return 2 * self.M

    @property
    def span(self):
        """(2M)^r, an exclusive bound on every sum of two embedded points."""
        return self.base**self.r


def cube_embed(spec):
    """Sorted integers sum_j x_j (2M)^(j-1) over x in {0..M-1}^r."""
    if spec.span >= INT63:
        raise Overflow(f"(2M)^r = {spec.span} does not fit in 63 bits")
    weights = [spec.base**j for j in range(spec.r)]
    return sorted(sum(x * w for x, w in zip(xs, weights)) for xs in product(range(spec.M), repeat=spec.r))


def cube_point(spec, b):
    """Coordinates of an embedded integer (inverse of the embedding)."""
    out = []
    for _ in range(spec.r):
        b, d = divmod(b, spec.base)
        out.append(d)
    return tuple(out)


def cube_set(spec, elements=None):
    """A subset of the embedded cube as a ResidueSet modulo (2M)^r.

    Sums and differences of embedded points never wrap modulo (2M)^r, so set
    statistics of the result equal those of the preimage in Z^r.
    """
    if elements is None:
        elements = cube_embed(spec)
    return ResidueSet(spec.span, tuple(elements))


def translate_anchor(spec):
    """b0 = sum_j (M-1)(2M)^(j-1); b0 - B stays inside the embedded cube."""
    return sum((spec.M - 1) * spec.base**j for j in range(spec.r))


# -- the tau exponent ------------------------------------------------------------

TAU_BRANCH_LOG2M = 50


def _tau_residual(tau, M):
    # (1/M)^(2 tau) + ((M-1)/M)^tau - 1, written to stay accurate for large M
    return math.exp(-2.0 * tau * math.log(M)) + math.expm1(tau * math.log1p(-1.0 / M))


def solve_tau(M):
    """Root tau in (1/2, 1] of (1/M)^(2 tau) + ((M-1)/M)^tau = 1.

    Bisection on [1/2, 1] followed by Newton polishing. Intended for
    M < 2^50; beyond that use :func:`solve_t_asymptotic`.
    """
    if M < 2:
        raise ValueError("M must be at least 2")
    lo, hi = 0.5, 1.0
    # residual is positive at 1/2 and nonpositive at 1
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _tau_residual(mid, M) > 0:
            lo = mid
        else:
            hi = mid
    tau = 0.5 * (lo + hi)
    lm, l1 = math.log(M), math.log1p(-1.0 / M)
    for _ in range(3):
        f = _tau_residual(tau, M)
        df = -2.0 * lm * math.exp(-2.0 * tau * lm) + l1 * math.exp(tau * l1)
        if df == 0:
            break
        step = f / df
        if not lo <= tau - step <= hi:
            break
        tau -= step
    return tau


def solve_t_asymptotic(K, precision_bits=53):
    """t = 2 tau - 1 for M = 2^K, via the fixed point t = log2(2 / (1 + t)) / K.

    Valid for K >= 50, where the dropped terms are O(2^-K). Returns an
    ``mpmath.mpf`` carrying ``precision_bits`` of working precision.
    """
    if K < TAU_BRANCH_LOG2M:
        raise BranchMisuse(f"asymptotic branch needs log2 M >= {TAU_BRANCH_LOG2M}, got {K}")
    with mpmath.workprec(precision_bits + 20):
        K = mpmath.mpf(K)
        t = 1 / K
        tol = mpmath.ldexp(1, -precision_bits - 10)
        for _ in range(200):
            nxt = mpmath.log(2 / (1 + t), 2) / K
            if abs(nxt - t) <= tol * nxt:
                t = nxt
                break
            t = nxt
    with mpmath.workprec(precision_bits):
        return +t


def t_for_log2M(K, precision_bits=53):
    """2 tau - 1 for M = 2^K, choosing the direct or asymptotic branch."""
    if K >= TAU_BRANCH_LOG2M:
        return float(solve_t_asymptotic(K, precision_bits))
    return 2.0 * solve_tau(2.0**K) - 1.0

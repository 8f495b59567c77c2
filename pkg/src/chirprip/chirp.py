"""Chirp vectors u_{a,b}, the index sets 𝒜 and ℬ, and the Gram matrix.

Inner products are linear in the first argument and conjugate-linear in the
second, <u, v> = sum_x u_x conj(v_x). With that convention

    <u_{a1,b1}, u_{a2,b2}> = (1/p) sum_x e_p((a1-a2) x^2 + (b1-b2) x)

and, for a1 != a2, the Gauss-sum closed form holds as written.
"""

import csv
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations_with_replacement, product
from typing import NamedTuple

import numpy as np

from . import numtheory as nt
from .addcomb import CubeSpec, ResidueSet, cube_embed
from .errors import A1InA2, DegenerateA, EmbeddingOverflow, EqualChirpRate, TooLarge

DENSE_LIMIT = 1 << 14
WORK_LIMIT = 10**8


class ChirpIndex(NamedTuple):
    a: int
    b: int


@dataclass(frozen=True)
class ChirpEnsemble:
    """Columns u_{a,b} for an explicit list of (a, b) pairs, a-major order."""

    ctx: nt.PrimeContext
    indices: tuple = field(default=())

    def __post_init__(self):
        p = self.ctx.p
        idx = tuple(ChirpIndex(int(a) % p, int(b) % p) for a, b in self.indices)
        if len(set(idx)) != len(idx):
            raise ValueError("ensemble indices must be distinct")
        object.__setattr__(self, "indices", idx)

    @property
    def p(self):
        return self.ctx.p

    @property
    def shape(self):
        return self.ctx.p, len(self.indices)

    def __len__(self):
        return len(self.indices)

    def subensemble(self, cols):
        return ChirpEnsemble(self.ctx, tuple(self.indices[c] for c in cols))

    def matrix(self):
        """Dense p x N matrix; refused for p > 2^14."""
        if self.p > DENSE_LIMIT:
            raise TooLarge(f"dense matrix refused for p={self.p} > {DENSE_LIMIT}")
        p = self.p
        x = np.arange(p, dtype=np.int64)
        a = np.array([i.a for i in self.indices], dtype=np.int64)
        b = np.array([i.b for i in self.indices], dtype=np.int64)
        phase = (np.outer(x * x % p, a) + np.outer(x, b)) % p
        return nt.e_n_array(phase, p) / math.sqrt(p)

    def gram(self, rows=None, cols=None):
        """Gram block G[i, j] = <u_i, u_j> from the closed form."""
        rows = range(len(self)) if rows is None else rows
        cols = rows if cols is None else cols
        return gram_block(self.ctx, [self.indices[i] for i in rows], [self.indices[j] for j in cols])

    # -- serialization

    def to_json(self):
        return {"p": self.p, "indices": [list(i) for i in self.indices]}

    @classmethod
    def from_json(cls, obj):
        ctx = nt.PrimeContext(int(obj["p"]))
        if "indices" in obj:
            return cls(ctx, tuple(tuple(i) for i in obj["indices"]))
        A = ResidueSet(ctx.p, tuple(obj["A"]))
        B = ResidueSet(ctx.p, tuple(obj["B"]))
        return assemble_ensemble(ctx, A, B)


def chirp_column(ctx, idx):
    """u_{a,b} = (e_p(a x^2 + b x) / sqrt(p))_{x in F_p}."""
    p = ctx.p
    a, b = idx
    phase = [(a * x * x + b * x) % p for x in range(p)]
    return nt.e_n_array(phase, p) / math.sqrt(p)


def gram_entry_direct(ctx, idx1, idx2):
    """<u_{a1,b1}, u_{a2,b2}> by direct summation over F_p."""
    p = ctx.p
    da = (idx1[0] - idx2[0]) % p
    db = (idx1[1] - idx2[1]) % p
    phase = [(da * x * x + db * x) % p for x in range(p)]
    return complex(nt.e_n_array(phase, p).sum() / p)


def gram_entry_closed(ctx, idx1, idx2):
    """(sigma_p / sqrt p) ((a1-a2)/p) e_p(-(b1-b2)^2 / (4 (a1-a2)))."""
    p = ctx.p
    da = (idx1[0] - idx2[0]) % p
    if da == 0:
        raise EqualChirpRate("closed form needs a1 != a2; use the Kronecker delta")
    db = (idx1[1] - idx2[1]) % p
    k = -db * db * nt.mod_inverse(ctx, 4 * da)
    return ctx.sigma_p / math.sqrt(p) * nt.legendre(ctx, da) * nt.e_p(ctx, k)


def gram_entry(ctx, idx1, idx2):
    """Exact Gram entry: Kronecker delta when a1 == a2, closed form otherwise."""
    if (idx1[0] - idx2[0]) % ctx.p == 0:
        return 1.0 + 0j if (idx1[1] - idx2[1]) % ctx.p == 0 else 0j
    return gram_entry_closed(ctx, idx1, idx2)


def gram_block(ctx, left, right):
    """Matrix of gram_entry over two index lists (vectorized for small p)."""
    p = ctx.p
    if p > 1 << 22:
        return np.array([[gram_entry(ctx, u, v) for v in right] for u in left], dtype=complex)
    a1 = np.array([i[0] for i in left], dtype=np.int64)[:, None]
    b1 = np.array([i[1] for i in left], dtype=np.int64)[:, None]
    a2 = np.array([i[0] for i in right], dtype=np.int64)[None, :]
    b2 = np.array([i[1] for i in right], dtype=np.int64)[None, :]
    da = (a1 - a2) % p
    db = (b1 - b2) % p
    inv4 = ctx.inverse_table[(4 * da) % p]
    k = (-(db * db % p) * inv4) % p
    leg = ctx.legendre_table[da].astype(float)
    G = ctx.sigma_p / math.sqrt(p) * leg * nt.e_n_array(k, p)
    return np.where(da == 0, (db == 0).astype(complex), G)


# -- the index sets --------------------------------------------------------------


def integer_root(n, k):
    """floor(n ** (1/k)) for integers, exactly."""
    if n < 0 or k < 1:
        raise ValueError("need n >= 0 and k >= 1")
    if n < 2:
        return n
    x = int(round(n ** (1.0 / k)))
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


@dataclass(frozen=True)
class ASetParams:
    """Parameters of 𝒜 = {x^2 + U x : 1 <= x <= L}.

    L = floor(p^(1/(2m(4m-1)))) and U = L^(4m-1).
    """

    m: int
    p: int
    L: int = field(init=False)
    U: int = field(init=False)

    def __post_init__(self):
        if self.m < 2 or self.m % 2:
            raise ValueError(f"m must be a positive even integer, got {self.m}")
        L = integer_root(self.p, 2 * self.m * (4 * self.m - 1))
        if L < 1:
            raise DegenerateA("p too small: L = 0")
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "U", L ** (4 * self.m - 1))

    @property
    def alpha(self):
        return 1.0 / (2 * self.m * (4 * self.m - 1))


def build_A(params):
    p, L, U = params.p, params.L, params.U
    els = [(x * x + U * x) % p for x in range(1, L + 1)]
    if len(set(els)) != len(els):
        raise DegenerateA(f"x^2 + Ux collides modulo {p}")
    return ResidueSet(p, tuple(els))


def _inverse_weights(p, a, others):
    return {a_j: pow(a - a_j, -1, p) for a_j in others}


def verify_hypothesis_a(A, m, p, max_work=WORK_LIMIT):
    """Check the reciprocal-sum condition on 𝒜 exhaustively.

    For every a in A and a_1..a_2m in A minus {a}: if
    sum_{j<=m} 1/(a - a_j) == sum_{j>m} 1/(a - a_j) in F_p then the two halves
    must be permutations of each other. Since each side only depends on the
    multiset of its m terms, it suffices to group m-multisets by their sum; a
    violation is two different multisets with equal sums.

    Returns ``(True, None)`` or ``(False, (a, left_half, right_half))``.
    """
    if m < 1:
        raise ValueError("m must be positive")
    els = list(A)
    k = max(len(els) - 1, 0)
    work = len(els) * math.comb(k + m - 1, m) if k else 0
    if work > max_work:
        raise TooLarge(f"{work} multisets exceed the budget of {max_work}")
    for a in els:
        others = [e for e in els if e != a]
        w = _inverse_weights(p, a, others)
        seen = {}
        for combo in combinations_with_replacement(others, m):
            s = sum(w[c] for c in combo) % p
            prev = seen.setdefault(s, combo)
            if prev != combo:
                return False, (a, prev, combo)
    return True, None


def verify_hypothesis_a_bruteforce(A, m, p, max_work=WORK_LIMIT):
    """Literal 2m-tuple enumeration of the same condition (small inputs only)."""
    els = list(A)
    work = len(els) * max(len(els) - 1, 0) ** (2 * m)
    if work > max_work:
        raise TooLarge(f"{work} tuples exceed the budget of {max_work}")
    for a in els:
        others = [e for e in els if e != a]
        w = _inverse_weights(p, a, others)
        for tup in product(others, repeat=2 * m):
            lhs = sum(w[t] for t in tup[:m]) % p
            rhs = sum(w[t] for t in tup[m:]) % p
            if lhs == rhs and sorted(tup[:m]) != sorted(tup[m:]):
                return False, (a, tup[:m], tup[m:])
    return True, None


def count_lambda0(A2, a1, m, p, max_work=WORK_LIMIT):
    """Number of m-tuples from A2 whose signed reciprocal sum vanishes.

    Counts (a^(1), ..., a^(m)) with
    sum_{i<=m/2} [1/(a1 - a^(i)) - 1/(a1 - a^(i+m/2))] = 0, i.e. the sum over
    squared multiplicities of the half-sums.
    """
    if m < 2 or m % 2:
        raise ValueError("m must be a positive even integer")
    if a1 % p in {e % p for e in A2}:
        raise A1InA2("a1 must not lie in A2")
    half = m // 2
    if len(A2) ** half > max_work:
        raise TooLarge(f"{len(A2)}^{half} half-tuples exceed the budget")
    w = _inverse_weights(p, a1, list(A2))
    counts = defaultdict(int)
    for tup in product(list(A2), repeat=half):
        counts[sum(w[t] for t in tup) % p] += 1
    return sum(c * c for c in counts.values())


def build_B(p, M, r):
    """Embedded cube {sum_j x_j (2M)^(j-1)} inside F_p; needs (2M)^r <= p."""
    spec = CubeSpec(M, r)
    if spec.span > p:
        raise EmbeddingOverflow(f"(2M)^r = {spec.span} exceeds p = {p}")
    return ResidueSet(p, tuple(cube_embed(spec)))


def assemble_ensemble(ctx, A, B):
    return ChirpEnsemble(ctx, tuple(ChirpIndex(a, b) for a in A for b in B))


def full_family(ctx):
    """All p^2 chirps u_{a,b}, (a, b) in F_p x F_p."""
    r = range(ctx.p)
    return assemble_ensemble(ctx, r, r)


# -- file formats ------------------------------------------------------------------


def write_matrix_csv(path, Phi):
    """One row per measurement, each entry as a "re,im" pair of fields."""
    Phi = np.asarray(Phi)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for row in Phi:
            fields = []
            for z in row:
                fields.extend((repr(float(z.real)), repr(float(z.imag))))
            w.writerow(fields)


def read_matrix_csv(path):
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec:
                continue
            if len(rec) % 2:
                raise ValueError("complex CSV rows need an even number of fields")
            v = np.array([float(f) for f in rec])
            rows.append(v[0::2] + 1j * v[1::2])
    return np.array(rows)


def load_ensemble(path):
    with open(path) as fh:
        return ChirpEnsemble.from_json(json.load(fh))

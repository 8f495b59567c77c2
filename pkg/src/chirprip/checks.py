"""Seeded verification suites, one per family of inequalities.

Each suite returns a plain dict with an ``ok`` flag and the measured
quantities; the CLI serializes these directly and exits 1 when ``ok`` is
false.
"""

import math
from fractions import Fraction
from itertools import combinations, product

import mpmath
import numpy as np

from . import addcomb as ac
from . import chirp
from . import numtheory as nt
from . import rip

REL = 1e-9


def _le(a, b, rel=REL, abs_tol=1e-15):
    """a <= b up to relative slack ``rel`` (plus a floor for exact ties at zero)."""
    return a <= b + rel * max(abs(a), abs(b)) + abs_tol


def random_subset(rng, n, min_size=1, max_size=None):
    max_size = n if max_size is None else min(n, max_size)
    k = int(rng.integers(min_size, max_size + 1))
    return sorted(rng.choice(n, size=k, replace=False).tolist())


# -- number theory / Gram ---------------------------------------------------------


def gram_identity_suite(p, count=10_000, seed=0):
    """Closed form vs direct summation on ``count`` pairs with a1 != a2.

    Also checks the a1 == a2 branch against the Kronecker delta on every
    (b1, b2) for a fixed sampled a.
    """
    ctx = nt.PrimeContext(p)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        a1, b1, b2 = (int(v) for v in rng.integers(0, p, 3))
        a2 = (a1 + int(rng.integers(1, p))) % p
        i1, i2 = (a1, b1), (a2, b2)
        err = abs(chirp.gram_entry_closed(ctx, i1, i2) - chirp.gram_entry_direct(ctx, i1, i2))
        worst = max(worst, err)
    a = int(rng.integers(0, p))
    delta_err = max(
        abs(chirp.gram_entry_direct(ctx, (a, b1), (a, b2)) - (1.0 if b1 == b2 else 0.0))
        for b1 in range(p)
        for b2 in range(p)
    )
    return {
        "p": p,
        "pairs": count,
        "max_closed_vs_direct": worst,
        "max_equal_rate_vs_delta": delta_err,
        "ok": worst < 1e-9 and delta_err < 1e-12,
    }


def coherence_suite(p):
    """Off-diagonal Gram moduli of the full family lie in {0, 1/sqrt p}."""
    ctx = nt.PrimeContext(p)
    ens = chirp.full_family(ctx)
    G = np.abs(ens.gram())
    off = G[~np.eye(len(ens), dtype=bool)]
    target = 1 / math.sqrt(p)
    stray = float(np.minimum(off, np.abs(off - target)).max())
    mu = rip.coherence(ens)
    welch = rip.welch_bound(p, len(ens))
    return {
        "p": p,
        "columns": len(ens),
        "coherence": mu,
        "welch_bound": welch,
        "max_distance_from_{0,1/sqrt(p)}": stray,
        "ok": stray < 1e-10 and mu >= welch - 1e-12,
    }


# -- RIP ----------------------------------------------------------------------------


def ric_suite(ens, Ks=(2, 3, 4), s=2):
    mu = rip.coherence(ens)
    deltas = {}
    for K in sorted(set(Ks) | {s * K for K in Ks}):
        if K <= len(ens) and K <= rip.MAX_K:
            deltas[K] = rip.ric_exhaustive(ens, K).delta_K
    rows = []
    ok = True
    if 2 in deltas:
        d2_ok = abs(deltas[2] - mu) < 1e-10
        ok &= d2_ok
        rows.append({"check": "delta_2 == mu", "lhs": deltas[2], "rhs": mu, "ok": d2_ok})
    for K in sorted(deltas):
        g = deltas[K] <= (K - 1) * mu + 1e-9
        ok &= g
        rows.append({"check": f"gershgorin K={K}", "lhs": deltas[K], "rhs": (K - 1) * mu, "ok": g})
    ks = sorted(deltas)
    for a, b in zip(ks, ks[1:]):
        mono = deltas[a] <= deltas[b] + 1e-10
        ok &= mono
        rows.append({"check": f"monotone {a}->{b}", "lhs": deltas[a], "rhs": deltas[b], "ok": mono})
    for K in Ks:
        if K in deltas and s * K in deltas:
            sc = deltas[s * K] <= 2 * s * deltas[K] + 1e-9
            ok &= sc
            rows.append({"check": f"scaling s={s} K={K}", "lhs": deltas[s * K], "rhs": 2 * s * deltas[K], "ok": sc})
    return {"columns": len(ens), "coherence": mu, "deltas": deltas, "checks": rows, "ok": bool(ok)}


def flat_suite(ens, Ks=(2, 3, 4)):
    mu = rip.coherence(ens)
    rows = []
    ok = True
    for K in Ks:
        rep = rip.flat_rip_exhaustive(ens, K)
        delta = rip.ric_exhaustive(ens, K).delta_K
        applies = mu * K <= 1
        lb = (not applies) or rep.theta <= math.sqrt(rep.theta_prime) + 1e-9
        la = delta <= 150 * rep.theta * math.log(K) + 1e-9
        la75 = delta <= 75 * rep.theta * math.log(K) + 1e-9
        ok &= lb and la
        rows.append({
            "K": K,
            "theta": rep.theta,
            "theta_prime": rep.theta_prime,
            "delta_K": delta,
            "lemma_b_applies": applies,
            "lemma_b_ok": lb,
            "lemma_a_150_ok": la,
            "lemma_a_75_ok": la75,
        })
    return {"columns": len(ens), "coherence": mu, "rows": rows, "ok": bool(ok)}


# -- additive combinatorics ------------------------------------------------------------


def set_statistics(A):
    n, k = A.modulus, len(A)
    ss, ds = ac.sumset(A, A), ac.difference_set(A, A)
    E = ac.additive_energy(A)
    bias = ac.fourier_bias(A)
    mid = (Fraction(E) - Fraction(k**4, n)) / n**3
    return {
        "modulus": n,
        "size": k,
        "sumset": len(ss),
        "difference_set": len(ds),
        "energy": E,
        "energy_lower": k**4 / n,
        "energy_upper": k**3,
        "fourier_bias": bias,
        "bias_sandwich": [bias**4, float(mid), k / n * bias**2],
        "coset": ac.is_coset(A),
    }


def addcomb_suite(count=500, seed=0, nmax=64):
    """Sumset, energy and Fourier-bias inequalities on random subsets of Z/nZ."""
    rng = np.random.default_rng(seed)
    fails = []
    for trial in range(count):
        n = int(rng.integers(1, nmax + 1))
        A = ac.ResidueSet(n, tuple(random_subset(rng, n)))
        st = set_statistics(A)
        k = st["size"]
        lo, mid, hi = st["bias_sandwich"]
        conds = {
            "|A+A|>=|A|": st["sumset"] >= k,
            "|A-A|>=|A|": st["difference_set"] >= k,
            "E<=|A|^3": st["energy"] <= k**3,
            "E>=|A|^4/n": st["energy"] * n >= k**4,
            "bias^4<=mid": _le(lo, mid),
            "mid<=|A|/n bias^2": _le(mid, hi),
            "|A+A|<=|A-A|^2/|A|": st["sumset"] * k <= st["difference_set"] ** 2,
        }
        bad = [c for c, v in conds.items() if not v]
        if bad:
            fails.append({"trial": trial, "set": list(A), "modulus": n, "failed": bad})
    return {"count": count, "seed": seed, "nmax": nmax, "failures": fails, "ok": not fails}


def coset_scan(n=12):
    """Over every nonempty subset of Z/nZ, equality in the three bounds iff coset."""
    mismatches = []
    total = 0
    for mask in range(1, 1 << n):
        A = ac.ResidueSet(n, tuple(i for i in range(n) if mask >> i & 1))
        k = len(A)
        eq = (
            len(ac.sumset(A, A)) == k,
            len(ac.difference_set(A, A)) == k,
            ac.additive_energy(A) == k**3,
        )
        coset = ac.is_coset(A)
        total += 1
        if any(e != coset for e in eq):
            mismatches.append({"set": list(A), "equalities": eq, "coset": coset})
    return {"n": n, "subsets": total, "mismatches": mismatches, "ok": not mismatches}


def bias_suite(count=200, seed=0, nmax=256):
    rng = np.random.default_rng(seed)
    fails = []
    for trial in range(count):
        n = int(rng.integers(1, nmax + 1))
        A = ac.ResidueSet(n, tuple(random_subset(rng, n)))
        lo, mid, hi = set_statistics(A)["bias_sandwich"]
        if not (_le(lo, mid) and _le(mid, hi)):
            fails.append({"trial": trial, "modulus": n, "sandwich": [lo, mid, hi]})
    return {"count": count, "seed": seed, "nmax": nmax, "failures": fails, "ok": not fails}


def _tuple_stats(C):
    """|C+C|, |C-C| and E(C, C) for coordinate tuples in Z^r, by brute force."""
    sums = {tuple(x + y for x, y in zip(u, v)) for u in C for v in C}
    diffs = {tuple(x - y for x, y in zip(u, v)) for u in C for v in C}
    lam = {}
    for u in C:
        for v in C:
            d = tuple(x - y for x, y in zip(u, v))
            lam[d] = lam.get(d, 0) + 1
    return len(sums), len(diffs), sum(c * c for c in lam.values())


def cube_suite(count=200, seed=0):
    """Freiman fidelity of the embedding, the sumset exponent, and the translate trick."""
    rng = np.random.default_rng(seed)
    fidelity_fail, sumexp_fail, translate_fail = [], [], []
    sumexp_trials = 0
    for M, r in product((2, 3), (1, 2, 3)):
        spec = ac.CubeSpec(M, r)
        p = nt.next_prime(spec.span)
        B_all = chirp.build_B(p, M, r)
        pts = list(product(range(M), repeat=r))
        # Freiman fidelity on random coordinate subsets
        for _ in range(10):
            sub = [pts[i] for i in random_subset(rng, len(pts))]
            emb = ac.ResidueSet(p, tuple(sum(x * spec.base**j for j, x in enumerate(c)) for c in sub))
            got = (len(ac.sumset(emb, emb)), len(ac.difference_set(emb, emb)), ac.additive_energy(emb))
            if got != _tuple_stats(sub):
                fidelity_fail.append({"M": M, "r": r, "subset": sub})
        # translate trick: b0 - B stays in the embedded cube
        b0 = ac.translate_anchor(spec)
        full = set(B_all)
        if {(b0 - b) % p for b in B_all} != full:
            translate_fail.append({"M": M, "r": r})
        if r < 2:
            continue
        tau = ac.solve_tau(M)
        cube = ac.cube_set(spec)
        els = list(cube)
        for _ in range(count // 4):
            A = ac.ResidueSet(cube.modulus, tuple(els[i] for i in random_subset(rng, len(els))))
            B = ac.ResidueSet(cube.modulus, tuple(els[i] for i in random_subset(rng, len(els))))
            lhs = len(ac.sumset(A, B))
            with mpmath.workdps(50):
                rhs = mpmath.power(len(A) * len(B), mpmath.mpf(tau))
                ok = lhs >= rhs or (len(A) * len(B) == 1 and lhs == 1)
            sumexp_trials += 1
            if not ok:
                sumexp_fail.append({"M": M, "r": r, "A": list(A), "B": list(B)})
    tau2 = ac.solve_tau(2)
    tau2_exact = -math.log2((math.sqrt(5) - 1) / 2)
    t_direct = 2 * ac.solve_tau(2.0**50) - 1
    t_asym = float(ac.solve_t_asymptotic(50))
    branch_rel = abs(t_direct - t_asym) / t_asym
    ok = (
        not fidelity_fail and not sumexp_fail and not translate_fail
        and abs(tau2 - tau2_exact) < 1e-6 and branch_rel < 1e-6
    )
    return {
        "seed": seed,
        "sumset_exponent_trials": sumexp_trials,
        "fidelity_failures": fidelity_fail,
        "sumset_exponent_failures": sumexp_fail,
        "translate_failures": translate_fail,
        "tau_2": tau2,
        "tau_2_closed_form": tau2_exact,
        "t_direct_at_2^50": t_direct,
        "t_asymptotic_at_2^50": t_asym,
        "branch_relative_difference": branch_rel,
        "ok": bool(ok),
    }


# -- quadratic sums, 𝒜, and the cancellation sums ------------------------------------------


def lemma9_suite(p, count=500, seed=0):
    ctx = nt.PrimeContext(p)
    rng = np.random.default_rng(seed)
    worst_ratio = 0.0
    fails = []
    for trial in range(count):
        theta = int(rng.integers(1, p))
        B1 = random_subset(rng, p, max_size=min(p, 40))
        B2 = random_subset(rng, p, max_size=min(p, 40))
        lhs, rhs = rip.lemma9_sides(ctx, theta, B1, B2)
        worst_ratio = max(worst_ratio, lhs / rhs)
        if not lhs <= rhs * (1 + REL):
            fails.append({"trial": trial, "theta": theta, "B1": B1, "B2": B2, "lhs": lhs, "rhs": rhs})
    return {"p": p, "count": count, "seed": seed, "max_ratio": worst_ratio, "failures": fails, "ok": not fails}


def hypothesis_a_suite(m=2, p=None):
    if p is None:
        p = nt.next_prime(3 ** (2 * m * (4 * m - 1)))
    params = chirp.ASetParams(m, p)
    A = chirp.build_A(params)
    holds, witness = chirp.verify_hypothesis_a(A, m, p)
    lam = []
    for a1 in A:
        A2 = ac.ResidueSet(p, tuple(e for e in A if e != a1))
        got = chirp.count_lambda0(A2, a1, m, p)
        expected = math.factorial(m // 2) * len(A2) ** (m // 2)
        lam.append({"a1": a1, "A2": list(A2), "lambda0": got, "expected": expected, "ok": got == expected})
    return {
        "m": m,
        "p": p,
        "L": params.L,
        "U": params.U,
        "A": list(A),
        "alpha": params.alpha,
        "size_bound_p^alpha": p**params.alpha,
        "hypothesis_a": holds,
        "counterexample": witness,
        "lambda0": lam,
        "ok": bool(holds and all(r["ok"] for r in lam)),
    }


def random_omegas(rng, p, n1, n2, max_b=4):
    """Disjoint A1, A2 of sizes n1, n2 with random nonempty b-sets."""
    a = rng.choice(p, size=n1 + n2, replace=False).tolist()
    A1, A2 = a[:n1], a[n1:]

    def bsets(As):
        return {x: random_subset(rng, p, max_size=max_b) for x in As}

    return A1, A2, bsets(A1), bsets(A2)


def sums_suite(p, count=50, seed=0):
    """|<sum u, sum u>| == |S| / sqrt(p), and the quadratic-sum bound on the inner sums of T."""
    ctx = nt.PrimeContext(p)
    rng = np.random.default_rng(seed)
    worst = 0.0
    lemma9_fail = []
    for trial in range(count):
        n1 = int(rng.integers(1, max(2, p // 3)))
        n2 = int(rng.integers(1, max(2, p // 3)))
        A1, A2, om1, om2 = random_omegas(rng, p, n1, n2)
        S = rip.sum_S(ctx, A1, A2, om1, om2)
        inner = rip.column_sum_inner(ctx, om1, om2)
        worst = max(worst, abs(abs(inner) - abs(S) / math.sqrt(p)))
        a1 = A1[0]
        for a2 in A2:
            theta = pow(4 * (a1 - a2), -1, p)
            lhs, rhs = rip.lemma9_sides(ctx, theta, om1[a1], om2[a2])
            inner_T = abs(rip.sum_T(ctx, a1, [a2], om1[a1], om2))
            if abs(inner_T - lhs) > 1e-9 or lhs > rhs * (1 + REL):
                lemma9_fail.append({"trial": trial, "a1": a1, "a2": a2})
    return {
        "p": p,
        "count": count,
        "seed": seed,
        "max_identity_error": worst,
        "lemma9_failures": lemma9_fail,
        "ok": worst < 1e-9 and not lemma9_fail,
    }


def sub_ensemble(p, columns, seed):
    """Seeded random selection of ``columns`` chirps from the full family at p."""
    ctx = nt.PrimeContext(p)
    rng = np.random.default_rng(seed)
    full = chirp.full_family(ctx)
    cols = sorted(rng.choice(len(full), size=min(columns, len(full)), replace=False).tolist())
    return full.subensemble(cols)

import math
from collections import Counter
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chirprip import addcomb as ac
from chirprip.errors import BranchMisuse, EmptySet, ModulusMismatch, Overflow


def energy_bruteforce(A, B):
    n = A.modulus
    return sum(1 for a1, a2, b1, b2 in product(A, A, B, B) if (a1 + b1 - a2 - b2) % n == 0)


def dft_bias(A):
    n = A.modulus
    best = 0.0
    for theta in range(1, n):
        c = sum(complex(math.cos(-2 * math.pi * theta * a / n), math.sin(-2 * math.pi * theta * a / n)) for a in A)
        best = max(best, abs(c) / n)
    return best


@st.composite
def residue_sets(draw, nmax=40, min_size=1):
    n = draw(st.integers(1, nmax))
    els = draw(st.lists(st.integers(0, n - 1), min_size=min_size, max_size=n))
    return ac.ResidueSet(n, tuple(els))


def test_residue_set_normalizes():
    A = ac.ResidueSet(7, (9, 2, -5, 3))
    assert A.elements == (2, 3)
    assert 16 in A and 4 not in A
    assert A.translate(5).elements == (0, 1)
    assert A.negate().elements == (4, 5)
    assert A.dilate(3).elements == (2, 6)
    assert ac.ResidueSet.of([1, 2], 5) == ac.ResidueSet(5, (2, 1))


def test_small_examples():
    A = ac.ResidueSet(10, (0, 1, 3))
    assert ac.sumset(A, A).elements == (0, 1, 2, 3, 4, 6)
    assert ac.difference_set(A, A).elements == (0, 1, 2, 3, 7, 8, 9)
    assert ac.difference_counts(A) == {0: 3, 1: 1, 2: 1, 3: 1, 7: 1, 8: 1, 9: 1}
    assert ac.additive_energy(A) == 9 + 6


def test_modulus_mismatch():
    with pytest.raises(ModulusMismatch):
        ac.sumset(ac.ResidueSet(5, (1,)), ac.ResidueSet(6, (1,)))


def test_empty_sets():
    E = ac.ResidueSet(5, ())
    assert len(ac.sumset(E, ac.ResidueSet(5, (1,)))) == 0
    assert ac.additive_energy(E) == 0
    with pytest.raises(EmptySet):
        ac.fourier_bias(E)
    assert not ac.is_coset(E)


def test_bias_of_full_group_and_trivial_modulus():
    assert ac.fourier_bias(ac.ResidueSet(9, tuple(range(9)))) < 1e-12
    assert ac.fourier_bias(ac.ResidueSet(1, (0,))) == 0.0


@settings(max_examples=150, deadline=None)
@given(residue_sets(nmax=20), st.data())
def test_energy_matches_quadruple_count(A, data):
    els = data.draw(st.lists(st.integers(0, A.modulus - 1), max_size=A.modulus))
    B = ac.ResidueSet(A.modulus, tuple(els))
    assert ac.additive_energy(A, B) == energy_bruteforce(A, B)
    assert ac.additive_energy(A) == energy_bruteforce(A, A)


@settings(max_examples=150, deadline=None)
@given(residue_sets(nmax=40))
def test_set_inequalities(A):
    n, k = A.modulus, len(A)
    S, D = ac.sumset(A, A), ac.difference_set(A, A)
    E = ac.additive_energy(A)
    assert len(S) >= k and len(D) >= k
    assert k**4 <= E * n and E <= k**3
    assert len(S) * k <= len(D) ** 2
    rep = ac.energy_report(A)
    assert rep.energy == E and rep.upper_bound == k**3


@settings(max_examples=100, deadline=None)
@given(residue_sets(nmax=40))
def test_bias_matches_dft_and_sandwich(A):
    n, k = A.modulus, len(A)
    b = ac.fourier_bias(A)
    assert b == pytest.approx(dft_bias(A), abs=1e-12)
    mid = (ac.additive_energy(A) - k**4 / n) / n**3
    tol = 1e-9 * max(1.0, k / n)
    assert b**4 <= mid + tol
    assert mid <= k / n * b**2 + tol


def test_parseval():
    rng = np.random.default_rng(3)
    A = ac.ResidueSet(50, tuple(rng.choice(50, 17, replace=False).tolist()))
    c = ac.fourier_coefficients(A)
    assert np.sum(np.abs(c) ** 2) == pytest.approx(17 / 50)


def is_coset_bruteforce(A):
    n = A.modulus
    for g in range(1, n + 1):
        if n % g:
            continue
        H = set(range(0, n, g))
        for t in range(n):
            if {(h + t) % n for h in H} == set(A):
                return True
    return False


def test_is_coset_exhaustive_z12():
    n = 12
    for mask in range(1, 1 << n):
        A = ac.ResidueSet(n, tuple(i for i in range(n) if mask >> i & 1))
        assert ac.is_coset(A) == is_coset_bruteforce(A)
        # equality |A - A| = |A| happens exactly on cosets
        assert (len(ac.difference_set(A, A)) == len(A)) == ac.is_coset(A)


# -- cube and embedding -------------------------------------------------------------


def test_cube_embedding_small():
    spec = ac.CubeSpec(3, 2)
    assert spec.base == 6 and spec.span == 36
    assert ac.cube_embed(spec) == [0, 1, 2, 6, 7, 8, 12, 13, 14]
    assert ac.cube_point(spec, 13) == (1, 2)
    assert ac.translate_anchor(spec) == 14


@pytest.mark.parametrize("M,r", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3)])
def test_embedding_is_freiman(M, r):
    spec = ac.CubeSpec(M, r)
    pts = list(product(range(M), repeat=r))
    emb = ac.cube_embed(spec)
    assert len(set(emb)) == len(pts)
    sums_int = Counter(tuple(a + b for a, b in zip(x, y)) for x in pts for y in pts)
    sums_emb = Counter(a + b for a in emb for b in emb)
    assert sorted(sums_int.values()) == sorted(sums_emb.values())
    C = ac.cube_set(spec)
    assert len(ac.sumset(C, C)) == (2 * M - 1) ** r


def test_cube_overflow():
    with pytest.raises(Overflow):
        ac.cube_embed(ac.CubeSpec(2**20, 4))
    with pytest.raises(ValueError):
        ac.CubeSpec(1, 3)


def test_tau_closed_form_at_two():
    # M = 2: u = 2^-tau solves u^2 + u = 1
    u = (math.sqrt(5) - 1) / 2
    assert ac.solve_tau(2) == pytest.approx(-math.log2(u), abs=1e-12)
    assert ac.solve_tau(2) == pytest.approx(0.6942419, abs=1e-6)


@pytest.mark.parametrize("M", [2, 3, 10, 1000, 2**20, 2**40])
def test_tau_residual_small(M):
    tau = ac.solve_tau(M)
    assert 0.5 < tau <= 1
    assert abs(ac._tau_residual(tau, M)) < 1e-12


def test_tau_decreases_in_M():
    taus = [ac.solve_tau(M) for M in (2, 3, 5, 100, 10**6)]
    assert taus == sorted(taus, reverse=True)


def test_branches_agree_at_threshold():
    direct = 2 * ac.solve_tau(2.0**50) - 1
    asym = float(ac.solve_t_asymptotic(50))
    assert abs(direct - asym) / asym < 1e-6
    assert ac.t_for_log2M(50) == pytest.approx(asym)
    assert ac.t_for_log2M(27) == pytest.approx(2 * ac.solve_tau(2**27) - 1)


def test_asymptotic_branch_guard():
    with pytest.raises(BranchMisuse):
        ac.solve_t_asymptotic(49)


def test_asymptotic_fixed_point():
    import mpmath

    K = 10**6
    t = ac.solve_t_asymptotic(K, precision_bits=200)
    with mpmath.workprec(200):
        assert abs(t - mpmath.log(2 / (1 + t), 2) / K) < mpmath.mpf(2) ** -180

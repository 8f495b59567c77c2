import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chirprip import chirp
from chirprip import numtheory as nt
from chirprip.addcomb import ResidueSet
from chirprip.errors import A1InA2, DegenerateA, EmbeddingOverflow, EqualChirpRate, TooLarge


def test_columns_are_unit_norm(ctx13):
    for idx in [(0, 0), (3, 7), (12, 12)]:
        u = chirp.chirp_column(ctx13, idx)
        assert np.linalg.norm(u) == pytest.approx(1.0)


def test_direct_matches_vector_inner_product(ctx13):
    u, v = chirp.chirp_column(ctx13, (2, 5)), chirp.chirp_column(ctx13, (7, 1))
    assert chirp.gram_entry_direct(ctx13, (2, 5), (7, 1)) == pytest.approx(np.vdot(v, u))


@settings(max_examples=300, deadline=None)
@given(st.sampled_from([5, 7, 11, 13, 17, 19, 23]), st.data())
def test_closed_form_matches_direct(p, data):
    ctx = nt.PrimeContext(p)
    a1, a2, b1, b2 = (data.draw(st.integers(0, p - 1)) for _ in range(4))
    if a1 == a2:
        with pytest.raises(EqualChirpRate):
            chirp.gram_entry_closed(ctx, (a1, b1), (a2, b2))
        assert abs(chirp.gram_entry_direct(ctx, (a1, b1), (a2, b2)) - (b1 == b2)) < 1e-12
    else:
        closed = chirp.gram_entry_closed(ctx, (a1, b1), (a2, b2))
        assert abs(closed - chirp.gram_entry_direct(ctx, (a1, b1), (a2, b2))) < 1e-9


@pytest.mark.parametrize("p", [5, 7, 13])
def test_gram_block_matches_dense_matrix(p):
    ens = chirp.full_family(nt.PrimeContext(p))
    Phi = ens.matrix()
    G_dense = Phi.T @ Phi.conj()
    assert np.abs(ens.gram() - G_dense).max() < 1e-12
    assert np.allclose(np.diag(ens.gram()), 1)


def test_gram_block_large_p_fallback():
    ctx = nt.PrimeContext(nt.next_prime((1 << 22) + 1))
    idx = [(1, 2), (5, 9), (5, 10)]
    G = chirp.gram_block(ctx, idx, idx)
    assert G[1, 2] == 0 and G[0, 0] == 1
    assert abs(abs(G[0, 1]) - 1 / math.sqrt(ctx.p)) < 1e-12


def test_ensemble_validation(ctx7):
    with pytest.raises(ValueError):
        chirp.ChirpEnsemble(ctx7, ((1, 2), (8, 9)))
    big = chirp.ChirpEnsemble(nt.PrimeContext(nt.next_prime(1 << 15)), ((0, 0),))
    with pytest.raises(TooLarge):
        big.matrix()


def test_ensemble_json_roundtrip(ctx7):
    ens = chirp.ChirpEnsemble(ctx7, ((1, 2), (3, 4), (0, 6)))
    back = chirp.ChirpEnsemble.from_json(json.loads(json.dumps(ens.to_json())))
    assert back == ens
    via_sets = chirp.ChirpEnsemble.from_json({"p": 7, "A": [1, 2], "B": [0, 3]})
    assert via_sets.indices == ((1, 0), (1, 3), (2, 0), (2, 3))


def test_integer_root():
    assert chirp.integer_root(3**28, 28) == 3
    assert chirp.integer_root(3**28 - 1, 28) == 2
    assert chirp.integer_root(10**40, 2) == 10**20
    assert chirp.integer_root(1, 5) == 1


def test_build_A_m2():
    p = nt.next_prime(3**28)
    params = chirp.ASetParams(2, p)
    assert (params.L, params.U) == (3, 2187)
    A = chirp.build_A(params)
    assert A.elements == (2188, 4378, 6570)


def test_A_params_validation():
    with pytest.raises(ValueError):
        chirp.ASetParams(3, 101)
    with pytest.raises(DegenerateA):
        chirp.ASetParams(2, 0)


def test_hypothesis_a_multiset_matches_bruteforce():
    p = nt.next_prime(3**28)
    A = chirp.build_A(chirp.ASetParams(2, p))
    assert chirp.verify_hypothesis_a(A, 2, p) == (True, None)
    assert chirp.verify_hypothesis_a_bruteforce(A, 2, p) == (True, None)


def test_hypothesis_a_detects_violation():
    # in F_7, 1/(0-1) + 1/(0-6) = -1 + 1 = 0 = 1/(0-2) + 1/(0-5)
    p = 7
    A = ResidueSet(p, (0, 1, 2, 5, 6))
    ok, cex = chirp.verify_hypothesis_a(A, 2, p)
    assert not ok
    ok2, cex2 = chirp.verify_hypothesis_a_bruteforce(A, 2, p)
    assert not ok2
    a, left, right = cex
    w = lambda t: sum(pow(a - x, -1, p) for x in t) % p
    assert w(left) == w(right) and sorted(left) != sorted(right)


def test_count_lambda0():
    p = nt.next_prime(3**28)
    A = list(chirp.build_A(chirp.ASetParams(2, p)))
    for a1 in A:
        A2 = [a for a in A if a != a1]
        assert chirp.count_lambda0(A2, a1, 2, p) == len(A2)
    with pytest.raises(A1InA2):
        chirp.count_lambda0(A, A[0], 2, p)


def test_build_B():
    B = chirp.build_B(101, 3, 2)
    assert B.elements == (0, 1, 2, 6, 7, 8, 12, 13, 14)
    with pytest.raises(EmbeddingOverflow):
        chirp.build_B(13, 2, 2)


def test_matrix_csv_roundtrip(tmp_path, ctx7):
    ens = chirp.ChirpEnsemble(ctx7, ((1, 2), (3, 4)))
    path = tmp_path / "m.csv"
    chirp.write_matrix_csv(path, ens.matrix())
    assert np.array_equal(chirp.read_matrix_csv(path), ens.matrix())
    js = tmp_path / "e.json"
    js.write_text(json.dumps(ens.to_json()))
    assert chirp.load_ensemble(js) == ens

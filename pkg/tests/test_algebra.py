from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nilweyl import algebra as A
from nilweyl.errors import InvalidParameter, NoSolution

fracs = st.fractions(min_value=-5, max_value=5, max_denominator=12)


def matmul(P, Q):
    n, m, r = len(P), len(Q), len(Q[0])
    return [[sum((P[i][l] * Q[l][j] for l in range(m)), F(0)) for j in range(r)] for i in range(n)]


def mat_exp_nilpotent(M):
    """exp(M) for nilpotent M by the terminating power series."""
    n = len(M)
    out = [[F(int(i == j)) for j in range(n)] for i in range(n)]
    term = [row[:] for row in out]
    for j in range(1, n + 1):
        term = [[v / j for v in row] for row in matmul(term, M)]
        out = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(out, term)]
    return out


def test_filiform_k3_json():
    assert A.filiform(3).to_json() == {
        "k": 3,
        "brackets": [{"lhs": "X", "rhs": "Y1", "out": {"Y2": 1}}, {"lhs": "X", "rhs": "Y2", "out": {"Y3": 1}}],
    }


def test_filiform_k2_single_bracket():
    alg = A.filiform(2)
    assert alg.dim == 3
    assert alg.basis_bracket(0, 1) == {2: 1}
    assert alg.basis_bracket(1, 0) == {2: -1}
    assert alg.basis_bracket(1, 2) == {}


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
def test_jacobi_all_bases(k):
    assert A.filiform(k).jacobi_residual() == 0
    assert A.eta_algebra(k).jacobi_residual() == 0
    assert A.quasi_abelian(k).algebra.jacobi_residual() == 0


@pytest.mark.parametrize("bad", [1, 0, -3, 65, 2.0, True, "3"])
def test_bad_step(bad):
    with pytest.raises(InvalidParameter):
        A.filiform(bad)


def test_theta():
    assert [A.theta(m) for m in range(1, 5)] == [1, F(-1, 2), F(1, 3), F(-1, 4)]
    with pytest.raises(InvalidParameter):
        A.theta(0)


def test_vergne_k3_frozen():
    # Y1 = eta1, Y2 = eta2 - eta3/2, Y3 = eta3 (hand computation with theta)
    assert A.vergne_matrix(3) == ((1, 0, 0), (0, 1, F(-1, 2)), (0, 0, 1))


@pytest.mark.parametrize("k", range(2, 9))
def test_check_vergne(k):
    assert A.check_vergne(k)


@pytest.mark.parametrize("k", [3, 5])
def test_vergne_is_unipotent(k):
    S = A.vergne_matrix(k)
    assert all(S[i][i] == 1 for i in range(k))
    assert all(S[i][j] == 0 for i in range(k) for j in range(i))


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_ad_exp_matches_series(k):
    alg = A.filiform(k)
    X = alg.unit(0)
    for t in (F(1), F(-3, 2), F(2, 7)):
        adX = alg.ad_matrix(X)
        want = mat_exp_nilpotent([[t * v for v in row] for row in adX])
        assert A.ad_exp_matrix(k, t) == want


@given(fracs, fracs, st.lists(fracs, min_size=5, max_size=5))
def test_ad_exp_group_law(t, s, v):
    alg = A.filiform(4)
    assert A.ad_exp(alg, t + s, v) == A.ad_exp(alg, t, A.ad_exp(alg, s, v))


@given(fracs, st.lists(fracs, min_size=4, max_size=4), st.lists(fracs, min_size=4, max_size=4))
def test_ad_exp_is_automorphism(t, u, v):
    alg = A.filiform(3)
    lhs = A.ad_exp(alg, t, alg.bracket(u, v))
    rhs = alg.bracket(A.ad_exp(alg, t, u), A.ad_exp(alg, t, v))
    assert lhs == rhs


@given(st.integers(-6, 6), st.integers(-6, 6), st.lists(st.integers(-9, 9), min_size=4, max_size=4))
def test_h_map_group_law_and_integrality(t, s, v):
    once = A.h_map(4, t + s, v)
    twice = A.h_map(4, t, A.h_map(4, s, v))
    assert once == twice
    assert all(F(x).denominator == 1 for x in once)


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_h_map_is_ad_exp_in_eta_coordinates(k):
    # A vector with eta coordinates s is sum_i s_i eta_i; in the Y basis it is s S^-1.
    # Ad(exp tX) on the Y part, written back in eta coordinates, must be h_t.
    S = [list(r) for r in A.vergne_matrix(k)]
    Sinv = _exact_inverse_unipotent(S)
    for t in (F(1), F(-2), F(3, 5)):
        M = A.ad_exp_matrix(k, t)
        for idx in range(k):
            s = [F(int(i == idx)) for i in range(k)]
            y = [sum((s[j] * Sinv[j][i] for j in range(k)), F(0)) for i in range(k)]
            full = [F(0)] + y
            img = [sum((M[r][c] * full[c] for c in range(k + 1)), F(0)) for r in range(k + 1)][1:]
            back = [sum((img[i] * S[i][j] for i in range(k)), F(0)) for j in range(k)]
            assert tuple(back) == A.h_map(k, t, s)


def _exact_inverse_unipotent(S):
    """Solve S X = I by back substitution (S upper unipotent)."""
    n = len(S)
    X = [[F(0)] * n for _ in range(n)]
    for j in range(n):
        for i in range(n - 1, -1, -1):
            X[i][j] = F(int(i == j)) - sum((S[i][l] * X[l][j] for l in range(i + 1, n)), F(0))
    return X


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
def test_quasi_abelian(k):
    qa = A.quasi_abelian(k)
    assert qa.algebra.dim == 1 + k * (k + 1) // 2
    assert qa.verify_quotient()
    # basis ordered by j, then i
    assert list(qa.index) == sorted(qa.index, key=lambda p: (p[1], p[0]))
    assert qa.project(qa.algebra.unit(qa.position(1, k))) == A.filiform(k).unit(k)


def test_quasi_abelian_k2_basis():
    qa = A.quasi_abelian(2)
    assert qa.index == ((1, 1), (2, 1), (1, 2))
    assert qa.algebra.names == ("X", "Y1,1", "Y2,1", "Y1,2")


def test_x_alpha():
    alg = A.filiform(3)
    assert A.x_alpha(alg, (F(1, 2), 0, 3)) == [-1, F(1, 2), 0, 3]
    with pytest.raises(InvalidParameter):
        A.x_alpha(alg, (1, 2))


@given(fracs, st.lists(fracs, min_size=3, max_size=3), st.lists(fracs, min_size=3, max_size=3))
def test_conjugating_element_solves_equation(a1, ra, rb):
    alg = A.filiform(4)
    alpha, beta = [a1] + ra, [a1] + rb
    Y = A.conjugating_element(alg, alpha, beta)
    assert Y[-1] == 0
    lhs = alg.bracket(alg.unit(0), [F(0)] + Y)
    rhs = [p - q for p, q in zip(A.x_alpha(alg, beta), A.x_alpha(alg, alpha))]
    assert lhs == rhs


def test_conjugating_element_needs_same_leading():
    with pytest.raises(NoSolution):
        A.conjugating_element(A.filiform(3), (1, 0, 0), (2, 0, 0))


def test_conjugating_element_example():
    Y = A.conjugating_element(A.filiform(3), (F(1, 3), F(1, 2), F(1, 5)), (F(1, 3), 0, 0))
    assert Y == [F(-1, 2), F(-1, 5), 0]

import itertools
import math
from fractions import Fraction as F

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nilweyl import diophantine as Di
from nilweyl import lattice as L
from nilweyl.errors import InvalidParameter, ResourceExceeded

mpmath.mp.dps = 60
GOLDEN = Di.golden_ratio(60)


def brute_shortest(M):
    """Search every coefficient vector allowed by |c_i| <= |row i of M^-1| * lambda_1."""
    n = M.shape[0]
    lam = np.linalg.norm(M, axis=0).min()
    box = int(np.ceil(np.linalg.norm(np.linalg.inv(M), axis=1).max() * lam))
    if (2 * box + 1) ** n > 300_000:
        return None, box
    grid = np.array(list(itertools.product(range(-box, box + 1), repeat=n)), dtype=float)
    grid = grid[np.any(grid != 0, axis=1)]
    return float(np.linalg.norm(grid @ M.T, axis=1).min()), box


def gauss_reduce_mp(u, v):
    """Lagrange-Gauss reduction in high precision; returns the shortest length."""
    def dot(a, b):
        return a[0] * b[0] + a[1] * b[1]
    if dot(u, u) > dot(v, v):
        u, v = v, u
    while True:
        m = mpmath.nint(dot(u, v) / dot(u, u))
        v = (v[0] - m * u[0], v[1] - m * u[1])
        if dot(v, v) >= dot(u, u):
            return mpmath.sqrt(dot(u, u))
        u, v = v, u


def golden_oracle(t):
    """Inj for alpha = (phi, 0), rho = (1, 0): the lattice splits as a plane lattice plus Z."""
    a = mpmath.mpf(GOLDEN.numerator) / GOLDEN.denominator
    em, ep = mpmath.exp(-t), mpmath.exp(t)
    u = (em, a * ep - a * em)  # n0 = 1
    v = (mpmath.mpf(0), ep)  # n1 = 1
    return float(min(gauss_reduce_mp(u, v), 1) / 2)


def exact_det(U):
    M = [[F(int(x)) for x in row] for row in np.asarray(U)]
    n, det = len(M), F(1)
    for c in range(n):
        p = next(r for r in range(c, n) if M[r][c] != 0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return det


def test_scaling_exponents_validation():
    assert L.scaling_exponents((F(2, 3), F(1, 3), 0)).admissible()
    assert not L.scaling_exponents((1, 0, 0)).admissible()
    assert L.scaling_exponents((1, 0)).admissible()
    assert L.scaling_exponents((0.5, 0.3, 0.2)).k == 3
    for bad in [(0.5, 0.4), (1.2, -0.2), (1,)]:
        with pytest.raises(InvalidParameter):
            L.scaling_exponents(bad)


@given(st.floats(-5, 5))
def test_diagonal_flow_unimodular(t):
    D = L.diagonal_flow_matrix((0.5, 0.3, 0.2), t)
    assert abs(np.prod(np.diag(D)) - 1) < 1e-12


@given(st.lists(st.floats(0, 1), min_size=3, max_size=3), st.floats(0, 8))
def test_alpha_basis_has_unit_covolume(alpha, t):
    B = L.alpha_lattice_basis(alpha, (F(2, 3), F(1, 3), 0), t)
    assert abs(B.det() - 1) < 1e-9


def test_alpha_basis_at_zero_is_identity():
    B = L.alpha_lattice_basis((0.3, 0.7), (1, 0), 0.0)
    assert np.array_equal(B.matrix, np.identity(3))
    assert L.injectivity_radius(B) == 0.5


def test_alpha_basis_formula():
    a, t = F(1, 3), 0.7
    B = L.alpha_lattice_basis((a, 0), (1, 0), t)
    col0 = B.matrix[:, 0]
    assert col0[0] == pytest.approx(math.exp(-t))
    assert col0[1] == pytest.approx(float(a) * (math.exp(t) - math.exp(-t)))
    assert col0[2] == 0


def test_zero_alpha_inj():
    for t in (0.5, 2.0, 6.0):
        B = L.alpha_lattice_basis((0, 0), (1, 0), t)
        assert L.injectivity_radius(B) == pytest.approx(math.exp(-t) / 2, rel=1e-12)


def test_alpha_basis_validation():
    with pytest.raises(InvalidParameter):
        L.alpha_lattice_basis((0.1,), (1, 0), 1.0)
    with pytest.raises(InvalidParameter):
        L.alpha_lattice_basis((0.1, 0.2), (1, 0), math.inf)
    with pytest.raises(InvalidParameter):
        L.lattice_basis([[1, 2], [2, 4]])
    with pytest.raises(InvalidParameter):
        L.lattice_basis([[1, 2, 3], [2, 4, 5]])
    with pytest.raises(ResourceExceeded):
        L.lattice_basis(np.identity(13))


def test_svp_matches_brute_force():
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(50):
        n = int(rng.integers(2, 5))
        M = rng.integers(-4, 5, size=(n, n)).astype(float) + rng.random((n, n)) * 0.1
        if abs(np.linalg.det(M)) < 0.5:
            continue
        want, _ = brute_shortest(M)
        if want is None:
            continue
        got = L.shortest_vector(L.lattice_basis(M))
        assert got.length == pytest.approx(want, rel=1e-9)
        assert np.allclose(M @ np.array(got.coeffs, dtype=float), got.vector)
        checked += 1
    assert checked >= 30


@given(st.integers(0, 10**6))
def test_svp_invariant_under_unimodular_change(seed):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(3, 3))
    if abs(np.linalg.det(M)) < 0.1:
        return
    U = np.identity(3, dtype=int)
    for _ in range(4):
        i, j = rng.choice(3, 2, replace=False)
        U[:, i] += int(rng.integers(-2, 3)) * U[:, j]
    a = L.shortest_vector(L.lattice_basis(M)).length
    b = L.shortest_vector(L.lattice_basis(M @ U)).length
    assert a == pytest.approx(b, rel=1e-9)


@given(st.integers(0, 10**6))
def test_lll_output_is_reduced(seed):
    rng = np.random.default_rng(seed)
    M = rng.integers(-20, 21, size=(4, 4)).astype(float)
    if abs(np.linalg.det(M)) < 1:
        return
    red, U = L.lll_reduce(L.lattice_basis(M))
    assert abs(exact_det(U)) == 1
    assert np.allclose(M @ U.astype(float), red.matrix)
    mu, bb = L._gso(red.matrix)
    for i in range(4):
        for j in range(i):
            assert abs(mu[i, j]) <= 0.5 + 1e-9
    for i in range(1, 4):
        assert bb[i] >= (0.99 - mu[i, i - 1] ** 2) * bb[i - 1] * (1 - 1e-9)


def test_lll_validation():
    with pytest.raises(InvalidParameter):
        L.lll_reduce(L.lattice_basis(np.identity(2)), delta=0.2)


def test_enumeration_budget():
    with pytest.raises(ResourceExceeded) as exc:
        L.shortest_vector(L.lattice_basis(np.identity(6)), budget=3)
    assert exc.value.partial is not None


@pytest.mark.parametrize("t", [0.5, 3.25, 7.0, 12.5, 18.0, 23.5])
def test_alpha_lattice_against_high_precision_oracle(t):
    B = L.alpha_lattice_basis((GOLDEN, 0), (1, 0), t)
    assert L.injectivity_radius(B) == pytest.approx(golden_oracle(t), rel=1e-9)


def test_golden_trajectory_against_oracle():
    grid = np.arange(0, 25.0001, 0.25)
    tr = L.inj_trajectory((GOLDEN, 0), (1, 0), grid)
    want = np.array([golden_oracle(t) for t in grid])
    assert np.allclose(tr.inj, want, rtol=1e-9)
    assert tr.delta_hat < 0.05
    assert tr.inj[0] == 0.5
    assert np.all(np.diff(tr.envelope) <= 0)


def test_rational_alpha_trajectory_decays():
    # a rational frequency gives a vector of length about e^-t
    tr = L.inj_trajectory((F(1, 2), 0), (1, 0), np.arange(0, 10.01, 0.5))
    assert tr.delta_hat == pytest.approx(1, abs=0.1)


def test_inj_trajectory_validation():
    with pytest.raises(InvalidParameter):
        L.inj_trajectory((0.1, 0), (1, 0), [1.0])
    with pytest.raises(InvalidParameter):
        L.inj_trajectory((0.1, 0), (1, 0), [2.0, 1.0])


def test_i_star_examples():
    ts = np.linspace(0, 5, 51)
    # I = 2 e^(-s) everywhere: crossing at s = 0
    assert L.i_star(ts, 2 * np.exp(-ts), 0.0).value == 2.0
    # I = 1/2 constant: crossing where 2 e^(-s) = 1/2
    r = L.i_star(ts, np.full_like(ts, 0.5), 0.0)
    assert r.crossed and r.s_star == pytest.approx(math.log(4), abs=1e-12)
    assert r.value == pytest.approx(0.5, abs=1e-12)
    # a curve that stays below 2 e^-s has no crossing
    r = L.i_star(ts, 0.1 * np.exp(-2 * ts), 0.0)
    assert not r.crossed and r.value == 0.0


@given(st.floats(0.01, 1.0), st.floats(0, 1))
def test_i_star_below_I(c, t):
    ts = np.linspace(0, 10, 101)
    Is = c * np.exp(-0.2 * ts)
    r = L.i_star(ts, Is, t)
    assert r.crossed
    # at the crossing, I* equals I(t + s*), which is at most I(t)
    assert r.value <= float(np.interp(t, ts, Is)) + 1e-12


def test_i_star_validation():
    ts = np.linspace(0, 1, 5)
    with pytest.raises(InvalidParameter):
        L.i_star(ts, np.linspace(0.1, 0.5, 5), 0.5)
    with pytest.raises(InvalidParameter):
        L.i_star(ts, np.full(5, 0.5), 2.0)
    with pytest.raises(InvalidParameter):
        L.i_star(ts, np.zeros(5), 0.5)


def test_width_lower_bound():
    assert L.width_lower_bound(2, 5.0, delta=0) == 1.0
    assert L.width_lower_bound(3, 2.0, delta=0.5) == pytest.approx(math.exp(-8))
    assert L.width_lower_bound(2, 1.0, istar=0.5) == 0.125
    with pytest.raises(InvalidParameter):
        L.width_lower_bound(2, 1.0)
    with pytest.raises(InvalidParameter):
        L.width_lower_bound(2, 1.0, delta=1.0)


def test_b_hat_geometric_sum():
    # B_j = 1, T = e^3: sum_{j=0}^{3} e^{a j}
    a = 1 - 0.5 / 2
    got = L.b_hat_bound(np.ones(4), 0.5, 2, math.exp(3))
    assert got == pytest.approx(sum(math.exp(a * j) for j in range(4)), rel=1e-14)
    # T = e: two scales, j = 0 and j = 1
    assert L.b_hat_bound([1, 1], 1, 2, math.e) == pytest.approx(1 + math.exp(0.5))
    with pytest.raises(InvalidParameter):
        L.b_hat_bound([1], 1, 2, math.e)
    with pytest.raises(InvalidParameter):
        L.b_hat_bound([1, 1], 1, 2, 2.0)


@pytest.mark.parametrize("delta", [0.0, 0.1, 0.3])
def test_b_hat_synthetic_envelope(delta):
    # per-scale widths saturating the lower bound, B_j = w^-1/2 with w = e^-(k+1) delta j/(1-delta)
    k, rho1 = 3, 2 / 3
    ratios = []
    for logT in range(1, 30):
        T = math.exp(logT)
        Bj = [math.exp((k + 1) * delta * j / (2 * (1 - delta))) for j in range(logT + 1)]
        ratios.append(L.b_hat_bound(Bj, rho1, k, T) / L.b_hat_envelope(rho1, k, T, delta))
    # the ratio tends to the geometric-series constant 1/(1 - e^-c)
    c = 1 - rho1 / (2 * (k - 1)) + (k + 1) * delta / (2 * (1 - delta))
    assert ratios[-1] == pytest.approx(1 / (1 - math.exp(-c)), rel=1e-9)
    assert max(ratios) <= 1 / (1 - math.exp(-c)) + 1e-12

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dhecke.coeffs import QQ, ZZ, ModRing, build_dlog
from dhecke.errors import NotPolynomialInJ
from dhecke.qseries import (QExp, eprime_series, merel_constant, poly_in_j, sigma,
                            standard_series, sturm_bound, theta_from_gram)


def hecke_oracle(a, ell, n):
    """a_n(T_ell f) = sum over d | gcd(n, ell) of d * a_{n ell / d^2} (weight 2)."""
    return sum(d * a[n * ell // (d * d)] for d in (1, ell) if n % d == 0)


def test_hecke_t2_against_divisor_sum():
    a = list(range(1, 41))
    f = QExp(a, 0, 1, ZZ)
    Tf = f.hecke(2)
    assert [Tf[n] for n in range(20)] == [hecke_oracle(a, 2, n) for n in range(20)]


def test_hecke_on_e2n_is_eisenstein():
    R = ModRing(11)
    E = standard_series("E2N", 23, 200, R)
    for ell in (2, 3, 5, 7):
        TE = E.hecke(ell, level=23)
        assert all(TE[n] == E[n] * (ell + 1) for n in range(200 // ell))


def test_un_kills_series_supported_prime_to_n():
    f = QExp([7] + [0 if n % 5 == 0 else n for n in range(1, 60)], 0, 1, ZZ)
    g = f.hecke(5, level=5)
    assert g[0] == 7 and all(g[n] == 0 for n in range(1, g.prec))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=60, max_size=60))
def test_hecke_operators_commute(coeffs):
    f = QExp(coeffs, 0, 1, ZZ)
    a = f.hecke(2).hecke(3)
    b = f.hecke(3).hecke(2)
    assert all(a[n] == b[n] for n in range(min(a.prec, b.prec)))


def test_delta_and_j_leading_terms():
    D = standard_series("Delta", B=5, ring=ZZ)
    assert D[0] == 0 and D[1] == 1 and D[2] == -24 and D[3] == 252
    j = standard_series("j", B=4, ring=ZZ)
    assert j[-1] == 1 and j[0] == 744 and j[1] == 196884


def test_delta_product_matches_recursion():
    # tau(n) from the Ramanujan-type recursion via E_4^3 - E_6^2 = 1728 Delta
    E4 = standard_series("E_k", B=12, ring=QQ, k=4)
    E6 = standard_series("E_k", B=12, ring=QQ, k=6)
    D = standard_series("Delta", B=12, ring=QQ)
    lhs = E4 * E4 * E4 - E6 * E6
    assert all(lhs[n] == 1728 * D[n] for n in range(12))


def test_e2n_constant_term():
    assert standard_series("E2N", 23, 5, ModRing(11))[0] == ModRing(11)(0)
    assert standard_series("E2N", 23, 5, QQ)[0] == Fraction(22, 24)
    assert [standard_series("E2N", 23, 50, QQ)[n] for n in (1, 23, 46)] == [
        sigma(1, 1), sigma(1, 1), sigma(2, 1)]


def test_eprime_low_coefficients():
    L = build_dlog(23, 11, 1, (5, 1))
    E = eprime_series(23, 11, 1, L, 40)
    assert E[1].value == 0
    for ell in (2, 3, 5, 7, 11, 13):
        # -(log(1/l) + l log l) from the divisor sum
        assert E[ell].value == -(ell - 1) * L.log_int(ell) % 11
    assert E[0] == merel_constant(23, 11, 1, L)


@pytest.mark.parametrize("N,p,t", [(11, 5, 1), (23, 11, 1), (101, 5, 2)])
def test_eprime_hecke_and_un(N, p, t):
    L = build_dlog(N, p, t)
    B = sturm_bound(N)
    E = eprime_series(N, p, t, L, 13 * N * B)
    E2 = standard_series("E2N", N, B, ModRing(p ** t))
    for ell in (2, 3, 5, 7, 13):
        if ell == N:
            continue
        TE = E.hecke(ell, level=N)
        for n in range(B):
            # sign fixed by the divisor-sum normalisation of E'
            assert TE[n] - E[n] * (ell + 1) == E2[n] * (-(ell - 1) * L.log_int(ell))
    UE = E.hecke(N, level=N)
    assert all(UE[n] == E[n] for n in range(B))


def test_merel_constant_linear_and_symmetric():
    L = build_dlog(31, 5)
    m = merel_constant(31, 5, 1, L)
    assert merel_constant(31, 5, 1, L.rescaled(3)) == m * 3
    # theta_j = theta_{N-j} and log(-1) = 0
    assert L.log_int(30) == 0


def test_theta_rank0_and_sum_of_two_squares():
    assert theta_from_gram([], 1, 5).coeffs[:5] == [1, 0, 0, 0, 0]
    th = theta_from_gram([[2, 0], [0, 2]], 1, 30)
    box = [sum(1 for x in range(-6, 7) for y in range(-6, 7) if x * x + y * y == n)
           for n in range(30)]
    assert [th[n] for n in range(30)] == box


def test_theta_of_maximal_order_d23():
    th = theta_from_gram([[2, 1], [1, 12]], 1, 40)
    oracle = [sum(1 for x in range(-15, 16) for y in range(-4, 5) if x * x + x * y + 6 * y * y == n)
              for n in range(40)]
    assert [th[n] for n in range(40)] == oracle


def test_poly_in_j_worked_example():
    from math import lcm
    E = standard_series("E_k", B=8, ring=QQ, k=24)
    D = standard_series("Delta", B=8, ring=QQ)
    P = poly_in_j(E / (D * D), 2)
    d = lcm(*[Fraction(x).denominator for x in P])
    p0, p1, p2 = [Fraction(x) * d for x in P]
    c = p0 / 1728 ** 2
    b = (-p1 - 3456 * c) / 1728
    a = p2 - b - c
    assert (a, b, c, d) == (49679091, 176400000, 10285000, 236364091)


def test_poly_in_j_small_cases():
    E6 = standard_series("E_k", B=8, ring=QQ, k=6)
    D = standard_series("Delta", B=8, ring=QQ)
    assert poly_in_j(E6 * E6 / D, 1) == [-1728, 1]
    assert poly_in_j(QExp([5] + [0] * 6, 0, 1, QQ)) == [5]
    with pytest.raises(NotPolynomialInJ):
        poly_in_j(QExp([0, 1, 0, 0, 0], 0, 1, QQ))


@settings(max_examples=15, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=1, max_size=3))
def test_poly_in_j_round_trip(P):
    j = standard_series("j", B=14, ring=QQ)
    f = QExp([0] * 8, 0, 1, QQ)
    f = f + P[0]
    jp = QExp([1] + [0] * 10, 0, 1, QQ)
    for c in P[1:]:
        jp = jp * j
        f = f + jp.truncate(8) * c
    got = poly_in_j(f, len(P) - 1)
    want = list(P)
    while len(want) > 1 and want[-1] == 0:
        want.pop()
    assert [Fraction(x) for x in got[:len(want)]] == want and not any(got[len(want):])


def test_sturm_bound():
    assert sturm_bound(23) == 6 and sturm_bound(11) == 4


@pytest.mark.parametrize("N", [11, 23, 37])
def test_e2n_eigen_check_stable_under_doubling(N):
    R = ModRing(7)
    for B in (sturm_bound(N), 2 * sturm_bound(N)):
        E = standard_series("E2N", N, 3 * B, R)
        TE = E.hecke(3, level=N)
        assert all(TE[n] == E[n] * 4 for n in range(B))

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from sympy import factorint, primerange

from dhecke.coeffs import CycRing, ModRing, build_dlog, legendre
from dhecke.quad import ClassGroupTable
from dhecke.ssmod import (SSBasis, _hilbert_table, bracket_psi, check_elliptic_units, cm_labeling,
                          cm_roots, elliptic_unit_log, hilbert_class_poly, pair_div, pairing,
                          sigma0, sigma1_poly, sigma1_solve, sum_entries)


def ints(v, M):
    return [x.value % M if hasattr(x, "value") else int(x) % M for x in v]


def apply(B, v, M):
    n = len(v)
    return [sum(B[y][x] * v[x] for x in range(n)) % M for y in range(n)]


def test_basis_n23():
    b = SSBasis(23)
    assert b.labels() == [1728 % 23, 19, 0]
    assert b.weights == [2, 1, 3]


def test_basis_n11():
    b = SSBasis(11)
    assert sorted(b.labels()) == [0, 1728 % 11]
    assert sorted(b.weights) == [2, 3]
    # 1/(2w) sums to (N-1)/24, i.e. 1/4 + 1/6 = 5/12
    assert sum(Fraction(1, 2 * w) for w in b.weights) == Fraction(10, 24)


@pytest.mark.parametrize("N", list(primerange(5, 201)))
def test_mass_formula(N):
    b = SSBasis(N)
    assert sum(Fraction(1, 2 * w) for w in b.weights) == Fraction(N - 1, 24)
    # closed under Frobenius
    assert sorted(b.frob) == list(range(len(b)))


@pytest.mark.parametrize("N", [23, 37, 41, 61])
def test_brandt_eisenstein_and_self_adjoint(N):
    b = SSBasis(N)
    n = len(b)
    for ell in (2, 3, 5):
        B = b.brandt(ell)
        # column sums ell + 1: T_l Sigma_0 = (l + 1) Sigma_0 with Sigma_0 = sum e_x / w_x
        for x in range(n):
            assert sum(B[y][x] for y in range(n)) == ell + 1
        # <T e_x, e_y> = w_y B[y][x] equals <e_x, T e_y> = w_x B[x][y]
        for x in range(n):
            for y in range(n):
                assert b.weights[y] * B[y][x] == b.weights[x] * B[x][y]


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=5, max_size=5),
       st.lists(st.integers(-5, 5), min_size=5, max_size=5))
def test_hecke_self_adjoint_random(a, c):
    b = SSBasis(61)
    n = len(b)
    a, c = (a * n)[:n], (c * n)[:n]
    B = b.brandt(2)
    Ta = [sum(B[y][x] * a[x] for x in range(n)) for y in range(n)]
    Tc = [sum(B[y][x] * c[x] for x in range(n)) for y in range(n)]
    assert pairing(b, Ta, c) == pairing(b, a, Tc)


def test_hecke_operators_commute():
    b = SSBasis(67)
    n = len(b)
    B2, B3 = b.brandt(2), b.brandt(3)
    for i in range(n):
        for j in range(n):
            assert sum(B2[i][k] * B3[k][j] for k in range(n)) == sum(B3[i][k] * B2[k][j] for k in range(n))


def test_worked_example_sigma():
    b = SSBasis(23)
    L = build_dlog(23, 11, 1, (5, 1))
    s0 = ints(sigma0(b, 11), 11)
    s1 = ints(sigma1_poly(b, 11, 1, L), 11)
    assert s0 == [6, 1, 4]
    assert s1 == [(-1) % 11, (-1) % 11, (-3) % 11]
    for ell in (2, 3, 5, 7):
        lhs = [(u - (ell + 1) * v) % 11 for u, v in zip(apply(b.brandt(ell), s1, 11), s1)]
        assert lhs == [(ell - 1) * L.log_int(ell) * v % 11 for v in s0]


def test_sigma0_pairs_to_one():
    b = SSBasis(37)
    R = ModRing(35)
    s0 = sigma0(b, 35)
    for x in range(len(b)):
        e = [int(k == x) for k in range(len(b))]
        assert pairing(b, [R(v) for v in e], s0) == R(1)


@pytest.mark.parametrize("N", [n for n in primerange(11, 110) if any(p > 3 for p in factorint(n - 1))])
def test_sigma1_relation_sweep(N):
    b = SSBasis(N)
    for p, t in factorint(N - 1).items():
        if p <= 3:
            continue
        M = p ** t
        L = build_dlog(N, p, t)
        s0 = ints(sigma0(b, M), M)
        s1 = ints(sigma1_poly(b, p, t, L), M)
        for ell in (2, 3, 5, 7):
            if ell == N:
                continue
            lhs = [(u - (ell + 1) * v) % M for u, v in zip(apply(b.brandt(ell), s1, M), s1)]
            assert lhs == [(ell - 1) * L.log_int(ell) * v % M for v in s0]


def test_sigma1_rescaling():
    b = SSBasis(31)
    L = build_dlog(31, 5)
    s1 = ints(sigma1_poly(b, 5, 1, L), 5)
    s3 = ints(sigma1_poly(b, 5, 1, L.rescaled(3)), 5)
    assert s3 == [3 * x % 5 for x in s1]


def test_sigma1_solve_agrees_mod_kernel():
    from dhecke.coeffs import solve_mod
    b = SSBasis(23)
    L = build_dlog(23, 11, 1, (5, 1))
    X, ker = sigma1_solve(b, 11, 1, L, [2, 3, 5])
    s1 = ints(sigma1_poly(b, 11, 1, L), 11)
    s0 = ints(sigma0(b, 11), 11)
    diff = [(u - v) % 11 for u, v in zip(ints(X, 11), s1)]
    kv = [ints(k, 11) for k in ker]
    assert kv
    # the difference lies in the span of the kernel, which contains Sigma_0
    A = [[k[i] for k in kv] for i in range(len(b))]
    assert solve_mod(A, diff, 11) is not None
    assert solve_mod(A, s0, 11) is not None


def test_pairing_solution_independent_on_psi_isotypic_part():
    b = SSBasis(43)
    L = build_dlog(43, 7)
    lab = cm_labeling(b, -23, allow_repeated=True)
    ring = CycRing(3, 7)
    psi = [c for c in lab.cg.group().characters() if not c.is_trivial()][0]
    br = bracket_psi(lab, psi, ring)
    X, ker = sigma1_solve(b, 7, 1, L, [2, 3, 5, 11])
    base = pair_div(b, ints(X, 7), br, ring)
    for k in ker:
        Y = [(u + v) % 7 for u, v in zip(ints(X, 7), ints(k, 7))]
        assert pair_div(b, Y, br, ring) == base
    assert base == pair_div(b, ints(sigma1_poly(b, 7, 1, L), 7), br, ring)


def test_hilbert_table_h_minus_23():
    assert hilbert_class_poly(-23) == [12771880859375, -5151296875, 3491750, 1]


def test_hilbert_table_degrees_and_supersingular_roots():
    tab = _hilbert_table()
    for D, (h, coeffs) in sorted(tab.items()):
        if -D > 200:
            continue
        assert len(coeffs) - 1 == h == ClassGroupTable(D).order
        inert = [N for N in primerange(5, 400) if legendre(D % N, N) == -1 and N > 3][:2]
        for N in inert:
            roots = cm_roots(SSBasis(N), D, allow_repeated=True)
            assert sum(roots.values()) <= h


def test_cm_roots_d23_n11():
    b = SSBasis(11)
    roots = cm_roots(b, -23, allow_repeated=True)
    H = [c % 11 for c in hilbert_class_poly(-23)]
    for x in roots:
        j = b.js[x]
        acc = j.F.zero()
        for c in reversed(H):
            acc = acc * j + c
        assert acc.is_zero()
    assert sum(roots.values()) == 3


def test_bracket_psi_orthogonality():
    b = SSBasis(43)
    lab = cm_labeling(b, -23, allow_repeated=True)
    ring = CycRing(3, 7)
    G = lab.cg.group()
    for chi in G.characters():
        br = bracket_psi(lab, chi, ring)
        s = sum_entries(br, ring)
        assert s == (ring(3) if chi.is_trivial() else ring(0))
        # zeta -> 1 (the ring with Phi_1) specialises [psi] to [1]
        R1 = CycRing(1, 7)
        assert bracket_psi(lab, chi, R1) == bracket_psi(lab, chi ** 0, R1)


def test_labeling_walk_and_inverse():
    b = SSBasis(43)
    lab = cm_labeling(b, -23, allow_repeated=True)
    assert lab.h == 3
    inv = lab.inverse()
    assert inv.labels[0] == lab.labels[0]
    assert sorted(inv.labels) == sorted(lab.labels)


# H_{-23} has a double root mod 11, so there are two distinct basepoints
@pytest.mark.parametrize("basepoint", [0, 1])
@pytest.mark.parametrize("direction", [0, 1])
def test_elliptic_units_d23_n11_all_labelings(basepoint, direction):
    r = check_elliptic_units(-23, 11, 5, basepoint=basepoint, direction=direction)
    assert r["pass"]


def test_elliptic_units_two_auxiliary_primes():
    a = check_elliptic_units(-23, 43, 7, qchoice=0)
    c = check_elliptic_units(-23, 43, 7, qchoice=1)
    assert a["pass"] and c["pass"]


def test_elliptic_unit_log_linear_in_log():
    from dhecke.quad import prime_ideals_above
    b = SSBasis(43)
    lab = cm_labeling(b, -23, allow_repeated=True)
    ring = CycRing(3, 7)
    psi = [c for c in lab.cg.group().characters() if not c.is_trivial()][0]
    qi = prime_ideals_above(-23, 2)[0]
    L = build_dlog(43, 7)
    u1 = elliptic_unit_log(lab, psi, qi, L, ring)
    u2 = elliptic_unit_log(lab, psi, qi, L.rescaled(2), ring)
    assert u2 == u1 * 2

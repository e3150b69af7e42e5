import pytest

from dhecke.coeffs import CycRing, ModRing, build_dlog
from dhecke.errors import DomainError, InvalidAuxiliaryPrime
from dhecke.harness import _functional, trace_identity_check
from dhecke.qseries import sturm_bound
from dhecke.quad import ClassGroupTable, QuadElem, QuadIdeal
from dhecke.quat import (G_definite, G_theta_trace, QuatLattice, check_aux_prime, eichler_order,
                         find_aux_prime, lattice_product, saturate_maximal, shimura_pairing)
from dhecke.ssmod import SSBasis, sigma1_poly, theta_correspondence

D = -23


def psi1_of(cg, k=0):
    return [c for c in cg.group().characters() if not c.is_trivial()][k]


@pytest.mark.parametrize("N", [11, 43])
def test_eichler_order(N):
    q = find_aux_prime(D, N)
    O = eichler_order(D, N, q)
    assert O.lattice.is_order()
    assert O.reduced_discriminant() == 23 * N * q
    j = O.A.j
    assert j * j == O.A.elem(-q * N)
    # j has reduced norm qN
    assert (j * j.conj()).trace() == 2 * q * N


def test_aux_prime_rejections():
    with pytest.raises(InvalidAuxiliaryPrime):
        check_aux_prime(D, 11, 9)
    with pytest.raises(InvalidAuxiliaryPrime):
        check_aux_prime(D, 11, 13)  # not -11 mod 23


def test_saturations_are_maximal_and_distinct():
    q = find_aux_prime(D, 11)
    O = eichler_order(D, 11, q)
    M0 = saturate_maximal(O)
    M1 = saturate_maximal(O, (23,))
    for M in (M0, M1):
        assert M.reduced_discriminant() == 11
        assert M.lattice.contains_lattice(O.lattice)
        assert O.lattice.index_in(M.lattice) == 23 * q
    assert M0.lattice != M1.lattice
    with pytest.raises(DomainError):
        saturate_maximal(O, (7,))


def test_lattice_product_with_unit_ideals():
    q = find_aux_prime(D, 11)
    M = saturate_maximal(eichler_order(D, 11, q))
    one = QuadIdeal.principal(QuadElem(D, 2, 0))
    assert lattice_product(one, M.lattice, one) == M.lattice


def test_theta_invariant_under_homothety():
    q = find_aux_prime(D, 43)
    M = saturate_maximal(eichler_order(D, 43, q))
    cg = ClassGroupTable(D)
    I, J = cg.reps[1].conj(), cg.reps[2]
    alpha = QuadIdeal.principal(QuadElem(D, 1, 1))  # (1 + sqrt -23)/2
    base = lattice_product(I, M.lattice, J).theta(20)
    moved = lattice_product(I * alpha, M.lattice, J).theta(20)
    assert [base[m] for m in range(20)] == [moved[m] for m in range(20)]


def test_maximal_order_theta_counts_units():
    q = find_aux_prime(D, 11)
    M = saturate_maximal(eichler_order(D, 11, q))
    th = M.lattice.theta(5)
    # the unit group of a maximal order of discriminant 11 has order 4 or 6
    assert th[0] == 1 and th[1] in (4, 6)
    assert isinstance(M.lattice, QuatLattice)


@pytest.mark.parametrize("N", [11, 43])
def test_traced_form_two_constructions_agree(N):
    cg = ClassGroupTable(D)
    ring = CycRing(3, 10 ** 9 + 7)
    B = 25
    for k in (0, 1):
        G = G_definite(D, N, psi1_of(cg, k), B, ring, cg=cg)
        H = G_theta_trace(D, N, psi1_of(cg, k), B, ring, cg=cg)
        assert G[0] == ring(0)
        assert [G[m] for m in range(B)] == [H[m] for m in range(B)]


def test_traced_form_independent_of_choices():
    cg = ClassGroupTable(D)
    ring = CycRing(3, 10 ** 9 + 7)
    psi1 = psi1_of(cg)
    q0 = find_aux_prime(D, 43)
    q1 = find_aux_prime(D, 43, start=q0 + 1)
    base = G_definite(D, 43, psi1, 20, ring, q=q0, cg=cg)
    for q, S in ((q0, (23,)), (q1, ())):
        G = G_definite(D, 43, psi1, 20, ring, q=q, S=S, cg=cg)
        assert [G[m] for m in range(20)] == [base[m] for m in range(20)]


def test_split_level_rejected_by_definite_construction():
    cg = ClassGroupTable(D)
    with pytest.raises(DomainError):
        G_definite(D, 13, psi1_of(cg), 10, CycRing(3, 101), cg=cg)


@pytest.mark.parametrize("N", [11, 43])
def test_trace_identity(N):
    assert trace_identity_check(D, N, B=25)["verdict"] == "pass"


@pytest.mark.parametrize("N,p", [(23, 11), (41, 5), (61, 5), (71, 7)])
def test_functional_on_basis_thetas(N, p):
    # lam(Theta(e_i x e_j)) = (<e_i, S1> + <e_j, S1>)/2 + c with <e_i, S0> = 1
    b = SSBasis(N)
    L = build_dlog(N, p)
    B = 2 * sturm_bound(N) + 2
    lam, _, _ = _functional(b, B, L)
    s1 = [x.value % p for x in sigma1_poly(b, p, 1, L)]
    w = b.weights
    n = len(b)
    half = pow(2, -1, p)
    consts = set()
    for i in range(n):
        for j in range(n):
            e = [int(k == i) for k in range(n)]
            f = [int(k == j) for k in range(n)]
            th = theta_correspondence(b, e, f, B, ModRing(p))
            # a_0 != 0 here, so use a fixed representative of lam
            v = sum(a * c for a, c in zip(lam.coords([x.value for x in th]), lam.lam)) % p
            consts.add((v - half * (w[i] * s1[i] + w[j] * s1[j])) % p)
    assert len(consts) == 1


def test_functional_stable_under_doubling():
    b = SSBasis(43)
    L = build_dlog(43, 7)
    cg = ClassGroupTable(D)
    ring = CycRing(3, 7)
    vals = []
    for B in (sturm_bound(43) + 1, 2 * (sturm_bound(43) + 1)):
        lam, _, _ = _functional(b, B, L)
        vals.append(lam(G_definite(D, 43, psi1_of(cg), B, ring, cg=cg)))
    assert vals[0] == vals[1]


def test_shimura_pairing_requires_cusp_form():
    b = SSBasis(23)
    L = build_dlog(23, 11, 1, (5, 1))
    lam, span, hecke = _functional(b, 10, L)
    e = [1, 0, 0]
    th = theta_correspondence(b, e, e, 10, ModRing(11))
    with pytest.raises(DomainError):
        shimura_pairing(th, span, [2, 3], L, 10, hecke)

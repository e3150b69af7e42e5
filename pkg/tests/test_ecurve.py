import pytest
from hypothesis import given, settings, strategies as st

from dhecke.coeffs import FiniteField
from dhecke.ecurve import (ECurve, curve_from_j, delta_of, isogenies, isogenous_j,
                           order_ell_subgroups, roots_in_field, velu)
from dhecke.errors import InvalidKernel
from dhecke.ssmod import SSBasis, en1_value

F = FiniteField(23, 2)


def test_special_models():
    E0 = curve_from_j(F(0))
    E1728 = curve_from_j(F(1728))
    assert (E0.a, E0.b) == (F(0), F(1))
    assert (E1728.a, E1728.b) == (F(1), F(0))


def test_delta_special_values():
    G = FiniteField(1009, 2)
    assert delta_of(ECurve(G(0), G(1))) == G(-432)
    assert delta_of(ECurve(G(1), G(0))) == G(-64)


field_elems = st.tuples(st.integers(0, 22), st.integers(0, 22))


@settings(max_examples=100, deadline=None)
@given(field_elems)
def test_j_round_trip(c):
    x = F(c)
    assert curve_from_j(x).j == x


@settings(max_examples=40, deadline=None)
@given(field_elems, field_elems)
def test_delta_twist_scaling(c, d):
    u = F(d)
    if u.is_zero():
        u = F(1)
    E = curve_from_j(F(c))
    Et = ECurve(u ** 4 * E.a, u ** 6 * E.b)
    assert delta_of(Et) == delta_of(E) * u ** 12


def test_two_torsion_kernels_are_roots_of_the_cubic():
    E = curve_from_j(SSBasis(23).js[1])
    ks = order_ell_subgroups(E, 2)
    roots = sorted(roots_in_field(E.rhs()))
    assert len(ks) == 3
    assert sorted(-k[0] for k in ks) == roots


def test_trivial_kernel_is_identity():
    E = curve_from_j(F(5))
    st_ = velu(E, [F(1)])
    assert st_.degree == 1 and st_.codomain.j == E.j and st_.delta_ratio() == F(1)


def test_hand_velu_two_isogeny():
    G = FiniteField(1009, 2)
    E = ECurve(G(1), G(0))  # y^2 = x^3 + x, kernel (0, 0)
    step = velu(E, [G(0), G(1)])
    # t = 3*0 + 1, w = 0: codomain y^2 = x^3 - 4x
    assert (step.codomain.a, step.codomain.b) == (G(-4), G(0))


def test_bad_kernel_rejected():
    E = curve_from_j(SSBasis(23).js[1])
    with pytest.raises(InvalidKernel):
        velu(E, [F(1), F(0), F(1)])


SAMPLES = [(N, k) for N in (23, 37, 47, 59, 71) for k in range(len(SSBasis(N).js))][:20]


@pytest.mark.parametrize("N,k", SAMPLES)
def test_ell_plus_one_kernels(N, k):
    E = curve_from_j(SSBasis(N).js[k])
    for ell in (2, 3, 5):
        assert len(order_ell_subgroups(E, ell)) == ell + 1


def test_seven_kernels():
    for j in SSBasis(23).js:
        assert len(order_ell_subgroups(curve_from_j(j), 7)) == 8


@pytest.mark.parametrize("N", [23, 37])
def test_out_and_back_and_dual_scaling(N):
    B = SSBasis(N)
    for j in B.js:
        E = curve_from_j(j)
        for ell in (2, 3):
            for step in isogenies(E, ell):
                back = [s for s in isogenies(step.codomain, ell) if s.codomain.j == E.j]
                assert back
                # the dual returns with Delta scaled by ell^12 in total
                target = B.F(ell) ** -12
                assert any(step.delta_ratio() * s.delta_ratio() == target for s in back)


@pytest.mark.parametrize("N", [23, 29, 37])
def test_robert_rule(N):
    for j in SSBasis(N).js:
        E = curve_from_j(j)
        for ell in (2, 3):
            for step in isogenies(E, ell):
                assert en1_value(step.codomain, N) == en1_value(E, N) * ell


def test_resolvent_for_two_isogenies():
    # the three 2-isogenous j's are the roots of Phi_2(j, Y)
    from dhecke.ssmod import modpoly_in_X, modular_polynomial_mod
    for N in (23, 37):
        C = modular_polynomial_mod(2, N)
        for x in SSBasis(N).js:
            E = curve_from_j(x)
            P = modpoly_in_X(C, x)
            for y in isogenous_j(E, 2):
                acc = E.F.zero()
                for c in reversed(P):
                    acc = acc * y + c
                assert acc.is_zero()

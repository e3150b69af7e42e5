"""Verification drivers: CM and RM end-to-end checks, the higher Eisenstein
suite, instance search and a parallel sweep.  Every check yields a JSON-able
record {check, instance, lhs, rhs, ring, bound, verdict, ms}."""

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from sympy import factorint, primerange
from sympy.ntheory import isprime

from .coeffs import CycRing, ModRing, PadicScalar, CycScalar, build_dlog, legendre
from .errors import DegenerateInstance, DHeckeError, InvalidInstance
from .qseries import QExp, eprime_series, merel_constant, standard_series, sturm_bound

REAL_MULTIPLIER = 24


def _jsonable(x):
    if isinstance(x, CycScalar):
        return x.to_list()
    if isinstance(x, PadicScalar):
        return x.value
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(y) for y in x]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    return x


def _int(x):
    return x.value if isinstance(x, PadicScalar) else int(x)


def record(check, instance, lhs, rhs, ring, bound, ok, t0, **extra):
    out = {"check": check, "instance": _jsonable(instance), "lhs": _jsonable(lhs), "rhs": _jsonable(rhs),
           "ring": str(ring), "bound": bound, "verdict": "pass" if ok else "fail",
           "ms": int((time.perf_counter() - t0) * 1000)}
    out.update(_jsonable(extra))
    return out


def admissible_primes(N):
    """(p, t) with p > 3 and p^t || N - 1."""
    return [(p, e) for p, e in sorted(factorint(N - 1).items()) if p > 3]


def _default_prime(N):
    ps = admissible_primes(N)
    if not ps:
        raise InvalidInstance("no prime p > 3 divides N - 1 = %d" % (N - 1))
    return ps[-1]


def _functional(basis, B, dlog, primes=(2, 3, 5, 7, 11, 13)):
    from .quat import ShimuraFunctional
    from .ssmod import weight2_span
    span, hecke = weight2_span(basis, B, ModRing(dlog.modulus))
    return ShimuraFunctional(span, list(primes), dlog, B, hecke), span, hecke


# ---------------------------------------------------------------- imaginary quadratic side

def match_basepoints(basis, theta_M, B):
    """Supersingular points x with theta(M) = 2 Theta(e_x (x) e_x) to B terms."""
    from .ssmod import theta_correspondence
    from .coeffs import QQ
    n = len(basis)
    out = []
    for x in range(n):
        e = [int(k == x) for k in range(n)]
        th = theta_correspondence(basis, e, e, B, QQ)
        if all(2 * th[m] == theta_M[m] for m in range(B)):
            out.append(x)
    return out


def matched_labeling(basis, D, q_order, B):
    """CM labeling based at the point whose endomorphism ring is the maximal order
    containing the Eichler order of G; returns (labeling, index of that point)."""
    from .quat import eichler_order, saturate_maximal
    from .ssmod import cm_labeling, cm_roots
    Mord = saturate_maximal(eichler_order(D, basis.N, q_order))
    roots = sorted(cm_roots(basis, D, allow_repeated=True))
    cands = [x for x in match_basepoints(basis, Mord.lattice.theta(B), B) if x in roots]
    if not cands:
        raise DHeckeError("no CM point matches the maximal order")
    x = cands[0]
    return cm_labeling(basis, D, basepoint=roots.index(x), direction=0, allow_repeated=True), x


def _galois_cofactor(k, e, ring):
    """prod over sigma != 1 of (1 - sigma(zeta_e^k)) = n / (1 - zeta_e^k), n its norm."""
    from math import gcd
    order = e // gcd(k, e)
    z = ring.n // e
    acc = ring(1)
    for s in range(2, order + 1):
        if gcd(s, order) == 1:
            acc = acc * (ring(1) - ring.zeta(k * s * z))
    norm = 1
    fac = factorint(order)
    if len(fac) == 1:
        norm = next(iter(fac))
    return acc, norm


def cm_verify(D, N, p=None, t=None, psi_index=0, aux_q=None, anchor=None, bound=None,
              reverify=True):
    """(i) lam(G), (ii) 2h <Sigma_1, [psi]>, (iii) -(h/3) log u_{psi,q} / (1 - psi(qbar))."""
    from .quad import ClassGroupTable, prime_ideals_above
    from .quat import G_definite, G_theta_trace, find_aux_prime
    from .ssmod import SSBasis, _split_primes, bracket_psi, elliptic_unit_log, pair_div, sigma1_poly
    if p is None:
        p, t = _default_prime(N)
    t = t or 1
    M = p ** t
    inst = {"D": D, "N": N, "p": p, "t": t, "psi1": psi_index}
    t0 = time.perf_counter()
    cg = ClassGroupTable(D)
    grp = cg.group()
    chars = [c for c in grp.characters() if not c.is_trivial()]
    psi1 = chars[psi_index]
    psi = psi1 ** 2
    ring = CycRing(grp.exponent, M)
    dlog = build_dlog(N, p, t, anchor)
    basis = SSBasis(N)
    B = bound or max(31, 2 * sturm_bound(N))
    lam, _, _ = _functional(basis, B, dlog)
    h = cg.order

    if legendre(D, N) == 1:
        # N split: the regulator vanishes, and so must the G-side pairing
        G = G_theta_trace(D, N, psi1, B, ring, cg)
        lhs = lam(G)
        return [record("cm-split-trivial", inst, lhs, ring(0), ring, B, lhs == ring(0), t0)]

    q_order = find_aux_prime(D, N)
    G = G_definite(D, N, psi1, B, ring, q=q_order, cg=cg)
    lhs = lam(G)
    out = []

    lab, x = matched_labeling(basis, D, q_order, B)
    s1 = sigma1_poly(basis, p, t, dlog)
    if aux_q is None:
        aux_q = next(ell for ell in _split_primes(D, N, 10 ** 4)
                     if cg.element_order(cg.index(prime_ideals_above(D, ell)[0])) > 2)
    qi = prime_ideals_above(D, aux_q)[0]
    qbar = cg.inv(cg.index(qi))
    z = ring.n // psi.e
    psi_qbar = ring.zeta(psi.exp(qbar) * z)
    transfer = pair_div(basis, s1, bracket_psi(lab, psi, ring), ring) * (2 * h)
    ulog = elliptic_unit_log(lab, psi, qi, dlog, ring)
    unit_side = ring(Fraction(-h, 3)) * ulog
    inst.update({"basepoint": basis.labels()[x], "aux_q": aux_q, "order_q": q_order})
    out.append(record("cm-G-vs-transfer", inst, lhs, transfer, ring, B, lhs == transfer, t0))
    t1 = time.perf_counter()
    ok3 = (ring(1) - psi_qbar) * transfer == unit_side
    out.append(record("cm-transfer-vs-units", inst, (ring(1) - psi_qbar) * transfer, unit_side,
                      ring, B, ok3, t1))
    # conjecture form: m <G, S> = log red(u'_g), u'_g = -(h n / (1 - psi(qbar))) u_g,
    # log red(u_g) = 2 log u_{psi,q}
    t2 = time.perf_counter()
    cof, n = _galois_cofactor(psi.exp(qbar), psi.e, ring)
    m = 6 * n
    conj_rhs = ring(0) - ring(2 * h) * cof * ulog
    ok_m = lhs * ring(m) == conj_rhs and (6 * n) % m == 0
    out.append(record("cm-conjecture-form", inst, lhs * ring(m), conj_rhs, ring, B, ok_m, t2,
                      multiplier=m))
    if reverify:
        t3 = time.perf_counter()
        lam2, _, _ = _functional(basis, 2 * B, dlog)
        G2 = G_definite(D, N, psi1, 2 * B, ring, q=q_order, cg=cg)
        lhs2 = lam2(G2)
        out.append(record("cm-reverify-doubled", inst, lhs2, transfer, ring, 2 * B,
                          lhs2 == transfer, t3))
    return out


def trace_identity_check(D, N, psi_index=0, B=31, modulus=10 ** 9 + 7):
    """a_m(G) = 4 a_m(Theta([1] (x) [psi])) for m < B (exact up to the large modulus)."""
    from .quad import ClassGroupTable
    from .quat import G_definite, find_aux_prime
    from .ssmod import SSBasis, bracket_psi, theta_correspondence
    t0 = time.perf_counter()
    cg = ClassGroupTable(D)
    grp = cg.group()
    psi1 = [c for c in grp.characters() if not c.is_trivial()][psi_index]
    psi = psi1 ** 2
    ring = CycRing(grp.exponent, modulus)
    basis = SSBasis(N)
    q_order = find_aux_prime(D, N)
    G = G_definite(D, N, psi1, B, ring, q=q_order, cg=cg)
    lab, _ = matched_labeling(basis, D, q_order, B)
    one = bracket_psi(lab, psi ** 0, ring)
    th = theta_correspondence(basis, one, bracket_psi(lab, psi, ring), B, ring)
    ok = all(G[m] == th[m] * 4 for m in range(B))
    return record("cm-trace-identity", {"D": D, "N": N, "psi1": psi_index},
                  [G[m] for m in range(B)], [th[m] * 4 for m in range(B)], ring, B, ok, t0)


# ---------------------------------------------------------------- real quadratic side

def rm_verify(D, N, p=None, t=None, psi_index=0, nchoice=0, bound=None, reverify=True):
    from .rmcycles import rm_endtoend
    if p is None:
        p, t = _default_prime(N)
    t = t or 1
    inst = {"D": D, "N": N, "p": p, "t": t, "psi1": psi_index, "nchoice": nchoice}
    t0 = time.perf_counter()
    r = rm_endtoend(D, N, p, t, psi_index, nchoice, bound)
    inst.update(r["instance"])
    out = []
    # orientation convention of the cycles fixes the global sign: lhs = -rhs
    ok = r["sign"] in (-1, 0)
    out.append(record("rm-endtoend", inst, r["lhs"], r["rhs"], r["ring"], r["bound"], ok, t0,
                      sign=r["sign"], trivial=r["trivial"], multiplier=REAL_MULTIPLIER))
    t1 = time.perf_counter()
    out.append(record("rm-cycle-form", inst, r["rhs_cycles"], r["rhs"], r["ring"], r["bound"],
                      r["rhs_cycles"] == r["rhs"], t1))
    out.append(record("rm-kappa1-gamma1", inst, r["kappa1_gamma1"], r["kappa1_expected"],
                      r["ring"], r["bound"], r["kappa1_gamma1"] == r["kappa1_expected"], t1))
    out.append(record("rm-kappa0-gamma-psi", inst, r["kappa0_gamma_psi"], r["kappa0_expected"],
                      r["ring"], r["bound"], r["kappa0_gamma_psi"] == r["kappa0_expected"], t1))
    if reverify:
        t2 = time.perf_counter()
        r2 = rm_endtoend(D, N, p, t, psi_index, nchoice, 2 * r["bound"])
        out.append(record("rm-reverify-doubled", inst, r2["lhs"], r2["rhs"], r2["ring"],
                          r2["bound"], r2["sign"] == r["sign"], t2, sign=r2["sign"]))
    return out


def rm_intersection_check(D, N, B=31, nchoice=0):
    """Geometric intersection series = Theta^sharp / 4 for all pairs of narrow classes."""
    from .rmcycles import RMSetup
    t0 = time.perf_counter()
    S = RMSetup(D, N, nchoice)
    out = []
    for c1 in range(S.h):
        for c2 in range(S.h):
            R1, R2 = S.level_one_rep(c1), S.level_one_rep(c2)
            sharp = S.theta_sharp(R1 * R2, R1 * R2.conj(), B).coeffs
            geo = S.intersection_series(c1, c2, B).coeffs
            out.append(record("rm-intersection", {"D": D, "N": N, "classes": [c1, c2]},
                              [4 * g for g in geo], sharp, "ZZ", B,
                              [4 * g for g in geo] == sharp, t0))
    return out


# ---------------------------------------------------------------- Eisenstein suite

def solve_eisenstein_a0(basis, B, dlog, primes):
    """a_0(X) for X in M_2 mod p^t with (T_l - l - 1) X = -(l - 1) log(l) E_2^(N).

    X is determined up to multiples of E_2^(N), whose constant term vanishes
    mod p^t, so a_0(X) is well defined; an ambiguous solution raises."""
    from .coeffs import solve_mod
    from .errors import ContradictionError, Indeterminate
    from .ssmod import weight2_span
    M = dlog.modulus
    R = ModRing(M)
    span, hecke = weight2_span(basis, B, R)
    G = [[_int(c) % M for c in g] for g in span]
    n = len(G)
    rows, rhs = [], []
    for ell in primes:
        if ell == basis.N:
            continue
        lg = dlog.log_int(ell)
        TG = [[_int(c) % M for c in hecke(ell, k)] for k in range(n)]
        for m in range(B):
            rows.append([(TG[k][m] - (ell + 1) * G[k][m]) % M for k in range(n)])
            rhs.append(-(ell - 1) * lg * G[0][m] % M)
    sol = solve_mod(rows, rhs, M)
    if sol is None:
        raise ContradictionError("no weight-2 form satisfies the Eisenstein relations")
    c, kernel = sol
    a0 = sum(c[k] * G[k][0] for k in range(n)) % M
    for kap in kernel:
        if sum(kap[k] * G[k][0] for k in range(n)) % M:
            raise Indeterminate("constant term not determined by the relations")
    return a0


def eisenstein_check(N, p=None, t=None, anchor=None, bound=None, corrupt=None, reverify=True):
    """E' Hecke relations, U_N-fixedness, the kappa_1^+ symbol relation, the Sigma_1
    relations and the Merel constant, in Z/p^t.  ``corrupt=(name, index)`` perturbs
    one coefficient of the named object (test of the test)."""
    from .rmcycles import kappa1_hecke_defect
    from .ssmod import SSBasis, hecke_matrix, sigma0, sigma1_poly
    if p is None:
        p, t = _default_prime(N)
    if t is None:
        t = factorint(N - 1).get(p, 0)
    M = p ** t
    R = ModRing(M)
    dlog = build_dlog(N, p, t, anchor)
    B0 = bound or sturm_bound(N) + 1
    inst = {"N": N, "p": p, "t": t}
    out = []
    primes = [ell for ell in primerange(2, 14) if ell != N]

    def bad(name):
        return corrupt is not None and corrupt[0] == name

    for B in ((B0, 2 * B0) if reverify else (B0,)):
        t0 = time.perf_counter()
        Lmax = max(primes) * B
        E = eprime_series(N, p, t, dlog, max(Lmax, N * B) + 1)
        if bad("eprime"):
            E.coeffs[corrupt[1]] = E.coeffs[corrupt[1]] + R(1)
        E2 = standard_series("E2N", N, B, R)
        for ell in primes:
            TE = E.hecke(ell, level=N)
            lg = dlog.log_int(ell)
            lhs = [TE[n] - E[n] * (ell + 1) for n in range(B)]
            rhs = [E2[n] * (-(ell - 1) * lg) for n in range(B)]
            out.append(record("eprime-hecke", dict(inst, ell=ell), lhs, rhs, R, B, lhs == rhs, t0))
        t0 = time.perf_counter()
        UE = [E[N * n] for n in range(B)]
        lhs = [E[n] for n in range(B)]
        out.append(record("eprime-UN-fixed", inst, UE, lhs, R, B, UE == lhs, t0))

        # kappa_1^+ on {0, inf}
        t0 = time.perf_counter()
        for ell in primes:
            vals = {kappa1_hecke_defect(ell, dlog, zi) for zi in (0, 1, 7)}
            want = (ell - 1) * dlog.log_int(ell) % M
            got = vals.pop() if len(vals) == 1 else None
            if bad("kappa1"):
                got = (got or 0) + 1
            out.append(record("kappa1-symbol", dict(inst, ell=ell), got, want, R, B,
                              got == want, t0))

        # Sigma_1 relations on the supersingular side
        t0 = time.perf_counter()
        basis = SSBasis(N)
        s0 = [_int(x) for x in sigma0(basis, M)]
        s1 = [_int(x) % M for x in sigma1_poly(basis, p, t, dlog)]
        if bad("sigma1"):
            s1[corrupt[1]] = (s1[corrupt[1]] + 1) % M
        for ell in primes:
            T = hecke_matrix(basis, ell)
            n = len(basis)
            Ts1 = [sum(T[i][j] * s1[j] for j in range(n)) % M for i in range(n)]
            lhs = [(Ts1[i] - (ell + 1) * s1[i]) % M for i in range(n)]
            rhs = [(ell - 1) * dlog.log_int(ell) * s0[i] % M for i in range(n)]
            out.append(record("sigma1-hecke", dict(inst, ell=ell), lhs, rhs, R, B, lhs == rhs, t0))

        # Merel constant: a_0 of the element cut out by the Hecke relations
        t0 = time.perf_counter()
        a0 = solve_eisenstein_a0(basis, B, dlog, primes)
        mer = merel_constant(N, p, t, dlog).value % M
        if bad("merel"):
            mer = (mer + 1) % M
        out.append(record("merel-constant", inst, a0, mer, R, B, a0 == mer, t0))
    return out


# ---------------------------------------------------------------- inspection

def ss_inspect(N, p=None, t=None, anchor=None):
    from .ssmod import SSBasis, sigma0, sigma1_poly
    t0 = time.perf_counter()
    basis = SSBasis(N)
    info = {"N": N, "labels": basis.labels(), "weights": list(basis.weights),
            "mass": str(sum(Fraction(1, w) for w in basis.weights))}
    if p is not None or admissible_primes(N):
        if p is None:
            p, t = _default_prime(N)
        t = t or 1
        dlog = build_dlog(N, p, t, anchor)
        M = p ** t
        info["sigma0"] = sigma0(basis, M)
        info["sigma1"] = [_int(x) % M for x in sigma1_poly(basis, p, t, dlog)]
        info.update({"p": p, "t": t})
    mass_ok = sum(Fraction(1, 2 * w) for w in basis.weights) == Fraction(N - 1, 24)
    return [record("ss-inspect", info, info["mass"], str(Fraction(N - 1, 12)), "QQ", None,
                   mass_ok, t0)]


# ---------------------------------------------------------------- instance search and sweep

def search_instances(kind="cm", max_disc=0, max_level=0, min_level=5):
    """Admissible (D, N, p, t) with |D| <= max_disc, N <= max_level.

    cm: D < 0 prime discriminant with nontrivial class group, N inert, p > 3, p^t || N-1.
    rm: D > 0 odd fundamental with norm +1 units and even narrow class number, N split.
    """
    from .quad import ClassGroupTable, fundamental_unit, is_fundamental_odd
    from .errors import UnsupportedField
    out = []
    for a in range(3, max_disc + 1):
        D = -a if kind == "cm" else a
        if not is_fundamental_odd(D):
            continue
        if kind == "cm":
            if not isprime(a) or ClassGroupTable(D).order < 3:
                continue
        else:
            try:
                fundamental_unit(D)
            except UnsupportedField:
                continue
        want = -1 if kind == "cm" else 1
        for N in primerange(min_level, max_level + 1):
            if D % N == 0 or legendre(D % N, N) != want:
                continue
            for p, t in admissible_primes(N):
                out.append({"kind": kind, "D": D, "N": N, "p": p, "t": t})
    return out


def run_instance(inst):
    try:
        if inst["kind"] == "cm":
            return cm_verify(inst["D"], inst["N"], inst["p"], inst["t"], inst.get("psi1", 0))
        return rm_verify(inst["D"], inst["N"], inst["p"], inst["t"], inst.get("psi1", 0))
    except DHeckeError as exc:
        # repeated CM roots are a property of the instance, not a failed identity
        verdict = "skip" if isinstance(exc, DegenerateInstance) else "error"
        return [{"check": inst["kind"] + "-verify", "instance": inst, "lhs": None, "rhs": None,
                 "ring": None, "bound": None, "verdict": verdict, "ms": 0,
                 "error": "%s: %s" % (type(exc).__name__, exc)}]


def sweep(instances, jobs=1):
    """Run instances (in parallel when jobs > 1); output order follows the input."""
    if jobs <= 1:
        results = [run_instance(i) for i in instances]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(run_instance, instances))
    return [r for rs in results for r in rs]


# ---------------------------------------------------------------- CLI

def _parser():
    ap = argparse.ArgumentParser(prog="dhecke", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(sp):
        sp.add_argument("--level", type=int)
        sp.add_argument("--prime", type=int)
        sp.add_argument("--prime-power", type=int, default=None)
        sp.add_argument("--log-anchor", type=int, nargs=2, metavar=("A", "V"))
        sp.add_argument("--bound", type=int)
        sp.add_argument("--out")

    for name in ("cm-verify", "rm-verify"):
        sp = sub.add_parser(name)
        common(sp)
        sp.add_argument("--disc", type=int, required=True)
        sp.add_argument("--character", type=int, default=0)
        if name == "cm-verify":
            sp.add_argument("--aux-q", type=int)
    sp = sub.add_parser("eisenstein-check")
    common(sp)
    sp = sub.add_parser("ss-inspect")
    common(sp)
    sp = sub.add_parser("sweep")
    sp.add_argument("--disc", type=int, required=True, help="bound on |D| (sign picks cm/rm)")
    sp.add_argument("--level", type=int, required=True, help="bound on N")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--out")
    return ap


def main(argv=None):
    args = _parser().parse_args(argv)
    anchor = tuple(args.log_anchor) if getattr(args, "log_anchor", None) else None
    t = getattr(args, "prime_power", None)
    if args.cmd == "cm-verify":
        recs = cm_verify(args.disc, args.level, args.prime, t, args.character, args.aux_q,
                         anchor, args.bound)
    elif args.cmd == "rm-verify":
        recs = rm_verify(args.disc, args.level, args.prime, t, args.character, bound=args.bound)
    elif args.cmd == "eisenstein-check":
        recs = eisenstein_check(args.level, args.prime, t, anchor, args.bound)
    elif args.cmd == "ss-inspect":
        recs = ss_inspect(args.level, args.prime, t, anchor)
    else:
        kind = "cm" if args.disc < 0 else "rm"
        recs = sweep(search_instances(kind, abs(args.disc), args.level), args.jobs)
    lines = [json.dumps(r, sort_keys=True) for r in recs]
    if args.out:
        with open(args.out, "a") as fh:
            fh.write("\n".join(lines) + "\n")
    else:
        print("\n".join(lines))
    return 0 if all(r["verdict"] in ("pass", "skip") for r in recs) else 1


if __name__ == "__main__":
    sys.exit(main())

"""The supersingular module in characteristic N: basis, Brandt matrices, the
Eisenstein vectors Sigma_0 and Sigma_1, CM labelings and elliptic-unit logs."""
from fractions import Fraction
from functools import lru_cache
from math import gcd

import numpy as np
from sympy.ntheory import isprime

from .coeffs import CycRing, legendre, FiniteField, ModRing, PadicScalar, solve_mod
from .ecurve import (curve_from_j, delta_of, order_ell_subgroups, peval, pdivmod,
                     roots_in_field, velu)
from .errors import (ContradictionError, DegenerateInstance, DomainError,
                     IncompleteEnumeration, InvalidInstance, LabelingError,
                     UnsupportedDiscriminant)
from .qseries import _eisenstein_q
from sympy import divisors


def _sigma_mod(n, k, N):
    return sum(pow(d, k, N) for d in divisors(n)) % N

# ---------------------------------------------------------------- series mod N (numpy)


def _conv(a, b, n, N):
    """First n coefficients of a*b mod N (int64 arrays)."""
    out = np.convolve(a[:n], b[:n])[:n] % N
    if len(out) < n:
        out = np.concatenate([out, np.zeros(n - len(out), dtype=np.int64)])
    return out


def _inv_series(a, n, N):
    """Inverse of a power series with unit constant term, n terms, mod N."""
    g = np.array([pow(int(a[0]), -1, N)], dtype=np.int64)
    k = 1
    while k < n:
        k = min(2 * k, n)
        fg = _conv(a, g, k, N)
        t = (-fg) % N
        t[0] = (t[0] + 2) % N
        g = _conv(g, t, k, N)
    return g[:n]


@lru_cache(maxsize=32)
def _euler_mod(n, N):
    out = np.zeros(n, dtype=np.int64)
    k = 0
    while True:
        hit = False
        for kk in ((k, -k) if k else (0,)):
            e = kk * (3 * kk - 1) // 2
            if e < n:
                out[e] += -1 if kk % 2 else 1
                hit = True
        if not hit and k > 0:
            break
        k += 1
    return out % N


@lru_cache(maxsize=32)
def delta_over_q_mod(n, N):
    """Delta/q = prod (1-q^m)^24, first n coefficients mod N."""
    e = _euler_mod(n, N)
    r = np.zeros(n, dtype=np.int64)
    r[0] = 1
    b = e
    k = 24
    while k:
        if k & 1:
            r = _conv(r, b, n, N)
        k >>= 1
        if k:
            b = _conv(b, b, n, N)
    return r


def eisenstein_mod(k, n, N):
    """E_k (a_0 = 1) mod N; needs the normalising constant to be N-integral."""
    c = _eisenstein_q(k, 2)[1]  # -2k/B_k
    if gcd(c.denominator, N) != 1:
        raise DomainError("E_%d is not N-integral" % k)
    cN = c.numerator * pow(c.denominator, -1, N) % N
    out = np.zeros(n, dtype=np.int64)
    out[0] = 1
    for m in range(1, n):
        out[m] = cN * _sigma_mod(m, k - 1, N) % N
    return out


@lru_cache(maxsize=32)
def j_series_mod(n, N):
    """Coefficients of q*j(q) (i.e. j from q^{-1}) mod N, n terms (N may be composite)."""
    E4 = eisenstein_mod(4, n, N)
    E43 = _conv(_conv(E4, E4, n, N), E4, n, N)
    return _conv(E43, _inv_series(delta_over_q_mod(n, N), n, N), n, N)


# ---------------------------------------------------------------- modular polynomials mod N

class _Laurent:
    """Laurent series mod N: val + coefficient array (absolute precision val+len)."""

    __slots__ = ("val", "c", "N")

    def __init__(self, val, c, N):
        self.val, self.c, self.N = val, np.asarray(c, dtype=np.int64) % N, N
        self._normalize()

    def _normalize(self):
        nz = np.nonzero(self.c)[0]
        if len(nz) and nz[0] > 0:
            k = int(nz[0])
            self.c = self.c[k:]
            self.val += k

    @property
    def prec(self):
        return self.val + len(self.c)

    def __mul__(self, o):
        if not isinstance(o, _Laurent):
            return _Laurent(self.val, self.c * (int(o) % self.N), self.N)
        val = self.val + o.val
        prec = min(self.val + o.prec, o.val + self.prec)
        n = prec - val
        if n <= 0:
            return _Laurent(prec, [], self.N)
        return _Laurent(val, _conv(self.c, o.c, n, self.N), self.N)

    def __add__(self, o):
        lo = min(self.val, o.val)
        hi = min(self.prec, o.prec)
        out = np.zeros(max(hi - lo, 0), dtype=np.int64)
        for s in (self, o):
            seg = s.c[: max(hi - s.val, 0)]
            out[s.val - lo: s.val - lo + len(seg)] += seg
        return _Laurent(lo, out, self.N)

    def __neg__(self):
        return _Laurent(self.val, -self.c, self.N)

    def __sub__(self, o):
        return self + (-o)

    def coeff(self, e):
        if e < self.val:
            return 0
        if e >= self.prec:
            raise ContradictionError("coefficient beyond precision")
        return int(self.c[e - self.val])

    def truncate(self, prec):
        return _Laurent(self.val, self.c[: max(prec - self.val, 0)], self.N)


def _j_powers(N, rmax, prec):
    """[J^0, ..., J^rmax] as _Laurent mod N, each with absolute precision >= prec."""
    n = prec + rmax + 2
    J = _Laurent(-1, j_series_mod(n, N), N)
    pows = [_Laurent(0, np.concatenate([[1], np.zeros(n - 1, dtype=np.int64)]), N)]
    for _ in range(rmax):
        pows.append(pows[-1] * J)
    return pows


def _to_poly_in_j(f, pows, deg, check_mod=None):
    """Coefficients P[0..deg] (mod f.N) with f = P(j), checking the remainder mod check_mod."""
    N = check_mod or f.N
    P = [0] * (deg + 1)
    rem = f
    for k in range(deg, 0, -1):
        c = rem.coeff(-k)
        if c:
            P[k] = c
            rem = rem - pows[k] * c
    P[0] = rem.coeff(0) if rem.prec > 0 else 0
    for e in range(rem.val, rem.prec):
        if e == 0:
            continue
        if rem.coeff(e) % N:
            raise ContradictionError("not a polynomial in j (residual at q^%d)" % e)
    return P


def _vp_factorial(n, p):
    v, pk = 0, p
    while pk <= n:
        v += n // pk
        pk *= p
    return v


@lru_cache(maxsize=64)
def modular_polynomial_mod(ell, N):
    """Phi_ell(X, Y) mod N as an (ell+2)x(ell+2) integer matrix c[a][b] (X^a Y^b).

    Computed from q-expansions: the ell conjugates j(zeta^k q^{1/ell}) give
    power sums ell * U_ell(j^r); Newton's identities give their elementary
    symmetric functions, which are nearly holomorphic, and the last root
    j(q^ell) is multiplied in before each coefficient is rewritten as a
    polynomial in j.  Newton divides by k <= ell, so the series are carried
    mod N^(1 + v_N(ell!)) and only the final answer is reduced mod N.
    """
    if not (isprime(ell) and isprime(N)) or ell == N:
        raise DomainError("need distinct primes ell, N")
    M = N ** (1 + _vp_factorial(ell, N))
    E = ell + 4
    pows = _j_powers(M, ell + 1, ell * E + ell + 2)
    # power sums of the ell conjugate roots
    P = [None]
    for r in range(1, ell + 1):
        Jr = pows[r]
        lo = -(r // ell)
        coeffs = [ell * Jr.coeff(n * ell) % M for n in range(lo, E)]
        P.append(_Laurent(lo, coeffs, M))
    f = [_Laurent(0, [1] + [0] * (E - 1), M)]
    for k in range(1, ell + 1):
        acc = _Laurent(0, [0] * E, M)
        for i in range(1, k + 1):
            term = f[k - i] * P[i]
            acc = acc + term if (i - 1) % 2 == 0 else acc - term
        v, u = 0, k
        while u % N == 0:
            v, u = v + 1, u // N
        if v:
            if np.any(acc.c % N ** v):
                raise ContradictionError("Newton identity not divisible by %d" % k)
            acc = _Laurent(acc.val, acc.c // N ** v, M)
        f.append(acc * pow(u, -1, M))
    # J(q^ell)
    J1 = pows[1]
    arr = np.zeros((J1.prec + 1) * ell, dtype=np.int64)
    for e in range(J1.val, J1.prec):
        arr[(e + 1) * ell] = J1.coeff(e)
    Jl = _Laurent(-ell, arr, M)
    zero = _Laurent(0, [0] * E, M)
    C = np.zeros((ell + 2, ell + 2), dtype=np.int64)
    for k in range(ell + 2):
        fk = f[k] if k <= ell else zero
        fk1 = f[k - 1] if k >= 1 else zero
        g = fk + Jl * fk1
        if k % 2:
            g = -g
        poly = _to_poly_in_j(g, pows, ell + 1, check_mod=N)
        for b, c in enumerate(poly):
            C[ell + 1 - k][b] = c % N
    if not np.array_equal(C, C.T):
        raise ContradictionError("modular polynomial not symmetric")
    return C


def modpoly_in_X(C, jval):
    """Phi(X, jval) as a polynomial list (constant first) over the field of jval."""
    F = jval.F
    L = C.shape[0]
    jp = [F.one()]
    for _ in range(L - 1):
        jp.append(jp[-1] * jval)
    out = []
    for a in range(L):
        s = F.zero()
        for b in range(L):
            c = int(C[a][b])
            if c:
                s = s + jp[b] * c
        out.append(s)
    while out and out[-1] == 0:
        out.pop()
    return out


def root_multiplicity(f, r):
    m = 0
    lin = [-r, r.F.one()]
    while len(f) > 1:
        q, rem = pdivmod(f, lin)
        if rem:
            break
        f = q
        m += 1
    return m


# ---------------------------------------------------------------- basis

_CM_SEEDS = [(-7, -3375), (-8, 8000), (-11, -32768), (-19, -884736), (-43, -884736000),
             (-67, -147197952000), (-163, -262537412640768000)]


class SSBasis:
    """Supersingular j-invariants in characteristic N, in BFS order from a seed."""

    def __init__(self, N):
        if not isprime(N) or N <= 3:
            raise InvalidInstance("N must be a prime > 3")
        self.N = N
        self.F = FiniteField(N, 2)
        self.js = self._bfs(self._seed())
        self.index = {j.c: i for i, j in enumerate(self.js)}
        self.weights = [2 if j == 1728 else 3 if j == 0 else 1 for j in self.js]
        mass = sum(Fraction(1, 2 * w) for w in self.weights)
        if mass != Fraction(N - 1, 24):
            raise IncompleteEnumeration("mass %s != (N-1)/24" % mass)
        self.frob = [self.index[(j ** N).c] for j in self.js]
        self._hecke = {}

    def _seed(self):
        F, N = self.F, self.N
        if N % 4 == 3:
            return F(1728)
        if N % 3 == 2:
            return F(0)
        for D0, j0 in _CM_SEEDS:
            if legendre(D0, N) == -1:
                return F(j0)
        raise ContradictionError("no seed discriminant")  # pragma: no cover

    def _bfs(self, seed):
        seen = {seed.c: seed}
        order = [seed]
        k = 0
        while k < len(order):
            E = curve_from_j(order[k])
            nb = sorted((velu(E, ker).codomain.j for ker in order_ell_subgroups(E, 2)),
                        key=lambda z: z.c)
            for j in nb:
                if j.c not in seen:
                    seen[j.c] = j
                    order.append(j)
            k += 1
        return order

    def __len__(self):
        return len(self.js)

    def position(self, j):
        return self.index[self.F(j).c]

    def labels(self):
        return [int(j) if j.in_prime_field() else str(j) for j in self.js]

    # ---- Hecke operators

    def brandt(self, ell, method="auto"):
        """B with B[y][x] = #{C of order ell in E_x : E_x/C = E_y}; T_ell e_x = sum_y B[y][x] e_y."""
        key = (ell, method if method != "auto" else None)
        if key in self._hecke:
            return self._hecke[key]
        n = len(self)
        if ell == self.N:
            B = [[0] * n for _ in range(n)]
            for x in range(n):
                B[self.frob[x]][x] = 1
        elif method == "isogeny":
            B = [[0] * n for _ in range(n)]
            for x, j in enumerate(self.js):
                E = curve_from_j(j)
                for ker in order_ell_subgroups(E, ell):
                    B[self.position(velu(E, ker).codomain.j)][x] += 1
        else:
            C = modular_polynomial_mod(ell, self.N)
            B = [[0] * n for _ in range(n)]
            for x, j in enumerate(self.js):
                f = modpoly_in_X(C, j)
                tot = 0
                for y, jy in enumerate(self.js):
                    m = root_multiplicity(f, jy)
                    B[y][x] = m
                    tot += m
                if tot != ell + 1:
                    raise ContradictionError("column sum %d != %d" % (tot, ell + 1))
        self._hecke[key] = B
        return B

    def hecke_m(self, m):
        """Matrix of T_m (all subgroups of order m) via the Hecke recursions."""
        from sympy.ntheory import factorint
        n = len(self)
        key = ("m", m)
        if key in self._hecke:
            return self._hecke[key]
        M = np.eye(n, dtype=object)
        for ell, e in factorint(m).items():
            M = M.dot(self._hecke_prime_power(ell, e))
        B = [[int(M[i][j]) for j in range(n)] for i in range(n)]
        self._hecke[key] = B
        return B

    def _hecke_prime_power(self, ell, e):
        n = len(self)
        T = np.array(self.brandt(ell), dtype=object)
        if ell == self.N:
            R = np.eye(n, dtype=object)
            for _ in range(e):
                R = R.dot(T)
            return R
        prev, cur = np.eye(n, dtype=object), T
        if e == 0:
            return prev
        for _ in range(e - 1):
            prev, cur = cur, T.dot(cur) - ell * prev
        return cur

    def apply(self, B, v):
        n = len(self)
        return [sum(B[y][x] * v[x] for x in range(n) if B[y][x]) for y in range(n)] if v else v


def enumerate_ss(N):
    return SSBasis(N)


def hecke_matrix(basis, ell, method="auto"):
    return basis.brandt(ell, method)


def pairing(basis, u, v):
    """<u, v> = sum w_x u_x v_x."""
    acc = None
    for w, a, b in zip(basis.weights, u, v):
        t = a * b * w
        acc = t if acc is None else acc + t
    return acc


def _apply(B, v, zero):
    n = len(v)
    out = []
    for y in range(n):
        s = zero
        for x in range(n):
            if B[y][x]:
                s = s + v[x] * B[y][x]
        out.append(s)
    return out


# ---------------------------------------------------------------- Eisenstein vectors

def sigma0(basis, modulus):
    R = ModRing(modulus)
    return [R(Fraction(1, w)) for w in basis.weights]


def en1_over_delta_poly(N):
    """P with E_{N+1}^12 / Delta^{N+1} = P(j) mod N (E_{N+1} normalised a_0 = 1)."""
    n = N + 6
    E = eisenstein_mod(N + 1, n, N)
    E12 = np.zeros(n, dtype=np.int64)
    E12[0] = 1
    for _ in range(12):
        E12 = _conv(E12, E, n, N)
    Dinv = _inv_series(delta_over_q_mod(n, N), n, N)
    Dpow = np.zeros(n, dtype=np.int64)
    Dpow[0] = 1
    for _ in range(N + 1):
        Dpow = _conv(Dpow, Dinv, n, N)
    f = _Laurent(-(N + 1), _conv(E12, Dpow, n, N), N)
    pows = _j_powers(N, N + 1, 6)
    return _to_poly_in_j(f.truncate(4), pows, N + 1)


def sigma1_poly(basis, p, t, dlog):
    """Sigma_1 = (1/12) sum log P(j_i) e_i / w_i with P = E_{N+1}^12/Delta^{N+1} in j."""
    N = basis.N
    M = p ** t
    R = ModRing(M)
    P = en1_over_delta_poly(N)
    out = []
    for j, w in zip(basis.js, basis.weights):
        v = peval([basis.F(c) for c in P], j)
        if v == 0:
            raise ContradictionError("E_{N+1}^12/Delta^{N+1} vanishes at a supersingular point")
        out.append(R(dlog.dlog_value(v)) * R(Fraction(1, 12 * w)))
    return out


def en1_value(E, N):
    """E_{N+1}(E, dx/y) via its expression in E_4 = -48a, E_6 = 864b (mod N)."""
    coeffs = _en1_in_e4e6(N)
    E4 = -48 * E.a
    E6 = 864 * E.b
    acc = E.F.zero()
    for (i, k), c in coeffs.items():
        acc = acc + (E4 ** i) * (E6 ** k) * c
    return acc


@lru_cache(maxsize=32)
def _en1_in_e4e6(N):
    wt = N + 1
    mons = [(i, (wt - 4 * i) // 6) for i in range(wt // 4 + 1) if (wt - 4 * i) % 6 == 0]
    n = len(mons) + 6
    E4 = eisenstein_mod(4, n, N)
    E6 = eisenstein_mod(6, n, N)
    cols = []
    for i, k in mons:
        s = np.zeros(n, dtype=np.int64)
        s[0] = 1
        for _ in range(i):
            s = _conv(s, E4, n, N)
        for _ in range(k):
            s = _conv(s, E6, n, N)
        cols.append(s)
    target = eisenstein_mod(wt, n, N)
    A = [[int(cols[c][r]) for c in range(len(mons))] for r in range(n)]
    sol = solve_mod(A, [int(x) for x in target], N)
    if sol is None:
        raise ContradictionError("E_{N+1} not in the span of E4^i E6^k")
    return {m: c for m, c in zip(mons, sol[0]) if c}


def sigma1_solve(basis, p, t, dlog, primes):
    """A solution X of (T_l - (l+1)) X = (l-1) log(l) Sigma_0 for all l in primes."""
    M = p ** t
    n = len(basis)
    s0 = [x.value for x in sigma0(basis, M)]
    A, b = [], []
    for ell in primes:
        B = basis.brandt(ell)
        lg = dlog.log_int(ell) if ell != basis.N else None
        if ell == basis.N:
            continue
        for y in range(n):
            A.append([(B[y][x] - (ell + 1 if x == y else 0)) % M for x in range(n)])
            b.append((ell - 1) * lg * s0[y] % M)
    sol = solve_mod(A, b, M)
    if sol is None:
        raise ContradictionError("Sigma_1 system inconsistent")
    R = ModRing(M)
    return [R(v) for v in sol[0]], [[R(v) for v in k] for k in sol[1]]


# ---------------------------------------------------------------- Hilbert class polynomials

@lru_cache(maxsize=1)
def _hilbert_table():
    import json
    from importlib.resources import files
    data = json.loads(files("dhecke").joinpath("data/hilbert.json").read_text())
    return {r["D"]: (r["h"], [int(c) for c in r["coeffs"]]) for r in data["records"]}


def hilbert_class_poly(D):
    """Integer coefficients of H_D, constant term first (embedded table)."""
    tab = _hilbert_table()
    if D not in tab:
        raise UnsupportedDiscriminant("H_%d not in the embedded table" % D)
    return list(tab[D][1])


def cm_roots(basis, D, allow_repeated=False):
    """Roots of H_D in F_{N^2} as {basis index: multiplicity}; each must be supersingular."""
    F = basis.F
    H = [F(c % basis.N) for c in hilbert_class_poly(D)]
    roots = sorted(set(roots_in_field(H)), key=lambda z: z.c)
    mult = {}
    for r in roots:
        if r.c not in basis.index:
            raise ContradictionError("CM root %s is not supersingular" % r)
        mult[basis.position(r)] = root_multiplicity(H, r)
    if sum(mult.values()) != len(H) - 1:
        raise ContradictionError("H_%d does not split over F_{N^2}" % D)  # pragma: no cover
    if len(roots) < len(H) - 1 and not allow_repeated:
        raise DegenerateInstance("H_%d has repeated roots mod %d; choose another N" % (D, basis.N))
    return mult


# ---------------------------------------------------------------- CM labelings

class CMLabeling:
    """Association class index -> basis index, compatible with small split primes.

    label[a] is the reduction of the curve attached to class a; the identity
    class maps to the chosen basepoint (the choice of a prime above N).
    """

    def __init__(self, basis, D, cg, labels, primes, basepoint, direction):
        self.basis, self.D, self.cg = basis, D, cg
        self.labels = labels
        self.primes = primes
        self.basepoint, self.direction = basepoint, direction

    @property
    def h(self):
        return len(self.labels)

    def point(self, a):
        return self.labels[a]

    def inverse(self):
        """The labeling a -> label(a^{-1}) (the opposite prime direction)."""
        lab = [self.labels[self.cg.inv(a)] for a in range(self.h)]
        return CMLabeling(self.basis, self.D, self.cg, lab, self.primes, self.basepoint,
                          1 - self.direction)


def _split_primes(D, N, bound):
    from sympy import primerange
    for ell in primerange(2, bound):
        if ell == N or D % ell == 0:
            continue
        if (ell == 2 and D % 8 == 1) or (ell > 2 and legendre(D, ell) == 1):
            yield ell


def _labelings(basis, cg, mult, base, cons):
    """All maps classes -> roots (hitting each root with its multiplicity), 0 -> base, satisfying cons."""
    h = cg.order
    lab = [None] * h
    lab[0] = base
    left = dict(mult)
    left[base] -= 1
    out = []

    def ok(a):
        for ell, c, B in cons:
            for b in (cg.mul(a, c), cg.mul(a, cg.inv(c))):
                if lab[b] is not None and B[lab[b]][lab[a]] == 0:
                    return False
        return True

    def rec(a):
        if a == h:
            out.append(list(lab))
            return
        for x in sorted(left):
            if not left[x]:
                continue
            lab[a] = x
            if ok(a):
                left[x] -= 1
                rec(a + 1)
                left[x] += 1
            lab[a] = None

    if ok(0):
        rec(1)
    return out


def cm_labeling(basis, D, basepoint=0, direction=0, prime_bound=60, allow_repeated=False):
    """Label the roots of H_D mod N by ideal classes.

    Constraints come from split primes l: label(a l) must be l-isogenous to
    label(a).  Primes are added until the only solutions are a labeling and
    its inverse (the l versus l' ambiguity); ``direction`` picks one.  With
    ``allow_repeated`` a root of multiplicity m labels m classes, and the
    instance is accepted only if the constraints still leave at most two
    labelings.
    """
    from .quad import ClassGroupTable, is_fundamental_odd, prime_ideals_above
    if D >= 0 or not is_fundamental_odd(D):
        raise DomainError("D must be a negative odd fundamental discriminant")
    N = basis.N
    if legendre(D, N) != -1:
        raise DomainError("N must be inert in Q(sqrt %d)" % D)
    cg = ClassGroupTable(D)
    mult = cm_roots(basis, D, allow_repeated)
    if not 0 <= basepoint < len(mult):
        raise DomainError("basepoint out of range")
    base = sorted(mult)[basepoint]
    h = cg.order
    expected = 1 if all(cg.pow(a, 2) == 0 for a in range(h)) else 2
    if len(mult) < h:
        expected = 2
    cons, sols = [], None
    bound = max(prime_bound, N) if h > 1 else 0
    for ell in _split_primes(D, N, bound):
        c = cg.index(prime_ideals_above(D, ell)[0])
        if c == 0 or any(c in (c2, cg.inv(c2)) for _, c2, _ in cons):
            continue
        cons.append((ell, c, basis.brandt(ell)))
        sols = _labelings(basis, cg, mult, base, cons)
        if len(sols) <= expected and _generates(cg, [c2 for _, c2, _ in cons]):
            break
    if h == 1:
        sols = [[base]]
    if not sols:
        raise LabelingError("no labeling compatible with the isogeny graph")
    if len(sols) > expected or (len(sols) < expected and len(mult) == h):
        raise DegenerateInstance("labeling not pinned down (%d candidates)" % len(sols))
    sols.sort()
    d = direction % len(sols)
    return CMLabeling(basis, D, cg, sols[d], [(e, c) for e, c, _ in cons], basepoint, d)


def _generates(cg, gens):
    seen, frontier = {0}, [0]
    while frontier:
        a = frontier.pop()
        for g in gens:
            b = cg.mul(a, g)
            if b not in seen:
                seen.add(b)
                frontier.append(b)
    return len(seen) == cg.order


def bracket_psi(lab, psi, ring):
    """[psi] = sum_a psi(a) e_{label(a)} with values in ring = CycRing(n, M)."""
    out = [ring(0) for _ in range(len(lab.basis))]
    for a, x in enumerate(lab.labels):
        out[x] = out[x] + psi.value(a, ring)
    return out


def pair_div(basis, u, v, ring):
    acc = ring(0)
    for w, a, b in zip(basis.weights, u, v):
        acc = acc + ring(a) * ring(b) * w
    return acc


def heegner_steps(lab, qclass, q):
    """For each class a, the q-isogenies from label(a) landing on label(a q)."""
    basis = lab.basis
    steps = []
    for a, x in enumerate(lab.labels):
        y = lab.labels[lab.cg.mul(a, qclass)]
        E = curve_from_j(basis.js[x])
        cand = []
        for ker in order_ell_subgroups(E, q):
            st = velu(E, ker)
            if st.codomain.j == basis.js[y]:
                cand.append(st)
        if not cand:
            raise LabelingError("no %d-isogeny from label(%d) to label(a q)" % (q, a))
        steps.append(cand)
    return steps


def elliptic_unit_log(lab, psi, qideal, dlog, ring):
    """sum_a psi(a) log u_q(eta_q(A_a)) in ring, u_q = Delta(E)/Delta(E') (normalised)."""
    from .quad import QuadIdeal  # noqa: F401  (qideal is a QuadIdeal)
    q = qideal.norm()
    if lab.D % q == 0 or q == lab.basis.N:
        raise DomainError("q must not divide D N")
    qc = lab.cg.index(qideal)
    acc = ring(0)
    for a, cand in enumerate(heegner_steps(lab, qc, int(q))):
        logs = {dlog.dlog_value(st.delta_ratio()) for st in cand}
        if len(logs) != 1:
            raise LabelingError("the q-isogeny realising a*q is ambiguous at class %d" % a)
        acc = acc + psi.value(a, ring) * logs.pop()
    return acc


def check_elliptic_units(D, N, p, psi=None, q=None, t=1, qchoice=0, basepoint=0,
                         direction=0, anchor=None, basis=None, allow_repeated=True):
    """Compare (1 - psi(qbar)) <Sigma_1, [psi]> with -(1/6) log u_{psi,q} in Z/p^t[zeta]."""
    from .coeffs import build_dlog
    from .quad import prime_ideals_above
    basis = basis or SSBasis(N)
    lab = cm_labeling(basis, D, basepoint=basepoint, direction=direction,
                      allow_repeated=allow_repeated)
    grp = lab.cg.group()
    chars = [c for c in grp.characters() if not c.is_trivial()]
    if psi is None:
        if not chars:
            raise DegenerateInstance("class group of %d is trivial" % D)
        psi = chars[0]
    elif isinstance(psi, int):
        psi = chars[psi]
    if q is None:
        q = next(ell for ell in _split_primes(D, N, 10 ** 4)
                 if lab.cg.element_order(lab.cg.index(prime_ideals_above(D, ell)[0])) > 2)
    qi = prime_ideals_above(D, q)[qchoice]
    M = p ** t
    ring = CycRing(grp.exponent, M)
    dl = build_dlog(N, p, t, anchor)
    s1 = sigma1_poly(basis, p, t, dl)
    br = bracket_psi(lab, psi, ring)
    qbar = lab.cg.inv(lab.cg.index(qi))
    lhs = (ring(1) - psi.value(qbar, ring)) * pair_div(basis, s1, br, ring)
    rhs = elliptic_unit_log(lab, psi, qi, dl, ring) * ring(Fraction(-1, 6))
    return {"D": D, "N": N, "p": p, "t": t, "q": q, "psi": list(psi.ks),
            "labels": [basis.labels()[x] for x in lab.labels],
            "lhs": lhs.to_list(), "rhs": rhs.to_list(), "pass": lhs == rhs}


# ---------------------------------------------------------------- Theta correspondence

def theta_correspondence(basis, phi1, phi2, B, ring):
    """Theta(phi1 (x) phi2) = 1/2 <phi1,S0><phi2,S0> + sum_m <phi1, T_m phi2> q^m, m < B."""
    a0 = ring(Fraction(1, 2)) * ring(sum_entries(phi1, ring)) * ring(sum_entries(phi2, ring))
    out = [a0]
    for m in range(1, B):
        Tm = basis.hecke_m(m)
        out.append(pair_div(basis, phi1, _apply(Tm, [ring(x) for x in phi2], ring(0)), ring))
    return out


def sum_entries(phi, ring):
    """<phi, Sigma_0> = sum of the coordinates."""
    acc = ring(0)
    for x in phi:
        acc = acc + ring(x)
    return acc


def weight2_span(basis, B, ring):
    """Spanning set of M_2(Gamma_0(N)) to B coefficients, with its Hecke action.

    Returns (span, hecke): span[0] = E_2^{(N)}, then Theta(e_i (x) e_j) for
    i <= j; hecke(l, k) is T_l span[k], computed on the supersingular side.
    """
    from .qseries import standard_series
    n = len(basis)
    e2 = standard_series("E2N", basis.N, B, ring)
    span = [[e2[m] for m in range(B)]]
    pairs = [None]
    unit = [[int(k == i) for k in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i, n):
            span.append(theta_correspondence(basis, unit[i], unit[j], B, ring))
            pairs.append((i, j))

    def hecke(ell, k):
        if k == 0:
            return [c * (ell + 1) for c in span[0]]
        i, j = pairs[k]
        Bl = basis.brandt(ell)
        return theta_correspondence(basis, unit[i], [Bl[y][j] for y in range(n)], B, ring)

    return span, hecke

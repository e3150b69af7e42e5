"""Quaternion lattices in B = K + Kj (j^2 = -qN, z j = j z') and their theta series.

Elements are stored by rational coordinates on the basis (1, w, j, w j) with
w = (1 + sqrt D)/2.  Everything is exact.
"""
from fractions import Fraction
from math import gcd

from sympy.ntheory import factorint, isprime

from .coeffs import legendre
from .errors import ContradictionError, DomainError, InvalidAuxiliaryPrime
from .qseries import QExp, theta_from_gram
from .quad import (ClassGroupTable, QuadElem, QuadIdeal, find_generator, is_fundamental_odd,
                   prime_ideals_above)


def _lcm(a, b):
    return a * b // gcd(a, b)


def _qgcd(vals):
    """Positive generator of the Z-module spanned by the rationals vals."""
    num, den = 0, 1
    for v in vals:
        v = Fraction(v)
        den = _lcm(den, v.denominator)
    for v in vals:
        num = gcd(num, int(Fraction(v) * den))
    return Fraction(num, den)


class QuatAlg:
    """B = K + Kj with j^2 = -qN, for K = Q(sqrt D), D < 0 odd."""

    def __init__(self, D, N, q):
        if D >= 0 or not is_fundamental_odd(D):
            raise DomainError("D must be a negative odd fundamental discriminant")
        self.D, self.N, self.q = D, N, q
        self.c = q * N  # j^2 = -c

    def elem(self, x, y=None):
        D = self.D
        x = x if isinstance(x, QuadElem) else QuadElem(D, 2 * Fraction(x), 0)
        y = QuadElem(D, 0, 0) if y is None else (y if isinstance(y, QuadElem) else QuadElem(D, 2 * Fraction(y), 0))
        return Quat(self, x, y)

    def from_coords(self, v):
        D = self.D
        a, b, c, d = (Fraction(t) for t in v)
        return Quat(self, QuadElem(D, 2 * a + b, b), QuadElem(D, 2 * c + d, d))

    def basis(self):
        return [self.from_coords(v) for v in ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))]

    @property
    def j(self):
        return self.from_coords((0, 0, 1, 0))


class Quat:
    __slots__ = ("A", "x", "y")

    def __init__(self, A, x, y):
        self.A, self.x, self.y = A, x, y

    def __add__(self, o):
        return Quat(self.A, self.x + o.x, self.y + o.y)

    def __sub__(self, o):
        return Quat(self.A, self.x - o.x, self.y - o.y)

    def __mul__(self, o):
        if isinstance(o, QuadElem):
            o = Quat(self.A, o, QuadElem(self.A.D, 0, 0))
        elif not isinstance(o, Quat):
            f = QuadElem(self.A.D, 2 * Fraction(o), 0)
            return Quat(self.A, self.x * f, self.y * f)
        # (x1 + y1 j)(x2 + y2 j) = x1 x2 - c y1 y2' + (x1 y2 + y1 x2') j
        x = self.x * o.x - self.y * o.y.conj() * self.A.c
        y = self.x * o.y + self.y * o.x.conj()
        return Quat(self.A, x, y)

    def __rmul__(self, o):
        if isinstance(o, QuadElem):
            return Quat(self.A, o, QuadElem(self.A.D, 0, 0)) * self
        return self * o

    def conj(self):
        return Quat(self.A, self.x.conj(), -self.y)

    def norm(self):
        return self.x.norm() + self.A.c * self.y.norm()

    def trace(self):
        return self.x.trace()

    def coords(self):
        return tuple(self.x.coords()) + tuple(self.y.coords())

    def __eq__(self, o):
        return isinstance(o, Quat) and self.coords() == o.coords()

    def __hash__(self):
        return hash(self.coords())

    def __repr__(self):
        return "Quat%s" % (self.coords(),)


# ---------------------------------------------------------------- lattices

def _int_hnf(rows):
    """Row Hermite normal form of an integer matrix (nonzero rows only)."""
    rows = [list(r) for r in rows if any(r)]
    if not rows:
        return []
    n = len(rows[0])
    out, piv = [], []
    for col in range(n):
        # Euclid on the column until a single row carries a nonzero entry
        while True:
            nz = [i for i, r in enumerate(rows) if r[col]]
            if len(nz) <= 1:
                break
            k = min(nz, key=lambda i: abs(rows[i][col]))
            p = rows[k]
            for i in nz:
                if i != k:
                    f = rows[i][col] // p[col]
                    rows[i] = [a - f * b for a, b in zip(rows[i], p)]
        if not nz:
            continue
        p = rows.pop(nz[0])
        if p[col] < 0:
            p = [-a for a in p]
        out.append(p)
        piv.append(col)
        rows = [r for r in rows if any(r)]
    for i in range(len(out)):
        c = piv[i]
        for k in range(i):
            f = out[k][c] // out[i][c]
            if f:
                out[k] = [a - f * b for a, b in zip(out[k], out[i])]
    return out


def _rational_hnf(vecs):
    den = 1
    for v in vecs:
        for t in v:
            den = _lcm(den, Fraction(t).denominator)
    rows = [[int(Fraction(t) * den) for t in v] for v in vecs]
    H = _int_hnf(rows)
    return [tuple(Fraction(a, den) for a in r) for r in H]


def _det(M):
    M = [list(map(Fraction, r)) for r in M]
    n = len(M)
    d = Fraction(1)
    for i in range(n):
        p = next((k for k in range(i, n) if M[k][i]), None)
        if p is None:
            return Fraction(0)
        if p != i:
            M[i], M[p] = M[p], M[i]
            d = -d
        d *= M[i][i]
        for k in range(i + 1, n):
            f = M[k][i] / M[i][i]
            if f:
                M[k] = [a - f * b for a, b in zip(M[k], M[i])]
    return d


def _solve(M, b):
    """x with x M = b (M square, rational), or None."""
    n = len(M)
    A = [[Fraction(M[j][i]) for j in range(n)] + [Fraction(b[i])] for i in range(n)]
    for i in range(n):
        p = next((k for k in range(i, n) if A[k][i]), None)
        if p is None:
            return None
        A[i], A[p] = A[p], A[i]
        for k in range(n):
            if k != i and A[k][i]:
                f = A[k][i] / A[i][i]
                A[k] = [a - f * c for a, c in zip(A[k], A[i])]
    return [A[i][n] / A[i][i] for i in range(n)]


class QuatLattice:
    """Full-rank Z-lattice in B, stored as an HNF basis of coordinate vectors."""

    def __init__(self, A, vecs):
        self.A = A
        self.vecs = _rational_hnf(vecs)
        if len(self.vecs) != 4:
            raise DomainError("lattice is not of full rank")

    @classmethod
    def from_elems(cls, A, elems):
        return cls(A, [e.coords() for e in elems])

    def elems(self):
        return [self.A.from_coords(v) for v in self.vecs]

    def gram(self):
        """Gram matrix of tr(x y'), so that v^T G v / 2 = n."""
        E = self.elems()
        return [[(a * b.conj()).trace() for b in E] for a in E]

    def scale(self):
        """n(L): the positive generator of the Z-span of the norms."""
        G = self.gram()
        vals = [G[i][i] / 2 for i in range(4)] + [G[i][k] for i in range(4) for k in range(i + 1, 4)]
        return _qgcd(vals)

    def coords_in(self, v):
        """Coordinates of a coordinate vector on this basis (rational)."""
        return _solve(self.vecs, v)

    def contains(self, x):
        v = x.coords() if isinstance(x, Quat) else x
        c = self.coords_in(v)
        return c is not None and all(t.denominator == 1 for t in c)

    def contains_lattice(self, other):
        return all(self.contains(v) for v in other.vecs)

    def __eq__(self, other):
        return self.vecs == other.vecs

    def __hash__(self):
        return hash(tuple(self.vecs))

    def covolume(self):
        return abs(_det(self.vecs))

    def index_in(self, bigger):
        r = self.covolume() / bigger.covolume()
        if r.denominator != 1:
            raise ContradictionError("not a sublattice")
        return int(r)

    def discriminant(self):
        """det of the trace-form Gram matrix."""
        return _det(self.gram())

    def is_order(self):
        E = self.elems()
        one = self.A.elem(1)
        return self.contains(one) and all(self.contains(a * b) for a in E for b in E)

    def theta(self, B, ring=None):
        """sum over x in L of q^{n(x)/n(L)}, exponents < B."""
        from .coeffs import ZZ
        return theta_from_gram(self.gram(), self.scale(), B, ring or ZZ)


# ---------------------------------------------------------------- orders

class OrderData:
    def __init__(self, lattice, label):
        if not lattice.is_order():
            raise ContradictionError("%s is not closed under multiplication" % label)
        self.lattice = lattice
        self.label = label

    @property
    def A(self):
        return self.lattice.A

    def reduced_discriminant(self):
        d = self.lattice.discriminant()
        r = abs(d)
        s = int(r ** 0.5 + 0.5)
        while s * s > r:
            s -= 1
        while (s + 1) * (s + 1) <= r:
            s += 1
        if s * s != r:
            raise ContradictionError("trace-form discriminant is not a square")
        return s


def check_aux_prime(D, N, q):
    if not (isprime(q) and q % 2):
        raise InvalidAuxiliaryPrime("q must be an odd prime")
    if (q + N) % D:
        raise InvalidAuxiliaryPrime("q must be -N mod D")
    for P in prime_ideals_above(D, q):
        if P.norm() != q or find_generator(P, q) is None:
            raise InvalidAuxiliaryPrime("primes above q must be principal")


def find_aux_prime(D, N, start=3, bound=10 ** 6):
    """Smallest odd prime q = -N mod D whose primes in K are principal."""
    from sympy import nextprime
    q = nextprime(start - 1)
    while q < bound:
        if (q + N) % D == 0 and q != N:
            try:
                check_aux_prime(D, N, q)
                return q
            except InvalidAuxiliaryPrime:
                pass
        q = nextprime(q)
    raise InvalidAuxiliaryPrime("no auxiliary prime below %d" % bound)


def eichler_order(D, N, q):
    """O(q) = o + o j inside B = K + Kj, j^2 = -qN."""
    check_aux_prime(D, N, q)
    A = QuatAlg(D, N, q)
    L = QuatLattice(A, [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)])
    O = OrderData(L, "O(%d)" % q)
    if O.reduced_discriminant() != abs(D) * N * q:
        raise ContradictionError("discriminant of O(q) is not DNq")
    return O


def _kernel_mod(G, ell):
    """Basis of {c in F_ell^n : c G = 0} (row vectors)."""
    n = len(G)
    M = [[int(G[i][k]) % ell for i in range(n)] for k in range(n)]  # rows: equations
    piv_cols, r = [], 0
    for c in range(n):
        p = next((i for i in range(r, n) if M[i][c]), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = pow(M[r][c], -1, ell)
        M[r] = [a * inv % ell for a in M[r]]
        for i in range(n):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [(a - f * b) % ell for a, b in zip(M[i], M[r])]
        piv_cols.append(c)
        r += 1
    free = [c for c in range(n) if c not in piv_cols]
    out = []
    for fc in free:
        v = [0] * n
        v[fc] = 1
        for i, pc in enumerate(piv_cols):
            v[pc] = -M[i][fc] % ell
        out.append(v)
    return out


def _isotropic_lines(L, ell):
    """Vectors u = (1/ell) sum c_i b_i spanning the self-dual superlattices at ell (sorted)."""
    G = L.gram()
    s = L.scale()
    if s != 1:
        raise DomainError("expected an integral lattice with n(L) = 1")
    K = _kernel_mod(G, ell)
    if len(K) != 2:
        raise ContradictionError("dual quotient at %d is not of rank 2" % ell)
    lines = []
    cands = [[(a + t * b) % ell for a, b in zip(K[0], K[1])] for t in range(ell)] + [K[1]]
    for c in cands:
        Q = sum(G[i][k] * c[i] * c[k] for i in range(4) for k in range(4)) / 2
        if Q % (ell * ell) == 0:
            lines.append(tuple(c))
    if len(lines) != 2:
        raise ContradictionError("found %d isotropic lines at %d, expected 2" % (len(lines), ell))
    lines.sort()
    E = L.vecs
    out = []
    for c in lines:
        out.append(tuple(sum(Fraction(ci, ell) * E[i][k] for i, ci in enumerate(c)) for k in range(4)))
    return out


def saturate_maximal(O, S=()):
    """The maximal order M_d containing O, d = prod(S).

    At each prime l | Dq the lattice O has exactly two self-dual integral
    superlattices; the base order M takes the first (in a fixed ordering of
    the isotropic lines) and M_d switches to the second at l in S.
    """
    A = O.A
    primes = sorted(factorint(abs(A.D) * A.q))
    for ell in S:
        if ell not in primes:
            raise DomainError("%d does not divide Dq" % ell)
    vecs = list(O.lattice.vecs)
    for ell in primes:
        u = _isotropic_lines(O.lattice, ell)[1 if ell in S else 0]
        vecs.append(u)
    L = QuatLattice(A, vecs)
    d = 1
    for ell in S:
        d *= ell
    M = OrderData(L, "M_%d" % d)
    if M.reduced_discriminant() != A.N:
        raise ContradictionError("saturated order has discriminant %d" % M.reduced_discriminant())
    return M


def lattice_product(I1, L, I2):
    """Additive span of I1 * L * I2 (ideals of o, L a QuatLattice)."""
    A = L.A
    gens = []
    for a in I1.basis():
        for b in L.elems():
            for c in I2.basis():
                gens.append((A.elem(a) * b * A.elem(c)).coords())
    return QuatLattice(A, gens)


def ideal_theta(I, B, scale_by=1):
    """theta of an ideal of o under the norm form: sum q^{N(x) scale_by / n(I)}."""
    D = I.D
    e1, e2 = I.basis()
    G = [[(a * b.conj()).trace() * scale_by for b in (e1, e2)] for a in (e1, e2)]
    from .coeffs import ZZ
    return theta_from_gram(G, I.norm() * scale_by, B, ZZ)


# ---------------------------------------------------------------- the traced form

def G_definite(D, N, psi1, B, ring, q=None, S=(), cg=None):
    """Tr^{DN}_N(theta_{psi1}(Nz) theta_{psi1^-1}(z)) via 2^a sum psi12(I1')psi12'(I2') theta(I1' M I2).

    psi1 is a Character of the class group table cg (built from D if None);
    with psi2 = psi1^{-1}: psi12 = 1 and psi12' = psi1^2.  D must be prime.
    """
    if not isprime(-D):
        raise DomainError("the traced form is only implemented for -D prime")
    if legendre(D, N) != -1:
        raise DomainError("N must be inert in K")
    cg = cg or ClassGroupTable(D)
    q = q or find_aux_prime(D, N)
    O = eichler_order(D, N, q)
    M = saturate_maximal(O, S)
    psi = psi1 ** 2
    h = cg.order
    a = len(factorint(-D))
    thetas = {}
    coeffs = [ring(0) for _ in range(B)]
    for i1 in range(h):
        I1c = cg.reps[i1].conj()
        for i2 in range(h):
            I2 = cg.reps[i2]
            key = (i1, i2)
            if key not in thetas:
                thetas[key] = lattice_product(I1c, M.lattice, I2).theta(B)
            w = psi.value(cg.conj_index(i2), ring) * (2 ** a)
            th = thetas[key]
            for m in range(B):
                c = th[m]
                if c:
                    coeffs[m] = coeffs[m] + w * c
    if coeffs[0] != ring(0):
        raise ContradictionError("traced form is not cuspidal")
    return QExp(coeffs, 0, 1, ring)


def class_theta(D, chi, B, ring, cg=None):
    """theta_chi = sum over integral ideals I of chi(I) q^{N I}, B coefficients."""
    from .quad import integral_ideals_of_norm
    cg = cg or ClassGroupTable(D)
    out = [ring(0) for _ in range(B)]
    for n in range(1, B):
        for I in integral_ideals_of_norm(D, n):
            out[n] = out[n] + chi.value(cg.index(I), ring)
    return out


def G_theta_trace(D, N, psi1, B, ring, cg=None):
    """The same traced form from the q-expansions of the weight one theta series:

        2^{a+1} (f - chi_D(N) U_D f'),  f = theta_{psi1}(Nz) theta_{psi1^-1}(z),

    f' the product with the roles swapped (W_D exchanges the two factors).
    Valid for N inert or split; D prime.
    """
    if not isprime(-D):
        raise DomainError("the traced form is only implemented for -D prime")
    if N % -D == 0:
        raise DomainError("N must be prime to D")
    cg = cg or ClassGroupTable(D)
    L = -D * B
    g = class_theta(D, psi1, L, ring, cg)
    h = class_theta(D, psi1.inverse(), L, ring, cg)

    def prod(u, v):
        out = [ring(0) for _ in range(L)]
        for a in range(1, (L - 1) // N + 1):
            if u[a] == ring(0):
                continue
            for b in range(1, L - a * N):
                if v[b] != ring(0):
                    out[a * N + b] = out[a * N + b] + u[a] * v[b]
        return out

    f, f2 = prod(g, h), prod(h, g)
    chi = legendre(D, N)
    w = 2 ** (len(factorint(-D)) + 1)
    return QExp([(f[m] - ring(chi) * f2[-D * m]) * w for m in range(B)], 0, 1, ring)


# ---------------------------------------------------------------- the Shimura functional

def _as_int_vec(series, M, bound):
    out = []
    for n in range(bound):
        c = series[n]
        out.append(int(getattr(c, "value", c) if not isinstance(c, Fraction) else
                       c.numerator * pow(c.denominator, -1, M)) % M)
    return out


def _split_cyc(f, bound):
    """Write a CycScalar-valued series as sum_i zeta^i f_i (lists of ints)."""
    c0 = f[0]
    n = c0.n
    from .coeffs import euler_phi
    d = euler_phi(n)
    parts = [[0] * bound for _ in range(d)]
    for m in range(bound):
        v = f[m].coeffs
        for i, a in enumerate(v):
            parts[i][m] = a
    return parts


class ShimuraFunctional:
    """A functional lam on the span of weight-2 forms with
    lam(T_l g) - (l+1) lam(g) = (l-1) log(l) a_0(g) for the supplied primes.

    span: list of series; hecke(l, k) gives T_l of span[k] as a series
    (defaults to applying T_l to the q-expansion, which needs l * bound
    coefficients).  All comparisons use the first ``bound`` coefficients.
    """

    def __init__(self, span, primes, dlog, bound, hecke=None, level=None):
        from .coeffs import solve_mod
        self.M = M = dlog.modulus
        self.bound = bound
        self.G = [_as_int_vec(g, M, bound) for g in span]
        n = len(span)
        # relations among the span: c with sum c_k g_k = 0
        At = [[self.G[k][m] for k in range(n)] for m in range(bound)]
        rel = solve_mod(At, [0] * bound, M)[1]
        rows, rhs = [], []
        for c in rel:
            rows.append([x % M for x in c])
            rhs.append(0)
        for ell in primes:
            if ell == dlog.N:
                continue
            lg = dlog.log_int(ell)
            for k in range(n):
                Tg = hecke(ell, k) if hecke else span[k].hecke(ell, level=level)
                t = _as_int_vec(Tg, M, bound)
                sol = solve_mod(At, t, M)
                if sol is None:
                    raise ContradictionError("T_%d g_%d is not in the span" % (ell, k))
                d = sol[0]
                row = [x % M for x in d]
                row[k] = (row[k] - ell - 1) % M
                rows.append(row)
                rhs.append((ell - 1) * lg * self.G[k][0] % M)
        sol = solve_mod(rows, rhs, M)
        if sol is None:
            raise ContradictionError("no functional satisfies the Hecke relations")
        self.lam, self.kernel = sol
        self.At = At

    def coords(self, f_ints):
        from .coeffs import solve_mod
        sol = solve_mod(self.At, [x % self.M for x in f_ints[: self.bound]], self.M)
        if sol is None:
            raise ContradictionError("form is not in the span")
        return sol[0]

    def value_int(self, f_ints):
        from .errors import Indeterminate
        c = self.coords(f_ints)
        M = self.M
        for kap in self.kernel:
            if sum(a * b for a, b in zip(c, kap)) % M:
                raise Indeterminate("pairing depends on the choice of functional")
        return sum(a * b for a, b in zip(c, self.lam)) % M

    def __call__(self, f):
        from .coeffs import CycScalar, PadicScalar
        c0 = f[0]
        if isinstance(c0, CycScalar):
            parts = _split_cyc(f, self.bound)
            vals = [self.value_int(p) for p in parts]
            return CycScalar(vals, c0.n, self.M)
        return PadicScalar(self.value_int(_as_int_vec(f, self.M, self.bound)), self.M)


def shimura_pairing(f, span, primes, dlog, bound, hecke=None, level=None):
    """lam(f) for the higher Eisenstein functional lam; f must have a_0 = 0."""
    c0 = f[0]
    if (getattr(c0, "is_zero", None) and not c0.is_zero()) or (isinstance(c0, int) and c0):
        raise DomainError("shimura_pairing needs a_0(f) = 0")
    return ShimuraFunctional(span, primes, dlog, bound, hecke, level)(f)

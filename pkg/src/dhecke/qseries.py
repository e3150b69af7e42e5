"""Truncated q-expansions, Hecke operators and the standard level-N series."""
from fractions import Fraction
from functools import lru_cache
import math

from sympy import bernoulli
from sympy.ntheory import divisors, isprime

from .coeffs import QQ, ZZ, ModRing, PadicScalar
from .errors import DomainError, NotPolynomialInJ, RingError, TruncationError


class QExp:
    """Laurent expansion sum_{n >= val} a_n q^{n/den} + O(q^{prec/den}).

    ``coeffs[i]`` is the coefficient of q^{(val+i)/den}; the expansion is
    known for exponents below ``prec = val + len(coeffs)``.
    """

    __slots__ = ("coeffs", "val", "den", "ring")

    def __init__(self, coeffs, val=0, den=1, ring=ZZ):
        self.ring = ring
        self.coeffs = [ring(c) for c in coeffs]
        self.val = val
        self.den = den

    @classmethod
    def _raw(cls, coeffs, val, den, ring):
        f = cls.__new__(cls)
        f.coeffs, f.val, f.den, f.ring = coeffs, val, den, ring
        return f

    @property
    def prec(self):
        return self.val + len(self.coeffs)

    @property
    def bound(self):
        return self.prec

    def __getitem__(self, n):
        if n < self.val:
            return self.ring.zero
        if n >= self.prec:
            raise TruncationError("coefficient %d requested, precision %d" % (n, self.prec))
        return self.coeffs[n - self.val]

    def coefficient(self, n):
        return self[n]

    def a0(self):
        return self[0]

    def truncate(self, prec):
        if prec > self.prec:
            raise TruncationError("cannot extend precision %d to %d" % (self.prec, prec))
        return QExp._raw(self.coeffs[: max(prec - self.val, 0)], self.val, self.den, self.ring)

    def change_ring(self, ring):
        return QExp(self.coeffs, self.val, self.den, ring)

    def map(self, fn, ring=None):
        ring = ring or self.ring
        return QExp._raw([fn(c) for c in self.coeffs], self.val, self.den, ring)

    def _align(self, other):
        if isinstance(other, QExp):
            if other.den != self.den:
                raise DomainError("exponent denominators differ")
            return other
        return None

    def __add__(self, other):
        o = self._align(other)
        if o is None:
            # a scalar is exact: it only touches the constant term
            if self.prec <= 0:
                return self
            c = self.ring(other)
            lo = min(self.val, 0)
            out = [self[n] for n in range(lo, self.prec)]
            out[-lo] = out[-lo] + c
            return QExp._raw(out, lo, self.den, self.ring)
        lo = min(self.val, o.val)
        hi = min(self.prec, o.prec)
        zero = self.ring.zero
        out = []
        for n in range(lo, hi):
            a = self.coeffs[n - self.val] if self.val <= n < self.prec else zero
            b = o.coeffs[n - o.val] if o.val <= n < o.prec else zero
            out.append(a + b)
        return QExp._raw(out, lo, self.den, self.ring)

    __radd__ = __add__

    def __neg__(self):
        return QExp._raw([-c for c in self.coeffs], self.val, self.den, self.ring)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._align(other)
        if o is None:
            c = self.ring(other)
            return QExp._raw([x * c for x in self.coeffs], self.val, self.den, self.ring)
        val = self.val + o.val
        prec = min(self.val + o.prec, o.val + self.prec)
        L = prec - val
        if L <= 0:
            return QExp._raw([], val, self.den, self.ring)
        a = self.coeffs[:L]
        b = o.coeffs[:L]
        zero = self.ring.zero
        out = [zero] * L
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j in range(min(len(b), L - i)):
                out[i + j] = out[i + j] + x * b[j]
        return QExp._raw(out, val, self.den, self.ring)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            one = self.ring.one
            return QExp._raw([one] + [self.ring.zero] * max(self.prec - self.val - 1, 0), 0, self.den, self.ring)
        result, b = None, self
        while e:
            if e & 1:
                result = b if result is None else result * b
            e >>= 1
            if e:
                b = b * b
        return result

    def valuation(self):
        for i, c in enumerate(self.coeffs):
            if c != 0:
                return self.val + i
        return None

    def inverse(self):
        v = self.valuation()
        if v is None:
            raise DomainError("series is zero to its precision")
        c = self.coeffs[v - self.val:]
        inv0 = _ring_inverse(self.ring, c[0])
        L = len(c)
        out = [inv0]
        for n in range(1, L):
            s = self.ring.zero
            for k in range(1, n + 1):
                if c[k] != 0:
                    s = s + c[k] * out[n - k]
            out.append(-s * inv0)
        return QExp._raw(out, -v, self.den, self.ring)

    def __truediv__(self, other):
        if isinstance(other, QExp):
            return self * other.inverse()
        return self * _ring_inverse(self.ring, self.ring(other))

    def subs(self, d):
        """q -> q^d."""
        zero = self.ring.zero
        L = len(self.coeffs)
        out = [zero] * ((L - 1) * d + 1 if L else 0)
        for i, c in enumerate(self.coeffs):
            out[i * d] = c
        # precision (val+L)*d; pad up to it
        val = self.val * d
        prec = self.prec * d
        out += [zero] * (prec - val - len(out))
        return QExp._raw(out, val, self.den, self.ring)

    def hecke(self, ell, weight=2, level=None, character=None):
        """T_ell (ell not dividing the level) or U_ell (ell | level)."""
        if self.den != 1:
            raise DomainError("Hecke operators need integral exponents")
        if self.val < 0:
            raise DomainError("Hecke operators need holomorphic expansions")
        if level is not None and level % ell == 0:
            return self.U(ell)
        prec = (self.prec - 1) // ell + 1
        if prec <= 0:
            raise TruncationError("series too short for T_%d" % ell)
        lk = ell ** (weight - 1)
        out = []
        for n in range(prec):
            a = self[n * ell]
            if n % ell == 0:
                a = a + self[n // ell] * lk
            out.append(a)
        return QExp._raw(out, 0, 1, self.ring)

    def U(self, N):
        prec = (self.prec - 1) // N + 1
        return QExp._raw([self[n * N] for n in range(prec)], 0, 1, self.ring)

    def equal_to(self, other, bound=None):
        """Coefficient-wise equality for exponents < bound (default: common precision)."""
        if bound is None:
            bound = min(self.prec, other.prec)
        if bound > self.prec or bound > other.prec:
            raise TruncationError("bound %d exceeds precision" % bound)
        lo = min(self.val, other.val)
        return all(self[n] == other[n] for n in range(lo, bound))

    def __eq__(self, other):
        if not isinstance(other, QExp):
            return NotImplemented
        return self.den == other.den and self.equal_to(other)

    __hash__ = None

    def nonzero_terms(self):
        return [(self.val + i, c) for i, c in enumerate(self.coeffs) if c != 0]

    def __repr__(self):
        terms = []
        for n, c in self.nonzero_terms()[:8]:
            e = Fraction(n, self.den)
            terms.append("%s*q^%s" % (c, e))
        return "%s + O(q^%s)" % (" + ".join(terms) or "0", Fraction(self.prec, self.den))


def _ring_inverse(ring, x):
    if ring == ZZ:
        if x not in (1, -1):
            raise RingError("%s is not a unit in ZZ" % x)
        return x
    if ring == QQ:
        return Fraction(1) / x
    try:
        return x.inverse()
    except (ValueError, ZeroDivisionError, RingError):
        raise RingError("%s is not invertible" % (x,)) from None


def qexp_zero(prec, ring=ZZ, den=1):
    return QExp._raw([ring.zero] * prec, 0, den, ring)


# ---------------------------------------------------------------- integer kernels

def sigma(n, k, exclude=None):
    """sum of d^k over d | n, skipping d divisible by ``exclude``."""
    return sum(d ** k for d in divisors(n) if exclude is None or d % exclude)


@lru_cache(maxsize=64)
def _euler_product(B):
    """Coefficients of prod (1 - q^n) to q^{B-1} by the pentagonal theorem."""
    out = [0] * B
    k = 0
    while True:
        done = True
        for kk in ((k, ), (-k, )) if k else ((0,),):
            kk = kk[0]
            e = kk * (3 * kk - 1) // 2
            if e < B:
                out[e] += -1 if kk % 2 else 1
                done = False
        if done and k > 0:
            break
        k += 1
    return tuple(out)


def _power_series_power(f, k, B):
    """f^k for f with f[0] = 1 (J.C.P. Miller recurrence), integers."""
    g = [0] * B
    g[0] = 1
    nz = [(i, c) for i, c in enumerate(f[:B]) if i and c]
    for n in range(1, B):
        s = 0
        for i, c in nz:
            if i > n:
                break
            s += ((k + 1) * i - n) * c * g[n - i]
        g[n] = s // n
    return g


@lru_cache(maxsize=64)
def _delta_int(B):
    """Integer coefficients a_0..a_{B-1} of Delta."""
    if B <= 1:
        return (0,) * B
    eta24 = _power_series_power(_euler_product(B - 1), 24, B - 1)
    return tuple([0] + eta24)


@lru_cache(maxsize=256)
def _eisenstein_q(k, B):
    """Rational coefficients of the normalised E_k (k >= 4 even, or k = 2 quasi)."""
    bk = bernoulli(k)
    c = Fraction(-2 * k) / Fraction(int(bk.p), int(bk.q))
    return tuple([Fraction(1)] + [c * sigma(n, k - 1) for n in range(1, B)])


def sturm_bound(N):
    """ceil((N+1)/6) + 2: truncation used for weight-2 level-N identities."""
    return -(-(N + 1) // 6) + 2


def standard_series(kind, N=None, B=20, ring=QQ, k=None):
    """Delta, E_k, j, E2N (= E_2^{(N)}), EN1 (= E_{N+1} mod N, a_0 = 1)."""
    if kind == "Delta":
        return QExp(_delta_int(B), 0, 1, ring)
    if kind == "E_k":
        if k is None or k % 2 or k < 2:
            raise DomainError("E_k needs an even weight k >= 2")
        return QExp(_eisenstein_q(k, B), 0, 1, ring)
    if kind == "j":
        # j = E4^3 / Delta; Delta has valuation 1 so one extra term is needed
        E4 = QExp(_eisenstein_q(4, B + 2), 0, 1, QQ)
        D = QExp(_delta_int(B + 2), 0, 1, QQ)
        jq = (E4 ** 3) / D
        return QExp([c for c in jq.coeffs[: B + 1]], -1, 1, ring)
    if kind == "E2N":
        if N is None:
            raise DomainError("E2N needs the level N")
        c0 = Fraction(N - 1, 24)
        return QExp([c0] + [sigma(n, 1, exclude=N) for n in range(1, B)], 0, 1, ring)
    if kind == "EN1":
        if N is None or not isprime(N) or N < 5:
            raise DomainError("EN1 needs a prime N >= 5")
        if ring == QQ:
            return standard_series("E_k", B=B, ring=QQ, k=N + 1)
        return QExp(_eisenstein_q(N + 1, B), 0, 1, ring)
    raise DomainError("unknown series kind %r" % kind)


# ---------------------------------------------------------------- higher Eisenstein

def _bernoulli2(x):
    return x * x - x + Fraction(1, 6)


def merel_constant(N, p, t, dlog):
    """Sum over j of (theta_j / 2) log j with theta_j = (N/2) B_2(j/N), in Z/p^t."""
    M = p ** t
    R = ModRing(M)
    total = R(0)
    for j in range(1, N):
        theta = Fraction(N, 2) * _bernoulli2(Fraction(j, N))
        total = total + R(theta / 2) * dlog.log_int(j)
    return total


def eprime_series(N, p, t, dlog, B):
    """The higher Eisenstein series E' mod p^t to q^{B-1}."""
    M = p ** t
    R = ModRing(M)
    out = [merel_constant(N, p, t, dlog)]
    for n in range(1, B):
        m = n
        while m % N == 0:
            m //= N
        s = 0
        for d in divisors(m):
            # log(d^2/m) = 2 log d - log m
            s += (2 * dlog.log_int(d) - dlog.log_int(m)) * d
        out.append(R(-s))
    return QExp._raw(out, 0, 1, R)


# ---------------------------------------------------------------- theta series

def _ldl(G):
    """Exact LDL^T of a symmetric positive definite rational matrix."""
    n = len(G)
    L = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    Dd = [Fraction(0)] * n
    for j in range(n):
        s = Fraction(G[j][j]) - sum(L[j][k] ** 2 * Dd[k] for k in range(j))
        if s <= 0:
            raise DomainError("Gram matrix is not positive definite")
        Dd[j] = s
        for i in range(j + 1, n):
            L[i][j] = (Fraction(G[i][j]) - sum(L[i][k] * L[j][k] * Dd[k] for k in range(j))) / s
    return L, Dd


def lll_gram(G, delta=Fraction(3, 4)):
    """LLL-reduce a positive definite Gram matrix exactly.

    Returns (R, U) with R = U^T G U and U unimodular (columns are the new basis).
    """
    n = len(G)
    G = [[Fraction(x) for x in row] for row in G]
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def gso():
        mu = [[Fraction(0)] * n for _ in range(n)]
        bb = [Fraction(0)] * n
        for i in range(n):
            for j in range(i):
                mu[i][j] = (G[i][j] - sum(mu[j][k] * mu[i][k] * bb[k] for k in range(j))) / bb[j]
            bb[i] = G[i][i] - sum(mu[i][k] ** 2 * bb[k] for k in range(i))
        return mu, bb

    def add(i, j, r):
        # b_i <- b_i - r b_j
        for k in range(n):
            U[k][i] -= r * U[k][j]
        for k in range(n):
            G[i][k] -= r * G[j][k]
        for k in range(n):
            G[k][i] -= r * G[k][j]

    def swap(i, j):
        for k in range(n):
            U[k][i], U[k][j] = U[k][j], U[k][i]
        G[i], G[j] = G[j], G[i]
        for row in G:
            row[i], row[j] = row[j], row[i]

    k = 1
    while k < n:
        mu, bb = gso()
        for j in range(k - 1, -1, -1):
            r = round(mu[k][j])
            if r:
                add(k, j, r)
                mu, bb = gso()
        if bb[k] >= (delta - mu[k][k - 1] ** 2) * bb[k - 1]:
            k += 1
        else:
            swap(k, k - 1)
            k = max(k - 1, 1)
    return G, U


def _short_vectors(G, bound):
    """Yield (w, U, 2Q) for reduced-basis coordinates w with Q <= bound."""
    n = len(G)
    R, U = lll_gram(G)
    den = 1
    for row in R:
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
    Ri = [[int(x * den) for x in row] for row in R]
    L, Dd = _ldl(R)
    Lf = [[float(x) for x in row] for row in L]
    Df = [float(x) for x in Dd]
    B2 = Fraction(2 * bound)
    lim = B2 * den
    eps = 1e-9 * (float(B2) + 1)
    w = [0] * n

    def rec(j, remaining):
        c = -sum(Lf[i][j] * w[i] for i in range(j + 1, n))
        rad = math.sqrt(max(remaining, 0.0) / Df[j]) + 1e-9
        for x in range(math.ceil(c - rad), math.floor(c + rad) + 1):
            t = (x - c) ** 2 * Df[j]
            if t <= remaining + eps:
                w[j] = x
                if j == 0:
                    yield w
                else:
                    yield from rec(j - 1, remaining - t)
        w[j] = 0

    for cand in rec(n - 1, float(B2)):
        q2 = 0
        for i in range(n):
            ci = cand[i]
            if ci:
                row = Ri[i]
                q2 += ci * sum(row[k] * cand[k] for k in range(n))
        if q2 <= lim:
            yield tuple(cand), U, Fraction(q2, den)


def lattice_vectors(G, bound):
    """All integer v with v^T G v / 2 <= bound (G positive definite, rational).

    The basis is LLL-reduced first; enumeration bounds are floating point with a
    safety margin and every candidate is filtered exactly.
    """
    n = len(G)
    if n == 0:
        yield ()
        return
    for w, U, _ in _short_vectors(G, bound):
        yield tuple(sum(U[i][k] * w[k] for k in range(n)) for i in range(n))


def quad_form(G, v):
    n = len(v)
    return sum(G[i][j] * v[i] * v[j] for i in range(n) for j in range(n)) / 2


def theta_from_gram(G, scale=1, B=10, ring=ZZ):
    """sum over v of q^{Q(v)/scale}, Q(v) = v^T G v / 2, exponents < B."""
    scale = Fraction(scale)
    counts = [0] * B
    bound = (B - 1) * scale if B > 0 else -1
    if B <= 0:
        return QExp([], 0, 1, ring)
    if len(G) == 0:
        counts[0] = 1
        return QExp(counts, 0, 1, ring)
    for _, _, q2 in _short_vectors(G, bound):
        e = q2 / 2 / scale
        if e.denominator != 1:
            raise DomainError("scaled norm %s is not integral" % e)
        e = int(e)
        if e < B:
            counts[e] += 1
    return QExp(counts, 0, 1, ring)


# ---------------------------------------------------------------- poly in j

def poly_in_j(f, d=None, check_terms=2):
    """Polynomial P with f = P(j), for a level-one weight-zero expansion f.

    The pole at infinity is peeled off with powers of j; the result is
    verified by re-expansion on the remaining known coefficients.
    """
    if f.den != 1:
        raise DomainError("poly_in_j needs integral exponents")
    order = -f.val if f.val < 0 else 0
    if d is None:
        d = order
    if order > d:
        raise NotPolynomialInJ("pole order %d exceeds degree %d" % (order, d))
    if f.prec < 1:
        raise TruncationError("need coefficients through q^0")
    ring = f.ring
    prec = f.prec
    jj = standard_series("j", B=prec + d + 2, ring=ring)
    powers = [QExp._raw([ring.one] + [ring.zero] * (prec + d + 1), 0, 1, ring)]
    for _ in range(d):
        powers.append((powers[-1] * jj))
    P = [ring.zero] * (d + 1)
    rem = f
    for k in range(d, 0, -1):
        c = rem[-k]
        if c != 0:
            P[k] = c
            rem = rem - powers[k].truncate(prec) * c
    P[0] = rem[0]
    rem = rem - P[0]
    bad = [n for n in range(rem.val, rem.prec) if rem[n] != 0]
    if bad:
        raise NotPolynomialInJ("residual coefficient at q^%d" % bad[0])
    return P


def eval_poly(P, x):
    acc = None
    for c in reversed(P):
        acc = c if acc is None else acc * x + c
    return acc

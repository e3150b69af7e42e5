"""Coefficient rings: Z/p^t, cyclotomic quotients of it, finite fields, and
the discrete logarithm F_{N^2}^x -> Z/p^t.
"""
from functools import lru_cache
from math import isqrt

from sympy.ntheory import factorint, isprime, primitive_root

from .errors import DomainError, InvalidAnchor, InvalidInstance, RingError


def _valuation(n, p):
    if n == 0:
        return float("inf")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class PadicScalar:
    """Residue class in Z/M (normally M = p^t)."""

    __slots__ = ("value", "modulus")

    def __init__(self, value, modulus):
        self.modulus = modulus
        self.value = int(value) % modulus

    def _coerce(self, other):
        if isinstance(other, PadicScalar):
            if other.modulus != self.modulus:
                raise RingError("moduli differ: %d vs %d" % (self.modulus, other.modulus))
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicScalar(self.value + o, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicScalar(self.value - o, self.modulus)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicScalar(o - self.value, self.modulus)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicScalar(self.value * o, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return PadicScalar(-self.value, self.modulus)

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        return PadicScalar(pow(self.value, e, self.modulus), self.modulus)

    def inverse(self):
        try:
            return PadicScalar(pow(self.value, -1, self.modulus), self.modulus)
        except ValueError:
            raise RingError("%d is not a unit mod %d" % (self.value, self.modulus)) from None

    def __truediv__(self, other):
        if isinstance(other, int):
            other = PadicScalar(other, self.modulus)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return PadicScalar(other, self.modulus) * self.inverse()

    def __eq__(self, other):
        if isinstance(other, PadicScalar):
            return self.modulus == other.modulus and self.value == other.value
        if isinstance(other, int):
            return (self.value - other) % self.modulus == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.modulus))

    def __int__(self):
        return self.value

    def is_zero(self):
        return self.value == 0

    def signed(self):
        """Representative in (-M/2, M/2]."""
        v = self.value
        return v - self.modulus if 2 * v > self.modulus else v

    def __repr__(self):
        return "%d (mod %d)" % (self.value, self.modulus)


@lru_cache(maxsize=None)
def cyclotomic_poly(n):
    """Integer coefficients of Phi_n, constant term first."""
    # x^n - 1 divided by Phi_d for the proper divisors d
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _exact_divide(num, cyclotomic_poly(d))
    return tuple(num)


def _exact_divide(a, b):
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = a[i + len(b) - 1]  # b is monic
        out[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    assert not any(a[: len(b) - 1])
    return out


def euler_phi(n):
    r = n
    for p in factorint(n):
        r = r // p * (p - 1)
    return r


class CycScalar:
    """Element of (Z/M)[X]/Phi_n(X); X is the root of unity zeta_n."""

    __slots__ = ("coeffs", "n", "modulus")

    def __init__(self, coeffs, n, modulus):
        self.n = n
        self.modulus = modulus
        self.coeffs = _cyc_reduce(list(coeffs), n, modulus)

    @classmethod
    def from_int(cls, c, n, modulus):
        return cls([c], n, modulus)

    @classmethod
    def zeta(cls, k, n, modulus):
        k %= n
        v = [0] * (k + 1)
        v[k] = 1
        return cls(v, n, modulus)

    def _coerce(self, other):
        if isinstance(other, CycScalar):
            if other.n != self.n or other.modulus != self.modulus:
                raise RingError("incompatible cyclotomic rings")
            return other
        if isinstance(other, PadicScalar):
            if other.modulus != self.modulus:
                raise RingError("moduli differ")
            return CycScalar([other.value], self.n, self.modulus)
        if isinstance(other, int):
            return CycScalar([other], self.n, self.modulus)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycScalar([a + b for a, b in zip(self.coeffs, o.coeffs)], self.n, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycScalar([a - b for a, b in zip(self.coeffs, o.coeffs)], self.n, self.modulus)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        return CycScalar([-a for a in self.coeffs], self.n, self.modulus)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b = self.coeffs, o.coeffs
        prod = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        return CycScalar(prod, self.n, self.modulus)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        r = CycScalar([1], self.n, self.modulus)
        b = self
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    def _mult_matrix(self):
        d = len(self.coeffs)
        cols = []
        x = self
        z = CycScalar.zeta(1, self.n, self.modulus)
        for _ in range(d):
            cols.append(list(x.coeffs))
            x = x * z
        return [[cols[j][i] for j in range(d)] for i in range(d)]

    def inverse(self):
        d = len(self.coeffs)
        rhs = [1] + [0] * (d - 1)
        sol = solve_mod(self._mult_matrix(), rhs, self.modulus)
        if sol is None or sol[1]:
            raise RingError("not a unit in the cyclotomic ring")
        return CycScalar(sol[0], self.n, self.modulus)

    def __truediv__(self, other):
        o = self._coerce(other)
        return self * o.inverse()

    def galois(self, a):
        """Image under zeta -> zeta^a (gcd(a, n) = 1)."""
        out = CycScalar([0], self.n, self.modulus)
        for k, c in enumerate(self.coeffs):
            if c:
                out = out + CycScalar.zeta(a * k, self.n, self.modulus) * c
        return out

    def conj(self):
        return self.galois(-1)

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, CycScalar) else other
        if o is NotImplemented:
            return NotImplemented
        return self.n == o.n and self.modulus == o.modulus and self.coeffs == o.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.n, self.modulus))

    def is_zero(self):
        return not any(self.coeffs)

    def to_list(self):
        return list(self.coeffs)

    def __repr__(self):
        terms = ["%d*z^%d" % (c, k) if k else str(c) for k, c in enumerate(self.coeffs) if c]
        return "(%s) in Z/%d[z]/Phi_%d" % (" + ".join(terms) or "0", self.modulus, self.n)


def _cyc_reduce(v, n, M):
    phi = cyclotomic_poly(n)
    d = len(phi) - 1
    for i in range(len(v) - 1, d - 1, -1):
        c = v[i] % M
        if c:
            for j in range(d + 1):
                v[i - d + j] -= c * phi[j]
    v = [x % M for x in v[:d]]
    v += [0] * (d - len(v))
    return tuple(v)


def cyclotomic_norm(k, n):
    """Norm from Q(zeta_n) to Q of 1 - zeta_n^k, as an integer."""
    m = n // _gcd(k, n)
    if m == 1:
        return 0
    f = factorint(m)
    return list(f)[0] if len(f) == 1 else 1


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def solve_mod(A, b, M):
    """Solve A x = b over Z/M with M a prime power.

    Returns (x, kernel) where kernel generates the solutions of A x = 0, or
    None when the system is inconsistent.
    """
    if not A:
        return [], []
    if len(factorint(M)) > 1:
        raise RingError("solve_mod needs a prime-power modulus")
    rows, cols = len(A), len(A[0])
    S = [[x % M for x in row] for row in A]
    bb = [x % M for x in b]
    V = [[int(i == j) for j in range(cols)] for i in range(cols)]
    diag = []
    for k in range(min(rows, cols)):
        # Z/p^t is local: an entry of least valuation divides the whole block
        best = None
        for i in range(k, rows):
            for j in range(k, cols):
                if S[i][j]:
                    g = _gcd(S[i][j], M)
                    if best is None or g < best[0]:
                        best = (g, i, j)
        if best is None:
            break
        g, i, j = best
        S[k], S[i] = S[i], S[k]
        bb[k], bb[i] = bb[i], bb[k]
        for row in S:
            row[k], row[j] = row[j], row[k]
        for row in V:
            row[k], row[j] = row[j], row[k]
        inv = _unit_inverse(S[k][k] // g, M // g, M)
        S[k] = [(x * inv) % M for x in S[k]]
        bb[k] = (bb[k] * inv) % M
        for i in range(rows):
            if i != k and S[i][k]:
                f = S[i][k] // g
                S[i] = [(x - f * y) % M for x, y in zip(S[i], S[k])]
                bb[i] = (bb[i] - f * bb[k]) % M
        for j in range(k + 1, cols):
            if S[k][j]:
                f = S[k][j] // g
                for row in S:
                    row[j] = (row[j] - f * row[k]) % M
                for row in V:
                    row[j] = (row[j] - f * row[k]) % M
        diag.append(g)
    y = [0] * cols
    kern = []
    for i in range(rows):
        if i < len(diag):
            g = diag[i]
            if bb[i] % g:
                return None
            y[i] = bb[i] // g
            if g != 1:
                kern.append((i, M // g))
        elif bb[i]:
            return None
    for j in range(len(diag), cols):
        kern.append((j, 1))
    x = [sum(V[r][c] * y[c] for c in range(cols)) % M for r in range(cols)]
    kernel = [[(V[r][c] * step) % M for r in range(cols)] for c, step in kern]
    return x, kernel


def _unit_inverse(u, m_small, M):
    """Inverse of a unit lift of u (a unit modulo m_small) modulo M."""
    for k in range(M // max(m_small, 1) + 1):
        cand = u + k * m_small
        if _gcd(cand, M) == 1:
            return pow(cand, -1, M)
    raise RingError("no unit lift")  # pragma: no cover


# ---------------------------------------------------------------- finite fields

def _poly_mulmod_int(a, b, mod, p):
    """Multiply coefficient lists over F_p and reduce by monic ``mod``."""
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    return _poly_reduce_int(prod, mod, p)


def _poly_reduce_int(v, mod, p):
    d = len(mod) - 1
    v = [x % p for x in v]
    for i in range(len(v) - 1, d - 1, -1):
        c = v[i]
        if c:
            for j in range(d):
                v[i - d + j] = (v[i - d + j] - c * mod[j]) % p
    v = v[:d]
    v += [0] * (d - len(v))
    return v


def _is_irreducible(mod, p):
    """Rabin test for a monic polynomial over F_p given constant-first."""
    from sympy import Poly, GF
    from sympy.abc import x
    P = Poly(list(reversed(mod)), x, domain=GF(p))
    return P.is_irreducible


@lru_cache(maxsize=None)
def _field_modulus(N, deg):
    if deg == 1:
        return (0, 1)
    if deg == 2:
        r = next(a for a in range(2, N) if pow(a, (N - 1) // 2, N) == N - 1) if N > 2 else 1
        return ((-r) % N, 0, 1)
    # deterministic search for an irreducible polynomial x^deg + x^k + c
    for k in range(1, deg):
        for c in range(1, N):
            mod = [c] + [0] * (deg - 1) + [1]
            mod[k] = 1
            if _is_irreducible(mod, N):
                return tuple(mod)
    raise RingError("no irreducible modulus found")


class FiniteField:
    """F_{N^deg} = F_N[s]/(m(s)); for deg = 2, m = s^2 - r with r a non-residue."""

    _cache = {}

    def __new__(cls, N, deg=2):
        key = (N, deg)
        if key not in cls._cache:
            if not isprime(N):
                raise InvalidInstance("characteristic must be prime")
            obj = super().__new__(cls)
            obj.N = N
            obj.deg = deg
            obj.modulus = _field_modulus(N, deg)
            obj.order = N ** deg
            cls._cache[key] = obj
        return cls._cache[key]

    def __reduce__(self):
        return (FiniteField, (self.N, self.deg))

    def __call__(self, c):
        if isinstance(c, FqElem):
            return c
        if isinstance(c, (list, tuple)):
            return FqElem(self, c)
        return FqElem(self, (int(c),))

    def gen(self):
        return FqElem(self, (0, 1))

    def zero(self):
        return FqElem(self, (0,))

    def one(self):
        return FqElem(self, (1,))

    def nonresidue(self):
        return (-self.modulus[0]) % self.N if self.deg == 2 else None

    def elements(self):
        from itertools import product
        for t in product(range(self.N), repeat=self.deg):
            yield FqElem(self, t)

    def random(self, rng):
        return FqElem(self, [rng.randrange(self.N) for _ in range(self.deg)])

    def sqrt(self, a):
        """A square root of a, or None."""
        return fq_sqrt(a)

    def __repr__(self):
        return "GF(%d^%d)" % (self.N, self.deg)


class FqElem:
    __slots__ = ("F", "c")

    def __init__(self, F, coeffs):
        self.F = F
        N, d = F.N, F.deg
        v = [int(x) % N for x in coeffs]
        if len(v) > d:
            v = _poly_reduce_int(v, F.modulus, N)
        else:
            v += [0] * (d - len(v))
        self.c = tuple(v)

    def _coerce(self, o):
        if isinstance(o, FqElem):
            return o
        if isinstance(o, int):
            return FqElem(self.F, (o,))
        if isinstance(o, PadicScalar):
            return FqElem(self.F, (o.value,))
        return NotImplemented

    def __add__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        N = self.F.N
        return _mk(self.F, tuple((a + b) % N for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __sub__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        N = self.F.N
        return _mk(self.F, tuple((a - b) % N for a, b in zip(self.c, o.c)))

    def __rsub__(self, o):
        return self._coerce(o) - self

    def __neg__(self):
        N = self.F.N
        return _mk(self.F, tuple((-a) % N for a in self.c))

    def __mul__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        F = self.F
        N = F.N
        if F.deg == 2:
            a0, a1 = self.c
            b0, b1 = o.c
            r = -F.modulus[0]
            return _mk(F, ((a0 * b0 + r * a1 * b1) % N, (a0 * b1 + a1 * b0) % N))
        if F.deg == 1:
            return _mk(F, ((self.c[0] * o.c[0]) % N,))
        return _mk(F, tuple(_poly_mulmod_int(self.c, o.c, F.modulus, N)))

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        r = self.F.one()
        b = self
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    def inverse(self):
        if self.is_zero():
            raise DomainError("zero is not invertible")
        F = self.F
        N = F.N
        if F.deg == 2:
            a0, a1 = self.c
            r = -F.modulus[0]
            nrm = (a0 * a0 - r * a1 * a1) % N
            inv = pow(nrm, -1, N)
            return _mk(F, ((a0 * inv) % N, (-a1 * inv) % N))
        return self ** (F.order - 2)

    def __truediv__(self, o):
        o = self._coerce(o)
        return self * o.inverse()

    def __rtruediv__(self, o):
        return self._coerce(o) * self.inverse()

    def __eq__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return NotImplemented
        return self.F is o.F and self.c == o.c

    def __hash__(self):
        return hash((self.F.N, self.F.deg, self.c))

    def __lt__(self, o):
        return self.c[::-1] < o.c[::-1]

    def is_zero(self):
        return not any(self.c)

    def in_prime_field(self):
        return not any(self.c[1:])

    def frobenius(self, k=1):
        return self ** (self.F.N ** k)

    def norm(self):
        """Norm to F_N (x^{1+N+...+N^{d-1}}), returned as an int."""
        F = self.F
        e = (F.order - 1) // (F.N - 1)
        return (self ** e).c[0]

    def __int__(self):
        if not self.in_prime_field():
            raise DomainError("element not in the prime field")
        return self.c[0]

    def __repr__(self):
        if self.in_prime_field():
            return str(self.c[0])
        terms = []
        for k, a in enumerate(self.c):
            if a:
                terms.append(str(a) if k == 0 else ("%d*s" % a if k == 1 else "%d*s^%d" % (a, k)))
        return " + ".join(terms)


def _mk(F, c):
    e = FqElem.__new__(FqElem)
    e.F = F
    e.c = c
    return e


def fq_sqrt(a):
    """Square root in F_{N^d} (Tonelli-Shanks); None for non-squares."""
    F = a.F
    if a.is_zero():
        return a
    q = F.order
    if a ** ((q - 1) // 2) != 1:
        return None
    s, Q = 0, q - 1
    while Q % 2 == 0:
        Q //= 2
        s += 1
    # fixed non-square: deterministic search
    z = None
    for cand in _field_walk(F):
        if not cand.is_zero() and cand ** ((q - 1) // 2) != 1:
            z = cand
            break
    m, c, t, r = s, z ** Q, a ** Q, a ** ((Q + 1) // 2)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2
            i += 1
        b = c ** (1 << (m - i - 1))
        m, c, t, r = i, b * b, t * b * b, r * b
    return r


def _field_walk(F):
    for k in range(1, F.N):
        yield F(k)
    for k in range(1, F.N):
        for l in range(F.N):
            yield FqElem(F, (l, k))


# ---------------------------------------------------------------- discrete log

class DlogTable:
    """Discrete logarithm F_{N^2}^x -> Z/p^t, normalised by an anchor.

    The base map on F_N^x is index-of(x^{(N-1)/p^t}) against h = g^{(N-1)/p^t}
    for the smallest primitive root g, then rescaled so that the anchor takes
    its prescribed value.
    """

    def __init__(self, N, p, t=1, anchor=None):
        if not (isprime(N) and isprime(p)):
            raise InvalidInstance("N and p must be prime")
        if p <= 3:
            raise InvalidInstance("p must exceed 3")
        pt = p ** t
        if (N - 1) % pt or (N - 1) % (pt * p) == 0:
            raise InvalidInstance("need p^t || N-1 (N=%d, p=%d, t=%d)" % (N, p, t))
        self.N, self.p, self.t, self.modulus = N, p, t, pt
        self.g0 = primitive_root(N)
        self._h = pow(self.g0, (N - 1) // pt, N)
        self._m = isqrt(pt - 1) + 1
        self._baby = {}
        x = 1
        for i in range(self._m):
            self._baby.setdefault(x, i)
            x = x * self._h % N
        self._giant = pow(self._h, -self._m % pt, N) if pt > 1 else 1
        self.scale = 1
        if anchor is None:
            anchor = (self.g0, 1)
        a, v = anchor
        k = self._raw(a % N)
        if k % p == 0:
            raise InvalidAnchor("%d does not generate the p-part of F_%d^x" % (a, N))
        if v % p == 0:
            raise InvalidAnchor("anchor value must be a unit so that log is surjective")
        self.scale = v * pow(k, -1, pt) % pt
        self.anchor = (a % N, v % pt)
        self.F2 = FiniteField(N, 2)

    def _raw(self, x):
        if x % self.N == 0:
            raise DomainError("log(0) undefined")
        y = pow(x, (self.N - 1) // self.modulus, self.N)
        for j in range(self._m + 1):
            if y in self._baby:
                return (j * self._m + self._baby[y]) % self.modulus
            y = y * self._giant % self.N
        raise DomainError("element outside the p-part subgroup")  # pragma: no cover

    def log_int(self, x):
        """log of an integer residue, as an int mod p^t."""
        return self._raw(int(x) % self.N) * self.scale % self.modulus

    def __call__(self, x):
        return PadicScalar(self.dlog_value(x), self.modulus)

    def dlog_value(self, x):
        if isinstance(x, FqElem):
            if x.is_zero():
                raise DomainError("log(0) undefined")
            if x.F.deg == 1 or x.in_prime_field():
                return self.log_int(x.c[0])
            if x.F.deg != 2:
                raise DomainError("dlog is defined on F_{N^2}")
            nrm = x.norm()
            return self.log_int(nrm) * pow(self.N + 1, -1, self.modulus) % self.modulus
        if isinstance(x, PadicScalar):
            x = x.value
        return self.log_int(x)

    def dlog_direct(self, x):
        """Independent route on F_{N^2}: power into the p^t-part directly."""
        F = self.F2
        x = F(x)
        e = (F.order - 1) // self.modulus
        base = F(self.g0) ** e
        y = x ** e
        acc = F.one()
        for k in range(self.modulus):
            if acc == y:
                return k * self.scale % self.modulus
            acc = acc * base
        raise DomainError("not in group")  # pragma: no cover

    def rescaled(self, a):
        """Table whose log is a times this one (a a unit mod p)."""
        anc = (self.anchor[0], self.anchor[1] * a % self.modulus)
        return DlogTable(self.N, self.p, self.t, anc)

    def __repr__(self):
        return "DlogTable(N=%d, p^t=%d^%d, log(%d)=%d)" % (
            self.N, self.p, self.t, self.anchor[0], self.anchor[1])


def build_dlog(N, p, t=1, anchor=None):
    return DlogTable(N, p, t, anchor)


def dlog(table, x):
    return table(x)


def legendre(a, p):
    """Legendre symbol (a/p) for an odd prime p, by Euler's criterion."""
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def p_adic_valuation(n, p):
    return _valuation(n, p)


# ---------------------------------------------------------------- ring handles

class Ring:
    """Coefficient-ring handle: converts ints and Fractions into elements."""

    def __call__(self, x):  # pragma: no cover - abstract
        raise NotImplementedError

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)


class IntegerRing(Ring):
    def __call__(self, x):
        from fractions import Fraction
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise RingError("non-integral value %s" % x)
            return int(x)
        return int(x)

    def __repr__(self):
        return "ZZ"

    def __eq__(self, o):
        return isinstance(o, IntegerRing)

    def __hash__(self):
        return hash("ZZ")


class RationalField(Ring):
    def __call__(self, x):
        from fractions import Fraction
        return Fraction(x)

    def __repr__(self):
        return "QQ"

    def __eq__(self, o):
        return isinstance(o, RationalField)

    def __hash__(self):
        return hash("QQ")


class ModRing(Ring):
    """Z/M with elements PadicScalar."""

    def __init__(self, M):
        self.M = M

    def __call__(self, x):
        from fractions import Fraction
        if isinstance(x, PadicScalar):
            return x
        if isinstance(x, Fraction):
            try:
                return PadicScalar(x.numerator * pow(x.denominator, -1, self.M), self.M)
            except ValueError:
                raise RingError("denominator %d not invertible mod %d" % (x.denominator, self.M)) from None
        return PadicScalar(x, self.M)

    def __repr__(self):
        return "Z/%d" % self.M

    def __eq__(self, o):
        return isinstance(o, ModRing) and o.M == self.M

    def __hash__(self):
        return hash(("Z/", self.M))


class CycRing(Ring):
    """(Z/M)[zeta_n]."""

    def __init__(self, n, M):
        self.n, self.M = n, M

    def __call__(self, x):
        from fractions import Fraction
        if isinstance(x, CycScalar):
            return x
        if isinstance(x, PadicScalar):
            return CycScalar.from_int(x.value, self.n, self.M)
        if isinstance(x, Fraction):
            return CycScalar.from_int(ModRing(self.M)(x).value, self.n, self.M)
        return CycScalar.from_int(x, self.n, self.M)

    def zeta(self, k=1):
        return CycScalar.zeta(k, self.n, self.M)

    def __repr__(self):
        return "Z/%d[zeta_%d]" % (self.M, self.n)

    def __eq__(self, o):
        return isinstance(o, CycRing) and (o.n, o.M) == (self.n, self.M)

    def __hash__(self):
        return hash(("cyc", self.n, self.M))


ZZ = IntegerRing()
QQ = RationalField()

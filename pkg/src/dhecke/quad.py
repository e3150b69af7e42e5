"""Quadratic fields of odd discriminant: elements, ideals, class groups, the
ray class group of conductor (sqrt D), and characters of finite abelian groups."""
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd, isqrt

from sympy.ntheory import factorint, isprime
from sympy.solvers.diophantine.diophantine import diop_DN

from .errors import (ContradictionError, DomainError, NoSuitableCharacter,
                     UndecidedError, UnsupportedDiscriminant, UnsupportedField)


def is_fundamental_odd(D):
    if D % 4 != 1 or D in (0, 1):
        return False
    return all(e == 1 for e in factorint(abs(D)).values())


def _check_disc(D):
    if D % 2 == 0 or not is_fundamental_odd(D):
        raise UnsupportedDiscriminant("D=%d is not an odd fundamental discriminant" % D)


def _lcm(a, b):
    return a // gcd(a, b) * b


# ---------------------------------------------------------------- elements

class QuadElem:
    """(u + v sqrt(D)) / 2 with rational u, v."""

    __slots__ = ("D", "u", "v")

    def __init__(self, D, u, v=0):
        self.D = D
        self.u = Fraction(u)
        self.v = Fraction(v)

    @classmethod
    def sqrtD(cls, D):
        return cls(D, 0, 2)

    @classmethod
    def omega(cls, D):
        return cls(D, 1, 1)

    def _c(self, o):
        if isinstance(o, QuadElem):
            return o
        return QuadElem(self.D, 2 * Fraction(o), 0)

    def __add__(self, o):
        o = self._c(o)
        return QuadElem(self.D, self.u + o.u, self.v + o.v)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(self.D, -self.u, -self.v)

    def __sub__(self, o):
        return self + (-self._c(o))

    def __rsub__(self, o):
        return self._c(o) - self

    def __mul__(self, o):
        o = self._c(o)
        return QuadElem(self.D, (self.u * o.u + self.D * self.v * o.v) / 2,
                        (self.u * o.v + self.v * o.u) / 2)

    __rmul__ = __mul__

    def conj(self):
        return QuadElem(self.D, self.u, -self.v)

    def norm(self):
        return (self.u * self.u - self.D * self.v * self.v) / 4

    def trace(self):
        return self.u

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise DomainError("zero has no inverse")
        c = self.conj()
        return QuadElem(self.D, c.u / n, c.v / n)

    def __truediv__(self, o):
        return self * self._c(o).inverse()

    def __rtruediv__(self, o):
        return self._c(o) * self.inverse()

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        r = QuadElem(self.D, 2, 0)
        b = self
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    def __eq__(self, o):
        if isinstance(o, (int, Fraction)):
            o = self._c(o)
        return isinstance(o, QuadElem) and (self.D, self.u, self.v) == (o.D, o.u, o.v)

    def __hash__(self):
        return hash((self.D, self.u, self.v))

    def is_zero(self):
        return self.u == 0 and self.v == 0

    def sign(self):
        """Sign under the embedding sqrt(D) > 0 (real fields); exact."""
        if self.D < 0:
            raise DomainError("sign needs a real quadratic field")
        return _sign_surd(self.u, self.v, self.D)

    def is_integral(self):
        if self.u.denominator != 1 or self.v.denominator != 1:
            return False
        return (self.u - self.v * self.D) % 2 == 0

    def coords(self):
        """(m, n) with self = m + n*omega, omega = (1 + sqrt D)/2."""
        return (self.u - self.v) / 2, self.v

    def residue_mod_delta(self):
        """Image in o/(sqrt D) = Z/|D| (denominators must be prime to D)."""
        M = abs(self.D)
        h = self.u / 2
        if gcd(h.denominator, M) != 1:
            raise DomainError("element is not a delta-unit")
        return h.numerator * pow(h.denominator, -1, M) % M

    def __float__(self):
        return float(self.u) / 2 + float(self.v) / 2 * abs(self.D) ** 0.5

    def __repr__(self):
        return "(%s + %s*sqrt(%d))/2" % (self.u, self.v, self.D)


def _sign_surd(u, v, D):
    """Sign of u + v*sqrt(D), D > 0 non-square."""
    if v == 0:
        return (u > 0) - (u < 0)
    if u == 0:
        return (v > 0) - (v < 0)
    if (u > 0) == (v > 0):
        return 1 if u > 0 else -1
    # opposite signs: compare u^2 with D v^2
    big_u = u * u > D * v * v
    s = 1 if u > 0 else -1
    return s if big_u else -s


# ---------------------------------------------------------------- lattices & ideals

def _hnf(gens):
    """HNF (A, B, C) over Q of the Z-span of (m, n) pairs: basis (A,0), (B,C)."""
    den = 1
    for m, n in gens:
        den = _lcm(den, _lcm(Fraction(m).denominator, Fraction(n).denominator))
    ig = [(int(Fraction(m) * den), int(Fraction(n) * den)) for m, n in gens]
    C = 0
    for _, n in ig:
        C = gcd(C, n)
    if C == 0:
        raise DomainError("lattice has rank < 2")
    # element with second coordinate C
    m0, g = 0, 0
    for m, n in ig:
        if n == 0:
            continue
        if g == 0:
            g, m0 = abs(n), m * (1 if n > 0 else -1)
            continue
        # combine (m0, g) and (m, n)
        gg, s, t = _xgcd(g, n)
        m0, g = s * m0 + t * m, gg
    assert g == C
    A = 0
    for m, n in ig:
        A = gcd(A, m - (n // C) * m0)
    if A == 0:
        raise DomainError("lattice has rank < 2")
    B = m0 % A
    return Fraction(A, den), Fraction(B, den), Fraction(C, den)


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


class QuadIdeal:
    """Fractional ideal scale * (a Z + (-b + sqrt D)/2 Z) with b^2 = D mod 4a."""

    __slots__ = ("D", "a", "b", "scale", "_hnf")

    def __init__(self, D, a, b, scale=1):
        a = int(a)
        if a <= 0:
            raise DomainError("a must be positive")
        b = int(b) % (2 * a)
        if b > a:
            b -= 2 * a
        if (b * b - D) % (4 * a):
            raise DomainError("b^2 != D mod 4a")
        self.D, self.a, self.b, self.scale = D, a, b, Fraction(scale)
        if self.scale <= 0:
            raise DomainError("scale must be positive")
        s = self.scale
        self._hnf = _hnf([(a * s, 0), (s * Fraction(-b - 1, 2), s)])

    @classmethod
    def unit(cls, D):
        return cls(D, 1, 1)

    @classmethod
    def from_gens(cls, D, elems):
        gens = []
        w = QuadElem.omega(D)
        for e in elems:
            gens.append(e.coords())
            gens.append((e * w).coords())
        return cls._from_hnf(D, *_hnf(gens))

    @classmethod
    def principal(cls, x):
        return cls.from_gens(x.D, [x])

    @classmethod
    def _from_hnf(cls, D, A, B, C):
        a = A / C
        if a.denominator != 1:
            raise DomainError("lattice is not an o-module")
        b = -1 - 2 * B / C
        if b.denominator != 1:
            raise DomainError("lattice is not an o-module")
        return cls(D, int(a), int(b), C)

    def basis(self):
        s = self.scale
        return (QuadElem(self.D, 2 * self.a * s, 0), QuadElem(self.D, -self.b * s, s))

    def norm(self):
        return self.a * self.scale * self.scale

    def conj(self):
        return QuadIdeal(self.D, self.a, -self.b, self.scale)

    def primitive(self):
        return QuadIdeal(self.D, self.a, self.b, 1)

    def c(self):
        return (self.b * self.b - self.D) // (4 * self.a)

    def form(self):
        return (self.a, self.b, self.c())

    def __mul__(self, o):
        if isinstance(o, QuadElem):
            return QuadIdeal.from_gens(self.D, [e * o for e in self.basis()])
        if isinstance(o, (int, Fraction)):
            o = Fraction(o)
            return QuadIdeal(self.D, self.a, self.b, self.scale * abs(o))
        e1, e2 = self.basis()
        f1, f2 = o.basis()
        gens = [(x * y).coords() for x in (e1, e2) for y in (f1, f2)]
        return QuadIdeal._from_hnf(self.D, *_hnf(gens))

    __rmul__ = __mul__

    def inverse(self):
        return self.conj() * Fraction(1) * (Fraction(1) / self.norm())

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        r = QuadIdeal.unit(self.D)
        for _ in range(e):
            r = r * self
        return r

    def __truediv__(self, o):
        return self * o.inverse()

    def __eq__(self, o):
        return isinstance(o, QuadIdeal) and self.D == o.D and self._hnf == o._hnf

    def __hash__(self):
        return hash((self.D, self._hnf))

    def contains(self, x):
        A, B, C = self._hnf
        m, n = x.coords()
        k = n / C
        if k.denominator != 1:
            return False
        r = (m - k * B) / A
        return r.denominator == 1

    __contains__ = contains

    def is_integral(self):
        return self.contains(QuadElem(self.D, 2 * self.a * self.scale, 0)) and self.scale.denominator == 1

    def divides(self, J):
        """self | J  (i.e. J subset self)."""
        return all(self.contains(e) for e in J.basis())

    def coprime_to(self, m):
        return gcd(int(self.norm().numerator), m) == 1 and gcd(int(self.norm().denominator), m) == 1

    def __repr__(self):
        s = "" if self.scale == 1 else "%s*" % self.scale
        return "%s(%d, (%d+sqrt(%d))/2)" % (s, self.a, -self.b, self.D)


def prime_ideals_above(D, p):
    """Prime ideals of o above the rational prime p (list, 1 or 2 entries)."""
    if D % p == 0:
        for bb in range(-p, p + 1):
            if (bb * bb - D) % (4 * p) == 0:
                return [QuadIdeal(D, p, bb)]
    if p == 2:
        if D % 8 == 1:
            return [QuadIdeal(D, 2, 1), QuadIdeal(D, 2, -1)]
        return [QuadIdeal(D, 1, 1, 2)]
    from .coeffs import legendre
    if legendre(D, p) == -1:
        return [QuadIdeal(D, 1, 1, p)]
    sols = [bb for bb in range(-p, p + 1) if bb % 2 == D % 2 and (bb * bb - D) % (4 * p) == 0]
    out = []
    for bb in sols:
        I = QuadIdeal(D, p, bb)
        if I not in out:
            out.append(I)
    return out


def integral_ideals_of_norm(D, n):
    """All integral ideals of norm n."""
    out = []
    for d in range(1, isqrt(n) + 1):
        if n % (d * d):
            continue
        A = n // (d * d)
        for b in range(-A + 1, A + 1):
            if (b * b - D) % (4 * A) == 0:
                I = QuadIdeal(D, A, b, d)
                if I not in out:
                    out.append(I)
    return out


def split_kind(D, p):
    from .coeffs import legendre
    if D % p == 0:
        return "ramified"
    if p == 2:
        return "split" if D % 8 == 1 else "inert"
    return "split" if legendre(D, p) == 1 else "inert"


# ---------------------------------------------------------------- binary forms

def reduce_definite(f):
    a, b, c = f
    while True:
        if a > c or (a == c and b < 0):
            a, b, c = c, -b, a
        if -a < b <= a:
            if a == c and b < 0:
                continue
            return (a, b, c)
        # normalize b into (-a, a]
        k = (a - b) // (2 * a)
        b2 = b + 2 * a * k
        c = (b2 * b2 - (b * b - 4 * a * c)) // (4 * a)
        b = b2


def _r_indef(b, a, D, s):
    """Unique b' = b mod 2|a| in the normalization window."""
    A = abs(a)
    m = 2 * A
    if A > s:
        # -|a| < b' <= |a|
        bp = (b + A - 1) % m - (A - 1)
        return bp
    # sqrt(D) - 2|a| < b' < sqrt(D)  <=>  s - 2|a| + 1 <= b' <= s
    lo = s - 2 * A + 1
    return lo + (b - lo) % m


def _is_reduced_indef(f, D, s):
    a, b, c = f
    A = abs(a)
    if not (0 < b <= s):
        return False
    if 2 * A < D ** 0.5 or 4 * A * A < D:
        return b + 2 * A >= s + 1
    return b + s >= 2 * A


def rho_indef(f, D):
    a, b, c = f
    s = isqrt(D)
    bp = _r_indef(-b, c, D, s)
    return (c, bp, (bp * bp - D) // (4 * c))


def reduce_indefinite(f, D):
    s = isqrt(D)
    a, b, c = f
    # normalize first
    bp = _r_indef(b, a, D, s)
    f = (a, bp, (bp * bp - D) // (4 * a))
    for _ in range(10000):
        if _is_reduced_indef(f, D, s):
            return f
        f = rho_indef(f, D)
    raise ContradictionError("indefinite reduction did not terminate")


def indefinite_cycle(f, D):
    f = reduce_indefinite(f, D)
    cyc = [f]
    g = rho_indef(f, D)
    while g != f:
        cyc.append(g)
        g = rho_indef(g, D)
        if len(cyc) > 10000:
            raise ContradictionError("cycle too long")
    return cyc


def canonical_form(f, D):
    if D < 0:
        return reduce_definite(f)
    return min(indefinite_cycle(f, D))


def reduced_forms(D):
    """Representatives (canonical) of proper classes of primitive forms."""
    out = set()
    if D < 0:
        amax = isqrt(-D // 3) + 1
        for a in range(1, amax + 1):
            for b in range(-a + 1, a + 1):
                if (b * b - D) % (4 * a):
                    continue
                c = (b * b - D) // (4 * a)
                if c < a or gcd(gcd(a, b), c) != 1:
                    continue
                out.add(reduce_definite((a, b, c)))
        return sorted(out)
    s = isqrt(D)
    for b in range(1, s + 1):
        if (b - D) % 2:
            continue
        n = (D - b * b) // 4
        for A in range(1, n + 1):
            if n % A:
                continue
            for a in (A, -A):
                c = -(n // A) if a > 0 else n // A
                f = (a, b, c)
                if gcd(gcd(A, b), abs(c)) != 1:
                    continue
                if _is_reduced_indef(f, D, s):
                    out.add(min(indefinite_cycle(f, D)))
    return sorted(out)


# ---------------------------------------------------------------- class groups

class ClassGroupTable:
    """Wide class group (D < 0) or narrow class group (D > 0)."""

    def __init__(self, D):
        _check_disc(D)
        self.D = D
        self.narrow = D > 0
        self.forms = reduced_forms(D)
        unit_form = canonical_form((1, 1, (1 - D) // 4), D)
        # put the identity first
        self.forms.remove(unit_form)
        self.forms.insert(0, unit_form)
        self._index = {f: i for i, f in enumerate(self.forms)}
        self.reps = self._find_reps()
        h = len(self.forms)
        self.table = [[self.index(self.reps[i] * self.reps[j]) for j in range(h)] for i in range(h)]

    @property
    def order(self):
        return len(self.forms)

    h = order

    def _find_reps(self):
        reps = [None] * len(self.forms)
        reps[0] = QuadIdeal.unit(self.D)
        n = 2
        left = len(self.forms) - 1
        while left:
            if gcd(n, self.D) == 1:
                for I in integral_ideals_of_norm(self.D, n):
                    k = self.index(I)
                    if reps[k] is None:
                        reps[k] = I
                        left -= 1
            n += 1
            if n > 10 ** 6:
                raise ContradictionError("class representatives not found")
        return reps

    def index(self, I):
        P = I.primitive()
        return self._index[canonical_form(P.form(), self.D)]

    def mul(self, i, j):
        return self.table[i][j]

    def inv(self, i):
        return self.table[i].index(0)

    def pow(self, i, e):
        e %= self.order
        r = 0
        for _ in range(e):
            r = self.table[r][i]
        return r

    def element_order(self, i):
        k, r = 1, i
        while r != 0:
            r = self.table[r][i]
            k += 1
        return k

    def conj_index(self, i):
        return self.index(self.reps[i].conj())

    def elements(self):
        return list(range(self.order))

    def group(self):
        return FiniteAbelianGroup(self.elements(), self.mul, 0)


def class_group(D):
    return ClassGroupTable(D)


def class_number(D):
    return len(reduced_forms(D))


# ---------------------------------------------------------------- units

def fundamental_unit(D):
    """eps > 1 generating o^x / {+-1}; only norm +1 units are supported."""
    _check_disc(D)
    if D < 0:
        raise DomainError("imaginary field")
    if diop_DN(D, -4):
        raise UnsupportedField("D=%d has a unit of norm -1" % D)
    best = None
    for u, v in diop_DN(D, 4):
        u, v = abs(u), abs(v)
        if v == 0:
            continue
        e = QuadElem(D, u, v)
        if best is None or (e - best).sign() < 0:
            best = e
    if best is None:
        raise ContradictionError("no unit found")
    return best


def ideals_equivalent(I, J, narrow=True, bound=None):
    """Search x with I = x J (x totally positive if narrow); returns x or None.

    Decided exactly via a bounded search for generators of I * J' of norm
    N(I)N(J); raises undecided-error only if the search bound is too small.
    """
    D = I.D
    K = I * J.conj()
    n = I.norm() * J.norm()
    y = find_generator(K, n, totally_positive=narrow and D > 0)
    if y is None:
        return None
    return y * Fraction(1) / J.norm()


def find_generator(L, n, totally_positive=False, sign_any=False):
    """An element y of the ideal L with N(y) = n (and y >> 0 if asked), or None."""
    D = L.D
    n = Fraction(n)
    if D < 0:
        for y in _short_vectors_definite(L, n):
            return y
        return None
    eps = fundamental_unit(D)
    targets = [n] if totally_positive or not sign_any else [n, -n]
    for nn in targets:
        for y in _elements_of_norm_real(L, nn, eps):
            if totally_positive:
                if y.sign() < 0:
                    y = -y
                if y.conj().sign() > 0:
                    return y
            else:
                return y
    return None


def _short_vectors_definite(L, n):
    D = L.D
    e1, e2 = L.basis()
    # N(x e1 + y e2) = n, positive definite binary form
    a = e1.norm()
    c = e2.norm()
    b = (e1 * e2.conj()).trace()
    # a x^2 + b x y + c y^2 with b = Tr(e1 e2')
    disc = 4 * a * c - b * b
    ymax = isqrt(int(4 * a * n / disc) + 1) + 1
    for y in range(-ymax, ymax + 1):
        # a x^2 + b y x + (c y^2 - n) = 0
        A, B, C = a, b * y, c * y * y - n
        dd = B * B - 4 * A * C
        if dd < 0:
            continue
        num, den = dd.numerator, dd.denominator
        rn, rd = isqrt(num), isqrt(den)
        if rn * rn != num or rd * rd != den:
            continue
        r = Fraction(rn, rd)
        for x in {(-B + r) / (2 * A), (-B - r) / (2 * A)}:
            if x.denominator == 1:
                yield e1 * int(x) + e2 * y


def _elements_of_norm_real(L, n, eps):
    """Elements of L of norm n (n != 0), one per eps^Z-orbit (up to sign)."""
    D = L.D
    # a generator can be moved into 1 <= |y/y'| < eps^2, where
    # |y - y'| = |v| sqrt(D) <= (eps + 1) sqrt|n|
    vmax = int((float(eps) + 1.0) * (float(abs(n)) / D) ** 0.5) + 2
    e1, e2 = L.basis()
    # y = x e1 + z e2 ; the sqrt(D)-part of y is z * e2.v / 2
    zv = e2.v
    zmax = int(vmax / abs(float(zv))) + 2
    for z in range(-zmax, zmax + 1):
        base = e2 * z
        # y = base + x e1, e1 rational = e1.u/2 ; N(y) = (u^2 - D v^2)/4 with v = base.v
        vv = base.v
        t = 4 * n + D * vv * vv
        if t < 0:
            continue
        num, den = t.numerator, t.denominator
        rn, rd = isqrt(num), isqrt(den)
        if rn * rn != num or rd * rd != den:
            continue
        r = Fraction(rn, rd)
        for u in {r, -r}:
            x = (u - base.u) / e1.u
            if x.denominator != 1:
                continue
            y = QuadElem(D, u, vv)
            if y.sign() < 0:
                y = -y
            yield y


# ---------------------------------------------------------------- abelian groups & characters

class FiniteAbelianGroup:
    """A finite abelian group given by an element list and a multiplication."""

    def __init__(self, elements, mul, identity):
        self.elements = list(elements)
        self.mul = mul
        self.identity = identity
        self._pos = {g: i for i, g in enumerate(self.elements)}
        self.gens, self.coords = self._basis()
        self.exponent = 1
        for g in self.elements:
            self.exponent = _lcm(self.exponent, self.order_of(g))

    def order_of(self, g):
        k, r = 1, g
        while r != self.identity:
            r = self.mul(r, g)
            k += 1
        return k

    def power(self, g, e):
        r = self.identity
        for _ in range(e % self.order_of(g)):
            r = self.mul(r, g)
        return r

    def _basis(self):
        """Generators and, for each element, an exponent vector; relations via BFS."""
        gens = []
        span = {self.identity: ()}
        while len(span) < len(self.elements):
            g = max((x for x in self.elements if x not in span), key=self.order_of)
            gens.append(g)
            new = {}
            frontier = dict(span)
            # extend exponent vectors with the new generator
            cur = {k: v + (0,) for k, v in span.items()}
            power, e = self.identity, 0
            out = dict(cur)
            while True:
                e += 1
                power = self.mul(power, g)
                added = False
                for k, v in cur.items():
                    x = self.mul(k, power)
                    if x not in out:
                        out[x] = v[:-1] + (e,)
                        added = True
                if not added and power in cur:
                    break
            span = out
        coords = {x: v + (0,) * (len(gens) - len(v)) for x, v in span.items()}
        return gens, coords

    def relations(self):
        r = len(self.gens)
        rels = set()
        for x, v in self.coords.items():
            for i, g in enumerate(self.gens):
                y = self.mul(x, g)
                w = self.coords[y]
                rel = tuple(v[k] + (1 if k == i else 0) - w[k] for k in range(r))
                rels.add(rel)
        return rels

    def characters(self):
        """All characters, as Character objects with values in mu_exponent."""
        e = self.exponent
        rels = [tuple(c % e for c in rel) for rel in self.relations()]
        rels = list({r for r in rels if any(r)})
        orders = [self.order_of(g) for g in self.gens]
        out = []
        for ks in product(*[range(0, e, e // o) for o in orders]):
            if all(sum(k * c for k, c in zip(ks, rel)) % e == 0 for rel in rels):
                out.append(Character(self, ks))
        if len(out) != len(self.elements):
            raise ContradictionError("character count %d != group order %d" % (len(out), len(self.elements)))
        return out


class Character:
    """chi(g) = zeta_e^{k(g)} with e the group exponent; values as exponents mod e."""

    def __init__(self, group, ks):
        self.group = group
        self.ks = tuple(ks)
        self.e = group.exponent

    def exp(self, g):
        v = self.group.coords[g]
        return sum(k * c for k, c in zip(self.ks, v)) % self.e

    __call__ = exp

    def is_trivial(self):
        return not any(self.ks)

    def order(self):
        o = 1
        while any((k * o) % self.e for k in self.ks):
            o += 1
        return o

    def __mul__(self, o):
        return Character(self.group, [(a + b) % self.e for a, b in zip(self.ks, o.ks)])

    def __pow__(self, n):
        return Character(self.group, [(a * n) % self.e for a in self.ks])

    def inverse(self):
        return self ** -1

    def __eq__(self, o):
        return isinstance(o, Character) and o.group is self.group and o.ks == self.ks

    def __hash__(self):
        return hash(self.ks)

    def value(self, g, ring):
        """chi(g) as a CycScalar in ring (a CycRing with n = exponent)."""
        return ring.zeta(self.exp(g) * (ring.n // self.e))

    def __repr__(self):
        return "Character%s/%d" % (self.ks, self.e)


# ---------------------------------------------------------------- ray class group mod (sqrt D)

class RayClassD:
    """C_D = I_delta / P_{delta,+} for real D, built on the narrow class group.

    Elements are pairs (c, r): c a narrow class and r in (Z/D)^x / <iota>,
    meaning the class of r' * R_c for any positive integer r' = r mod D.
    """

    def __init__(self, D):
        _check_disc(D)
        if D < 0:
            raise DomainError("ray class group needs D > 0")
        self.D = D
        self.eps = fundamental_unit(D)
        self.iota = self.eps.residue_mod_delta()
        if self.iota in (1, D - 1):
            raise ContradictionError("iota = +-1")
        self.cl = ClassGroupTable(D)
        if self.cl.order % 2:
            raise ContradictionError("narrow class number is odd")
        self.units = [r for r in range(1, D) if gcd(r, D) == 1]
        self.elements = [(c, r) for c in range(self.cl.order) for r in self.units if r == self._canon(r)]
        if len(self.elements) != self.cl.order * len(self.units) // 2:
            raise ContradictionError("ray class count mismatch")
        self._z = {}
        self.group = FiniteAbelianGroup(self.elements, self.mul, (0, 1))

    @property
    def order(self):
        return len(self.elements)

    def _canon(self, r):
        r %= self.D
        return min(r, r * self.iota % self.D)

    def rep_ideal(self, g):
        c, r = g
        return self.cl.reps[c] * r

    def classify(self, J):
        """(c, r) of an ideal J prime to delta."""
        if not J.coprime_to(self.D):
            raise DomainError("ideal not prime to delta")
        c = self.cl.index(J)
        R = self.cl.reps[c]
        x = ideals_equivalent(J, R, narrow=True)
        if x is None:
            raise UndecidedError("generator search failed for %r" % (J,))
        return (c, self._canon(x.residue_mod_delta()))

    def classify_element(self, x):
        """Class of the principal ideal (x), x prime to delta."""
        return self.classify(QuadIdeal.principal(x))

    def mul(self, g, h):
        c1, r1 = g
        c2, r2 = h
        key = (c1, c2)
        if key not in self._z:
            c, z = self.classify(self.cl.reps[c1] * self.cl.reps[c2])
            self._z[key] = (c, z)
        c, z = self._z[key]
        return (c, self._canon(r1 * r2 * z))

    def from_integer(self, t):
        """Image of t in (Z/D)^x."""
        return (0, self._canon(t))

    def norm_map(self, g):
        c, r = g
        return r * r * int(self.cl.reps[c].norm()) % self.D

    def conj(self, g):
        return self.classify(self.rep_ideal(g).conj())

    def characters(self):
        return self.group.characters()


def ray_class_group(D):
    return RayClassD(D)


def kronecker_D(D, n):
    from .coeffs import legendre
    n %= abs(D)
    if gcd(n, D) != 1:
        return 0
    # for D = 1 mod 4 squarefree the character is the Jacobi symbol (n / |D|)
    out = 1
    for q in factorint(abs(D)):
        out *= legendre(n, q)
    return out


def psi1_signature(rc, chi):
    """Which real place chi is ramified at: 'second' if chi((x)) = sign(x') for
    x = 1 mod delta, 'first' if it equals sign(x), else None (not mixed)."""
    D = rc.D
    x = QuadElem(D, 2, 2)  # 1 + sqrt(D): = 1 mod delta, x > 0 > x'
    val = chi.exp(rc.classify_element(x))
    half = chi.e // 2 if chi.e % 2 == 0 else None
    if val == 0:
        return "first"      # chi((x)) = 1 = sign(x)
    if half is not None and val == half:
        return "second"     # chi((x)) = -1 = sign(x')
    return None


def select_psi1(rc):
    """Characters of C_D with psi1(image of -1) = -1 (mixed signature) and
    psi = psi1^2 restricted nontrivially (the theta series is then cuspidal).

    Returns a list of (character, signature) pairs.
    """
    minus = rc.from_integer(-1)
    out = []
    for chi in rc.characters():
        if chi.e % 2:
            continue
        if chi.exp(minus) != chi.e // 2:
            continue
        out.append((chi, psi1_signature(rc, chi)))
    if not out:
        raise NoSuitableCharacter("no mixed-signature character for D=%d" % rc.D)
    return out

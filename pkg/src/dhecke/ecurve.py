"""Short Weierstrass curves over F_{N^2}: torsion, Velu isogenies, discriminants."""
import random

from .coeffs import FqElem, FiniteField
from .errors import DomainError, InvalidKernel

# ---------------------------------------------------------------- polynomials over a field
# A polynomial is a list of field elements, constant term first, no trailing zeros.


def ptrim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def padd(f, g):
    n = max(len(f), len(g))
    out = []
    for i in range(n):
        if i < len(f) and i < len(g):
            out.append(f[i] + g[i])
        elif i < len(f):
            out.append(f[i])
        else:
            out.append(g[i])
    return ptrim(out)


def pneg(f):
    return [-c for c in f]


def psub(f, g):
    return padd(f, pneg(g))


def pscale(f, c):
    return ptrim([x * c for x in f])


def pmul(f, g):
    if not f or not g:
        return []
    out = [f[0] * 0] * (len(f) + len(g) - 1)
    for i, x in enumerate(f):
        if x == 0:
            continue
        for j, y in enumerate(g):
            out[i + j] = out[i + j] + x * y
    return ptrim(out)


def pdivmod(f, g):
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    f = list(f)
    inv = g[-1].inverse()
    dg = len(g) - 1
    if len(f) - 1 < dg:
        return [], ptrim(f)
    q = [g[0] * 0] * (len(f) - dg)
    for i in range(len(f) - 1, dg - 1, -1):
        c = f[i] * inv
        if c == 0:
            continue
        q[i - dg] = c
        for j in range(dg + 1):
            f[i - dg + j] = f[i - dg + j] - c * g[j]
    return ptrim(q), ptrim(f[:dg])


def pmod(f, g):
    return pdivmod(f, g)[1]


def pmonic(f):
    if not f:
        return f
    inv = f[-1].inverse()
    return [c * inv for c in f]


def pgcd(f, g):
    while g:
        f, g = g, pmod(f, g)
    return pmonic(f)


def pxgcd(f, g):
    """(d, s, t) with s f + t g = d monic."""
    r0, r1 = list(f), list(g)
    one = (f or g)[0] ** 0
    s0, s1 = [one], []
    t0, t1 = [], [one]
    while r1:
        q, r = pdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, psub(s0, pmul(q, s1))
        t0, t1 = t1, psub(t0, pmul(q, t1))
    inv = r0[-1].inverse()
    return pscale(r0, inv), pscale(s0, inv), pscale(t0, inv)


def pmulmod(f, g, m):
    return pmod(pmul(f, g), m)


def ppowmod(f, e, m):
    one = m[0] ** 0
    r = [one]
    b = pmod(f, m)
    while e:
        if e & 1:
            r = pmulmod(r, b, m)
        e >>= 1
        if e:
            b = pmulmod(b, b, m)
    return r


def peval(f, x):
    acc = None
    for c in reversed(f):
        acc = c if acc is None else acc * x + c
    if acc is None:
        return x * 0
    return acc


def pderiv(f):
    return ptrim([f[i] * i for i in range(1, len(f))])


def pcompose_mod(f, g, m):
    """f(g) mod m."""
    acc = []
    for c in reversed(f):
        acc = padd(pmulmod(acc, g, m), [c])
    return acc


def _X(F):
    return [F.zero(), F.one()]


def roots_in_field(f, seed=0):
    """Distinct roots of f lying in its coefficient field F (F = F_q)."""
    if not f:
        raise DomainError("zero polynomial")
    F = f[0].F
    q = F.order
    if len(f) == 1:
        return []
    g = pgcd(f, psub(ppowmod(_X(F), q, f), _X(F)))
    return sorted(_split_linear(g, F, random.Random(seed)), key=lambda z: z.c)


def _split_linear(g, F, rng):
    if len(g) <= 1:
        return []
    if len(g) == 2:
        return [-g[0] * g[1].inverse()]
    q = F.order
    while True:
        d = F.random(rng)
        h = ppowmod([d, F.one()], (q - 1) // 2, g)
        h = psub(h, [F.one()])
        k = pgcd(g, h) if h else []
        if k and 1 < len(k) < len(g):
            return _split_linear(k, F, rng) + _split_linear(pdivmod(g, k)[0], F, rng)


def distinct_degree(f):
    """[(d, product of irreducible factors of degree d)] for squarefree monic f."""
    F = f[0].F
    q = F.order
    out = []
    X = _X(F)
    h = X
    d = 0
    rest = pmonic(f)
    while len(rest) > 1:
        d += 1
        if 2 * d > len(rest) - 1:
            out.append((len(rest) - 1, rest))
            break
        h = ppowmod(h, q, rest)
        g = pgcd(rest, psub(h, X))
        if len(g) > 1:
            out.append((d, g))
            rest = pdivmod(rest, g)[0]
            h = pmod(h, rest)
    return out


def equal_degree(g, d, seed=0):
    """Split g (product of distinct irreducibles of degree d) into its factors."""
    F = g[0].F
    q = F.order
    rng = random.Random(seed)
    if len(g) - 1 == d:
        return [pmonic(g)]
    e = (q ** d - 1) // 2
    while True:
        a = [F.random(rng) for _ in range(len(g) - 1)]
        a = ptrim(a)
        if len(a) < 2:
            continue
        h = psub(ppowmod(a, e, g), [F.one()])
        k = pgcd(g, h) if h else []
        if k and 1 < len(k) < len(g):
            return equal_degree(k, d, rng.randrange(10 ** 9)) + \
                equal_degree(pdivmod(g, k)[0], d, rng.randrange(10 ** 9))


# ---------------------------------------------------------------- curves

class ECurve:
    """y^2 = x^3 + a x + b."""

    __slots__ = ("a", "b", "F", "_j")

    def __init__(self, a, b):
        F = a.F if isinstance(a, FqElem) else b.F
        self.F = F
        self.a = F(a)
        self.b = F(b)
        if self.disc() == 0:
            raise DomainError("singular curve")
        self._j = None

    def disc(self):
        return 4 * self.a ** 3 + 27 * self.b ** 2

    @property
    def j(self):
        if self._j is None:
            a3 = 4 * self.a ** 3
            self._j = 1728 * a3 / (a3 + 27 * self.b ** 2)
        return self._j

    def rhs(self):
        return [self.b, self.a, self.F.zero(), self.F.one()]

    def __repr__(self):
        return "ECurve(a=%s, b=%s)" % (self.a, self.b)


def curve_from_j(j, F=None):
    if not isinstance(j, FqElem):
        if F is None:
            raise DomainError("an integer j needs the field F")
        j = F(j)
    F = j.F
    if j == 0:
        return ECurve(F.zero(), F.one())
    if j == 1728:
        return ECurve(F.one(), F.zero())
    k = 1728 - j
    return ECurve(3 * j * k, 2 * j * k * k)


def delta_of(E):
    """Delta(E, dx/y) = -16 (4a^3 + 27b^2)."""
    return -16 * E.disc()


# ---------------------------------------------------------------- division polynomials

def division_polynomials(E, n):
    """f_0..f_n with psi_k = f_k (k odd) and psi_k = 2y f_k (k even), in x only."""
    F = E.F
    a, b = E.a, E.b
    z, one = F.zero(), F.one()
    R2 = pmul(E.rhs(), E.rhs())
    c16 = pscale(R2, F(16))
    f = [[], [one], [one],
         ptrim([-a * a, 12 * b, 6 * a, z, F(3)]),
         ptrim([-8 * b * b - a ** 3, -4 * a * b, -5 * a * a, 20 * b, 5 * a, z, one])]
    # f_4 above is psi_4 / (2y) divided by 2: psi_4 = 4y(...), so f_4 = 2(...)
    f[4] = pscale(f[4], F(2))
    for k in range(5, n + 1):
        m = k // 2
        if k % 2:
            if m % 2 == 0:
                t1 = pmul(c16, pmul(f[m + 2], pmul(f[m], pmul(f[m], f[m]))))
                t2 = pmul(f[m - 1], pmul(f[m + 1], pmul(f[m + 1], f[m + 1])))
            else:
                t1 = pmul(f[m + 2], pmul(f[m], pmul(f[m], f[m])))
                t2 = pmul(c16, pmul(f[m - 1], pmul(f[m + 1], pmul(f[m + 1], f[m + 1]))))
            f.append(psub(t1, t2))
        else:
            t = psub(pmul(f[m + 2], pmul(f[m - 1], f[m - 1])),
                     pmul(f[m - 2], pmul(f[m + 1], f[m + 1])))
            f.append(pmul(f[m], t))
    return f[: n + 1]


def division_polynomial(E, n):
    return division_polynomials(E, n)[n]


class _ExtField:
    """F[z]/(g) for irreducible g; elements are polynomial lists."""

    def __init__(self, g):
        self.g = pmonic(g)

    def mul(self, x, y):
        return pmulmod(x, y, self.g)

    def inv(self, x):
        d, s, _ = pxgcd(x, self.g)
        if len(d) != 1:
            raise DomainError("not invertible in extension")
        return pmod(s, self.g)


def _mult_x(E, fs, k, X, ext):
    """x([k]P) for P with x-coordinate X in the extension."""
    F = E.F
    if k == 1:
        return X
    num = pcompose_mod(pmul(fs[k - 1], fs[k + 1]), X, ext.g)
    den = pcompose_mod(pmul(fs[k], fs[k]), X, ext.g)
    four_f = pscale(pcompose_mod(E.rhs(), X, ext.g), F(4))
    if k % 2:
        num = ext.mul(num, four_f)
    else:
        den = ext.mul(den, four_f)
    return psub(X, ext.mul(num, ext.inv(den)))


def order_ell_subgroups(E, ell):
    """Kernel polynomials (monic, over F) of the ell + 1 subgroups of order ell."""
    F = E.F
    if ell == 2:
        return [[-r, F.one()] for r in roots_in_field(E.rhs())]
    m = (ell - 1) // 2
    fs = division_polynomials(E, max(ell, m + 2))
    fl = pmonic(fs[ell])
    kernels = []
    for d, g in distinct_degree(fl):
        for h in equal_degree(g, d):
            if any(not pmod(k, h) for k in kernels):
                continue
            ext = _ExtField(h)
            X = pmod([F.zero(), F.one()], h)
            xs = [_mult_x(E, fs, k, X, ext) for k in range(1, m + 1)]
            # prod (T - x_k) with coefficients in the extension
            poly = [[F.one()]]
            for xk in xs:
                nxt = [[] for _ in range(len(poly) + 1)]
                for i, c in enumerate(poly):
                    nxt[i + 1] = padd(nxt[i + 1], c)
                    nxt[i] = psub(nxt[i], ext.mul(c, xk))
                poly = nxt
            coeffs = []
            for c in poly:
                if len(c) > 1:
                    raise DomainError("kernel polynomial not rational over the base field")
                coeffs.append(c[0] if c else F.zero())
            kernels.append(ptrim(coeffs))
    if len(kernels) != ell + 1:
        raise DomainError("expected %d kernels of order %d, found %d (torsion not rational?)"
                          % (ell + 1, ell, len(kernels)))
    return kernels


# ---------------------------------------------------------------- Velu

class IsogenyStep:
    __slots__ = ("domain", "codomain", "degree", "kernel")

    def __init__(self, domain, codomain, degree, kernel):
        self.domain, self.codomain, self.degree, self.kernel = domain, codomain, degree, kernel

    def delta_ratio(self):
        """Delta(E, w) / Delta(E', w') with w = phi^* w'."""
        return delta_of(self.domain) / delta_of(self.codomain)

    def __repr__(self):
        return "IsogenyStep(deg=%d, j=%s -> %s)" % (self.degree, self.domain.j, self.codomain.j)


def _power_sums(h, k):
    """Power sums p_1..p_k of the roots of monic h."""
    m = len(h) - 1
    F = h[0].F
    # e_i from coefficients: h = sum (-1)^i e_i X^{m-i}
    e = [F.one()] + [(h[m - i] if i % 2 == 0 else -h[m - i]) for i in range(1, m + 1)]
    p = [F(m)]
    for n in range(1, k + 1):
        s = F.zero()
        for i in range(1, n):
            if i <= m:
                term = e[i] * p[n - i]
                s = s + term if (i - 1) % 2 == 0 else s - term
        if n <= m:
            term = e[n] * n
            s = s + term if (n - 1) % 2 == 0 else s - term
        p.append(s)
    return p


def velu(E, kernel):
    """Velu isogeny with kernel given by its (monic) kernel polynomial."""
    F = E.F
    kernel = pmonic(ptrim(list(kernel)))
    a, b = E.a, E.b
    m = len(kernel) - 1
    if m == 0:
        return IsogenyStep(E, E, 1, kernel)
    if m == 1 and pmod(E.rhs(), kernel) == []:
        x0 = -kernel[0]
        t = 3 * x0 * x0 + a
        w = x0 * t
        return IsogenyStep(E, ECurve(a - 5 * t, b - 7 * w), 2, kernel)
    ell = 2 * m + 1
    fs = division_polynomials(E, max(ell, m + 2))
    if pmod(fs[ell], kernel):
        raise InvalidKernel("kernel polynomial does not divide the %d-division polynomial" % ell)
    for k in range(2, m + 1):
        xk = _mult_x_poly(E, fs, k, kernel)
        if xk is None or pcompose_mod(kernel, xk, kernel):
            raise InvalidKernel("kernel is not closed under multiplication by %d" % k)
    p = _power_sums(kernel, 3)
    t = 6 * p[2] + 2 * a * m
    w = 10 * p[3] + 6 * a * p[1] + 4 * b * m
    return IsogenyStep(E, ECurve(a - 5 * t, b - 7 * w), ell, kernel)


def _mult_x_poly(E, fs, k, h):
    """x([k]P) as a polynomial in x modulo h, or None if the denominator is not invertible."""
    F = E.F
    num = pmul(fs[k - 1], fs[k + 1])
    den = pmul(fs[k], fs[k])
    four_f = pscale(E.rhs(), F(4))
    if k % 2:
        num = pmul(num, four_f)
    else:
        den = pmul(den, four_f)
    num, den = pmod(num, h), pmod(den, h)
    d, s, _ = pxgcd(den, h) if den else ([], [], [])
    if len(d) != 1:
        return None
    return psub([F.zero(), F.one()], pmulmod(num, s, h))


def isogenies(E, ell):
    return [velu(E, k) for k in order_ell_subgroups(E, ell)]


def isogenous_j(E, ell):
    return [st.codomain.j for st in isogenies(E, ell)]

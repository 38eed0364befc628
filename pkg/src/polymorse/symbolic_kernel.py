"""Exact arithmetic layer: bivariate rationals, face limits, log-values.

Three pieces that everything else leans on:

* ``Poly2`` / ``RatFunc2``: rational functions of ``(s, t)`` with Fraction
  coefficients, exact equality via cross multiplication.
* tropical limits: the leading behaviour of a rational function along a face
  direction ``w``, and the induced one-parameter edge profiles.
* ``LogValue``: exact elements of Q + Q*log(primes).  Prime logarithms are
  linearly independent over Q, so equality and zero tests are algebraic;
  ordering falls back to a precision ladder only for provably nonzero values.

Polynomials store nonnegative exponents only; negative powers belong in a
denominator.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath


class DivergentLimit(ArithmeticError):
    """A limit along the requested face direction grows without bound."""


class IrrationalRootError(ArithmeticError):
    """A univariate zero exists that is not rational."""


_ZERO = Fraction(0)
_ONE = Fraction(1)


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected exact rational, got {type(x).__name__}")


class Poly2:
    """Polynomial in (s, t) over Q, stored as {(a, b): coefficient}."""

    __slots__ = ("c",)

    def __init__(self, coeffs=None):
        c = {}
        if coeffs:
            for (a, b), q in coeffs.items():
                q = _as_fraction(q)
                if a < 0 or b < 0:
                    raise ValueError("negative exponent in Poly2")
                if q:
                    c[(int(a), int(b))] = q
        self.c = c

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def const(cls, q):
        return cls({(0, 0): q})

    @classmethod
    def monomial(cls, a, b, q=1):
        return cls({(a, b): q})

    def is_zero(self):
        return not self.c

    def __eq__(self, other):
        return isinstance(other, Poly2) and self.c == other.c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def __add__(self, other):
        c = dict(self.c)
        for e, q in other.c.items():
            v = c.get(e, _ZERO) + q
            if v:
                c[e] = v
            elif e in c:
                del c[e]
        out = Poly2.__new__(Poly2)
        out.c = c
        return out

    def __neg__(self):
        out = Poly2.__new__(Poly2)
        out.c = {e: -q for e, q in self.c.items()}
        return out

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        c = {}
        for (a1, b1), q1 in self.c.items():
            for (a2, b2), q2 in other.c.items():
                e = (a1 + a2, b1 + b2)
                v = c.get(e, _ZERO) + q1 * q2
                if v:
                    c[e] = v
                elif e in c:
                    del c[e]
        out = Poly2.__new__(Poly2)
        out.c = c
        return out

    def scale(self, q):
        q = _as_fraction(q)
        out = Poly2.__new__(Poly2)
        out.c = {} if not q else {e: v * q for e, v in self.c.items()}
        return out

    def pow(self, n):
        if n < 0:
            raise ValueError("negative power on Poly2")
        out = Poly2.const(1)
        for _ in range(n):
            out = out * self
        return out

    def dmul_s(self):
        """s * d/ds, which keeps exponents intact."""
        out = Poly2.__new__(Poly2)
        out.c = {e: q * e[0] for e, q in self.c.items() if e[0]}
        return out

    def dmul_t(self):
        out = Poly2.__new__(Poly2)
        out.c = {e: q * e[1] for e, q in self.c.items() if e[1]}
        return out

    def eval_frac(self, s, t):
        s = _as_fraction(s)
        t = _as_fraction(t)
        total = _ZERO
        for (a, b), q in self.c.items():
            total += q * s**a * t**b
        return total

    def eval_float(self, s, t):
        """Float evaluation; `s`, `t` may be numpy arrays."""
        total = 0.0 * s * t
        for (a, b), q in self.c.items():
            total = total + float(q) * s**a * t**b
        return total

    def deg_along(self, w):
        if not self.c:
            return None
        w1, w2 = w
        return max(a * w1 + b * w2 for a, b in self.c)

    def lead_along(self, w):
        d = self.deg_along(w)
        if d is None:
            return Poly2.zero()
        w1, w2 = w
        out = Poly2.__new__(Poly2)
        out.c = {e: q for e, q in self.c.items() if e[0] * w1 + e[1] * w2 == d}
        return out

    def content_and_int(self):
        """(content, integer polynomial dict) with content > 0."""
        if not self.c:
            return _ONE, {}
        den_lcm = 1
        for q in self.c.values():
            den_lcm = den_lcm * q.denominator // math.gcd(den_lcm, q.denominator)
        ints = {e: q.numerator * (den_lcm // q.denominator) for e, q in self.c.items()}
        g = 0
        for v in ints.values():
            g = math.gcd(g, abs(v))
        return Fraction(g, den_lcm), {e: v // g for e, v in ints.items()}

    def __repr__(self):
        if not self.c:
            return "0"
        parts = []
        for (a, b), q in sorted(self.c.items()):
            mono = "".join(p for p in (f"s^{a}" if a else "", f"t^{b}" if b else "") if p)
            parts.append(f"{q}{'*' if mono else ''}{mono}")
        return " + ".join(parts)


def _lex_leading(poly):
    return poly.c[max(poly.c)] if poly.c else _ZERO


class RatFunc2:
    """Quotient of two Poly2, kept content-normalized with a positive
    lex-leading denominator coefficient."""

    __slots__ = ("num", "den")

    def __init__(self, num, den):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator in RatFunc2")
        if num.is_zero():
            self.num = Poly2.zero()
            self.den = Poly2.const(1)
            return
        cn, ni = num.content_and_int()
        cd, di = den.content_and_int()
        q = cn / cd
        num = Poly2.__new__(Poly2)
        num.c = {e: q * v for e, v in ni.items()}
        den = Poly2.__new__(Poly2)
        den.c = {e: Fraction(v) for e, v in di.items()}
        if _lex_leading(den) < 0:
            num = -num
            den = -den
        self.num = num
        self.den = den

    @classmethod
    def zero(cls):
        return cls(Poly2.zero(), Poly2.const(1))

    @classmethod
    def from_poly(cls, p):
        return cls(p, Poly2.const(1))

    @classmethod
    def from_frac(cls, q):
        return cls(Poly2.const(q), Poly2.const(1))

    def is_zero(self):
        return self.num.is_zero()

    def __eq__(self, other):
        if not isinstance(other, RatFunc2):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        raise TypeError("RatFunc2 is not hashable")

    def __add__(self, other):
        return RatFunc2(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other):
        return RatFunc2(self.num * other.den - other.num * self.den, self.den * other.den)

    def __neg__(self):
        out = RatFunc2.__new__(RatFunc2)
        out.num = -self.num
        out.den = self.den
        return out

    def __mul__(self, other):
        return RatFunc2(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        if other.is_zero():
            raise ZeroDivisionError("division by zero RatFunc2")
        return RatFunc2(self.num * other.den, self.den * other.num)

    def scale(self, q):
        return RatFunc2(self.num.scale(q), self.den)

    def recip(self):
        if self.is_zero():
            raise ZeroDivisionError("reciprocal of zero")
        return RatFunc2(self.den, self.num)

    def eval_frac(self, s, t):
        d = self.den.eval_frac(s, t)
        if d == 0:
            raise ZeroDivisionError("RatFunc2 pole at evaluation point")
        return self.num.eval_frac(s, t) / d

    def eval_float(self, s, t):
        return self.num.eval_float(s, t) / self.den.eval_float(s, t)

    def __repr__(self):
        return f"({self.num!r}) / ({self.den!r})"


def log_deriv_s(f):
    """s * d(log f)/ds as an exact RatFunc2."""
    return RatFunc2(f.num.dmul_s() * f.den - f.num * f.den.dmul_s(), f.num * f.den)


def log_deriv_t(f):
    return RatFunc2(f.num.dmul_t() * f.den - f.num * f.den.dmul_t(), f.num * f.den)


def tropical_limit(f, w):
    """Limit of f when (s, t) -> (S u^{w1}, T u^{w2}) with u -> infinity.

    Returns the residual as a RatFunc2 in the rescaled variables.  The zero
    function is a legitimate limit; unbounded growth raises DivergentLimit.
    """
    if f.num.is_zero():
        return RatFunc2.zero()
    dn = f.num.deg_along(w)
    dd = f.den.deg_along(w)
    if dn > dd:
        raise DivergentLimit(f"limit diverges along direction {w}")
    if dn < dd:
        return RatFunc2.zero()
    return RatFunc2(f.num.lead_along(w), f.den.lead_along(w))


# ---------------------------------------------------------------------------
# univariate layer: edge profiles in the face parameter


def _ustrip(p):
    while p and p[-1] == 0:
        p.pop()
    return p


def _uderiv(p):
    return _ustrip([p[i] * i for i in range(1, len(p))])


def _ueval(p, x):
    total = _ZERO
    for c in reversed(p):
        total = total * x + c
    return total


def _ueval_float(p, x):
    total = 0.0
    for c in reversed(p):
        total = total * x + c
    return total


class UniRat:
    """One-variable rational profile num/den with Fraction coefficients.

    The variable is the face parameter zeta in [0, oo]; zeta = 0 sits at the
    ccw start vertex of the edge.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den):
        self.num = _ustrip([_as_fraction(q) for q in num])
        self.den = _ustrip([_as_fraction(q) for q in den])
        if not self.den:
            raise ZeroDivisionError("zero denominator in UniRat")
        # shift out a common zeta power
        if self.num:
            vn = next(i for i, q in enumerate(self.num) if q)
            vd = next(i for i, q in enumerate(self.den) if q)
            k = min(vn, vd)
            if k:
                self.num = self.num[k:]
                self.den = self.den[k:]

    def is_identically_zero(self):
        return not self.num

    def eval(self, z):
        z = _as_fraction(z)
        d = _ueval(self.den, z)
        if d == 0:
            raise ZeroDivisionError("UniRat pole")
        return _ueval(self.num, z) / d

    def eval_float(self, z):
        num = [float(q) for q in self.num]
        den = [float(q) for q in self.den]
        return _ueval_float(num, z) / _ueval_float(den, z)

    def limit0(self):
        """Exact limit at zeta -> 0+; DivergentLimit when unbounded."""
        if not self.num:
            return _ZERO
        vn = next(i for i, q in enumerate(self.num) if q)
        vd = next(i for i, q in enumerate(self.den) if q)
        if vn > vd:
            return _ZERO
        if vn < vd:
            raise DivergentLimit("UniRat diverges at 0")
        return self.num[vn] / self.den[vd]

    def limit_inf(self):
        if not self.num:
            return _ZERO
        dn = len(self.num) - 1
        dd = len(self.den) - 1
        if dn > dd:
            raise DivergentLimit("UniRat diverges at infinity")
        if dn < dd:
            return _ZERO
        return self.num[dn] / self.den[dd]

    def deriv(self):
        """Derivative profile (n'd - nd') / d^2."""
        n, d = self.num, self.den
        nd = _usub(_umul(_uderiv(n), d), _umul(n, _uderiv(d)))
        return UniRat(nd if nd else [0], _umul(d, d))

    def positive_roots(self):
        """Certified positive rational roots of the numerator."""
        if not self.num:
            raise ValueError("identically zero profile has no root list")
        return rational_roots_positive(self.num)

    def __repr__(self):
        return f"UniRat({self.num}, {self.den})"


def _umul(p, q):
    if not p or not q:
        return []
    out = [_ZERO] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if not a:
            continue
        for j, b in enumerate(q):
            if b:
                out[i + j] += a * b
    return _ustrip(out)


def _usub(p, q):
    out = list(p) + [_ZERO] * max(0, len(q) - len(p))
    for j, b in enumerate(q):
        out[j] -= b
    return _ustrip(out)


def _udivmod(p, q):
    p = list(p)
    if not q:
        raise ZeroDivisionError
    quot = [_ZERO] * max(0, len(p) - len(q) + 1)
    while len(p) >= len(q) and p:
        k = len(p) - len(q)
        c = p[-1] / q[-1]
        quot[k] = c
        for j, b in enumerate(q):
            p[k + j] -= c * b
        _ustrip(p)
    return _ustrip(quot), p


def _sign(x):
    return (x > 0) - (x < 0)


def sturm_count_positive(p):
    """Number of distinct real roots of p in the open interval (0, oo).

    p must not vanish at 0; strip zeta powers first.
    """
    p = _ustrip([_as_fraction(q) for q in p])
    if not p:
        raise ValueError("zero polynomial")
    if p[0] == 0:
        raise ValueError("root at zero; strip first")
    if len(p) == 1:
        return 0
    chain = [p, _uderiv(p)]
    while chain[-1]:
        _, r = _udivmod(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-c for c in r])
    def variations(signs):
        signs = [s for s in signs if s]
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    at0 = []
    atinf = []
    for q in chain:
        if not q:
            continue
        # sign at 0+ is carried by the lowest order coefficient,
        # sign at infinity by the leading one
        at0.append(_sign(next(c for c in q if c)))
        atinf.append(_sign(q[-1]))
    return variations(at0) - variations(atinf)


def _divisors(n):
    n = abs(n)
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i != n // i:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def rational_roots_positive(p):
    """All positive roots of p, certified rational via a Sturm count.

    Raises IrrationalRootError when the Sturm count exceeds the rational
    roots found, so callers never silently miss a zero.
    """
    p = _ustrip([_as_fraction(q) for q in p])
    if not p:
        raise ValueError("zero polynomial")
    v = next(i for i, q in enumerate(p) if q)
    p = p[v:]
    if len(p) == 1:
        return []
    den_lcm = 1
    for q in p:
        den_lcm = den_lcm * q.denominator // math.gcd(den_lcm, q.denominator)
    ip = [q.numerator * (den_lcm // q.denominator) for q in p]
    a0, an = ip[0], ip[-1]
    roots = set()
    for dn in _divisors(a0):
        for dd in _divisors(an):
            r = Fraction(dn, dd)
            if r not in roots and _ueval(p, r) == 0:
                roots.add(r)
    count = sturm_count_positive(p)
    if count != len(roots):
        raise IrrationalRootError(
            f"found {len(roots)} rational positive roots, Sturm count {count}")
    return sorted(roots)


def edge_profile(f, w):
    """Profile of f along the face with outward direction w, as a UniRat.

    The face parameter is zeta = S^{d1} T^{d2} for d = (-w2, w1), the ccw
    tangent.  Raises DivergentLimit when f is unbounded on the face.
    """
    r = tropical_limit(f, w)
    if r.is_zero():
        return UniRat([0], [1])
    d = (-w[1], w[0])
    monos = list(r.num.c) + list(r.den.c)
    base = monos[0]

    def step(e):
        de = (e[0] - base[0], e[1] - base[1])
        if d[0]:
            k, rem = divmod(de[0], d[0])
            if rem or k * d[1] != de[1]:
                raise ArithmeticError("monomial off the face lattice")
        elif d[1]:
            k, rem = divmod(de[1], d[1])
            if rem or k * d[0] != de[0]:
                raise ArithmeticError("monomial off the face lattice")
        else:
            raise ValueError("zero tangent")
        return k

    nsteps = {step(e): q for e, q in r.num.c.items()}
    dsteps = {step(e): q for e, q in r.den.c.items()}
    lo = min(min(nsteps), min(dsteps))
    nlist = [_ZERO] * (max(nsteps) - lo + 1)
    for k, q in nsteps.items():
        nlist[k - lo] = q
    dlist = [_ZERO] * (max(dsteps) - lo + 1)
    for k, q in dsteps.items():
        dlist[k - lo] = q
    return UniRat(nlist, dlist)


# ---------------------------------------------------------------------------
# exact log-values


def _factorize(n):
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    out = {}
    for p in (2, 3, 5):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 7
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


class LogValue:
    """Exact value q0 + sum q_p log p over primes p.

    Distinct prime logs are linearly independent over Q, which makes zero
    tests and equality purely algebraic.  Ordering of provably nonzero values
    uses an escalating-precision numeric ladder.
    """

    __slots__ = ("rat", "logs")

    def __init__(self, rat=_ZERO, logs=None):
        self.rat = _as_fraction(rat)
        self.logs = {p: q for p, q in (logs or {}).items() if q}

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def from_log(cls, x, scale=_ONE):
        """scale * log(x) for a positive rational x."""
        x = _as_fraction(x)
        scale = _as_fraction(scale)
        if x <= 0:
            raise ValueError("log of a non-positive rational")
        logs = {}
        for p, e in _factorize(x.numerator).items():
            logs[p] = logs.get(p, _ZERO) + scale * e
        for p, e in _factorize(x.denominator).items():
            logs[p] = logs.get(p, _ZERO) - scale * e
        return cls(_ZERO, logs)

    def __add__(self, other):
        logs = dict(self.logs)
        for p, q in other.logs.items():
            v = logs.get(p, _ZERO) + q
            if v:
                logs[p] = v
            elif p in logs:
                del logs[p]
        return LogValue(self.rat + other.rat, logs)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return LogValue(-self.rat, {p: -q for p, q in self.logs.items()})

    def scale(self, q):
        q = _as_fraction(q)
        if not q:
            return LogValue.zero()
        return LogValue(self.rat * q, {p: v * q for p, v in self.logs.items()})

    def is_zero(self):
        return not self.rat and not self.logs

    def __eq__(self, other):
        if not isinstance(other, LogValue):
            return NotImplemented
        return self.rat == other.rat and self.logs == other.logs

    def to_float(self):
        with mpmath.workdps(50):
            v = mpmath.mpf(self.rat.numerator) / self.rat.denominator
            for p, q in sorted(self.logs.items()):
                v += mpmath.log(p) * mpmath.mpf(q.numerator) / q.denominator
            return float(v)

    def sign(self):
        if self.is_zero():
            return 0
        if not self.logs:
            return _sign(self.rat)
        for dps in (40, 80, 160, 320, 640, 1280):
            with mpmath.workdps(dps):
                v = mpmath.mpf(self.rat.numerator) / self.rat.denominator
                for p, q in sorted(self.logs.items()):
                    v += mpmath.log(p) * mpmath.mpf(q.numerator) / q.denominator
                if abs(v) > mpmath.mpf(10) ** (-dps + 10):
                    return 1 if v > 0 else -1
        raise ArithmeticError("sign did not resolve on the precision ladder")

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def exp_neg(self):
        """exp(-value): an exact Fraction when all prime exponents are
        integers and the rational part vanishes, else a float."""
        if self.rat == 0 and all(q.denominator == 1 for q in self.logs.values()):
            out = Fraction(1)
            for p, q in self.logs.items():
                out *= Fraction(p) ** (-q.numerator)
            return out
        return math.exp(-self.to_float())

    def terms(self):
        return [(q, p) for p, q in sorted(self.logs.items())]

    def pretty(self):
        if self.is_zero():
            return "0"
        parts = []
        if self.rat:
            parts.append(str(self.rat))
        for q, p in self.terms():
            if q == 1:
                parts.append(f"log {p}")
            else:
                parts.append(f"({q}) log {p}")
        return " + ".join(parts)

    def __repr__(self):
        return f"LogValue<{self.pretty()}>"


def logvalue_min(values):
    """Exact minimum of a nonempty iterable of LogValue."""
    it = iter(values)
    best = next(it)
    for v in it:
        if (v - best).sign() < 0:
            best = v
    return best

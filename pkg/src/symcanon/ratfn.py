"""Rational functions of the five parameters, with exact normalization.

Normalization cancels the monomial content, any exact polynomial divisor
(found by the multivariate division algorithm), and common univariate factors
found by exact GCDs one variable at a time.  The denominators produced by the
engines are univariate in L2, which this reduction cancels completely; for
general inputs equality is still exact because comparison cross-multiplies.
"""

from symcanon._core import (
    GAUSS_ONE,
    GaussRational,
    ParamPoly,
    Rational,
    grlex_key,
    key_divides,
)

_SHIFT = 16
_MASK = (1 << _SHIFT) - 1


def _is_one(p):
    return len(p.t) == 1 and p.t.get(0) == GAUSS_ONE


def poly_divmod_exact(num, den):
    """Quotient num/den if den divides num exactly, else None."""
    if den.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    if num.is_zero():
        return ParamPoly.zero()
    dk, dc = den.leading()
    q = {}
    r = num
    while not r.is_zero():
        rk, rc = r.leading()
        if not key_divides(dk, rk):
            return None
        k = rk - dk
        c = rc / dc
        q[k] = c
        r = r - den.mul_monomial(k, c)
    return ParamPoly(q)


def _univar_profile(p, var):
    """Group terms by their non-var monomial: {residual key: {exp: coeff}}."""
    s = var * _SHIFT
    clear = ~(_MASK << s)
    out = {}
    for k, c in p.t.items():
        e = (k >> s) & _MASK
        out.setdefault(k & clear, {})[e] = c
    return out


def _coeffs_trim(cs):
    while cs and cs[-1].is_zero():
        cs.pop()
    return cs


def _dict_to_coeffs(d):
    n = max(d) + 1
    cs = [GaussRational(0)] * n
    for e, c in d.items():
        cs[e] = c
    return cs


def _univar_rem(a, b):
    """Remainder of univariate division a mod b (coefficient lists, b != 0)."""
    a = list(a)
    db = len(b) - 1
    lb = b[-1]
    while len(a) - 1 >= db and a:
        la = a[-1]
        if la.is_zero():
            a.pop()
            continue
        f = la / lb
        sh = len(a) - 1 - db
        for i in range(db):
            a[sh + i] = a[sh + i] - f * b[i]
        a.pop()
        _coeffs_trim(a)
    return a


def _univar_gcd(a, b):
    a = _coeffs_trim(list(a))
    b = _coeffs_trim(list(b))
    while b:
        a, b = b, _univar_rem(a, b)
    if a:
        lc = a[-1]
        a = [c / lc for c in a]
    return a


def _poly_from_univar(var, coeffs):
    s = var * _SHIFT
    return ParamPoly({e << s: c for e, c in enumerate(coeffs) if not c.is_zero()})


def _gcd_univar_vs_any(f, g, var):
    """GCD of f (univariate in var) with arbitrary g, as a poly in var only.

    A univariate common divisor must divide every var-slice of g, so it is
    gcd(f, gcd of the slice coefficient lists).
    """
    acc = _dict_to_coeffs({e: c for e, c in _univar_profile(f, var)[0].items()})
    for d in _univar_profile(g, var).values():
        acc = _univar_gcd(acc, _dict_to_coeffs(d))
        if len(acc) == 1:
            return None
    return _poly_from_univar(var, acc)


def poly_gcd(a, b):
    """The full multivariate GCD of a and b, monic under graded lex.

    Fast paths (exact division, shared-variable univariate Euclid) cover the
    engine workload; the general case runs a primitive pseudo-remainder
    sequence in the lowest shared variable with recursive content removal.
    """
    if a.is_zero():
        return _monic(b)
    if b.is_zero():
        return _monic(a)
    ma = a.min_exponents()
    mb = b.min_exponents()
    mk = 0
    for i in range(5):
        s = i * _SHIFT
        mk |= min((ma >> s) & _MASK, (mb >> s) & _MASK) << s
    a = a.shift_down(ma)
    b = b.shift_down(mb)
    g = _gcd_stripped(a, b)
    if mk:
        g = g.mul_monomial(mk, GAUSS_ONE)
    return _monic(g)


def _gcd_stripped(a, b):
    if a == b:
        return a
    if a.is_const() or b.is_const():
        return ParamPoly.one()
    if poly_divmod_exact(b, a) is not None:
        return a
    if poly_divmod_exact(a, b) is not None:
        return b
    va = a.vars_used()
    vb = b.vars_used()
    if len(va) == 1:
        g = _gcd_univar_vs_any(a, b, next(iter(va)))
        return g if g is not None else ParamPoly.one()
    if len(vb) == 1:
        g = _gcd_univar_vs_any(b, a, next(iter(vb)))
        return g if g is not None else ParamPoly.one()
    shared = va & vb
    if not shared:
        return ParamPoly.one()
    return _gcd_prs(a, b, min(shared))


def _var_coeffs(p, v):
    """p as a polynomial in variable v: list of ParamPoly coefficients."""
    s = v * _SHIFT
    clear = ~(_MASK << s)
    out = {}
    for k, c in p.t.items():
        e = (k >> s) & _MASK
        out.setdefault(e, {})[k & clear] = c
    top = max(out)
    return [ParamPoly(out.get(e, {})) for e in range(top + 1)]


def _from_var_coeffs(v, coeffs):
    s = v * _SHIFT
    t = {}
    for e, p in enumerate(coeffs):
        for k, c in p.t.items():
            t[k | (e << s)] = c
    return ParamPoly(t)


def _coeff_list_gcd(coeffs):
    g = ParamPoly.zero()
    for c in coeffs:
        if c.is_zero():
            continue
        g = poly_gcd(g, c)
        if g.is_const():
            return ParamPoly.one()
    return g if not g.is_zero() else ParamPoly.one()


def _trim(coeffs):
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    return coeffs


def _gcd_prs(a, b, v):
    """Primitive pseudo-remainder sequence in variable v."""
    ca = _coeff_list_gcd(_var_coeffs(a, v))
    cb = _coeff_list_gcd(_var_coeffs(b, v))
    cont = _gcd_stripped(ca, cb) if not (ca.is_const() or cb.is_const()) else ParamPoly.one()
    r0 = _trim([_must_div(c, ca) for c in _var_coeffs(a, v)])
    r1 = _trim([_must_div(c, cb) for c in _var_coeffs(b, v)])
    if len(r0) < len(r1):
        r0, r1 = r1, r0
    while r1:
        r = _pseudo_rem(r0, r1, v)
        if r:
            cg = _coeff_list_gcd(r)
            if not _is_one(cg):
                r = [_must_div(c, cg) for c in r]
        r0, r1 = r1, r
    if len(r0) == 1:
        g = cont
    else:
        g = cont * _from_var_coeffs(v, r0)
    # the PRS can pick up extraneous factors; keep only a verified divisor
    if poly_divmod_exact(a, g) is None or poly_divmod_exact(b, g) is None:
        head = _from_var_coeffs(v, r0)
        if (
            poly_divmod_exact(a, head) is not None
            and poly_divmod_exact(b, head) is not None
        ):
            return head
        return cont if (
            poly_divmod_exact(a, cont) is not None
            and poly_divmod_exact(b, cont) is not None
        ) else ParamPoly.one()
    return g


def _must_div(num, den):
    q = poly_divmod_exact(num, den)
    assert q is not None, "content division must be exact"
    return q


def _pseudo_rem(r0, r1, v):
    """Pseudo-remainder of r0 by r1 as coefficient lists in v (multiply-through)."""
    r0 = list(r0)
    d1 = len(r1) - 1
    lc1 = r1[-1]
    while len(r0) - 1 >= d1 and r0:
        lc0 = r0[-1]
        if lc0.is_zero():
            r0.pop()
            continue
        sh = len(r0) - 1 - d1
        r0 = [c * lc1 for c in r0]
        for i in range(d1 + 1):
            r0[sh + i] = r0[sh + i] - lc0 * r1[i]
        r0.pop()
        _trim(r0)
    return r0


def _monic(p):
    if p.is_zero():
        return p
    _, lc = p.leading()
    if lc == GAUSS_ONE:
        return p
    return p.scaled(GaussRational(1) / lc)


def poly_lcm(a, b):
    if a.is_zero() or b.is_zero():
        return ParamPoly.zero()
    g = poly_gcd(a, b)
    q = poly_divmod_exact(b, g)
    return _monic(a * q)


def poly_lcm_all(polys):
    out = ParamPoly.one()
    for p in polys:
        out = poly_lcm(out, p)
    return out


class ParamRatFn:
    """Quotient of two ParamPoly values, normalized on construction.

    Invariants: den != 0; zero is 0/1; den is monic under graded lex; the
    normalization is idempotent.  Equality is decided by cross-multiplication
    and therefore independent of how much the reduction managed to cancel.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if den is None:
            den = ParamPoly.one()
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            self.num = ParamPoly.zero()
            self.den = ParamPoly.one()
            return
        if not _is_one(den):
            g = poly_gcd(num, den)
            if not _is_one(g):
                num = poly_divmod_exact(num, g)
                den = poly_divmod_exact(den, g)
            _, lc = den.leading()
            if lc != GAUSS_ONE:
                inv = GaussRational(1) / lc
                num = num.scaled(inv)
                den = den.scaled(inv)
        self.num = num
        self.den = den

    @staticmethod
    def zero():
        return ParamRatFn(ParamPoly.zero())

    @staticmethod
    def one():
        return ParamRatFn(ParamPoly.one())

    @staticmethod
    def of(x):
        """Coerce an int, Rational, GaussRational or ParamPoly."""
        if isinstance(x, ParamRatFn):
            return x
        if isinstance(x, ParamPoly):
            return ParamRatFn(x)
        if isinstance(x, (int, Rational, GaussRational)):
            return ParamRatFn(ParamPoly.const(x))
        raise TypeError(f"cannot coerce {type(x).__name__} to ParamRatFn")

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_polynomial(self):
        return _is_one(self.den)

    def as_poly(self):
        if not _is_one(self.den):
            raise ValueError(f"not a polynomial: {self}")
        return self.num

    def __add__(self, other):
        if isinstance(other, (int, Rational, GaussRational, ParamPoly)):
            other = ParamRatFn.of(other)
        if not isinstance(other, ParamRatFn):
            return NotImplemented
        if self.den is other.den or self.den == other.den:
            return ParamRatFn(self.num + other.num, self.den)
        return ParamRatFn(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Rational, GaussRational, ParamPoly)):
            other = ParamRatFn.of(other)
        if not isinstance(other, ParamRatFn):
            return NotImplemented
        if self.den is other.den or self.den == other.den:
            return ParamRatFn(self.num - other.num, self.den)
        return ParamRatFn(
            self.num * other.den - other.num * self.den, self.den * other.den
        )

    def __rsub__(self, other):
        return ParamRatFn.of(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Rational, GaussRational)):
            return ParamRatFn(self.num * other, self.den)
        if isinstance(other, ParamPoly):
            other = ParamRatFn(other)
        if not isinstance(other, ParamRatFn):
            return NotImplemented
        if _is_one(self.den) and _is_one(other.den):
            out = ParamRatFn.__new__(ParamRatFn)
            out.num = self.num * other.num
            out.den = self.den
            return out
        return ParamRatFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = ParamRatFn.of(other)
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return ParamRatFn(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return ParamRatFn.of(other) / self

    def __neg__(self):
        out = ParamRatFn.__new__(ParamRatFn)
        out.num = -self.num
        out.den = self.den
        return out

    def __pow__(self, e):
        if e < 0:
            return ParamRatFn(self.den ** (-e), self.num ** (-e))
        return ParamRatFn(self.num**e, self.den**e)

    def __eq__(self, other):
        if isinstance(other, (int, Rational, GaussRational, ParamPoly)):
            other = ParamRatFn.of(other)
        if not isinstance(other, ParamRatFn):
            return NotImplemented
        if self.den == other.den:
            return self.num == other.num
        return self.num * other.den == other.num * self.den

    def __str__(self):
        if _is_one(self.den):
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"ParamRatFn<{self}>"


RATFN_ZERO = ParamRatFn.zero()
RATFN_ONE = ParamRatFn.one()

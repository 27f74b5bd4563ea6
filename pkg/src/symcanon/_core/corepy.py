"""Pure-Python arithmetic kernel: rationals, Gaussian rationals, parameter polynomials.

Reference implementation of the hot kernel.  A Cython twin with the identical
API lives in ``_corecy.pyx``; ``symcanon._core`` imports whichever is available
(compiled preferred, override with SYMCANON_BACKEND=py|cy).

A ParamPoly is a polynomial in the five parameters H, L2, alpha, beta, gamma
with Gaussian-rational coefficients.  Exponent 5-tuples are packed into a
single int (16 bits per variable) so that monomial products are plain integer
additions and term maps hash fast.
"""

from math import gcd

NVARS = 5
VAR_NAMES = ("H", "L2", "alpha", "beta", "gamma")
VAR_H, VAR_L2, VAR_ALPHA, VAR_BETA, VAR_GAMMA = range(NVARS)

_SHIFT = 16
_MASK = (1 << _SHIFT) - 1
_DEG_LIMIT = 1 << (_SHIFT - 2)


def encode_exponents(exps):
    """Pack an exponent 5-tuple into one int key."""
    k = 0
    for i in range(NVARS):
        e = exps[i]
        if e < 0 or e >= _DEG_LIMIT:
            raise OverflowError(f"exponent {e} out of range for packed key")
        k |= e << (i * _SHIFT)
    return k


def decode_key(k):
    """Unpack an int key back to the exponent 5-tuple."""
    return tuple((k >> (i * _SHIFT)) & _MASK for i in range(NVARS))


def key_degree(k):
    d = 0
    for _ in range(NVARS):
        d += k & _MASK
        k >>= _SHIFT
    return d


def key_divides(kd, kn):
    """True if the monomial kd divides kn (componentwise <=)."""
    for _ in range(NVARS):
        if (kd & _MASK) > (kn & _MASK):
            return False
        kd >>= _SHIFT
        kn >>= _SHIFT
    return True


def grlex_key(k):
    """Sort key for graded lex order with precedence H > L2 > alpha > beta > gamma."""
    return (key_degree(k),) + decode_key(k)


class Rational:
    """Exact rational with arbitrary-precision integer parts, always reduced."""

    __slots__ = ("n", "d")

    def __init__(self, n=0, d=1):
        if d == 0:
            raise ZeroDivisionError("rational with zero denominator")
        if d < 0:
            n = -n
            d = -d
        g = gcd(n, d)
        if g > 1:
            n //= g
            d //= g
        self.n = n
        self.d = d

    @property
    def numerator(self):
        return self.n

    @property
    def denominator(self):
        return self.d

    def is_zero(self):
        return self.n == 0

    def is_integer(self):
        return self.d == 1

    def __bool__(self):
        return self.n != 0

    def __add__(self, other):
        if isinstance(other, int):
            return Rational(self.n + other * self.d, self.d)
        if isinstance(other, Rational):
            return Rational(self.n * other.d + other.n * self.d, self.d * other.d)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            return Rational(self.n - other * self.d, self.d)
        if isinstance(other, Rational):
            return Rational(self.n * other.d - other.n * self.d, self.d * other.d)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, int):
            return Rational(other * self.d - self.n, self.d)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, int):
            return Rational(self.n * other, self.d)
        if isinstance(other, Rational):
            return Rational(self.n * other.n, self.d * other.d)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, int):
            return Rational(self.n, self.d * other)
        if isinstance(other, Rational):
            if other.n == 0:
                raise ZeroDivisionError("division by zero rational")
            return Rational(self.n * other.d, self.d * other.n)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, int):
            if self.n == 0:
                raise ZeroDivisionError("division by zero rational")
            return Rational(other * self.d, self.n)
        return NotImplemented

    def __neg__(self):
        r = Rational.__new__(Rational)
        r.n = -self.n
        r.d = self.d
        return r

    def __abs__(self):
        r = Rational.__new__(Rational)
        r.n = abs(self.n)
        r.d = self.d
        return r

    def __pow__(self, e):
        if e >= 0:
            return Rational(self.n**e, self.d**e)
        if self.n == 0:
            raise ZeroDivisionError("0 ** negative")
        return Rational(self.d ** (-e), self.n ** (-e))

    def __eq__(self, other):
        if isinstance(other, Rational):
            return self.n == other.n and self.d == other.d
        if isinstance(other, int):
            return self.d == 1 and self.n == other
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, int):
            return self.n < other * self.d
        return self.n * other.d < other.n * self.d

    def __le__(self, other):
        if isinstance(other, int):
            return self.n <= other * self.d
        return self.n * other.d <= other.n * self.d

    def __gt__(self, other):
        if isinstance(other, int):
            return self.n > other * self.d
        return self.n * other.d > other.n * self.d

    def __ge__(self, other):
        if isinstance(other, int):
            return self.n >= other * self.d
        return self.n * other.d >= other.n * self.d

    def __hash__(self):
        return hash((self.n, self.d))

    def __str__(self):
        return str(self.n) if self.d == 1 else f"{self.n}/{self.d}"

    def __repr__(self):
        return f"Rational({self.n}, {self.d})"

    @staticmethod
    def from_str(s):
        s = s.strip()
        if "/" in s:
            a, b = s.split("/")
            return Rational(int(a), int(b))
        return Rational(int(s))


RAT_ZERO = Rational(0)
RAT_ONE = Rational(1)


def _as_rational(x):
    if isinstance(x, Rational):
        return x
    if isinstance(x, int):
        return Rational(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to Rational")


class GaussRational:
    """Element of Q(i): a pair of rationals with i**2 = -1."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _as_rational(re)
        self.im = _as_rational(im)

    def is_zero(self):
        return self.re.n == 0 and self.im.n == 0

    def __bool__(self):
        return not self.is_zero()

    def __add__(self, other):
        other = _as_gauss(other)
        return GaussRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_gauss(other)
        return GaussRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _as_gauss(other) - self

    def __mul__(self, other):
        other = _as_gauss(other)
        if self.im.n == 0 and other.im.n == 0:
            return GaussRational(self.re * other.re, RAT_ZERO)
        return GaussRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_gauss(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero Gaussian rational")
        if other.im.n == 0:
            return GaussRational(self.re / other.re, self.im / other.re)
        nrm = other.re * other.re + other.im * other.im
        return GaussRational(
            (self.re * other.re + self.im * other.im) / nrm,
            (self.im * other.re - self.re * other.im) / nrm,
        )

    def __rtruediv__(self, other):
        return _as_gauss(other) / self

    def __neg__(self):
        return GaussRational(-self.re, -self.im)

    def conjugate(self):
        return GaussRational(self.re, -self.im)

    def __pow__(self, e):
        if e < 0:
            return GaussRational(1) / (self ** (-e))
        out = GaussRational(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Rational, GaussRational)):
            other = _as_gauss(other)
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re.n, self.re.d, self.im.n, self.im.d))

    def __str__(self):
        if self.im.n == 0:
            return str(self.re)
        if self.re.n == 0:
            return f"{self.im}i"
        sign = "+" if self.im.n > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"

    def __repr__(self):
        return f"GaussRational({self.re!r}, {self.im!r})"


def _as_gauss(x):
    if isinstance(x, GaussRational):
        return x
    if isinstance(x, (int, Rational)):
        return GaussRational(x, 0)
    raise TypeError(f"cannot coerce {type(x).__name__} to GaussRational")


GAUSS_ZERO = GaussRational(0)
GAUSS_ONE = GaussRational(1)
GAUSS_I = GaussRational(0, 1)


class ParamPoly:
    """Polynomial in H, L2, alpha, beta, gamma over the Gaussian rationals.

    Term map: packed exponent key -> nonzero GaussRational.  Instances are
    treated as immutable by every caller.
    """

    __slots__ = ("t",)

    def __init__(self, terms=None):
        self.t = {} if terms is None else terms

    @staticmethod
    def zero():
        return ParamPoly({})

    @staticmethod
    def one():
        return ParamPoly({0: GAUSS_ONE})

    @staticmethod
    def const(c):
        c = _as_gauss(c)
        return ParamPoly({0: c} if not c.is_zero() else {})

    @staticmethod
    def variable(i, power=1):
        if not 0 <= i < NVARS:
            raise ValueError(f"variable index {i} out of range")
        if power == 0:
            return ParamPoly.one()
        return ParamPoly({power << (i * _SHIFT): GAUSS_ONE})

    @staticmethod
    def from_terms(tuple_terms):
        t = {}
        for exps, c in tuple_terms.items():
            c = _as_gauss(c)
            if not c.is_zero():
                k = encode_exponents(exps)
                acc = t.get(k)
                c = c if acc is None else acc + c
                if c.is_zero():
                    t.pop(k, None)
                else:
                    t[k] = c
        return ParamPoly(t)

    def terms(self):
        """Iterate (exponent 5-tuple, coefficient) pairs, unordered."""
        for k, c in self.t.items():
            yield decode_key(k), c

    def sorted_terms(self):
        """Terms sorted descending in graded lex order (deterministic output)."""
        for k in sorted(self.t, key=grlex_key, reverse=True):
            yield decode_key(k), self.t[k]

    def num_terms(self):
        return len(self.t)

    def is_zero(self):
        return not self.t

    def __bool__(self):
        return bool(self.t)

    def is_const(self):
        return not self.t or (len(self.t) == 1 and 0 in self.t)

    def const_value(self):
        """The coefficient of the constant monomial."""
        return self.t.get(0, GAUSS_ZERO)

    def __eq__(self, other):
        if isinstance(other, ParamPoly):
            return self.t == other.t
        return NotImplemented

    def __add__(self, other):
        if not isinstance(other, ParamPoly):
            return NotImplemented
        a, b = self.t, other.t
        if len(a) < len(b):
            a, b = b, a
        out = dict(a)
        for k, c in b.items():
            acc = out.get(k)
            if acc is None:
                out[k] = c
            else:
                s = acc + c
                if s.is_zero():
                    del out[k]
                else:
                    out[k] = s
        return ParamPoly(out)

    def __sub__(self, other):
        if not isinstance(other, ParamPoly):
            return NotImplemented
        out = dict(self.t)
        for k, c in other.t.items():
            acc = out.get(k)
            if acc is None:
                out[k] = -c
            else:
                s = acc - c
                if s.is_zero():
                    del out[k]
                else:
                    out[k] = s
        return ParamPoly(out)

    def __neg__(self):
        return ParamPoly({k: -c for k, c in self.t.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Rational, GaussRational)):
            return self.scaled(other)
        if not isinstance(other, ParamPoly):
            return NotImplemented
        a, b = self.t, other.t
        if not a or not b:
            return ParamPoly({})
        if len(a) > len(b):
            a, b = b, a
        out = {}
        for k1, c1 in a.items():
            for k2, c2 in b.items():
                k = k1 + k2
                p = c1 * c2
                acc = out.get(k)
                if acc is None:
                    out[k] = p
                else:
                    s = acc + p
                    if s.is_zero():
                        del out[k]
                    else:
                        out[k] = s
        return ParamPoly(out)

    __rmul__ = __mul__

    def scaled(self, c):
        c = _as_gauss(c)
        if c.is_zero():
            return ParamPoly({})
        return ParamPoly({k: v * c for k, v in self.t.items()})

    def mul_monomial(self, key, coeff):
        """Multiply by coeff * (monomial with packed key)."""
        if coeff.is_zero():
            return ParamPoly({})
        return ParamPoly({k + key: v * coeff for k, v in self.t.items()})

    def __pow__(self, e):
        if e < 0:
            raise ValueError("negative power of a ParamPoly")
        out = ParamPoly.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def total_degree(self):
        if not self.t:
            return -1
        return max(key_degree(k) for k in self.t)

    def degree_in(self, i):
        if not self.t:
            return -1
        s = i * _SHIFT
        return max((k >> s) & _MASK for k in self.t)

    def vars_used(self):
        used = set()
        for k in self.t:
            for i in range(NVARS):
                if (k >> (i * _SHIFT)) & _MASK:
                    used.add(i)
        return used

    def leading(self):
        """(packed key, coefficient) of the graded-lex leading term."""
        if not self.t:
            raise ValueError("zero polynomial has no leading term")
        k = max(self.t, key=grlex_key)
        return k, self.t[k]

    def coeff_of_key(self, k):
        return self.t.get(k, GAUSS_ZERO)

    def subs_scalar(self, i, value):
        """Substitute variable i by a GaussRational value."""
        value = _as_gauss(value)
        s = i * _SHIFT
        clear = ~(_MASK << s)
        powers = {0: GAUSS_ONE}
        out = {}
        for k, c in self.t.items():
            e = (k >> s) & _MASK
            pw = powers.get(e)
            if pw is None:
                pw = value**e
                powers[e] = pw
            c = c * pw
            if c.is_zero():
                continue
            k2 = k & clear
            acc = out.get(k2)
            if acc is None:
                out[k2] = c
            else:
                t = acc + c
                if t.is_zero():
                    del out[k2]
                else:
                    out[k2] = t
        return ParamPoly(out)

    def derivative(self, i):
        """Formal partial derivative with respect to variable i."""
        s = i * _SHIFT
        out = {}
        for k, c in self.t.items():
            e = (k >> s) & _MASK
            if e:
                out[k - (1 << s)] = c * e
        return ParamPoly(out)

    def subs_var(self, src, dst, negate=False):
        """Substitute variable src by (+|-) variable dst (exponent remap)."""
        ss = src * _SHIFT
        ds = dst * _SHIFT
        clear = ~(_MASK << ss)
        out = {}
        for k, c in self.t.items():
            e = (k >> ss) & _MASK
            k2 = (k & clear) + (e << ds)
            if negate and (e & 1):
                c = -c
            acc = out.get(k2)
            s2 = c if acc is None else acc + c
            if s2.is_zero():
                out.pop(k2, None)
            else:
                out[k2] = s2
        return ParamPoly(out)

    def min_exponents(self):
        """Componentwise minimum exponent vector over all terms (packed)."""
        if not self.t:
            return 0
        mins = [_MASK + 1] * NVARS
        for k in self.t:
            for i in range(NVARS):
                e = (k >> (i * _SHIFT)) & _MASK
                if e < mins[i]:
                    mins[i] = e
        k = 0
        for i in range(NVARS):
            k |= mins[i] << (i * _SHIFT)
        return k

    def shift_down(self, key):
        """Divide by the monomial with packed key (must divide every term)."""
        if key == 0:
            return self
        return ParamPoly({k - key: c for k, c in self.t.items()})

    def __str__(self):
        if not self.t:
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            mono = "*".join(
                f"{VAR_NAMES[i]}^{e}" if e > 1 else VAR_NAMES[i]
                for i, e in enumerate(exps)
                if e
            )
            cs = str(c)
            if "+" in cs[1:] or "-" in cs[1:]:
                cs = f"({cs})"
            parts.append(f"{cs}*{mono}" if mono else cs)
        return " + ".join(parts)

    def __repr__(self):
        return f"ParamPoly<{self}>"

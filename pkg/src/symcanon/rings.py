"""The two differentiation-closed function rings the engines work in.

Exponential ring: monomials e^{2aR} e^{2itθ} with rational a, t.  The angular
exponent is stored directly as t (for a lattice index b at rotation number k,
t = b*k), so integer and half-integer angular factors share one ring.

Trig ring at rotation number k: monomials e^{2aR} sin^b(2kθ) cos^c(2kθ) with
rational a, integer b (negative allowed, the algebra is formal) and c in
{0, 1}; cos^2 is rewritten to 1 - sin^2 on the fly.
"""

from symcanon._core import GAUSS_ONE, GaussRational, Rational
from symcanon.linalg import InconsistentSystemError, solve_free_zero
from symcanon.ratfn import RATFN_ONE, ParamRatFn

U1 = "u1"
U2 = "u2"


class NonIntegrableError(ValueError):
    """A monomial has no antiderivative inside the ring."""


def _rat(x):
    return x if isinstance(x, Rational) else Rational(x)


class ExpRing:
    """Ring tag for the exponential monomial ring."""

    __slots__ = ()

    name = "exp"
    one_key = (0, 1, 0, 1)

    def __eq__(self, other):
        return isinstance(other, ExpRing)

    def __hash__(self):
        return hash("exp-ring")

    def __repr__(self):
        return "ExpRing()"

    @staticmethod
    def mono(a, t):
        a = _rat(a)
        t = _rat(t)
        return (a.n, a.d, t.n, t.d)

    @staticmethod
    def mono_fields(key):
        an, ad, tn, td = key
        return Rational(an, ad), Rational(tn, td)

    def mul_key(self, k1, k2):
        a = Rational(k1[0], k1[1]) + Rational(k2[0], k2[1])
        t = Rational(k1[2], k1[3]) + Rational(k2[2], k2[3])
        return (((a.n, a.d, t.n, t.d), 1),)

    def diff_key(self, key, var):
        an, ad, tn, td = key
        if var == U1:
            if an == 0:
                return ()
            return ((key, GaussRational(Rational(2 * an, ad))),)
        if tn == 0:
            return ()
        return ((key, GaussRational(0, Rational(2 * tn, td))),)

    @staticmethod
    def key_str(key):
        a, t = ExpRing.mono_fields(key)
        parts = []
        if a.n:
            parts.append(f"e^({2 * a}R)")
        if t.n:
            parts.append(f"e^({2 * t}iθ)")
        return "·".join(parts) if parts else "1"


class TrigRing:
    """Ring tag for the exponential-trig monomial ring at rotation number k."""

    __slots__ = ("k",)

    name = "trig"
    one_key = (0, 1, 0, 0)

    def __init__(self, k):
        self.k = _rat(k)

    def __eq__(self, other):
        return isinstance(other, TrigRing) and self.k == other.k

    def __hash__(self):
        return hash(("trig-ring", self.k.n, self.k.d))

    def __repr__(self):
        return f"TrigRing({self.k})"

    @staticmethod
    def mono(a, b, c):
        a = _rat(a)
        if c not in (0, 1):
            raise ValueError("cos power must be 0 or 1")
        return (a.n, a.d, b, c)

    @staticmethod
    def mono_fields(key):
        an, ad, b, c = key
        return Rational(an, ad), b, c

    def mul_key(self, k1, k2):
        a = Rational(k1[0], k1[1]) + Rational(k2[0], k2[1])
        b = k1[2] + k2[2]
        c = k1[3] + k2[3]
        if c < 2:
            return (((a.n, a.d, b, c), 1),)
        # cos^2 -> 1 - sin^2
        return (((a.n, a.d, b, 0), 1), ((a.n, a.d, b + 2, 0), -1))

    def diff_key(self, key, var):
        an, ad, b, c = key
        if var == U1:
            if an == 0:
                return ()
            return ((key, GaussRational(Rational(2 * an, ad))),)
        twok = self.k * 2
        out = []
        if c == 0:
            if b:
                out.append(((an, ad, b - 1, 1), GaussRational(twok * b)))
        else:
            if b:
                out.append(((an, ad, b - 1, 0), GaussRational(twok * b)))
            out.append(((an, ad, b + 1, 0), GaussRational(-(twok * (b + 1)))))
        return tuple(out)

    def key_str(self, key):
        a, b, c = TrigRing.mono_fields(key)
        parts = []
        if a.n:
            parts.append(f"e^({2 * a}R)")
        if b:
            parts.append(f"sin^{b}(2·{self.k}θ)" if b != 1 else f"sin(2·{self.k}θ)")
        if c:
            parts.append(f"cos(2·{self.k}θ)")
        return "·".join(parts) if parts else "1"


class FunElement:
    """Finite sum of ring monomials with ParamRatFn coefficients.

    Canonical: the term map never stores zero coefficients, and trig keys
    always carry c in {0, 1}.  Values are immutable by convention.
    """

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms=None):
        self.ring = ring
        self.terms = {} if terms is None else terms

    @staticmethod
    def zero(ring):
        return FunElement(ring)

    @staticmethod
    def one(ring):
        return FunElement(ring, {ring.one_key: RATFN_ONE})

    @staticmethod
    def monomial(ring, key, coeff=None):
        coeff = RATFN_ONE if coeff is None else ParamRatFn.of(coeff)
        if coeff.is_zero():
            return FunElement(ring)
        return FunElement(ring, {key: coeff})

    @staticmethod
    def from_terms(ring, pairs):
        el = FunElement(ring)
        t = el.terms
        for key, coeff in pairs:
            coeff = ParamRatFn.of(coeff)
            acc = t.get(key)
            s = coeff if acc is None else acc + coeff
            if s.is_zero():
                t.pop(key, None)
            else:
                t[key] = s
        return el

    def _check_ring(self, other):
        if self.ring != other.ring:
            raise ValueError(
                f"ring mismatch: {self.ring!r} vs {other.ring!r}"
            )

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, FunElement):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __add__(self, other):
        if not isinstance(other, FunElement):
            return NotImplemented
        self._check_ring(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            acc = out.get(k)
            s = c if acc is None else acc + c
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return FunElement(self.ring, out)

    def __sub__(self, other):
        if not isinstance(other, FunElement):
            return NotImplemented
        self._check_ring(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            acc = out.get(k)
            s = -c if acc is None else acc - c
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return FunElement(self.ring, out)

    def __neg__(self):
        return FunElement(self.ring, {k: -c for k, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, FunElement):
            return self.scaled(other)
        self._check_ring(other)
        ring = self.ring
        out = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                p = c1 * c2
                for k, sign in ring.mul_key(k1, k2):
                    v = p if sign == 1 else -p
                    acc = out.get(k)
                    s = v if acc is None else acc + v
                    if s.is_zero():
                        out.pop(k, None)
                    else:
                        out[k] = s
        return FunElement(self.ring, out)

    __rmul__ = __mul__

    def scaled(self, c):
        c = ParamRatFn.of(c)
        if c.is_zero():
            return FunElement(self.ring)
        return FunElement(self.ring, {k: v * c for k, v in self.terms.items()})

    def coeff(self, key):
        return self.terms.get(key, ParamRatFn.zero())

    def split(self, pred):
        """(terms where pred(key), the rest) as two elements."""
        yes, no = {}, {}
        for k, c in self.terms.items():
            (yes if pred(k) else no)[k] = c
        return FunElement(self.ring, yes), FunElement(self.ring, no)

    def sorted_keys(self):
        return sorted(self.terms)

    def diff(self, var):
        """Exact partial derivative with respect to u1 or u2."""
        ring = self.ring
        out = {}
        for k, c in self.terms.items():
            for k2, f in ring.diff_key(k, var):
                v = c * f
                acc = out.get(k2)
                s = v if acc is None else acc + v
                if s.is_zero():
                    out.pop(k2, None)
                else:
                    out[k2] = s
        return FunElement(ring, out)

    def antidiff(self, var):
        """Antiderivative within the ring, integration constant fixed to zero.

        Raises NonIntegrableError when some monomial has no antiderivative in
        the ring (e.g. a term constant in var).
        """
        ring = self.ring
        if isinstance(ring, ExpRing):
            out = {}
            for k, c in self.terms.items():
                an, ad, tn, td = k
                if var == U1:
                    if an == 0:
                        raise NonIntegrableError(
                            f"monomial {ExpRing.key_str(k)} is constant in u1"
                        )
                    out[k] = c / GaussRational(Rational(2 * an, ad))
                else:
                    if tn == 0:
                        raise NonIntegrableError(
                            f"monomial {ExpRing.key_str(k)} is constant in u2"
                        )
                    out[k] = c / GaussRational(0, Rational(2 * tn, td))
            return FunElement(ring, out)
        if var == U1:
            out = {}
            for k, c in self.terms.items():
                an, ad, b, cc = k
                if an == 0:
                    raise NonIntegrableError(
                        f"monomial {ring.key_str(k)} is constant in u1"
                    )
                out[k] = c / GaussRational(Rational(2 * an, ad))
            return FunElement(ring, out)
        return self._antidiff_trig_theta()

    def _antidiff_trig_theta(self):
        ring = self.ring
        twok = ring.k * 2
        out = FunElement(ring)
        # cos-bearing targets integrate one monomial at a time:
        # d/dθ sin^{b+1} = 2k(b+1) sin^b cos
        chains = {}
        for k, c in self.terms.items():
            an, ad, b, cc = k
            if cc == 1:
                if b == -1:
                    raise NonIntegrableError(
                        f"monomial {ring.key_str(k)} integrates to a logarithm"
                    )
                out = out + FunElement.monomial(
                    ring,
                    (an, ad, b + 1, 0),
                    c / GaussRational(twok * (b + 1)),
                )
            else:
                chains.setdefault((an, ad, b & 1), {})[b] = c
        # pure-sine targets couple along a ladder: the antiderivative
        # sum x_j sin^j cos satisfies 2k((b+1)x_{b+1} - b x_{b-1}) = beta_b.
        for (an, ad, _parity), betas in chains.items():
            lo, hi = min(betas), max(betas)
            unknowns = list(range(lo - 1, hi + 2, 2))
            eqs = list(range(lo - 2, hi + 3, 2))
            idx = {j: i for i, j in enumerate(unknowns)}
            m = []
            rhs = []
            for b in eqs:
                row = [ParamRatFn.zero()] * len(unknowns)
                if b + 1 in idx:
                    row[idx[b + 1]] = ParamRatFn.of(twok * (b + 1))
                if b - 1 in idx and b != 0:
                    row[idx[b - 1]] = ParamRatFn.of(-(twok * b))
                m.append(row)
                rhs.append(betas.get(b, ParamRatFn.zero()))
            try:
                xs = solve_free_zero(m, rhs)
            except InconsistentSystemError:
                key = (an, ad, lo, 0)
                raise NonIntegrableError(
                    f"no antiderivative in the ring for terms like {ring.key_str(key)}"
                ) from None
            for j, x in zip(unknowns, xs):
                if not x.is_zero():
                    out = out + FunElement.monomial(ring, (an, ad, j, 1), x)
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        ks = (
            self.ring.key_str
            if isinstance(self.ring, TrigRing)
            else ExpRing.key_str
        )
        return " + ".join(f"({self.terms[k]})·{ks(k)}" for k in self.sorted_keys())

    def __repr__(self):
        return f"FunElement<{self}>"


EXP_RING = ExpRing()

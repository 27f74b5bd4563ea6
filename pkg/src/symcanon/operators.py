"""Noncommutative differential-operator algebra and its classical twin.

DiffOp: sums F_{mn}(u1,u2) ∂1^m ∂2^n with FunElement coefficients on the left;
composition is Leibniz expansion.  PhaseFn is the classical analog with
momenta p1, p2 in place of derivatives, commutative product and a Poisson
bracket.

Coefficients may carry the parameters H, L2 only in the canonical-form view
(CanonicalOp); expanded operators keep their coefficients parameter-free so
that composition and brackets mean what they say.
"""

from math import comb

from symcanon._core import (
    VAR_ALPHA,
    VAR_BETA,
    VAR_GAMMA,
    VAR_H,
    VAR_L2,
    GaussRational,
    ParamPoly,
    Rational,
)
from symcanon.ratfn import ParamRatFn
from symcanon.rings import EXP_RING, U1, U2, ExpRing, FunElement, TrigRing

QUANTUM = "quantum"
CLASSICAL = "classical"

_H_POLY = ParamPoly.variable(VAR_H)
_L2_POLY = ParamPoly.variable(VAR_L2)
_HALF = Rational(1, 2)


def _only_u1(el):
    if isinstance(el.ring, ExpRing):
        return all(k[2] == 0 for k in el.terms)
    return all(k[2] == 0 and k[3] == 0 for k in el.terms)


def _only_u2(el):
    return all(k[0] == 0 for k in el.terms)


class SeparableSystem:
    """Separable system data: metric factors f1, f2 and potentials v1, v2."""

    __slots__ = ("ring", "k", "f1", "f2", "v1", "v2", "inv_f12")

    def __init__(self, ring, k, f1, f2, v1, v2):
        self.ring = ring
        self.k = k if isinstance(k, Rational) else Rational(k)
        self.f1 = f1
        self.f2 = f2
        self.v1 = v1
        self.v2 = v2
        if not (_only_u1(f1) and _only_u1(v1)):
            raise ValueError("f1 and v1 must depend on u1 only")
        if not (_only_u2(f2) and _only_u2(v2)):
            raise ValueError("f2 and v2 must depend on u2 only")
        self.inv_f12 = _invert_single(f1 + f2)


def _invert_single(el):
    if len(el.terms) != 1:
        raise ValueError("f1 + f2 is not invertible in the ring")
    (key, coeff), = el.terms.items()
    ring = el.ring
    if isinstance(ring, ExpRing):
        inv_key = (-key[0], key[1], -key[2], key[3])
    else:
        if key[3] != 0:
            raise ValueError("cannot invert a cos factor in the trig ring")
        inv_key = (-key[0], key[1], -key[2], 0)
    return FunElement.monomial(ring, inv_key, ParamRatFn.one() / coeff)


def cartesian_system(k):
    """Flat-space system in polar coordinates with angular exponential potential."""
    ring = EXP_RING
    k = k if isinstance(k, Rational) else Rational(k)
    alpha = ParamPoly.variable(VAR_ALPHA)
    return SeparableSystem(
        ring,
        k,
        f1=FunElement.monomial(ring, ExpRing.mono(1, 0)),
        f2=FunElement.zero(ring),
        v1=FunElement.zero(ring),
        v2=FunElement.monomial(ring, ExpRing.mono(0, k), ParamRatFn(alpha)),
    )


def ttw_system(k):
    """Deformed oscillator in polar coordinates (radial oscillator + trig poles)."""
    k = k if isinstance(k, Rational) else Rational(k)
    ring = TrigRing(k)
    alpha = ParamPoly.variable(VAR_ALPHA)
    beta = ParamPoly.variable(VAR_BETA)
    gamma = ParamPoly.variable(VAR_GAMMA)
    two = ParamPoly.const(2)
    v2 = FunElement.from_terms(
        ring,
        [
            (TrigRing.mono(0, -2, 0), ParamRatFn(two * (gamma + beta))),
            (TrigRing.mono(0, -2, 1), ParamRatFn(two * (gamma - beta))),
        ],
    )
    return SeparableSystem(
        ring,
        k,
        f1=FunElement.monomial(ring, TrigRing.mono(1, 0, 0)),
        f2=FunElement.zero(ring),
        v1=FunElement.monomial(ring, TrigRing.mono(2, 0, 0), ParamRatFn(alpha)),
        v2=v2,
    )


class _TermSum:
    """Shared term-map plumbing for DiffOp and PhaseFn."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms=None):
        self.ring = ring
        self.terms = {} if terms is None else terms

    @classmethod
    def zero(cls, ring):
        return cls(ring)

    @classmethod
    def identity(cls, ring):
        return cls(ring, {(0, 0): FunElement.one(ring)})

    @classmethod
    def single(cls, order, coeff):
        if coeff.is_zero():
            return cls(coeff.ring)
        return cls(coeff.ring, {order: coeff})

    def _check(self, other):
        if self.ring != other.ring:
            raise ValueError(f"ring mismatch: {self.ring!r} vs {other.ring!r}")
        if type(self) is not type(other):
            raise TypeError("cannot mix quantum and classical operators")

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, _TermSum):
            return NotImplemented
        return (
            type(self) is type(other)
            and self.ring == other.ring
            and self.terms == other.terms
        )

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for mn, el in other.terms.items():
            acc = out.get(mn)
            s = el if acc is None else acc + el
            if s.is_zero():
                out.pop(mn, None)
            else:
                out[mn] = s
        return type(self)(self.ring, out)

    def __sub__(self, other):
        self._check(other)
        out = dict(self.terms)
        for mn, el in other.terms.items():
            acc = out.get(mn)
            s = -el if acc is None else acc - el
            if s.is_zero():
                out.pop(mn, None)
            else:
                out[mn] = s
        return type(self)(self.ring, out)

    def __neg__(self):
        return type(self)(self.ring, {mn: -el for mn, el in self.terms.items()})

    def scaled(self, c):
        out = {}
        for mn, el in self.terms.items():
            s = el.scaled(c)
            if not s.is_zero():
                out[mn] = s
        return type(self)(self.ring, out)

    def coeff(self, m, n):
        return self.terms.get((m, n), FunElement.zero(self.ring))

    def order(self):
        if not self.terms:
            return -1
        return max(m + n for m, n in self.terms)

    def _add_term(self, acc, mn, el):
        cur = acc.get(mn)
        s = el if cur is None else cur + el
        if s.is_zero():
            acc.pop(mn, None)
        else:
            acc[mn] = s

    def __str__(self):
        if not self.terms:
            return "0"
        sym = ("∂1", "∂2") if isinstance(self, DiffOp) else ("p1", "p2")
        bits = []
        for m, n in sorted(self.terms, reverse=True):
            head = f"{sym[0]}^{m}" if m else ""
            head += f"{sym[1]}^{n}" if n else ""
            bits.append(f"[{self.terms[(m, n)]}]{head}")
        return " + ".join(bits)

    def __repr__(self):
        return f"{type(self).__name__}<{self}>"


class DiffOp(_TermSum):
    """Differential operator with coefficients left of the derivatives."""

    __slots__ = ()

    def compose(self, other):
        """Exact operator product via Leibniz expansion."""
        self._check(other)
        out = {}
        if not self.terms or not other.terms:
            return DiffOp(self.ring)
        max_m = max(m for m, _ in self.terms)
        max_n = max(n for _, n in self.terms)
        for (r, s), g in other.terms.items():
            # derivative table of g, rows in u1 and columns in u2
            table = [[None] * (max_n + 1) for _ in range(max_m + 1)]
            table[0][0] = g
            for i in range(max_m + 1):
                if i and table[i - 1][0] is not None:
                    d = table[i - 1][0].diff(U1)
                    table[i][0] = d
                for j in range(1, max_n + 1):
                    src = table[i][j - 1]
                    if src is not None:
                        table[i][j] = src.diff(U2)
            for (m, n), f in self.terms.items():
                for i in range(m + 1):
                    gi = table[i]
                    ci = comb(m, i)
                    for j in range(n + 1):
                        dg = gi[j]
                        if dg is None or dg.is_zero():
                            continue
                        w = f * dg
                        c = ci * comb(n, j)
                        if c != 1:
                            w = w.scaled(c)
                        self._add_term(out, (m - i + r, n - j + s), w)
        return DiffOp(self.ring, out)

    def commutator(self, other):
        return self.compose(other) - other.compose(self)

    def __pow__(self, e):
        out = DiffOp.identity(self.ring)
        for _ in range(e):
            out = out.compose(self)
        return out


class PhaseFn(_TermSum):
    """Phase-space function polynomial in the momenta p1, p2."""

    __slots__ = ()

    def mul(self, other):
        self._check(other)
        out = {}
        for (m, n), f in self.terms.items():
            for (r, s), g in other.terms.items():
                w = f * g
                if not w.is_zero():
                    self._add_term(out, (m + r, n + s), w)
        return PhaseFn(self.ring, out)

    def __pow__(self, e):
        out = PhaseFn.identity(self.ring)
        for _ in range(e):
            out = out.mul(self)
        return out

    def _dp(self, which):
        out = {}
        for (m, n), f in self.terms.items():
            if which == 0 and m:
                self._add_term(out, (m - 1, n), f.scaled(m))
            elif which == 1 and n:
                self._add_term(out, (m, n - 1), f.scaled(n))
        return PhaseFn(self.ring, out)

    def _du(self, var):
        out = {}
        for mn, f in self.terms.items():
            d = f.diff(var)
            if not d.is_zero():
                out[mn] = d
        return PhaseFn(self.ring, out)

    def poisson(self, other):
        """Poisson bracket {self, other}."""
        self._check(other)
        return (
            self._dp(0).mul(other._du(U1))
            - self._du(U1).mul(other._dp(0))
            + self._dp(1).mul(other._du(U2))
            - self._du(U2).mul(other._dp(1))
        )


def _h_terms(sys):
    inv = sys.inv_f12
    pot = inv * (sys.v1 + sys.v2)
    terms = {(2, 0): inv, (0, 2): inv}
    if not pot.is_zero():
        terms[(0, 0)] = pot
    return terms


def _l2_terms(sys):
    inv = sys.inv_f12
    c1 = sys.f2 * inv
    c2 = -(sys.f1 * inv)
    pot = (sys.f2 * sys.v1 - sys.f1 * sys.v2) * inv
    terms = {}
    for mn, el in (((2, 0), c1), ((0, 2), c2), ((0, 0), pot)):
        if not el.is_zero():
            terms[mn] = el
    return terms


def build_H(sys, classical=False):
    """The Hamiltonian (f1+f2)^{-1}(∂1² + ∂2² + v1 + v2) as an operator."""
    cls = PhaseFn if classical else DiffOp
    return cls(sys.ring, _h_terms(sys))


def build_L2(sys, classical=False):
    """The second-order invariant coming from separability."""
    cls = PhaseFn if classical else DiffOp
    return cls(sys.ring, _l2_terms(sys))


class CanonicalOp:
    """Canonical quadruple (A, B, C, D): A∂1∂2 + B∂1 + C∂2 + D with the
    parameters H, L2 carried inside the coefficients (powers on the right)."""

    __slots__ = ("ring", "A", "B", "C", "D")

    def __init__(self, ring, A, B, C, D):
        self.ring = ring
        self.A = A
        self.B = B
        self.C = C
        self.D = D

    def parts(self):
        return ((1, 1), self.A), ((1, 0), self.B), ((0, 1), self.C), ((0, 0), self.D)

    def is_zero(self):
        return self.A.is_zero() and self.B.is_zero() and self.C.is_zero() and self.D.is_zero()

    def __eq__(self, other):
        if not isinstance(other, CanonicalOp):
            return NotImplemented
        return (
            self.ring == other.ring
            and self.A == other.A
            and self.B == other.B
            and self.C == other.C
            and self.D == other.D
        )

    def order(self):
        """Order of the expanded operator (each H or L2 power costs 2)."""
        best = -1
        for (m, n), el in self.parts():
            for coeff in el.terms.values():
                if coeff.den.degree_in(VAR_H) > 0 or coeff.den.degree_in(VAR_L2) > 0:
                    raise ValueError("order undefined before denominator clearing")
                for exps, _ in coeff.num.terms():
                    o = 2 * exps[VAR_H] + 2 * exps[VAR_L2] + m + n
                    best = max(best, o)
        return best

    def __str__(self):
        return (
            f"A = {self.A}\nB = {self.B}\nC = {self.C}\nD = {self.D}"
        )


def canonical_reduce(op, sys):
    """Rewrite an operator into canonical form using the separation identities.

    ∂1² -> f1·H + L2 - v1 and ∂2² -> f2·H - L2 - v2, with H, L2 treated as
    commuting parameters (stored inside the coefficients) and the remaining
    derivatives pushed past the function factors by Leibniz.  The result is
    independent of the rewrite order; tests assert this on random operators.
    """
    ring = op.ring
    if ring != sys.ring:
        raise ValueError("operator and system live in different rings")
    work = dict(op.terms)

    def substitute(axis, f, v):
        # replace ∂axis² once on the highest-degree term
        while True:
            cand = [mn for mn in work if mn[axis] >= 2]
            if not cand:
                return
            m, n = max(cand)
            w = work.pop((m, n))
            base = DiffOp(ring, {(m - 2, n) if axis == 0 else (m, n - 2): w})
            with_f = base.compose(DiffOp(ring, {(0, 0): f})) if not f.is_zero() else None
            with_v = base.compose(DiffOp(ring, {(0, 0): v})) if not v.is_zero() else None
            sign = _L2_POLY if axis == 0 else -_L2_POLY
            for mn, el in base.terms.items():
                _acc(work, mn, el.scaled(sign))
            if with_f is not None:
                for mn, el in with_f.terms.items():
                    _acc(work, mn, el.scaled(_H_POLY))
            if with_v is not None:
                for mn, el in with_v.terms.items():
                    _acc(work, mn, -el)

    substitute(0, sys.f1, sys.v1)
    substitute(1, sys.f2, sys.v2)
    z = FunElement.zero(ring)
    return CanonicalOp(
        ring,
        work.get((1, 1), z),
        work.get((1, 0), z),
        work.get((0, 1), z),
        work.get((0, 0), z),
    )


def _acc(d, mn, el):
    cur = d.get(mn)
    s = el if cur is None else cur + el
    if s.is_zero():
        d.pop(mn, None)
    else:
        d[mn] = s


def canonical_reduce_classical(fn, sys):
    """Classical canonical form: substitute p1² and p2² via the phase identities."""
    ring = fn.ring
    work = dict(fn.terms)
    one = FunElement.one(ring)
    rep = (
        sys.f1.scaled(_H_POLY) + one.scaled(_L2_POLY) - sys.v1,
        sys.f2.scaled(_H_POLY) - one.scaled(_L2_POLY) - sys.v2,
    )
    for axis in (0, 1):
        while True:
            cand = [mn for mn in work if mn[axis] >= 2]
            if not cand:
                break
            m, n = max(cand)
            w = work.pop((m, n))
            tgt = (m - 2, n) if axis == 0 else (m, n - 2)
            _acc(work, tgt, w * rep[axis])
    z = FunElement.zero(ring)
    return CanonicalOp(
        ring,
        work.get((1, 1), z),
        work.get((1, 0), z),
        work.get((0, 1), z),
        work.get((0, 0), z),
    )


def expand_params(canon, sys, classical=False):
    """Replace the parameter powers H^j L2^l by explicit right-composed operators.

    Requires every coefficient to be polynomial in H and L2 (denominators free
    of both); raises ValueError instructing denominator clearing otherwise.
    """
    ring = canon.ring
    cls = PhaseFn if classical else DiffOp
    hop = build_H(sys, classical)
    lop = build_L2(sys, classical)
    grouped = {}
    for mn, el in canon.parts():
        for key, coeff in el.terms.items():
            if coeff.den.degree_in(VAR_H) > 0 or coeff.den.degree_in(VAR_L2) > 0:
                raise ValueError(
                    "coefficients depend rationally on H or L2; clear denominators first"
                )
            den = coeff.den
            for exps, c in coeff.num.terms():
                j, l = exps[VAR_H], exps[VAR_L2]
                res = [0, 0] + list(exps[2:])
                mono = ParamPoly.from_terms({tuple(res): c})
                piece = grouped.setdefault((j, l), {})
                cur = piece.get(mn)
                add = FunElement.monomial(ring, key, ParamRatFn(mono, den))
                piece[mn] = add if cur is None else cur + add
    out = cls.zero(ring)
    pow_cache = {}

    def tail(j, l):
        t = pow_cache.get((j, l))
        if t is None:
            if classical:
                t = hop**j
                t = t.mul(lop**l)
            else:
                t = (hop**j).compose(lop**l)
            pow_cache[(j, l)] = t
        return t

    for (j, l), parts in sorted(grouped.items()):
        head = cls(ring, {mn: el for mn, el in parts.items() if not el.is_zero()})
        if head.is_zero():
            continue
        if j == 0 and l == 0:
            out = out + head
        elif classical:
            out = out + head.mul(tail(j, l))
        else:
            out = out + head.compose(tail(j, l))
    return out

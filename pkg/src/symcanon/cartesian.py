"""Lattice recurrence engine for the angular-exponential flat-space family.

Coefficient 2-vectors live on a half-integer grid; the seed at the starting
point is free (two symbolic parameters) and every other entry follows from
the recursion, filling right then up.  The fill is equivalent to summing the
ordered segment-matrix products over all regular paths, which
``path_sum_oracle`` recomputes independently (primary-form recursion plus
generic linear solves) as an oracle.
"""

from math import gcd

from symcanon._core import (
    GAUSS_I,
    GAUSS_ONE,
    VAR_ALPHA,
    GaussRational,
    ParamPoly,
    Rational,
)
from symcanon.linalg import solve
from symcanon.operators import CLASSICAL, QUANTUM, cartesian_system
from symcanon.ratfn import ParamRatFn, poly_lcm_all
from symcanon.residuals import PotentialPair
from symcanon.rings import EXP_RING, ExpRing, FunElement

_ALPHA = ParamPoly.variable(VAR_ALPHA)
_L2 = ParamPoly.variable(1)
_H = ParamPoly.variable(0)


class SingularPivotError(ValueError):
    """The recursion pivot vanishes at a point that has nonzero input."""


class SupportEscapeError(ValueError):
    """A nonzero entry appeared outside the predicted rectangle."""


def _l2_minus(c):
    """The polynomial L2 - c for a rational constant c."""
    return _L2 - ParamPoly.const(c)


def pivot_factor(a, b, k):
    """Denominator polynomial cleared at each quantum recursion step."""
    d = a * a - k * k * b * b
    f1 = (a - k * b) ** 2
    f2 = (a + k * b) ** 2
    return (_l2_minus(f1) * _l2_minus(f2)).scaled(GaussRational(d * 2))


def pivot_factor_classical(a, b, k):
    """Classical analog: 2 L2 (a^2 - k^2 b^2)."""
    d = a * a - k * k * b * b
    return _L2.scaled(GaussRational(d * 2))


def _gr(x):
    return GaussRational(x)


def _gi(x):
    return GaussRational(0, x)


def step_matrices(a, b, k, variant):
    """(vertical, horizontal) 2x2 numerator matrices of the solved recursion.

    The entry at (a, b) is -(vertical @ C_{a-1,b} + horizontal @ C_{a,b-1})
    divided by the pivot factor; the step prefactors (2a-1)H and the coupling
    multiples are already folded in.
    """
    if variant == CLASSICAL:
        hv = _H.scaled(_gr((a * 2 - 1)))
        va = [[hv.scaled(_gr(a)), ParamPoly.zero()], [ParamPoly.zero(), hv.scaled(_gr(a - 1))]]
        ck = (-(k * k * (b * 2 - 1))) * 1
        al = _ALPHA.scaled(_gr(ck))
        hz = [[al.scaled(_gr(b)), ParamPoly.zero()], [ParamPoly.zero(), al.scaled(_gr(b - 1))]]
        return va, hz
    aa = a * a
    kb = k * b
    kb2 = kb * kb
    s = aa + kb2
    # adj(N) @ P, scaled by (2a-1) H
    mv = [
        [
            _l2_minus(aa - kb2 * 3).scaled(_gr(a)),
            ParamPoly.const(_gi(a * kb * (1 - a) * 4)),
        ],
        [
            _l2_minus(kb2).scaled(_gi(kb)),
            _l2_minus(s).scaled(_gr(a - 1)),
        ],
    ]
    hp = _H.scaled(_gr(a * 2 - 1))
    va = [[hp * e if e else ParamPoly.zero() for e in row] for row in mv]
    # adj(N) @ Q, scaled by alpha k (2b-1)
    mh = [
        [
            _l2_minus(kb2 - aa * 3).scaled(_gr(-kb)),
            ParamPoly.const(_gi(a * k * kb * (b - 1) * 4)),
        ],
        [
            _l2_minus(aa).scaled(_gi(-a)),
            _l2_minus(s).scaled(_gr(-(k * (b - 1)))),
        ],
    ]
    ap = _ALPHA.scaled(_gr(k * (b * 2 - 1)))
    hz = [[ap * e if e else ParamPoly.zero() for e in row] for row in mh]
    return va, hz


def transfer_step(below, left, a, b, k, variant):
    """One recursion step: the 2-vector at (a, b) from its two neighbors.

    Raises SingularPivotError when the pivot vanishes but the inputs
    contribute (signals a mis-chosen grid).
    """
    va, hz = step_matrices(a, b, k, variant)
    num = [ParamRatFn.zero(), ParamRatFn.zero()]
    for m, vec in ((va, below), (hz, left)):
        if vec is None:
            continue
        for i in range(2):
            for j in range(2):
                if m[i][j].is_zero() or vec[j].is_zero():
                    continue
                num[i] = num[i] + ParamRatFn(m[i][j]) * vec[j]
    if num[0].is_zero() and num[1].is_zero():
        return (ParamRatFn.zero(), ParamRatFn.zero())
    piv = (
        pivot_factor_classical(a, b, k)
        if variant == CLASSICAL
        else pivot_factor(a, b, k)
    )
    if piv.is_zero():
        raise SingularPivotError(f"zero pivot with nonzero input at (a, b) = ({a}, {b})")
    pr = ParamRatFn(piv)
    return (-(num[0] / pr), -(num[1] / pr))


def start_point(p, q, sign=1):
    """Starting grid point for rotation number sign * p/q (coprime p, q >= 1)."""
    if p < 1 or q < 1:
        raise ValueError("p and q must be positive")
    if gcd(p, q) != 1:
        raise ValueError(f"p and q must be coprime, got ({p}, {q})")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return Rational(-p, 2), Rational(-q, 2)


class CartesianLattice:
    """Filled lattice state; entries are linear in the two seed parameters.

    ``cols`` holds the two basis fills (seed (1,0) and seed (0,1)); the
    combined entry for seed values (s1, s2) is s1 * cols[0] + s2 * cols[1].
    """

    __slots__ = ("p", "q", "sign", "k", "variant", "start", "rows", "columns", "cols", "scale")

    def __init__(self, p, q, sign, variant):
        self.p = p
        self.q = q
        self.sign = sign
        self.k = Rational(sign * p, q)
        self.variant = variant
        self.start = start_point(p, q, sign)
        self.rows = p // 2
        self.columns = q // 2
        self.cols = ({}, {})
        self.scale = ParamPoly.one()

    def points(self):
        out = set(self.cols[0]) | set(self.cols[1])
        return sorted(out)

    def entry(self, a, b, s1=None, s2=None):
        """Combined 2-vector at (a, b) for seed values (s1, s2); default (1, 1)."""
        s1 = ParamRatFn.one() if s1 is None else ParamRatFn.of(s1)
        s2 = ParamRatFn.one() if s2 is None else ParamRatFn.of(s2)
        za = self.cols[0].get((a, b))
        zb = self.cols[1].get((a, b))
        out = [ParamRatFn.zero(), ParamRatFn.zero()]
        for s, z in ((s1, za), (s2, zb)):
            if z is None:
                continue
            out[0] = out[0] + s * z[0]
            out[1] = out[1] + s * z[1]
        return tuple(out)


def lattice_fill(p, q, sign=1, variant=QUANTUM):
    """Fill the coefficient lattice from the free seed at the starting point.

    The support must stay inside the predicted rectangle: one guard row and
    column beyond it are computed and required to vanish.
    """
    state = CartesianLattice(p, q, sign, variant)
    k = state.k
    a0, b0 = state.start
    for idx in (0, 1):
        seed = [ParamRatFn.zero(), ParamRatFn.zero()]
        seed[idx] = ParamRatFn.one()
        col = state.cols[idx]
        col[(a0, b0)] = tuple(seed)
        for m in range(state.rows + 2):
            for n in range(state.columns + 2):
                if m == 0 and n == 0:
                    continue
                a = a0 + m
                b = b0 + n
                below = col.get((a - 1, b))
                left = col.get((a, b - 1))
                if below is None and left is None:
                    continue
                vec = transfer_step(below, left, a, b, k, variant)
                if vec[0].is_zero() and vec[1].is_zero():
                    continue
                if m > state.rows or n > state.columns:
                    raise SupportEscapeError(
                        f"nonzero entry escaped the rectangle at ({a}, {b})"
                    )
                col[(a, b)] = vec
    return state


def path_sum_oracle(p, q, sign=1, variant=QUANTUM):
    """Independent evaluation: explicit sum over all regular lattice paths.

    Each path contributes the ordered product of its segment contributions,
    where every segment is resolved by a generic exact linear solve of the
    primary-form recursion (not the solved transfer matrices).
    """
    from itertools import combinations

    state = CartesianLattice(p, q, sign, variant)
    k = state.k
    a0, b0 = state.start
    if (state.rows + 1) * (state.columns + 1) > 36:
        raise ValueError("oracle is desk-scale only (rectangle must be <= 36 points)")

    def segment(vec, a, b, vertical):
        # primary recursion: diag @ C_{a,b} + contributions = 0, solved generically
        if variant == CLASSICAL:
            if vertical:
                f = _H.scaled(_gr(a * 2 - 1))
                rhs = [
                    -(ParamRatFn(f.scaled(_gr(a))) * vec[0]),
                    -(ParamRatFn(f.scaled(_gr(a - 1))) * vec[1]),
                ]
            else:
                f = _ALPHA.scaled(_gr(k * k * (b * 2 - 1)))
                rhs = [
                    ParamRatFn(f.scaled(_gr(b))) * vec[0],
                    ParamRatFn(f.scaled(_gr(b - 1))) * vec[1],
                ]
            dd = ParamRatFn(pivot_factor_classical(a, b, k))
            mat = [[dd, ParamRatFn.zero()], [ParamRatFn.zero(), dd]]
            return solve(mat, rhs)
        aa, kb = a * a, k * b
        s = aa + kb * kb
        diag = [
            [
                ParamRatFn(ParamPoly.const(_gi(a * kb))),
                ParamRatFn(-_l2_minus(s)),
            ],
            [
                ParamRatFn(_l2_minus(s)),
                ParamRatFn(ParamPoly.const(_gi(a * kb * 4))),
            ],
        ]
        d = _gr((aa - kb * kb) * 2)
        mat = [[e * d for e in row] for row in diag]
        if vertical:
            f = ParamRatFn(_H.scaled(_gr(a * 2 - 1)))
            pm = [[_gi(-(k * b)), _gr(1 - a)], [_gr(a), _gr(0)]]
        else:
            f = ParamRatFn(_ALPHA.scaled(_gr(k * (b * 2 - 1))))
            pm = [[_gi(a), _gr(k * (b - 1))], [_gr(-(k * b)), _gr(0)]]
        rhs = []
        for i in range(2):
            acc = ParamRatFn.zero()
            for j in range(2):
                if pm[i][j].is_zero() or vec[j].is_zero():
                    continue
                acc = acc + ParamRatFn.of(pm[i][j]) * vec[j]
            rhs.append(-(f * acc))
        return solve(mat, rhs)

    for idx in (0, 1):
        seed = [ParamRatFn.zero(), ParamRatFn.zero()]
        seed[idx] = ParamRatFn.one()
        col = state.cols[idx]
        col[(a0, b0)] = tuple(seed)
        for m in range(state.rows + 1):
            for n in range(state.columns + 1):
                if m == 0 and n == 0:
                    continue
                acc = [ParamRatFn.zero(), ParamRatFn.zero()]
                for ups in combinations(range(m + n), m):
                    vec = list(seed)
                    i = j = 0
                    for step in range(m + n):
                        if step in ups:
                            i += 1
                            vec = segment(vec, a0 + i, b0 + j, True)
                        else:
                            j += 1
                            vec = segment(vec, a0 + i, b0 + j, False)
                        if vec[0].is_zero() and vec[1].is_zero():
                            break
                    acc[0] = acc[0] + vec[0]
                    acc[1] = acc[1] + vec[1]
                if not (acc[0].is_zero() and acc[1].is_zero()):
                    col[(a0 + m, b0 + n)] = tuple(acc)
    return state


def clear_denominators(state):
    """Scale the seed by the lcm of all entry denominators.

    Returns (scale, cleared state); the cleared entries are polynomial and the
    scale is minimal in the divisibility order because entries are reduced.
    """
    dens = [ParamPoly.one()]
    for col in state.cols:
        for vec in col.values():
            dens.extend(x.den for x in vec)
    scale = poly_lcm_all(dens)
    out = CartesianLattice(state.p, state.q, state.sign, state.variant)
    out.scale = scale
    sc = ParamRatFn(scale)
    for idx in (0, 1):
        for pt, vec in state.cols[idx].items():
            out.cols[idx][pt] = tuple(x * sc for x in vec)
            for x in out.cols[idx][pt]:
                assert x.is_polynomial(), "clearing failed to produce polynomials"
    return scale, out


def build_fg(state, s1=None, s2=None):
    """Assemble F and G as exponential-ring elements from a (cleared) state."""
    k = state.k
    f = FunElement.zero(EXP_RING)
    g = FunElement.zero(EXP_RING)
    for a, b in state.points():
        va, vb = state.entry(a, b, s1, s2)
        key = ExpRing.mono(a, b * k)
        if not va.is_zero():
            f = f + FunElement.monomial(EXP_RING, key, va)
        if not vb.is_zero():
            g = g + FunElement.monomial(EXP_RING, key, vb)
    return PotentialPair(f, g, state.variant)


def cartesian_canonical(p, q, sign=1, variant=QUANTUM, s1=None, s2=None):
    """End-to-end: fill, clear, assemble F/G and complete the quadruple."""
    from symcanon.residuals import complete_quadruple

    state = lattice_fill(p, q, sign, variant)
    scale, cleared = clear_denominators(state)
    pair = build_fg(cleared, s1, s2)
    sys = cartesian_system(cleared.k)
    return complete_quadruple(pair, sys), pair, sys, scale, cleared

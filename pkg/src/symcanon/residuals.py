"""Symmetry-condition residuals, the F/G -> (A,B,C) assembly and the D quadrature.

Everything is computed exactly in the function ring; a report is zero iff
the candidate really is a formal symmetry.  The quantum calculus carries the
fourth-derivative terms; the classical one is the same system with them
dropped.
"""

from symcanon._core import ParamPoly, Rational, VAR_H, VAR_L2
from symcanon.rings import FunElement, NonIntegrableError, U1, U2
from symcanon.operators import CLASSICAL, QUANTUM

_H = ParamPoly.variable(VAR_H)
_L2 = ParamPoly.variable(VAR_L2)
_HALF = Rational(1, 2)


class IntegrabilityError(ValueError):
    """The two defining equations for D are incompatible."""

    def __init__(self, mismatch):
        super().__init__(f"defining equations for D disagree by {mismatch}")
        self.mismatch = mismatch


class PotentialPair:
    """The generating pair F, G for a canonical symmetry candidate."""

    __slots__ = ("F", "G", "variant")

    def __init__(self, F, G, variant):
        if variant not in (QUANTUM, CLASSICAL):
            raise ValueError(f"unknown variant: {variant!r}")
        if F.ring != G.ring:
            raise ValueError("F and G must share one ring")
        self.F = F
        self.G = G
        self.variant = variant


class ResidualReport:
    """Exact residuals of the symmetry conditions; zero means symmetry."""

    __slots__ = ("residuals", "is_zero")

    def __init__(self, residuals):
        self.residuals = list(residuals)
        self.is_zero = all(r.is_zero() for r in self.residuals)

    def __bool__(self):
        return self.is_zero

    def __str__(self):
        flags = ", ".join("0" if r.is_zero() else "nonzero" for r in self.residuals)
        return f"ResidualReport({flags})"


def _multipliers(sys):
    """The recurring combinations v - f*H ± L2 and their derivatives."""
    one = FunElement.one(sys.ring)
    f1p = sys.f1.diff(U1)
    f2p = sys.f2.diff(U2)
    return {
        "m1": sys.v1 - sys.f1.scaled(_H) - one.scaled(_L2),
        "m2": sys.v2 - sys.f2.scaled(_H) + one.scaled(_L2),
        "w1": sys.v1 - sys.f1.scaled(_H),
        "w2": sys.v2 - sys.f2.scaled(_H),
        "n1": sys.v1.diff(U1) - f1p.scaled(_H),
        "n2": sys.v2.diff(U2) - f2p.scaled(_H),
        "q1": sys.v1.diff(U1).diff(U1) - f1p.diff(U1).scaled(_H),
        "q2": sys.v2.diff(U2).diff(U2) - f2p.diff(U2).scaled(_H),
    }


def residuals_fg(pair, sys):
    """Residuals of the two conditions on F and G (order: integrability, constant term)."""
    F, G = pair.F, pair.G
    mm = _multipliers(sys)
    F1 = F.diff(U1)
    F2 = F.diff(U2)
    F11 = F1.diff(U1)
    F22 = F2.diff(U2)
    G1 = G.diff(U1)
    G2 = G.diff(U2)
    G11 = G1.diff(U1)
    G22 = G2.diff(U2)

    r1 = (
        F22.scaled(2) * mm["m2"]
        + F2.scaled(3) * mm["n2"]
        + F * mm["q2"]
        - F11.scaled(2) * mm["m1"]
        - F1.scaled(3) * mm["n1"]
        - F * mm["q1"]
    )
    r2 = (
        G11.scaled(2) * mm["m1"]
        + G1 * mm["n1"]
        - G22.scaled(2) * mm["m2"]
        - G2 * mm["n2"]
    )
    if pair.variant == QUANTUM:
        F12 = F1.diff(U2)
        r1 = (
            r1
            + G22.diff(U2).diff(U1).scaled(2)
            + F22.diff(U2).diff(U2).scaled(_HALF)
            + G11.diff(U1).diff(U2).scaled(2)
            - F11.diff(U1).diff(U1).scaled(_HALF)
        )
        r2 = (
            r2
            + F11.diff(U1).diff(U2).scaled(_HALF)
            + F12.scaled(2) * mm["w1"]
            + F1 * mm["n2"]
            + G11.diff(U1).diff(U1).scaled(_HALF)
            + F22.diff(U2).diff(U1).scaled(_HALF)
            + F12.scaled(2) * mm["w2"]
            + F2 * mm["n1"]
            - G22.diff(U2).diff(U2).scaled(_HALF)
        )
    return ResidualReport([r1, r2])


def assemble_abc(pair):
    """A, B, C from the generating pair; the divergence condition holds identically."""
    F, G = pair.F, pair.G
    if pair.variant == QUANTUM:
        B = -F.diff(U2).scaled(_HALF) - G.diff(U1)
        C = -F.diff(U1).scaled(_HALF) + G.diff(U2)
    else:
        B = -G.diff(U1)
        C = G.diff(U2)
    return F, B, C


def d_defining_rhs(A, B, C, sys, variant):
    """The exact right-hand sides (D1, D2) of the defining equations for D."""
    mmH = sys.f2.diff(U2).scaled(_H)
    one = FunElement.one(sys.ring)
    A1 = A.diff(U1)
    A2 = A.diff(U2)
    # from the first compact equation
    d1 = (
        A2.scaled(2) * sys.v2
        + A * sys.v2.diff(U2)
        - (A2.scaled(2) * sys.f2 + A * sys.f2.diff(U2)).scaled(_H)
        + A2.scaled(2 * _L2)
    )
    # from the second compact equation
    d2 = (
        A1.scaled(2) * sys.v1
        + A * sys.v1.diff(U1)
        - (A1.scaled(2) * sys.f1 + A * sys.f1.diff(U1)).scaled(_H)
        - A1.scaled(2 * _L2)
    )
    if variant == QUANTUM:
        d1 = d1 - B.diff(U1).diff(U1) - B.diff(U2).diff(U2)
        d2 = d2 - C.diff(U1).diff(U1) - C.diff(U2).diff(U2)
    return d1.scaled(_HALF), d2.scaled(_HALF)


def integrate_d(A, B, C, sys, variant):
    """Solve the two defining equations for D by quadrature.

    D is the u1-antiderivative of the first equation plus the u1-free part
    obtained from the second; integrability is certified by the residuals,
    not assumed, and any mismatch raises IntegrabilityError.
    """
    d1, d2 = d_defining_rhs(A, B, C, sys, variant)
    d_main = d1.antidiff(U1)
    resid = d2 - d_main.diff(U2)
    extra, leftover = resid.split(lambda k: k[0] == 0)
    if not leftover.is_zero():
        raise IntegrabilityError(leftover)
    d = d_main
    if not extra.is_zero():
        d = d + extra.antidiff(U2)
    if d.diff(U1) != d1 or d.diff(U2) != d2:
        raise IntegrabilityError((d.diff(U1) - d1) + (d.diff(U2) - d2))
    return d


def residuals_abcd(canon, sys, variant):
    """The four compact-form residuals for a canonical quadruple."""
    A, B, C, D = canon.A, canon.B, canon.C, canon.D
    one = FunElement.one(sys.ring)
    A1, A2 = A.diff(U1), A.diff(U2)
    B1, C2 = B.diff(U1), C.diff(U2)
    f1p, f2p = sys.f1.diff(U1), sys.f2.diff(U2)
    v1p, v2p = sys.v1.diff(U1), sys.v2.diff(U2)

    r0 = B.diff(U2) + C.diff(U1)
    r1 = (
        -A2.scaled(2) * sys.v2
        + D.diff(U1).scaled(2)
        - A * v2p
        + (A2.scaled(2) * sys.f2 + A * f2p).scaled(_H)
        - A2.scaled(2 * _L2)
    )
    r2 = (
        -A1.scaled(2) * sys.v1
        + D.diff(U2).scaled(2)
        - A * v1p
        + (A1.scaled(2) * sys.f1 + A * f1p).scaled(_H)
        + A1.scaled(2 * _L2)
    )
    r3 = (
        -B1.scaled(2) * sys.v1
        - C2.scaled(2) * sys.v2
        - B * v1p
        - C * v2p
        + (B1.scaled(2) * sys.f1 + C2.scaled(2) * sys.f2 + B * f1p + C * f2p).scaled(_H)
        + (B1 - C2).scaled(2 * _L2)
    )
    if variant == QUANTUM:
        r0 = r0.scaled(2) + A1.diff(U1) + A2.diff(U2)
        r1 = r1 + B.diff(U1).diff(U1) + B.diff(U2).diff(U2)
        r2 = r2 + C.diff(U1).diff(U1) + C.diff(U2).diff(U2)
        r3 = r3 + D.diff(U1).diff(U1) + D.diff(U2).diff(U2)
    else:
        r0 = B.diff(U2) + C.diff(U1)
    return ResidualReport([r0, r1, r2, r3])


def complete_quadruple(pair, sys):
    """Assemble (A, B, C) and integrate D, returning the canonical operator."""
    from symcanon.operators import CanonicalOp

    A, B, C = assemble_abc(pair)
    D = integrate_d(A, B, C, sys, pair.variant)
    return CanonicalOp(sys.ring, A, B, C, D)

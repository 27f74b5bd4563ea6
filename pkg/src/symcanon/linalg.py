"""Exact linear algebra over ParamRatFn for the small matrices of the engines.

Two determinant routes (cofactor expansion and fraction-free elimination) are
kept independent so they can cross-check each other.
"""

from symcanon._core import GAUSS_ONE, GaussRational, ParamPoly
from symcanon.ratfn import RATFN_ONE, RATFN_ZERO, ParamRatFn, poly_divmod_exact, poly_lcm_all


class SingularMatrixError(ValueError):
    """Square system has no unique solution."""


class InconsistentSystemError(ValueError):
    """Linear system admits no solution at all."""


def _as_ratfn_matrix(m):
    return [[ParamRatFn.of(x) for x in row] for row in m]


def identity(n):
    return [[RATFN_ONE if i == j else RATFN_ZERO for j in range(n)] for i in range(n)]


def mat_vec(m, v):
    out = []
    for row in m:
        acc = RATFN_ZERO
        for x, y in zip(row, v):
            if x.is_zero() or y.is_zero():
                continue
            acc = acc + x * y
        out.append(acc)
    return out


def mat_mul(a, b):
    n, mid, p = len(a), len(b), len(b[0])
    out = [[RATFN_ZERO] * p for _ in range(n)]
    for i in range(n):
        for k in range(mid):
            x = a[i][k]
            if x.is_zero():
                continue
            for j in range(p):
                y = b[k][j]
                if not y.is_zero():
                    out[i][j] = out[i][j] + x * y
    return out


def det(m, method="eliminate"):
    """Exact determinant of a square ParamRatFn matrix."""
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("determinant of a non-square matrix")
    m = _as_ratfn_matrix(m)
    if method == "cofactor":
        return _det_cofactor(m)
    if method == "eliminate":
        return _det_fraction_free(m)
    raise ValueError(f"unknown determinant method: {method}")


def _det_cofactor(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    acc = RATFN_ZERO
    for j in range(n):
        c = m[0][j]
        if c.is_zero():
            continue
        minor = [[row[t] for t in range(n) if t != j] for row in m[1:]]
        term = c * _det_cofactor(minor)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def _det_fraction_free(m):
    # Bareiss elimination: clear each row to polynomials, then all interior
    # divisions are exact in the polynomial ring.
    n = len(m)
    scale = ParamRatFn.one()
    rows = []
    for row in m:
        d = poly_lcm_all([x.den for x in row])
        scale = scale * ParamRatFn(ParamPoly.one(), d)
        rows.append([(x * ParamRatFn(d)).as_poly() for x in row])
    sign = 1
    prev = ParamPoly.one()
    for k in range(n - 1):
        if rows[k][k].is_zero():
            for i in range(k + 1, n):
                if not rows[i][k].is_zero():
                    rows[k], rows[i] = rows[i], rows[k]
                    sign = -sign
                    break
            else:
                return RATFN_ZERO
        pk = rows[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = rows[i][j] * pk - rows[i][k] * rows[k][j]
                q = poly_divmod_exact(num, prev)
                assert q is not None, "fraction-free division must be exact"
                rows[i][j] = q
        prev = pk
    d = ParamRatFn(rows[n - 1][n - 1])
    if sign < 0:
        d = -d
    return d * scale


def rref(m, aug=None):
    """Reduced row echelon form; returns (rows, pivot columns, reduced aug).

    Pivots are chosen in fixed order (first nonzero down each column), so the
    result is deterministic.
    """
    rows = _as_ratfn_matrix(m)
    n = len(rows)
    cols = len(rows[0]) if n else 0
    av = [list(r) for r in aug] if aug is not None else [[] for _ in range(n)]
    pivots = []
    r = 0
    for c in range(cols):
        pr = None
        for i in range(r, n):
            if not rows[i][c].is_zero():
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        av[r], av[pr] = av[pr], av[r]
        inv = RATFN_ONE / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        av[r] = [x * inv for x in av[r]]
        for i in range(n):
            if i == r:
                continue
            f = rows[i][c]
            if f.is_zero():
                continue
            rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
            av[i] = [x - f * y for x, y in zip(av[i], av[r])]
        pivots.append(c)
        r += 1
        if r == n:
            break
    return rows, pivots, av


def rank(m):
    _, pivots, _ = rref(m)
    return len(pivots)


def nullspace(m):
    """Exact basis of the right nullspace, deterministic under the pivot order."""
    rows, pivots, _ = rref(m)
    cols = len(m[0]) if m else 0
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [RATFN_ZERO] * cols
        v[f] = RATFN_ONE
        for r, pc in enumerate(pivots):
            v[pc] = -rows[r][f]
        basis.append(v)
    return basis


def solve(m, rhs):
    """Solve the square nonsingular system m @ x = rhs exactly."""
    n = len(m)
    rows, pivots, av = rref(m, aug=[[ParamRatFn.of(x)] for x in rhs])
    if len(pivots) < n:
        raise SingularMatrixError("matrix is singular")
    x = [RATFN_ZERO] * n
    for r, pc in enumerate(pivots):
        x[pc] = av[r][0]
    return x


def solve_free_zero(m, rhs):
    """Solve m @ x = rhs, allowing a singular m: free components are set to 0.

    Raises InconsistentSystemError when no solution exists.  With a trivial
    kernel this coincides with the unique solution.
    """
    n = len(m)
    cols = len(m[0]) if n else 0
    rows, pivots, av = rref(m, aug=[[ParamRatFn.of(x)] for x in rhs])
    for r in range(len(pivots), n):
        if not av[r][0].is_zero():
            raise InconsistentSystemError("no exact solution")
    x = [RATFN_ZERO] * cols
    for r, pc in enumerate(pivots):
        x[pc] = av[r][0]
    return x


def scale_to_polynomial(v):
    """Scale a ParamRatFn vector by the lcm of its denominators; returns poly vector."""
    d = poly_lcm_all([x.den for x in v])
    return [(x * ParamRatFn(d)).as_poly() for x in v]

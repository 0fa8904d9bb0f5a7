"""Exact linear algebra over F and the two structural reductions used by the
solver: minimal scalar equations from a first-order system (cyclic row
iteration at a pivot coordinate) and LinearReduction (elimination of algebraic
relations from V·φ(Y) = U·Y until a pure dynamical system remains).

All elimination is division-based Gaussian elimination over the
auto-cancelling fraction field with deterministic pivoting (first nonzero row
in column order), so every routine is exact and reproducible.
"""

from .delta import apply_inverse, apply_map
from .errors import InternalInconsistency, SingularMatrix


class MatrixF:
    """Immutable dense matrix with RatFunc entries (row-major)."""

    __slots__ = ("ctx", "rows", "cols", "data")

    def __init__(self, ctx, rows, cols, data):
        data = tuple(data)
        if len(data) != rows * cols:
            raise ValueError("entry count does not match dimensions")
        self.ctx = ctx
        self.rows = rows
        self.cols = cols
        self.data = data

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_rows(cls, ctx, rows):
        rows = [list(r) for r in rows]
        n = len(rows)
        m = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != m:
                raise ValueError("ragged rows")
        return cls(ctx, n, m, [e for r in rows for e in r])

    @classmethod
    def zeros(cls, ctx, rows, cols):
        z = ctx.zero
        return cls(ctx, rows, cols, [z] * (rows * cols))

    @classmethod
    def identity(cls, ctx, n):
        z, o = ctx.zero, ctx.one
        return cls(ctx, n, n, [o if i == j else z for i in range(n) for j in range(n)])

    @classmethod
    def column(cls, ctx, entries):
        entries = list(entries)
        return cls(ctx, len(entries), 1, entries)

    # -- access --------------------------------------------------------------

    def entry(self, i, j):
        return self.data[i * self.cols + j]

    def row(self, i):
        return list(self.data[i * self.cols:(i + 1) * self.cols])

    def col(self, j):
        return [self.data[i * self.cols + j] for i in range(self.rows)]

    def to_rows(self):
        return [self.row(i) for i in range(self.rows)]

    def __eq__(self, other):
        return (isinstance(other, MatrixF) and self.ctx is other.ctx
                and self.rows == other.rows and self.cols == other.cols
                and self.data == other.data)

    def __hash__(self):
        return hash((id(self.ctx), self.rows, self.cols, self.data))

    def __repr__(self):
        from .ratfunc import format_ratfunc
        body = "; ".join(", ".join(format_ratfunc(e) for e in self.row(i))
                         for i in range(self.rows))
        return f"MatrixF[{self.rows}x{self.cols}]({body})"

    @property
    def is_zero(self):
        return all(e.is_zero for e in self.data)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        self._compat(other)
        return MatrixF(self.ctx, self.rows, self.cols,
                       [a + b for a, b in zip(self.data, other.data)])

    def __sub__(self, other):
        self._compat(other)
        return MatrixF(self.ctx, self.rows, self.cols,
                       [a - b for a, b in zip(self.data, other.data)])

    def __neg__(self):
        return MatrixF(self.ctx, self.rows, self.cols, [-a for a in self.data])

    def _compat(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError("dimension mismatch")

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError("dimension mismatch in product")
        z = self.ctx.zero
        out = []
        for i in range(self.rows):
            ri = self.row(i)
            for j in range(other.cols):
                acc = z
                for k in range(self.cols):
                    a = ri[k]
                    if not a.is_zero:
                        b = other.entry(k, j)
                        if not b.is_zero:
                            acc = acc + a * b
                out.append(acc)
        return MatrixF(self.ctx, self.rows, other.cols, out)

    def scale(self, c):
        return MatrixF(self.ctx, self.rows, self.cols, [c * a for a in self.data])

    def transpose(self):
        return MatrixF(self.ctx, self.cols, self.rows,
                       [self.entry(i, j) for j in range(self.cols) for i in range(self.rows)])

    def hstack(self, other):
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        rows = [self.row(i) + other.row(i) for i in range(self.rows)]
        return MatrixF.from_rows(self.ctx, rows)

    def vstack(self, other):
        if self.cols != other.cols:
            raise ValueError("column count mismatch")
        return MatrixF(self.ctx, self.rows + other.rows, self.cols,
                       list(self.data) + list(other.data))

    def take_columns(self, idxs):
        rows = [[self.entry(i, j) for j in idxs] for i in range(self.rows)]
        return MatrixF.from_rows(self.ctx, rows) if rows else MatrixF(self.ctx, 0, len(idxs), [])

    def take_rows(self, idxs):
        return MatrixF.from_rows(self.ctx, [self.row(i) for i in idxs]) \
            if idxs else MatrixF(self.ctx, 0, self.cols, [])

    def map_entries(self, fn):
        return MatrixF(self.ctx, self.rows, self.cols, [fn(a) for a in self.data])


def apply_matrix(m, M):
    """Apply a DeltaMap entrywise."""
    return M.map_entries(lambda e: apply_map(m, e))


# ---------------------------------------------------------------------------
# core elimination
# ---------------------------------------------------------------------------

def rref(M):
    """Reduced row echelon form; returns (MatrixF, pivot column list)."""
    work = M.to_rows()
    pivots = []
    r = 0
    for c in range(M.cols):
        piv = next((i for i in range(r, len(work)) if not work[i][c].is_zero), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        inv = work[r][c].inverse()
        work[r] = [x * inv for x in work[r]]
        for i in range(len(work)):
            if i != r and not work[i][c].is_zero:
                f = work[i][c]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    return MatrixF.from_rows(M.ctx, work) if work else M, pivots


def rank(M):
    return len(rref(M)[1])


def nullspace_basis(M):
    """Reduced-echelon basis of the right nullspace, one list per vector."""
    R, pivots = rref(M)
    free = [c for c in range(M.cols) if c not in pivots]
    out = []
    for fcol in free:
        vec = [M.ctx.zero] * M.cols
        vec[fcol] = M.ctx.one
        for i, p in enumerate(pivots):
            vec[p] = -R.entry(i, fcol)
        out.append(vec)
    return out


def solve(M, b):
    """One exact solution of M·x = b (free coordinates zero), or None."""
    aug = M.hstack(MatrixF.column(M.ctx, b))
    R, pivots = rref(aug)
    if M.cols in pivots:
        return None
    x = [M.ctx.zero] * M.cols
    for i, p in enumerate(pivots):
        x[p] = R.entry(i, M.cols)
    return x

def inverse(M):
    if M.rows != M.cols:
        raise SingularMatrix("inverse of a non-square matrix")
    aug = M.hstack(MatrixF.identity(M.ctx, M.rows))
    R, pivots = rref(aug)
    if pivots != list(range(M.rows)):
        raise SingularMatrix("matrix is singular")
    return R.take_columns(list(range(M.rows, 2 * M.rows)))


def det(M):
    """Determinant by division-based elimination with sign tracking."""
    if M.rows != M.cols:
        raise ValueError("determinant of a non-square matrix")
    work = M.to_rows()
    n = M.rows
    sign = 1
    acc = M.ctx.one
    for c in range(n):
        piv = next((i for i in range(c, n) if not work[i][c].is_zero), None)
        if piv is None:
            return M.ctx.zero
        if piv != c:
            work[c], work[piv] = work[piv], work[c]
            sign = -sign
        acc = acc * work[c][c]
        inv = work[c][c].inverse()
        for i in range(c + 1, n):
            if not work[i][c].is_zero:
                f = work[i][c] * inv
                work[i] = [a - f * b for a, b in zip(work[i], work[c])]
    return acc if sign > 0 else -acc


# ---------------------------------------------------------------------------
# minimal scalar equation
# ---------------------------------------------------------------------------

class ScalarEquation:
    """Minimal-order scalar consequence of a first-order system at a pivot.

    coeffs  a_0..a_{k-1} with φ^k(z) + a_{k-1} φ^{k-1}(z) + ... + a_0 z = 0
    rows    the iterated rows r_0..r_{k-1} with φ^j(z) = r_j · Z
    """

    __slots__ = ("map", "pivot", "coeffs", "rows")

    def __init__(self, mp, pivot, coeffs, rows):
        self.map = mp
        self.pivot = pivot
        self.coeffs = coeffs
        self.rows = rows

    @property
    def order(self):
        return len(self.coeffs)


def minimal_scalar_equation(B, mp, pivot=0):
    """Iterate rows from the unit row at `pivot` (0-based) under
    r_{j+1} = φ(r_j)·B (automorphism) or φ(r_j) + r_j·B (derivation) until the
    first F-linear dependence; k ≤ n is guaranteed."""
    ctx = B.ctx
    n = B.cols
    if B.rows != n:
        raise ValueError("system matrix must be square")
    if not 0 <= pivot < n:
        raise ValueError("pivot out of range")
    r = [ctx.zero] * n
    r[pivot] = ctx.one
    rows = [r]
    for k in range(1, n + 1):
        prev = MatrixF.from_rows(ctx, [rows[-1]])
        stepped = apply_matrix(mp, prev)
        if mp.is_automorphism:
            nxt = (stepped @ B).row(0)
        else:
            nxt = (stepped + prev @ B).row(0)
        # dependence r_k = sum c_j r_j ?
        Mt = MatrixF.from_rows(ctx, rows).transpose()
        c = solve(Mt, nxt)
        if c is not None:
            coeffs = [-cj for cj in c]
            return ScalarEquation(mp, pivot, coeffs, rows)
        rows.append(nxt)
    raise InternalInconsistency("no dependence found within n+1 rows")


# ---------------------------------------------------------------------------
# linear reduction
# ---------------------------------------------------------------------------

class LinearReduction:
    """Outcome of eliminating algebraic relations from V·φ(Y) = U·Y.

    kept   indices (into the original coordinates) of the surviving vector Y_1
    P      dynamics: φ(Y_1) = P·Y_1
    lift   original Y = lift·Y_1 (rows of eliminated coordinates express the
           Q of the partition; forced-zero coordinates have zero rows)
    empty  True when only the zero solution survives (Y = 0); then P and lift
           have zero columns
    """

    __slots__ = ("kept", "P", "lift", "empty")

    def __init__(self, kept, P, lift):
        self.kept = kept
        self.P = P
        self.lift = lift
        self.empty = not kept


def linear_reduction(mp, V, U, forced_zero=()):
    """Reduce V·φ(Y) = U·Y (V with full column rank) to a pure first-order
    system on a subvector, eliminating coordinates forced to be F-linear
    combinations of the others (and the ones in `forced_zero`).

    Solutions correspond bijectively: Y solves the input with the forced
    coordinates zero iff Y = lift·Y_1 for a solution Y_1 of φ(Y_1) = P·Y_1.
    For automorphisms the loop additionally pulls back left-nullspace
    constraints of a singular dynamics matrix, so the final P is invertible.
    """
    ctx = V.ctx
    n0 = V.cols
    if U.cols != n0 or U.rows != V.rows:
        raise ValueError("V and U must have matching shapes")
    kept = list(range(n0))
    lift = MatrixF.identity(ctx, n0)
    pending = [_unit_row(ctx, n0, i) for i in forced_zero]

    while True:
        s = len(kept)
        if s == 0:
            return LinearReduction([], MatrixF(ctx, 0, 0, []), MatrixF(ctx, n0, 0, []))
        stacked = V.hstack(U)
        R, pivots = rref(stacked)
        head = [p for p in pivots if p < s]
        if len(head) != s:
            raise InternalInconsistency("V lost full column rank during reduction")
        nrows = R.rows if R.rows else 0
        dyn = R.take_rows(list(range(s))).take_columns(list(range(s, 2 * s)))
        constraint_rows = []
        for i in range(s, nrows):
            row = R.row(i)[s:]
            if any(not e.is_zero for e in row):
                constraint_rows.append(row)
        constraint_rows.extend(pending)
        pending = []

        if not constraint_rows:
            if mp.is_automorphism:
                # dynamics of an automorphism must be invertible; a singular P
                # hides the constraints σ⁻¹(w)·Y = 0 for left-null rows w
                left_null = nullspace_basis(dyn.transpose())
                if left_null:
                    for w in left_null:
                        pending.append([apply_inverse(mp, e) for e in w])
                    constraint_rows = pending
                    pending = []
                else:
                    return LinearReduction(kept, dyn, lift)
            else:
                return LinearReduction(kept, dyn, lift)

        C = MatrixF.from_rows(ctx, constraint_rows)
        CR, cpivots = rref(C)
        if len(cpivots) == s:
            return LinearReduction([], MatrixF(ctx, 0, 0, []), MatrixF(ctx, n0, 0, []))
        free = [j for j in range(s) if j not in cpivots]
        # E: current Y = E · Y_free
        erows = []
        for j in range(s):
            if j in cpivots:
                i = cpivots.index(j)
                erows.append([-CR.entry(i, f) for f in free])
            else:
                pos = free.index(j)
                erows.append([ctx.one if t == pos else ctx.zero
                              for t in range(len(free))])
        E = MatrixF.from_rows(ctx, erows)
        if mp.is_automorphism:
            V = apply_matrix(mp, E)
            U = dyn @ E
        else:
            V = E
            U = dyn @ E - apply_matrix(mp, E)
        lift = lift @ E
        kept = [kept[j] for j in free]


def _unit_row(ctx, n, i):
    row = [ctx.zero] * n
    row[i] = ctx.one
    return row

"""Exact matrix elimination, minimal scalar equations and the LinearReduction
of V·φ(Y) = U·Y systems."""

import random

import pytest

from hypersolve import SingularMatrix, VarContext
from hypersolve.delta import DeltaMap, apply_map
from hypersolve.linalg import (
    MatrixF,
    apply_matrix,
    det,
    inverse,
    linear_reduction,
    minimal_scalar_equation,
    nullspace_basis,
    rank,
    rref,
    solve,
)


def ctx_n():
    return VarContext(["n"], parameters=["x", "m"])


def shift_n(c):
    return DeltaMap("sn", "automorphism", {"n": 1}, c)


def mat(c, rows):
    return MatrixF.from_rows(c, [[c.parse(e) for e in row] for row in rows])


def random_matrix(c, rng, rows, cols, span=4):
    entries = []
    for _ in range(rows * cols):
        num = c.rational(rng.randint(-span, span))
        if rng.random() < 0.5:
            num = num * c.var(c.variables[0]) ** rng.randint(0, 2)
        den = c.rational(rng.randint(1, span))
        entries.append(num / den)
    return MatrixF(c, rows, cols, entries)


# a worked 3x3 shift system whose first coordinate is not cyclic;
# reused by the scalar-equation and reduction tests below
def example_system(c):
    return mat(c, [
        ["n*(2*n*x+x-2*x^2-1)/(2*(n*x-1))",
         "x*(-n-3+2*x+2*n*x)/(2*(n*x-1))", "0"],
        ["n*(n-1-x+n*x)/(2*(n*x-1))",
         "(-2*n-2+x+2*n*x+n^2*x)/(2*(n*x-1))", "0"],
        ["(n^2*x+3*n*x+2*n*m^2-n^2-n+2*m^2)/(2*(n*x-1))",
         "(x+2*m^2-n^2*x+2*x*m^2+2*x^2*n)/(2*(1-n*x))", "x"],
    ])


# -- elimination core --------------------------------------------------------

def test_rref_example():
    c = ctx_n()
    R, pivots = rref(mat(c, [["1", "2", "3"], ["2", "4", "7"]]))
    assert pivots == [0, 2]
    assert R.to_rows() == mat(c, [["1", "2", "0"], ["0", "0", "1"]]).to_rows()


def test_rank_and_nullspace():
    c = ctx_n()
    M = mat(c, [["1", "1"], ["2", "2"]])
    assert rank(M) == 1
    basis = nullspace_basis(M)
    assert len(basis) == 1
    v = MatrixF.column(c, basis[0])
    assert (M @ v).is_zero
    assert rank(MatrixF.identity(c, 3)) == 3
    assert nullspace_basis(MatrixF.identity(c, 2)) == []


def test_solve_consistent_and_inconsistent():
    c = ctx_n()
    n = c.var("n")
    M = mat(c, [["1", "1"], ["2", "2"]])
    b = [n, n + n]
    x = solve(M, b)
    assert x is not None
    assert (M @ MatrixF.column(c, x)).col(0) == b
    assert solve(M, [c.one, c.one]) is None


def test_solve_residual_randomized():
    c = ctx_n()
    rng = random.Random(20260823)
    for _ in range(10):
        M = random_matrix(c, rng, 3, 2)
        x = MatrixF.column(c, [random_matrix(c, rng, 1, 1).entry(0, 0)
                               for _ in range(2)])
        b = (M @ x).col(0)
        got = solve(M, b)
        assert got is not None
        assert (M @ MatrixF.column(c, got)).col(0) == b


def test_inverse():
    c = ctx_n()
    n = c.var("n")
    assert inverse(MatrixF.identity(c, 3)) == MatrixF.identity(c, 3)
    M = mat(c, [["n", "1"], ["1", "1"]])
    assert M @ inverse(M) == MatrixF.identity(c, 2)
    assert inverse(M) @ M == MatrixF.identity(c, 2)
    with pytest.raises(SingularMatrix):
        inverse(mat(c, [["1", "1"], ["2", "2"]]))
    with pytest.raises(SingularMatrix):
        inverse(MatrixF(c, 2, 3, [n] * 6))


def test_det():
    c = ctx_n()
    n = c.var("n")
    assert det(mat(c, [["n", "1"], ["1", "1"]])) == n - c.one
    assert det(mat(c, [["1", "1"], ["2", "2"]])).is_zero
    rng = random.Random(5)
    for _ in range(6):
        A = random_matrix(c, rng, 3, 3)
        B = random_matrix(c, rng, 3, 3)
        assert det(A @ B) == det(A) * det(B)


# -- minimal scalar equation -------------------------------------------------

def test_scalar_equation_size_one():
    c = ctx_n()
    b = c.parse("n/(n+1)")
    B = MatrixF.from_rows(c, [[b]])
    eq = minimal_scalar_equation(B, shift_n(c))
    assert eq.order == 1 and eq.coeffs == [-b]

    d = DeltaMap("dn", "derivation", {"n": 1}, c)
    eq = minimal_scalar_equation(B, d)
    assert eq.order == 1 and eq.coeffs == [-b]


def test_scalar_equation_nilpotent_derivation():
    c = VarContext(["t"])
    d = DeltaMap("d", "derivation", {"t": 1}, c)
    B = mat(c, [["0", "1"], ["0", "0"]])
    eq = minimal_scalar_equation(B, d)
    assert eq.order == 2
    assert eq.coeffs == [c.zero, c.zero]
    assert eq.rows == [[c.one, c.zero], [c.zero, c.one]]


def test_scalar_equation_diagonal_pivots():
    c = ctx_n()
    n = c.var("n")
    B = MatrixF.from_rows(c, [[n, c.zero], [c.zero, n + c.one]])
    assert minimal_scalar_equation(B, shift_n(c), pivot=0).coeffs == [-n]
    assert minimal_scalar_equation(B, shift_n(c), pivot=1).coeffs == [-(n + c.one)]


def test_scalar_equation_companion_roundtrip():
    # the companion system of a monic operator must give that operator back
    c = ctx_n()
    rng = random.Random(11)
    sn = shift_n(c)
    dn = DeltaMap("dn", "derivation", {"n": 1}, c)
    for mp in (sn, dn):
        for _ in range(5):
            k = rng.choice([2, 3])
            coeffs = [random_matrix(c, rng, 1, 1).entry(0, 0) for _ in range(k)]
            rows = [[c.one if j == i + 1 else c.zero for j in range(k)]
                    for i in range(k - 1)]
            rows.append([-a for a in coeffs])
            eq = minimal_scalar_equation(MatrixF.from_rows(c, rows), mp)
            assert eq.order == k
            assert eq.coeffs == coeffs


def test_scalar_equation_example_system():
    # the worked 3x3 system has minimal order two at the first coordinate,
    # with these exact coefficients
    c = ctx_n()
    A = example_system(c)
    eq = minimal_scalar_equation(A, shift_n(c), pivot=0)
    assert eq.order == 2
    den = c.parse("2*(-n-3+2*x+2*n*x)")
    assert eq.coeffs[1] == c.parse(
        "4*x^2*n+11-18*n*x-6*n^2*x-12*x+14*n+3*n^2+4*x^2") / den
    assert eq.coeffs[0] == -c.parse(
        "n*(8*x^2+4-12*x-8*n*x+4*x^2*n-2*n^2*x+5*n+n^2)") / den
    # rows give the iterates of z_1, and they satisfy the returned relation
    assert eq.rows[0] == [c.one, c.zero, c.zero]
    assert eq.rows[1] == A.row(0)
    sn = shift_n(c)
    r2 = (apply_matrix(sn, MatrixF.from_rows(c, [eq.rows[1]])) @ A).row(0)
    for j in range(3):
        assert (r2[j] + eq.coeffs[1] * eq.rows[1][j]
                + eq.coeffs[0] * eq.rows[0][j]).is_zero


def test_scalar_equation_minimality_randomized():
    c = ctx_n()
    rng = random.Random(29)
    sn = shift_n(c)
    for _ in range(5):
        B = random_matrix(c, rng, 3, 3)
        eq = minimal_scalar_equation(B, sn)
        assert 1 <= eq.order <= 3
        assert rank(MatrixF.from_rows(c, eq.rows)) == eq.order


# -- linear reduction --------------------------------------------------------

def test_reduction_identity_v():
    c = ctx_n()
    rng = random.Random(37)
    U = random_matrix(c, rng, 3, 3)
    red = linear_reduction(DeltaMap("dn", "derivation", {"n": 1}, c),
                           MatrixF.identity(c, 3), U)
    assert red.kept == [0, 1, 2] and not red.empty
    assert red.P == U
    assert red.lift == MatrixF.identity(c, 3)


def test_reduction_example_forced_zero():
    # forcing the non-cyclic coordinate of the worked system to zero
    # propagates to the second one and leaves a single shift equation
    c = ctx_n()
    A = example_system(c)
    red = linear_reduction(shift_n(c), MatrixF.identity(c, 3), A,
                           forced_zero=(0,))
    assert red.kept == [2] and not red.empty
    assert red.P == MatrixF.from_rows(c, [[c.var("x")]])
    assert red.lift.col(0) == [c.zero, c.zero, c.one]


def test_reduction_algebraic_constraint():
    c = VarContext(["t"])
    d = DeltaMap("d", "derivation", {"t": 1}, c)
    V = mat(c, [["1", "0"], ["0", "1"], ["0", "0"]])
    U = mat(c, [["0", "1"], ["1", "0"], ["1", "-1"]])
    red = linear_reduction(d, V, U)
    assert red.kept == [1]
    assert red.P == mat(c, [["1"]])
    assert red.lift.col(0) == [c.one, c.one]


def test_reduction_empty():
    c = ctx_n()
    d = DeltaMap("dn", "derivation", {"n": 1}, c)
    red = linear_reduction(d, MatrixF.identity(c, 1), mat(c, [["1"]]),
                           forced_zero=(0,))
    assert red.empty and red.kept == []
    assert red.lift.rows == 1 and red.lift.cols == 0


def test_reduction_automorphism_singular_dynamics():
    # a singular dynamics matrix hides shifted constraints; the reduction must
    # pull them back and keep going until the dynamics is invertible
    c = ctx_n()
    sn = shift_n(c)
    n = c.var("n")

    red = linear_reduction(sn, MatrixF.identity(c, 2), mat(c, [["1", "1"],
                                                               ["1", "1"]]))
    assert red.kept == [1]
    assert red.P == mat(c, [["2"]])
    assert red.lift.col(0) == [c.one, c.one]

    red = linear_reduction(sn, MatrixF.identity(c, 2), mat(c, [["n", "n"],
                                                               ["1", "1"]]))
    assert red.kept == [1]
    assert red.P == MatrixF.from_rows(c, [[n]])
    assert red.lift.col(0) == [n - c.one, c.one]


def test_reduction_lift_rows_at_kept_are_units():
    c = ctx_n()
    rng = random.Random(43)
    sn = shift_n(c)
    for _ in range(8):
        V = random_matrix(c, rng, 3, 2)
        if rank(V) < 2:
            continue
        U = random_matrix(c, rng, 3, 2)
        red = linear_reduction(sn, V, U)
        sub = red.lift.take_rows(red.kept)
        assert sub == MatrixF.identity(c, len(red.kept))


def test_reduction_lifting_identity_randomized():
    # every solution of the reduced system must lift to a solution of the
    # original one: V·(δ(L) + L·P) = U·L resp. V·σ(L)·P = U·L for L the lift
    c = ctx_n()
    rng = random.Random(47)
    sn = shift_n(c)
    dn = DeltaMap("dn", "derivation", {"n": 1}, c)
    for mp in (sn, dn):
        done = 0
        while done < 6:
            V = random_matrix(c, rng, 3, 2)
            if rank(V) < 2:
                continue
            U = random_matrix(c, rng, 3, 2)
            done += 1
            red = linear_reduction(mp, V, U)
            if red.empty:
                continue
            L = red.lift
            if mp.is_automorphism:
                lhs = V @ apply_matrix(mp, L) @ red.P
            else:
                lhs = V @ (apply_matrix(mp, L) + L @ red.P)
            assert lhs == U @ L

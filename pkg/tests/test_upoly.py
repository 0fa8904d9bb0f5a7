"""Univariate polynomial views: exact division, gcd chains, root finding."""

import random

from hypersolve import VarContext
from hypersolve.upoly import (
    UPoly,
    integer_roots,
    linear_roots,
    poly_as_upoly,
    ratfunc_as_upoly_pair,
    upoly_to_ratfunc,
)


def ctx():
    return VarContext(["t"], parameters=["a"])


def up(c, *coeffs):
    return UPoly([c.rational(k) if isinstance(k, int) else k for k in coeffs])


def test_divmod_exact():
    c = ctx()
    rng = random.Random(3)
    for _ in range(30):
        a = up(c, *[rng.randint(-5, 5) for _ in range(rng.randint(1, 6))])
        b = up(c, *[rng.randint(-5, 5) for _ in range(rng.randint(1, 4))])
        if b.is_zero:
            continue
        q, r = a.divmod(b)
        assert q * b + r == a
        assert r.degree() < b.degree()


def test_gcd_xgcd():
    c = ctx()
    g = up(c, 1, 1)          # t + 1
    a = g * up(c, -2, 1)     # (t+1)(t-2)
    b = g * up(c, 3, 1)      # (t+1)(t+3)
    assert a.gcd(b) == g
    gg, s, t = a.xgcd(b)
    assert gg == g
    assert s * a + t * b == gg


def test_compose_shift():
    c = ctx()
    t = c.var("t")
    p = poly_as_upoly((t ** 2).num, "t")
    shifted = p.shift_arg(c.one)
    assert upoly_to_ratfunc(shifted, "t") == (t + c.one) ** 2


def test_ratfunc_pair_roundtrip():
    c = ctx()
    t, a = c.var("t"), c.var("a")
    f = (t ** 2 + a) / (t - a)
    num, den = ratfunc_as_upoly_pair(f, "t")
    assert upoly_to_ratfunc(num, "t") / upoly_to_ratfunc(den, "t") == f


def test_linear_roots_with_parameters():
    c = ctx()
    t, a = c.var("t"), c.var("a")
    # (t - a)^2 (t + 1/2) viewed in t
    f = (t - a) ** 2 * (t + c.rational(1, 2))
    u = poly_as_upoly(f.num, "t")
    roots, nonlin = linear_roots(u)
    assert not nonlin
    assert (a, 2) in roots
    assert (c.rational(-1, 2), 1) in roots


def test_linear_roots_flags_irreducible():
    c = ctx()
    t = c.var("t")
    u = poly_as_upoly((t ** 2 + c.one).num, "t")
    roots, nonlin = linear_roots(u)
    assert roots == []
    assert nonlin


def test_integer_roots():
    c = ctx()
    t = c.var("t")
    u = poly_as_upoly(((t - c.rational(3)) * (t + c.rational(7)) ** 2
                       * (t - c.rational(1, 2))).num, "t")
    assert sorted(integer_roots(u)) == [(-7, 2), (3, 1)]

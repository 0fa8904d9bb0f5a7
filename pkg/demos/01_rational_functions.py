"""Exact multivariate rational functions: parsing, arithmetic,
factorization and partial fractions.

Everything in the package is computed over Q(x1,...,xk) with exact rational
coefficients; there is no floating point anywhere.
"""

from hypersolve import (
    VarContext,
    factor_univariate,
    format_poly,
    format_ratfunc,
    partial_fractions,
)

# A context fixes the variables (acted on by maps) and the parameters
# (never moved).  All values carry their context.
ctx = VarContext(["x", "y"], parameters=["m"])
x, y = ctx.var("x"), ctx.var("y")

f = (x * x - y * y) / (x * y + y * y)
print("f                 =", format_ratfunc(f))          # reduced to (x-y)/y
print("f + 1/y           =", format_ratfunc(f + y.inverse()))
print("parsed            =", format_ratfunc(ctx.parse("(x^2-y^2)/(x*y+y^2)")))

# Arithmetic is exact: this difference is the zero function, not "almost 0".
g = ctx.parse("(x - y)/y")
print("f - g is zero     :", (f - g).is_zero)

# Univariate factorization over Q (per main variable), used throughout the
# shift-orbit and singularity analyses.
p = ctx.parse("x^3 + x^2 - 4*x - 4")
for fac in factor_univariate(p.num, "x"):
    print("factor            :", format_poly(fac.poly), "^", fac.multiplicity)

# Partial fractions in one variable drive the derivation-side certificate
# analysis: residues at each pole are read off exactly.
h = ctx.parse("(3*x^2 + 1)/(x^3 + x)")
pf = partial_fractions(h, "x")
for factor, order, numerator in pf.parts:
    print("pole part         :", format_ratfunc(numerator),
          "over (", format_poly(factor), ")^", order)
print("recombined == h   :", (pf.recombine() - h).is_zero)

"""Derivations, automorphisms, and the constants they leave fixed.

A system lives over a field Q(parameters)(variables) together with a set of
commuting maps: directional derivations (constant direction vectors) and
translation automorphisms.  The constants of the set — the functions every
map fixes — are what solution spaces are vector spaces over.
"""

from hypersolve import VarContext, apply_map, constant_field, format_ratfunc
from hypersolve.delta import DeltaMap, DeltaSet, dependence_over_constants

ctx = VarContext(["x", "n"], parameters=["m"])
x, n = ctx.var("x"), ctx.var("n")

# d/dx, and the shift n -> n+1.  Actions name the variables each map moves.
dx = DeltaMap("dx", "derivation", {"x": 1}, ctx)
sn = DeltaMap("sn", "automorphism", {"n": 1}, ctx)
delta = DeltaSet([dx, sn])

f = n * n / x
print("f          =", format_ratfunc(f))
print("dx(f)      =", format_ratfunc(apply_map(dx, f)))
print("sn(f)      =", format_ratfunc(apply_map(sn, f)))

# The constants of {dx, sn}: free of x and of n, i.e. Q(m).
cf = constant_field(delta)
print("m constant :", cf.is_constant(ctx.var("m")))
print("x constant :", cf.is_constant(x))
# For dx alone, x is moved but n is untouched.
print("n constant for {dx}:", constant_field(DeltaSet([dx])).is_constant(n))

# Linear dependence over the constants, decided by a Wronskian-style rank
# test.  1, x, x^2 are independent; x and (m+1)*x are not, and the relation
# comes back with provably constant coefficients.
res = dependence_over_constants([ctx.one, x, x * x], delta)
print("1, x, x^2 independent:", res.independent)
mm = ctx.var("m")
res = dependence_over_constants([x, (mm + ctx.one) * x], delta)
print("x, (m+1)*x relation  :",
      [format_ratfunc(c) for c in res.relation])

from hypersolve.config import DEFAULT_CONFIG
from hypersolve.ratfunc import VarContext, format_ratfunc
from hypersolve.delta import (DeltaMap, DeltaSet, DERIVATION, AUTOMORPHISM,
                              apply_map, constant_field)
from hypersolve.linalg import MatrixF
from hypersolve.system import Certificate, HyperexpGroup, IntegrableSystem, display_certificate
from hypersolve.solver import (solve_ordinary, extend_certificate, ExtensionCandidate,
                               substitute_and_extract)
from hypersolve.scalar import certificate_reduction

def fmt(M):
    return [[format_ratfunc(M.entry(i, j)) for j in range(M.cols)] for i in range(M.rows)]

# Jordan block, lone derivation
ctx = VarContext(["x"])
d = DeltaMap("d", DERIVATION, {"x": 1}, ctx)
B = MatrixF.from_rows(ctx, [[ctx.zero, ctx.one], [ctx.zero, ctx.zero]])
rep = solve_ordinary(IntegrableSystem(DeltaSet([d]), {"d": B}))
print("jordan:", len(rep))
for g in rep:
    print("  cert", {n: format_ratfunc(v) for n, v in g.certificate.values.items()}, fmt(g.vectors))

# automorphism substitution with nonstandard extension value
ctx2 = VarContext(["x", "n"])
dx = DeltaMap("dx", DERIVATION, {"x": 1}, ctx2)
sn = DeltaMap("sn", AUTOMORPHISM, {"n": 1}, ctx2)
base = Certificate(DeltaSet([dx]), {"dx": ctx2.zero})
g = HyperexpGroup(base, MatrixF.identity(ctx2, 1))
ext = ExtensionCandidate(base, sn, ctx2.rational(2))
rs = substitute_and_extract(g, ext, MatrixF(ctx2, 1, 1, [ctx2.var("n")]),
                            constant_field(DeltaSet([dx])))
print("auto subst: U", fmt(rs.U), "W", fmt(rs.W))

# derivation substitution with x-dependent vectors
ctx3 = VarContext(["x", "y"])
dx3 = DeltaMap("dx", DERIVATION, {"x": 1}, ctx3)
dy3 = DeltaMap("dy", DERIVATION, {"y": 1}, ctx3)
base3 = Certificate(DeltaSet([dx3]), {"dx": ctx3.zero})
xv = ctx3.var("x")
g3 = HyperexpGroup(base3, MatrixF(ctx3, 1, 1, [xv]))
ext3 = ExtensionCandidate(base3, dy3, ctx3.zero)
rs3 = substitute_and_extract(g3, ext3, MatrixF(ctx3, 1, 1, [ctx3.var("y")]),
                             constant_field(DeltaSet([dx3])))
print("der subst: U", fmt(rs3.U), "W", fmt(rs3.W))

# certificate_reduction identities
ctxn = VarContext(["n"])
s = DeltaMap("s", AUTOMORPHISM, {"n": 1}, ctxn)
nv = ctxn.var("n")
p_true = nv * (nv + 1)
r = nv / (nv + 2) * apply_map(s, p_true) / p_true
red, p = certificate_reduction(r, s)
print("auto reduction:", format_ratfunc(r), "->", format_ratfunc(red), "p =", format_ratfunc(p))
print("  identity:", (red * apply_map(s, p) / p - r).is_zero)
r2 = red * apply_map(s, nv * nv + 1) / (nv * nv + 1)
red2, p2 = certificate_reduction(r2, s)
print("  canonical:", format_ratfunc(red2) == format_ratfunc(red))

ctxy = VarContext(["y"])
dyy = DeltaMap("dy", DERIVATION, {"y": 1}, ctxy)
yv = ctxy.var("y")
q = yv * yv + 1
rr = ctxy.one / yv + apply_map(dyy, q) / q
redd, pd = certificate_reduction(rr, dyy)
print("der reduction:", format_ratfunc(rr), "->", format_ratfunc(redd), "p =", format_ratfunc(pd))
print("  identity:", (redd + apply_map(dyy, pd) / pd - rr).is_zero)

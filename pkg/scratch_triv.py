from hypersolve.config import DEFAULT_CONFIG
from hypersolve.ratfunc import VarContext, format_ratfunc
from hypersolve.delta import DeltaMap, DeltaSet, DERIVATION, AUTOMORPHISM, constant_field
from hypersolve.linalg import MatrixF
from hypersolve.system import IntegrableSystem, Certificate, HyperexpGroup
from hypersolve.solver import (solve_recursive, solve_ordinary, extend_certificate,
                               substitute_and_extract)

# mixed trivial: B = 0 for derivation, I for automorphism -> one group, identity
ctx = VarContext(["x", "n"])
d = DeltaMap("d", DERIVATION, {"x": 1}, ctx)
s = DeltaMap("s", AUTOMORPHISM, {"n": 1}, ctx)
ds = DeltaSet([d, s])
Z = MatrixF(ctx, 2, 2, [ctx.zero] * 4)
I = MatrixF.identity(ctx, 2)
rep = solve_recursive(IntegrableSystem(ds, {"d": Z, "s": I}))
print("mixed trivial:", len(rep), "groups")
for g in rep:
    print("  cert", {n: format_ratfunc(v) for n, v in g.certificate.values.items()},
          "vectors", [[format_ratfunc(e) for e in g.vectors.row(i)] for i in range(2)])

# multi-direction lone derivation (delta = dx + dy), B = 0
ctx2 = VarContext(["x", "y"])
dd = DeltaMap("dd", DERIVATION, {"x": 1, "y": 1}, ctx2)
rep = solve_ordinary(IntegrableSystem(DeltaSet([dd]), {"dd": MatrixF(ctx2, 2, 2, [ctx2.zero]*4)}))
print("multi-direction trivial:", len(rep),
      [{n: format_ratfunc(v) for n, v in g.certificate.values.items()} for g in rep])

# extend_certificate trivial and absent cases
ctx3 = VarContext(["x", "n"])
dx = DeltaMap("dx", DERIVATION, {"x": 1}, ctx3)
sn = DeltaMap("sn", AUTOMORPHISM, {"n": 1}, ctx3)
base0 = Certificate(DeltaSet([dx]), {"dx": ctx3.zero})
e1 = extend_certificate(base0, sn)
print("zero base, automorphism phi ->", format_ratfunc(e1.new_value))
basen = Certificate(DeltaSet([dx]), {"dx": ctx3.var("n")})
print("base dx:n, phi sn ->", extend_certificate(basen, sn))

base_sn = Certificate(DeltaSet([sn]), {"sn": ctx3.one})
e2 = extend_certificate(base_sn, dx)
print("base sn:1, phi dx ->", format_ratfunc(e2.new_value))

# substitute_and_extract trivial: V = I, cert 0 derivation base, B_phi over C'
ctx4 = VarContext(["x", "y"])
dx4 = DeltaMap("dx", DERIVATION, {"x": 1}, ctx4)
dy4 = DeltaMap("dy", DERIVATION, {"y": 1}, ctx4)
base = Certificate(DeltaSet([dx4]), {"dx": ctx4.zero})
g = HyperexpGroup(base, MatrixF.identity(ctx4, 2))
ext = extend_certificate(base, dy4)
print("ext value:", format_ratfunc(ext.new_value))
yv = ctx4.var("y")
Bphi = MatrixF(ctx4, 2, 2, [yv, ctx4.one, ctx4.zero, yv])
rs = substitute_and_extract(g, ext, Bphi, constant_field(DeltaSet([dx4])))
print("U:", [[format_ratfunc(rs.U.entry(i,j)) for j in range(2)] for i in range(2)])
print("W:", [[format_ratfunc(rs.W.entry(i,j)) for j in range(2)] for i in range(2)])

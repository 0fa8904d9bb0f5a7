import time
from hypersolve.system import system_from_json, verify_group, display_certificate
from hypersolve.solver import solve_ordinary, solve_recursive
from hypersolve.ratfunc import format_ratfunc, VarContext
from hypersolve.delta import DeltaMap, DeltaSet, DERIVATION, AUTOMORPHISM
from hypersolve.system import IntegrableSystem
from hypersolve.linalg import MatrixF
import json

def show(rep):
    for g in rep:
        cert = {n: format_ratfunc(v) for n, v in g.certificate.values.items()}
        cols = [[format_ratfunc(g.vectors.entry(i, c)) for i in range(g.vectors.rows)]
                for c in range(g.vectors.cols)]
        print("  cert", cert, "display", display_certificate(g.certificate))
        for col in cols:
            print("    col", col)

t0 = time.time()
doc = json.load(open("fixtures/example1.json"))
sys1 = system_from_json(doc)
rep = solve_ordinary(sys1)
print("Example 1 ordinary: %.2fs, %d groups" % (time.time() - t0, len(rep)))
show(rep)
for g in rep:
    print("  verify:", verify_group(sys1, g).passed)

t0 = time.time()
rep = solve_recursive(sys1)
print("Example 1 recursive: %.2fs, %d groups" % (time.time() - t0, len(rep)))
show(rep)

# trivial: delta(Z)=0, n=2
ctx = VarContext(["x"])
d = DeltaMap("d", DERIVATION, {"x": 1}, ctx)
ds = DeltaSet([d])
Z = MatrixF(ctx, 2, 2, [ctx.zero]*4)
rep = solve_ordinary(IntegrableSystem(ds, {"d": Z}))
print("trivial derivation:")
show(rep)

# trivial: sigma(Z) = diag(2,3) Z
s = DeltaMap("s", AUTOMORPHISM, {"x": 1}, ctx)
ds2 = DeltaSet([s])
D = MatrixF(ctx, 2, 2, [ctx.rational(2), ctx.zero, ctx.zero, ctx.rational(3)])
rep = solve_ordinary(IntegrableSystem(ds2, {"s": D}))
print("trivial diag(2,3):")
show(rep)

import json
from hypersolve.ratfunc import VarContext, format_ratfunc
from hypersolve.delta import DeltaMap, DeltaSet, DERIVATION, AUTOMORPHISM
from hypersolve.linalg import MatrixF
from hypersolve.errors import NotIntegrable
from hypersolve.system import (
    Certificate, HyperexpGroup, IntegrableSystem, Representation,
    StructureMatrices, associated_system, display_certificate, iso_test,
    representation_equivalent, representation_from_json,
    representation_to_json, submodule_certificate, system_from_json,
    system_to_json, verify_group)


def mat(ctx, rows):
    return MatrixF.from_rows(ctx, [[ctx.parse(e) for e in r] for r in rows])


# ---- Example 1 ----
ctx1 = VarContext(["n"], parameters=["x", "m"])
sn = DeltaMap("sn", AUTOMORPHISM, {"n": 1}, ctx1)
d1 = DeltaSet([sn])
A1 = [
    ["n*(2*n*x+x-2*x^2-1)/(2*(n*x-1))", "x*(-n-3+2*x+2*n*x)/(2*(n*x-1))", "0"],
    ["n*(n-1-x+n*x)/(2*(n*x-1))", "(-2*n-2+x+2*n*x+n^2*x)/(2*(n*x-1))", "0"],
    ["(n^2*x+3*n*x+2*n*m^2-n^2-n+2*m^2)/(2*(n*x-1))",
     "(x+2*m^2-n^2*x+2*x*m^2+2*x^2*n)/(2*(1-n*x))", "x"],
]
sys1 = IntegrableSystem(d1, {"sn": mat(ctx1, A1)})
print("Ex1 system constructed, size", sys1.size)

V1 = mat(ctx1, [["(n+1)/x"], ["(1+x)*n/x^2"], ["(n*x+m^2)/x^2"]])
g1a = HyperexpGroup(Certificate(d1, {"sn": ctx1.parse("n")}), V1)
g1b = HyperexpGroup(Certificate(d1, {"sn": ctx1.parse("x")}),
                    mat(ctx1, [["0"], ["0"], ["1"]]))
for tag, g in (("g1a", g1a), ("g1b", g1b)):
    r = verify_group(sys1, g)
    print(tag, "verify:", r.passed, r.failures()[:3])
print("display g1a:", display_certificate(g1a.certificate))
print("display g1b:", display_certificate(g1b.certificate))

# iso tests
e1a = g1a.certificate.eigenvalues()
e1b = g1b.certificate.eigenvalues()
print("iso 1/n vs 1/x:", iso_test(d1, e1a, e1b))
print("iso same:", format_ratfunc(iso_test(d1, e1a, e1a)))
# scale: v' = n*v  =>  g' = g * sigma(n)/n
scaled = {"sn": e1a["sn"] * ctx1.parse("(n+1)/n")}
w = iso_test(d1, scaled, e1a)
print("iso scaled->orig witness:", format_ratfunc(w))
w2 = iso_test(d1, e1a, scaled)
print("iso orig->scaled witness:", format_ratfunc(w2),
      "| reciprocal:", (w * w2).is_one if w and w2 else None)

# mutation check: flip the sign of one V entry -> some residual
Vbad = mat(ctx1, [["(n+1)/x"], ["-(1+x)*n/x^2"], ["(n*x+m^2)/x^2"]])
gbad = HyperexpGroup(g1a.certificate, Vbad)
print("mutated verify:", verify_group(sys1, gbad).passed,
      verify_group(sys1, gbad).failures())

# ---- Example 2 ----
ctx2 = VarContext(["x", "y"], parameters=["e"])
s2 = DeltaMap("sx", AUTOMORPHISM, {"x": 1}, ctx2)
dd = DeltaMap("d", DERIVATION, {"x": 1, "y": 1}, ctx2)
d2 = DeltaSet([s2, dd])
As = [
    ["0", "1/y", "-x*e", "e+1"],
    ["-y*e", "e+1", "0", "y*e"],
    ["0", "0", "0", "1/(x+1)"],
    ["0", "0", "-x*e", "e+1"],
]
Ad = [
    ["-1/y", "-4/(2*y-1)", "x/y", "(2*y-1+4*y^2)/(y*(2*y-1))"],
    ["0", "0", "0", "1"],
    ["-4*y/(x*(2*y-1))", "0", "(4*y*x-2*y+1)/(x*(2*y-1))", "4*y/(x*(2*y-1))"],
    ["0", "-4/(2*y-1)", "0", "4*y/(2*y-1)"],
]
sys2 = IntegrableSystem(d2, {"sx": mat(ctx2, As), "d": mat(ctx2, Ad)})
print("Ex2 system constructed, size", sys2.size)

finals2 = [
    ({"sx": "1", "d": "0"}, ["2", "y", "1/x", "1"]),
    ({"sx": "1", "d": "2"}, ["1/y+2", "1", "2/x", "2"]),
    ({"sx": "e", "d": "2"}, ["1/y+2*e", "e", "2/x", "2*e"]),
    ({"sx": "e", "d": "0"}, ["1+e", "y*e", "1/x", "e"]),
]
groups2 = []
for cv, vec in finals2:
    c = Certificate(d2, {k: ctx2.parse(v) for k, v in cv.items()})
    g = HyperexpGroup(c, mat(ctx2, [[e] for e in vec]))
    res = verify_group(sys2, g)
    print("Ex2 group", cv, "verify:", res.passed, res.failures()[:4])
    print("   display:", display_certificate(c))
    groups2.append(g)
rep2 = Representation(groups2)
print("Ex2 disjoint:", rep2.disjointness_witness())
print("Ex2 equivalent to itself:", representation_equivalent(rep2, rep2))
print("Ex2 equivalent to 3 groups:",
      representation_equivalent(rep2, Representation(groups2[:3])))

# ---- Example 3 ----
ctx3 = VarContext(["x", "y", "k"])
dx = DeltaMap("dx", DERIVATION, {"x": 1}, ctx3)
sk = DeltaMap("sk", AUTOMORPHISM, {"k": 1}, ctx3)
dy = DeltaMap("dy", DERIVATION, {"y": 1}, ctx3)
d3 = DeltaSet([dx, sk, dy])
Ax = [
    ["(x+y)/(x*y)", "-k*(2*x+k)/(x*(x+k))", "0"],
    ["0", "(-y+x+k)/(y*(x+k))", "0"],
    ["(3*x+2*y)/(x+y)", "-k*(3*x+2*y)/(x+y)", "x/(y*(x+y))"],
]
Ak = [
    ["k*(y+k)/(y+k+1)", "k*(k^2+2*x*k+x*y+x+k)/((y+k+1)*(x+k+1))", "0"],
    ["0", "k*(x+k)/(x+k+1)", "0"],
    ["-x*(2*k+y+1)/(y+k+1)", "x*k*(2*k+y+1)/(y+k+1)", "k+1"],
]
Ay = [
    ["-(y^2+x*y+x*k)/((y+k)*y^2)", "k*(2*y+k)/(y*(y+k))", "0"],
    ["0", "-(x-y)/y^2", "0"],
    ["-x*(2*x*y+y^2+x*k)/(y*(y+k)*(x+y))",
     "x*k*(2*x*y+y^2+x*k)/(y*(y+k)*(x+y))", "-x^2/(y^2*(x+y))"],
]
sys3 = IntegrableSystem(d3, {"dx": mat(ctx3, Ax), "sk": mat(ctx3, Ak),
                             "dy": mat(ctx3, Ay)})
print("Ex3 system constructed, size", sys3.size)

W3 = mat(ctx3, [
    ["k*y/(x+k)", "0", "x/(y+k)"],
    ["y/(x+k)", "0", "0"],
    ["0", "k*y/(x+y)", "x^2/(y+k)"],
])
c3 = Certificate(d3, {"dx": ctx3.parse("1/y"), "sk": ctx3.parse("k"),
                      "dy": ctx3.parse("-x/y^2")})
g3 = HyperexpGroup(c3, W3)
res = verify_group(sys3, g3)
print("Ex3 final verify:", res.passed, res.failures()[:6])
print("Ex3 display:", display_certificate(c3))

# structure matrices behind the system (A = -B^T der, (B^-1)^T auto)
from hypersolve.linalg import inverse
S3 = StructureMatrices(d3, {
    "dx": (-sys3.matrices["dx"]).transpose(),
    "sk": inverse(sys3.matrices["sk"]).transpose(),
    "dy": (-sys3.matrices["dy"]).transpose(),
})
back = associated_system(S3)
print("Ex3 structure->associated round-trip:",
      all(back.matrices[k] == sys3.matrices[k] for k in ("dx", "sk", "dy")))

w1 = W3.col(0)
eig = submodule_certificate(S3, w1)
print("Ex3 submodule eigen:", {k: format_ratfunc(v) for k, v in eig.items()}
      if eig else None)
print("   matches certificate eigenvalues:",
      eig == c3.eigenvalues() if eig else False)
print("Ex3 e1 submodule:",
      submodule_certificate(S3, [ctx3.one, ctx3.zero, ctx3.zero]))

# certificate scalar integrability
print("Ex3 cert residuals:",
      [(a, b, r.is_zero) for a, b, r in c3.integrability_residuals()])
for cv, _ in finals2:
    c = Certificate(d2, {k: ctx2.parse(v) for k, v in cv.items()})
    print("Ex2 cert residuals", cv,
          [(a, b, r.is_zero) for a, b, r in c.integrability_residuals()])

# ---- perturbation -> NotIntegrable ----
import random
rng = random.Random(5)
def perturb(sysrows, ctx, names, build):
    ok = 0
    for trial in range(6):
        name = rng.choice(names)
        rows = {k: [r[:] for r in v] for k, v in sysrows.items()}
        n = len(rows[name])
        i, j = rng.randrange(n), rng.randrange(n)
        rows[name][i][j] = rows[name][i][j] + "+1" if rows[name][i][j] != "0" else "1"
        try:
            build({k: mat(ctx, v) for k, v in rows.items()})
            print("  !! perturbation accepted", name, i, j)
        except NotIntegrable as exc:
            ok += 1
    return ok

print("Ex2 perturbations rejected:",
      perturb({"sx": As, "d": Ad}, ctx2, ["sx", "d"],
              lambda m: IntegrableSystem(d2, m)), "/6")
print("Ex3 perturbations rejected:",
      perturb({"dx": Ax, "sk": Ak, "dy": Ay}, ctx3, ["dx", "sk", "dy"],
              lambda m: IntegrableSystem(d3, m)), "/6")

# ---- JSON round-trip ----
doc = system_to_json(sys3)
sys3b = system_from_json(json.loads(json.dumps(doc)))
same = all(
    format_ratfunc(sys3b.matrices[k].entry(i, j))
    == format_ratfunc(sys3.matrices[k].entry(i, j))
    for k in ("dx", "sk", "dy") for i in range(3) for j in range(3))
print("Ex3 json round-trip:", same)
rdoc = representation_to_json(Representation([g3]))
print(json.dumps(rdoc, ensure_ascii=False))
rep3b = representation_from_json(json.loads(json.dumps(rdoc)), sys3b.delta)
print("rep json verify (fresh ctx):", verify_group(sys3b, rep3b[0]).passed)
rep3c = representation_from_json(json.loads(json.dumps(rdoc)), d3)
print("rep equivalent (same delta):",
      representation_equivalent(Representation([g3]), rep3c))

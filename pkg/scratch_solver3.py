import time, json
from hypersolve.config import DEFAULT_CONFIG
from hypersolve.system import system_from_json, verify_group, display_certificate
from hypersolve.system import Certificate, HyperexpGroup
from hypersolve.solver import (solve_recursive, extend_certificate, ExtensionCandidate,
                               substitute_and_extract, _ordinary_classes)
from hypersolve.ratfunc import format_ratfunc
from hypersolve.delta import DeltaSet, adapted_frame, constant_field
from hypersolve.linalg import linear_reduction

def fmt_mat(M):
    return [[format_ratfunc(M.entry(i, j)) for j in range(M.cols)] for i in range(M.rows)]

def show(rep, sys=None):
    for g in rep:
        cert = {n: format_ratfunc(v) for n, v in g.certificate.values.items()}
        ver = "" if sys is None else " verify=%s" % verify_group(sys, g).passed
        print("  cert", cert, "display", repr(display_certificate(g.certificate)), ver)
        for row in fmt_mat(g.vectors): print("    ", row)

# --- Example 2 branch-2 with the paper's extension value r = 1
doc = json.load(open("fixtures/example2.json"))
sys2 = system_from_json(doc)
delta = sys2.delta
maps = list(delta)
fr = adapted_frame(maps, delta.ctx)
fmaps = [fr.map_in_frame(m) for m in maps]
cls = _ordinary_classes(sys2.matrices["sx"], fmaps[0], DEFAULT_CONFIG)
seen = DeltaSet([fmaps[0]])
cf = constant_field(seen)
r2, V2 = cls[1]
g2 = HyperexpGroup(Certificate(seen, {"sx": r2}), V2)
ctx = delta.ctx
ext_paper = ExtensionCandidate(g2.certificate, fmaps[1], ctx.one)
rs = substitute_and_extract(g2, ext_paper, sys2.matrices["d"], cf)
red = linear_reduction(rs.map, rs.U, rs.W)
print("Example 2 branch-2 with r=1, reduced P =", fmt_mat(red.P))
# paper: [[-1,1],[-4/(2y-1),(2y+1)/(2y-1)]]

# --- Example 3 checkpoints
doc = json.load(open("fixtures/example3.json"))
sys3 = system_from_json(doc)
d3 = sys3.delta
maps3 = list(d3)
print("map order:", [m.name for m in maps3])
fr3 = adapted_frame(maps3, d3.ctx)
print("frame identity:", fr3.identity)
f3 = [fr3.map_in_frame(m) for m in maps3]
t0 = time.time()
cls1 = _ordinary_classes(sys3.matrices["dx"], f3[0], DEFAULT_CONFIG)
print("stage-1 (%.2fs):" % (time.time() - t0))
for r, V in cls1:
    print("  r =", format_ratfunc(r))
    for row in fmt_mat(V): print("   ", row)

seen3 = DeltaSet([f3[0]])
cf3 = constant_field(seen3)
for r, V in cls1:
    g = HyperexpGroup(Certificate(seen3, {"dx": r}), V)
    ext = extend_certificate(g.certificate, f3[1])
    print("ext for sk:", None if ext is None else format_ratfunc(ext.new_value))
    if ext is None: continue
    rs3 = substitute_and_extract(g, ext, sys3.matrices["sk"], cf3)
    red3 = linear_reduction(rs3.map, rs3.U, rs3.W)
    print("  stage-2 reduced P =", fmt_mat(red3.P))

t0 = time.time()
rep = solve_recursive(sys3)
print("Example 3 recursive: %.2fs, %d groups" % (time.time() - t0, len(rep)))
show(rep, sys3)

import time, json
from hypersolve.system import system_from_json, verify_group, display_certificate
from hypersolve.system import Certificate, HyperexpGroup
from hypersolve.solver import (solve_ordinary, solve_recursive, extend_certificate,
                               substitute_and_extract, _solve_reduced, _ordinary_classes)
from hypersolve.ratfunc import format_ratfunc
from hypersolve.delta import DeltaSet, adapted_frame, constant_field
from hypersolve.linalg import MatrixF, linear_reduction

def show(rep, sys=None):
    for g in rep:
        cert = {n: format_ratfunc(v) for n, v in g.certificate.values.items()}
        cols = [[format_ratfunc(g.vectors.entry(i, c)) for i in range(g.vectors.rows)]
                for c in range(g.vectors.cols)]
        ver = "" if sys is None else " verify=%s" % verify_group(sys, g).passed
        print("  cert", cert, "display", repr(display_certificate(g.certificate)), ver)
        for col in cols:
            print("    col", col)

def fmt_mat(M):
    return [[format_ratfunc(M.entry(i, j)) for j in range(M.cols)] for i in range(M.rows)]

doc = json.load(open("fixtures/example2.json"))
sys2 = system_from_json(doc)

# --- stage-1 checkpoint: sigma_x representation
delta = sys2.delta
maps = list(delta)
print("map order:", [m.name for m in maps])
frame = adapted_frame(maps, delta.ctx)
print("frame identity:", frame.identity)
fmaps = [frame.map_in_frame(m) for m in maps]
B_s = sys2.matrices["sx"]
cls = _ordinary_classes(B_s, fmaps[0], None.__class__ and __import__("hypersolve.config", fromlist=["DEFAULT_CONFIG"]).DEFAULT_CONFIG)
print("stage-1 classes:")
for r, V in cls:
    print("  r =", format_ratfunc(r))
    for row in fmt_mat(V): print("   ", row)

# --- stage-2 checkpoints: extension + reduced systems per group
from hypersolve.config import DEFAULT_CONFIG
seen = DeltaSet([fmaps[0]])
cf = constant_field(seen)
for r, V in cls:
    g = HyperexpGroup(Certificate(seen, {"sx": r}), V)
    ext = extend_certificate(g.certificate, fmaps[1])
    print("group", format_ratfunc(r), "-> ext", None if ext is None else format_ratfunc(ext.new_value))
    if ext is None: continue
    rs = substitute_and_extract(g, ext, sys2.matrices["d"], cf)
    print("  U =", fmt_mat(rs.U))
    print("  W =", fmt_mat(rs.W))
    red = linear_reduction(rs.map, rs.U, rs.W)
    print("  reduced P =", fmt_mat(red.P), "kept:", red.kept)

t0 = time.time()
rep = solve_recursive(sys2)
print("Example 2 recursive: %.2fs, %d groups" % (time.time() - t0, len(rep)))
show(rep, sys2)

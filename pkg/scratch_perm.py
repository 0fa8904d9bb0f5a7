import time, json
from itertools import permutations
from hypersolve.system import system_from_json, representation_equivalent
from hypersolve.solver import solve_recursive
from hypersolve.ratfunc import format_ratfunc

for name in ("example2", "example3"):
    doc = json.load(open(f"fixtures/{name}.json"))
    sys = system_from_json(doc)
    names = [m.name for m in sys.delta]
    reps = []
    for perm in permutations(names):
        t0 = time.time()
        rep = solve_recursive(sys, order=list(perm))
        print(name, perm, "%.2fs" % (time.time() - t0), len(rep), "groups",
              [{n: format_ratfunc(v) for n, v in g.certificate.values.items()} for g in rep])
        reps.append((perm, rep))
    base = reps[0][1]
    for perm, rep in reps[1:]:
        eq = representation_equivalent(base, rep)
        print(name, reps[0][0], "~", perm, "->", eq)

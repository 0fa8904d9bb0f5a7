import json

ex1 = {
    "variables": ["n"],
    "parameters": ["x", "m"],
    "maps": [{"name": "sn", "kind": "shift", "action": {"n": 1}}],
    "equations": [{"map": "sn", "matrix": [
        ["n*(2*n*x+x-2*x^2-1)/(2*(n*x-1))",
         "x*(-n-3+2*x+2*n*x)/(2*(n*x-1))", "0"],
        ["n*(n-1-x+n*x)/(2*(n*x-1))",
         "(-2*n-2+x+2*n*x+n^2*x)/(2*(n*x-1))", "0"],
        ["(n^2*x+3*n*x+2*n*m^2-n^2-n+2*m^2)/(2*(n*x-1))",
         "(x+2*m^2-n^2*x+2*x*m^2+2*x^2*n)/(2*(1-n*x))", "x"],
    ]}],
    "input_kind": "associated",
}

ex2 = {
    "variables": ["x", "y"],
    "parameters": ["e"],
    "maps": [{"name": "sx", "kind": "shift", "action": {"x": 1}},
             {"name": "d", "kind": "derivation", "action": {"x": 1, "y": 1}}],
    "equations": [
        {"map": "sx", "matrix": [
            ["0", "1/y", "-x*e", "e+1"],
            ["-y*e", "e+1", "0", "y*e"],
            ["0", "0", "0", "1/(x+1)"],
            ["0", "0", "-x*e", "e+1"],
        ]},
        {"map": "d", "matrix": [
            ["-1/y", "-4/(2*y-1)", "x/y", "(2*y-1+4*y^2)/(y*(2*y-1))"],
            ["0", "0", "0", "1"],
            ["-4*y/(x*(2*y-1))", "0",
             "(4*y*x-2*y+1)/(x*(2*y-1))", "4*y/(x*(2*y-1))"],
            ["0", "-4/(2*y-1)", "0", "4*y/(2*y-1)"],
        ]},
    ],
    "input_kind": "associated",
}

ex3 = {
    "variables": ["x", "y", "k"],
    "parameters": [],
    "maps": [{"name": "dx", "kind": "derivation", "action": {"x": 1}},
             {"name": "sk", "kind": "shift", "action": {"k": 1}},
             {"name": "dy", "kind": "derivation", "action": {"y": 1}}],
    "equations": [
        {"map": "dx", "matrix": [
            ["(x+y)/(x*y)", "-k*(2*x+k)/(x*(x+k))", "0"],
            ["0", "(-y+x+k)/(y*(x+k))", "0"],
            ["(3*x+2*y)/(x+y)", "-k*(3*x+2*y)/(x+y)", "x/(y*(x+y))"],
        ]},
        {"map": "sk", "matrix": [
            ["k*(y+k)/(y+k+1)",
             "k*(k^2+2*x*k+x*y+x+k)/((y+k+1)*(x+k+1))", "0"],
            ["0", "k*(x+k)/(x+k+1)", "0"],
            ["-x*(2*k+y+1)/(y+k+1)", "x*k*(2*k+y+1)/(y+k+1)", "k+1"],
        ]},
        {"map": "dy", "matrix": [
            ["-(y^2+x*y+x*k)/((y+k)*y^2)", "k*(2*y+k)/(y*(y+k))", "0"],
            ["0", "-(x-y)/y^2", "0"],
            ["-x*(2*x*y+y^2+x*k)/(y*(y+k)*(x+y))",
             "x*k*(2*x*y+y^2+x*k)/(y*(y+k)*(x+y))", "-x^2/(y^2*(x+y))"],
        ]},
    ],
    "input_kind": "associated",
}

for name, doc in (("example1", ex1), ("example2", ex2), ("example3", ex3)):
    with open(f"fixtures/{name}.json", "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")

# validate: parse back, integrability runs in the constructor
from hypersolve.system import (system_from_json, Certificate, HyperexpGroup,
                               verify_group)
from hypersolve.linalg import MatrixF

checks = {
    "example1": [({"sn": "n"}, [["(n+1)/x", "(1+x)*n/x^2", "(n*x+m^2)/x^2"]]),
                 ({"sn": "x"}, [["0", "0", "1"]])],
    "example2": [({"sx": "1", "d": "0"}, [["2", "y", "1/x", "1"]]),
                 ({"sx": "1", "d": "2"}, [["1/y+2", "1", "2/x", "2"]]),
                 ({"sx": "e", "d": "2"}, [["1/y+2*e", "e", "2/x", "2*e"]]),
                 ({"sx": "e", "d": "0"}, [["1+e", "y*e", "1/x", "e"]])],
    "example3": [({"dx": "1/y", "sk": "k", "dy": "-x/y^2"},
                  [["k*y/(x+k)", "y/(x+k)", "0"],
                   ["0", "0", "k*y/(x+y)"],
                   ["x/(y+k)", "0", "x^2/(y+k)"]])],
}

for name, groups in checks.items():
    with open(f"fixtures/{name}.json") as fh:
        sys = system_from_json(json.load(fh))
    ctx = sys.delta.ctx
    for cv, cols in groups:
        cert = Certificate(sys.delta,
                           {k: ctx.parse(v) for k, v in cv.items()})
        V = MatrixF.from_rows(ctx, [[ctx.parse(col[i]) for col in cols]
                                    for i in range(len(cols[0]))])
        res = verify_group(sys, HyperexpGroup(cert, V))
        print(name, cv, "->", "PASS" if res.passed else res.failures())

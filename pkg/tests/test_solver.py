"""The staged solver: single-map representations, certificate extension,
substitution into reduced systems, and the full recursion across maps."""

import json
import pathlib

import pytest

from hypersolve import VarContext
from hypersolve.delta import DeltaMap, DeltaSet, constant_field
from hypersolve.linalg import MatrixF, linear_reduction
from hypersolve.ratfunc import format_ratfunc
from hypersolve.solver import (
    ExtensionCandidate,
    extend_certificate,
    solve_ordinary,
    solve_recursive,
    substitute_and_extract,
)
from hypersolve.system import (
    Certificate,
    HyperexpGroup,
    IntegrableSystem,
    display_certificate,
    representation_equivalent,
    system_from_json,
    verify_group,
)

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def fixture_system(name):
    with open(FIXTURES / f"{name}.json") as fh:
        return system_from_json(json.load(fh))


def mat(c, rows):
    return MatrixF.from_rows(c, [[c.parse(e) for e in row] for row in rows])


def matrix_view(M):
    return [[format_ratfunc(M.entry(i, j)) for j in range(M.cols)]
            for i in range(M.rows)]


def rep_view(rep):
    return [({n: format_ratfunc(v) for n, v in g.certificate.values.items()},
             matrix_view(g.vectors)) for g in rep]


def subsystem(sys, name):
    mp = next(m for m in sys.delta if m.name == name)
    return IntegrableSystem(DeltaSet([mp]), {name: sys.matrices[name]})


# -- single-map systems ------------------------------------------------------


def test_ordinary_worked_shift_system():
    sys = fixture_system("example1")
    rep = solve_ordinary(sys)
    assert rep_view(rep) == [
        ({"sn": "n"}, [["n + 1"], ["(n*x + n)/x"], ["(n*x + m^2)/x"]]),
        ({"sn": "x"}, [["0"], ["0"], ["1"]]),
    ]
    assert [display_certificate(g.certificate) for g in rep] == ["Γ(n)", "x^n"]
    for g in rep:
        assert verify_group(sys, g).passed


def test_ordinary_handles_one_map_only():
    with pytest.raises(ValueError):
        solve_ordinary(fixture_system("example2"))


def test_ordinary_zero_matrix():
    c = VarContext(["x"])
    d = DeltaMap("d", "derivation", {"x": 1}, c)
    sys = IntegrableSystem(DeltaSet([d]), {"d": MatrixF(c, 2, 2, [c.zero] * 4)})
    assert rep_view(solve_ordinary(sys)) == [
        ({"d": "0"}, [["1", "0"], ["0", "1"]]),
    ]


def test_ordinary_nilpotent_block():
    # one solution class with a polynomial cofactor alongside the constant
    c = VarContext(["x"])
    d = DeltaMap("d", "derivation", {"x": 1}, c)
    B = mat(c, [["0", "1"], ["0", "0"]])
    sys = IntegrableSystem(DeltaSet([d]), {"d": B})
    assert rep_view(solve_ordinary(sys)) == [
        ({"d": "0"}, [["1", "x"], ["0", "1"]]),
    ]


def test_ordinary_diagonal_shift():
    c = VarContext(["x"])
    s = DeltaMap("s", "automorphism", {"x": 1}, c)
    B = mat(c, [["2", "0"], ["0", "3"]])
    sys = IntegrableSystem(DeltaSet([s]), {"s": B})
    rep = solve_ordinary(sys)
    assert rep_view(rep) == [
        ({"s": "2"}, [["1"], ["0"]]),
        ({"s": "3"}, [["0"], ["1"]]),
    ]
    assert [display_certificate(g.certificate) for g in rep] == ["2^x", "3^x"]


def test_ordinary_directional_derivation():
    c = VarContext(["x", "y"])
    dd = DeltaMap("dd", "derivation", {"x": 1, "y": 1}, c)
    sys = IntegrableSystem(DeltaSet([dd]),
                           {"dd": MatrixF(c, 2, 2, [c.zero] * 4)})
    assert rep_view(solve_ordinary(sys)) == [
        ({"dd": "0"}, [["1", "0"], ["0", "1"]]),
    ]


# -- certificate extension ---------------------------------------------------


def test_extension_trivial_bases():
    c = VarContext(["x", "n"])
    dx = DeltaMap("dx", "derivation", {"x": 1}, c)
    sn = DeltaMap("sn", "automorphism", {"n": 1}, c)
    zero_base = Certificate(DeltaSet([dx]), {"dx": c.zero})
    ext = extend_certificate(zero_base, sn)
    assert ext.new_value.is_one
    one_base = Certificate(DeltaSet([sn]), {"sn": c.one})
    ext = extend_certificate(one_base, dx)
    assert ext.new_value.is_zero


def test_extension_shift_of_derivation_certificate():
    # the shift fixes 1/y, so the compatible extension value is 1
    c = VarContext(["x", "k"], parameters=["y"])
    dx = DeltaMap("dx", "derivation", {"x": 1}, c)
    sk = DeltaMap("sk", "automorphism", {"k": 1}, c)
    base = Certificate(DeltaSet([dx]), {"dx": c.var("y").inverse()})
    ext = extend_certificate(base, sk)
    assert ext.base is base and ext.map is sk
    assert ext.new_value.is_one


def test_extension_absent():
    # sigma_n shifts the certificate n, which no rational value tracks
    c = VarContext(["x", "n"])
    dx = DeltaMap("dx", "derivation", {"x": 1}, c)
    sn = DeltaMap("sn", "automorphism", {"n": 1}, c)
    base = Certificate(DeltaSet([dx]), {"dx": c.var("n")})
    assert extend_certificate(base, sn) is None


def test_extension_validates_input():
    c = VarContext(["x", "n"])
    dx = DeltaMap("dx", "derivation", {"x": 1}, c)
    base = Certificate(DeltaSet([dx]), {"dx": c.zero})
    with pytest.raises(ValueError):
        extend_certificate(base, dx)


# -- substitution into the reduced system ------------------------------------


def test_substitution_identity_vectors():
    c = VarContext(["x", "y"])
    dx = DeltaMap("dx", "derivation", {"x": 1}, c)
    dy = DeltaMap("dy", "derivation", {"y": 1}, c)
    base = Certificate(DeltaSet([dx]), {"dx": c.zero})
    g = HyperexpGroup(base, MatrixF.identity(c, 2))
    ext = extend_certificate(base, dy)
    B = mat(c, [["y", "1"], ["0", "y"]])
    rs = substitute_and_extract(g, ext, B, constant_field(base.delta))
    assert rs.map is dy
    assert matrix_view(rs.U) == [["1", "0"], ["0", "1"]]
    assert matrix_view(rs.W) == [["y", "1"], ["0", "y"]]


def test_substitution_automorphism_divides_by_extension():
    # sigma-type reduced systems carry the extension value on the left
    c = VarContext(["x", "n"])
    dx = DeltaMap("dx", "derivation", {"x": 1}, c)
    sn = DeltaMap("sn", "automorphism", {"n": 1}, c)
    base = Certificate(DeltaSet([dx]), {"dx": c.zero})
    g = HyperexpGroup(base, MatrixF.identity(c, 1))
    ext = ExtensionCandidate(base, sn, c.rational(2))
    rs = substitute_and_extract(g, ext, MatrixF(c, 1, 1, [c.var("n")]),
                                constant_field(base.delta))
    assert matrix_view(rs.U) == [["1"]]
    assert matrix_view(rs.W) == [["n/2"]]


def test_substitution_splits_over_function_basis():
    # a cofactor entry x outside the constants adds no second layer here,
    # but the coefficients are read off against the basis {x}
    c = VarContext(["x", "y"])
    dx = DeltaMap("dx", "derivation", {"x": 1}, c)
    dy = DeltaMap("dy", "derivation", {"y": 1}, c)
    base = Certificate(DeltaSet([dx]), {"dx": c.zero})
    g = HyperexpGroup(base, MatrixF(c, 1, 1, [c.var("x")]))
    ext = ExtensionCandidate(base, dy, c.zero)
    rs = substitute_and_extract(g, ext, MatrixF(c, 1, 1, [c.var("y")]),
                                constant_field(base.delta))
    assert matrix_view(rs.U) == [["1"]]
    assert matrix_view(rs.W) == [["y"]]


# -- the worked mixed system -------------------------------------------------


def test_mixed_system_first_stage():
    sys = fixture_system("example2")
    rep = solve_ordinary(subsystem(sys, "sx"))
    assert rep_view(rep) == [
        ({"sx": "1"}, [["1/y", "1"], ["1", "0"], ["0", "1/x"], ["0", "1"]]),
        ({"sx": "e"}, [["1/(y*e)", "1"], ["1", "0"],
                       ["0", "1/(x*e)"], ["0", "1"]]),
    ]


def test_mixed_system_reduced_systems():
    sys = fixture_system("example2")
    stage1 = solve_ordinary(subsystem(sys, "sx"))
    d = next(m for m in sys.delta if m.name == "d")
    cf = constant_field(stage1[0].certificate.delta)
    for g in stage1:
        ext = extend_certificate(g.certificate, d)
        assert ext.new_value.is_zero
        rs = substitute_and_extract(g, ext, sys.matrices["d"], cf)
        assert matrix_view(rs.U) == [["1", "0"], ["0", "1"]]
        assert matrix_view(rs.W) == [["0", "1"],
                                     ["-4/(2*y - 1)", "4*y/(2*y - 1)"]]
    # the alternative extension value 1 for the e-group shifts the diagonal
    g = stage1[1]
    ctx = sys.delta.ctx
    rs = substitute_and_extract(g, ExtensionCandidate(g.certificate, d, ctx.one),
                                sys.matrices["d"], cf)
    red = linear_reduction(rs.map, rs.U, rs.W)
    assert matrix_view(red.P) == [["-1", "1"],
                                  ["-4/(2*y - 1)", "(2*y + 1)/(2*y - 1)"]]


def test_mixed_system_complete():
    sys = fixture_system("example2")
    rep = solve_recursive(sys)
    assert rep_view(rep) == [
        ({"sx": "1", "d": "0"}, [["2"], ["y"], ["1/x"], ["1"]]),
        ({"sx": "1", "d": "2"}, [["(2*y + 1)/(2*y)"], ["1/2"],
                                 ["1/x"], ["1"]]),
        ({"sx": "e", "d": "0"}, [["(e + 1)/e"], ["y"], ["1/(x*e)"], ["1"]]),
        ({"sx": "e", "d": "2"}, [["(2*y*e + 1)/(2*y*e)"], ["1/2"],
                                 ["1/(x*e)"], ["1"]]),
    ]
    assert [display_certificate(g.certificate) for g in rep] \
        == ["1", "exp(2*y)", "exp(-y)*e^x", "exp(y)*e^x"]
    for g in rep:
        assert verify_group(sys, g).passed


# -- the worked three-map system ---------------------------------------------


def test_three_map_first_stage():
    sys = fixture_system("example3")
    rep = solve_ordinary(subsystem(sys, "dx"))
    assert rep_view(rep) == [
        ({"dx": "1/y"}, [["k/(x + k)", "0", "x"],
                         ["1/(x + k)", "0", "0"],
                         ["0", "1/(x + y)", "x^2"]]),
    ]


def test_three_map_reduced_system():
    sys = fixture_system("example3")
    stage1 = solve_ordinary(subsystem(sys, "dx"))
    sk = next(m for m in sys.delta if m.name == "sk")
    cf = constant_field(stage1[0].certificate.delta)
    ext = extend_certificate(stage1[0].certificate, sk)
    assert ext.new_value.is_one
    rs = substitute_and_extract(stage1[0], ext, sys.matrices["sk"], cf)
    red = linear_reduction(rs.map, rs.U, rs.W)
    assert matrix_view(red.P) == [
        ["k", "0", "0"],
        ["0", "k + 1", "0"],
        ["0", "0", "(y*k + k^2)/(y + k + 1)"],
    ]


def test_three_map_complete():
    sys = fixture_system("example3")
    rep = solve_recursive(sys)
    assert rep_view(rep) == [
        ({"dx": "1/y", "sk": "k", "dy": "-x/(y^2)"},
         [["y*k/(x + k)", "0", "x/(y + k)"],
          ["y/(x + k)", "0", "0"],
          ["0", "y*k/(x + y)", "x^2/(y + k)"]]),
    ]
    assert display_certificate(rep[0].certificate) == "exp(x/y)*Γ(k)"
    assert verify_group(sys, rep[0]).passed


# -- the recursion driver ----------------------------------------------------


def test_recursive_matches_ordinary_for_one_map():
    sys = fixture_system("example1")
    assert rep_view(solve_recursive(sys)) == rep_view(solve_ordinary(sys))


def test_recursive_trivial_mixed_system():
    c = VarContext(["x", "n"])
    d = DeltaMap("d", "derivation", {"x": 1}, c)
    s = DeltaMap("s", "automorphism", {"n": 1}, c)
    sys = IntegrableSystem(DeltaSet([d, s]),
                           {"d": MatrixF(c, 2, 2, [c.zero] * 4),
                            "s": MatrixF.identity(c, 2)})
    assert rep_view(solve_recursive(sys)) == [
        ({"d": "0", "s": "1"}, [["1", "0"], ["0", "1"]]),
    ]


def test_recursive_order_is_immaterial():
    sys = fixture_system("example2")
    rep = solve_recursive(sys)
    swapped = solve_recursive(sys, order=("d", "sx"))
    assert representation_equivalent(rep, swapped)
    assert [c for c, _ in rep_view(swapped)] == [c for c, _ in rep_view(rep)]

    sys3 = fixture_system("example3")
    rep3 = solve_recursive(sys3)
    for order in (("sk", "dx", "dy"), ("dy", "sk", "dx")):
        other = solve_recursive(sys3, order=order)
        assert representation_equivalent(rep3, other)
        assert [c for c, _ in rep_view(other)] == [c for c, _ in rep_view(rep3)]


def test_recursive_validates_order():
    sys = fixture_system("example2")
    with pytest.raises(ValueError):
        solve_recursive(sys, order=("sx",))
    with pytest.raises(ValueError):
        solve_recursive(sys, order=("sx", "dq"))

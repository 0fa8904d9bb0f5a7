"""Fully integrable first-order systems and their hyperexponential solutions.

A system couples one n x n matrix to every map of a Δ-set,

    δ_i(Z) = B_i Z  (derivations),      σ_j(Z) = B_j Z  (automorphisms),

and is *fully integrable* when the matrices satisfy the pairwise
compatibility identities forced by the commutativity of the maps.  Such
systems are exactly the ones attached to finite-dimensional modules over the
difference-differential operator ring: a module with structure matrices A on
a chosen basis yields the system with B = -Aᵀ for derivations and
B = (A⁻¹)ᵀ for automorphisms, and hyperexponential solutions h·w of that
system correspond to the one-dimensional submodules F·(Σ w_i e_i).

Hyperexponential elements never appear as ring elements here: h is carried
entirely by its certificate (the tuple of values δ(h)/h and σ(h)/h), and a
solution group pairs one certificate with the matrix whose columns are the
rational cofactors w.  The closed-form rendering (exp/power/Γ products) is
display sugar computed from the certificate alone.
"""

from fractions import Fraction
import re

from .config import DEFAULT_CONFIG
from .delta import (AUTOMORPHISM, DERIVATION, DeltaMap, DeltaSet, apply_map,
                    coeff_decompose_many, constant_field)
from .errors import NotIntegrable, ParseError, SingularMatrix
from .linalg import MatrixF, apply_matrix, det, inverse, rank, solve
from .ratfunc import VarContext, factor_univariate, format_ratfunc
from .scalar import (associate_witness, rational_additive_solve,
                     rational_multiplicative_solve)


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

class Certificate:
    """The values ℓφ(h) = δ(h)/h resp. σ(h)/h for every map φ of a Δ-set.

    A certificate pins a hyperexponential element down to a nonzero constant
    factor, so it is the only form in which such elements circulate.
    Automorphism values are nonzero by construction.
    """

    __slots__ = ("delta", "values")

    def __init__(self, delta, values):
        got = {}
        for mp in delta:
            if mp.name not in values:
                raise ValueError(f"certificate misses map {mp.name!r}")
            v = values[mp.name]
            if mp.is_automorphism and v.is_zero:
                raise ValueError(
                    f"certificate value for automorphism {mp.name!r} is zero")
            got[mp.name] = v
        if len(values) != len(got):
            extra = sorted(set(values) - set(got))
            raise ValueError(f"certificate names unknown maps: {extra}")
        self.delta = delta
        self.values = got

    def __getitem__(self, name):
        return self.values[name]

    def __eq__(self, other):
        return (isinstance(other, Certificate) and self.delta is other.delta
                and self.values == other.values)

    def __hash__(self):
        return hash((id(self.delta), tuple(sorted(self.values))))

    def __repr__(self):
        body = ", ".join(f"{n}: {format_ratfunc(v)}"
                         for n, v in self.values.items())
        return f"Certificate({body})"

    def eigenvalues(self):
        """The proportionality factors of the matching submodule: a vector u
        with h·u solving the system spans a line with ∂φ(u) = f_φ·u, where
        f = -ℓδ for a derivation and f = ℓσ⁻¹ for an automorphism."""
        ctx = self.delta.ctx
        out = {}
        for mp in self.delta:
            v = self.values[mp.name]
            out[mp.name] = ctx.one / v if mp.is_automorphism else -v
        return out

    @classmethod
    def from_eigenvalues(cls, delta, eigen):
        """Inverse of `eigenvalues`."""
        ctx = delta.ctx
        values = {}
        for mp in delta:
            f = eigen[mp.name]
            if mp.is_automorphism:
                if f.is_zero:
                    raise ValueError(
                        f"automorphism eigenvalue for {mp.name!r} is zero")
                values[mp.name] = ctx.one / f
            else:
                values[mp.name] = -f
        return cls(delta, values)

    def integrability_residuals(self):
        """Pairwise compatibility defects of the values, one triple
        (name_i, name_j, residual) per unordered pair of maps; every residual
        vanishes for the certificate of an actual hyperexponential element.
        """
        out = []
        maps = list(self.delta)
        for a in range(len(maps)):
            for b in range(a + 1, len(maps)):
                mi, mj = maps[a], maps[b]
                if mi.is_automorphism and mj.is_derivation:
                    mi, mj = mj, mi
                li, lj = self.values[mi.name], self.values[mj.name]
                if mi.is_derivation and mj.is_derivation:
                    r = apply_map(mi, lj) - apply_map(mj, li)
                elif mi.is_derivation:
                    r = apply_map(mi, lj) / lj - (apply_map(mj, li) - li)
                else:
                    r = apply_map(mi, lj) * li - apply_map(mj, li) * lj
                out.append((maps[a].name, maps[b].name, r))
        return out


# ---------------------------------------------------------------------------
# systems
# ---------------------------------------------------------------------------

def _matrix_family(delta, matrices, label):
    """Validate one square matrix of shared size per map; returns the family
    as a dict in Δ-order together with the size."""
    out = {}
    n = None
    for mp in delta:
        M = matrices.get(mp.name)
        if M is None:
            raise ValueError(f"{label} matrix missing for map {mp.name!r}")
        if M.ctx is not delta.ctx:
            raise ValueError(
                f"{label} matrix for {mp.name!r} uses a foreign context")
        if M.rows != M.cols:
            raise ValueError(
                f"{label} matrix for {mp.name!r} is {M.rows}x{M.cols}")
        if n is None:
            n = M.rows
        elif M.rows != n:
            raise ValueError(f"{label} matrices disagree in size")
        out[mp.name] = M
    if len(matrices) != len(out):
        extra = sorted(set(matrices) - set(out))
        raise ValueError(f"{label} matrices name unknown maps: {extra}")
    return out, n


def _require_invertible(delta, matrices, label):
    for mp in delta:
        if mp.is_automorphism and det(matrices[mp.name]).is_zero:
            raise SingularMatrix(
                f"{label} matrix for automorphism {mp.name!r} is singular")


class StructureMatrices:
    """The matrices A_φ describing a module on a chosen basis e_1..e_n:
    ∂φ(e_1, .., e_n)ᵀ = A_φ·(e_1, .., e_n)ᵀ.  Automorphism matrices are
    invertible because the inverse maps act on the module as well."""

    __slots__ = ("delta", "matrices", "size")

    def __init__(self, delta, matrices):
        self.delta = delta
        self.matrices, self.size = _matrix_family(delta, matrices, "structure")
        _require_invertible(delta, self.matrices, "structure")


class IntegrableSystem:
    """A fully integrable family δ_i(Z) = B_i·Z, σ_j(Z) = B_j·Z.

    Construction verifies every pairwise compatibility identity and raises
    NotIntegrable for the first pair (in Δ-order) whose residual matrix is
    nonzero; the offending entries travel in the error's `details`.
    """

    __slots__ = ("delta", "matrices", "size")

    def __init__(self, delta, matrices):
        self.delta = delta
        self.matrices, self.size = _matrix_family(delta, matrices, "system")
        _require_invertible(delta, self.matrices, "system")
        maps = list(delta)
        for a in range(len(maps)):
            for b in range(a + 1, len(maps)):
                mi, mj = maps[a], maps[b]
                R = integrability_residual(
                    mi, self.matrices[mi.name], mj, self.matrices[mj.name])
                if R.is_zero:
                    continue
                details = [(mi.name, mj.name, i, j, R.entry(i, j))
                           for i in range(R.rows) for j in range(R.cols)
                           if not R.entry(i, j).is_zero]
                raise NotIntegrable(
                    f"maps {mi.name!r} and {mj.name!r} violate integrability",
                    details)


def integrability_residual(mi, Bi, mj, Bj):
    """Left minus right side of the compatibility identity for one pair of
    maps (the mixed rule reads derivation-first; the pair is reordered if
    needed).  Zero iff the pair commutes on solutions."""
    if mi.is_automorphism and mj.is_derivation:
        mi, Bi, mj, Bj = mj, Bj, mi, Bi
    if mi.is_derivation and mj.is_derivation:
        return (apply_matrix(mi, Bj) + Bj @ Bi) - (apply_matrix(mj, Bi) + Bi @ Bj)
    if mi.is_derivation:
        return (apply_matrix(mi, Bj) + Bj @ Bi) - apply_matrix(mj, Bi) @ Bj
    return apply_matrix(mi, Bj) @ Bi - apply_matrix(mj, Bi) @ Bj


def associated_system(S):
    """The first-order system whose hyperexponential solutions correspond to
    the one-dimensional submodules of the module behind S: the equations use
    -Aᵀ for each derivation and (A⁻¹)ᵀ for each automorphism."""
    B = {}
    for mp in S.delta:
        A = S.matrices[mp.name]
        if mp.is_derivation:
            B[mp.name] = (-A).transpose()
        else:
            B[mp.name] = inverse(A).transpose()
    return IntegrableSystem(S.delta, B)


# ---------------------------------------------------------------------------
# solution groups and verification
# ---------------------------------------------------------------------------

class HyperexpGroup:
    """One certificate with its matrix of rational cofactors: the group
    carries the solutions h·(constant combinations of the columns of V)."""

    __slots__ = ("certificate", "vectors")

    def __init__(self, certificate, vectors):
        if vectors.cols == 0:
            raise ValueError("a group carries at least one column")
        if rank(vectors) != vectors.cols:
            raise ValueError("cofactor columns must be independent over F")
        self.certificate = certificate
        self.vectors = vectors

    def __repr__(self):
        return (f"HyperexpGroup({self.certificate!r}, "
                f"{self.vectors.rows}x{self.vectors.cols})")


class Representation:
    """A complete description of the hyperexponential solutions: finitely
    many groups whose certificates are pairwise non-associate, so every
    solution lives in exactly one group."""

    __slots__ = ("groups",)

    def __init__(self, groups):
        self.groups = list(groups)

    def __len__(self):
        return len(self.groups)

    def __iter__(self):
        return iter(self.groups)

    def __getitem__(self, i):
        return self.groups[i]

    def __repr__(self):
        return f"Representation({self.groups!r})"

    def disjointness_witness(self, config=DEFAULT_CONFIG):
        """First pair of groups whose certificates are associate-equivalent,
        as (i, j, witness r with h_i = r·h_j), or None when disjoint."""
        for i in range(len(self.groups)):
            ci = self.groups[i].certificate
            for j in range(i + 1, len(self.groups)):
                cj = self.groups[j].certificate
                r = associate_witness(ci.delta, ci.values, cj.values, config)
                if r is not None:
                    return (i, j, r)
        return None


class GroupVerification:
    """Outcome of verify_group: one exact residual matrix per map, all zero
    exactly when the group's columns solve the system."""

    __slots__ = ("residuals",)

    def __init__(self, residuals):
        self.residuals = residuals

    @property
    def passed(self):
        return all(R.is_zero for R in self.residuals.values())

    def failures(self):
        """(map name, row, column) of every nonzero residual entry."""
        out = []
        for name, R in self.residuals.items():
            for i in range(R.rows):
                for j in range(R.cols):
                    if not R.entry(i, j).is_zero:
                        out.append((name, i, j))
        return out

    def __repr__(self):
        state = "passed" if self.passed else f"{len(self.failures())} failure(s)"
        return f"GroupVerification({state})"


def verify_group(sys, group):
    """Exact check that every column w of the group solves the system for a
    hyperexponential h with the group's certificate: the residuals are
    δ(w) - B·w + ℓδ·w and σ(w) - ℓσ⁻¹·B·w per map.  Failure is a result,
    not an exception."""
    V = group.vectors
    if V.rows != sys.size:
        raise ValueError("vector length does not match the system size")
    ctx = sys.delta.ctx
    residuals = {}
    for mp in sys.delta:
        B = sys.matrices[mp.name]
        ell = group.certificate[mp.name]
        if mp.is_derivation:
            R = apply_matrix(mp, V) - B @ V + V.scale(ell)
        else:
            R = apply_matrix(mp, V) - (B @ V).scale(ctx.one / ell)
        residuals[mp.name] = R
    return GroupVerification(residuals)


# ---------------------------------------------------------------------------
# submodules and isomorphism
# ---------------------------------------------------------------------------

def submodule_certificate(S, u):
    """Eigenvalue tuple {φ: f_φ} with ∂φ(u) = f_φ·u when the coordinate
    vector u spans a one-dimensional submodule of the module behind the
    structure matrices, None when the line is not stable.

    On coordinates the action reads δ(u) + Aᵀ·u for a derivation and
    Aᵀ·σ(u) for an automorphism.
    """
    if isinstance(u, MatrixF):
        u = u.col(0)
    entries = list(u)
    ctx = S.delta.ctx
    pivot = next((i for i, e in enumerate(entries) if not e.is_zero), None)
    if pivot is None:
        raise ValueError("the zero vector spans no submodule")
    U = MatrixF.column(ctx, entries)
    eigen = {}
    for mp in S.delta:
        At = S.matrices[mp.name].transpose()
        if mp.is_derivation:
            w = apply_matrix(mp, U) + At @ U
        else:
            w = At @ apply_matrix(mp, U)
        f = w.entry(pivot, 0) / entries[pivot]
        if w != U.scale(f):
            return None
        eigen[mp.name] = f
    return eigen


def iso_test(delta, f, g, config=DEFAULT_CONFIG):
    """A rational r making u ↦ r·v an isomorphism between one-dimensional
    submodules with eigenvalue tuples f and g, or None when the submodules
    are not isomorphic.

    The witness solves δ_i(z) = (f_i - g_i)·z and σ_j(z) = f_j·g_j⁻¹·z;
    witnesses for the two directions are reciprocal.
    """
    targets = {}
    for mp in delta:
        a, b = f[mp.name], g[mp.name]
        if mp.is_automorphism:
            if a.is_zero or b.is_zero:
                raise ValueError("automorphism eigenvalues are nonzero")
            targets[mp.name] = a / b
        else:
            targets[mp.name] = a - b
    return rational_multiplicative_solve(delta, targets, config)


def _constant_combination(cf, M, target):
    """Coefficients c over the constant field with M·c = target, or None.

    Every entry is decomposed over one shared basis of the active
    coordinates; matching coefficient layers turns membership into a linear
    system whose entries all lie in the constant field, so plain elimination
    decides it exactly.
    """
    ctx = cf.delta.ctx
    n, s = M.rows, M.cols
    basis, rows = coeff_decompose_many(list(M.data) + list(target), cf)
    eq_rows = []
    rhs = []
    for i in range(n):
        for b in range(len(basis)):
            eq_rows.append([rows[i * s + k][b] for k in range(s)])
            rhs.append(rows[n * s + i][b])
    return solve(MatrixF.from_rows(ctx, eq_rows), rhs)


def _same_constant_span(cf, M1, M2):
    """Whether two full-column-rank matrices with equally many columns span
    the same constant-combination space.  Equal dimensions make one-sided
    containment sufficient."""
    if M1.cols != M2.cols:
        return False
    return all(_constant_combination(cf, M1, M2.col(j)) is not None
               for j in range(M2.cols))


def representation_equivalent(rep1, rep2, config=DEFAULT_CONFIG):
    """Whether two representations describe the same solution set: groups
    match bijectively with associate-equivalent certificates, and the
    cofactor spans agree after rescaling by the associate witness."""
    g1s, g2s = list(rep1), list(rep2)
    if len(g1s) != len(g2s):
        return False
    if not g1s:
        return True
    delta = g1s[0].certificate.delta
    cf = constant_field(delta)
    unused = list(range(len(g2s)))
    for g1 in g1s:
        hit = None
        for idx in unused:
            g2 = g2s[idx]
            if g1.vectors.cols != g2.vectors.cols:
                continue
            r = associate_witness(delta, g1.certificate.values,
                                  g2.certificate.values, config)
            if r is None:
                continue
            # h1 = r·h2, so the solutions h1·w of group 1 are h2·(r·w).
            if _same_constant_span(cf, g1.vectors.scale(r), g2.vectors):
                hit = idx
                break
        if hit is None:
            return False
        unused.remove(hit)
    return True


# ---------------------------------------------------------------------------
# closed-form display
# ---------------------------------------------------------------------------

_ATOM = re.compile(r"[A-Za-z0-9_]+\Z")


def _exp_power(lc, ctx):
    """Integer k with lc = e^k for the distinguished parameter e (0 for
    lc = 1), or None."""
    if lc.is_one:
        return 0
    if "e" not in ctx.parameters:
        return None
    e = ctx.var("e")
    p = e
    for k in range(1, 7):
        if lc == p:
            return k
        if lc * p == ctx.one:
            return -k
        p = p * e
    return None


def _linear_shift_factors(q, v, ctx):
    """Factor q as lc·Π(v + a_i)^{m_i} with every a_i free of v; returns
    (lc, [(a_i, m_i)...]) or None when a factor is nonlinear in v."""
    vr = ctx.var(v)
    gammas = []
    prod = ctx.one
    for poly, sign in ((q.num, 1), (q.den, -1)):
        for p, mult in factor_univariate(poly, v):
            if p.degree_in(v) != 1:
                return None
            pr = p.as_ratfunc()
            c = pr.diff(v)
            a = pr / c - vr
            gammas.append((a, sign * mult))
            prod = prod * (vr + a) ** (sign * mult)
    return q / prod, gammas


def display_certificate(cert):
    """Closed-form rendering of the element behind a certificate as a
    product of exp(g), cᵛ and Γ(v + a) factors, e.g. "exp(x/y)*Γ(k)".

    The exponent g is chosen compatible with every map at once (its shift
    differences vanish), so the factors multiply to an element with exactly
    the given certificate.  When the certificate has no such product the raw
    values are rendered instead.
    """
    delta = cert.delta
    ctx = delta.ctx
    maps = list(delta)
    autos = [mp for mp in maps if mp.is_automorphism]
    ders = [mp for mp in maps if mp.is_derivation]
    auto_acted = {v for mp in autos for v in mp.action}
    targets = {dm.name: cert.values[dm.name] for dm in ders}
    targets.update({am.name: ctx.zero for am in autos})
    fallback = ", ".join(f"{mp.name}: {format_ratfunc(cert.values[mp.name])}"
                         for mp in maps)

    powers = []
    gammas = []
    for am in autos:
        if len(am.action) != 1:
            return fallback
        (v, step), = am.action.items()
        if step != 1:
            return fallback
        if any(v in other.action for other in autos if other is not am):
            return fallback
        split = _linear_shift_factors(cert.values[am.name], v, ctx)
        if split is None:
            return fallback
        lc, parts = split
        if parts and any(dm.action.get(v) for dm in ders):
            # Γ(v + a) has no rational logarithmic derivative in v.
            return fallback
        for a, m in parts:
            if a.uses(auto_acted) or any(not apply_map(dm, a).is_zero
                                         for dm in ders):
                return fallback
            gammas.append((v, a, m))
        if not lc.is_one:
            if lc.uses(auto_acted):
                return fallback
            vr = ctx.var(v)
            for dm in ders:
                t = targets[dm.name] - vr * apply_map(dm, lc) / lc
                c = dm.action.get(v)
                if c:
                    k = _exp_power(lc, ctx)
                    if k is None:
                        return fallback
                    t = t - ctx.rational(Fraction(c) * k)
                targets[dm.name] = t
            powers.append((lc, v))

    g = rational_additive_solve(delta, targets)
    if g is None:
        return fallback
    factors = []
    if not g.is_zero:
        factors.append(f"exp({format_ratfunc(g)})")
    for lc, v in powers:
        base = format_ratfunc(lc)
        if not _ATOM.match(base):
            base = f"({base})"
        factors.append(f"{base}^{v}")
    for v, a, m in gammas:
        arg = format_ratfunc(ctx.var(v) + a)
        factors.append(f"Γ({arg})" + (f"^{m}" if m != 1 else ""))
    return "*".join(factors) if factors else "1"


# ---------------------------------------------------------------------------
# JSON round-trip
# ---------------------------------------------------------------------------

_KINDS = {"derivation": DERIVATION, "automorphism": AUTOMORPHISM,
          "shift": AUTOMORPHISM}


def _expect(doc, key, types, where):
    if key not in doc:
        raise ParseError(f"{where}: missing {key!r}")
    val = doc[key]
    if not isinstance(val, types):
        raise ParseError(f"{where}: {key!r} has the wrong type")
    return val


def _name_list(doc, key, where, required):
    if key not in doc:
        if required:
            raise ParseError(f"{where}: missing {key!r}")
        return []
    val = doc[key]
    if (not isinstance(val, list)
            or not all(isinstance(s, str) for s in val)):
        raise ParseError(f"{where}: {key!r} must be a list of names")
    return val


def _step_value(raw, where):
    if isinstance(raw, bool) or not isinstance(raw, (int, str)):
        raise ParseError(f"{where}: action values are integers or "
                         "fraction strings")
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{where}: bad action value {raw!r}") from None


def delta_from_json(doc):
    """DeltaSet and its VarContext from the shared JSON header (variables,
    parameters, maps)."""
    variables = _name_list(doc, "variables", "system", required=True)
    parameters = _name_list(doc, "parameters", "system", required=False)
    try:
        ctx = VarContext(variables, parameters=parameters)
    except ValueError as exc:
        raise ParseError(f"system: {exc}") from None
    maps = []
    seen = set()
    for mdoc in _expect(doc, "maps", list, "system"):
        if not isinstance(mdoc, dict):
            raise ParseError("maps: each map is an object")
        name = _expect(mdoc, "name", str, "map")
        if name in seen:
            raise ParseError(f"map {name!r} appears twice")
        seen.add(name)
        kind = _expect(mdoc, "kind", str, f"map {name!r}")
        if kind not in _KINDS:
            raise ParseError(f"map {name!r}: unknown kind {kind!r}")
        action_doc = _expect(mdoc, "action", dict, f"map {name!r}")
        action = {var: _step_value(raw, f"map {name!r}")
                  for var, raw in action_doc.items()}
        try:
            maps.append(DeltaMap(name, _KINDS[kind], action, ctx))
        except Exception as exc:
            raise ParseError(f"map {name!r}: {exc}") from None
    if not maps:
        raise ParseError("system: no maps declared")
    return DeltaSet(maps), ctx


def _matrix_from_json(rows_doc, ctx, where):
    if not isinstance(rows_doc, list):
        raise ParseError(f"{where}: matrix must be a list of rows")
    rows = []
    for row in rows_doc:
        if not isinstance(row, list):
            raise ParseError(f"{where}: matrix rows are lists")
        out = []
        for entry in row:
            if isinstance(entry, bool) or not isinstance(entry, (int, str)):
                raise ParseError(f"{where}: entries are strings or integers")
            out.append(ctx.rational(entry) if isinstance(entry, int)
                       else ctx.parse(entry))
        rows.append(out)
    try:
        return MatrixF.from_rows(ctx, rows)
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}") from None


def _equations_from_json(doc, delta, ctx):
    matrices = {}
    for edoc in _expect(doc, "equations", list, "system"):
        if not isinstance(edoc, dict):
            raise ParseError("equations: each equation is an object")
        name = _expect(edoc, "map", str, "equation")
        if name in matrices:
            raise ParseError(f"equation for map {name!r} appears twice")
        matrices[name] = _matrix_from_json(
            edoc.get("matrix"), ctx, f"equation for {name!r}")
    return matrices


def _input_kind(doc):
    kind = doc.get("input_kind", "associated")
    if kind not in ("associated", "structure"):
        raise ParseError(f"unknown input_kind {kind!r}")
    return kind


def structure_from_json(doc):
    """StructureMatrices from a system document with input_kind
    "structure"."""
    if _input_kind(doc) != "structure":
        raise ParseError('expected input_kind "structure"')
    delta, ctx = delta_from_json(doc)
    matrices = _equations_from_json(doc, delta, ctx)
    try:
        return StructureMatrices(delta, matrices)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def system_from_json(doc):
    """IntegrableSystem from a system document.  Structure-matrix input is
    converted through `associated_system`; integrability failures propagate
    as NotIntegrable either way."""
    if _input_kind(doc) == "structure":
        return associated_system(structure_from_json(doc))
    delta, ctx = delta_from_json(doc)
    matrices = _equations_from_json(doc, delta, ctx)
    try:
        return IntegrableSystem(delta, matrices)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _fraction_json(s):
    return int(s) if s.denominator == 1 else f"{s.numerator}/{s.denominator}"


def system_to_json(sys):
    """Plain-dict form of a system, parseable by `system_from_json`."""
    ctx = sys.delta.ctx
    return {
        "variables": list(ctx.variables),
        "parameters": list(ctx.parameters),
        "maps": [{"name": mp.name, "kind": mp.kind,
                  "action": {v: _fraction_json(s)
                             for v, s in sorted(mp.action.items())}}
                 for mp in sys.delta],
        "equations": [{"map": mp.name,
                       "matrix": [[format_ratfunc(e)
                                   for e in sys.matrices[mp.name].row(i)]
                                  for i in range(sys.size)]}
                      for mp in sys.delta],
        "input_kind": "associated",
    }


def representation_to_json(rep):
    """Plain-dict form of a representation: certificates by map name, the
    cofactor columns as vectors, and the closed-form display."""
    groups = []
    for g in rep:
        cert = g.certificate
        groups.append({
            "certificate": {name: format_ratfunc(v)
                            for name, v in cert.values.items()},
            "vectors": [[format_ratfunc(e) for e in g.vectors.col(j)]
                        for j in range(g.vectors.cols)],
            "display": display_certificate(cert),
        })
    return {"groups": groups}


def representation_from_json(doc, delta):
    """Representation from its plain-dict form, for re-verification."""
    ctx = delta.ctx
    groups = []
    for gdoc in _expect(doc, "groups", list, "representation"):
        if not isinstance(gdoc, dict):
            raise ParseError("groups: each group is an object")
        cdoc = _expect(gdoc, "certificate", dict, "group")
        values = {}
        for name, raw in cdoc.items():
            if not isinstance(raw, str):
                raise ParseError("certificate values are strings")
            values[name] = ctx.parse(raw)
        vdoc = _expect(gdoc, "vectors", list, "group")
        if not vdoc:
            raise ParseError("group: no vectors")
        cols = []
        for vec in vdoc:
            if not isinstance(vec, list) or not vec:
                raise ParseError("group: vectors are nonempty lists")
            col = []
            for entry in vec:
                if isinstance(entry, bool) or not isinstance(entry, (int, str)):
                    raise ParseError("vector entries are strings or integers")
                col.append(ctx.rational(entry) if isinstance(entry, int)
                           else ctx.parse(entry))
            cols.append(col)
        if len({len(c) for c in cols}) != 1:
            raise ParseError("group: vectors differ in length")
        V = MatrixF.from_rows(
            ctx, [[col[i] for col in cols] for i in range(len(cols[0]))])
        try:
            groups.append(HyperexpGroup(Certificate(delta, values), V))
        except ValueError as exc:
            raise ParseError(str(exc)) from None
    return Representation(groups)

"""The Δ-structure on F: commuting derivations and shift automorphisms.

Supported maps are constant-coefficient directional derivations
(δ(v) = c_v on each variable) and translations (σ(v) = v + s_v).  Any ordered
family of such maps can be put in *adapted coordinates*: an invertible linear
change of variables in which the k-th map, restricted to the functions fixed
by the earlier maps, becomes the standard unit derivation or unit shift in a
single fresh coordinate — or acts trivially when its direction vector already
lies in the span of the earlier ones.  The Frame class computes that change
once; constant subfields, coefficient decompositions over them, and the
solver's stage structure all read off it.

The rank test dependence_over_constants builds the generalized Wronskian
matrix (θ f_i) over monomials θ in the maps, with the classical dichotomy:
full rank certifies independence over every constant extension, otherwise the
reduced nullspace yields a relation whose coefficients are themselves
constants.
"""

from fractions import Fraction

from .errors import InternalInconsistency, UnsupportedDeltaStructure
from .ratfunc import RatFunc, VarContext, format_ratfunc

DERIVATION = "derivation"
AUTOMORPHISM = "automorphism"


class DeltaMap:
    """One commuting map: a directional derivation or a translation.

    `action` maps variable names to nonzero rational constants: the direction
    coefficients c_v of a derivation (δ(v) = c_v), or the steps s_v of a shift
    (σ(v) = v + s_v).  Variables absent from the action are fixed.
    """

    def __init__(self, name, kind, action, ctx):
        if kind not in (DERIVATION, AUTOMORPHISM):
            raise ValueError(f"unknown map kind: {kind!r}")
        self.name = name
        self.kind = kind
        self.ctx = ctx
        clean = {}
        for var, val in action.items():
            if var not in ctx.names:
                raise UnsupportedDeltaStructure(
                    f"map {name!r} acts on undeclared variable {var!r}")
            if ctx.is_parameter(var):
                raise UnsupportedDeltaStructure(
                    f"map {name!r} acts on parameter {var!r}; parameters are "
                    "fixed by every map")
            val = Fraction(val)
            if val != 0:
                clean[var] = val
        if not clean:
            raise UnsupportedDeltaStructure(
                f"map {name!r} has an empty action (identity maps are not "
                "members of a Δ-set)")
        self.action = clean
        self._subs_cache = None

    @property
    def is_derivation(self):
        return self.kind == DERIVATION

    @property
    def is_automorphism(self):
        return self.kind == AUTOMORPHISM

    def direction(self):
        """Action as a vector of Fractions over the context's variables."""
        return tuple(self.action.get(v, Fraction(0)) for v in self.ctx.variables)

    def __repr__(self):
        act = ", ".join(f"{v}: {c}" for v, c in sorted(self.action.items()))
        return f"DeltaMap({self.name}, {self.kind}, {{{act}}})"

    def __call__(self, f):
        return apply_map(self, f)


def apply_map(m, f):
    """Apply one map to a rational function (exactly)."""
    if f.ctx is not m.ctx:
        raise ValueError("map and argument use different variable contexts")
    if m.is_derivation:
        total = m.ctx.zero
        for var, c in m.action.items():
            total = total + f.diff(var) * m.ctx.rational(c)
        return total
    if m._subs_cache is None:
        m._subs_cache = {var: m.ctx.var(var) + m.ctx.rational(s)
                         for var, s in m.action.items()}
    return f.subs(m._subs_cache)


def apply_inverse(m, f):
    """Apply the inverse of an automorphism (shift by the negated steps)."""
    if not m.is_automorphism:
        raise ValueError("only automorphisms have inverses")
    assignment = {var: m.ctx.var(var) - m.ctx.rational(s)
                  for var, s in m.action.items()}
    return f.subs(assignment)


class DeltaSet:
    """Ordered family of pairwise commuting maps with distinct names.

    Commutation is automatic for the supported action classes (translations
    and constant-direction derivations all commute), so construction only
    validates names and shared contexts.
    """

    def __init__(self, maps):
        maps = list(maps)
        if not maps:
            raise ValueError("a Δ-set needs at least one map")
        names = [m.name for m in maps]
        if len(set(names)) != len(names):
            raise ValueError("map names must be distinct")
        for m in maps[1:]:
            if m.ctx is not maps[0].ctx:
                raise ValueError("all maps must share one variable context")
        self.maps = tuple(maps)
        self.ctx = maps[0].ctx
        self._by_name = {m.name: m for m in maps}

    def __iter__(self):
        return iter(self.maps)

    def __len__(self):
        return len(self.maps)

    def __getitem__(self, i):
        return self.maps[i]

    def map(self, name):
        return self._by_name[name]

    @property
    def names(self):
        return [m.name for m in self.maps]

    def prefix(self, k):
        return DeltaSet(self.maps[:k])

    def subset(self, names):
        return DeltaSet([self._by_name[nm] for nm in names])

    def reorder(self, names):
        if sorted(names) != sorted(self._by_name):
            raise ValueError("reorder must list every map name exactly once")
        return DeltaSet([self._by_name[nm] for nm in names])


# ---------------------------------------------------------------------------
# exact linear algebra over Fraction (frame construction only)
# ---------------------------------------------------------------------------

def _frac_rref(rows):
    """Reduced row echelon form of a list of Fraction lists; returns
    (rref rows, pivot column indices)."""
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = Fraction(1) / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def _in_span(basis, v):
    if not basis:
        return all(x == 0 for x in v)
    rref, _ = _frac_rref(basis + [list(v)])
    return len(rref) == len(_frac_rref(basis)[0])


def _solve_form(span_vectors, target_vector):
    """A Fraction row λ with λ·w = 0 for every w in span_vectors and
    λ·target_vector = 1 (exists whenever target is outside the span)."""
    n = len(target_vector)
    eqs = [list(w) + [Fraction(0)] for w in span_vectors]
    eqs.append(list(target_vector) + [Fraction(1)])
    rref, pivots = _frac_rref(eqs)
    lam = [Fraction(0)] * n
    for row, p in reversed(list(zip(rref, pivots))):
        if p == n:
            raise InternalInconsistency("direction unexpectedly inside span")
        lam[p] = row[n] - sum(row[j] * lam[j] for j in range(p + 1, n))
    return lam


class FrameStage:
    """Per-map record of the adapted frame: the coordinate the map consumes
    (None when its direction already lies in the earlier span)."""

    __slots__ = ("map_name", "coord")

    def __init__(self, map_name, coord):
        self.map_name = map_name
        self.coord = coord


class Frame:
    """Adapted linear coordinates for an ordered family of maps.

    Exposes exact transport of rational functions between the original
    context and the frame context, the frame form of each map, and the stage
    structure (which coordinate each map consumes).  When every chosen
    coordinate is an original variable the frame is the identity and both
    contexts are the same object.
    """

    def __init__(self, ctx, fctx, stages, coord_forms, coord_names, identity):
        self.ctx = ctx
        self.fctx = fctx
        self.stages = stages
        self.coord_forms = coord_forms      # {coord name: Fraction row over ctx.variables}
        self.coord_names = coord_names      # frame variable names in order
        self.identity = identity
        self._fwd = None
        self._bwd = None

    # coordinates consumed by the first k maps
    def consumed(self, k=None):
        if k is None:
            k = len(self.stages)
        return [st.coord for st in self.stages[:k] if st.coord is not None]

    def _assignments(self):
        if self._fwd is not None:
            return
        n = len(self.ctx.variables)
        m_rows = [self.coord_forms[nm] for nm in self.coord_names]
        inv = _frac_inverse(m_rows)
        # original variable i = sum_j inv[i][j] * coord_j
        fwd = {}
        for i, var in enumerate(self.ctx.variables):
            expr = self.fctx.zero
            for j, nm in enumerate(self.coord_names):
                if inv[i][j]:
                    expr = expr + self.fctx.var(nm) * self.fctx.rational(inv[i][j])
            fwd[var] = expr
        bwd = {}
        for j, nm in enumerate(self.coord_names):
            expr = self.ctx.zero
            for i, var in enumerate(self.ctx.variables):
                if m_rows[j][i]:
                    expr = expr + self.ctx.var(var) * self.ctx.rational(m_rows[j][i])
            bwd[nm] = expr
        self._fwd = fwd
        self._bwd = bwd

    def to_frame(self, f):
        if self.identity:
            return f
        self._assignments()
        return transport(f, self.fctx, self._fwd)

    def from_frame(self, g):
        if self.identity:
            return g
        self._assignments()
        return transport(g, self.ctx, self._bwd)

    def map_in_frame(self, m):
        """The frame form of a map: action on each frame coordinate u with
        linear form λ is λ(direction)."""
        vec = m.direction()
        action = {}
        for nm in self.coord_names:
            lam = self.coord_forms[nm]
            val = sum(a * b for a, b in zip(lam, vec))
            if val != 0:
                action[nm] = val
        return DeltaMap(m.name, m.kind, action, self.fctx)


def _frac_inverse(rows):
    n = len(rows)
    aug = [list(r) + [Fraction(1) if j == i else Fraction(0) for j in range(n)]
           for i, r in enumerate(rows)]
    rref, pivots = _frac_rref(aug)
    if pivots != list(range(n)):
        raise InternalInconsistency("frame coordinate matrix is singular")
    return [row[n:] for row in rref]


def transport(f, dst_ctx, assignment):
    """Rebuild a RatFunc in another context, sending each source variable
    through `assignment` (missing names map to the same-named destination
    variable)."""
    src = f.ctx

    def convert(pe):
        total = dst_ctx.field.zero
        cache = {}

        def power(i, e):
            key = (i, e)
            if key not in cache:
                if i >= len(src.names):
                    raise InternalInconsistency(
                        "internal indeterminate crossed a context boundary")
                nm = src.names[i]
                base = assignment[nm]._f if nm in assignment else \
                    dst_ctx.field.gens[dst_ctx.var_index(nm)]
                cache[key] = base ** e
            return cache[key]

        for exps, c in pe.terms():
            term = dst_ctx.field(c)
            for i, e in enumerate(exps):
                if e:
                    term = term * power(i, e)
            total += term
        return total

    num = convert(f._f.numer)
    den = convert(f._f.denom)
    return RatFunc(dst_ctx, num) / RatFunc(dst_ctx, den)


def _fresh_name(base, taken):
    if base not in taken:
        return base
    k = 2
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"


def adapted_frame(maps, ctx):
    """Build the adapted Frame for an ordered family of maps over ctx.

    Stage k: if the k-th map's direction vector is outside the span of the
    earlier ones, pick a linear form vanishing on that span and taking value 1
    on the new direction (preferring a single original variable, scaled), and
    let its coordinate be consumed by the map.  Afterwards the annihilator of
    the full span supplies invariant coordinates.
    """
    variables = list(ctx.variables)
    n = len(variables)
    span = []          # list of direction vectors (Fraction lists)
    stages = []
    forms = {}         # coord name -> Fraction row
    order = []         # coordinate names, stage coords first
    taken = set(ctx.names)

    def eligible_var(vec):
        # a variable whose axis form annihilates the span and meets vec
        best = None
        for i, var in enumerate(variables):
            if vec[i] == 0:
                continue
            if any(w[i] != 0 for w in span):
                continue
            if vec[i] == 1:
                return i
            if best is None:
                best = i
        return best

    for m in maps:
        vec = list(m.direction())
        if _in_span(span, vec):
            stages.append(FrameStage(m.name, None))
            continue
        i = eligible_var(vec)
        if i is not None:
            lam = [Fraction(0)] * n
            lam[i] = Fraction(1) / vec[i]
            coord = variables[i] if vec[i] == 1 else _fresh_name(f"u_{m.name}", taken)
        else:
            lam = _solve_form(span, vec)
            coord = _fresh_name(f"u_{m.name}", taken)
        taken.add(coord)
        forms[coord] = lam
        order.append(coord)
        stages.append(FrameStage(m.name, coord))
        span.append(vec)

    # invariant coordinates: complete to a basis of the dual space
    for i, var in enumerate(variables):
        # keep original variables untouched by every map as themselves
        if all(w[i] == 0 for w in span) and var not in forms:
            lam = [Fraction(0)] * n
            lam[i] = Fraction(1)
            forms[var] = lam
            order.append(var)
    # remaining directions: extend with annihilator basis vectors
    missing = n - len(order)
    if missing:
        ann = _annihilator_basis(span, n)
        for lam in ann:
            if len(order) == n:
                break
            trial = [forms[nm] for nm in order] + [lam]
            if len(_frac_rref(trial)[0]) == len(order) + 1:
                coord = _fresh_name("w", taken)
                taken.add(coord)
                forms[coord] = lam
                order.append(coord)
    if len(order) != n:
        raise InternalInconsistency("adapted frame construction incomplete")

    identity = all(
        nm in variables
        and forms[nm][variables.index(nm)] == 1
        and sum(1 for x in forms[nm] if x != 0) == 1
        for nm in order)
    if identity:
        fctx = ctx
    else:
        fctx = VarContext(order, parameters=ctx.parameters)
    return Frame(ctx, fctx, stages, forms, order, identity)


def _annihilator_basis(span, n):
    """Basis of {λ : λ·w = 0 for all w in span} over Q^n."""
    if not span:
        return [[Fraction(1) if j == i else Fraction(0) for j in range(n)]
                for i in range(n)]
    rref, pivots = _frac_rref(span)
    free = [j for j in range(n) if j not in pivots]
    out = []
    for fcol in free:
        lam = [Fraction(0)] * n
        lam[fcol] = Fraction(1)
        for row, p in zip(rref, pivots):
            lam[p] = -row[fcol]
        out.append(lam)
    return out


# ---------------------------------------------------------------------------
# constant subfields
# ---------------------------------------------------------------------------

class ConstantField:
    """The subfield of F fixed by a family of maps, in adapted coordinates.

    Membership is syntactic after transport: f is constant iff its frame form
    involves none of the consumed coordinates.
    """

    def __init__(self, delta, frame, prefix_len=None):
        self.delta = delta
        self.frame = frame
        self.prefix_len = len(frame.stages) if prefix_len is None else prefix_len
        self.active = frame.consumed(self.prefix_len)

    def is_constant(self, f):
        return not self.frame.to_frame(f).uses(self.active)

    def __repr__(self):
        return f"ConstantField(fixed by {[s.map_name for s in self.frame.stages[:self.prefix_len]]}, active={self.active})"


def constant_field(delta):
    """ConstantField of all maps in the given DeltaSet."""
    frame = adapted_frame(list(delta), delta.ctx)
    return ConstantField(delta, frame)


def coeff_decompose_many(fs, cf):
    """Decompose a family over the constant field with one shared basis.

    Works in frame coordinates: with D the common denominator of the family,
    each frame form is sum_s m_s * c_s(invariants) / D over the monomials m_s
    in the consumed coordinates, so {m_s / D} is a C'-linearly independent
    basis and the coefficients lie in C'.  Returns (basis, rows) transported
    back to the original context; sum(row[s] * basis[s]) reproduces each input.
    """
    from .ratfunc import lcm_denominator

    if not fs:
        return [], []
    frame = cf.frame
    ctx = frame.fctx
    gs = [frame.to_frame(f) for f in fs]
    nonzero = [g for g in gs if not g.is_zero]
    if not nonzero:
        return [fs[0].ctx.one], [[fs[0].ctx.zero] for _ in gs]
    active_idx = [ctx.var_index(nm) for nm in cf.active]
    d = lcm_denominator(nonzero).as_ratfunc()
    d_active, d_const = _split_denominator(ctx, d, active_idx)
    monomials = {}
    numerators = []
    for g in gs:
        p = g * d
        if p._f.denom != 1:
            raise InternalInconsistency("common denominator failed to clear")
        numerators.append(p)
        for exps in p._f.numer.monoms():
            key = tuple(exps[i] for i in active_idx)
            monomials.setdefault(key, None)
    keys = sorted(monomials, key=lambda k: (sum(k), k), reverse=True)
    key_pos = {k: i for i, k in enumerate(keys)}
    basis_frame = []
    for k in keys:
        mono = ctx.one
        for nm, e in zip(cf.active, k):
            if e:
                mono = mono * ctx.var(nm) ** e
        basis_frame.append(mono / d_active)
    rows = []
    for p in numerators:
        row = [ctx.zero] * len(keys)
        buckets = {}
        for exps, c in p._f.numer.terms():
            key = tuple(exps[i] for i in active_idx)
            rest = list(exps)
            for i in active_idx:
                rest[i] = 0
            buckets.setdefault(key, {})[tuple(rest)] = c
        for key, d_terms in buckets.items():
            pe = ctx.ring.from_dict(d_terms)
            row[key_pos[key]] = RatFunc(ctx, ctx.field(pe)) / d_const
        rows.append(row)
    basis = [frame.from_frame(b) for b in basis_frame]
    out_rows = [[frame.from_frame(c) for c in row] for row in rows]
    return basis, out_rows


def _split_denominator(ctx, d, active_idx):
    """Factor the common denominator into the product of irreducible factors
    that involve an active coordinate and the rest (a unit of the active
    monomial module); returns the pair as RatFuncs."""
    from sympy import factor_list

    coeff, facs = factor_list(d._f.numer.as_expr())
    active = ctx.one
    const = ctx.rational(Fraction(coeff.p, coeff.q))
    for expr, mult in facs:
        pe = ctx.ring.from_expr(expr)
        part = RatFunc(ctx, ctx.field(pe)) ** int(mult)
        if any(m[i] for m in pe.monoms() for i in active_idx):
            active = active * part
        else:
            const = const * part
    return active, const


def coeff_decompose(f, cf):
    """Decompose one function: list of (basis element, coefficient in C')."""
    basis, rows = coeff_decompose_many([f], cf)
    return [(b, c) for b, c in zip(basis, rows[0]) if not c.is_zero]


# ---------------------------------------------------------------------------
# Θ-monomials and the rank test
# ---------------------------------------------------------------------------

class ThetaMonomial:
    """Composition of maps with nonnegative exponents."""

    __slots__ = ("exponents",)

    def __init__(self, exponents):
        self.exponents = tuple(exponents)

    @property
    def order(self):
        return sum(self.exponents)

    def __repr__(self):
        return f"ThetaMonomial{self.exponents}"


def theta_monomials(delta, max_order):
    """All ThetaMonomials of the maps with order <= max_order, graded
    lexicographically in the DeltaSet order (deterministic)."""
    m = len(delta.maps)
    out = []
    for g in range(max_order + 1):
        out.extend(ThetaMonomial(t) for t in _compositions(g, m))
    return out


def _compositions(total, slots):
    if slots == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, slots - 1):
            yield (first,) + rest


def apply_theta(theta, f, delta):
    """Apply a ThetaMonomial (maps commute, so composition order is moot)."""
    g = f
    for m, e in zip(delta.maps, theta.exponents):
        for _ in range(e):
            g = apply_map(m, g)
    return g


class DependenceResult:
    """Outcome of the rank test: independence over all constant extensions,
    or an explicit relation with constant coefficients."""

    __slots__ = ("independent", "relation")

    def __init__(self, independent, relation=None):
        self.independent = independent
        self.relation = relation

    def __bool__(self):
        return self.independent


def dependence_over_constants(fs, delta):
    """Rank test for f_1..f_s over the constants of Δ.

    Builds rows (θ f_1, …, θ f_s) for θ of order 0, 1, … up to s−1,
    stopping as soon as rank s is reached (independent).  Otherwise the first
    reduced-nullspace vector of the assembled matrix is returned; its entries
    are provably constants of Δ and are verified as such.
    """
    fs = list(fs)
    s = len(fs)
    if s == 0:
        return DependenceResult(True)
    ctx = fs[0].ctx
    m = len(delta.maps)
    cache = {tuple([0] * m): list(fs)}
    rows = []
    echelon = []

    def theta_row(exps):
        key = tuple(exps)
        if key in cache:
            return cache[key]
        i = next(j for j, e in enumerate(exps) if e)
        prev = list(exps)
        prev[i] -= 1
        base = theta_row(prev)
        row = [apply_map(delta.maps[i], v) for v in base]
        cache[key] = row
        return row

    rank = 0
    for g in range(s):
        for exps in _compositions(g, m):
            row = theta_row(list(exps))
            rows.append(row)
            red = _reduce_against(echelon, row, ctx)
            if red is not None:
                echelon.append(red)
                rank += 1
                if rank == s:
                    return DependenceResult(True)
    relation = _first_nullspace_vector(rows, ctx)
    for d in relation:
        ok = True
        for mp in delta.maps:
            image = apply_map(mp, d)
            if mp.is_derivation:
                ok = image.is_zero
            else:
                ok = image == d
            if not ok:
                break
        if not ok:
            raise InternalInconsistency(
                "nullspace relation has non-constant coefficients; the rank "
                "argument guarantees constancy, so this is an arithmetic bug")
    return DependenceResult(False, relation)


def _reduce_against(echelon, row, ctx):
    """Reduce a row against stored (pivot, row) pairs; returns the normalized
    new pair's row or None when the row is dependent."""
    r = list(row)
    for pivot, erow in echelon:
        if not r[pivot].is_zero:
            c = r[pivot]
            r = [a - c * b for a, b in zip(r, erow)]
    p = next((i for i, v in enumerate(r) if not v.is_zero), None)
    if p is None:
        return None
    inv = r[p].inverse()
    return (p, [v * inv for v in r])


def _first_nullspace_vector(rows, ctx):
    """First reduced-echelon basis vector of the right nullspace."""
    work = [list(r) for r in rows]
    ncols = len(work[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(work)) if not work[i][c].is_zero), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        inv = work[r][c].inverse()
        work[r] = [x * inv for x in work[r]]
        for i in range(len(work)):
            if i != r and not work[i][c].is_zero:
                f = work[i][c]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    free = [c for c in range(ncols) if c not in pivots]
    if not free:
        raise InternalInconsistency("nullspace requested of a full-rank matrix")
    fcol = free[0]
    vec = [ctx.zero] * ncols
    vec[fcol] = ctx.one
    for row, p in zip(work, pivots):
        vec[p] = -row[fcol]
    return vec

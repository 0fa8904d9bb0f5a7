"""Complete solver for hyperexponential solutions of integrable systems.

The ordinary solver handles a single map: a minimal scalar equation at a
pivot yields the candidate certificates, a twisted rational-solution basis
fills in each group, and the pivot-free part is reduced and solved
recursively.  The general driver processes the maps one at a time in adapted
coordinates: every group found for the maps so far either extends its
certificate to the next map or is pruned, and the surviving groups shrink to
reduced systems with coefficients in the constants of the processed maps,
which the ordinary solver handles in a smaller variable context.
"""

from .config import DEFAULT_CONFIG
from .delta import (
    DeltaMap,
    DeltaSet,
    adapted_frame,
    apply_map,
    coeff_decompose_many,
    constant_field,
    transport,
)
from .errors import (
    DegreeBoundExceeded,
    FactorizationIncomplete,
    InternalInconsistency,
    UnsupportedSingularity,
)
from .linalg import MatrixF, apply_matrix, linear_reduction, minimal_scalar_equation, rank, rref
from .ratfunc import VarContext, format_ratfunc
from .scalar import (
    associate_witness,
    certificate_reduction,
    exponential_solutions,
    hypergeometric_solutions,
    operator_from_system,
    rational_additive_solve,
    rational_multiplicative_solve,
    rational_solutions_matrix,
    solve_constant_action,
)
from .system import Certificate, HyperexpGroup, Representation, verify_group


class ExtensionCandidate:
    """A certificate extension: the value the new map must assign to a
    hyperexponential element whose certificate for the processed maps is
    `base`."""

    __slots__ = ("base", "map", "new_value")

    def __init__(self, base, mp, new_value):
        self.base = base
        self.map = mp
        self.new_value = new_value

    def __repr__(self):
        return (f"ExtensionCandidate({self.map.name}: "
                f"{format_ratfunc(self.new_value)})")


class ReducedSystem:
    """The stacked constraint U·φ(D) = W·D satisfied by the coordinate
    vector of a solution inside a group's column span; entries lie in the
    constants of the processed maps, U has full column rank."""

    __slots__ = ("U", "W", "map")

    def __init__(self, U, W, mp):
        self.U = U
        self.W = W
        self.map = mp


def extend_certificate(base, phi, config=DEFAULT_CONFIG):
    """Extend the certificate `base` to the map `phi`, or None.

    Commutation of `phi` with every processed map pins down the value z the
    extended element must take under `phi`: a derivation `phi` requires
    δ_i(z) = φ(r_i) and σ_j(z) − z = φ(r_j)/r_j, an automorphism `phi`
    requires δ_i(z) = (φ(r_i) − r_i)·z and σ_j(z) = (φ(r_j)/r_j)·z.  When no
    rational z exists the group admits no extension and its branch dies.
    """
    delta = base.delta
    if any(m.name == phi.name for m in delta):
        raise ValueError(f"map {phi.name!r} already processed")
    if phi.ctx is not delta.ctx:
        raise ValueError("map and certificate use different variable contexts")
    targets = {}
    for m in delta:
        r = base[m.name]
        moved = apply_map(phi, r)
        if phi.is_derivation:
            targets[m.name] = moved if m.is_derivation else moved / r
        else:
            targets[m.name] = moved - r if m.is_derivation else moved / r
    if phi.is_derivation:
        z = rational_additive_solve(delta, targets, config)
    else:
        z = rational_multiplicative_solve(delta, targets, config)
    if z is None:
        return None
    return ExtensionCandidate(base, phi, z)


def substitute_and_extract(g, ext, Bphi, cf):
    """Constraint system on the coordinates of a solution h·V·D under the
    new map.

    Substituting Z = h·V·D into φ(Z) = B_φ·Z and using φ(h) per the
    extension value r leaves Q·φ(D) = B·D with Q = V, B = B_φ·V − r·V − φ(V)
    for a derivation and Q = r·φ(V), B = B_φ·V for an automorphism.  Since D
    has entries among the constants of the processed maps, the equation
    splits along a basis of the function field over those constants; the
    nonzero coefficient layers stack into U·φ(D) = W·D, row-reduced to drop
    redundant constraints.
    """
    phi = ext.map
    r = ext.new_value
    V = g.vectors
    ctx = V.ctx
    if phi.is_derivation:
        Q = V
        B = Bphi @ V - V.scale(r) - apply_matrix(phi, V)
    else:
        Q = apply_matrix(phi, V).scale(r)
        B = Bphi @ V
    n, d = V.rows, V.cols
    entries = list(Q.data) + list(B.data)
    _, coeffs = coeff_decompose_many(entries, cf)
    stacked = []
    for t in range(len(coeffs[0])):
        for i in range(n):
            row = [coeffs[i * d + c][t] for c in range(d)]
            row += [coeffs[(n + i) * d + c][t] for c in range(d)]
            if any(not e.is_zero for e in row):
                stacked.append(row)
    if not stacked:
        raise InternalInconsistency("substitution produced an empty constraint")
    R, _ = rref(MatrixF.from_rows(ctx, stacked))
    rows = [R.row(i) for i in range(R.rows)
            if any(not e.is_zero for e in R.row(i))]
    U = MatrixF.from_rows(ctx, [row[:d] for row in rows])
    W = MatrixF.from_rows(ctx, [row[d:] for row in rows])
    if rank(U) != d:
        raise InternalInconsistency("stacked constraint lost column rank")
    return ReducedSystem(U, W, phi)


# ---------------------------------------------------------------------------
# ordinary case: a single map
# ---------------------------------------------------------------------------

def _independent_columns(M):
    _, pivots = rref(M)
    return M.take_columns(pivots)


def _merge_class(found, mp, r, V, config):
    """Add the group (r, V), fusing with an associate-equivalent certificate
    already present: rescaling columns by the witness preserves solutions,
    and the joint column set is pruned back to full rank."""
    ctx = V.ctx
    single = DeltaSet([mp])
    for item in found:
        w = associate_witness(single, {mp.name: item[0]}, {mp.name: r}, config)
        if w is not None:
            joined = item[1].hstack(V.scale(ctx.one / w))
            item[1] = _independent_columns(joined)
            return
    found.append([r, V])


def _ordinary_classes(B, mp, config):
    """Groups (certificate, column basis) for the single-map system
    φ(Z) = B·Z, with `mp` acting on one coordinate."""
    ctx = B.ctx
    n = B.rows
    if n == 0:
        return []
    p = config.pivot - 1
    if not 0 <= p < n:
        p = 0
    eq = minimal_scalar_equation(B, mp, p)
    L = operator_from_system(eq)
    if mp.is_automorphism:
        classes = hypergeometric_solutions(L, config)
    else:
        classes = exponential_solutions(L, config)
    found = []
    for cl in classes:
        r, _ = certificate_reduction(cl.certificate, mp, config)
        if mp.is_automorphism:
            twisted = B.scale(ctx.one / r)
        else:
            twisted = B - MatrixF.identity(ctx, n).scale(r)
        V = rational_solutions_matrix(twisted, mp, config)
        if V.cols:
            _merge_class(found, mp, r, V, config)
    if eq.order < n:
        # solutions with zero pivot coordinate live in a smaller system
        red = linear_reduction(mp, MatrixF.identity(ctx, n), B,
                               forced_zero=(p,))
        if not red.empty:
            for r, V1 in _ordinary_classes(red.P, mp, config):
                _merge_class(found, mp, r, red.lift @ V1, config)
    return found


def _matrix_map(M, fn, ctx):
    return MatrixF(ctx, M.rows, M.cols, [fn(e) for e in M.data])


def _sort_key(names):
    def key(g):
        return tuple(format_ratfunc(g.certificate[nm]) for nm in names)
    return key


def solve_ordinary(sys, config=DEFAULT_CONFIG):
    """Representation of the hyperexponential solutions of a one-map system."""
    maps = list(sys.delta)
    if len(maps) != 1:
        raise ValueError("the ordinary solver handles exactly one map")
    mp = maps[0]
    frame = adapted_frame(maps, sys.delta.ctx)
    fmp = frame.map_in_frame(mp)
    B = _matrix_map(sys.matrices[mp.name], frame.to_frame, frame.fctx)
    groups = []
    for r, V in _ordinary_classes(B, fmp, config):
        cert = Certificate(sys.delta, {mp.name: frame.from_frame(r)})
        groups.append(HyperexpGroup(
            cert, _matrix_map(V, frame.from_frame, sys.delta.ctx)))
    groups.sort(key=_sort_key([mp.name]))
    return Representation(groups)


# ---------------------------------------------------------------------------
# general case: one map at a time
# ---------------------------------------------------------------------------

def _solve_reduced(rs, stage, frame, config):
    """Solve U·φ(D) = W·D for hyperexponential D over the constants of the
    first `stage` maps: pairs (certificate value, coordinate basis), in frame
    coordinates.

    The frame confines those constants to the rational functions in the
    coordinates not yet consumed, so the system transfers verbatim into the
    context on those variables, where φ acts on its own coordinate alone.
    When φ's direction already lies in the span of the processed ones it acts
    trivially there and the reduced dynamics has constant action instead.
    """
    phi = rs.map
    fctx = frame.fctx
    consumed = frame.consumed(stage)
    live = [v for v in phi.action if v not in consumed]
    for e in list(rs.U.data) + list(rs.W.data):
        if e.uses(consumed):
            raise InternalInconsistency(
                "reduced system escaped the constant subfield")
    if not live:
        red = linear_reduction(phi, rs.U, rs.W)
        if red.empty:
            return []
        return [(cl.certificate, red.lift @ cl.multipliers)
                for cl in solve_constant_action(red.P, phi, config)]
    sctx = VarContext([v for v in fctx.variables if v not in consumed],
                      parameters=fctx.parameters)
    down = lambda f: transport(f, sctx, {})
    U = _matrix_map(rs.U, down, sctx)
    W = _matrix_map(rs.W, down, sctx)
    sphi = DeltaMap(phi.name, phi.kind,
                    {v: phi.action[v] for v in live}, sctx)
    red = linear_reduction(sphi, U, W)
    if red.empty:
        return []
    up = lambda f: transport(f, fctx, {})
    out = []
    for r, V1 in _ordinary_classes(red.P, sphi, config):
        out.append((up(r), _matrix_map(red.lift @ V1, up, fctx)))
    return out


def _reorder(maps, order):
    names = [m.name for m in maps]
    if sorted(order) != sorted(names):
        raise ValueError(f"order must permute the map names {names}")
    by_name = {m.name: m for m in maps}
    return [by_name[nm] for nm in order]


def solve_recursive(sys, order=None, config=DEFAULT_CONFIG):
    """Complete representation of the hyperexponential solutions of an
    integrable system, processing its maps in the given name order."""
    delta = sys.delta
    ctx = delta.ctx
    maps = list(delta)
    if order is not None:
        maps = _reorder(maps, list(order))
    frame = adapted_frame(maps, ctx)
    fctx = frame.fctx
    fmaps = [frame.map_in_frame(m) for m in maps]
    fmats = {m.name: _matrix_map(sys.matrices[m.name], frame.to_frame, fctx)
             for m in maps}

    first = fmaps[0]
    seen = DeltaSet([first])
    try:
        state = [HyperexpGroup(Certificate(seen, {first.name: r}), V)
                 for r, V in _ordinary_classes(fmats[first.name], first, config)]
    except (FactorizationIncomplete, DegreeBoundExceeded,
            UnsupportedSingularity) as exc:
        raise type(exc)(f"map {first.name!r}: {exc}") from exc

    for j in range(1, len(fmaps)):
        if not state:
            break
        phi = fmaps[j]
        grown = DeltaSet(fmaps[:j + 1])
        cf = constant_field(seen)
        nstate = []
        for k, g in enumerate(state):
            try:
                ext = extend_certificate(g.certificate, phi, config)
                if ext is None:
                    continue
                rs = substitute_and_extract(g, ext, fmats[phi.name], cf)
                solved = _solve_reduced(rs, j, frame, config)
            except (FactorizationIncomplete, DegreeBoundExceeded,
                    UnsupportedSingularity) as exc:
                raise type(exc)(
                    f"map {phi.name!r}, group {k + 1} of {len(state)}: "
                    f"{exc}") from exc
            for gval, G in solved:
                V = _independent_columns(g.vectors @ G)
                if V.cols != G.cols:
                    raise InternalInconsistency(
                        "group columns collapsed under extension")
                values = dict(g.certificate.values)
                if phi.is_derivation:
                    values[phi.name] = ext.new_value + gval
                else:
                    values[phi.name] = ext.new_value * gval
                nstate.append(HyperexpGroup(Certificate(grown, values), V))
        state = nstate
        seen = grown

    groups = []
    for g in state:
        cert = Certificate(delta, {nm: frame.from_frame(v)
                                   for nm, v in g.certificate.values.items()})
        groups.append(HyperexpGroup(
            cert, _matrix_map(g.vectors, frame.from_frame, ctx)))
    for a in range(len(groups)):
        for b in range(a + 1, len(groups)):
            if associate_witness(delta, groups[a].certificate.values,
                                 groups[b].certificate.values,
                                 config) is not None:
                raise InternalInconsistency(
                    "assembled groups are associate-equivalent")
    for g in groups:
        if not verify_group(sys, g).passed:
            raise InternalInconsistency(
                "an assembled group fails verification")
    groups.sort(key=_sort_key([m.name for m in delta]))
    return Representation(groups)

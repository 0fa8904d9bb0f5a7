"""Scalar solvers: hypergeometric solutions of shift recurrences, exponential
solutions of differential operators, rational solutions of scalar and matrix
first-order equations, and the staged additive/multiplicative solvers that
decide certificate equations map by map along an adapted frame.

Conventions.  A scalar operator Σ a_j φ^j acts through a single-coordinate
map φ (one translated or derived variable); candidate searches factor
completely over Q with parameters in the coefficients, and every returned
object verifies by exact substitution.  Solution spaces are bases over the
constants of φ, in deterministic order.
"""

import weakref
from fractions import Fraction
from itertools import product

from .config import DEFAULT_CONFIG
from .delta import AUTOMORPHISM, DeltaMap, DeltaSet, adapted_frame, \
    apply_map, coeff_decompose_many, constant_field
from .errors import DegreeBoundExceeded, FactorizationIncomplete, \
    InternalInconsistency, UnsupportedDeltaStructure, UnsupportedSingularity
from .linalg import MatrixF, minimal_scalar_equation, nullspace_basis, rref, \
    solve
from .ratfunc import factor_univariate, format_ratfunc, lcm_denominator, \
    partial_fractions
from .upoly import UPoly, integer_roots, linear_roots, poly_as_upoly, \
    ratfunc_as_upoly_pair, upoly_to_ratfunc


_constants_cache = weakref.WeakKeyDictionary()


def _single_map_constants(mp):
    """Constant field of one map, cached: candidate searches decompose many
    coefficient families over the same map and the frame never changes."""
    cf = _constants_cache.get(mp)
    if cf is None:
        cf = constant_field(DeltaSet([mp]))
        _constants_cache[mp] = cf
    return cf


class ScalarOperator:
    """Σ a_j φ^j with a single-coordinate map φ and a_k ≠ 0."""

    __slots__ = ("map", "coeffs")

    def __init__(self, mp, coeffs):
        coeffs = list(coeffs)
        if not coeffs or coeffs[-1].is_zero:
            raise ValueError("leading coefficient must be nonzero")
        if len(mp.action) != 1:
            raise UnsupportedDeltaStructure(
                "scalar operators need a map acting on a single coordinate")
        self.map = mp
        self.coeffs = coeffs

    @property
    def order(self):
        return len(self.coeffs) - 1

    @property
    def var(self):
        return next(iter(self.map.action))

    @property
    def step(self):
        """Translation step (shift) or direction coefficient (derivation)."""
        return self.map.action[self.var]

    def __repr__(self):
        body = ", ".join(format_ratfunc(c) for c in self.coeffs)
        return f"ScalarOperator({self.map.name}; {body})"


class SolutionClass:
    """A certificate r = ℓφ(h) together with the rational cofactors: the
    columns of `multipliers` span the w with h·w a solution."""

    __slots__ = ("certificate", "multipliers")

    def __init__(self, certificate, multipliers):
        self.certificate = certificate
        self.multipliers = multipliers

    def multiplier_functions(self):
        """Scalar cofactors (the single row of a 1×d multiplier matrix)."""
        return [self.multipliers.entry(0, j)
                for j in range(self.multipliers.cols)]

    def __repr__(self):
        return (f"SolutionClass({format_ratfunc(self.certificate)}, "
                f"{self.multipliers.cols} multiplier(s))")


def operator_from_system(eq):
    """Monic ScalarOperator from a minimal scalar equation of a system."""
    one = eq.map.ctx.one
    return ScalarOperator(eq.map, list(eq.coeffs) + [one])


def apply_operator(L, f):
    out = f.ctx.zero
    cur = f
    for j, a in enumerate(L.coeffs):
        if not a.is_zero:
            out = out + a * cur
        if j < L.order:
            cur = apply_map(L.map, cur)
    return out


def certificate_residual(L, r, w=None):
    """L(h·w)/h for a hyperexponential h with ℓφ(h) = r; zero iff h·w is a
    solution.  `w` defaults to 1."""
    ctx = L.map.ctx
    cur = ctx.one if w is None else w
    out = ctx.zero
    for j, a in enumerate(L.coeffs):
        if not a.is_zero:
            out = out + a * cur
        if j < L.order:
            if L.map.is_automorphism:
                cur = apply_map(L.map, cur) * r
            else:
                cur = apply_map(L.map, cur) + r * cur
    return out


def twisted_operator(L, r):
    """The operator satisfied by w when z = h·w and ℓφ(h) = r."""
    ctx = L.map.ctx
    k = L.order
    if L.map.is_automorphism:
        if r.is_zero:
            raise ValueError("automorphism certificates are nonzero")
        out = []
        prod = ctx.one          # Π_{i<j} σ^i(r)
        cur = r                 # σ^j(r)
        for j, a in enumerate(L.coeffs):
            out.append(a * prod)
            if j < k:
                prod = prod * cur
                cur = apply_map(L.map, cur)
        return ScalarOperator(L.map, out)
    # derivation: (δ + r)^j = Σ_i E[j][i] δ^i
    E = [[ctx.one]]
    for _ in range(k):
        prev = E[-1]
        nxt = [ctx.zero] * (len(prev) + 1)
        for i, e in enumerate(prev):
            nxt[i] = nxt[i] + apply_map(L.map, e) + r * e
            nxt[i + 1] = nxt[i + 1] + e
        E.append(nxt)
    out = [ctx.zero] * (k + 1)
    for j, a in enumerate(L.coeffs):
        if a.is_zero:
            continue
        for i, e in enumerate(E[j]):
            out[i] = out[i] + a * e
    return ScalarOperator(L.map, out)


def _conjugate_by_rational(L, v):
    """The operator satisfied by w when z = v·w for a fixed rational v ≠ 0."""
    ctx = L.map.ctx
    k = L.order
    if L.map.is_automorphism:
        out = []
        cur = v
        for a in L.coeffs:
            out.append(a * cur)
            cur = apply_map(L.map, cur)
        return ScalarOperator(L.map, out)
    ders = [v]
    for _ in range(k):
        ders.append(apply_map(L.map, ders[-1]))
    binom = [[1]]
    for j in range(1, k + 1):
        prev = binom[-1]
        binom.append([1] + [prev[i - 1] + prev[i]
                            for i in range(1, j)] + [1])
    out = [ctx.zero] * (k + 1)
    for j, a in enumerate(L.coeffs):
        if a.is_zero:
            continue
        for i in range(j + 1):
            out[i] = out[i] + a * ders[j - i] * ctx.rational(binom[j][i])
    return ScalarOperator(L.map, out)


# ---------------------------------------------------------------------------
# cleared coefficients and degree bounds
# ---------------------------------------------------------------------------

def _as_upoly_in(f, var):
    """UPoly view of f in var; the denominator must be free of var."""
    num, den = ratfunc_as_upoly_pair(f, var)
    if den.degree() > 0:
        raise InternalInconsistency("denominator still involves the variable")
    return num.scale(den.coeffs[0].inverse())


def _cleared_upolys(coeffs, var, scale=None):
    """Common-denominator clearing; `scale` rescales a_j by scale^j, which
    normalizes a derivation c·d/dt to d/dt for the local analysis."""
    ctx = coeffs[0].ctx
    d = lcm_denominator([c for c in coeffs if not c.is_zero]).as_ratfunc()
    out = []
    for j, c in enumerate(coeffs):
        p = c * d
        if scale is not None:
            p = p * ctx.rational(scale) ** j
        out.append(_as_upoly_in(p, var))
    return out


def _falling(ctx, j):
    """d(d-1)…(d-j+1) as a UPoly in d."""
    acc = UPoly([ctx.one])
    for i in range(j):
        acc = acc * UPoly([ctx.rational(-i), ctx.one])
    return acc


def _binom_poly(ctx, t):
    """binom(d, t) as a UPoly in d."""
    fact = 1
    for i in range(2, t + 1):
        fact *= i
    return _falling(ctx, t).scale(ctx.rational(1, fact))


def _derivation_poly_bound(bu, ctx):
    """Max degree of polynomial kernel elements of Σ b_j (d/dt)^j, or None
    when there are none."""
    degs = [(p.degree(), j) for j, p in enumerate(bu) if not p.is_zero]
    rho = max(dg - j for dg, j in degs)
    chi = UPoly([])
    for dg, j in degs:
        c = bu[j].coeff(rho + j)
        if not c.is_zero:
            chi = chi + _falling(ctx, j).scale(c)
    if chi.is_zero:
        raise InternalInconsistency("empty coefficient stratum at infinity")
    best = [r for r, _ in integer_roots(chi) if r >= 0]
    return max(best) if best else None


def _shift_poly_bound(bu, s, ctx):
    """Max degree of polynomial kernel elements of Σ b_j(v)·(v → v+js), or
    None when there are none."""
    k = len(bu) - 1
    rho = max(p.degree() for p in bu if not p.is_zero)
    sf = ctx.rational(Fraction(s))
    for level in range(rho + k + 2):
        chi = UPoly([])
        for t in range(level + 1):
            inner = ctx.zero
            for j in range(k + 1):
                if bu[j].is_zero:
                    continue
                c = bu[j].coeff(rho - level + t)
                if not c.is_zero:
                    inner = inner + c * ctx.rational(j ** t)
            if not inner.is_zero:
                chi = chi + _binom_poly(ctx, t).scale(inner * sf ** t)
        if not chi.is_zero:
            if level == 0:
                return None
            best = [r for r, _ in integer_roots(chi) if r >= 0]
            return max(best) if best else None
    raise InternalInconsistency("all coefficient levels vanished")


def polynomial_solutions(L, config=DEFAULT_CONFIG):
    """Basis (over the constants of the map) of the polynomial solutions in
    the operator's variable."""
    ctx = L.map.ctx
    var = L.var
    if L.order == 0:
        return []
    if L.map.is_automorphism:
        bu = _cleared_upolys(L.coeffs, var)
        dmax = _shift_poly_bound(bu, L.step, ctx)
    else:
        bu = _cleared_upolys(L.coeffs, var, scale=L.step)
        dmax = _derivation_poly_bound(bu, ctx)
    if dmax is None:
        return []
    if dmax > config.max_degree:
        raise DegreeBoundExceeded(
            f"polynomial degree bound {dmax} exceeds the cap "
            f"{config.max_degree}")
    t = ctx.var(var)
    monomials = [t ** d for d in range(dmax + 1)]
    values = [apply_operator(L, m) for m in monomials]
    cf = _single_map_constants(L.map)
    _, rows = coeff_decompose_many(values, cf)
    constraint = MatrixF.from_rows(
        ctx, [[rows[d][s_] for d in range(len(monomials))]
              for s_ in range(len(rows[0]))])
    out = []
    for vec in nullspace_basis(constraint):
        acc = ctx.zero
        for c, m in zip(vec, monomials):
            if not c.is_zero:
                acc = acc + c * m
        out.append(acc)
    return out


# ---------------------------------------------------------------------------
# universal denominators
# ---------------------------------------------------------------------------

def _monic_in_var(p, var):
    """Monic UPoly view of a Poly factor."""
    u = poly_as_upoly(p, var)
    return u.scale(u.lead().inverse())


def _shift_match(p, q, s):
    """The integer i with q(v) = p(v + i·s) for monic UPolys, or None."""
    d = p.degree()
    if d != q.degree() or d < 1:
        return None
    ctx = p.coeffs[0].ctx
    diff = (q.coeff(d - 1) - p.coeff(d - 1)) / \
        (ctx.rational(d) * ctx.rational(Fraction(s)))
    if not diff.is_integer:
        return None
    i = int(diff.as_fraction())
    return i if p.shift_arg(ctx.rational(Fraction(s) * i)) == q else None


def _var_factors(p, var):
    """Monic var-involving irreducible factors of a polynomial RatFunc."""
    return [(_monic_in_var(fac.poly, var), fac.multiplicity)
            for fac in factor_univariate(p.num, var)]


def _shift_universal_denominator(bu, var, s, ctx, config):
    """Denominator bound for rational solutions of a shift recurrence with
    cleared coefficients bu (trailing coefficient nonzero): the gcd of the
    dispersion-length products of the two outermost coefficients, assembled
    factor by factor so the products are never formed."""
    k = len(bu) - 1
    A = bu[k].shift_arg(ctx.rational(Fraction(s) * (-k)))
    B = bu[0]
    fa = _var_factors(upoly_to_ratfunc(A, var, ctx), var)
    fb = _var_factors(upoly_to_ratfunc(B, var, ctx), var)
    orbits = []                      # (base, [(position, mult, side)])
    for side, facs in enumerate((fa, fb)):
        for p, m in facs:
            for base, members in orbits:
                i = _shift_match(base, p, s)
                if i is not None:
                    members.append((i, m, side))
                    break
            else:
                orbits.append((p, [(0, m, side)]))
    N = -1
    for _, members in orbits:
        pa = [i for i, _, side in members if side == 0]
        pb = [i for i, _, side in members if side == 1]
        N = max([N] + [a - b for a in pa for b in pb if a >= b])
    if N < 0:
        return ctx.one
    if N > config.max_dispersion:
        raise DegreeBoundExceeded(
            f"dispersion {N} exceeds the cap {config.max_dispersion}")
    den = UPoly([ctx.one])
    for base, members in orbits:
        pa = [(i, m) for i, m, side in members if side == 0]
        pb = [(i, m) for i, m, side in members if side == 1]
        spots = sorted({t for a, _ in pa for b, _ in pb
                        for t in range(max(a - N, b), min(a, b + N) + 1)})
        for t in spots:
            ma = sum(m for a, m in pa if t <= a <= t + N)
            mb = sum(m for b, m in pb if t - N <= b <= t)
            e = min(ma, mb)
            if e > 0:
                den = den * base.shift_arg(
                    ctx.rational(Fraction(s) * t)) ** e
    return upoly_to_ratfunc(den, var, ctx)


def _local_valuation(b, alpha, ctx):
    """(order of vanishing at t = alpha, trailing coefficient there)."""
    nu = 0
    cur = b
    while True:
        val = cur.eval(alpha)
        if not val.is_zero:
            return nu, val
        cur = cur.divmod(UPoly([-alpha, ctx.one]))[0]
        nu += 1


def _indicial_roots(bu, alpha, ctx, strict=False):
    """Roots (in the coefficient field) of the indicial polynomial of a
    derivation operator at t = alpha; `strict` raises when a nonlinear factor
    could hide local exponents outside the field."""
    data = []
    for j, b in enumerate(bu):
        if b.is_zero:
            continue
        nu, val = _local_valuation(b, alpha, ctx)
        data.append((j, nu, val))
    mu = min(nu - j for j, nu, _ in data)
    ind = UPoly([])
    for j, nu, val in data:
        if nu - j == mu:
            ind = ind + _falling(ctx, j).scale(val)
    if ind.is_zero:
        raise InternalInconsistency("empty indicial stratum")
    roots, nonlinear = linear_roots(ind)
    if nonlinear and strict:
        raise UnsupportedSingularity(
            "an indicial equation has roots outside the coefficient field")
    return [r for r, _ in roots]


def _singular_points(bu, var, ctx):
    """Split roots of the leading coefficient; loud when a factor of higher
    degree remains (its singular points live outside the field)."""
    lead = upoly_to_ratfunc(bu[-1], var, ctx)
    points = []
    for fac in factor_univariate(lead.num, var):
        if fac.poly.degree_in(var) > 1:
            raise FactorizationIncomplete(
                "the leading coefficient has an irreducible factor of degree "
                f"{fac.poly.degree_in(var)} in {var}; singular points outside "
                "the coefficient field are not supported")
        points.append(-_monic_in_var(fac.poly, var).coeff(0))
    return points


def _derivation_denominator(bu, var, ctx, support=None):
    """Denominator bound for rational solutions of a derivation operator:
    (t - α)^e per split singular point, e from the integer indicial roots.

    `support` (monic factors in the variable) restricts the candidate
    places: factors outside it are guaranteed pole-free and skipped, which
    tolerates apparent singularities of any degree.
    """
    den = ctx.one
    t = ctx.var(var)
    lead = upoly_to_ratfunc(bu[-1], var, ctx)
    for fac in factor_univariate(lead.num, var):
        fu = _monic_in_var(fac.poly, var)
        if support is not None and all(fu != s for s in support):
            continue
        if fac.poly.degree_in(var) > 1:
            raise FactorizationIncomplete(
                "the leading coefficient has an irreducible factor of degree "
                f"{fac.poly.degree_in(var)} in {var}; singular points outside "
                "the coefficient field are not supported")
        alpha = -fu.coeff(0)
        roots = _indicial_roots(bu, alpha, ctx)
        neg = [-int(r.as_fraction()) for r in roots
               if r.is_integer and int(r.as_fraction()) < 0]
        if neg:
            den = den * (t - alpha) ** max(neg)
    return den


def _rational_ansatz_data(L, config, support=None):
    """(denominator, numerator degree bound) covering every rational solution
    of L, or None when there are none; `support` restricts derivation-case
    denominator places."""
    ctx = L.map.ctx
    var = L.var
    coeffs = list(L.coeffs)
    if L.map.is_automorphism:
        while coeffs and coeffs[0].is_zero:
            coeffs.pop(0)
        if len(coeffs) <= 1:
            return None
        L = ScalarOperator(L.map, coeffs)
        bu = _cleared_upolys(coeffs, var)
        den = _shift_universal_denominator(bu, var, L.step, ctx, config)
    else:
        if L.order == 0:
            return None
        bu = _cleared_upolys(coeffs, var, scale=L.step)
        den = _derivation_denominator(bu, var, ctx, support)
    M = _conjugate_by_rational(L, den.inverse())
    if M.map.is_automorphism:
        dmax = _shift_poly_bound(_cleared_upolys(M.coeffs, var), M.step, ctx)
    else:
        dmax = _derivation_poly_bound(
            _cleared_upolys(M.coeffs, var, scale=M.step), ctx)
    if dmax is None:
        return None
    if dmax > config.max_degree:
        raise DegreeBoundExceeded(
            f"numerator degree bound {dmax} exceeds the cap "
            f"{config.max_degree}")
    return den, dmax


def scalar_rational_solutions(L, config=DEFAULT_CONFIG):
    """Basis over the constants of the map of the rational solutions of L."""
    data = _rational_ansatz_data(L, config)
    if data is None:
        return []
    den, _ = data
    M = _conjugate_by_rational(L, den.inverse())
    return [w / den for w in polynomial_solutions(M, config)]


# ---------------------------------------------------------------------------
# hypergeometric solutions (shift case)
# ---------------------------------------------------------------------------

def hypergeometric_solutions(L, config=DEFAULT_CONFIG):
    """All associate-inequivalent ratios r with σ(h) = r·h and L(h·w) = 0
    for some rational w ≠ 0, each with its rational cofactor space."""
    if not L.map.is_automorphism:
        raise UnsupportedDeltaStructure(
            "hypergeometric solutions need a shift operator")
    ctx = L.map.ctx
    var = L.var
    s = L.step
    mp = L.map
    coeffs = list(L.coeffs)
    while coeffs and coeffs[0].is_zero:
        coeffs.pop(0)
    if len(coeffs) <= 1:
        return []
    Ls = ScalarOperator(mp, coeffs)
    k = Ls.order
    bu = _cleared_upolys(coeffs, var)
    fa = _var_factors(upoly_to_ratfunc(bu[0], var, ctx), var)
    b_src = upoly_to_ratfunc(
        bu[k].shift_arg(ctx.rational(Fraction(s) * (-(k - 1)))), var, ctx)
    fb = _var_factors(b_src, var)
    # Only pairs in lowest terms need trying: every ratio has a
    # representative with gcd(A(v), B(v + i·s)) = 1 for all i ≥ 0, the
    # shared shifted factors moving into the polynomial part.
    clash = set()
    for ia, (p, _) in enumerate(fa):
        for ib, (q, _) in enumerate(fb):
            i = _shift_match(p, q, s)
            if i is not None and i <= 0:
                clash.add((ia, ib))

    candidates = []
    for ea in product(*[range(m + 1) for _, m in fa]):
        for eb in product(*[range(m + 1) for _, m in fb]):
            if any(ea[ia] and eb[ib] for ia, ib in clash):
                continue
            dega = sum(e * p.degree() for e, (p, _) in zip(ea, fa))
            degb = sum(e * q.degree() for e, (q, _) in zip(eb, fb))
            # The divisors are monic, so P_j = b_j·Π σ^i A·Π σ^i B keeps
            # b_j's leading coefficient and has degree
            # deg b_j + j·deg A + (k−j)·deg B: the leading equation for
            # the constant part needs no products.
            degs = [(bu[j].degree() + j * dega + (k - j) * degb, j)
                    for j in range(k + 1) if not bu[j].is_zero]
            top = max(d for d, _ in degs)
            zpoly = UPoly([])
            for d, j in degs:
                if d == top:
                    zpoly = zpoly + UPoly([ctx.zero] * j + [bu[j].lead()])
            if zpoly.degree() < 1:
                continue
            roots, nonlinear = linear_roots(zpoly)
            if nonlinear:
                raise FactorizationIncomplete(
                    "the constant part of a candidate ratio satisfies an "
                    "equation with roots outside the coefficient field")
            P = None
            for z, _ in roots:
                if z.is_zero:
                    continue
                if P is None:
                    A = UPoly([ctx.one])
                    for e, (p, _) in zip(ea, fa):
                        if e:
                            A = A * p ** e
                    B = UPoly([ctx.one])
                    for e, (q, _) in zip(eb, fb):
                        if e:
                            B = B * q ** e
                    P = []
                    for j in range(k + 1):
                        term = bu[j]
                        for i in range(j):
                            term = term * A.shift_arg(
                                ctx.rational(Fraction(s) * i))
                        for i in range(j, k):
                            term = term * B.shift_arg(
                                ctx.rational(Fraction(s) * i))
                        P.append(term)
                Lc = ScalarOperator(
                    mp, [upoly_to_ratfunc(P[j], var, ctx) * z ** j
                         for j in range(k + 1)])
                cs = polynomial_solutions(Lc, config)
                if not cs:
                    continue
                # The full ratio is z·(A/B)·(σC/C); the σC/C part is an
                # associate shift moving the polynomial C into the
                # cofactors, so the class keeps the small representative.
                candidates.append(
                    z * (upoly_to_ratfunc(A, var, ctx)
                         / upoly_to_ratfunc(B, var, ctx)))

    candidates.sort(key=format_ratfunc)
    single = DeltaSet([mp])
    kept = []
    for r in candidates:
        if any(rational_multiplicative_solve(single, {mp.name: r / other},
                                             config) is not None
               for other in kept):
            continue
        kept.append(r)
    out = []
    for r in kept:
        ws = scalar_rational_solutions(twisted_operator(Ls, r), config)
        if not ws:
            raise InternalInconsistency(
                "a found ratio has an empty rational cofactor space")
        for w in ws:
            if not certificate_residual(Ls, r, w).is_zero:
                raise InternalInconsistency(
                    "a candidate class fails exact substitution")
        out.append(SolutionClass(r, MatrixF.from_rows(ctx, [ws])))
    return out


# ---------------------------------------------------------------------------
# exponential solutions (derivation case)
# ---------------------------------------------------------------------------

def _twist_theta(bu, g, var, ctx):
    """Cleared coefficients of Σ b_j (θ + g)^j for a polynomial g, θ = d/dt."""
    k = len(bu) - 1
    gr = upoly_to_ratfunc(g, var, ctx)
    E = [[ctx.one]]
    for _ in range(k):
        prev = E[-1]
        nxt = [ctx.zero] * (len(prev) + 1)
        for i, e in enumerate(prev):
            nxt[i] = nxt[i] + e.diff(var) + gr * e
            nxt[i + 1] = nxt[i + 1] + e
        E.append(nxt)
    out = [ctx.zero] * (k + 1)
    for j in range(k + 1):
        if bu[j].is_zero:
            continue
        bj = upoly_to_ratfunc(bu[j], var, ctx)
        for i, e in enumerate(E[j]):
            out[i] = out[i] + bj * e
    return [_as_upoly_in(c, var) for c in out]


def _infinity_stratum_roots(bu, d, ctx):
    """Field roots of Σ lc(b_j)·c^j over the stratum maximizing
    deg b_j + d·j (the leading condition for a part of degree d)."""
    degs = [(p.degree() + d * j, j) for j, p in enumerate(bu) if not p.is_zero]
    top = max(v for v, _ in degs)
    zpoly = UPoly([])
    for v, j in degs:
        if v == top:
            zpoly = zpoly + UPoly([ctx.zero] * j + [bu[j].lead()])
    if zpoly.degree() < 1:
        return []
    roots, nonlinear = linear_roots(zpoly)
    if nonlinear:
        raise UnsupportedSingularity(
            "the leading equation at infinity has roots outside the "
            "coefficient field")
    return [r for r, _ in roots]


def _polynomial_parts(bu, d, var, ctx):
    """All polynomial log-derivative parts of degree ≤ d, by descent on the
    leading behavior at infinity."""
    if d == 0:
        return list(_infinity_stratum_roots(bu, 0, ctx))
    out = list(_polynomial_parts(bu, d - 1, var, ctx))
    t = ctx.var(var)
    for c in _infinity_stratum_roots(bu, d, ctx):
        if c.is_zero:
            continue
        twisted = _twist_theta(bu, _as_upoly_in(c * t ** d, var), var, ctx)
        for tail in _polynomial_parts(twisted, d - 1, var, ctx):
            out.append(c * t ** d + tail)
    return out


def _twist_rational(bu, u, var, ctx):
    """Cleared coefficients of the conjugation θ ↦ θ + u of Σ bu_j·θ^j,
    for rational u (the operator annihilating w whenever the original
    annihilates h·w with θ(h) = u·h)."""
    n = len(bu) - 1
    rows = [[ctx.one]]          # (θ+u)^j written in powers of θ
    for j in range(1, n + 1):
        prev = rows[-1]
        cur = [ctx.zero] * (j + 1)
        for i, a in enumerate(prev):
            cur[i] = cur[i] + a.diff(var) + u * a
            cur[i + 1] = cur[i + 1] + a
        rows.append(cur)
    coeffs = [ctx.zero] * (n + 1)
    for j, b in enumerate(bu):
        if b.is_zero:
            continue
        brf = upoly_to_ratfunc(b, var, ctx)
        for i, a in enumerate(rows[j]):
            coeffs[i] = coeffs[i] + brf * a
    return _cleared_upolys(coeffs, var)


def _pole_order_bound(bu, alpha, ctx):
    """Largest integer pole order a rational certificate part can take at
    t = alpha: the valuation drop per operator order over coefficient
    pairs."""
    vals = []
    for j, b in enumerate(bu):
        if not b.is_zero:
            vals.append((_local_valuation(b, alpha, ctx)[0], j))
    d = 1
    for nu1, j1 in vals:
        for nu2, j2 in vals:
            if j2 > j1:
                slope, rem = divmod(nu2 - nu1, j2 - j1)
                if rem == 0:
                    d = max(d, slope)
    return d


def _finite_stratum_roots(bu, alpha, d, ctx):
    """Field roots of Σ tc(b_j)·c^j over the stratum minimizing
    val(b_j) − d·j (the leading condition for a pole part of order d ≥ 2)."""
    data = []
    for j, b in enumerate(bu):
        if not b.is_zero:
            nu, val = _local_valuation(b, alpha, ctx)
            data.append((j, nu, val))
    mu = min(nu - d * j for j, nu, _ in data)
    zpoly = UPoly([])
    for j, nu, val in data:
        if nu - d * j == mu:
            zpoly = zpoly + UPoly([ctx.zero] * j + [val])
    if zpoly.degree() < 1:
        return []
    roots, nonlinear = linear_roots(zpoly)
    if nonlinear:
        raise UnsupportedSingularity(
            f"the leading equation of a pole part of order {d} has roots "
            "outside the coefficient field")
    return [r for r, _ in roots]


def _pole_parts(bu, alpha, d, var, ctx):
    """All certificate parts at t = alpha with pole order ≤ d, by descent on
    the leading local behavior; the order-one layer carries the indicial
    roots of the (twisted) operator as residues."""
    t = ctx.var(var)
    if d <= 1:
        return [e / (t - alpha)
                for e in _indicial_roots(bu, alpha, ctx, strict=True)]
    out = list(_pole_parts(bu, alpha, d - 1, var, ctx))
    for c in _finite_stratum_roots(bu, alpha, d, ctx):
        if c.is_zero:
            continue
        head = c / (t - alpha) ** d
        twisted = _twist_rational(bu, head, var, ctx)
        for tail in _pole_parts(twisted, alpha, d - 1, var, ctx):
            out.append(head + tail)
    return out


def exponential_solutions(L, config=DEFAULT_CONFIG):
    """All first-order classes u with δ(h) = u·h and L(h·P) = 0 for a
    polynomial cofactor P.  One class per local-part/infinity-part
    combination (no associate merging), each with the cofactors that do not
    vanish at a singular point."""
    if not L.map.is_derivation:
        raise UnsupportedDeltaStructure(
            "exponential solutions need a derivation operator")
    ctx = L.map.ctx
    var = L.var
    if L.order == 0:
        return []
    scale = ctx.rational(Fraction(L.step))
    bu = _cleared_upolys(L.coeffs, var, scale=L.step)

    points = _singular_points(bu, var, ctx)
    parts_by_point = []
    for alpha in points:
        parts = _pole_parts(bu, alpha, _pole_order_bound(bu, alpha, ctx),
                            var, ctx)
        if not parts:
            return []
        parts_by_point.append(parts)

    dstart = 0
    degs = [(p.degree(), j) for j, p in enumerate(bu) if not p.is_zero]
    for dg1, j1 in degs:
        for dg2, j2 in degs:
            if j2 > j1:
                slope, rem = divmod(dg1 - dg2, j2 - j1)
                if rem == 0:
                    dstart = max(dstart, slope)
    if dstart > config.max_poly_part:
        raise DegreeBoundExceeded(
            f"polynomial part degree {dstart} exceeds the cap "
            f"{config.max_poly_part}")
    qs = {format_ratfunc(q): q
          for q in _polynomial_parts(bu, dstart, var, ctx)}

    classes = []
    for _, q in sorted(qs.items()):
        for combo in product(*parts_by_point):
            u_theta = q
            for part in combo:
                u_theta = u_theta + part
            u = scale * u_theta
            W = polynomial_solutions(twisted_operator(L, u), config)
            if not W:
                continue
            reps = _complement_at_points(W, points, var, ctx)
            if not reps:
                continue
            for w in reps:
                if not certificate_residual(L, u, w).is_zero:
                    raise InternalInconsistency(
                        "exponential class fails exact substitution")
            classes.append(SolutionClass(u, MatrixF.from_rows(ctx, [reps])))
    classes.sort(key=lambda c: format_ratfunc(c.certificate))
    return classes


def _complement_at_points(W, points, var, ctx):
    """Representatives of W modulo the cofactors vanishing at a singular
    point (those belong to the class with the bumped local exponent)."""
    if not points:
        return W
    gens = []
    for alpha in points:
        vals = MatrixF.from_rows(ctx, [[w.subs({var: alpha}) for w in W]])
        gens.extend(nullspace_basis(vals))
    if not gens:
        return W
    _, pivots = rref(MatrixF.from_rows(ctx, gens))
    return [w for i, w in enumerate(W) if i not in pivots]


# ---------------------------------------------------------------------------
# rational solutions of first-order systems
# ---------------------------------------------------------------------------

def rational_solutions_matrix(B, mp, config=DEFAULT_CONFIG):
    """Basis, as matrix columns over the constants of the map, of the
    rational solution vectors of φ(Z) = B·Z."""
    ctx = B.ctx
    if len(mp.action) != 1:
        raise UnsupportedDeltaStructure(
            "matrix rational solutions need a single-coordinate map")
    n = B.rows
    var = next(iter(mp.action))
    t = ctx.var(var)
    support = None
    if mp.is_derivation:
        # coordinates of solutions only acquire poles at poles of B itself;
        # apparent singularities of the eliminated scalar equations are not
        # places of the system
        support = []
        for e in B.data:
            if e.is_zero:
                continue
            for fac in factor_univariate(e.den, var):
                fu = _monic_in_var(fac.poly, var)
                if fu.degree() >= 1 and all(fu != s for s in support):
                    support.append(fu)
    ansatz = []                 # (coordinate, basis function)
    for i in range(n):
        L = operator_from_system(minimal_scalar_equation(B, mp, pivot=i))
        data = _rational_ansatz_data(L, config, support)
        if data is None:
            continue
        den, dmax = data
        inv = den.inverse()
        ansatz.extend((i, t ** d * inv) for d in range(dmax + 1))
    if not ansatz:
        return MatrixF(ctx, n, 0, [])
    values = []                 # residual entries per unknown
    for i, beta in ansatz:
        moved = apply_map(mp, beta)
        col = []
        for r in range(n):
            v = -(B.entry(r, i) * beta)
            if r == i:
                v = v + moved
            col.append(v)
        values.append(col)
    cf = _single_map_constants(mp)
    rows_out = []
    for r in range(n):
        _, rows = coeff_decompose_many([col[r] for col in values], cf)
        for s_ in range(len(rows[0])):
            rows_out.append([rows[u][s_] for u in range(len(ansatz))])
    cols = []
    for vec in nullspace_basis(MatrixF.from_rows(ctx, rows_out)):
        z = [ctx.zero] * n
        for x, (i, beta) in zip(vec, ansatz):
            if not x.is_zero:
                z[i] = z[i] + x * beta
        cols.append(z)
    if not cols:
        return MatrixF(ctx, n, 0, [])
    return MatrixF.from_rows(ctx, [[col[r] for col in cols]
                                   for r in range(n)])


# ---------------------------------------------------------------------------
# staged additive / multiplicative solvers
# ---------------------------------------------------------------------------

def _stage_plan(delta, targets):
    """Shared staging: the adapted frame, the frame form of every map, and
    the frame forms of the targets."""
    missing = [m.name for m in delta if m.name not in targets]
    if missing:
        raise ValueError(f"missing targets for maps: {missing}")
    frame = adapted_frame(list(delta), delta.ctx)
    fmaps = [frame.map_in_frame(m) for m in delta]
    fb = {m.name: frame.to_frame(targets[m.name]) for m in delta}
    return frame, fmaps, fb


def _pure_shift(var, fctx):
    return DeltaMap("stage", AUTOMORPHISM, {var: 1}, fctx)


def rational_additive_solve(delta, targets, config=DEFAULT_CONFIG):
    """One rational z with δ_i(z) = b_i and σ_j(z) − z = b_j for every map
    of the Δ-set, or None when the system has no rational solution."""
    frame, fmaps, fb = _stage_plan(delta, targets)
    fctx = frame.fctx
    total = fctx.zero
    consumed = []
    for idx, (mp, stage) in enumerate(zip(fmaps, frame.stages)):
        b = fb[mp.name]
        if consumed and b.uses(consumed):
            return None
        if stage.coord is None:
            if not b.is_zero:
                return None
            continue
        var = stage.coord
        if mp.is_derivation:
            g = _antiderivative(b, var, fctx)
        else:
            g = _antidifference(b, var, fctx)
        if g is None:
            return None
        total = total + g
        for later in fmaps[idx + 1:]:
            moved = apply_map(later, g)
            if later.is_automorphism:
                moved = moved - g
            fb[later.name] = fb[later.name] - moved
        consumed.append(var)
    z = frame.from_frame(total)
    for mp in delta:
        got = apply_map(mp, z)
        if mp.is_automorphism:
            got = got - z
        if got != targets[mp.name]:
            raise InternalInconsistency(
                f"additive witness fails for map {mp.name!r}")
    return z


def _antiderivative(b, var, ctx):
    """Rational g with dg/dt = b, or None when a pole forces a logarithm."""
    if b.is_zero:
        return ctx.zero
    pf = partial_fractions(b, var)
    total = ctx.zero
    if not pf.poly_part.is_zero:
        poly = _as_upoly_in(pf.poly_part, var)
        integ = UPoly([ctx.zero] + [c * ctx.rational(1, i + 1)
                                    for i, c in enumerate(poly.coeffs)])
        total = upoly_to_ratfunc(integ, var, ctx)
    by_factor = {}
    for fac, order, num in pf.parts:
        key = format_ratfunc(fac.as_ratfunc())
        by_factor.setdefault(key, (fac, []))[1].append((order, num))
    for fac, pieces in by_factor.values():
        fu = poly_as_upoly(fac, var)
        unit = fu.lead()
        p = fu.scale(unit.inverse())
        pr = upoly_to_ratfunc(p, var, ctx)
        M = max(order for order, _ in pieces)
        A = UPoly([])
        for order, num in pieces:
            digit = _as_upoly_in(num * unit ** (-order), var)
            A = A + digit * p ** (M - order)
        dp = p.derivative()
        g, inv, _ = dp.xgcd(p)
        if g.degree() != 0:
            raise InternalInconsistency("inseparable denominator factor")
        inv = inv.scale(g.coeff(0).inverse())
        for m in range(M, 1, -1):
            w = (A.divmod(p)[1] * inv).divmod(p)[1].scale(
                ctx.rational(-1, m - 1))
            total = total + upoly_to_ratfunc(w, var, ctx) / pr ** (m - 1)
            num_next = A - p * w.derivative() + \
                dp.scale(ctx.rational(m - 1)) * w
            q, rem = num_next.divmod(p)
            if not rem.is_zero:
                raise InternalInconsistency("pole-order reduction failed")
            A = q
        if not A.is_zero:
            return None
    return total


def _orbit_groups(entries, ctx):
    """Group (monic factor, payload) pairs into unit-shift orbits; positions
    are relative to the first member seen."""
    groups = []
    for p, payload in entries:
        for grp in groups:
            i = _shift_match(grp["base"], p, 1)
            if i is not None:
                grp["members"].setdefault(i, []).append(payload)
                break
        else:
            groups.append({"base": p, "members": {0: [payload]}})
    return groups


def _antidifference(b, var, ctx):
    """Rational g with g(t+1) − g(t) = b, or None."""
    if b.is_zero:
        return ctx.zero
    mp = _pure_shift(var, ctx)
    pf = partial_fractions(b, var)
    t = ctx.var(var)
    basis = []
    if not pf.poly_part.is_zero:
        dp = _as_upoly_in(pf.poly_part, var).degree()
        basis.extend(t ** (d + 1) for d in range(dp + 1))
    entries = [(_monic_in_var(fac, var), (order, num))
               for fac, order, num in pf.parts]
    for grp in _orbit_groups(entries, ctx):
        positions = sorted(grp["members"])
        lo, hi = positions[0], positions[-1]
        if hi == lo:
            return None
        nu = max(order for pos in positions
                 for order, _ in grp["members"][pos])
        degp = grp["base"].degree()
        for i in range(lo, hi):
            pi = upoly_to_ratfunc(grp["base"].shift_arg(ctx.rational(i)),
                                  var, ctx)
            basis.extend(t ** e / pi ** m
                         for m in range(1, nu + 1) for e in range(degp))
    if not basis:
        return None
    images = [apply_map(mp, beta) - beta for beta in basis]
    cf = _single_map_constants(mp)
    _, rows = coeff_decompose_many(images + [b], cf)
    width = len(rows[0])
    M = MatrixF.from_rows(ctx, [[rows[u][s_] for u in range(len(images))]
                                for s_ in range(width)])
    x = solve(M, [rows[len(images)][s_] for s_ in range(width)])
    if x is None:
        return None
    g = ctx.zero
    for c, beta in zip(x, basis):
        if not c.is_zero:
            g = g + c * beta
    return g


def rational_multiplicative_solve(delta, targets, config=DEFAULT_CONFIG):
    """One rational z ≠ 0 with φ_j(z) = b_j·z for every map of the Δ-set,
    or None.  Derivation targets are log-derivatives (may be zero);
    automorphism targets must be nonzero."""
    frame, fmaps, fb = _stage_plan(delta, targets)
    fctx = frame.fctx
    for mp in fmaps:
        if mp.is_automorphism and fb[mp.name].is_zero:
            return None
    total = fctx.one
    consumed = []
    for idx, (mp, stage) in enumerate(zip(fmaps, frame.stages)):
        b = fb[mp.name]
        if consumed and b.uses(consumed):
            return None
        if stage.coord is None:
            ok = b.is_one if mp.is_automorphism else b.is_zero
            if not ok:
                return None
            continue
        var = stage.coord
        if mp.is_derivation:
            R = _log_derivative_part(b, var, fctx)
        else:
            R = _ratio_part(b, var, fctx, config)
        if R is None:
            return None
        total = total * R
        for later in fmaps[idx + 1:]:
            moved = apply_map(later, R)
            if later.is_automorphism:
                fb[later.name] = fb[later.name] * R / moved
            else:
                fb[later.name] = fb[later.name] - moved / R
        consumed.append(var)
    z = frame.from_frame(total)
    for mp in delta:
        if apply_map(mp, z) != targets[mp.name] * z:
            raise InternalInconsistency(
                f"multiplicative witness fails for map {mp.name!r}")
    return z


def _log_derivative_part(b, var, ctx):
    """Rational R with (dR/dt)/R = b, or None; b must be proper with a
    squarefree denominator and integer residues."""
    if b.is_zero:
        return ctx.one
    pf = partial_fractions(b, var)
    if not pf.poly_part.is_zero:
        return None
    R = ctx.one
    for fac, order, num in pf.parts:
        if order != 1:
            return None
        nu = _as_upoly_in(num, var)
        dfac = poly_as_upoly(fac, var).derivative()
        if nu.degree() != dfac.degree():
            return None
        m = nu.lead() / dfac.lead()
        if not m.is_integer or nu != dfac.scale(m):
            return None
        R = R * fac.as_ratfunc() ** int(m.as_fraction())
    if b != R.diff(var) / R:
        raise InternalInconsistency("log-derivative reconstruction failed")
    return R


def _ratio_part(b, var, ctx, config):
    """Rational R with R(t+1)/R(t) = b, or None; the orbit valuations of b
    must telescope to zero and the leftover unit must be exactly one."""
    entries = [(_monic_in_var(fac.poly, var), fac.multiplicity)
               for fac in factor_univariate(b.num, var)]
    entries += [(_monic_in_var(fac.poly, var), -fac.multiplicity)
                for fac in factor_univariate(b.den, var)]
    R = ctx.one
    for grp in _orbit_groups(entries, ctx):
        vals = {pos: sum(payloads) for pos, payloads in grp["members"].items()}
        imax, imin = max(vals), min(vals)
        if imax - imin > config.max_dispersion:
            raise DegreeBoundExceeded(
                f"orbit span {imax - imin} exceeds the cap "
                f"{config.max_dispersion}")
        m = 0
        for i in range(imax, imin - 1, -1):
            m += vals.get(i, 0)
            if i > imin and m:
                pi = upoly_to_ratfunc(
                    grp["base"].shift_arg(ctx.rational(i - 1)), var, ctx)
                R = R * pi ** m
        if m != 0:
            return None
    unit = b * R / apply_map(_pure_shift(var, ctx), R)
    if not unit.is_one:
        return None
    return R


def certificate_reduction(r, mp, config=DEFAULT_CONFIG):
    """Associate-canonical form of a class certificate value: (reduced, p)
    with r = reduced + φ(p)/p (derivation) resp. r = reduced·φ(p)/p
    (automorphism), stripping every part a rational cofactor can absorb.

    A derivation sheds simple poles with integer residues; a unit shift
    telescopes each factor orbit onto its lowest position.  What remains
    identifies the class: two values reduce to associates of the same shape
    instead of carrying cofactor debris from pivot elimination.
    """
    ctx = r.ctx
    if len(mp.action) != 1:
        raise UnsupportedDeltaStructure(
            "certificate reduction needs a single-coordinate map")
    var = next(iter(mp.action))
    if mp.is_automorphism:
        if mp.action[var] != 1 or r.is_zero:
            return r, ctx.one
        entries = [(_monic_in_var(fac.poly, var), fac.multiplicity)
                   for fac in factor_univariate(r.num, var)]
        entries += [(_monic_in_var(fac.poly, var), -fac.multiplicity)
                    for fac in factor_univariate(r.den, var)]
        p = ctx.one
        for grp in _orbit_groups(entries, ctx):
            vals = {pos: sum(payloads) for pos, payloads in grp["members"].items()}
            imax, imin = max(vals), min(vals)
            if imax - imin > config.max_dispersion:
                raise DegreeBoundExceeded(
                    f"orbit span {imax - imin} exceeds the cap "
                    f"{config.max_dispersion}")
            m = 0
            for i in range(imax, imin, -1):
                m += vals.get(i, 0)
                if m:
                    pi = upoly_to_ratfunc(
                        grp["base"].shift_arg(ctx.rational(i - 1)), var, ctx)
                    p = p * pi ** m
        reduced = r * p / apply_map(mp, p)
    else:
        pf = partial_fractions(r, var)
        p = ctx.one
        for fac, order, num in pf.parts:
            if order != 1:
                continue
            dfac = apply_map(mp, fac.as_ratfunc())
            m = num / dfac
            if m.is_integer:
                p = p * fac.as_ratfunc() ** int(m.as_fraction())
        reduced = r - apply_map(mp, p) / p
    if p.is_one:
        return r, p
    return reduced, p


def associate_witness(delta, cert1, cert2, config=DEFAULT_CONFIG):
    """A rational r with h1 = r·h2 for hyperexponential h1, h2 carrying the
    given certificates (dicts by map name), or None when the classes differ."""
    targets = {}
    for mp in delta:
        a, b = cert1[mp.name], cert2[mp.name]
        if mp.is_automorphism:
            if a.is_zero or b.is_zero:
                raise ValueError("automorphism certificates are nonzero")
            targets[mp.name] = a / b
        else:
            targets[mp.name] = a - b
    return rational_multiplicative_solve(delta, targets, config)


# ---------------------------------------------------------------------------
# constant-action systems (eigenproblem)
# ---------------------------------------------------------------------------

def solve_constant_action(P, mp, config=DEFAULT_CONFIG):
    """Hyperexponential classes of φ(W) = P·W when φ fixes every entry of P:
    the field eigenvalues of P with their eigenspaces as multiplier columns."""
    ctx = P.ctx
    n = P.rows
    cs = [ctx.one]              # characteristic coefficients, trace recursion
    Mk = MatrixF.identity(ctx, n)
    for kk in range(1, n + 1):
        PM = P @ Mk
        tr = ctx.zero
        for i in range(n):
            tr = tr + PM.entry(i, i)
        ck = tr * ctx.rational(-1, kk)
        cs.append(ck)
        Mk = PM + MatrixF.identity(ctx, n).scale(ck)
    char = UPoly(list(reversed(cs)))
    roots, nonlinear = linear_roots(char)
    if nonlinear:
        raise FactorizationIncomplete(
            "the characteristic polynomial of a constant-action system has "
            "roots outside the field")
    out = []
    for lam, _ in roots:
        if mp.is_automorphism and lam.is_zero:
            continue
        vecs = nullspace_basis(P - MatrixF.identity(ctx, n).scale(lam))
        if not vecs:
            raise InternalInconsistency("eigenvalue without eigenvector")
        out.append(SolutionClass(
            lam, MatrixF.from_rows(ctx, [[v[i] for v in vecs]
                                         for i in range(n)])))
    out.sort(key=lambda c: format_ratfunc(c.certificate))
    return out

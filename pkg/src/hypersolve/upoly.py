"""Dense univariate polynomials over the rational-function field.

The scalar solvers constantly view elements of F as univariate polynomials in
one distinguished variable with coefficients in the remaining ones.  UPoly is
that view: a dense coefficient list of RatFuncs with a formal indeterminate
(the variable name only matters at the conversion boundary).  Coefficient
arithmetic is exact field arithmetic, so division, gcd and extended gcd are
all available.
"""

from .errors import DivisionByZero
from .ratfunc import Poly, RatFunc, lcm_denominator


class UPoly:
    """coeffs[i] is the coefficient of the i-th power; no trailing zeros."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = list(coeffs)
        while coeffs and coeffs[-1].is_zero:
            coeffs.pop()
        self.coeffs = coeffs

    # -- basics --------------------------------------------------------------

    @property
    def is_zero(self):
        return not self.coeffs

    def degree(self):
        """Degree, with degree(0) = -1."""
        return len(self.coeffs) - 1

    def lead(self):
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, i):
        """Coefficient of the i-th power (zero when out of range)."""
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        ctx = self.coeffs[0].ctx if self.coeffs else None
        if ctx is None:
            raise ValueError("coeff() on the zero polynomial needs a context")
        return ctx.zero

    def __eq__(self, other):
        return isinstance(other, UPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(self.coeffs))

    def __repr__(self):
        return f"UPoly({[repr(c) for c in self.coeffs]})"

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        out = []
        for i in range(n):
            a = self.coeffs[i] if i < len(self.coeffs) else None
            b = other.coeffs[i] if i < len(other.coeffs) else None
            if a is None:
                out.append(b)
            elif b is None:
                out.append(a)
            else:
                out.append(a + b)
        return UPoly(out)

    def __neg__(self):
        return UPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if self.is_zero or other.is_zero:
            return UPoly([])
        zero = self.coeffs[0].ctx.zero
        out = [zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero:
                continue
            for j, b in enumerate(other.coeffs):
                if not b.is_zero:
                    out[i + j] = out[i + j] + a * b
        return UPoly(out)

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = None
        base = self
        while True:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if not k:
                break
            base = base * base
        if result is None:
            if self.is_zero:
                raise ValueError("0**0 of unknown context")
            return UPoly([self.coeffs[0].ctx.one])
        return result

    def scale(self, c):
        return UPoly([a * c for a in self.coeffs])

    def shift_up(self, k):
        """Multiply by the k-th power of the indeterminate."""
        if self.is_zero:
            return self
        zero = self.coeffs[0].ctx.zero
        return UPoly([zero] * k + self.coeffs)

    def divmod(self, other):
        """Exact polynomial division with remainder (coefficients in a field)."""
        if other.is_zero:
            raise DivisionByZero("polynomial division by zero")
        if self.is_zero:
            return UPoly([]), UPoly([])
        lead_inv = other.lead().inverse()
        rem = list(self.coeffs)
        dq = len(self.coeffs) - len(other.coeffs)
        if dq < 0:
            return UPoly([]), self
        quo = [self.coeffs[0].ctx.zero] * (dq + 1)
        for i in range(dq, -1, -1):
            top = rem[i + other.degree()]
            if top.is_zero:
                continue
            q = top * lead_inv
            quo[i] = q
            for j, b in enumerate(other.coeffs):
                rem[i + j] = rem[i + j] - q * b
        return UPoly(quo), UPoly(rem[:other.degree()])

    def monic(self):
        if self.is_zero:
            return self
        return self.scale(self.lead().inverse())

    def gcd(self, other):
        """Monic greatest common divisor (gcd(0, 0) = 0)."""
        a, b = self, other
        while not b.is_zero:
            a, b = b, a.divmod(b)[1]
        return a.monic()

    def xgcd(self, other):
        """(g, s, t) with s*self + t*other = g, g monic (or zero)."""
        ctx = None
        for p in (self, other):
            if not p.is_zero:
                ctx = p.coeffs[0].ctx
                break
        if ctx is None:
            z = UPoly([])
            return z, z, z
        one, zero = UPoly([ctx.one]), UPoly([])
        r0, r1 = self, other
        s0, s1 = one, zero
        t0, t1 = zero, one
        while not r1.is_zero:
            q, r = r0.divmod(r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - q * s1
            t0, t1 = t1, t0 - q * t1
        if r0.is_zero:
            return r0, s0, t0
        c = r0.lead().inverse()
        return r0.scale(c), s0.scale(c), t0.scale(c)

    # -- calculus / composition ----------------------------------------------

    def derivative(self):
        """Formal derivative in the indeterminate (coefficients untouched)."""
        if self.degree() < 1:
            return UPoly([])
        ctx = self.coeffs[0].ctx
        return UPoly([self.coeffs[i] * ctx.rational(i) for i in range(1, len(self.coeffs))])

    def map_coeffs(self, fn):
        return UPoly([fn(c) for c in self.coeffs])

    def eval(self, point):
        """Horner evaluation at a RatFunc point."""
        if self.is_zero:
            return point.ctx.zero
        acc = point.ctx.zero
        for c in reversed(self.coeffs):
            acc = acc * point + c
        return acc

    def compose(self, inner):
        """Self evaluated at another UPoly (Horner)."""
        if self.is_zero:
            return UPoly([])
        acc = UPoly([])
        for c in reversed(self.coeffs):
            acc = acc * inner + UPoly([c])
        return acc

    def shift_arg(self, a):
        """p(v) -> p(v + a) for a coefficient-field element a."""
        one = a.ctx.one
        return self.compose(UPoly([a, one]))


# ---------------------------------------------------------------------------
# conversions
# ---------------------------------------------------------------------------

def poly_as_upoly(p, var):
    """View a Poly univariately in `var`; coefficients are RatFuncs free of it."""
    ctx = p.ctx
    i = ctx.var_index(var)
    buckets = {}
    for exps, c in p._p.terms():
        rest = exps[:i] + (0,) + exps[i + 1:]
        buckets.setdefault(exps[i], {})[rest] = c
    if not buckets:
        return UPoly([])
    deg = max(buckets)
    coeffs = []
    for e in range(deg + 1):
        if e in buckets:
            pe = ctx.ring.from_dict(buckets[e])
            coeffs.append(RatFunc(ctx, ctx.field(pe)))
        else:
            coeffs.append(ctx.zero)
    return UPoly(coeffs)


def ratfunc_as_upoly_pair(f, var):
    """Numerator and denominator of f as UPolys in `var`."""
    ctx = f.ctx
    return (poly_as_upoly(Poly(ctx, f._f.numer), var),
            poly_as_upoly(Poly(ctx, f._f.denom), var))


def upoly_to_ratfunc(u, var, ctx=None):
    """Collapse the univariate view back into a RatFunc."""
    if u.is_zero:
        if ctx is None:
            raise ValueError("context needed to render the zero polynomial")
        return ctx.zero
    ctx = u.coeffs[0].ctx
    v = ctx.var(var)
    acc = ctx.zero
    for c in reversed(u.coeffs):
        acc = acc * v + c
    return acc


def clear_denominators(u):
    """Scale a UPoly by the lcm of its coefficient denominators; returns the
    scaled UPoly (all coefficients polynomial) and the multiplier Poly."""
    if u.is_zero:
        raise ValueError("cannot clear denominators of the zero polynomial")
    ctx = u.coeffs[0].ctx
    d = lcm_denominator([c for c in u.coeffs if not c.is_zero])
    dm = d.as_ratfunc()
    return u.scale(dm), d


def linear_roots(u):
    """Roots of a UPoly that lie in the coefficient field.

    Clears denominators, factors completely over Q (all context variables
    included) via the internal slack indeterminate, and returns
    (roots, has_nonlinear): `roots` is a list of (root: RatFunc, multiplicity)
    for every linear factor in the indeterminate, and `has_nonlinear` reports
    whether any irreducible factor of degree >= 2 remained (such factors have
    no roots in the field and most callers simply ignore them).
    """
    from sympy import factor_list

    if u.is_zero:
        raise ValueError("the zero polynomial has every root")
    ctx = u.coeffs[0].ctx
    cleared, _ = clear_denominators(u)
    slack_idx = len(ctx.names)
    acc = ctx.ring.zero
    for i, c in enumerate(cleared.coeffs):
        if c.is_zero:
            continue
        if c._f.denom != 1:
            raise AssertionError("denominators not cleared")
        if any(m[slack_idx] for m in c._f.numer.monoms()):
            raise AssertionError("nested use of the internal indeterminate")
        acc += c._f.numer * ctx.ring.gens[slack_idx] ** i
    roots = []
    has_nonlinear = False
    _, facs = factor_list(acc.as_expr())
    for expr, mult in facs:
        pe = ctx.ring.from_expr(expr)
        degs = [m[slack_idx] for m in pe.monoms()]
        dg = max(degs)
        if dg == 0:
            continue
        if dg == 1:
            c1 = {m[:slack_idx] + (0,): c for m, c in pe.terms() if m[slack_idx] == 1}
            c0 = {m[:slack_idx] + (0,): c for m, c in pe.terms() if m[slack_idx] == 0}
            top = RatFunc(ctx, ctx.field(ctx.ring.from_dict(c1)))
            low = RatFunc(ctx, ctx.field(ctx.ring.from_dict(c0)))
            roots.append((-low / top, int(mult)))
        else:
            has_nonlinear = True
    roots.sort(key=lambda rm: _root_key(rm[0]))
    return roots, has_nonlinear


def _root_key(r):
    from .ratfunc import format_ratfunc
    return format_ratfunc(r)


def integer_roots(u):
    """The integer roots of a UPoly (subset of linear_roots)."""
    out = []
    for r, mult in linear_roots(u)[0]:
        if r.is_integer:
            out.append((int(r.as_fraction()), mult))
    return out

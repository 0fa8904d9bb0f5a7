"""Exact multivariate rational-function arithmetic.

Everything downstream computes in a fixed fraction field F = Q(v1, ..., vk)
whose variable set (including "parameters" that no map ever moves) is declared
once in a VarContext.  Poly and RatFunc are thin immutable wrappers around
sympy's sparse polynomial/fraction-field elements: sympy supplies canonical
reduced representatives (gcd removed, integer-primitive, positive denominator
leading coefficient), complete factorization over Q, and fast gmpy2-backed
coefficient arithmetic; this module fixes the public surface, the text syntax,
and the univariate conveniences (gcd, factorization, partial fractions) the
solvers rely on.

The context quietly appends one slack generator (named "$s", which the  text
syntax cannot produce) used internally for characteristic and indicial
polynomials; public values never contain it.
"""

from fractions import Fraction

from sympy import QQ, factor_list
from sympy.polys.fields import FracField

from .errors import DivisionByZero, ParseError

_SLACK = "$s"


class VarContext:
    """Declared, ordered variable universe of the session.

    `variables` are the coordinates maps may act on; `parameters` are extra
    transcendental constants (every map acts trivially on them).  Both are
    ordinary field generators; the global variable order is declaration order
    (variables first, then parameters) and drives all canonical forms.
    """

    def __init__(self, variables, parameters=()):
        variables = list(variables)
        parameters = list(parameters)
        names = variables + parameters
        if len(set(names)) != len(names):
            raise ValueError("variable/parameter names must be distinct")
        for nm in names:
            if not _valid_name(nm):
                raise ValueError(f"invalid variable name: {nm!r}")
        self.variables = tuple(variables)
        self.parameters = tuple(parameters)
        self.names = tuple(names)
        self.field = FracField(names + [_SLACK], QQ, order="lex")
        self.ring = self.field.ring
        self._index = {nm: i for i, nm in enumerate(self.names)}

    def __repr__(self):
        return f"VarContext(variables={list(self.variables)}, parameters={list(self.parameters)})"

    def is_parameter(self, name):
        return name in self.parameters

    def var_index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise ValueError(f"undeclared variable: {name!r}") from None

    # -- element constructors ------------------------------------------------

    def var(self, name):
        """The generator `name` as a RatFunc."""
        return RatFunc(self, self.field.gens[self.var_index(name)])

    def rational(self, num, den=1):
        """The constant num/den (ints or Fractions) as a RatFunc."""
        q = Fraction(num) / Fraction(den)
        return RatFunc(self, self.field(QQ(q.numerator, q.denominator)))

    @property
    def zero(self):
        return self.rational(0)

    @property
    def one(self):
        return self.rational(1)

    def slack(self):
        """Internal indeterminate for characteristic/indicial polynomials."""
        return RatFunc(self, self.field.gens[len(self.names)])

    def poly_from_terms(self, terms):
        """Poly from {exponent tuple (per declared variable): Fraction}."""
        d = {}
        for exps, c in terms.items():
            if len(exps) != len(self.names):
                raise ValueError("exponent vector length mismatch")
            c = Fraction(c)
            if c != 0:
                d[tuple(exps) + (0,)] = QQ(c.numerator, c.denominator)
        return Poly(self, self.ring.from_dict(d))

    def parse(self, text):
        """Parse the expression syntax (ints, names, + - * / ^, parens)."""
        return _Parser(self, text).parse()


def _valid_name(nm):
    if not nm or nm[0].isdigit():
        return False
    return all(ch.isalnum() or ch == "_" for ch in nm)


def _same_ctx(a, b):
    if a.ctx is not b.ctx:
        raise ValueError("mixing values from different variable contexts")


class Poly:
    """Multivariate polynomial over Q in the context's declared variables."""

    __slots__ = ("ctx", "_p")

    def __init__(self, ctx, pe):
        self.ctx = ctx
        self._p = pe

    @property
    def terms(self):
        """{exponent tuple: Fraction}, excluding zero coefficients."""
        out = {}
        for exps, c in self._p.terms():
            if exps[-1] != 0:
                raise AssertionError("internal indeterminate leaked into a public Poly")
            out[exps[:-1]] = Fraction(int(c.numerator), int(c.denominator))
        return out

    def __eq__(self, other):
        return isinstance(other, Poly) and self.ctx is other.ctx and self._p == other._p

    def __hash__(self):
        return hash((id(self.ctx), self._p))

    def __repr__(self):
        return f"Poly({format_poly(self)})"

    def __add__(self, other):
        _same_ctx(self, other)
        return Poly(self.ctx, self._p + other._p)

    def __sub__(self, other):
        _same_ctx(self, other)
        return Poly(self.ctx, self._p - other._p)

    def __neg__(self):
        return Poly(self.ctx, -self._p)

    def __mul__(self, other):
        _same_ctx(self, other)
        return Poly(self.ctx, self._p * other._p)

    @property
    def is_zero(self):
        return not self._p

    def degree_in(self, name):
        """Degree in one variable (-1 for the zero polynomial)."""
        if self.is_zero:
            return -1
        i = self.ctx.var_index(name)
        return max(m[i] for m in self._p.monoms())

    def as_ratfunc(self):
        return RatFunc(self.ctx, self.ctx.field(self._p))


class RatFunc:
    """Element of the rational-function field F, always in reduced canonical
    form (structural equality is mathematical equality)."""

    __slots__ = ("ctx", "_f")

    def __init__(self, ctx, fe):
        self.ctx = ctx
        self._f = fe

    # -- canonical numerator/denominator ------------------------------------

    @property
    def num(self):
        """Numerator Poly under the den-monic normalization."""
        return Poly(self.ctx, self._f.numer.mul_ground(QQ(1) / self._f.denom.LC))

    @property
    def den(self):
        """Denominator Poly, normalized to leading coefficient 1 under the
        global variable order."""
        return Poly(self.ctx, self._f.denom.mul_ground(QQ(1) / self._f.denom.LC))

    def __eq__(self, other):
        if isinstance(other, int):
            return self._f == other
        return isinstance(other, RatFunc) and self.ctx is other.ctx and self._f == other._f

    def __hash__(self):
        return hash((id(self.ctx), self._f))

    def __repr__(self):
        return f"RatFunc({format_ratfunc(self)})"

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        _same_ctx(self, other)
        return RatFunc(self.ctx, self._f + other._f)

    def __sub__(self, other):
        _same_ctx(self, other)
        return RatFunc(self.ctx, self._f - other._f)

    def __neg__(self):
        return RatFunc(self.ctx, -self._f)

    def __mul__(self, other):
        _same_ctx(self, other)
        return RatFunc(self.ctx, self._f * other._f)

    def __truediv__(self, other):
        _same_ctx(self, other)
        if not other._f:
            raise DivisionByZero("division by the zero rational function")
        return RatFunc(self.ctx, self._f / other._f)

    def __pow__(self, k):
        if k < 0:
            if not self._f:
                raise DivisionByZero("zero has no negative powers")
            return RatFunc(self.ctx, self._f ** k)
        return RatFunc(self.ctx, self._f ** k)

    def inverse(self):
        if not self._f:
            raise DivisionByZero("inverse of zero")
        return RatFunc(self.ctx, 1 / self._f)

    # -- predicates ----------------------------------------------------------

    @property
    def is_zero(self):
        return not self._f

    @property
    def is_one(self):
        return self._f == 1

    @property
    def is_polynomial(self):
        return self._f.denom.is_ground

    @property
    def is_rational_number(self):
        return self._f.numer.is_ground and self._f.denom.is_ground

    def as_fraction(self):
        """The value as a Fraction; requires is_rational_number."""
        if not self.is_rational_number:
            raise ValueError("not a rational number")
        if self.is_zero:
            return Fraction(0)
        n = self._f.numer.LC
        d = self._f.denom.LC
        return Fraction(int(n.numerator), int(n.denominator)) / Fraction(
            int(d.numerator), int(d.denominator))

    @property
    def is_integer(self):
        return self.is_rational_number and self.as_fraction().denominator == 1

    def uses(self, names):
        """True iff any of the given variables occurs in num or den."""
        idxs = [self.ctx.var_index(nm) for nm in names]
        for pe in (self._f.numer, self._f.denom):
            for m in pe.monoms():
                if any(m[i] for i in idxs):
                    return True
        return False

    # -- calculus / substitution --------------------------------------------

    def diff(self, name):
        """Partial derivative with respect to one declared variable."""
        g = self.ctx.field.gens[self.ctx.var_index(name)]
        return RatFunc(self.ctx, self._f.diff(g))

    def subs(self, assignment):
        """Simultaneous substitution {name: RatFunc}; exact, and refuses
        substitutions that annihilate the denominator."""
        num = _subst_poly(self.ctx, self._f.numer, assignment)
        den = _subst_poly(self.ctx, self._f.denom, assignment)
        if den.is_zero:
            raise DivisionByZero("substitution annihilates a denominator")
        return num / den


def _subst_poly(ctx, pe, assignment):
    """Substitute {name: RatFunc} into a PolyElement, exactly (RatFunc result)."""
    idx = {ctx.var_index(nm): v for nm, v in assignment.items()}
    for v in assignment.values():
        _same_ctx(ctx.one, v)
    gens = ctx.field.gens
    pow_cache = {}

    def power(i, e):
        key = (i, e)
        if key not in pow_cache:
            base = idx[i]._f if i in idx else gens[i]
            pow_cache[key] = base ** e
        return pow_cache[key]

    total = ctx.field.zero
    for exps, c in pe.terms():
        term = ctx.field(c)
        for i, e in enumerate(exps):
            if e:
                term = term * power(i, e)
        total += term
    return RatFunc(ctx, total)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

class _Parser:
    """Recursive-descent parser for the shared expression syntax.

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := ('+'|'-') factor | power
    power  := atom ('^' INT)?
    atom   := INT | NAME | '(' expr ')'
    """

    def __init__(self, ctx, text):
        self.ctx = ctx
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, msg):
        raise ParseError(msg, line=self.line, column=self.col)

    def _advance(self, n):
        for ch in self.text[self.pos:self.pos + n]:
            if ch == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        self.pos += n

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self._advance(1)

    def _peek(self):
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self):
        if not self.text.strip():
            self.error("empty expression")
        v = self.expr()
        if self._peek():
            self.error(f"unexpected character {self.text[self.pos]!r}")
        return v

    def expr(self):
        v = self.term()
        while True:
            ch = self._peek()
            if ch == "+":
                self._advance(1)
                v = v + self.term()
            elif ch == "-":
                self._advance(1)
                v = v - self.term()
            else:
                return v

    def term(self):
        v = self.factor()
        while True:
            ch = self._peek()
            if ch == "*":
                self._advance(1)
                v = v * self.factor()
            elif ch == "/":
                self._advance(1)
                line, col = self.line, self.col
                w = self.factor()
                if w.is_zero:
                    raise ParseError("division by zero", line=line, column=col)
                v = v / w
            else:
                return v

    def factor(self):
        ch = self._peek()
        if ch == "-":
            self._advance(1)
            return -self.factor()
        if ch == "+":
            self._advance(1)
            return self.factor()
        return self.power()

    def power(self):
        v = self.atom()
        if self._peek() == "^":
            self._advance(1)
            self._skip_ws()
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self._advance(1)
            if start == self.pos:
                self.error("expected a nonnegative integer exponent after '^'")
            v = v ** int(self.text[start:self.pos])
        return v

    def atom(self):
        ch = self._peek()
        if ch == "(":
            self._advance(1)
            v = self.expr()
            if self._peek() != ")":
                self.error("expected ')'")
            self._advance(1)
            return v
        if ch.isdigit():
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self._advance(1)
            return self.ctx.rational(int(self.text[start:self.pos]))
        if ch.isalpha() or ch == "_":
            start = self.pos
            line, col = self.line, self.col
            while self.pos < len(self.text) and (
                    self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
                self._advance(1)
            name = self.text[start:self.pos]
            if name not in self.ctx._index:
                raise ParseError(f"undeclared variable {name!r}", line=line, column=col)
            return self.ctx.var(name)
        if ch == "":
            self.error("unexpected end of expression")
        self.error(f"unexpected character {ch!r}")


# ---------------------------------------------------------------------------
# printing (deterministic; parse(format(f)) == f)
# ---------------------------------------------------------------------------

def _format_coeff(c):
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_mono(ctx, exps):
    parts = []
    for nm, e in zip(ctx.names, exps):
        if e == 1:
            parts.append(nm)
        elif e > 1:
            parts.append(f"{nm}^{e}")
    return "*".join(parts)


def _format_pe(ctx, pe):
    if not pe:
        return "0"
    chunks = []
    for exps, c in pe.terms():
        coeff = Fraction(int(c.numerator), int(c.denominator))
        mono = _format_mono(ctx, exps)
        mag = _format_coeff(abs(coeff))
        if mono and abs(coeff) == 1:
            body = mono
        elif mono:
            body = f"{mag}*{mono}"
        else:
            body = mag
        chunks.append(("-" if coeff < 0 else "+", body))
    sign, body = chunks[0]
    text = ("-" if sign == "-" else "") + body
    for sign, body in chunks[1:]:
        text += f" {sign} {body}"
    return text


def _is_atom_pe(ctx, pe):
    """Prints as a single token (bare integer or bare variable)."""
    terms = pe.terms()
    if len(terms) != 1:
        return False
    exps, c = terms[0]
    if any(exps):
        nonzero = [(i, e) for i, e in enumerate(exps) if e]
        return len(nonzero) == 1 and nonzero[0][1] == 1 and c == 1
    return Fraction(int(c.numerator), int(c.denominator)) > 0


def format_poly(p):
    """Deterministic text for a Poly (terms in global order)."""
    return _format_pe(p.ctx, p._p)


def format_ratfunc(f):
    """Deterministic text for a RatFunc; round-trips through parse."""
    fe = f._f
    if fe.denom == 1:
        return _format_pe(f.ctx, fe.numer)
    num = _format_pe(f.ctx, fe.numer)
    if len(fe.numer.terms()) > 1:
        num = f"({num})"
    den = _format_pe(f.ctx, fe.denom)
    if not _is_atom_pe(f.ctx, fe.denom):
        den = f"({den})"
    return f"{num}/{den}"


# ---------------------------------------------------------------------------
# univariate views: gcd, factorization, partial fractions
# ---------------------------------------------------------------------------

def _pe_gcd(a, b):
    return a.gcd(b)


def _normalize_in_var(ctx, pe, i):
    """Canonical scaling of a factor viewed in variable i: remove content in
    the other variables, then make it monic in the variable when its leading
    coefficient there is a rational number, otherwise unit-scale the global
    leading coefficient."""
    if not pe:
        return pe
    # content w.r.t. the variable: gcd of the coefficient polynomials
    coeffs = {}
    for exps, c in pe.terms():
        rest = exps[:i] + (0,) + exps[i + 1:]
        coeffs.setdefault(exps[i], {})[rest] = c
    content = None
    for _, d in coeffs.items():
        q = ctx.ring.from_dict(d)
        content = q if content is None else _pe_gcd(content, q)
    prim = pe.quo(content) if not content.is_ground else pe
    deg = max(e for e, _ in coeffs.items())
    lead = ctx.ring.from_dict({m: c for m, c in prim.terms() if m[i] == deg})
    if lead.is_ground:
        return prim.mul_ground(QQ(1) / lead.LC)
    return prim.mul_ground(QQ(1) / prim.LC)


def gcd_poly(a, b, var):
    """Greatest common divisor of two Polys viewed univariately in `var` over
    the rational functions of the remaining variables; content in the other
    variables is removed and the result is canonically scaled (monic in `var`
    whenever its leading coefficient there is rational).  gcd(p, 0) is the
    normalization of p; gcd(0, 0) = 0."""
    _same_ctx(a, b)
    ctx = a.ctx
    i = ctx.var_index(var)
    if a.is_zero and b.is_zero:
        return Poly(ctx, ctx.ring.zero)
    if a.is_zero:
        return Poly(ctx, _normalize_in_var(ctx, b._p, i))
    if b.is_zero:
        return Poly(ctx, _normalize_in_var(ctx, a._p, i))
    g = _pe_gcd(a._p, b._p)
    return Poly(ctx, _normalize_in_var(ctx, g, i))


class Factor:
    """One factor of a univariate-view factorization."""

    __slots__ = ("poly", "multiplicity", "irreducible")

    def __init__(self, poly, multiplicity, irreducible=True):
        self.poly = poly
        self.multiplicity = multiplicity
        self.irreducible = irreducible

    def __iter__(self):
        yield self.poly
        yield self.multiplicity

    def __repr__(self):
        tag = "" if self.irreducible else ", irreducible-unverified"
        return f"Factor({format_poly(self.poly)}, {self.multiplicity}{tag})"


def factor_univariate(p, var):
    """All irreducible factors of p that involve `var`, with multiplicities.

    The factorization is complete over Q (parameters included), so every
    returned Factor is certified irreducible.  Factors free of `var` count as
    units of the univariate view and are dropped; the product of the returned
    factors therefore equals p up to a unit in Q(other variables).  Factors
    are normalized as in gcd_poly and sorted deterministically.
    """
    if p.is_zero:
        raise ValueError("cannot factor the zero polynomial")
    ctx = p.ctx
    i = ctx.var_index(var)
    _, facs = factor_list(p._p.as_expr())
    out = []
    for expr, mult in facs:
        pe = ctx.ring.from_expr(expr)
        if not any(m[i] for m in pe.monoms()):
            continue
        pe = _normalize_in_var(ctx, pe, i)
        out.append(Factor(Poly(ctx, pe), int(mult)))
    out.sort(key=lambda fc: (fc.poly.degree_in(var), format_poly(fc.poly)))
    return out


class PartialFractions:
    """Result of a partial-fraction decomposition w.r.t. one variable.

    poly_part  RatFunc, polynomial in the variable
    parts      list of (factor: Poly, order: int, numerator: RatFunc); the
               numerator has degree < deg(factor) in the variable

    Recombining poly_part + sum(num / factor**order) reproduces the input.
    """

    __slots__ = ("var", "poly_part", "parts")

    def __init__(self, var, poly_part, parts):
        self.var = var
        self.poly_part = poly_part
        self.parts = parts

    def recombine(self):
        total = self.poly_part
        for fac, order, num in self.parts:
            total = total + num / fac.as_ratfunc() ** order
        return total


def partial_fractions(f, var):
    """Exact partial-fraction decomposition of f with respect to `var` over
    the rational functions of the remaining variables."""
    from .upoly import UPoly, poly_as_upoly, upoly_to_ratfunc

    ctx = f.ctx
    i = ctx.var_index(var)
    den_pe = f._f.denom
    if not any(m[i] for m in den_pe.monoms()):
        return PartialFractions(var, f, [])

    num_u = poly_as_upoly(Poly(ctx, f._f.numer), var)
    den_u = poly_as_upoly(Poly(ctx, den_pe), var)
    lc = den_u.coeffs[-1]
    num_u = num_u.scale(lc.inverse())
    den_u = den_u.scale(lc.inverse())

    q, r = num_u.divmod(den_u)
    poly_part = upoly_to_ratfunc(q, var, ctx)

    factors = factor_univariate(Poly(ctx, den_pe), var)
    monic = []
    for fac in factors:
        fu = poly_as_upoly(fac.poly, var)
        c = fu.coeffs[-1]
        monic.append((fac, fu.scale(c.inverse()), c))
    prod = UPoly([ctx.one])
    for (fac, fu, _) in monic:
        prod = prod * fu ** fac.multiplicity
    if prod != den_u:
        raise AssertionError("factor recombination mismatch")

    parts = []
    for (fac, fu, c) in monic:
        m = fac.multiplicity
        pm = fu ** m
        cofactor = den_u.divmod(pm)[0]
        _, s, _ = cofactor.xgcd(pm)
        n = (r * s).divmod(pm)[1]
        # fu-adic digits of n: n = sum digits[j] * fu^j
        digits = []
        cur = n
        for _ in range(m):
            cur, digit = cur.divmod(fu)
            digits.append(digit)
        for j, digit in enumerate(digits):
            if digit.is_zero:
                continue
            order = m - j
            # returned factor differs from the monic one by the unit c
            numerator = upoly_to_ratfunc(digit, var) * c ** order
            parts.append((fac.poly, order, numerator))
    parts.sort(key=lambda t: (t[0].degree_in(var), format_poly(t[0]), t[1]))
    return PartialFractions(var, poly_part, parts)


def lcm_denominator(fs):
    """Least common multiple of the denominators of a family of RatFuncs, as
    a Poly.  Integer content is kept (so scaling by the result really clears
    every denominator); only the sign is normalized."""
    if not fs:
        raise ValueError("empty family")
    ctx = fs[0].ctx
    acc = ctx.ring.one
    for f in fs:
        _same_ctx(fs[0], f)
        d = f._f.denom
        acc = acc.quo(_pe_gcd(acc, d)) * d
    if acc.LC < 0:
        acc = -acc
    return Poly(ctx, acc)

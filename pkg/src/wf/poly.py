"""Sparse multivariate polynomials over the supported coefficient rings.

Terms map exponent tuples to coefficients; the canonical order everywhere
is graded lexicographic, largest first.  No Groebner machinery: ideal
reduction is restricted to the two structured shapes the jet pipeline
needs, generators monic in one variable and localization relations
u*v = 1, and refuses anything else rather than guessing.
"""

from __future__ import annotations

from .errors import NotPrepared, ParseError, VariableMismatch, WfError


def term_key(exps):
    # graded lex, for descending sorts
    return (sum(exps), exps)


class MvPoly:
    __slots__ = ("ring", "vars", "terms")

    def __init__(self, ring, vars, terms, _clean=True):
        self.ring = ring
        self.vars = tuple(vars)
        if _clean:
            terms = {e: c for e, c in terms.items() if not ring.is_zero(c)}
        self.terms = terms

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, ring, vars):
        return cls(ring, vars, {}, _clean=False)

    @classmethod
    def const(cls, ring, vars, c):
        if isinstance(c, int):
            c = ring.from_int(c)
        z = (0,) * len(vars)
        return cls(ring, vars, {z: c})

    @classmethod
    def var(cls, ring, vars, name, power=1):
        vars = tuple(vars)
        if name not in vars:
            raise VariableMismatch("unknown variable %r" % (name,))
        e = tuple(power if v == name else 0 for v in vars)
        return cls(ring, vars, {e: ring.one()}, _clean=False)

    @classmethod
    def monomial(cls, ring, vars, exps, c=None):
        c = ring.one() if c is None else c
        return cls(ring, tuple(vars), {tuple(exps): c})

    # -- basics ----------------------------------------------------------

    def _check(self, other):
        if isinstance(other, int):
            return MvPoly.const(self.ring, self.vars, other)
        if not isinstance(other, MvPoly):
            # a bare coefficient
            return MvPoly.const(self.ring, self.vars, other)
        if self.vars != other.vars:
            raise VariableMismatch("operands over %r and %r" % (self.vars, other.vars))
        return other

    def is_zero(self):
        return not self.terms

    def is_const(self):
        return all(sum(e) == 0 for e in self.terms)

    def const_coeff(self):
        z = (0,) * len(self.vars)
        return self.terms.get(z, self.ring.zero())

    def total_deg(self):
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, name):
        i = self.vars.index(name)
        return max((e[i] for e in self.terms), default=0)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: term_key(t[0]), reverse=True)

    def __eq__(self, other):
        if not isinstance(other, MvPoly):
            return NotImplemented
        if self.vars != other.vars:
            return False
        if set(self.terms) != set(other.terms):
            return False
        return all(self.ring.eq(c, other.terms[e]) for e, c in self.terms.items())

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms)))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = self._check(other)
        r = self.ring
        out = dict(self.terms)
        for e, c in other.terms.items():
            if e in out:
                out[e] = r.add(out[e], c)
            else:
                out[e] = c
        return MvPoly(r, self.vars, out)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        r = self.ring
        out = dict(self.terms)
        for e, c in other.terms.items():
            if e in out:
                out[e] = r.sub(out[e], c)
            else:
                out[e] = r.neg(c)
        return MvPoly(r, self.vars, out)

    def __rsub__(self, other):
        return self._check(other) - self

    def __neg__(self):
        r = self.ring
        return MvPoly(r, self.vars, {e: r.neg(c) for e, c in self.terms.items()},
                      _clean=False)

    def __mul__(self, other):
        r = self.ring
        if isinstance(other, int):
            other = r.from_int(other)
        if not isinstance(other, MvPoly):
            # scalar multiple
            return MvPoly(r, self.vars,
                          {e: r.mul(c, other) for e, c in self.terms.items()})
        if self.vars != other.vars:
            raise VariableMismatch("operands over %r and %r" % (self.vars, other.vars))
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = r.mul(c1, c2)
                if e in out:
                    out[e] = r.add(out[e], c)
                else:
                    out[e] = c
        return MvPoly(r, self.vars, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise WfError("negative polynomial power")
        result = MvPoly.const(self.ring, self.vars, self.ring.one())
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- calculus ----------------------------------------------------------

    def partial(self, name):
        i = self.vars.index(name)
        r = self.ring
        out = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            d = list(e)
            k = d[i]
            d[i] = k - 1
            d = tuple(d)
            c2 = r.mul(c, r.from_int(k))
            if d in out:
                out[d] = r.add(out[d], c2)
            else:
                out[d] = c2
        return MvPoly(r, self.vars, out)

    def q_power_vars(self, q):
        """Substitute every variable x by x^q (exponents scale by q)."""
        return MvPoly(self.ring, self.vars,
                      {tuple(a * q for a in e): c for e, c in self.terms.items()},
                      _clean=False)

    def frob_twist(self):
        """Apply the coefficient Frobenius entrywise.

        The supported base rings all carry the identity lift (phi fixes
        Z_p and pi), so this returns an equal polynomial; it exists so the
        twist is one named step rather than an invisible assumption.
        """
        r = self.ring
        return MvPoly(r, self.vars, {e: r.frob(c) for e, c in self.terms.items()},
                      _clean=False)

    # -- substitution -------------------------------------------------------

    def subst(self, mapping, ring=None, vars=None):
        """Substitute every variable; images are MvPoly over one space.

        mapping maps variable names to MvPoly (or bare coefficients /
        ints, read as constants).  The target space is taken from the
        first MvPoly image unless (ring, vars) is given.  Any variable of
        self that actually occurs must be covered by mapping.
        """
        if ring is None or vars is None:
            for val in mapping.values():
                if isinstance(val, MvPoly):
                    ring, vars = val.ring, val.vars
                    break
            else:
                raise WfError("substitution target space is undetermined")
        vars = tuple(vars)
        images = {}
        for name, val in mapping.items():
            if isinstance(val, MvPoly):
                if val.vars != vars:
                    raise VariableMismatch("substitution images over mixed spaces")
                images[name] = val
            else:
                images[name] = MvPoly.const(ring, vars, val)
        out = MvPoly.zero(ring, vars)
        for e, c in self.sorted_terms():
            term = MvPoly.const(ring, vars, self._convert_coeff(c, ring))
            for name, k in zip(self.vars, e):
                if k == 0:
                    continue
                if name not in images:
                    raise VariableMismatch("no image for variable %r" % (name,))
                term = term * (images[name] ** k)
            out = out + term
        return out

    def _convert_coeff(self, c, ring):
        if ring is self.ring or (hasattr(ring, "same") and ring.same(self.ring)):
            return c
        raise WfError("cannot move coefficients between unrelated rings")

    def evaluate(self, point):
        """Evaluate at a dict of ring elements; returns a ring element."""
        r = self.ring
        acc = r.zero()
        for e, c in self.sorted_terms():
            val = c
            for name, k in zip(self.vars, e):
                if k == 0:
                    continue
                val = r.mul(val, r.pow(point[name], k))
            acc = r.add(acc, val)
        return acc

    def map_coeffs(self, fn, ring):
        out = {}
        for e, c in self.terms.items():
            out[e] = fn(c)
        return MvPoly(ring, self.vars, out)

    def extend_vars(self, vars):
        """Reinterpret over a superset variable tuple."""
        vars = tuple(vars)
        idx = []
        for v in self.vars:
            if v not in vars:
                raise VariableMismatch("variable %r missing from extension" % (v,))
            idx.append(vars.index(v))
        n = len(vars)
        out = {}
        for e, c in self.terms.items():
            d = [0] * n
            for i, k in zip(idx, e):
                d[i] = k
            out[tuple(d)] = c
        return MvPoly(self.ring, vars, out, _clean=False)

    def rename_vars(self, table, vars=None):
        """Rename variables through a dict; order is preserved by default."""
        new_names = tuple(table.get(v, v) for v in self.vars)
        if vars is None:
            return MvPoly(self.ring, new_names, dict(self.terms), _clean=False)
        return MvPoly(self.ring, new_names, dict(self.terms), _clean=False).extend_vars(vars)

    # -- text ---------------------------------------------------------------

    def to_text(self):
        if not self.terms:
            return "0"
        pieces = []
        for e, c in self.sorted_terms():
            mono = []
            for name, k in zip(self.vars, e):
                if k == 0:
                    continue
                mono.append(name if k == 1 else "%s^%d" % (name, k))
            ctext = _coeff_text(self.ring, c)
            if mono and ctext == "1":
                body = "*".join(mono)
            elif mono and ctext == "-1":
                body = "-%s" % ("*".join(mono),)
            elif mono:
                body = "%s*%s" % (ctext, "*".join(mono))
            else:
                body = ctext
            pieces.append(body)
        text = pieces[0]
        for piece in pieces[1:]:
            if piece.startswith("-"):
                text += " - " + piece[1:]
            else:
                text += " + " + piece
        return text

    def __repr__(self):
        return "MvPoly(%s)" % (self.to_text(),)


def _coeff_text(ring, c):
    if isinstance(c, int):
        return str(c)
    text = c.text()
    if "+" in text or ("*" in text):
        return "(%s)" % (text,)
    return text


# -- parser -----------------------------------------------------------------

_WORD_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_WORD_BODY = _WORD_START | set("0123456789")


class _Parser:
    def __init__(self, text, ring, vars):
        self.text = text
        self.ring = ring
        self.vars = tuple(vars)
        self.pos = 0

    def error(self, message):
        raise ParseError("%s at position %d" % (message, self.pos), self.pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take_int(self):
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            self.error("expected an integer")
        return int(self.text[start:self.pos])

    def take_word(self):
        self.skip()
        start = self.pos
        if self.pos >= len(self.text) or self.text[self.pos] not in _WORD_START:
            self.error("expected a name")
        while self.pos < len(self.text) and self.text[self.pos] in _WORD_BODY:
            self.pos += 1
        return self.text[start:self.pos]

    def parse(self):
        value = self.expr()
        self.skip()
        if self.pos != len(self.text):
            self.error("trailing input")
        return value

    def expr(self):
        sign = 1
        ch = self.peek()
        if ch == "+" or ch == "-":
            self.pos += 1
            sign = -1 if ch == "-" else 1
        value = self.term()
        if sign < 0:
            value = -value
        while True:
            ch = self.peek()
            if ch == "+":
                self.pos += 1
                value = value + self.term()
            elif ch == "-":
                self.pos += 1
                value = value - self.term()
            else:
                return value

    def term(self):
        value = self.factor()
        while self.peek() == "*":
            self.pos += 1
            value = value * self.factor()
        return value

    def factor(self):
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            value = self.expr()
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
        elif ch.isdigit():
            value = MvPoly.const(self.ring, self.vars, self.take_int())
        elif ch in _WORD_START:
            word = self.take_word()
            if word == "pi":
                value = MvPoly.const(self.ring, self.vars, self.ring.pi())
            elif word in self.vars:
                value = MvPoly.var(self.ring, self.vars, word)
            else:
                self.pos -= len(word)
                self.error("unknown name %r" % (word,))
        else:
            self.error("expected a factor")
        if self.peek() == "^":
            self.pos += 1
            value = value ** self.take_int()
        return value


def parse_poly(text, ring, vars):
    """Parse the term grammar: c*x1^2*x2 with integer or pi coefficients."""
    return _Parser(text, ring, vars).parse()


# -- structured ideal reduction ----------------------------------------------


class ReductionContext:
    """Normal forms modulo generators monic in one variable plus u*v = 1.

    relations: polynomials, each of which must be monic (unit constant
    leading coefficient) in some variable, all its other terms of lower
    degree in that variable.  loc_pairs: (companion, base) variable pairs
    with companion*base = 1.  Anything outside this fragment raises
    NotPrepared at construction, never a wrong answer later.

    avoid: variable names not to orient rules on when another choice
    exists.  A rule headed by an inverted variable breaks canonicity of
    the normal form (u * rhs and the struck power are distinct normal
    forms of one element), so localized presentations pass their
    inverted variables here.
    """

    __slots__ = ("ring", "vars", "monic_rules", "loc_pairs", "_loc_index")

    def __init__(self, ring, vars, relations=(), loc_pairs=(), avoid=()):
        self.ring = ring
        self.vars = tuple(vars)
        self.loc_pairs = tuple((u, v) for u, v in loc_pairs)
        for u, v in self.loc_pairs:
            if u not in self.vars or v not in self.vars:
                raise NotPrepared("localization pair outside the variable tuple")
        self._loc_index = tuple((self.vars.index(u), self.vars.index(v))
                                for u, v in self.loc_pairs)
        avoid = frozenset(avoid)
        rules = {}
        for g in relations:
            name, deg, rhs = self._classify(g, avoid)
            if name in rules:
                raise NotPrepared("two generators monic in the same variable %r" % (name,))
            rules[name] = (deg, rhs)
        self.monic_rules = rules
        self._check_acyclic()

    def _classify(self, g, avoid=frozenset()):
        if g.vars != self.vars:
            g = g.extend_vars(self.vars)
        r = self.ring
        fallback = None
        for i, name in enumerate(self.vars):
            d = max((e[i] for e in g.terms), default=0)
            if d == 0:
                continue
            # leading coefficient in this variable must be a unit constant
            lead = {e: c for e, c in g.terms.items() if e[i] == d}
            if len(lead) != 1:
                continue
            (le, lc), = lead.items()
            if sum(le) != d:
                continue  # leading term must be the bare power of the variable
            inv = _unit_inverse(r, lc)
            if inv is None:
                continue
            rest = {}
            ok = True
            for e, c in g.terms.items():
                if e == le:
                    continue
                if e[i] >= d:
                    ok = False
                    break
                rest[e] = r.neg(r.mul(c, inv))
            if ok:
                if name not in avoid:
                    return name, d, MvPoly(r, self.vars, rest)
                if fallback is None:
                    fallback = (name, d, MvPoly(r, self.vars, rest))
        if fallback is not None:
            return fallback
        raise NotPrepared("generator %s is not monic in any variable" % (g.to_text(),))

    def _check_acyclic(self):
        # a rule variable may appear in its own right-hand side at lower
        # degree, but distinct rules feeding each other are refused
        deps = {}
        for name, (_, rhs) in self.monic_rules.items():
            used = set()
            for other in self.monic_rules:
                if other != name and rhs.degree_in(other) > 0:
                    used.add(other)
            deps[name] = used
        seen = {}

        def visit(n):
            state = seen.get(n)
            if state == 1:
                raise NotPrepared("monic rewrite rules form a cycle at %r" % (n,))
            if state == 2:
                return
            seen[n] = 1
            for m in deps[n]:
                visit(m)
            seen[n] = 2

        for n in deps:
            visit(n)

    def normal_form(self, f):
        if f.vars != self.vars:
            f = f.extend_vars(self.vars)
        r = self.ring
        var_index = {name: self.vars.index(name) for name in self.monic_rules}
        out = {}
        work = list(f.terms.items())
        fuel = 200000
        while work:
            fuel -= 1
            if fuel < 0:
                raise NotPrepared("rewriting did not terminate; relations too wild")
            e, c = work.pop()
            if r.is_zero(c):
                continue
            # strike companion pairs
            struck = None
            for iu, iv in self._loc_index:
                t = min(e[iu], e[iv])
                if t:
                    struck = list(e) if struck is None else struck
                    struck[iu] -= t
                    struck[iv] -= t
            if struck is not None:
                e = tuple(struck)
            # one monic rewrite step, then requeue
            fired = False
            for name, (deg, rhs) in self.monic_rules.items():
                i = var_index[name]
                if e[i] >= deg:
                    base = list(e)
                    base[i] -= deg
                    for e2, c2 in rhs.terms.items():
                        merged = tuple(a + b for a, b in zip(base, e2))
                        work.append((merged, r.mul(c, c2)))
                    fired = True
                    break
            if fired:
                continue
            if e in out:
                out[e] = r.add(out[e], c)
            else:
                out[e] = c
        return MvPoly(r, self.vars, out)

    def is_zero_mod(self, f):
        return self.normal_form(f).is_zero()

    def monomials_up_to(self, bound):
        """NF-basis exponent tuples of total degree <= bound, graded lex
        ascending; deterministic."""
        caps = []
        for i, name in enumerate(self.vars):
            rule = self.monic_rules.get(name)
            caps.append(min(bound, rule[0] - 1) if rule else bound)
        results = []

        def rec(i, left, acc):
            if i == len(self.vars):
                results.append(tuple(acc))
                return
            for k in range(0, min(caps[i], left) + 1):
                acc.append(k)
                rec(i + 1, left - k, acc)
                acc.pop()

        rec(0, bound, [])
        keep = []
        for e in results:
            if any(e[iu] and e[iv] for iu, iv in self._loc_index):
                continue
            keep.append(e)
        keep.sort(key=term_key)
        return keep

    def invertible_vars(self):
        inv = {}
        for u, v in self.loc_pairs:
            inv[u] = v
            inv[v] = u
        return inv

    def try_invert(self, f):
        """Inverse of a unit of the shape c * monomial-in-invertible-vars.

        Returns None when f is not recognizably of that shape; callers
        treat None as 'not certified invertible'.
        """
        nf = self.normal_form(f)
        if len(nf.terms) != 1:
            return None
        (e, c), = nf.terms.items()
        cinv = _unit_inverse(self.ring, c)
        if cinv is None:
            return None
        invof = self.invertible_vars()
        exps = [0] * len(self.vars)
        for i, (name, k) in enumerate(zip(self.vars, e)):
            if k == 0:
                continue
            if name not in invof:
                return None
            exps[self.vars.index(invof[name])] = k
        return self.normal_form(MvPoly(self.ring, self.vars, {tuple(exps): cinv}))


def _unit_inverse(ring, c):
    """Inverse of a unit coefficient, or None."""
    if isinstance(c, int):
        try:
            return ring.inv(c)
        except (AttributeError, ValueError):
            if c in (1, -1):
                return ring.from_int(c)
            return None
    try:
        if c.is_unit():
            return c.inverse()
    except AttributeError:
        pass
    return None


class PolyRing:
    """Coefficient-ring adapter whose elements are MvPoly; lets the Witt
    laws run over polynomial rings (used to check the prolongation is a
    W_1 homomorphism symbolically)."""

    __slots__ = ("base", "vars", "p", "q")

    def __init__(self, base, vars):
        self.base = base
        self.vars = tuple(vars)
        self.p = base.p
        self.q = base.q

    def zero(self):
        return MvPoly.zero(self.base, self.vars)

    def one(self):
        return MvPoly.const(self.base, self.vars, self.base.one())

    def from_int(self, n):
        return MvPoly.const(self.base, self.vars, n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def pow(self, a, k):
        return a ** k

    def eq(self, a, b):
        return a == b

    def is_zero(self, a):
        return a.is_zero()

    def pi(self):
        return MvPoly.const(self.base, self.vars, self.base.pi())

    def int_div_pi(self, n):
        return MvPoly.const(self.base, self.vars, self.base.int_div_pi(n))

    def div_pi(self, a):
        return a.map_coeffs(self.base.div_pi, self.base)

    def frob(self, a):
        return a.frob_twist()

    def same(self, other):
        return (isinstance(other, PolyRing) and self.vars == other.vars
                and self.base.same(other.base))

    def __repr__(self):
        return "PolyRing(%r, %r)" % (self.base, list(self.vars))

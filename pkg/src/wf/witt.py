"""Length-two ramified Witt vectors W_1(A) = A x A.

The structure constants binom(q,j)/pi are exact integers divided by pi
before any reduction, so the same two formulas

    (a0,a1) + (b0,b1) = (a0+b0, a1+b1 - sum_j (binom(q,j)/pi) a0^(q-j) b0^j)
    (a0,a1) * (b0,b1) = (a0 b0, a1 b0^q + b1 a0^q + pi a1 b1)

define a commutative ring over any supported coefficient ring: exact
integers, Z/p^k, a truncated base ring, or polynomials over one of those.
Associativity and distributivity are polynomial identities with those
integral constants, so they hold on the nose, not just mod pi.

A pi-derivation delta on A is the same thing as a ring homomorphism
x -> (g(x), delta(x)) into W_1(B); is_pi_derivation checks that shape on
a sample, and the ghost map (a0, a0^q + pi a1) is the torsion-free oracle
for both laws.
"""

from __future__ import annotations

from math import comb

from .errors import SpecMismatch


class WittContext:
    """Coefficient ring plus q, with the law constants precomputed."""

    __slots__ = ("ring", "q", "pi", "law", "neg_const")

    def __init__(self, ring, q=None):
        self.ring = ring
        self.q = ring.q if q is None else q
        self.pi = ring.pi()
        # binom(q,j) is divisible by p for 0 < j < q, so each constant is
        # integral; int_div_pi divides the exact integer first.
        self.law = tuple(ring.int_div_pi(comb(self.q, j)) for j in range(1, self.q))
        # sum_j (binom(q,j)/pi) (-1)^j = (-1 - (-1)^q)/pi, needed for negation
        acc = ring.zero()
        for j in range(1, self.q):
            c = self.law[j - 1]
            acc = ring.add(acc, c) if j % 2 == 0 else ring.sub(acc, c)
        self.neg_const = acc

    def vec(self, a0, a1):
        r = self.ring
        if isinstance(a0, int):
            a0 = r.from_int(a0)
        if isinstance(a1, int):
            a1 = r.from_int(a1)
        return WittVec(self, a0, a1)

    def zero(self):
        return WittVec(self, self.ring.zero(), self.ring.zero())

    def one(self):
        return WittVec(self, self.ring.one(), self.ring.zero())


class WittVec:
    __slots__ = ("ctx", "a0", "a1")

    def __init__(self, ctx, a0, a1):
        self.ctx = ctx
        self.a0 = a0
        self.a1 = a1

    def _check(self, other):
        if not isinstance(other, WittVec) or other.ctx is not self.ctx:
            raise SpecMismatch("witt vectors from different contexts")

    def __add__(self, other):
        self._check(other)
        ctx = self.ctx
        r = ctx.ring
        q = ctx.q
        a0, b0 = self.a0, other.a0
        # powers a0^1..a0^(q-1) and b0^1..b0^(q-1), built incrementally
        pa = [a0]
        pb = [b0]
        for _ in range(q - 2):
            pa.append(r.mul(pa[-1], a0))
            pb.append(r.mul(pb[-1], b0))
        corr = r.zero()
        for j in range(1, q):
            corr = r.add(corr, r.mul(ctx.law[j - 1], r.mul(pa[q - j - 1], pb[j - 1])))
        return WittVec(ctx, r.add(a0, b0),
                       r.sub(r.add(self.a1, other.a1), corr))

    def __neg__(self):
        ctx = self.ctx
        r = ctx.ring
        a1 = r.add(r.neg(self.a1), r.mul(ctx.neg_const, r.pow(self.a0, ctx.q)))
        return WittVec(ctx, r.neg(self.a0), a1)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        ctx = self.ctx
        r = ctx.ring
        q = ctx.q
        a0, a1, b0, b1 = self.a0, self.a1, other.a0, other.a1
        c1 = r.add(r.add(r.mul(a1, r.pow(b0, q)), r.mul(b1, r.pow(a0, q))),
                   r.mul(ctx.pi, r.mul(a1, b1)))
        return WittVec(ctx, r.mul(a0, b0), c1)

    def __eq__(self, other):
        if not isinstance(other, WittVec):
            return NotImplemented
        self._check(other)
        r = self.ctx.ring
        return r.eq(self.a0, other.a0) and r.eq(self.a1, other.a1)

    def __hash__(self):
        return hash((self.a0, self.a1))

    def __repr__(self):
        return "WittVec(%r, %r)" % (self.a0, self.a1)


def ghost(w: WittVec):
    """Ghost coordinates (a0, a0^q + pi a1); componentwise oracle."""
    r = w.ctx.ring
    return (w.a0, r.add(r.pow(w.a0, w.ctx.q), r.mul(w.ctx.pi, w.a1)))


def hom_from_delta(ctx: WittContext, g, delta):
    """The map x -> (g(x), delta(x)) into W_1 over ctx's ring."""

    def f(x):
        return WittVec(ctx, g(x), delta(x))

    return f


def is_pi_derivation(src_ring, ctx: WittContext, g, delta, pairs):
    """Check x -> (g(x), delta(x)) is a ring hom on the given sample pairs.

    src_ring supplies the source arithmetic; pairs is an iterable of
    (x, y) source elements.  Unit and zero are always checked.
    """
    f = hom_from_delta(ctx, g, delta)
    if f(src_ring.one()) != ctx.one() or f(src_ring.zero()) != ctx.zero():
        return False
    for x, y in pairs:
        if f(src_ring.add(x, y)) != f(x) + f(y):
            return False
        if f(src_ring.mul(x, y)) != f(x) * f(y):
            return False
    return True

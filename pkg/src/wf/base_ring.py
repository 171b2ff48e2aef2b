"""Truncated ramified extensions of the p-adic integers.

The base ring is Z_p[x]/(E(x)) for a monic Eisenstein polynomial E, with
pi the class of x, truncated at pi^N.  Elements are stored on the power
basis 1, pi, ..., pi^(e-1); the coefficient of pi^i is canonical modulo
p^ceil((N-i)/e) because pi^e = p * unit.

Every element carries the precision it is known to.  Ring operations
propagate the minimum of the operand precisions; exact division by pi
drops it by one.  That ledger is the whole point: a division that would
leave less than one tracked digit raises instead of silently lying.

The coefficient Frobenius is the identity here (it fixes Z_p and sends
pi to pi); the residue Frobenius x -> x^q with q = p^frob_power is what
all higher layers twist by.
"""

from __future__ import annotations

import json

from .errors import NotDivisible, PrecisionExceeded, SpecMismatch, WfError


def _vp(n: int, p: int) -> int:
    # p-adic valuation of a nonzero integer
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class BaseRingSpec:
    """Immutable description of one truncated base ring.

    eisenstein is the coefficient list of E, lowest degree first, e.g.
    [-2, 0, 1] for x^2 - 2.  The default is x - p (the unramified case,
    pi = p).  frob_power m sets q = p^m; the ring itself always has
    residue field F_p, q only drives the twisting exponent.
    """

    __slots__ = ("p", "eisenstein", "e", "precision", "frob_power", "q",
                 "_moduli", "_unit0_inv")

    def __init__(self, p, eisenstein=None, precision=4, frob_power=1):
        if p < 2 or any(p % d == 0 for d in range(2, min(p, 1000))):
            raise WfError("p must be prime, got %r" % (p,))
        if eisenstein is None:
            eisenstein = [-p, 1]
        eisenstein = tuple(int(c) for c in eisenstein)
        if len(eisenstein) < 2 or eisenstein[-1] != 1:
            raise WfError("eisenstein polynomial must be monic of degree >= 1")
        if any(c % p != 0 for c in eisenstein[:-1]):
            raise WfError("all lower eisenstein coefficients must be divisible by p")
        if eisenstein[0] == 0 or _vp(eisenstein[0], p) != 1:
            raise WfError("eisenstein constant term must have p-valuation exactly 1")
        if precision < 2:
            raise WfError("precision must be at least 2")
        if frob_power < 1:
            raise WfError("frob_power must be at least 1")
        self.p = p
        self.eisenstein = eisenstein
        self.e = len(eisenstein) - 1
        self.precision = int(precision)
        self.frob_power = int(frob_power)
        self.q = p ** frob_power
        self._moduli = {}
        # constant term is p * unit0; cache unit0 inverses per modulus
        self._unit0_inv = {}

    def moduli(self, prec):
        """Coefficient moduli p^ceil((prec-i)/e) at a given precision."""
        cached = self._moduli.get(prec)
        if cached is None:
            e, p = self.e, self.p
            cached = tuple(
                p ** (-(-(prec - i) // e)) if prec > i else 1 for i in range(e)
            )
            self._moduli[prec] = cached
        return cached

    def _inv_unit0(self, modulus):
        inv = self._unit0_inv.get(modulus)
        if inv is None:
            u0 = (self.eisenstein[0] // self.p) % modulus
            inv = pow(u0, -1, modulus) if modulus > 1 else 0
            self._unit0_inv[modulus] = inv
        return inv

    # -- element constructors -------------------------------------------

    def elem(self, coeffs, prec=None):
        return BaseElem(self, coeffs, self.precision if prec is None else prec)

    def from_int(self, n, prec=None):
        return BaseElem(self, (n,) + (0,) * (self.e - 1),
                        self.precision if prec is None else prec)

    def zero(self, prec=None):
        return self.from_int(0, prec)

    def one(self, prec=None):
        return self.from_int(1, prec)

    def pi(self, prec=None):
        if self.e == 1:
            return self.from_int(self.p, prec)
        c = [0] * self.e
        c[1] = 1
        return self.elem(c, prec)

    # -- ring-adapter protocol (shared with IntRing / IntModRing) -------

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

    def div_pi(self, a):
        return a.div_pi()

    def base_delta(self, a):
        return a.delta()

    def frob(self, a):
        # identity: the lift fixes Z_p and sends pi to pi
        return a

    def int_div_pi(self, n):
        """n/pi for an exact integer n, carried at full precision.

        Unlike div_pi this does not spend a precision digit: the input is
        exact, so the quotient is computed at padded internal precision
        and truncated back to N.
        """
        pad = self.precision + self.e
        a = BaseElem(self, (n,) + (0,) * (self.e - 1), pad)
        return a.div_pi().reduce(self.precision - 1)

    def residue(self, a):
        return a.coeffs[0] % self.p

    def to_json(self):
        return {"p": self.p, "eisenstein": list(self.eisenstein),
                "precision": self.precision, "frob_power": self.frob_power}

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        return cls(data["p"], data.get("eisenstein"),
                   data.get("precision", 4), data.get("frob_power", 1))

    def same(self, other):
        return (self is other
                or (isinstance(other, BaseRingSpec)
                    and self.p == other.p
                    and self.eisenstein == other.eisenstein
                    and self.precision == other.precision
                    and self.frob_power == other.frob_power))

    def __repr__(self):
        return "BaseRingSpec(p=%d, eisenstein=%s, precision=%d, frob_power=%d)" % (
            self.p, list(self.eisenstein), self.precision, self.frob_power)


class BaseElem:
    """One element, canonical coefficients plus tracked precision."""

    __slots__ = ("spec", "coeffs", "prec")

    def __init__(self, spec, coeffs, prec):
        if prec < 1:
            raise PrecisionExceeded("precision fell below one tracked digit")
        self.spec = spec
        self.prec = prec
        moduli = spec._moduli.get(prec) or spec.moduli(prec)
        n = len(coeffs)
        if n == 1:
            self.coeffs = (coeffs[0] % moduli[0],)
        elif n == 2:
            self.coeffs = (coeffs[0] % moduli[0], coeffs[1] % moduli[1])
        else:
            self.coeffs = tuple(c % m for c, m in zip(coeffs, moduli))

    def _join(self, other):
        if not isinstance(other, BaseElem):
            if isinstance(other, int):
                other = self.spec.from_int(other, self.prec)
            else:
                return None
        elif not self.spec.same(other.spec):
            raise SpecMismatch("operands from different base rings")
        return other

    def __add__(self, other):
        if other.__class__ is not BaseElem or other.spec is not self.spec:
            other = self._join(other)
            if other is None:
                return NotImplemented
        prec = self.prec if self.prec <= other.prec else other.prec
        a, b = self.coeffs, other.coeffs
        n = len(a)
        if n == 1:
            return BaseElem(self.spec, (a[0] + b[0],), prec)
        if n == 2:
            return BaseElem(self.spec, (a[0] + b[0], a[1] + b[1]), prec)
        return BaseElem(self.spec, tuple(x + y for x, y in zip(a, b)), prec)

    __radd__ = __add__

    def __sub__(self, other):
        if other.__class__ is not BaseElem or other.spec is not self.spec:
            other = self._join(other)
            if other is None:
                return NotImplemented
        prec = self.prec if self.prec <= other.prec else other.prec
        a, b = self.coeffs, other.coeffs
        n = len(a)
        if n == 1:
            return BaseElem(self.spec, (a[0] - b[0],), prec)
        if n == 2:
            return BaseElem(self.spec, (a[0] - b[0], a[1] - b[1]), prec)
        return BaseElem(self.spec, tuple(x - y for x, y in zip(a, b)), prec)

    def __rsub__(self, other):
        other = self._join(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self):
        return BaseElem(self.spec, tuple(-a for a in self.coeffs), self.prec)

    def __mul__(self, other):
        if other.__class__ is not BaseElem or other.spec is not self.spec:
            other = self._join(other)
            if other is None:
                return NotImplemented
        spec = self.spec
        e = spec.e
        prec = self.prec if self.prec <= other.prec else other.prec
        if e == 1:
            return BaseElem(spec, (self.coeffs[0] * other.coeffs[0],), prec)
        a, b = self.coeffs, other.coeffs
        if e == 2:
            a0, a1 = a
            b0, b1 = b
            c2 = a1 * b1
            if c2:
                eis = spec.eisenstein
                return BaseElem(spec, (a0 * b0 - c2 * eis[0],
                                       a0 * b1 + a1 * b0 - c2 * eis[1]), prec)
            return BaseElem(spec, (a0 * b0, a0 * b1 + a1 * b0), prec)
        conv = [0] * (2 * e - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    conv[i + j] += ai * bj
        # fold degrees >= e down through pi^e = -(E - x^e)
        eis = spec.eisenstein
        for d in range(2 * e - 2, e - 1, -1):
            c = conv[d]
            if c:
                conv[d] = 0
                for i in range(e):
                    conv[d - e + i] -= c * eis[i]
        return BaseElem(spec, tuple(conv[:e]), prec)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return self.spec.one(self.prec)
        result = None
        base = self
        while True:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if not k:
                return result
            base = base * base

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.spec.from_int(other, self.prec)
        if not isinstance(other, BaseElem):
            return NotImplemented
        return (self.spec.same(other.spec) and self.prec == other.prec
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.coeffs, self.prec))

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def is_unit(self):
        return self.coeffs[0] % self.spec.p != 0

    def v_pi(self):
        """pi-adic valuation, or None for (the tracked image of) zero."""
        spec = self.spec
        best = None
        for i, c in enumerate(self.coeffs):
            if c:
                v = spec.e * _vp(c, spec.p) + i
                if best is None or v < best:
                    best = v
        return best

    def div_pi(self):
        """Exact quotient by pi; one precision digit is spent."""
        spec = self.spec
        if self.prec - 1 < 1:
            raise PrecisionExceeded("cannot divide by pi at precision 1")
        if self.is_zero():
            return spec.zero(self.prec - 1)
        if self.coeffs[0] % spec.p != 0:
            raise NotDivisible("element has pi-valuation zero")
        e, p = spec.e, spec.p
        if e == 1:
            return BaseElem(spec, (self.coeffs[0] // p,), self.prec - 1)
        # write a = sum c_i pi^i, seek d with pi*d = a:
        #   c_0 = -d_{e-1} E_0,   c_i = d_{i-1} - d_{e-1} E_i  (i >= 1)
        big = spec.moduli(self.prec)[0]
        inv_u0 = spec._inv_unit0(big)
        d_top = (-(self.coeffs[0] // p) * inv_u0) % big
        eis = spec.eisenstein
        d = [0] * e
        d[e - 1] = d_top
        for i in range(1, e):
            d[i - 1] = self.coeffs[i] + d_top * eis[i]
        return BaseElem(spec, tuple(d), self.prec - 1)

    def delta(self):
        """(phi(a) - a^q)/pi with phi the identity coefficient lift."""
        return (self - self ** self.spec.q).div_pi()

    def reduce(self, n):
        """Image in R_n = R/pi^(n+1)."""
        if n + 1 > self.prec:
            raise PrecisionExceeded("cannot refine precision %d to %d" % (self.prec, n + 1))
        if n + 1 == self.prec:
            return self
        return BaseElem(self.spec, self.coeffs, n + 1)

    def residue(self):
        return self.coeffs[0] % self.spec.p

    def lift_prec(self, prec):
        """Reinterpret canonical coefficients at higher precision.

        Only sound for elements known exactly (e.g. freshly built from
        integers); data that went through div_pi must not be lifted.
        """
        if prec < self.prec:
            return self.reduce(prec - 1)
        return BaseElem(self.spec, self.coeffs, prec)

    def inverse(self):
        if not self.is_unit():
            raise NotDivisible("element is not a unit")
        spec = self.spec
        p = spec.p
        x = spec.from_int(pow(self.coeffs[0] % p, -1, p), self.prec)
        two = spec.from_int(2, self.prec)
        # Newton doubles correct pi-digits each round
        steps = max(1, (self.prec - 1).bit_length() + 1)
        for _ in range(steps):
            x = x * (two - self * x)
        return x

    def __repr__(self):
        return "BaseElem(%s, prec=%d)" % (self.text(), self.prec)

    def text(self):
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append("pi" if c == 1 else "%d*pi" % c)
            else:
                parts.append("pi^%d" % i if c == 1 else "%d*pi^%d" % (c, i))
        return "+".join(parts) if parts else "0"


class IntRing:
    """Exact integers viewed as a torsion-free Z_p-algebra with pi = p.

    The ghost-map oracle runs here: no truncation, every division by p is
    checked exact.
    """

    __slots__ = ("p", "frob_power", "q")

    def __init__(self, p, frob_power=1):
        self.p = p
        self.frob_power = frob_power
        self.q = p ** frob_power

    def zero(self):
        return 0

    def one(self):
        return 1

    def from_int(self, n):
        return int(n)

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
        return a == 0

    def pi(self):
        return self.p

    def div_pi(self, a):
        if a % self.p != 0:
            raise NotDivisible("%d is not divisible by %d" % (a, self.p))
        return a // self.p

    int_div_pi = div_pi

    def base_delta(self, a):
        return self.div_pi(a - a ** self.q)

    def frob(self, a):
        return a

    def residue(self, a):
        return a % self.p

    def same(self, other):
        return isinstance(other, IntRing) and self.p == other.p and self.q == other.q

    def __repr__(self):
        return "IntRing(p=%d, q=%d)" % (self.p, self.q)


class IntModRing:
    """Z/p^k with plain int elements; the k = 1 case is the residue field.

    Division by pi is refused: it is not canonical on residues.  The Witt
    structure constants are integers divided exactly *before* reduction,
    which is what int_div_pi does.
    """

    __slots__ = ("p", "k", "n", "frob_power", "q")

    def __init__(self, p, k=1, frob_power=1):
        self.p = p
        self.k = k
        self.n = p ** k
        self.frob_power = frob_power
        self.q = p ** frob_power

    def zero(self):
        return 0

    def one(self):
        return 1 % self.n

    def from_int(self, v):
        return v % self.n

    def add(self, a, b):
        return (a + b) % self.n

    def sub(self, a, b):
        return (a - b) % self.n

    def neg(self, a):
        return (-a) % self.n

    def mul(self, a, b):
        return (a * b) % self.n

    def pow(self, a, k):
        return pow(a, k, self.n)

    def eq(self, a, b):
        return a % self.n == b % self.n

    def is_zero(self, a):
        return a % self.n == 0

    def pi(self):
        return self.p % self.n

    def div_pi(self, a):
        raise NotDivisible("division by p is not canonical in Z/p^k")

    def int_div_pi(self, v):
        # v is an exact integer, divided before reduction
        if v % self.p != 0:
            raise NotDivisible("%d is not divisible by %d" % (v, self.p))
        return (v // self.p) % self.n

    def base_delta(self, a):
        raise WfError("base_delta needs a precision-tracked ring")

    def frob(self, a):
        return a

    def inv(self, a):
        return pow(a, -1, self.n)

    def residue(self, a):
        return a % self.p

    def same(self, other):
        return isinstance(other, IntModRing) and self.n == other.n and self.q == other.q

    def __repr__(self):
        return "IntModRing(%d^%d)" % (self.p, self.k)

"""Exact arithmetic for the supported coefficient rings.

Four rings are supported, all with 2 invertible:

* ``q``        -- the rationals (dimension 0),
* ``fp:<p>``   -- the prime field with p elements, p an odd prime (dimension 0),
* ``z-half``   -- integers with 2 inverted (dimension 1),
* ``zloc:<p>`` -- integers localized at an odd prime p (dimension 1).

Elements of the fraction rings are ``fractions.Fraction`` values whose
denominator satisfies the ring's shape constraint (a power of two for
``z-half``, coprime to p for ``zloc``).  Prime-field elements are plain
integers in ``[0, p)``.  All operations return canonical representatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import UnsupportedRing, ZeroElement

RATIONALS = "q"
PRIME_FIELD = "fp"
HALF_INTEGERS = "z-half"
LOCAL_INTEGERS = "zloc"

_KINDS = (RATIONALS, PRIME_FIELD, HALF_INTEGERS, LOCAL_INTEGERS)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _odd_part(n: int) -> int:
    n = abs(n)
    while n % 2 == 0:
        n //= 2
    return n


def _p_valuation(n: int, p: int) -> int:
    if n == 0:
        raise ZeroElement("valuation of zero")
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


def factor_integer(n: int) -> list[tuple[int, int]]:
    """Trial-division factorization of ``abs(n)`` into (prime, exponent) pairs."""
    n = abs(n)
    if n == 0:
        raise ZeroElement("cannot factor zero")
    out = []
    for p in (2, 3):
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            out.append((p, e))
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            if e:
                out.append((p, e))
        f += 6
    if n > 1:
        out.append((n, 1))
    return sorted(out)


@dataclass(frozen=True)
class Ring:
    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise UnsupportedRing(f"unknown ring kind {self.kind!r}")
        if self.kind in (PRIME_FIELD, LOCAL_INTEGERS):
            if self.p is None or not _is_prime(self.p):
                raise UnsupportedRing(f"{self.kind} needs a prime, got {self.p!r}")
            if self.p == 2:
                raise UnsupportedRing("2 must be invertible; p = 2 is rejected")
        elif self.p is not None:
            raise UnsupportedRing(f"{self.kind} takes no prime parameter")

    # -- descriptors -------------------------------------------------------

    @property
    def d(self) -> int:
        """Dimension parameter: 0 for fields, 1 for the localized integer rings."""
        return 0 if self.kind in (RATIONALS, PRIME_FIELD) else 1

    @property
    def descriptor(self) -> str:
        if self.kind == PRIME_FIELD:
            return f"fp:{self.p}"
        if self.kind == LOCAL_INTEGERS:
            return f"zloc:{self.p}"
        return self.kind

    def is_field(self) -> bool:
        return self.kind in (RATIONALS, PRIME_FIELD)

    def __repr__(self):
        return f"Ring({self.descriptor})"

    # -- canonical elements ------------------------------------------------

    def contains(self, x) -> bool:
        """True when x (int or Fraction) has the denominator shape of this ring."""
        if self.kind == PRIME_FIELD:
            return isinstance(x, int) and 0 <= x < self.p
        x = Fraction(x)
        if self.kind == RATIONALS:
            return True
        if self.kind == HALF_INTEGERS:
            return _odd_part(x.denominator) == 1
        return x.denominator % self.p != 0

    def el(self, x):
        """Coerce x to the canonical representative, rejecting non-members."""
        if self.kind == PRIME_FIELD:
            if isinstance(x, str):
                x = Fraction(x)
            if isinstance(x, Fraction):
                if x.denominator % self.p == 0:
                    raise UnsupportedRing(f"{x} has no image in F_{self.p}")
                return x.numerator * pow(x.denominator, -1, self.p) % self.p
            return int(x) % self.p
        x = Fraction(x)
        if not self.contains(x):
            raise UnsupportedRing(f"{x} is not an element of {self.descriptor}")
        return x

    @property
    def zero(self):
        return 0 if self.kind == PRIME_FIELD else Fraction(0)

    @property
    def one(self):
        return 1 if self.kind == PRIME_FIELD else Fraction(1)

    # -- arithmetic ----------------------------------------------------------

    def add(self, a, b):
        return (a + b) % self.p if self.kind == PRIME_FIELD else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.kind == PRIME_FIELD else a - b

    def mul(self, a, b):
        return (a * b) % self.p if self.kind == PRIME_FIELD else a * b

    def neg(self, a):
        return (-a) % self.p if self.kind == PRIME_FIELD else -a

    def is_unit(self, x) -> bool:
        if self.kind == PRIME_FIELD:
            return x % self.p != 0
        if x == 0:
            return False
        if self.kind == RATIONALS:
            return True
        if self.kind == HALF_INTEGERS:
            return _odd_part(x.numerator) == 1
        return x.numerator % self.p != 0

    def inv(self, x):
        if not self.is_unit(x):
            raise ZeroElement(f"{x} is not a unit in {self.descriptor}")
        if self.kind == PRIME_FIELD:
            return pow(x, -1, self.p)
        return 1 / Fraction(x)

    def divides(self, a, b) -> bool:
        """True when a | b, i.e. b/a lies in the ring (a nonzero)."""
        if b == self.zero:
            return True
        if a == self.zero:
            return False
        if self.kind == PRIME_FIELD:
            return True
        return self.contains(Fraction(b) / Fraction(a))

    def exact_div(self, b, a):
        """b / a, demanding divisibility in the ring."""
        if self.kind == PRIME_FIELD:
            return b * self.inv(a) % self.p
        q = Fraction(b) / Fraction(a)
        return self.el(q)

    # -- unit-normalized associates -----------------------------------------

    def canonical_factor(self, x):
        """The unit-normalized associate of x.

        Fields: 1 for nonzero x.  z-half: the positive odd part of the
        numerator.  zloc: p ** v_p(x).  Zero maps to zero.
        """
        if x == self.zero:
            return self.zero
        if self.kind == PRIME_FIELD:
            return 1
        if self.kind == RATIONALS:
            return Fraction(1)
        if self.kind == HALF_INTEGERS:
            return Fraction(_odd_part(x.numerator))
        return Fraction(self.p) ** _p_valuation(x.numerator, self.p)

    def unit_part(self, x):
        if x == self.zero:
            raise ZeroElement("zero has no unit part")
        return self.exact_div(x, self.canonical_factor(x))

    # -- serialization --------------------------------------------------------

    def format_el(self, x) -> str:
        if self.kind == PRIME_FIELD:
            return str(x)
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

    def parse_el(self, s: str):
        return self.el(Fraction(s))


def ring_make(spec: str) -> Ring:
    """Build a ring from its descriptor string: q, fp:<p>, z-half, zloc:<p>."""
    spec = spec.strip()
    if spec == RATIONALS:
        return Ring(RATIONALS)
    if spec == HALF_INTEGERS:
        return Ring(HALF_INTEGERS)
    for prefix, kind in ((f"{PRIME_FIELD}:", PRIME_FIELD), (f"{LOCAL_INTEGERS}:", LOCAL_INTEGERS)):
        if spec.startswith(prefix):
            try:
                p = int(spec[len(prefix):])
            except ValueError:
                raise UnsupportedRing(f"bad prime in descriptor {spec!r}")
            return Ring(kind, p)
    raise UnsupportedRing(f"unknown ring descriptor {spec!r}")


def valuation_and_unit(ring: Ring, x):
    """Factor a nonzero element of a localized integer ring.

    For ``zloc:p`` returns ``(e, u)`` with x = u * p**e and u a unit.  For
    ``z-half`` returns ``(factors, u)`` where factors is the (prime, exponent)
    list of the odd part and u is the leftover unit.
    """
    if ring.is_field():
        raise UnsupportedRing("valuation_and_unit needs z-half or zloc")
    x = ring.el(x)
    if x == 0:
        raise ZeroElement("valuation of zero")
    if ring.kind == LOCAL_INTEGERS:
        e = _p_valuation(x.numerator, ring.p)
        return e, ring.el(x / Fraction(ring.p) ** e)
    odd = _odd_part(x.numerator)
    factors = [] if odd == 1 else factor_integer(odd)
    return factors, ring.el(x / odd)

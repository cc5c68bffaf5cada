"""Exact arithmetic in the six imaginary quadratic fields with 2 inert.

K = Q(sqrt(D)) for D in {-3, -11, -19, -43, -67, -163}: exactly the
class-number-one imaginary quadratic fields with D = 5 mod 8, so 2 stays
prime in O_K.  Ring of integers O_K = Z[w] with w = (1+sqrt(D))/2, which
satisfies w^2 = w - c where c = (1-D)/4.  Everything here is exact integer
arithmetic on coordinates in the basis {1, w}.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import gcd, isqrt

import sympy

from .errors import InvalidModulus, NotSplit, UnsupportedField, ZeroCoefficient

SUPPORTED_DISCS = (-3, -11, -19, -43, -67, -163)


def legendre_symbol(a: int, p: int) -> int:
    """Legendre symbol (a/p) in {-1, 0, 1} for an odd prime p."""
    if p < 3 or not sympy.isprime(p):
        raise InvalidModulus(f"modulus {p} is not an odd prime")
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


@dataclass(frozen=True)
class QuadInt:
    """a + b*w with w = (1+sqrt(D))/2; cw = norm(w) = (1-D)/4 tags the ring."""

    a: int
    b: int
    cw: int

    def _coerce(self, other: "QuadInt | int") -> "QuadInt | None":
        if isinstance(other, int):
            return QuadInt(other, 0, self.cw)
        if isinstance(other, QuadInt):
            assert other.cw == self.cw, "mixed fields"
            return other
        return None

    def __add__(self, other: "QuadInt | int") -> "QuadInt":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadInt(self.a + o.a, self.b + o.b, self.cw)

    __radd__ = __add__

    def __sub__(self, other: "QuadInt | int") -> "QuadInt":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadInt(self.a - o.a, self.b - o.b, self.cw)

    def __rsub__(self, other: "QuadInt | int") -> "QuadInt":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: "QuadInt | int") -> "QuadInt":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        # (a+bw)(a'+b'w) with w^2 = w - cw
        a, b, c, d = self.a, self.b, o.a, o.b
        return QuadInt(a * c - b * d * self.cw, a * d + b * c + b * d, self.cw)

    __rmul__ = __mul__

    def __neg__(self) -> "QuadInt":
        return QuadInt(-self.a, -self.b, self.cw)

    def __pow__(self, n: int) -> "QuadInt":
        assert n >= 0
        out = QuadInt(1, 0, self.cw)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conj(self) -> "QuadInt":
        # conj(w) = 1 - w
        return QuadInt(self.a + self.b, -self.b, self.cw)

    def norm(self) -> int:
        return self.a * self.a + self.a * self.b + self.b * self.b * self.cw

    def trace(self) -> int:
        return 2 * self.a + self.b

    @property
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def is_unit(self) -> bool:
        return self.norm() == 1

    def divide_exact(self, other: "QuadInt | int") -> "QuadInt":
        """Exact division; asserts the quotient lies in O_K."""
        o = self._coerce(other)
        assert o is not None and not o.is_zero
        n = o.norm()
        num = self * o.conj()
        assert num.a % n == 0 and num.b % n == 0, f"{self} not divisible by {o}"
        return QuadInt(num.a // n, num.b // n, self.cw)

    def divisible_by(self, other: "QuadInt | int") -> bool:
        o = self._coerce(other)
        n = o.norm()
        num = self * o.conj()
        return num.a % n == 0 and num.b % n == 0

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        bpart = "w" if self.b == 1 else ("-w" if self.b == -1 else f"{self.b}*w")
        if self.a == 0:
            return bpart
        sign = "+" if self.b > 0 else ""
        return f"{self.a}{sign}{bpart}"


class PlaceKind(Enum):
    INERT = "inert"
    SPLIT = "split"
    RAMIFIED = "ramified"
    TWO_ADIC = "two-adic"


@dataclass(frozen=True)
class FieldCtx:
    """Immutable context for one of the six supported fields.

    seed is the 2-adic square root u of -D/3 with u = 1 mod 4, stored mod 64:
    enough precision that w -> (1+u)/2 + u*zeta3 is well defined mod 32 in the
    2-adic model Z_2[zeta3].
    """

    D: int
    omega_norm: int
    seed: int

    def of(self, x: "QuadInt | int") -> QuadInt:
        if isinstance(x, QuadInt):
            assert x.cw == self.omega_norm
            return x
        return QuadInt(x, 0, self.omega_norm)

    def omega(self) -> QuadInt:
        return QuadInt(0, 1, self.omega_norm)

    def sqrt_disc(self) -> QuadInt:
        # sqrt(D) = 2w - 1
        return QuadInt(-1, 2, self.omega_norm)

    def units(self) -> tuple[QuadInt, ...]:
        one = QuadInt(1, 0, self.omega_norm)
        if self.D == -3:
            # w = zeta6 generates the unit group of Z[zeta3]
            w = self.omega()
            us = [one]
            for _ in range(5):
                us.append(us[-1] * w)
            return tuple(us)
        return (one, -one)


def make_field(D: int) -> FieldCtx:
    if D not in SUPPORTED_DISCS:
        raise UnsupportedField(
            f"D={D} unsupported; need D in {SUPPORTED_DISCS} (2 inert, class number 1)"
        )
    c = (1 - D) // 4
    # u^2 = -D/3 in Z_2; solving mod 2^8 pins u mod 64 once we fix u = 1 mod 4.
    target = (-D * pow(3, -1, 256)) % 256
    roots = [r for r in sympy.ntheory.sqrt_mod(target, 256, all_roots=True) if r % 4 == 1]
    assert roots and all(r % 64 == roots[0] % 64 for r in roots)
    return FieldCtx(D=D, omega_norm=c, seed=roots[0] % 64)


def element_invariants(x: QuadInt, F: FieldCtx) -> tuple[int, int, QuadInt]:
    x = F.of(x)
    return x.norm(), x.trace(), x.conj()


def canonical_associate(x: QuadInt, F: FieldCtx) -> QuadInt:
    """Deterministic representative of x among its unit multiples.

    Positive trace, then minimal trace, ties broken by larger a-coordinate.
    If every associate has trace 0 (rational multiples of sqrt(D)), the one
    with b > 0 is chosen.
    """
    assert not x.is_zero
    assocs = [x * u for u in F.units()]
    positive = [y for y in assocs if y.trace() > 0]
    if positive:
        return min(positive, key=lambda y: (y.trace(), -y.a))
    zero = [y for y in assocs if y.trace() == 0 and y.b > 0]
    assert zero, "associate search exhausted"
    return max(zero, key=lambda y: y.a)


@dataclass(frozen=True)
class SplitData:
    """Splitting of a rational prime p in O_K.

    For split p: alpha is the canonical prime element above p, t its trace,
    and t_chars = ((t/p), (-t/p)); the two coincide when p = 1 mod 4, where
    the symbol is associate-invariant.
    """

    p: int
    kind: PlaceKind
    alpha: QuadInt | None = None
    t: int | None = None
    t_chars: tuple[int, int] | None = None


def _norm_equation_exhaustive(p: int, F: FieldCtx) -> QuadInt:
    bound = isqrt(4 * p) + 1
    c = F.omega_norm
    for a in range(-bound, bound + 1):
        for b in range(-bound, bound + 1):
            if a * a + a * b + b * b * c == p:
                return QuadInt(a, b, c)
    raise AssertionError(f"norm equation unsolvable for split p={p}?")


def _norm_equation_lattice(p: int, F: FieldCtx) -> QuadInt:
    # Lagrange-Gauss reduction on the ideal lattice (p, w - r) where r is a
    # root of x^2 - x + c mod p; the shortest vector generates the ideal.
    c = F.omega_norm
    s = sympy.ntheory.sqrt_mod(F.D % p, p)  # disc of x^2 - x + c is D
    assert s is not None
    root = ((1 + s) * pow(2, -1, p)) % p
    assert (root * root - root + c) % p == 0
    v1 = QuadInt(p, 0, c)
    v2 = QuadInt(-root, 1, c)

    def bilinear(x: QuadInt, y: QuadInt) -> int:
        return ((x + y).norm() - x.norm() - y.norm()) // 2

    while True:
        if v1.norm() < v2.norm():
            v1, v2 = v2, v1
        n2 = v2.norm()
        m = (2 * bilinear(v1, v2) + n2) // (2 * n2)  # round to nearest
        v1 = v1 - m * v2
        if v1.norm() >= v2.norm():
            break
    assert v2.norm() == p
    return v2


def splitting_type(p: int, F: FieldCtx) -> SplitData:
    assert sympy.isprime(p)
    if p == 2:
        # D = 5 mod 8 for every supported field, so 2 is always inert.
        return SplitData(p=2, kind=PlaceKind.INERT)
    if F.D % p == 0:
        return SplitData(p=p, kind=PlaceKind.RAMIFIED)
    if legendre_symbol(F.D, p) == 1:
        raw = _norm_equation_exhaustive(p, F) if p < 100 else _norm_equation_lattice(p, F)
        # The two primes above p have the same trace multiset (conjugation
        # preserves traces), so the associate rule alone cannot distinguish
        # them; extend the a-coordinate tie-break across both so the choice
        # does not depend on which one the norm-equation solver found.
        cand1 = canonical_associate(raw, F)
        cand2 = canonical_associate(raw.conj(), F)
        assert cand1.trace() == cand2.trace()
        alpha = cand1 if cand1.a >= cand2.a else cand2
        assert alpha.norm() == p
        t = alpha.trace()
        return SplitData(
            p=p,
            kind=PlaceKind.SPLIT,
            alpha=alpha,
            t=t,
            t_chars=(legendre_symbol(t, p), legendre_symbol(-t, p)),
        )
    return SplitData(p=p, kind=PlaceKind.INERT)


def trace_character(s: SplitData) -> int:
    if s.kind is not PlaceKind.SPLIT:
        raise NotSplit(f"p={s.p} does not split")
    assert s.t is not None
    return legendre_symbol(s.t, s.p)


def factor_rational(n: int, F: FieldCtx) -> tuple[int, tuple[tuple[QuadInt, int], ...]]:
    """Factor a rational integer into prime elements of O_K.

    Returns (unit, ((prime_element, exponent), ...)) with unit in {1, -1} and
    n = unit * prod(pi^e) exactly.  Inert primes stay rational, split primes
    contribute their conjugate pair, and the ramified prime |D| contributes
    sqrt(D)^2 per rational power (soaking a -1 into the unit).
    """
    if n == 0:
        raise ZeroCoefficient("cannot factor 0")
    unit = 1 if n > 0 else -1
    factors: list[tuple[QuadInt, int]] = []
    for p, e in sorted(sympy.factorint(abs(n)).items()):
        data = splitting_type(p, F)
        if data.kind is PlaceKind.SPLIT:
            # alpha * conj(alpha) = p exactly, so the pair needs no unit fixup
            assert data.alpha is not None
            factors.append((data.alpha, e))
            factors.append((data.alpha.conj(), e))
        elif data.kind is PlaceKind.RAMIFIED:
            # p = -sqrt(D)^2
            factors.append((F.sqrt_disc(), 2 * e))
            if e % 2:
                unit = -unit
        else:
            factors.append((F.of(p), e))
    check = F.of(unit)
    for pi, e in factors:
        check = check * pi**e
    assert check == F.of(n)
    return unit, tuple(factors)


@dataclass(frozen=True)
class Place:
    """A finite place of K: residue field size q and uniformizer pi.

    Split odd primes give two places (one per conjugate prime element);
    omega_image is the image of w in the residue field F_p when that field
    is prime (split and ramified places).
    """

    kind: PlaceKind
    p: int
    q: int
    pi: QuadInt
    omega_image: int | None = None

    @property
    def is_two_adic(self) -> bool:
        return self.kind is PlaceKind.TWO_ADIC

    def __str__(self) -> str:
        if self.kind is PlaceKind.SPLIT:
            return f"({self.pi}) over {self.p}"
        return f"({self.p})" if self.kind is PlaceKind.INERT else f"({self.pi})"


def places_above(p: int, F: FieldCtx) -> tuple[Place, ...]:
    if p == 2:
        return (Place(PlaceKind.TWO_ADIC, 2, 4, F.of(2)),)
    data = splitting_type(p, F)
    if data.kind is PlaceKind.INERT:
        return (Place(PlaceKind.INERT, p, p * p, F.of(p)),)
    if data.kind is PlaceKind.RAMIFIED:
        # w = (1 + sqrt(D))/2 maps to 1/2 in the residue field
        return (Place(PlaceKind.RAMIFIED, p, p, F.sqrt_disc(), pow(2, -1, p)),)
    assert data.alpha is not None
    out = []
    for alpha in (data.alpha, data.alpha.conj()):
        # alpha | (w - r): r = -a/b mod p in the basis alpha = a + b*w
        assert alpha.b % p != 0
        r = (-alpha.a * pow(alpha.b, -1, p)) % p
        assert (r * r - r + F.omega_norm) % p == 0
        out.append(Place(PlaceKind.SPLIT, p, p, alpha, r))
    return tuple(out)


def val_unit(x: "QuadInt | int", place: Place, F: FieldCtx) -> tuple[int, QuadInt]:
    """x = pi^val * unit at the given place; exact on all of O_K - {0}."""
    x = F.of(x)
    assert not x.is_zero
    if place.kind in (PlaceKind.INERT, PlaceKind.TWO_ADIC):
        p = place.p
        k = 0
        a, b = x.a, x.b
        while a % p == 0 and b % p == 0:
            a //= p
            b //= p
            k += 1
        return k, QuadInt(a, b, x.cw)
    if place.kind is PlaceKind.RAMIFIED:
        p = place.p
        # pi = sqrt(D): nu(m) = 2*v_p(m) for rational m, nu(sqrt(D)) = 1;
        # writing 2x = (2a+b) + b*sqrt(D) avoids half-integer coordinates.
        s, t = 2 * x.a + x.b, x.b

        def vp(m: int) -> int:
            if m == 0:
                return 10**9
            k = 0
            while m % p == 0:
                m //= p
                k += 1
            return k

        k = min(2 * vp(s), 2 * vp(t) + 1)
        unit = x
        pi = place.pi
        for _ in range(k):
            unit = (unit * pi).divide_exact(F.D)  # x/pi = x*pi/D
        return k, unit
    # split place: strip exact powers of alpha
    k = 0
    unit = x
    alpha = place.pi
    p = place.p
    while True:
        num = unit * alpha.conj()
        if num.a % p == 0 and num.b % p == 0:
            unit = QuadInt(num.a // p, num.b // p, x.cw)
            k += 1
        else:
            return k, unit


def residue_image(x: QuadInt, place: Place) -> int:
    """Image of x in the residue field F_p at a split or ramified place."""
    assert place.omega_image is not None
    return (x.a + x.b * place.omega_image) % place.p


class Side(Enum):
    PHI = "phi"
    PHIHAT = "phihat"


@dataclass(frozen=True)
class CandidatePair:
    """One descent class: C is v^2 = b1*u^4 + b2*w^4 with b1*b2 fixed by side.

    mask records which generators divide b1 (bit i = generator i), so classes
    multiply modulo squares by xor of masks.
    """

    b1: QuadInt
    b2: QuadInt
    side: Side
    torsion: bool
    mask: int = 0


def strip_fourth_powers(b: int) -> int:
    if b == 0:
        raise ZeroCoefficient("b must be nonzero")
    out = 1 if b > 0 else -1
    for p, e in sympy.factorint(abs(b)).items():
        out *= p ** (e % 4)
    return out


def _class_bits(n: int, gens: list[QuadInt], F: FieldCtx) -> int:
    """Bitmask of the class of rational n over the generator list."""
    unit, factors = factor_rational(n, F)
    mask = 0
    if unit < 0:
        mask |= 1  # gens[0] is -1 by construction
    lookup = {(g.a, g.b): i for i, g in enumerate(gens)}
    for pi, e in factors:
        if e % 2 == 0:
            continue
        i = lookup.get((pi.a, pi.b))
        assert i is not None, f"prime element {pi} outside generator span"
        mask ^= 1 << i
    return mask


def descent_generators(b: int, F: FieldCtx) -> tuple[QuadInt, ...]:
    """Multiplicative generators of the candidate class group for b.

    -1 and 2 first, then one or two prime elements per ascending odd prime
    divisor of b (two for split primes: conjugates).
    """
    gens: list[QuadInt] = [F.of(-1), F.of(2)]
    for p in sorted(sympy.factorint(abs(b))):
        if p == 2:
            continue
        data = splitting_type(p, F)
        if data.kind is PlaceKind.SPLIT:
            assert data.alpha is not None
            gens.append(data.alpha)
            gens.append(data.alpha.conj())
        elif data.kind is PlaceKind.RAMIFIED:
            gens.append(F.sqrt_disc())
        else:
            gens.append(F.of(p))
    return tuple(gens)


def selmer_candidates(b: int, side: Side, F: FieldCtx) -> tuple[CandidatePair, ...]:
    """All 2^(g+1) candidate classes for the given side.

    Side PHI pairs satisfy b1*b2 = -4b; side PHIHAT pairs satisfy
    b1*b2 = 16b with factors of 16 stripped from b2 (same class as
    b1*b2 = b, kept integral).
    """
    assert b != 0 and strip_fourth_powers(b) == b, "b must be fourth-power-free"
    gens = descent_generators(b, F)

    product = F.of(-4 * b) if side is Side.PHI else F.of(16 * b)
    torsion_mask = _class_bits(-4 * b if side is Side.PHI else b, gens, F)

    out = []
    for mask in range(1 << len(gens)):
        b1 = F.of(1)
        for i, g in enumerate(gens):
            if mask >> i & 1:
                b1 = b1 * g
        b2 = product.divide_exact(b1)
        if side is Side.PHIHAT:
            while b2.a % 16 == 0 and b2.b % 16 == 0:
                b2 = QuadInt(b2.a // 16, b2.b // 16, b2.cw)
        out.append(
            CandidatePair(b1, b2, side, torsion=mask in (0, torsion_mask), mask=mask)
        )
    return tuple(out)

"""Descent through the degree-2 isogeny pair for y^2 = x^3 + b*x.

The curve E: y^2 = x^3 + b*x and its partner E': y^2 = x^3 - 4*b*x are
connected by dual isogenies; the classes (b1, b2) with b1*b2 = -4b measure
one direction and those with b1*b2 = b the other.  Everywhere-locally
solvable classes form two F_2-vector spaces whose dimensions combine into
the 2-Selmer rank.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import sympy

from ._par import pmap
from .errors import InternalInconsistency, RamifiedFactor
from .localsolve import HomSpace, everywhere_solvable
from .quadfield import (
    FieldCtx,
    PlaceKind,
    QuadInt,
    Side,
    descent_generators,
    selmer_candidates,
    splitting_type,
    strip_fourth_powers,
    trace_character,
)


@dataclass(frozen=True)
class CurveSpec:
    """E: y^2 = x^3 + b*x over Q(sqrt(D)), b nonzero and fourth-power-free."""

    b: int
    F: FieldCtx

    def __post_init__(self) -> None:
        assert self.b != 0
        assert strip_fourth_powers(self.b) == self.b, "b must be fourth-power-free"


def curve_spec(b: int, F: FieldCtx) -> CurveSpec:
    """CurveSpec for b with fourth powers stripped (same curve class)."""
    return CurveSpec(strip_fourth_powers(b), F)


@dataclass(frozen=True)
class GeneratorClass:
    """One basis class of a Selmer group, with its generator bitmask."""

    rep: QuadInt
    mask: int
    torsion: bool

    def __str__(self) -> str:
        return str(self.rep)


@dataclass(frozen=True)
class SelmerReport:
    b: int
    D: int
    dim_phi: int
    dim_phihat: int
    gens_phi: tuple[GeneratorClass, ...]
    gens_phihat: tuple[GeneratorClass, ...]
    sel_rank2: int
    torsion_full: bool


def _reject_ramified(b: int, F: FieldCtx) -> None:
    for p in sorted(sympy.factorint(abs(b))):
        if p != 2 and splitting_type(p, F).kind is PlaceKind.RAMIFIED:
            raise RamifiedFactor(f"prime {p} dividing b ramifies in Q(sqrt({F.D}))")


def _rref_basis(masks: set[int]) -> list[int]:
    """Reduced-echelon basis of a set of F_2 vectors (canonical for the span)."""
    pivots: dict[int, int] = {}  # leading bit -> vector
    for m in sorted(masks):
        r = m
        for lead in sorted(pivots, reverse=True):
            if r >> lead & 1:
                r ^= pivots[lead]
        if r:
            pivots[r.bit_length() - 1] = r
    for lead in sorted(pivots):
        for other in pivots:
            if other > lead and pivots[other] >> lead & 1:
                pivots[other] ^= pivots[lead]
    return [pivots[lead] for lead in sorted(pivots)]


def _mask_rep(mask: int, gens: tuple[QuadInt, ...], F: FieldCtx) -> QuadInt:
    rep = F.of(1)
    for i, g in enumerate(gens):
        if mask >> i & 1:
            rep = rep * g
    return rep


def selmer_group(spec: CurveSpec, side: Side) -> tuple[int, tuple[GeneratorClass, ...]]:
    """F_2-dimension and a canonical basis of the solvable classes."""
    _reject_ramified(spec.b, spec.F)
    F = spec.F
    cands = selmer_candidates(spec.b, side, F)

    def solvable(c) -> bool:
        space = HomSpace(a=F.of(0), b1=c.b1, b2=c.b2, side=side, torsion_flag=c.torsion)
        return everywhere_solvable(space, F)

    flags = pmap(solvable, cands)
    masks = {c.mask for c, ok in zip(cands, flags) if ok}

    torsion_masks = {c.mask for c in cands if c.torsion}
    assert torsion_masks <= masks, "torsion classes must be locally solvable"
    # subgroup under multiplication modulo squares <=> xor-closure of masks
    for m1 in masks:
        for m2 in masks:
            assert m1 ^ m2 in masks, f"classes not closed: {m1} * {m2}"
    dim = len(masks).bit_length() - 1
    assert 1 << dim == len(masks)

    gens = descent_generators(spec.b, F)
    basis = _rref_basis(masks)
    assert len(basis) == dim
    out = tuple(
        GeneratorClass(rep=_mask_rep(v, gens, F), mask=v, torsion=v in torsion_masks)
        for v in basis
    )
    return dim, out


def full_two_torsion(b: int, D: int) -> bool:
    """Whether x^3 + b*x splits completely over Q(sqrt(D)): -b a square in K."""
    if b < 0 and sympy.integer_nthroot(-b, 2)[1]:
        return True
    return b > 0 and sympy.integer_nthroot(b * abs(D), 2)[1]


def selmer_rank2(spec: CurveSpec) -> SelmerReport:
    dim_phi, gens_phi = selmer_group(spec, Side.PHI)
    dim_phihat, gens_phihat = selmer_group(spec, Side.PHIHAT)
    # one dimension per side is torsion bookkeeping, never rank
    rank = dim_phi + dim_phihat - 2
    if rank < 0:
        raise InternalInconsistency(
            f"negative Selmer rank {rank} for b={spec.b}, D={spec.F.D}"
        )
    return SelmerReport(
        b=spec.b,
        D=spec.F.D,
        dim_phi=dim_phi,
        dim_phihat=dim_phihat,
        gens_phi=gens_phi,
        gens_phihat=gens_phihat,
        sel_rank2=rank,
        torsion_full=full_two_torsion(spec.b, spec.F.D),
    )


def closed_form_rank(spec: CurveSpec) -> int | None:
    """Rank by the congruence formulas, when b has a covered shape.

    Covered shapes: +/- a product of distinct odd inert primes; +/- p with
    p an odd split prime; -n^2 with n squarefree, odd factors inert,
    gcd(n, D) = 1.  Returns None otherwise.
    """
    b, F = spec.b, spec.F
    ab = abs(b)
    fac = sympy.factorint(ab)
    kinds = {p: splitting_type(p, F).kind for p in fac if p != 2}

    if fac and ab % 2 == 1 and all(e == 1 for e in fac.values()) and all(
        k is PlaceKind.INERT for k in kinds.values()
    ):
        n = len(fac)
        if b % 8 == 1:
            return 2 * n + 1
        if b % 4 == 3:
            return 2 * n
        return 2 * n - 1  # b = 5 mod 8

    if ab % 2 == 1 and fac == {ab: 1} and kinds.get(ab) is PlaceKind.SPLIT:
        p, t = ab, trace_character(splitting_type(ab, F))
        if b < 0:
            if p % 8 == 1:
                return 3 + t
            return 2 if p % 8 == 5 else 1
        if p % 8 == 1:
            return 4 + t
        return 2 + t if p % 8 == 5 else 2

    if b < 0:
        n, exact = sympy.integer_nthroot(ab, 2)
        if exact:
            nfac = sympy.factorint(n)
            if (
                all(e == 1 for e in nfac.values())
                and math.gcd(int(n), abs(F.D)) == 1
                and all(
                    splitting_type(p, F).kind is PlaceKind.INERT
                    for p in nfac
                    if p != 2
                )
            ):
                k = len(nfac)
                return 2 * k if n % 2 else 2 * k - 1

    return None

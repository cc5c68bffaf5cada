"""The congruent number problem over the quadratic field.

A positive squarefree n is congruent over a field exactly when the curve
E_n: y^2 = x^3 - n^2 x has a point of infinite order.  Classical congruence
criteria settle non-congruence over Q for certain shapes of n; over K an odd
2-Selmer rank forces positive rank provided the 2-primary part of Sha is
finite, so such n become congruent conditionally.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import gcd

import sympy

from ._par import pmap
from .descent import closed_form_rank, curve_spec
from .errors import NotSquarefree
from .quadfield import FieldCtx, PlaceKind, legendre_symbol, splitting_type

SHA_HYPOTHESIS = "Sha(E_n/K)[2^∞] finite"


class Criterion(Enum):
    GENOCCHI = "Genocchi"
    BASTIEN = "Bastien"
    LAGRANGE = "Lagrange"


class QStatus(Enum):
    NOT_CONGRUENT = "NotCongruentQ"
    UNKNOWN = "UnknownQ"


class KStatus(Enum):
    CONDITIONAL_CONGRUENT = "CongruentConditionalK"
    UNDETERMINED = "UndeterminedK"
    INAPPLICABLE = "Inapplicable"


@dataclass(frozen=True)
class CongruentVerdict:
    n: int
    q_status: QStatus
    q_criterion: Criterion | None
    k_status: KStatus
    k_reason: str | None
    sel_rank: int | None
    k: int | None

    @property
    def conditional_on(self) -> str | None:
        if self.k_status is KStatus.CONDITIONAL_CONGRUENT:
            return SHA_HYPOTHESIS
        return None

    def __str__(self) -> str:
        q = self.q_status.value
        if self.q_criterion is not None:
            q = f"{q}({self.q_criterion.value})"
        k = self.k_status.value
        if self.k_status is KStatus.CONDITIONAL_CONGRUENT:
            k = f"{k} assuming {SHA_HYPOTHESIS}"
        if self.k_reason:
            k = f"{k}: {self.k_reason}"
        tail = "" if self.sel_rank is None else f", Selmer rank {self.sel_rank}"
        return f"n={self.n}: {q}, {k}{tail}"


def _checked_squarefree(n: int) -> dict[int, int]:
    if n < 1:
        raise NotSquarefree(f"n must be a positive squarefree integer, got {n}")
    fac = sympy.factorint(n)
    if any(e > 1 for e in fac.values()):
        raise NotSquarefree(f"{n} is not squarefree")
    return fac


def q_noncongruence(n: int) -> tuple[QStatus, Criterion | None]:
    """Classical non-congruence criteria over Q, chronological precedence."""
    fac = _checked_squarefree(n)
    if n % 2 == 0:
        odd = sorted(p for p in fac if p != 2)
        if len(odd) == 1:
            (p,) = odd
            if p % 8 == 5:
                return QStatus.NOT_CONGRUENT, Criterion.GENOCCHI
            if p % 16 == 9:
                return QStatus.NOT_CONGRUENT, Criterion.BASTIEN
        elif len(odd) == 2:
            p, q = odd
            if p % 8 == 5 and q % 8 == 5:
                return QStatus.NOT_CONGRUENT, Criterion.GENOCCHI
            for x, y in ((p, q), (q, p)):
                if x % 8 == 1 and y % 8 == 5 and legendre_symbol(x, y) == -1:
                    return QStatus.NOT_CONGRUENT, Criterion.LAGRANGE
    return QStatus.UNKNOWN, None


def k_congruence(n: int, F: FieldCtx) -> tuple[KStatus, str | None, int | None, int | None]:
    """Conditional congruence of n over K = Q(sqrt(D)).

    Returns (status, reason, sel_rank, k).  The Selmer rank of E_n over K is
    2k for odd n and 2k-1 for even n when every odd prime factor of n is
    inert and gcd(n, D) = 1; odd rank makes n congruent over K whenever the
    2-primary part of Sha(E_n/K) is finite.
    """
    fac = _checked_squarefree(n)
    if gcd(n, abs(F.D)) != 1:
        return (
            KStatus.INAPPLICABLE,
            f"gcd(n, {abs(F.D)}) = {gcd(n, abs(F.D))} > 1",
            None,
            None,
        )
    for p in sorted(fac):
        if p == 2:
            continue
        kind = splitting_type(p, F).kind
        if kind is not PlaceKind.INERT:
            return (
                KStatus.INAPPLICABLE,
                f"{p} {kind.value}s in Q(sqrt({F.D}))",
                None,
                None,
            )
    k = len(fac)
    sel_rank = 2 * k - 1 if n % 2 == 0 else 2 * k
    # same rank via the general closed form for b = -n^2 (shape detection check)
    assert closed_form_rank(curve_spec(-n * n, F)) == sel_rank
    if sel_rank % 2 == 1:
        return KStatus.CONDITIONAL_CONGRUENT, None, sel_rank, k
    return KStatus.UNDETERMINED, None, sel_rank, k


def congruent_verdict(n: int, F: FieldCtx) -> CongruentVerdict:
    q_status, criterion = q_noncongruence(n)
    k_status, reason, sel_rank, k = k_congruence(n, F)
    return CongruentVerdict(
        n=n,
        q_status=q_status,
        q_criterion=criterion,
        k_status=k_status,
        k_reason=reason,
        sel_rank=sel_rank,
        k=k,
    )


def scan_verdicts(n_max: int, F: FieldCtx) -> tuple[CongruentVerdict, ...]:
    """Verdicts for every squarefree 1 <= n <= n_max, ascending."""
    ns = [n for n in range(1, n_max + 1) if all(e == 1 for e in sympy.factorint(n).values())]
    return tuple(pmap(lambda n: congruent_verdict(n, F), ns))


def scan_new_congruent(n_max: int, F: FieldCtx) -> tuple[CongruentVerdict, ...]:
    """Squarefree n <= n_max not congruent over Q yet conditionally congruent over K."""
    return tuple(
        v
        for v in scan_verdicts(n_max, F)
        if v.q_status is QStatus.NOT_CONGRUENT
        and v.k_status is KStatus.CONDITIONAL_CONGRUENT
    )

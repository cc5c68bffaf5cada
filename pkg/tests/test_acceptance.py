"""End-to-end acceptance checks; each test prints one verdict line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines stream.

Criterion 5 asserts that the degree-4 character-sum existence scan is
exception-free for every odd prime power 7 <= q <= 199.  That blanket
claim is genuinely false over the nine-element field (eight pairs
(c, d) = (+/-d, d) with d a nonsquare admit no point), so its line prints
FAIL and the test fails.  The underlying facts are pinned green in
tests/test_charsums.py, and the descent pipeline never queries the failing
configurations — see README, "Verification status".  The check is left
failing rather than weakened.
"""

from __future__ import annotations

import random
import time
from math import gcd

import sympy

from iqselmer._par import pmap
from iqselmer.charsums import chi_exists, default_field, exception_scan
from iqselmer.congruent import scan_new_congruent
from iqselmer.descent import curve_spec, selmer_rank2
from iqselmer.localsolve import (
    HomSpace,
    VerdictTag,
    bad_places,
    oracle_search,
    predicate_odd_place,
    predicate_two_adic,
)
from iqselmer.quadfield import (
    SUPPORTED_DISCS,
    FieldCtx,
    Place,
    PlaceKind,
    Side,
    legendre_symbol,
    make_field,
    places_above,
    residue_image,
    selmer_candidates,
    splitting_type,
    trace_character,
    val_unit,
)
from iqselmer.residue2adic import (
    FOURTH_POWERS_MOD8,
    MINUS_LIST,
    PLUS_LIST,
    UNIT_SQUARES_MOD8,
    R8Elem,
    embed_mod8,
    pair_charpoly_mod8,
)

F3 = make_field(-3)
F11 = make_field(-11)


def _report(num: int, ok: bool, detail: str) -> None:
    print(f"[criterion {num}] {'PASS' if ok else 'FAIL'} - {detail}", flush=True)
    assert ok, f"criterion {num}: {detail}"


def _squarefree(n: int) -> bool:
    return all(e == 1 for e in sympy.factorint(n).values())


# ---------------------------------------------------------------------------
# 1. rank formula for products of inert primes


def test_criterion_1_inert_products_rank_formula():
    t0 = time.monotonic()
    mismatches = []
    curves = 0
    for D in SUPPORTED_DISCS:
        F = make_field(D)
        inert = [p for p in sympy.primerange(3, 101) if splitting_type(p, F).kind is PlaceKind.INERT]
        bs: list[int] = []
        for i, p in enumerate(inert):
            bs += [p, -p]
            for q in inert[i + 1 :]:
                bs += [p * q, -p * q]

        def formula(b: int) -> int:
            n = len(sympy.factorint(abs(b)))
            if b % 8 == 1:
                return 2 * n + 1
            if b % 4 == 3:
                return 2 * n
            return 2 * n - 1  # b = 5 mod 8

        ranks = pmap(lambda b, F=F: selmer_rank2(curve_spec(b, F)).sel_rank2, bs)
        mismatches += [(D, b, got, formula(b)) for b, got in zip(bs, ranks) if got != formula(b)]
        curves += len(bs)
    dt = time.monotonic() - t0
    detail = f"{curves} curves b=+/-p1..pn, distinct inert p <= 100, n <= 2, six fields, {dt:.1f}s"
    if mismatches:
        detail += f"; mismatches {mismatches[:3]}"
    _report(1, not mismatches and dt < 120, detail)


# ---------------------------------------------------------------------------
# 2. rank table for split-prime curves, trace character included


def test_criterion_2_split_prime_rank_table():
    jobs = []
    for D in SUPPORTED_DISCS:
        F = make_field(D)
        for p in sympy.primerange(3, 301):
            sd = splitting_type(p, F)
            if sd.kind is PlaceKind.SPLIT:
                jobs.append((F, p, trace_character(sd)))

    def check(job):
        F, p, t = job
        assert t in (1, -1)
        if p % 8 == 1:
            want_neg, want_pos = 3 + t, 4 + t
        elif p % 8 == 5:
            want_neg, want_pos = 2, 2 + t
        else:  # p = 3 mod 4
            want_neg, want_pos = 1, 2
        got_neg = selmer_rank2(curve_spec(-p, F)).sel_rank2
        got_pos = selmer_rank2(curve_spec(p, F)).sel_rank2
        return F.D, p, got_neg, want_neg, got_pos, want_pos

    rows = pmap(check, jobs)
    mismatches = [r for r in rows if r[2] != r[3] or r[4] != r[5]]
    detail = f"{2 * len(jobs)} curves E_p, E_-p for split p <= 300, six fields, trace character applied"
    if mismatches:
        detail += f"; mismatches {mismatches[:3]}"
    _report(2, not mismatches and len(jobs) > 100, detail)


# ---------------------------------------------------------------------------
# 3. rank formula for b = -n^2


def test_criterion_3_negative_square_rank_formula():
    jobs = []
    for D in SUPPORTED_DISCS:
        F = make_field(D)
        for n in range(1, 301):
            fac = sympy.factorint(n)
            if any(e > 1 for e in fac.values()) or gcd(n, abs(D)) != 1:
                continue
            if any(splitting_type(p, F).kind is not PlaceKind.INERT for p in fac if p != 2):
                continue
            k = len(fac)
            jobs.append((F, n, 2 * k - 1 if n % 2 == 0 else 2 * k))

    rows = pmap(lambda j: (j[0].D, j[1], j[2], selmer_rank2(curve_spec(-j[1] * j[1], j[0])).sel_rank2), jobs)
    mismatches = [r for r in rows if r[2] != r[3]]
    detail = f"{len(jobs)} curves b=-n^2, qualifying squarefree n <= 300, six fields"
    if mismatches:
        detail += f"; mismatches {mismatches[:3]}"
    _report(3, not mismatches and len(jobs) > 200, detail)


# ---------------------------------------------------------------------------
# 4. unit squares and fourth powers of O/8


def test_criterion_4_unit_squares_mod8():
    units = [R8Elem(c0, c1) for c0 in range(8) for c1 in range(8) if R8Elem(c0, c1).is_unit()]
    squares = {u * u for u in units}
    fourths = {u**4 for u in units}
    one, zeta, zeta2 = R8Elem(1, 0), R8Elem(0, 1), R8Elem(7, 7)  # zeta^2 = -1 - zeta
    five = R8Elem(5, 0)
    want_sq = {one, zeta, zeta2, five, five * zeta, five * zeta2}
    ok = (
        len(units) == 48
        and squares == want_sq
        and fourths == {one, zeta, zeta2}
        and squares == set(UNIT_SQUARES_MOD8)
        and fourths == set(FOURTH_POWERS_MOD8)
    )
    _report(4, ok, "48 units of O/8: squares exactly {1, z, z^2, 5, 5z, 5z^2}, fourth powers exactly {1, z, z^2}")


# ---------------------------------------------------------------------------
# 5. character-sum existence scans (deliberately includes a false blanket claim)


def test_criterion_5_character_sum_scans():
    pps = [q for q in range(5, 200, 2) if len(sympy.factorint(q)) == 1]
    deg2 = dict(pmap(lambda q: (q, exception_scan(2, q)), pps))
    deg2_bad = {q: e for q, e in deg2.items() if e}
    q5_ok = exception_scan(4, 5) == ((1, 2), (2, 3), (3, 2), (4, 3))
    deg4 = dict(pmap(lambda q: (q, exception_scan(4, q)), [q for q in pps if q >= 7]))
    deg4_bad = {q: e for q, e in deg4.items() if e}
    fld3 = default_field(3)
    iff_q3 = all(chi_exists(c, d, 2, fld3) == (not (c == 1 and d == 2)) for c in (1, 2) for d in (1, 2))

    ok = not deg2_bad and q5_ok and not deg4_bad and iff_q3
    parts = [
        f"degree-2 scan clean for 3 < q <= 199: {not deg2_bad}",
        f"q=5 quartet exact: {q5_ok}",
        f"q=3 iff exact: {iff_q3}",
    ]
    if deg4_bad:
        qs = sorted(deg4_bad)
        parts.append(
            f"degree-4 emptiness for 7 <= q <= 199 FALSE at q={qs}: "
            f"{len(deg4_bad[qs[0]])} pairs (+/-d, d), d nonsquare"
        )
    else:
        parts.append("degree-4 scan clean for 7 <= q <= 199: True")
    _report(5, ok, "; ".join(parts))


# ---------------------------------------------------------------------------
# 6. decision procedures vs the search oracle


def _rand_unit_at(rng: random.Random, pl: Place, F: FieldCtx, span: int):
    # random element of O that is a unit at pl, sometimes with omega part
    while True:
        c1 = rng.randint(-4, 4) if rng.random() < 0.3 else 0
        x = F.of(rng.randint(-span, span)) + F.omega() * c1
        if not x.is_zero and val_unit(x, pl, F)[0] == 0:
            return x


def _degenerate_space(rng: random.Random, pl: Place, F: FieldCtx) -> HomSpace:
    # b1*b2 a unit and a^2 = 4*b1*b2 mod pl, so the reduction has a double root
    p = pl.p
    while True:
        b1 = _rand_unit_at(rng, pl, F, 25)
        b2 = _rand_unit_at(rng, pl, F, 25)
        res = residue_image(F.of(4) * b1 * b2, pl) % p
        root = sympy.ntheory.sqrt_mod(res, p)
        if root is None:
            continue
        a = int(root) + p * rng.randint(-3, 3)
        if rng.random() < 0.5:
            a = -a
        s = HomSpace.make(b1, b2, F, a=a)
        disc = s.a * s.a - 4 * s.b1 * s.b2
        if a == 0 or disc.is_zero:
            continue
        return s


def _vanishing_space(rng: random.Random, pl: Place, F: FieldCtx) -> HomSpace:
    # one coefficient divisible by pl, the middle coefficient a unit
    low = _rand_unit_at(rng, pl, F, 20) * pl.p ** rng.randint(1, 2)
    if pl.kind is PlaceKind.RAMIFIED and rng.random() < 0.5:
        low = low * pl.pi
    unit = _rand_unit_at(rng, pl, F, 20)
    b1, b2 = (low, unit) if rng.random() < 0.5 else (unit, low)
    return HomSpace.make(b1, b2, F, a=_rand_unit_at(rng, pl, F, 20))


def _q3_space(rng: random.Random, pl: Place, F: FieldCtx) -> HomSpace:
    if rng.random() < 0.5:
        return _degenerate_space(rng, pl, F)
    return _vanishing_space(rng, pl, F)


def _run_iff_class(seed: int, gen, places, want_reasons, count: int):
    rng = random.Random(seed)
    bad = []
    for i in range(count):
        pl, F = places[i % len(places)]
        s = gen(rng, pl, F)
        v = predicate_odd_place(s, pl)
        o = oracle_search(s, pl)
        if v.tag is VerdictTag.Unknown or v.reason not in want_reasons or o.tag is not v.tag:
            bad.append((F.D, pl.p, str(s.b1), str(s.b2), str(s.a), v.reason, o.reason))
    return bad


def _unit_residues() -> tuple[list[R8Elem], list[R8Elem], list[R8Elem]]:
    every = [R8Elem(c0, c1) for c0 in range(8) for c1 in range(8) if R8Elem(c0, c1).is_unit()]
    every.sort(key=lambda r: (r.c0, r.c1))
    squares = [r for r in every if r in UNIT_SQUARES_MOD8]
    nonsquares = [r for r in every if r not in UNIT_SQUARES_MOD8]
    return every, squares, nonsquares


_UNIT_RES, _SQ_RES, _NONSQ_RES = _unit_residues()


def _lift_table(F: FieldCtx) -> dict[tuple[int, int], tuple[int, int]]:
    # {1, omega} is a basis of O/8, so the embedding is a bijection on residues
    table = {}
    for c0 in range(8):
        for c1 in range(8):
            r = embed_mod8(F.of(c0) + F.omega() * c1, F)
            table[(r.c0, r.c1)] = (c0, c1)
    assert len(table) == 64
    return table


def _two_adic_space(rng: random.Random, F: FieldCtx, table, kind: str) -> HomSpace:
    def lift(r: R8Elem):
        c0, c1 = table[(r.c0, r.c1)]
        return F.of(c0 + 8 * rng.randint(-2, 2)) + F.omega() * (c1 + 8 * rng.randint(-2, 2))

    def any_nonzero():
        while True:
            x = F.of(rng.randint(-9, 9)) + F.omega() * rng.randint(-3, 3)
            if not x.is_zero:
                return x

    def coeff_avoiding_square_unit(v: int):
        # never a square unit at even valuation, so it cannot fire on its own
        res = rng.choice(_NONSQ_RES) if v % 2 == 0 else rng.choice(_UNIT_RES)
        return lift(res) * 2**v

    if kind == "square-unit":
        b1 = lift(rng.choice(_SQ_RES)) * 2 ** rng.choice((0, 2, 4))
        b2 = any_nonzero() * 2 ** rng.randint(0, 4)
        return HomSpace.make(b1, b2, F, a=any_nonzero() * 2 ** rng.randint(0, 3))

    if kind == "dominant":
        va = rng.choice((2, 4))
        a = lift(rng.choice(_SQ_RES)) * 2**va
        b1 = coeff_avoiding_square_unit(va + 3 + rng.randint(0, 2))
        b2 = coeff_avoiding_square_unit(va + 3 + rng.randint(0, 2))
        return HomSpace.make(b1, b2, F, a=a)

    assert kind == "balanced"
    va = rng.choice((2, 4))
    b1_res = rng.choice(_NONSQ_RES)
    while True:
        a_res = rng.choice(_SQ_RES) - b1_res  # unit part sum lands on a square unit
        if a_res.is_unit():
            break
    a = lift(a_res) * 2**va
    b1 = lift(b1_res) * 2**va
    b2 = lift(rng.choice(_UNIT_RES)) * 2 ** (va + 3 + 2 * rng.randint(0, 1))
    if rng.random() < 0.5:
        b1, b2 = b2, b1
    return HomSpace.make(b1, b2, F, a=a)


def _run_two_adic_condition(seed: int, kind: str, reason: str, count: int):
    rng = random.Random(seed)
    table = _lift_table(F3)
    pl2 = places_above(2, F3)[0]
    bad = []
    for _ in range(count):
        s = _two_adic_space(rng, F3, table, kind)
        v = predicate_two_adic(s, F3)
        o = oracle_search(s, pl2)
        if v.tag is not VerdictTag.Solvable or v.reason != reason or o.tag is not VerdictTag.Solvable:
            bad.append((str(s.b1), str(s.b2), str(s.a), v.reason, o.reason))
    return bad


def test_criterion_6_oracle_agreement():
    t0 = time.monotonic()

    # part A: complete sweep, b*x^4 + b'*w^4 spaces from squarefree |b| <= 50
    place_checks = undecided = disagreements = 0
    for D in (-3, -11):
        F = make_field(D)
        bs = [s * n for n in range(1, 51) if _squarefree(n) for s in (1, -1)]

        def sweep(b: int, F: FieldCtx = F):
            und = dis = checks = 0
            for side in (Side.PHI, Side.PHIHAT):
                for c in selmer_candidates(b, side, F):
                    space = HomSpace(a=F.of(0), b1=c.b1, b2=c.b2, side=side, torsion_flag=c.torsion)
                    for pl in bad_places(space, F):
                        if pl.kind is PlaceKind.TWO_ADIC:
                            pred = predicate_two_adic(space, F)
                        else:
                            pred = predicate_odd_place(space, pl)
                        orc = oracle_search(space, pl)
                        checks += 1
                        if VerdictTag.Unknown in (pred.tag, orc.tag):
                            und += 1
                        elif pred.tag is not orc.tag:
                            dis += 1
            return und, dis, checks

        rows = pmap(sweep, bs)
        undecided += sum(r[0] for r in rows)
        disagreements += sum(r[1] for r in rows)
        place_checks += sum(r[2] for r in rows)
    part_a = undecided == 0 and disagreements == 0

    # part B: 500 randomized nonzero-middle-term spaces per decision class
    pl = lambda p, F: places_above(p, F)[0]  # noqa: E731
    bad_deg = _run_iff_class(
        601,
        _degenerate_space,
        [(pl(7, F3), F3), (pl(13, F3), F3), (pl(5, F11), F11), (pl(11, F11), F11)],
        {"odd:degenerate-discriminant"},
        500,
    )
    bad_van = _run_iff_class(
        602,
        _vanishing_space,
        [(pl(5, F3), F3), (pl(17, F3), F3), (pl(7, F3), F3), (pl(11, F11), F11)],
        {"odd:vanishing-product"},
        500,
    )
    bad_q3 = _run_iff_class(
        603,
        _q3_space,
        [(pl(3, F3), F3), (pl(3, F11), F11)],
        {"odd3:degenerate-discriminant", "odd3:vanishing-product"},
        500,
    )
    bad_two = []
    for seed, kind, reason in (
        (604, "square-unit", "two:square-unit-coefficient"),
        (605, "dominant", "two:dominant-middle-term"),
        (606, "balanced", "two:balanced-middle-term"),
    ):
        bad_two += _run_two_adic_condition(seed, kind, reason, 500)

    dt = time.monotonic() - t0
    ok = part_a and not bad_deg and not bad_van and not bad_q3 and not bad_two and dt < 300
    detail = (
        f"sweep D in (-3,-11), squarefree |b| <= 50: {place_checks} place checks, "
        f"{disagreements} disagreements, {undecided} undecided; randomized nonzero-middle: "
        f"500 double-root + 500 vanishing-constant + 500 q=3, all iff-confirmed; "
        f"3 x 500 two-adic sufficiency-confirmed (square-unit, dominant, balanced); {dt:.1f}s"
    )
    failures = bad_deg[:2] + bad_van[:2] + bad_q3[:2] + bad_two[:2]
    if failures:
        detail += f"; failures {failures}"
    _report(6, ok, detail)


# ---------------------------------------------------------------------------
# 7. cube characteristic polynomials mod 8 at split primes


def test_criterion_7_cube_charpolys_split_primes():
    one, two = R8Elem(1, 0), R8Elem(2, 0)
    checked = 0
    exceptions = []
    for D in SUPPORTED_DISCS:
        F = make_field(D)
        for p in sympy.primerange(3, 1001):
            sd = splitting_type(p, F)
            if sd.kind is not PlaceKind.SPLIT:
                continue
            a8 = embed_mod8(sd.alpha, F)
            c8 = embed_mod8(sd.alpha.conj(), F)
            minus = pair_charpoly_mod8(a8, c8, "-")
            plus = pair_charpoly_mod8(a8, c8, "+")
            square = a8 in UNIT_SQUARES_MOD8
            identity = minus.t == two and minus.s == one  # charpoly (x - 1)^2
            checked += 1
            if not (minus.member and plus.member and square == identity):
                exceptions.append((D, p))
    ok = not exceptions and checked > 400 and len(MINUS_LIST) == 6 and len(PLUS_LIST) == 6
    detail = (
        f"{checked} split p <= 1000 across six fields: conjugate-cube charpolys in the two "
        f"6-entry lists, squareness <=> (x - 1)^2; exceptions {exceptions[:3] or 'none'}"
    )
    _report(7, ok, detail)


# ---------------------------------------------------------------------------
# 8. congruent-number scan over Q(sqrt(-3))


def test_criterion_8_congruent_scan_bundle():
    hits = scan_new_congruent(500, F3)
    ns = [v.n for v in hits]
    problems = []
    if not hits:
        problems.append("empty scan")
    for need in (10, 82):
        if need not in ns:
            problems.append(f"{need} missing")
    for v in hits:
        fac = sympy.factorint(v.n)
        odd = sorted(p for p in fac if p != 2)
        if v.n % 2 != 0 or any(e > 1 for e in fac.values()):
            problems.append(f"n={v.n} not even squarefree")
        if v.sel_rank is None or v.sel_rank != 2 * len(fac) - 1 or v.sel_rank % 2 == 0:
            problems.append(f"n={v.n} rank {v.sel_rank} != 2k-1 odd")
        if any(legendre_symbol(-3, p) != -1 for p in odd):
            problems.append(f"n={v.n} has a non-inert odd factor")
        crit = v.q_criterion.value if v.q_criterion else None
        if crit == "Genocchi":
            good = len(odd) in (1, 2) and all(p % 8 == 5 for p in odd)
        elif crit == "Bastien":
            good = len(odd) == 1 and odd[0] % 16 == 9
        elif crit == "Lagrange":
            good = len(odd) == 2 and any(
                x % 8 == 1 and y % 8 == 5 and legendre_symbol(x, y) == -1
                for x, y in ((odd[0], odd[1]), (odd[1], odd[0]))
            )
        else:
            good = False
        if not good:
            problems.append(f"n={v.n} fails {crit} recheck")
    ok = not problems
    _report(8, ok, f"hits <= 500: {ns}" if ok else "; ".join(problems))

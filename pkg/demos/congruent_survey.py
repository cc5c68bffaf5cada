#!/usr/bin/env python3
"""Survey the congruent-number problem over an imaginary quadratic field.

Walks every squarefree n up to a bound and reports the n that classical
congruence criteria (Genocchi, Bastien, Lagrange) rule out over Q while an
odd 2-Selmer rank makes them congruent over K = Q(sqrt(D)) whenever the
2-primary part of Sha is finite.
"""

from __future__ import annotations

import argparse
from collections import Counter

from iqselmer.congruent import SHA_HYPOTHESIS, scan_new_congruent
from iqselmer.quadfield import make_field


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--disc", type=int, default=-3, help="field discriminant D (default -3)")
    ap.add_argument("--max", type=int, default=500, help="scan bound for n (default 500)")
    args = ap.parse_args()

    F = make_field(args.disc)
    hits = scan_new_congruent(args.max, F)

    print(f"squarefree n <= {args.max}, K = Q(sqrt({F.D}))")
    print(f"not congruent over Q, yet congruent over K assuming {SHA_HYPOTHESIS}:")
    print()
    for v in hits:
        print(f"  {v}")
    print()
    by_criterion = Counter(v.q_criterion.value for v in hits)
    parts = ", ".join(f"{name}: {count}" for name, count in sorted(by_criterion.items()))
    print(f"{len(hits)} values of n ({parts})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

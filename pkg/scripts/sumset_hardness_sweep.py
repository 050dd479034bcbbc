#!/usr/bin/env python3
"""Sweep the appended-polynomial count of the quadratic graph set and record
where a budgeted sumset search stops finding witnesses.

The graph of a single random quadratic map contains large structured sumsets
(translated isotropic subspaces of the underlying form), and the greedy
search in `sumset_evasive_audit` finds them in a few hundred evaluations.
Appending more independent quadratics prunes those witnesses; this driver
records, for a fixed budget, the count at which the search starts coming
back empty.  It is a survey, so it always exits 0.
"""

import argparse
import sys

from polyext import rng
from polyext.constructions import build_evasive_h
from polyext.oracles import sumset_evasive_audit
from polyext.reports import render_json


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, required=True, help="master seed")
    ap.add_argument("--k", type=int, default=6, help="input width of the map")
    ap.add_argument("--d", type=int, default=2, help="degree of the appended polynomials")
    ap.add_argument("--t", type=int, default=2, help="search for |A| = |B| = 2^t")
    ap.add_argument("--r-max", type=int, default=12, help="largest appended count to try")
    ap.add_argument("--budget", type=int, default=5000, help="membership evaluations per audit")
    ap.add_argument("--out", default=None, help="write the sweep as JSON to this path")
    args = ap.parse_args()

    rows = []
    for r in range(1, args.r_max + 1):
        desc = build_evasive_h(args.k, args.d, args.seed, r=r)
        stream = rng.derive(args.seed, "sumset-sweep", r)
        report = sumset_evasive_audit(desc, args.t, args.budget, stream)
        detail = report.per_source[0]
        rows.append(
            {
                "r": r,
                "held": report.verdict,
                "evaluations": detail["evaluations"],
                "witness": detail["witness"],
            }
        )
        outcome = "held" if report.verdict else "witness found"
        print(f"r={r:<3} {outcome:<14} evaluations={detail['evaluations']}")

    if args.out:
        payload = {
            "k": args.k,
            "d": args.d,
            "t": args.t,
            "budget": args.budget,
            "seed": args.seed,
            "rows": rows,
        }
        with open(args.out, "w") as fh:
            fh.write(render_json(payload))
        print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

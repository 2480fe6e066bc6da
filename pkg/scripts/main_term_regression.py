#!/usr/bin/env python3
"""Compare brute-force surjection counts against the residue prediction.

For each group the oracle counts surjections up to a ladder of bounds X and
the predicted main term leading * X^(1/a) * log(X)^(b-1) is printed next to
the observed count, together with the fitted error exponent (which should
sit below the proved power-saving bound for the groups with simple poles).
"""

import argparse
import json

from mpmath import mp

from malle_lab.groups import parse_group_literal
from malle_lab.oracle import count_surjections
from malle_lab.series import residue_main_term
from malle_lab.tauberian import fit_exponent


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--group", default="C2")
    parser.add_argument("--xmax", type=int, default=10**6)
    parser.add_argument("--pmax", type=int, default=10**5)
    parser.add_argument("--points", type=int, default=12)
    args = parser.parse_args()

    G = parse_group_literal(args.group)
    est = residue_main_term(G, args.pmax)
    ladder = sorted(
        {int(args.xmax * 0.5 ** (k / 2)) for k in range(args.points)} | {args.xmax}
    )
    rows = []
    for x in ladder:
        observed = count_surjections(G, x).surjections
        predicted = float(est.predict(x))
        rows.append(
            {
                "X": x,
                "observed": observed,
                "predicted": round(predicted, 2),
                "rel_err": round(predicted / observed - 1, 6) if observed else None,
            }
        )
        print(json.dumps(rows[-1]))

    samples = [(float(r["X"]), float(r["observed"])) for r in rows if r["observed"]]
    if len(samples) >= 10 and samples[-1][0] / samples[0][0] >= 100:
        slope, ci = fit_exponent(samples, lambda x: float(est.predict(x)))
        print(
            json.dumps(
                {
                    "group": str(G),
                    "main_exponent": str(est.exponent),
                    "log_power": est.log_power,
                    "leading": mp.nstr(est.leading, 12),
                    "fitted_error_exponent": round(slope, 4),
                    "ci95": round(ci, 4),
                }
            )
        )


if __name__ == "__main__":
    main()

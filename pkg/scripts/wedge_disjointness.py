#!/usr/bin/env python3
"""Check that the two basin lobes entering the wedge around the repelling axis
stay disjoint, with a resolution-doubling stability re-run.

Example:
    python scripts/wedge_disjointness.py --poly 0,1,1,1 --R 0.3 --theta0 0.3
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from basinlab import analyze_parabolic, parse_polynomial, prop3_disjointness


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--poly", default="0,1,1,1")
    ap.add_argument("--R", type=float, default=0.3)
    ap.add_argument("--theta0", type=float, default=0.3)
    ap.add_argument("--res", type=int, default=1024)
    ap.add_argument("--nmax", type=int, default=10000)
    a = ap.parse_args()

    fm, _ = analyze_parabolic(parse_polynomial(a.poly))
    rep = prop3_disjointness(fm, a.R, a.theta0, a.res, a.nmax)
    rep2 = prop3_disjointness(fm, a.R, a.theta0, 2 * a.res, a.nmax)
    print(f"res {rep.resolution}: disjoint={rep.disjoint} overlap={rep.overlap_pixels} "
          f"s1={rep.s1_pixels} s2={rep.s2_pixels} undecided={rep.undecided_pixels}")
    print(f"res {rep2.resolution}: disjoint={rep2.disjoint} overlap={rep2.overlap_pixels}")
    print(f"stable under doubling: {rep.disjoint == rep2.disjoint}")
    return 0 if (rep.disjoint and rep2.disjoint) else 1


if __name__ == "__main__":
    raise SystemExit(main())

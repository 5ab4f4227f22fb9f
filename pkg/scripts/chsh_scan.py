#!/usr/bin/env python3
"""Scan coplanar analyzer angles for the largest CHSH value.

Sweeps a, a', b, b' over a grid in the x-z plane, prints the best settings
found, and compares against the deterministic local bound (2, by exhaustive
enumeration) and the quantum ceiling 2*sqrt(2).
"""

import argparse
import math
from itertools import product

from qhist.bell import chsh, lhv_classical_bound
from qhist.spin import Direction


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=24,
                        help="grid points per angle over [0, 360) (default 24)")
    args = parser.parse_args()

    step = 360.0 / args.steps
    angles = [k * step for k in range(args.steps)]
    best, best_settings = 0.0, None
    for a, ap, b, bp in product(angles, repeat=4):
        s = abs(chsh(*(Direction(math.radians(x), 0.0) for x in (a, ap, b, bp))))
        if s > best:
            best, best_settings = s, (a, ap, b, bp)

    a, ap, b, bp = best_settings
    print(f"grid: {args.steps} points per angle ({step:g} degree steps)")
    print(f"best |S| = {best:.12g} at a={a:g} a'={ap:g} b={b:g} b'={bp:g} (degrees)")
    print(f"deterministic local bound = {lhv_classical_bound():g}")
    print(f"quantum ceiling            = {2 * math.sqrt(2):.12g}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Single-framework rule walkthrough on a spin prepared along +z.

Asks the same question ("is the spin along +x?") relative to the z framework
and relative to the x framework, then tries to conjoin and refine
incompatible properties/frameworks to show exactly where the rule bites.
"""

from qhist.dynamics import Schedule, TimeGrid
from qhist.frameworks import (
    IncompatibleFrameworks,
    IncompatibleProperties,
    Proposition,
    conjunction,
    query,
    refine,
)
from qhist.histories import collapse_family
from qhist.spin import X, Y, Z, basis_for, spin_projector

GRID = TimeGrid((0.0, 1.0))
FREE = Schedule.free(2)
Z_PLUS = basis_for(Z).plus


def frame(direction, labels):
    b = basis_for(direction)
    return collapse_family(Z_PLUS, GRID, FREE, [b.plus, b.minus], labels)


def main() -> None:
    z_frame = frame(Z, ("z1+", "z1-"))
    x_frame = frame(X, ("x1+", "x1-"))
    x_plus = Proposition(spin_projector(X, +1, "x+"), 1)
    y_plus = Proposition(spin_projector(Y, +1, "y+"), 1)

    print("prepared state: |z+>\n")
    for name, fam in (("z", z_frame), ("x", x_frame)):
        result = query(fam, x_plus)
        if result.meaningful:
            print(f"in the {name}-framework: Prob(x+) = {result.probability:g}")
        else:
            print(f"in the {name}-framework: meaningless ({result.reason})")

    print()
    try:
        conjunction(x_plus, y_plus)
    except IncompatibleProperties as exc:
        print(f"conjunction x+ AND y+: {exc}")

    try:
        refine(x_frame, frame(Y, ("y1+", "y1-")))
    except IncompatibleFrameworks as exc:
        print(f"refining the x and y frameworks: {exc}")


if __name__ == "__main__":
    main()

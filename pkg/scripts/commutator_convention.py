"""Overlap test of the F2 family under both readings of [x, y].

Under [x,y] = x^-1 y^-1 x y the presentation is consistent; reading it as
x y x^-1 y^-1 turns a b a^-1 into w^-1 b and the overlaps fail.
"""

import sys

from afspin.catalog import F2
from afspin.collector import consistency_check
from afspin.presentation import parse_presentation

OPPOSITE = F2.replace(
    "[b,a] = c^(2*l) d^((2*l-1)*k);", "a b a^-1 = d^(-(2*l-1)*k) c^(-2*l) b;"
).replace("[c,b] = d^(2*k);", "b c b^-1 = d^(-2*k) c;")


def main():
    ok = True
    for k in (1, 2, 3):
        for l in (1, 2):
            a = consistency_check(parse_presentation(F2, {"k": k, "l": l}))
            b = consistency_check(parse_presentation(OPPOSITE, {"k": k, "l": l}))
            print(f"k={k} l={l}: x^-1y^-1xy {'consistent' if a else 'FAILS'}; "
                  f"xyx^-1y^-1 {'consistent' if b else 'fails: ' + b.failure}")
            ok = ok and a.passed and not b.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())

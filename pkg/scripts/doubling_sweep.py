"""Compare the trace criterion with Clifford sign bookkeeping on diagonal involutions,
and on block rotations of order 2^m for m = 2, 3."""

import itertools
import sys
import time

from afspin.intlin import IntMatrix
from afspin.spin import clifford_oracle, lemma_gg_doubling


def diag(n, P):
    return IntMatrix.from_rows([[(-1 if i in P else 1) if i == j else 0 for j in range(n)] for i in range(n)])


def main(max_n=8):
    start = time.perf_counter()
    rows = []
    for n in range(1, max_n + 1):
        agree = total = 0
        for size in range(2, n + 1, 2):
            for P in itertools.combinations(range(n), size):
                doubles, j = lemma_gg_doubling(diag(n, P), 1)
                total += 1
                agree += doubles == (clifford_oracle(P) == 4)
        rows.append((n, total, agree))
    for n, total, agree in rows:
        print(f"n={n}: {agree}/{total} patterns agree")

    # the companion matrix of x^(2^(m-1)) + 1 has order 2^m; its 2^(m-1) power is -1
    for m in (2, 3):
        d = 1 << (m - 1)
        comp = [[0] * d for _ in range(d)]
        for i in range(1, d):
            comp[i][i - 1] = 1
        comp[0][d - 1] = -1
        A = IntMatrix.block_diagonal([IntMatrix.from_rows(comp), IntMatrix.identity(2)])
        print(f"m={m}: companion block of size {d}, (doubles, j) = {lemma_gg_doubling(A, m)}")
    print(f"elapsed {time.perf_counter() - start:.3f}s")
    return 0 if all(a == t for _, t, a in rows) else 1


if __name__ == "__main__":
    sys.exit(main())

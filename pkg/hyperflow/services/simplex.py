"""Exact-rational linear algebra: phase-one simplex feasibility and Gauss-Jordan solves."""

import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

logger = logging.getLogger(__name__)

ZERO = Fraction(0)


class SimplexTableau:
    """Phase-one tableau for ``A x = b, x >= 0`` with one artificial column per row.

    Pivoting follows Bland's rule (lowest eligible column enters, ties on the
    ratio test go to the lowest basic column), so it cannot cycle.
    """

    def __init__(self, rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction], n_vars: int):
        self.m = len(rows)
        self.n = n_vars
        width = n_vars + self.m
        self.A: List[List[Fraction]] = []
        self.b: List[Fraction] = []
        for i, (row, value) in enumerate(zip(rows, rhs)):
            sign = -1 if value < 0 else 1
            full = [Fraction(sign * x) for x in row] + [ZERO] * self.m
            full[n_vars + i] = Fraction(1)
            self.A.append(full)
            self.b.append(Fraction(sign * value))
        self.basis = [n_vars + i for i in range(self.m)]
        # Reduced costs of "minimise the sum of artificials"
        self.c = [-sum((self.A[i][j] for i in range(self.m)), ZERO) for j in range(n_vars)] + [ZERO] * self.m
        self.objective = -sum(self.b, ZERO)
        self.width = width
        self.pivots = 0

    def pivot(self, i: int, j: int) -> None:
        row = self.A[i]
        piv = row[j]
        if piv != 1:
            self.A[i] = row = [x / piv for x in row]
            self.b[i] /= piv
        for k in range(self.m):
            f = self.A[k][j]
            if k != i and f:
                other = self.A[k]
                self.A[k] = [x - f * y for x, y in zip(other, row)]
                self.b[k] -= f * self.b[i]
        f = self.c[j]
        if f:
            self.c = [x - f * y for x, y in zip(self.c, row)]
            self.objective -= f * self.b[i]
        self.basis[i] = j
        self.pivots += 1

    def step(self) -> bool:
        """One Bland pivot; False once no column can improve the objective."""
        entering = next((j for j in range(self.width) if self.c[j] < 0), None)
        if entering is None:
            return False
        candidates = [
            (self.b[i] / self.A[i][entering], self.basis[i], i)
            for i in range(self.m)
            if self.A[i][entering] > 0
        ]
        _, _, leaving = min(candidates)
        self.pivot(leaving, entering)
        return True

    def solve(self) -> Optional[List[Fraction]]:
        while self.step():
            pass
        logger.debug("simplex %dx%d finished after %d pivots", self.m, self.n, self.pivots)
        if self.objective != 0:
            return None
        x = [ZERO] * self.n
        for i, var in enumerate(self.basis):
            if var < self.n:
                x[var] = self.b[i]
        return x


def find_feasible(
    rows: Sequence[Sequence[Fraction]],
    rhs: Sequence[Fraction],
    n_vars: int,
) -> Optional[List[Fraction]]:
    """A nonnegative solution of ``rows x = rhs``, or None when there is none."""
    if not rows:
        return [ZERO] * n_vars
    return SimplexTableau(rows, rhs, n_vars).solve()


def gauss_jordan(
    matrix: Sequence[Sequence[Fraction]],
    rhs: Sequence[Dict[object, Fraction]],
) -> List[Dict[object, Fraction]]:
    """Solve ``matrix X = rhs`` for a nonsingular square matrix.

    Right-hand sides are sparse rows keyed by column label, so one call
    solves for every output column at once.
    """
    n = len(matrix)
    a = [[Fraction(x) for x in row] for row in matrix]
    b = [dict(row) for row in rhs]
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot_row is None:
            raise ZeroDivisionError("singular system")
        if pivot_row != col:
            a[col], a[pivot_row] = a[pivot_row], a[col]
            b[col], b[pivot_row] = b[pivot_row], b[col]
        piv = a[col][col]
        if piv != 1:
            a[col] = [x / piv for x in a[col]]
            b[col] = {k: v / piv for k, v in b[col].items()}
        for r in range(n):
            f = a[r][col]
            if r != col and f:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                row = b[r]
                for k, v in b[col].items():
                    row[k] = row.get(k, ZERO) - f * v
                b[r] = {k: v for k, v in row.items() if v}
    return b

"""Two-phase primal simplex over exact rationals.

Solves ``maximize c.x  subject to  A x <= b, x >= 0`` with every quantity a
:class:`fractions.Fraction`. Pivoting follows Bland's rule, so the method
terminates on degenerate problems. Rows with a negative right-hand side are
negated and given an artificial variable; phase one drives the artificials to
zero before the real objective is optimized.
"""

from dataclasses import dataclass, field
from fractions import Fraction

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPSolution:
    status: str
    x: list = field(default_factory=list)
    objective: Fraction = None
    # reduced costs of the final tableau for the original variables
    # (all <= 0 at a maximizing vertex)
    reduced_costs: list = field(default_factory=list)
    # dual multipliers y >= 0 with A^T y >= c and b.y == objective
    duals: list = field(default_factory=list)
    pivots: int = 0


class _Tableau:
    """Dense tableau; row ``i`` reads ``x_basis[i] + sum_j T[i][j] x_j = rhs[i]``."""

    def __init__(self, rows, rhs, basis):
        self.T = rows
        self.rhs = rhs
        self.basis = basis
        self.ncols = len(rows[0]) if rows else 0
        self.pivots = 0

    def pivot(self, r, c):
        T = self.T
        prow = T[r]
        piv = prow[c]
        if piv != 1:
            inv = 1 / piv
            T[r] = prow = [v * inv for v in prow]
            self.rhs[r] *= inv
        for i, row in enumerate(T):
            if i == r:
                continue
            f = row[c]
            if f:
                T[i] = [a - f * b if b else a for a, b in zip(row, prow)]
                self.rhs[i] -= f * self.rhs[r]
        self.basis[r] = c
        self.pivots += 1

    def reduced(self, cost):
        """Reduced costs ``cost_j - c_B . column_j`` for every column."""
        cb = [cost[b] for b in self.basis]
        out = list(cost)
        for i, row in enumerate(self.T):
            w = cb[i]
            if w:
                out = [o - w * v if v else o for o, v in zip(out, row)]
        return out

    def run(self, cost, allowed):
        """Maximize ``cost`` over the current basis with Bland's rule."""
        while True:
            red = self.reduced(cost)
            enter = next((j for j in range(self.ncols) if allowed[j] and red[j] > 0), None)
            if enter is None:
                return OPTIMAL, red
            best = None
            for i, row in enumerate(self.T):
                a = row[enter]
                if a > 0:
                    ratio = self.rhs[i] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED, red
            self.pivot(best[1], enter)


def maximize(c, A, b):
    """Maximize ``c.x`` subject to ``A x <= b`` and ``x >= 0``, exactly.

    ``c``, ``A`` and ``b`` may hold ints or Fractions; they are converted.
    The returned :class:`LPSolution` carries the primal vertex, the optimal
    objective, reduced costs and a dual certificate.
    """
    c = [Fraction(v) for v in c]
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    m, n = len(A), len(c)
    if any(len(row) != n for row in A) or len(b) != m:
        raise ValueError("inconsistent LP dimensions")

    # columns: n structural, m slacks, then one artificial per negated row
    art_rows = [i for i in range(m) if b[i] < 0]
    nart = len(art_rows)
    width = n + m + nart
    rows, rhs, basis = [], [], []
    zero, one = Fraction(0), Fraction(1)
    for i in range(m):
        row = [zero] * width
        sign = -1 if b[i] < 0 else 1
        for j in range(n):
            row[j] = sign * A[i][j]
        row[n + i] = Fraction(sign)
        rhs.append(sign * b[i])
        if sign < 0:
            k = n + m + art_rows.index(i)
            row[k] = one
            basis.append(k)
        else:
            basis.append(n + i)
        rows.append(row)
    tab = _Tableau(rows, rhs, basis)

    if nart:
        phase1 = [zero] * (n + m) + [Fraction(-1)] * nart
        tab.run(phase1, [True] * width)
        if sum(tab.rhs[i] for i, bv in enumerate(tab.basis) if bv >= n + m) != 0:
            return LPSolution(INFEASIBLE, pivots=tab.pivots)
        # drive degenerate artificials out of the basis
        for i, bv in enumerate(tab.basis):
            if bv >= n + m:
                j = next((j for j in range(n + m) if tab.T[i][j] != 0), None)
                if j is not None:
                    tab.pivot(i, j)

    cost = c + [zero] * (m + nart)
    allowed = [True] * (n + m) + [False] * nart
    status, red = tab.run(cost, allowed)
    if status == UNBOUNDED:
        return LPSolution(UNBOUNDED, pivots=tab.pivots)

    x = [zero] * width
    for i, bv in enumerate(tab.basis):
        x[bv] = tab.rhs[i]
    obj = sum(ci * xi for ci, xi in zip(c, x[:n]))
    # the dual of row i is minus the reduced cost of its slack column
    duals = [-red[n + i] for i in range(m)]
    return LPSolution(OPTIMAL, x[:n], obj, red[:n], duals, tab.pivots)

"""Exact rational feasibility for systems ``A x = b, x >= 0``.

The authoritative solver is a two-phase simplex over ``Fraction`` with
Bland's rule.  Large systems are first handed to HiGHS in
floating point; its answer is only used to guess a support, which is then
solved and checked exactly.  Nothing leaves this module unless it has been
verified in exact arithmetic, except infeasibility verdicts explicitly
requested as heuristic (``certify_infeasible=False``).
"""

from __future__ import annotations

import logging
from collections.abc import Mapping
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix

__all__ = ["LinearSystem", "exact_feasible", "solve_on_support"]

log = logging.getLogger(__name__)

ZERO = Fraction(0)
# below this size the exact simplex is cheaper than a HiGHS round trip
SMALL_VARS = 24
SMALL_ROWS = 24
_UNKNOWN = object()


def exact_feasible(rows: list[Mapping[int, Fraction]], rhs: list[Fraction], nvars: int,
                   columns: list[int] | None = None,
                   costs: list[Fraction] | None = None) -> dict[int, Fraction] | None:
    """Simplex over ``Fraction``; returns a nonnegative solution or ``None`` if infeasible.

    ``columns`` restricts the variables that may be nonzero.  With ``costs`` a
    second phase minimises the cost of the feasible point.
    """
    cols = sorted(set(range(nvars) if columns is None else columns))
    pos = {c: i for i, c in enumerate(cols)}
    n = len(cols)
    tab: list[list[Fraction]] = []
    b: list[Fraction] = []
    for row, r in zip(rows, rhs):
        dense = [ZERO] * n
        for c, v in row.items():
            if c in pos:  # variables outside ``columns`` are fixed at zero
                dense[pos[c]] = Fraction(v)
        if r < 0:
            dense = [-v for v in dense]
            r = -r
        tab.append(dense)
        b.append(Fraction(r))
    m = len(tab)
    # artificial basis; artificials never re-enter so their columns are not stored
    basis: list[int] = [-1 - i for i in range(m)]
    cost = [-sum((tab[i][j] for i in range(m)), ZERO) for j in range(n)]
    obj = [-sum(b, ZERO)]

    def pivot(i: int, enter: int, cost_row: list[Fraction], objective: list[Fraction]) -> None:
        piv = tab[i][enter]
        prow = [v / piv for v in tab[i]]
        pb = b[i] / piv
        tab[i], b[i] = prow, pb
        nz = [j for j, v in enumerate(prow) if v]
        for k in range(m):
            if k != i:
                f = tab[k][enter]
                if f:
                    rk = tab[k]
                    for j in nz:
                        rk[j] -= f * prow[j]
                    b[k] -= f * pb
        f = cost_row[enter]
        if f:
            for j in nz:
                cost_row[j] -= f * prow[j]
            objective[0] -= f * pb
        basis[i] = enter

    def iterate(cost_row: list[Fraction], objective: list[Fraction]) -> None:
        while True:
            enter = next((j for j in range(n) if cost_row[j] < 0), None)
            if enter is None:
                return
            best = None
            # an artificial basic at zero must leave before it can turn positive
            art = next((i for i in range(m) if basis[i] < 0 and not b[i] and tab[i][enter]), None)
            if art is not None:
                pivot(art, enter, cost_row, objective)
                continue
            for i in range(m):
                a = tab[i][enter]
                if a > 0:
                    key = (b[i] / a, basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return
            pivot(best[1], enter, cost_row, objective)

    iterate(cost, obj)
    if obj[0] != 0:
        return None
    if costs is not None and any(costs[c] for c in cols):
        c2 = [Fraction(costs[c]) for c in cols]
        red = list(c2)
        val = [ZERO]
        for i, j in enumerate(basis):
            if j >= 0 and c2[j]:
                f = c2[j]
                for jj in range(n):
                    red[jj] -= f * tab[i][jj]
                val[0] -= f * b[i]
        iterate(red, val)
    x: dict[int, Fraction] = {}
    for i, j in enumerate(basis):
        if j >= 0 and b[i]:
            x[cols[j]] = b[i]
    return x


def solve_on_support(rows: list[Mapping[int, Fraction]], rhs: list[Fraction],
                     support: list[int]) -> dict[int, Fraction] | None:
    """Exact Gaussian elimination restricted to ``support``; free columns set to zero.

    Returns the solution only if it is nonnegative and satisfies every row.
    """
    sup = set(support)
    pivots: dict[int, tuple[dict[int, Fraction], Fraction]] = {}
    for row, r in zip(rows, rhs):
        cur = {c: Fraction(v) for c, v in row.items() if c in sup and v}
        cur_r = Fraction(r)
        for c in [c for c in cur if c in pivots]:
            f = cur.get(c)
            if not f:
                continue
            prow, pr = pivots[c]
            for cc, vv in prow.items():
                nv = cur.get(cc, ZERO) - f * vv
                if nv:
                    cur[cc] = nv
                else:
                    cur.pop(cc, None)
            cur_r -= f * pr
        if not cur:
            if cur_r:
                return None
            continue
        pc = min(cur, key=lambda c: (len(cur), c))
        pv = cur[pc]
        prow = {c: v / pv for c, v in cur.items()}
        pr = cur_r / pv
        for c, (orow, orr) in list(pivots.items()):
            f = orow.get(pc)
            if f:
                for cc, vv in prow.items():
                    nv = orow.get(cc, ZERO) - f * vv
                    if nv:
                        orow[cc] = nv
                    else:
                        orow.pop(cc, None)
                pivots[c] = (orow, orr - f * pr)
        pivots[pc] = (prow, pr)
    x = {c: pr for c, (prow, pr) in pivots.items() if pr}
    if any(v < 0 for v in x.values()):
        return None
    for row, r in zip(rows, rhs):
        if sum((Fraction(v) * x.get(c, ZERO) for c, v in row.items()), ZERO) != r:
            return None
    return x


class LinearSystem:
    """Incrementally built sparse system of equalities over nonnegative variables."""

    def __init__(self) -> None:
        self.keys: list[object] = []
        self.costs: list[float] = []
        self.rows: list[dict[int, Fraction]] = []
        self.rhs: list[Fraction] = []
        self.trivially_infeasible = False

    def var(self, key: object = None, cost: float = 0.0) -> int:
        self.keys.append(key)
        self.costs.append(cost)
        return len(self.keys) - 1

    @property
    def nvars(self) -> int:
        return len(self.keys)

    def eq(self, coeffs: Mapping[int, Fraction], rhs: Fraction | int = 0) -> None:
        row = {c: Fraction(v) for c, v in coeffs.items() if v}
        rhs = Fraction(rhs)
        if not row:
            if rhs:
                self.trivially_infeasible = True
            return
        self.rows.append(row)
        self.rhs.append(rhs)

    def solve(self, *, certify_infeasible: bool = True) -> dict[int, Fraction] | None:
        """Exact nonnegative solution, or ``None``.

        With ``certify_infeasible=False`` a floating-point infeasibility verdict
        is trusted; use that only where ``None`` is not reported as a proof.
        """
        if self.trivially_infeasible:
            return None
        if not self.rows:
            return {}
        n = self.nvars
        if n <= SMALL_VARS and len(self.rows) <= SMALL_ROWS:
            return exact_feasible(self.rows, self.rhs, n, costs=self._exact_costs())
        guess = self._float_guess()
        if guess is _UNKNOWN:
            return exact_feasible(self.rows, self.rhs, n)
        if guess is None:
            if not certify_infeasible:
                return None
            return exact_feasible(self.rows, self.rhs, n)
        support = [j for j, v in enumerate(guess) if v > 1e-9]
        x = solve_on_support(self.rows, self.rhs, support)
        if x is None:
            log.debug("support certification failed; exact simplex on support")
            x = exact_feasible(self.rows, self.rhs, n, columns=support)
        if x is None:
            x = exact_feasible(self.rows, self.rhs, n)
        return x

    def _exact_costs(self) -> list[Fraction] | None:
        if not any(self.costs):
            return None
        return [Fraction(c) for c in self.costs]

    def _float_guess(self):
        data, ri, ci = [], [], []
        for i, row in enumerate(self.rows):
            for c, v in row.items():
                data.append(float(v))
                ri.append(i)
                ci.append(c)
        a = csr_matrix((data, (ri, ci)), shape=(len(self.rows), self.nvars))
        res = linprog(np.asarray(self.costs, dtype=float), A_eq=a,
                      b_eq=np.asarray([float(r) for r in self.rhs]), bounds=(0, None),
                      method="highs-ds")
        if res.status == 0:
            return res.x
        if res.status == 2:
            return None
        log.debug("HiGHS status %s: %s", res.status, res.message)
        return _UNKNOWN

    def value(self, x: Mapping[int, Fraction], var: int) -> Fraction:
        return x.get(var, ZERO)

"""Exact rational LP feasibility via a phase-1 simplex with Bland's rule.

Solves "find x >= 0 with A x = b" over Fractions.  Infeasibility comes with
a Farkas certificate: a row vector y with y.A <= 0 componentwise and
y.b > 0, which proves no nonnegative solution exists and converts directly
into a separating hyperplane for the hull-membership problems built on top.
Bland's pivoting rule guarantees termination under degeneracy; there is no
epsilon anywhere.
"""

from __future__ import annotations

from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def feasible_point(
    rows: list[list[Fraction]], rhs: list[Fraction]
) -> tuple[list[Fraction] | None, list[Fraction] | None]:
    """Solve {x >= 0 : rows . x = rhs}.

    Returns (x, None) with an exact solution, or (None, y) with an exact
    Farkas certificate in terms of the rows as given.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    for row in rows:
        if len(row) != n:
            raise ValueError("ragged constraint matrix")
    if m != len(rhs):
        raise ValueError("rhs length does not match row count")
    if m == 0:
        return [], None

    # Sign-normalize so the artificial start basis is feasible.
    flip = [rhs[i] < 0 for i in range(m)]
    tab: list[list[Fraction]] = []
    for i in range(m):
        if flip[i]:
            row = [-v for v in rows[i]] + [ZERO] * m + [-rhs[i]]
        else:
            row = list(rows[i]) + [ZERO] * m + [rhs[i]]
        row[n + i] = ONE
        tab.append(row)
    basis = list(range(n, n + m))

    # Reduced costs for "minimize sum of artificials" (cost 1 on artificials).
    red = [ZERO] * (n + m)
    for j in range(n):
        red[j] = -sum(tab[i][j] for i in range(m))
    # Artificial columns start basic with reduced cost 0.

    while True:
        enter = None
        for j in range(n + m):
            if red[j] < 0:
                enter = j
                break
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            coef = tab[i][enter]
            if coef > 0:
                ratio = tab[i][-1] / coef
                if (
                    best is None
                    or ratio < best
                    or (ratio == best and basis[i] < basis[leave])
                ):
                    best = ratio
                    leave = i
        if leave is None:  # pragma: no cover - phase 1 is always bounded
            raise AssertionError("unbounded phase-1 objective")
        _pivot(tab, red, basis, leave, enter)

    objective = sum(tab[i][-1] for i in range(m) if basis[i] >= n)
    if objective == 0:
        x = [ZERO] * n
        for i in range(m):
            if basis[i] < n:
                x[basis[i]] = tab[i][-1]
        return x, None

    # y = c_B . B^{-1}; the final artificial columns are exactly B^{-1}.
    y = [
        sum(tab[i][n + k] for i in range(m) if basis[i] >= n) for k in range(m)
    ]
    y = [-v if flip[k] else v for k, v in enumerate(y)]
    return None, y


def _pivot(
    tab: list[list[Fraction]],
    red: list[Fraction],
    basis: list[int],
    leave: int,
    enter: int,
) -> None:
    piv_row = tab[leave]
    piv = piv_row[enter]
    inv = ONE / piv
    for j in range(len(piv_row)):
        if piv_row[j]:
            piv_row[j] *= inv
    for i, row in enumerate(tab):
        if i == leave:
            continue
        factor = row[enter]
        if factor:
            for j in range(len(row)):
                if piv_row[j]:
                    row[j] -= factor * piv_row[j]
    factor = red[enter]
    if factor:
        for j in range(len(red)):
            if piv_row[j]:
                red[j] -= factor * piv_row[j]
    basis[leave] = enter

"""Dense two-phase simplex over exact Fractions.

This is the certified-correct fallback behind the LP toolkit: the fast path
solves with HiGHS and verifies optimality exactly via a rounded dual pair;
whenever that certification fails, the LP lands here. Bland's rule keeps the
method finite; everything is plain Fraction arithmetic, no tolerances.
"""

from fractions import Fraction
from typing import List, Sequence, Tuple

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

ZERO = Fraction(0)
ONE = Fraction(1)


def exact_simplex(
    objective: Sequence[Fraction],
    rows: Sequence[Tuple[Sequence[Fraction], str, Fraction]],
) -> Tuple[str, List[Fraction], Fraction]:
    """Minimize objective . x subject to rows and x >= 0.

    Each row is (coefficients, sense, rhs) with sense one of '<=', '>=', '=='.
    Returns (status, x, objective_value); x is empty unless status is optimal.
    """
    nvars = len(objective)
    senses = []
    data = []
    for coefs, sense, rhs in rows:
        coefs = [Fraction(c) for c in coefs]
        rhs = Fraction(rhs)
        if len(coefs) != nvars:
            raise ValueError("row length mismatch")
        if rhs < 0:
            coefs = [-c for c in coefs]
            rhs = -rhs
            sense = {"<=": ">=", ">=": "<=", "==": "=="}[sense]
        senses.append(sense)
        data.append((coefs, rhs))
    m = len(data)

    # column layout: structural | slack/surplus | artificial
    nslack = sum(1 for s in senses if s != "==")
    slack_of = {}
    j = nvars
    for i, s in enumerate(senses):
        if s != "==":
            slack_of[i] = j
            j += 1
    art_of = {}
    # >= rows and == rows need an artificial basis member; <= rows use slack
    for i, s in enumerate(senses):
        if s != "<=":
            art_of[i] = j
            j += 1
    ncols = j

    tableau: List[List[Fraction]] = []
    basis: List[int] = []
    for i, (coefs, rhs) in enumerate(data):
        row = coefs + [ZERO] * (ncols - nvars) + [rhs]
        s = senses[i]
        if s == "<=":
            row[slack_of[i]] = ONE
            basis.append(slack_of[i])
        elif s == ">=":
            row[slack_of[i]] = -ONE
            row[art_of[i]] = ONE
            basis.append(art_of[i])
        else:
            row[art_of[i]] = ONE
            basis.append(art_of[i])
        tableau.append(row)

    art_cols = set(art_of.values())

    def run_phase(cost: List[Fraction], banned: set) -> str:
        # reduced-cost row for the current basis
        red = list(cost) + [ZERO]
        for i, b in enumerate(basis):
            cb = cost[b]
            if cb != ZERO:
                row = tableau[i]
                for col in range(ncols + 1):
                    if row[col] != ZERO:
                        red[col] -= cb * row[col]
        while True:
            enter = -1
            for col in range(ncols):
                if col in banned:
                    continue
                if red[col] < ZERO:
                    enter = col
                    break
            if enter < 0:
                return OPTIMAL
            leave = -1
            best_ratio = None
            for i in range(m):
                a = tableau[i][enter]
                if a > ZERO:
                    ratio = tableau[i][ncols] / a
                    if (
                        best_ratio is None
                        or ratio < best_ratio
                        or (ratio == best_ratio and basis[i] < basis[leave])
                    ):
                        best_ratio = ratio
                        leave = i
            if leave < 0:
                return UNBOUNDED
            _pivot(tableau, red, basis, leave, enter, ncols)

    def _pivot(tab, red, basis, leave, enter, ncols):
        piv_row = tab[leave]
        piv = piv_row[enter]
        if piv != ONE:
            inv = ONE / piv
            for col in range(ncols + 1):
                if piv_row[col] != ZERO:
                    piv_row[col] *= inv
        for row in tab:
            if row is piv_row:
                continue
            factor = row[enter]
            if factor != ZERO:
                for col in range(ncols + 1):
                    if piv_row[col] != ZERO:
                        row[col] -= factor * piv_row[col]
        factor = red[enter]
        if factor != ZERO:
            for col in range(ncols + 1):
                if piv_row[col] != ZERO:
                    red[col] -= factor * piv_row[col]
        basis[leave] = enter

    if art_cols:
        phase1_cost = [ZERO] * ncols
        for col in art_cols:
            phase1_cost[col] = ONE
        status = run_phase(phase1_cost, banned=set())
        assert status == OPTIMAL  # phase 1 is bounded below by 0
        value = sum(
            tableau[i][ncols] for i in range(m) if basis[i] in art_cols
        )
        if value != ZERO:
            return INFEASIBLE, [], ZERO
        # pivot lingering zero-level artificials out of the basis if possible
        for i in range(m):
            if basis[i] in art_cols:
                row = tableau[i]
                enter = -1
                for col in range(ncols):
                    if col not in art_cols and row[col] != ZERO:
                        enter = col
                        break
                if enter >= 0:
                    _pivot(tableau, [ZERO] * (ncols + 1), basis, i, enter, ncols)
                # else: redundant row, harmless to leave (rhs is 0)

    phase2_cost = [Fraction(c) for c in objective] + [ZERO] * (ncols - nvars)
    status = run_phase(phase2_cost, banned=art_cols)
    if status != OPTIMAL:
        return status, [], ZERO
    x = [ZERO] * nvars
    for i, b in enumerate(basis):
        if b < nvars:
            x[b] = tableau[i][ncols]
    value = sum(Fraction(objective[jj]) * x[jj] for jj in range(nvars))
    return OPTIMAL, x, value

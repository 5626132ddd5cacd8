# -*- coding: utf-8 -*-

"""
Revised primal simplex engine with basis and tableau access.

Every LinearProgram is brought into the standard form

    min c^T s  s.t.  A s = b, s >= 0, b >= 0

by shifting each variable against a finite bound, splitting free variables,
turning finite upper bounds into rows and appending one slack column per
inequality row. The basis is refactorized with LU at every iteration, which
also yields the condition estimate reported with each solution.
"""

import logging
import warnings

import numpy as np
import scipy.linalg

from ntucore.exceptions import DimensionMismatch, NumericalBreakdown, SingularBasis
from ntucore.system import ConstraintSystem

logger = logging.getLogger('ntucore')


class Status:
    """Outcome of a linear program solve"""

    OPTIMAL = 'Optimal'
    INFEASIBLE = 'Infeasible'
    UNBOUNDED = 'Unbounded'


class LinearProgram(ConstraintSystem):
    """ A ConstraintSystem with a linear objective.

    Args:
        size - number of variables
        objective - objective coefficients
        sense - 'max' or 'min'
        rows, lower, upper, names - as for ConstraintSystem
    """

    def __init__(self, size, objective=None, sense='max', rows=(), lower=None, upper=None, names=None):

        super().__init__(size, rows=rows, lower=lower, upper=upper, names=names)

        if objective is None:
            objective = np.zeros(self.size)

        self.objective = np.array(objective, dtype=float)

        if self.objective.shape != (self.size,):
            raise DimensionMismatch(f"Objective has {self.objective.size} coefficients, expected {self.size}")

        if sense not in ('max', 'min'):
            raise ValueError(f"Objective sense must be 'max' or 'min', not '{sense}'")

        self.sense = sense

    @classmethod
    def fromSystem(cls, system, objective, sense='max'):
        """Attach an objective to an existing ConstraintSystem"""

        return cls(
            system.size,
            objective=objective,
            sense=sense,
            rows=system.rows,
            lower=system.lower,
            upper=system.upper,
            names=system.names,
        )

    def _copyArgs(self):
        args = super()._copyArgs()
        args['objective'] = self.objective
        args['sense'] = self.sense
        return args

    def withObjective(self, objective, sense=None):
        """Return the same polyhedron with a different objective"""

        args = self._copyArgs()
        args['objective'] = objective

        if sense is not None:
            args['sense'] = sense

        return self.__class__(**args)

    def evaluate(self, point):
        return float(self.objective @ np.asarray(point, dtype=float))

    def dump(self):
        """Render the program in a CPLEX-LP-like text format (debugging aid)"""

        def term_list(coefficients):
            terms = []

            for name, c in zip(self.names, coefficients):
                if c == 0:
                    continue

                sign = '-' if c < 0 else '+'
                terms.append(f"{sign} {abs(c):.12g} {name}")

            if not terms:
                return "0"

            text = ' '.join(terms)

            return text[2:] if text.startswith('+ ') else text

        lines = ["Maximize" if self.sense == 'max' else "Minimize"]
        lines.append(f" obj: {term_list(self.objective)}")
        lines.append("Subject To")

        for idx, (coefficients, sense, rhs) in enumerate(self.rows):
            op = '=' if sense == '==' else sense
            lines.append(f" c{idx}: {term_list(coefficients)} {op} {rhs:.12g}")

        lines.append("Bounds")

        for name, lo, hi in zip(self.names, self.lower, self.upper):
            if np.isinf(lo) and np.isinf(hi):
                lines.append(f" {name} free")
            else:
                lo_text = "-inf" if np.isinf(lo) else f"{lo:.12g}"
                hi_text = "+inf" if np.isinf(hi) else f"{hi:.12g}"
                lines.append(f" {lo_text} <= {name} <= {hi_text}")

        lines.append("End")

        return '\n'.join(lines) + '\n'

    def __str__(self):
        return f"LinearProgram<{self.sense}, {self.size} variables, {len(self.rows)} rows>"


class StandardForm(object):
    """ Standard-form image of a LinearProgram.

    Column layout: one column per shifted variable (plus a negative part for
    each free variable), then one slack column per inequality row, bound rows
    first and program rows after them, in row order.

    Each column also carries the affine expression of its value in the
    original coordinates (gradient, constant), or None for split columns.
    """

    def __init__(self, lp):

        self.lp = lp
        n = lp.size

        # Per original variable: (std column, sign, shift, negative-part column)
        self.mapping = []

        columns = 0
        bound_rows = []

        for j in range(n):
            lo = lp.lower[j]
            hi = lp.upper[j]

            if np.isfinite(lo):
                self.mapping.append((columns, 1.0, lo, None))
                if np.isfinite(hi):
                    bound_rows.append((j, hi))
                columns += 1
            elif np.isfinite(hi):
                self.mapping.append((columns, -1.0, hi, None))
                columns += 1
            else:
                self.mapping.append((columns, 1.0, 0.0, columns + 1))
                columns += 2

        self.structural = columns

        expressions = [None] * columns

        for j, (col, sign, shift, neg) in enumerate(self.mapping):
            if neg is None:
                grad = np.zeros(n)
                grad[j] = sign
                expressions[col] = (grad, -sign * shift)

        # Rows in original terms: (coefficients, sense, rhs, slack expression)
        rows = []

        for j, hi in bound_rows:
            coefficients = np.zeros(n)
            coefficients[j] = 1.0
            grad = np.zeros(n)
            grad[j] = -1.0
            rows.append((coefficients, '<=', hi, (grad, hi)))

        self.bound_rows = len(bound_rows)

        for coefficients, sense, rhs in lp.rows:
            if sense == '<=':
                rows.append((coefficients, sense, rhs, (-coefficients, rhs)))
            elif sense == '>=':
                rows.append((coefficients, sense, rhs, (coefficients.copy(), -rhs)))
            else:
                rows.append((coefficients, sense, rhs, None))

        m = len(rows)
        slack_count = sum(1 for row in rows if row[1] != '==')

        A = np.zeros((m, columns + slack_count))
        b = np.zeros(m)

        # Column holding the slack of each row, and whether it enters with +1
        self.slack_column = [None] * m
        self.flipped = np.zeros(m, dtype=bool)

        slack = columns

        for i, (coefficients, sense, rhs, expression) in enumerate(rows):
            value = rhs

            for j, (col, sign, shift, neg) in enumerate(self.mapping):
                a = coefficients[j]

                if a == 0:
                    continue

                A[i, col] += a * sign
                value -= a * shift

                if neg is not None:
                    A[i, neg] -= a

            if sense != '==':
                A[i, slack] = 1.0 if sense == '<=' else -1.0
                self.slack_column[i] = slack
                expressions.append(expression)
                slack += 1

            b[i] = value

            if value < 0:
                A[i, :] *= -1.0
                b[i] = -value
                self.flipped[i] = True

        self.A = A
        self.b = b
        self.expressions = expressions

        # Minimization costs and the constant offset of the objective
        objective = lp.objective if lp.sense == 'min' else -lp.objective

        self.c = np.zeros(A.shape[1])
        self.offset = 0.0

        for j, (col, sign, shift, neg) in enumerate(self.mapping):
            self.c[col] += objective[j] * sign
            self.offset += objective[j] * shift

            if neg is not None:
                self.c[neg] -= objective[j]

    @property
    def rowCount(self):
        return self.A.shape[0]

    @property
    def columnCount(self):
        return self.A.shape[1]

    def unitSlack(self, i):
        """Return the slack column of row i if it enters with coefficient +1"""

        col = self.slack_column[i]

        if col is None or self.A[i, col] != 1.0:
            return None

        return col

    def toOriginal(self, s):
        """Map a standard-form vector to original coordinates"""

        x = np.zeros(self.lp.size)

        for j, (col, sign, shift, neg) in enumerate(self.mapping):
            x[j] = sign * s[col] + shift

            if neg is not None:
                x[j] -= s[neg]

        return x

    def directionToOriginal(self, d):
        """Map a standard-form direction to original coordinates (no shift)"""

        x = np.zeros(self.lp.size)

        for j, (col, sign, shift, neg) in enumerate(self.mapping):
            x[j] = sign * d[col]

            if neg is not None:
                x[j] -= d[neg]

        return x


class BasicSolution(object):
    """ Result of a simplex solve.

    Attributes:
        status - one of Status.OPTIMAL, Status.INFEASIBLE, Status.UNBOUNDED
        x - primal values in original coordinates (None unless optimal)
        objective_value - objective at x in the program's own sense
        basis - ordered basic standard-form column indices
        rows - standard-form rows kept in the final basis (redundant rows dropped)
        row_count - number of standard-form rows of the solved program
        dual_value - dual objective y^T b in the program's own sense
        iterations - number of pivots over both phases
        condition_estimate - LU pivot-ratio estimate of the final basis
    """

    def __init__(self, status, x=None, objective_value=None, basis=(), rows=(), dual_value=None, iterations=0, condition_estimate=1.0, row_count=0):
        self.status = status
        self.x = x
        self.objective_value = objective_value
        self.basis = tuple(basis)
        self.rows = tuple(rows)
        self.dual_value = dual_value
        self.iterations = iterations
        self.condition_estimate = condition_estimate
        self.row_count = row_count

    @property
    def optimal(self):
        return self.status == Status.OPTIMAL

    def __str__(self):
        if self.optimal:
            return f"BasicSolution<{self.status}, value={self.objective_value:.9g}>"

        return f"BasicSolution<{self.status}>"


class TableauRay(object):
    """ Edge direction obtained by increasing one nonbasic variable.

    Attributes:
        index - standard-form column of the nonbasic variable
        direction - direction in original coordinates
        gradient, constant - the nonbasic variable as an affine function of
                             the original coordinates (None for split columns)
    """

    def __init__(self, index, direction, gradient, constant):
        self.index = index
        self.direction = direction
        self.gradient = gradient
        self.constant = constant

    def value(self, point):
        """Evaluate the nonbasic variable at an original-space point"""
        return float(self.gradient @ point + self.constant)


class TableauRays(object):
    """ The translated simplicial cone at an optimal basic solution """

    def __init__(self, vertex, rays, basis_condition_estimate):
        self.vertex = vertex
        self.rays = list(rays)
        self.basis_condition_estimate = basis_condition_estimate

    def __len__(self):
        return len(self.rays)

    def __iter__(self):
        return iter(self.rays)

    def directions(self):
        if not self.rays:
            return np.zeros((0, self.vertex.size))

        return np.vstack([ray.direction for ray in self.rays])


class SimplexSolver(object):
    """ Two-phase revised primal simplex.

    A solver instance is not shareable between threads while solving.

    Args:
        rule - 'dantzig' (most negative reduced cost, falling back to Bland's
               rule after a run of degenerate pivots) or 'bland'
        max_iterations - pivot limit per phase (default scales with the size)
    """

    FEASIBILITY_TOL = 1e-7
    OPTIMALITY_TOL = 1e-9
    PIVOT_TOL = 1e-9
    CONDITION_LIMIT = 1e14
    DUALITY_TOL = 1e-6

    # Consecutive degenerate pivots tolerated before switching to Bland's rule
    DEGENERATE_RUN = 25

    def __init__(self, rule='dantzig', max_iterations=None):

        if rule not in ('dantzig', 'bland'):
            raise ValueError(f"Unknown pricing rule '{rule}'")

        self.rule = rule
        self.max_iterations = max_iterations
        self.iterations = 0
        self.history = []

    def _factor(self, B):
        """LU-factorize a basis matrix and return (factors, condition estimate)"""

        with warnings.catch_warnings():
            warnings.simplefilter('ignore', scipy.linalg.LinAlgWarning)
            lu, piv = scipy.linalg.lu_factor(B, check_finite=False)

        pivots = np.abs(np.diag(lu))

        if pivots.size == 0:
            return (lu, piv), 1.0

        smallest = pivots.min()

        if smallest <= self.PIVOT_TOL * max(1.0, pivots.max()) * 1e-6:
            raise SingularBasis("Basis matrix is singular", detail={'pivot': float(smallest)})

        estimate = float(pivots.max() / smallest)

        if estimate > self.CONDITION_LIMIT:
            raise NumericalBreakdown(
                f"Basis condition estimate {estimate:.3e} exceeds {self.CONDITION_LIMIT:.0e}",
                detail={'condition_estimate': estimate},
            )

        self.history.append(estimate)
        logger.debug(f"Basis factorized: size={B.shape[0]}, condition={estimate:.3e}")

        return (lu, piv), estimate

    def _iterate(self, A, b, c, basis, allowed):
        """ Run primal simplex pivots from a feasible basis.

        Args:
            A, b, c - standard-form data (rows already restricted)
            basis - list of basic column indices (modified in place)
            allowed - boolean mask of columns which may enter

        Returns:
            (status, basic values, factors, condition estimate)
        """

        m, n = A.shape
        limit = self.max_iterations or (50 * (m + n) + 1000)

        use_bland = self.rule == 'bland'
        degenerate_run = 0
        count = 0

        while True:
            factors, estimate = self._factor(A[:, basis])

            xB = scipy.linalg.lu_solve(factors, b, check_finite=False)
            y = scipy.linalg.lu_solve(factors, c[basis], trans=1, check_finite=False)

            reduced = c - A.T @ y

            candidates = allowed.copy()
            candidates[basis] = False
            candidates &= reduced < -self.OPTIMALITY_TOL

            if not np.any(candidates):
                return Status.OPTIMAL, xB, factors, estimate

            if use_bland:
                entering = int(np.flatnonzero(candidates)[0])
            else:
                masked = np.where(candidates, reduced, np.inf)
                entering = int(np.argmin(masked))

            d = scipy.linalg.lu_solve(factors, A[:, entering], check_finite=False)

            leaving = None
            best = np.inf

            for i in range(m):
                if d[i] <= self.PIVOT_TOL:
                    continue

                ratio = max(xB[i], 0.0) / d[i]

                if ratio < best - 1e-12:
                    best = ratio
                    leaving = i
                elif ratio <= best + 1e-12 and basis[i] < basis[leaving]:
                    leaving = i

            if leaving is None:
                return Status.UNBOUNDED, xB, factors, estimate

            if best <= self.FEASIBILITY_TOL:
                degenerate_run += 1

                if not use_bland and degenerate_run >= self.DEGENERATE_RUN:
                    logger.debug("Degenerate pivot run detected, switching to Bland's rule")
                    use_bland = True
            else:
                degenerate_run = 0

            logger.debug(f"Pivot: column {entering} enters, column {basis[leaving]} leaves, step {best:.6g}")

            basis[leaving] = entering

            count += 1
            self.iterations += 1

            if count > limit:
                raise NumericalBreakdown(f"Simplex exceeded {limit} pivots without terminating")

    def _initialBasis(self, std, rows, basis=None):
        """ Build a starting basis, adding artificial columns where needed.

        Returns (A, b, basis, artificial columns).
        """

        A = std.A[rows, :]
        b = std.b[rows]

        m = len(rows)
        n = std.columnCount

        if basis is None:
            basis = [std.unitSlack(i) for i in rows]

        extra = []

        for pos in range(m):
            if basis[pos] is None:
                column = np.zeros(m)
                column[pos] = 1.0
                extra.append(column)
                basis[pos] = n + len(extra) - 1

        artificial = list(range(n, n + len(extra)))

        if extra:
            A = np.hstack([A, np.column_stack(extra)])

        return A, b, basis, artificial

    def _driveOut(self, A, b, basis, rows, artificial):
        """ Remove artificial columns from a phase-1 optimal basis.

        Rows whose artificial cannot be pivoted out are redundant and dropped.
        """

        artificial = set(artificial)
        n = A.shape[1]

        pos = 0

        while pos < len(basis):
            if basis[pos] not in artificial:
                pos += 1
                continue

            factors, _ = self._factor(A[:, basis])

            unit = np.zeros(len(basis))
            unit[pos] = 1.0

            row = scipy.linalg.lu_solve(factors, unit, trans=1, check_finite=False) @ A

            replacement = None

            for j in range(n):
                if j in artificial or j in basis:
                    continue

                if abs(row[j]) > self.PIVOT_TOL:
                    replacement = j
                    break

            if replacement is not None:
                basis[pos] = replacement
                pos += 1
            else:
                logger.debug(f"Dropping redundant row {rows[pos]}")
                keep = [k for k in range(len(basis)) if k != pos]
                A = A[keep, :]
                b = b[keep]
                basis = [basis[k] for k in keep]
                rows = [rows[k] for k in keep]

        return A, b, basis, rows

    def _run(self, std, rows, basis=None):
        """Two-phase solve of the standard form restricted to the given rows"""

        rows = list(rows)
        A, b, basis, artificial = self._initialBasis(std, rows, basis)

        n = std.columnCount
        total = A.shape[1]

        if artificial:
            c1 = np.zeros(total)
            c1[artificial] = 1.0

            allowed = np.ones(total, dtype=bool)

            status, xB, _, _ = self._iterate(A, b, c1, basis, allowed)

            infeasibility = sum(xB[pos] for pos, col in enumerate(basis) if col in artificial)

            if infeasibility > self.FEASIBILITY_TOL * max(1.0, float(np.max(b, initial=0.0))):
                logger.debug(f"Phase 1 ended with infeasibility {infeasibility:.3e}")
                return BasicSolution(Status.INFEASIBLE, iterations=self.iterations, row_count=std.rowCount)

            A, b, basis, rows = self._driveOut(A, b, basis, rows, artificial)

        A = A[:, :n]

        allowed = np.ones(n, dtype=bool)
        status, xB, factors, estimate = self._iterate(A, b, std.c, basis, allowed)

        if status == Status.UNBOUNDED:
            return BasicSolution(Status.UNBOUNDED, basis=basis, rows=rows, iterations=self.iterations, row_count=std.rowCount)

        s = np.zeros(n)
        s[basis] = np.maximum(xB, 0.0)

        y = scipy.linalg.lu_solve(factors, std.c[basis], trans=1, check_finite=False)

        primal = float(std.c @ s)
        dual = float(y @ b)

        if abs(primal - dual) > self.DUALITY_TOL * max(1.0, abs(primal)):
            raise NumericalBreakdown(
                f"Primal value {primal:.12g} and dual value {dual:.12g} disagree",
                detail={'primal': primal, 'dual': dual},
            )

        sign = 1.0 if std.lp.sense == 'min' else -1.0

        x = std.toOriginal(s)

        return BasicSolution(
            Status.OPTIMAL,
            x=x,
            objective_value=std.lp.evaluate(x),
            basis=basis,
            rows=rows,
            dual_value=sign * (dual + std.offset),
            iterations=self.iterations,
            condition_estimate=estimate,
            row_count=std.rowCount,
        )

    def solve(self, lp):
        """Solve a LinearProgram from scratch"""

        std = StandardForm(lp)

        self.iterations = 0

        solution = self._run(std, range(std.rowCount))

        logger.debug(f"Solved {lp}: {solution} after {solution.iterations} pivots")

        return solution

    def resolve(self, solution, lp):
        """ Solve lp starting from the basis of a previous solution.

        lp must be the program the solution belongs to with rows appended
        at the end. Each appended row enters the basis with its own slack
        when the previous point satisfies it, otherwise with an artificial
        column which a short phase 1 drives to zero.
        """

        std = StandardForm(lp)

        old_rows = list(solution.rows)
        old_basis = list(solution.basis)

        if not old_rows or len(old_basis) != len(old_rows) or solution.row_count > std.rowCount:
            return self.solve(lp)

        new_rows = list(range(solution.row_count, std.rowCount))

        try:
            factors, _ = self._factor(std.A[np.ix_(old_rows, old_basis)])
        except SingularBasis:
            logger.warning("Warm start basis is singular, solving cold")
            return self.solve(lp)

        xB = scipy.linalg.lu_solve(factors, std.b[old_rows], check_finite=False)

        if np.any(xB < -self.FEASIBILITY_TOL):
            logger.warning("Warm start basis is not primal feasible, solving cold")
            return self.solve(lp)

        basis = list(old_basis)

        for i in new_rows:
            # Columns basic for earlier new rows have no entry in row i
            residual = std.b[i] - float(std.A[i, old_basis] @ xB)
            col = std.slack_column[i]

            if col is not None and residual * std.A[i, col] >= -self.FEASIBILITY_TOL:
                basis.append(col)
            else:
                # Row enters with an artificial column; orient it so the artificial is nonnegative
                if residual < 0:
                    std.A[i, :] *= -1.0
                    std.b[i] = -std.b[i]
                    std.flipped[i] = not std.flipped[i]

                basis.append(None)

        self.iterations = 0

        return self._run(std, old_rows + new_rows, basis)


def solve(lp, rule='dantzig'):
    """Solve a LinearProgram and return its BasicSolution"""
    return SimplexSolver(rule=rule).solve(lp)


def resolve_with_row(solution, lp, row, rule='dantzig'):
    """ Add one row to lp and re-optimize, warm-started from solution.

    Args:
        solution - optimal BasicSolution of lp
        lp - the LinearProgram solved by solution
        row - (coefficients, sense, rhs)

    Returns:
        (augmented LinearProgram, BasicSolution)
    """

    coefficients, sense, rhs = row

    augmented = lp.withRow(coefficients, sense, rhs)

    solver = SimplexSolver(rule=rule)

    if solution is None or not solution.optimal:
        return augmented, solver.solve(augmented)

    return augmented, solver.resolve(solution, augmented)


def extract_rays(solution, lp):
    """ Return the tableau rays of an optimal basic solution.

    One ray per nonbasic standard-form column; increasing that column by
    one unit while keeping the other nonbasic columns at zero moves the
    basic columns by -B^-1 A_j.
    """

    if not solution.optimal:
        raise ValueError(f"Cannot extract rays from a solution with status {solution.status}")

    std = StandardForm(lp)
    solver = SimplexSolver()

    rows = list(solution.rows)
    basis = list(solution.basis)

    A = std.A[rows, :]

    factors, estimate = solver._factor(A[:, basis])

    basic = set(basis)
    rays = []

    for j in range(std.columnCount):
        if j in basic:
            continue

        d = np.zeros(std.columnCount)
        d[j] = 1.0
        d[basis] = -scipy.linalg.lu_solve(factors, A[:, j], check_finite=False)

        expression = std.expressions[j]

        if expression is None:
            gradient, constant = None, None
        else:
            gradient, constant = expression

        rays.append(TableauRay(j, std.directionToOriginal(d), gradient, constant))

    return TableauRays(solution.x.copy(), rays, estimate)

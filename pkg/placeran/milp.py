"""Hands a stage program to the HiGHS solver bundled with scipy"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import coo_matrix

from placeran.expressions import Relation, VarKind
from placeran.program import IntegerProgram

logger = logging.getLogger(__name__)

# scipy.optimize.milp exit codes
HIGHS_OPTIMAL = 0
HIGHS_INFEASIBLE = 2


@dataclass
class ProgramArrays:
    """A program as the dense and sparse arrays `milp` takes

    Rows are scaled by their largest coefficient so that bit rates and core
    counts share one magnitude.
    """

    names: list[str]
    cost: np.ndarray
    constant: float
    matrix: coo_matrix
    row_lower: np.ndarray
    row_upper: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    integrality: np.ndarray


def program_arrays(program: IntegerProgram) -> ProgramArrays:
    variables = program.variables
    names = list(variables)
    index = {name: i for i, name in enumerate(names)}

    cost = np.zeros(len(names))
    for name, coefficient in program.objective.coefficients().items():
        cost[index[name]] += coefficient

    rows, cols, data = [], [], []
    row_lower, row_upper = [], []
    for r, constraint in enumerate(program.constraints):
        coefficients = constraint.expr.coefficients()
        scale = max((abs(c) for c in coefficients.values()), default=1.0) or 1.0
        for name, coefficient in coefficients.items():
            rows.append(r)
            cols.append(index[name])
            data.append(coefficient / scale)

        rhs = (constraint.rhs - constraint.expr.constant) / scale
        if constraint.relation is Relation.LE:
            row_lower.append(-math.inf)
            row_upper.append(rhs)
        elif constraint.relation is Relation.GE:
            row_lower.append(rhs)
            row_upper.append(math.inf)
        else:
            row_lower.append(rhs)
            row_upper.append(rhs)

    shape = (len(row_lower), len(names))
    return ProgramArrays(
        names=names,
        cost=cost,
        constant=float(program.objective.constant),
        matrix=coo_matrix((data, (rows, cols)), shape=shape),
        row_lower=np.array(row_lower, dtype=float),
        row_upper=np.array(row_upper, dtype=float),
        lower=np.array([float(v.lower) for v in variables.values()]),
        upper=np.array([float(v.upper) for v in variables.values()]),
        integrality=np.array(
            [0 if v.kind is VarKind.CONTINUOUS else 1 for v in variables.values()]
        ),
    )


class HighsOutcome(NamedTuple):
    """What HiGHS reported for one program

    Attributes:
        status: The `milp` exit code.
        values: Value of every variable at the best solution, None without one.
        bound: Dual bound on the objective, constant included.
        nodes: Branch and bound nodes HiGHS explored.
        message: HiGHS' own description of the exit.
    """

    status: int
    values: Optional[dict[str, float]]
    bound: Optional[float]
    nodes: int
    message: str

    @property
    def infeasible(self) -> bool:
        return self.status == HIGHS_INFEASIBLE


def run_highs(
    program: IntegerProgram,
    time_budget: Optional[float] = None,
    node_budget: Optional[int] = None,
    gap_tolerance: float = 0.0,
) -> HighsOutcome:
    arrays = program_arrays(program)
    if not arrays.names:
        # Nothing to decide, the rows only compare constants
        if all(row.satisfied({}) for row in program.constraints):
            return HighsOutcome(HIGHS_OPTIMAL, {}, arrays.constant, 0, "empty program")
        return HighsOutcome(HIGHS_INFEASIBLE, None, None, 0, "empty program")

    options: dict = {"disp": False, "presolve": True, "mip_rel_gap": gap_tolerance}
    if time_budget is not None:
        options["time_limit"] = time_budget
    if node_budget is not None:
        options["node_limit"] = node_budget

    constraints = None
    if arrays.matrix.shape[0]:
        constraints = LinearConstraint(arrays.matrix.tocsr(), arrays.row_lower, arrays.row_upper)
    result = milp(
        arrays.cost,
        integrality=arrays.integrality,
        bounds=Bounds(arrays.lower, arrays.upper),
        constraints=constraints,
        options=options,
    )
    logger.debug("HiGHS: %s", result.message)

    values = None
    if result.x is not None:
        values = dict(zip(arrays.names, (float(v) for v in result.x)))

    dual = getattr(result, "mip_dual_bound", None)
    bound = None
    if dual is not None and math.isfinite(dual):
        bound = float(dual) + arrays.constant

    return HighsOutcome(
        status=int(result.status),
        values=values,
        bound=bound,
        nodes=int(getattr(result, "mip_node_count", 0) or 0),
        message=str(result.message),
    )

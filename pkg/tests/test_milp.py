import pytest

from placeran.milp import HIGHS_INFEASIBLE, HIGHS_OPTIMAL, program_arrays, run_highs
from placeran.program import build_stage1, build_stage3
from tests import toys


def _program(toy, k=1):
    topology, catalog = toy()
    return build_stage1(toys.instance(topology, catalog, k))


def test_program_arrays():
    program = _program(toys.tie_on_priority)
    arrays = program_arrays(program)

    assert arrays.names == list(program.variables)
    assert arrays.matrix.shape == (len(program.constraints), len(program.variables))
    assert set(arrays.integrality) <= {0, 1}
    assert (arrays.lower <= arrays.upper).all()
    assert (arrays.row_lower <= arrays.row_upper).all()
    # Scaled rows keep every coefficient within one
    assert abs(arrays.matrix.data).max() == pytest.approx(1.0)


@pytest.mark.parametrize(
    "data",
    [
        (toys.tie_on_priority, 1, 2),
        (toys.bottleneck, 2, -6),
        (toys.shared_cu, 1, -5),
    ],
)
def test_first_stage_optimum(data):
    program = _program(data[0], data[1])
    outcome = run_highs(program)

    assert outcome.status == HIGHS_OPTIMAL
    assert outcome.bound == pytest.approx(data[2])
    assert program.objective.value(outcome.values) == pytest.approx(data[2])


def test_infeasible_program():
    outcome = run_highs(_program(toys.bottleneck))
    assert outcome.infeasible
    assert outcome.status == HIGHS_INFEASIBLE


def test_empty_program():
    outcome = run_highs(_program(toys.empty))
    assert outcome.status == HIGHS_OPTIMAL
    assert outcome.values == {}


def test_unreachable_targets():
    topology, catalog = toys.tie_on_priority()
    program = build_stage3(toys.instance(topology, catalog), 1, 2)
    assert run_highs(program).infeasible

import itertools
import json

import pytest

from placeran.errors import InfeasibleInstanceError
from placeran.expressions import Sense, Tag, VarKind
from placeran.lp_parser import read_lp
from placeran.program import (
    IntegerProgram,
    ObjectiveMode,
    build_stage1,
    build_stage2,
    build_stage3,
    compile_model,
    dump_program,
    evaluate,
    lp_text,
    program_to_dict,
    values_for,
    violations,
    within_capacity,
)
from tests import toys

CAPACITY_TAGS = {Tag.LINK_CAPACITY, Tag.CR_CAPACITY}

TOYS = [
    (toys.tie_on_priority, 1),
    (toys.tie_on_drcs, 1),
    (toys.single_ru, 1),
    (lambda: toys.shared_site(toys.catalog()), 1),
    (toys.bottleneck, 2),
    (toys.separate_sites, 1),
]


def _choices(model):
    return itertools.product(*(range(len(options)) for options in model.options))


def _tags(program, names):
    rows = {row.name: row.tag for row in program.constraints}
    return {rows[name] for name in names}


@pytest.mark.parametrize(
    "data",
    [(toy, k, mode) for toy, k in TOYS for mode in ObjectiveMode],
)
def test_rows_match_objective_vector(data):
    topology, catalog = data[0]()
    instance = toys.instance(topology, catalog, data[1])
    model = compile_model(instance, data[2])
    stage1 = build_stage1(instance, model=model)

    for choice in _choices(model):
        vector = model.objective_vector(choice)
        stage2 = build_stage2(instance, vector.v1, model=model)
        stage3 = build_stage3(instance, vector.v1, vector.v2, model=model)

        values = values_for(stage3, choice)
        assert evaluate(stage1, values) == vector.v1
        assert evaluate(stage2, values) == vector.v2
        assert evaluate(stage3, values) == vector.v3

        broken = violations(stage3, values)
        if model.fits(choice):
            assert broken == []
        else:
            assert broken and _tags(stage3, broken) <= CAPACITY_TAGS


@pytest.mark.parametrize("data", [(toy, k, mode) for toy, k in TOYS for mode in ObjectiveMode])
def test_auxiliaries_are_pinned(data):
    topology, catalog = data[0]()
    instance = toys.instance(topology, catalog, data[1])
    model = compile_model(instance, data[2])
    choice = next(c for c in _choices(model) if model.fits(c))
    vector = model.objective_vector(choice)
    program = build_stage3(instance, vector.v1, vector.v2, model=model)
    values = values_for(program, choice)
    assert violations(program, values) == []

    for name, variable in program.variables.items():
        if name.startswith("x_"):
            continue
        moved = dict(values)
        if variable.kind is VarKind.BINARY:
            moved[name] = 1 - values[name]
        else:
            moved[name] = values[name] + 1
        assert violations(program, moved), name


def test_other_target_breaks_fixing_rows():
    topology, catalog = toys.tie_on_priority()
    instance = toys.instance(topology, catalog)
    model = compile_model(instance)
    program = build_stage3(instance, 3, 2, model=model)
    assert violations(program, values_for(program, (0, 0))) == ["fix1_0"]


def test_stage1_objective_text():
    topology, catalog = toys.single_ru()
    program = build_stage1(toys.instance(topology, catalog))
    pairs = " + ".join(f"y_0_f{i}" for i in range(2, 9))
    assert str(program.objective) == f"z_0 + {pairs} - 7 x_0_0 - 7 x_0_1"
    assert program.sense is Sense.MINIMIZE


def test_row_provenance():
    topology, catalog = toys.single_ru()
    instance = toys.instance(topology, catalog)
    counts = {
        stage: {tag: len(program.rows_tagged(tag)) for tag in Tag}
        for stage, program in (
            (1, build_stage1(instance)),
            (2, build_stage2(instance, 1)),
            (3, build_stage3(instance, 1, 1)),
        )
    }
    shared = {
        Tag.ASSIGN: 1,
        Tag.LINK_CAPACITY: 2,
        Tag.CR_CAPACITY: 1,
        Tag.LINK_Y: 28,
        Tag.LINK_Z: 9,
    }
    assert counts[1] == {**shared, Tag.LINK_D: 0, Tag.FIX_FIRST: 0, Tag.FIX_SECOND: 0}
    assert counts[2] == {**shared, Tag.LINK_D: 4, Tag.FIX_FIRST: 1, Tag.FIX_SECOND: 0}
    assert counts[3] == {**shared, Tag.LINK_D: 4, Tag.FIX_FIRST: 1, Tag.FIX_SECOND: 1}

    program = build_stage3(instance, 1, 1)
    assert [row.name for row in program.constraints[:4]] == ["one_0", "bw_0", "bw_1", "cpu_0"]
    assert str(program.constraints[-1]) == "fix2_0: d_17 + d_19 = 1"
    assert [n for n in program.variables if n.startswith("d_")] == ["d_17", "d_19"]


@pytest.mark.parametrize(
    "data",
    [
        (ObjectiveMode.INDICATOR, -6, VarKind.BINARY),
        (ObjectiveMode.LITERAL, -5, VarKind.GENERAL),
    ],
)
def test_objective_modes(data):
    topology, catalog = toys.shared_site()
    instance = toys.instance(topology, catalog)
    program = build_stage1(instance, data[0])
    model = program.model
    assert model.objective_vector((0, 0)).v1 == data[1]
    assert evaluate(program, values_for(program, (0, 0))) == data[1]
    assert {program.variables[item.name].kind for item in model.items} == {data[2]}


def test_literal_bounds():
    topology, catalog = toys.tie_on_priority()
    program = build_stage1(toys.instance(topology, catalog), ObjectiveMode.LITERAL)
    general = [v for v in program.variables.values() if v.kind is VarKind.GENERAL]
    assert general
    # Two RUs over three CRs and eight function types
    assert {v.upper for v in general} == {1}
    assert "Generals" in lp_text(program) and "Bounds" in lp_text(program)


def test_missing_candidates():
    topology, catalog = toys.unreachable()
    with pytest.raises(InfeasibleInstanceError) as error:
        build_stage1(toys.instance(topology, catalog))
    assert error.value.to_dict()["rus"] == ["r3"]


def test_program_needs_a_model_or_rows():
    with pytest.raises(ValueError):
        IntegerProgram(1)


def test_values_for_needs_a_model():
    program = read_lp("Minimize\n obj: x\nSubject To\n c: x >= 0\nEnd")
    with pytest.raises(ValueError):
        values_for(program, (0,))


def test_choice_round_trip():
    topology, catalog = toys.tie_on_priority()
    model = compile_model(toys.instance(topology, catalog))
    for choice in _choices(model):
        assert model.choice_of(model.assignment(choice)) == list(choice)
    with pytest.raises(ValueError):
        model.objective_vector((0,))


def test_lp_text_is_deterministic():
    texts = set()
    for _ in range(3):
        topology, catalog = toys.bottleneck()
        texts.add(lp_text(build_stage3(toys.instance(topology, catalog, k=2), -6, 1)))
    assert len(texts) == 1

    text = texts.pop()
    assert text.startswith("\\* placeran integer program *\\\nMinimize\n obj: ")
    assert text.endswith("End\n")


def test_dump_program(tmp_path):
    topology, catalog = toys.single_ru()
    path = tmp_path / "stage2.json"
    dump_program(build_stage2(toys.instance(topology, catalog), 1), path)

    data = json.loads(path.read_text())
    assert data["stage"] == 2 and data["targets"] == [1]
    assert data["sense"] == "Minimize"
    assert data["objective"] == "d_17 + d_19"
    assert data["constraints"][0] == {
        "name": "one_0",
        "tag": "assign",
        "expr": "x_0_0 + x_0_1",
        "relation": "=",
        "rhs": 1,
    }
    assert program_to_dict(build_stage1(toys.instance(topology, catalog)))["targets"] == []


@pytest.mark.parametrize(
    "data",
    [(10.0, 10.0, True), (10.0 + 1e-9, 10.0, True), (10.1, 10.0, False), (0.0, 0.0, True)],
)
def test_within_capacity(data):
    assert within_capacity(data[0], data[1]) is data[2]

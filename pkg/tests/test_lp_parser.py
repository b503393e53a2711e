import math

import pytest

from placeran.errors import LpSyntaxError
from placeran.expressions import Relation, Sense, Tag, VarKind
from placeran.lp_parser import Parser, load_lp, read_lp
from placeran.program import ObjectiveMode, build_stage1, build_stage3, export_lp, lp_text
from tests import toys


def _program(rows, sections=""):
    return read_lp(f"Minimize\n obj: x\nSubject To\n{rows}\n{sections}End\n", "model.lp")


@pytest.mark.parametrize(
    "data",
    [
        ("2 x + 3 y - z", "2 x + 3 y - z"),
        ("x - - y", "x + y"),
        ("- x + 0.5 y", "- x + 0.5 y"),
        ("1e3 x", "1000 x"),
        ("x + 4 - 1", "x + 3"),
    ],
)
def test_objective(data):
    parser = Parser(f"Maximize\n obj: {data[0]}\nSubject To\nEnd", "model.lp")
    program = parser.parse()
    assert program.sense is Sense.MAXIMIZE
    assert str(program.objective) == data[1]


def test_unnamed_objective():
    program = read_lp("Minimize 2 a + b\nSubject To\nEnd")
    assert str(program.objective) == "2 a + b"
    assert program.stage is None and program.model is None


@pytest.mark.parametrize(
    "data",
    [
        ("c: x + y >= 1", "c: x + y >= 1"),
        ("c: x + 2 <= 5", "c: x <= 3"),
        ("c: 3 x - y = -2", "c: 3 x - y = -2"),
        ("c: x =< 4.5", "c: x <= 4.5"),
        ("x + y >= 1", "r_0: x + y >= 1"),
    ],
)
def test_constraints(data):
    program = _program(data[0])
    assert [str(row) for row in program.constraints] == [data[1]]


def test_row_tags():
    program = _program(" one_0: x = 1\n bw_0: 2 x <= 4\n fix2_0: d_1 = 1\n other: x >= 0")
    assert [row.tag for row in program.constraints] == [
        Tag.ASSIGN,
        Tag.LINK_CAPACITY,
        Tag.FIX_SECOND,
        None,
    ]
    assert program.constraints[1].relation is Relation.LE


@pytest.mark.parametrize(
    "data",
    [
        (" 0 <= g <= 3", "g", 0, 3),
        (" g >= 2", "g", 2, math.inf),
        (" g <= 7", "g", 0, 7),
        (" g = 4", "g", 4, 4),
        (" g free", "g", -math.inf, math.inf),
        (" -inf <= g <= 5", "g", -math.inf, 5),
        (" -2 <= g", "g", -2, math.inf),
    ],
)
def test_bounds(data):
    program = _program(" c: g + x >= 0", f"Bounds\n{data[0]}\nGenerals\n g\n")
    variable = program.variables[data[1]]
    assert variable.kind is VarKind.GENERAL
    assert (variable.lower, variable.upper) == (data[2], data[3])


def test_declarations():
    sections = "Bounds\n w <= 2.5\nBinaries\n x y\nGenerals\n g\n"
    program = _program(" c: x + y + g + w >= 1", sections)
    kinds = {name: v.kind for name, v in program.variables.items()}
    assert kinds == {
        "x": VarKind.BINARY,
        "y": VarKind.BINARY,
        "g": VarKind.GENERAL,
        "w": VarKind.CONTINUOUS,
    }
    assert program.variables["w"].upper == 2.5


@pytest.mark.parametrize(
    "data",
    [
        ("Subject To\n c: x >= 1\nEnd", "Missing objective section", 3, 1),
        ("Minimize\n obj: x\nEnd", "Missing 'Subject To' section", 3, 1),
        ("Minimize\n obj: x\nSubject To\n c: x 1\nEnd", "Expected a relation, found 1", 4, 7),
        ("Minimize\n obj: x\nSubject To\n c: x >= y\nEnd", "Expected a number, found y", 4, 10),
        ("Minimize\n obj: x\nMinimize\n obj: y\nSubject To\nEnd", "Objective given twice", 3, 1),
        (
            "Minimize\n obj: x\nSubject To\nSubject To\nEnd",
            "Section Subject To given twice",
            4,
            1,
        ),
        ("x + y", "Expected a section keyword, found x", 1, 1),
        ("Minimize\n obj: x\nSubject To\nEnd\nx", "Unexpected x after End", 5, 1),
        (
            "Minimize\n obj: x * y\nSubject To\nEnd",
            "Expected a section keyword, found Unknown character * found "
            "(Unknown character * found)",
            2,
            9,
        ),
        (
            "Minimize\n obj: x\nSubject To\nBounds\n 1 g\nEnd",
            "Expected '<=' after a lower bound",
            5,
            4,
        ),
    ],
)
def test_errors(data):
    with pytest.raises(LpSyntaxError) as error:
        read_lp(data[0], "model.lp")

    assert str(error.value) == f"Syntax Error = [model.lp:{data[2]}:{data[3]}] {data[1]}"
    assert (error.value.line, error.value.column) == (data[2], data[3])


@pytest.mark.parametrize(
    "data",
    [
        (toys.tie_on_priority, ObjectiveMode.INDICATOR),
        (toys.tie_on_priority, ObjectiveMode.LITERAL),
        (toys.bottleneck, ObjectiveMode.INDICATOR),
    ],
)
def test_exported_programs_read_back(data, tmp_path):
    topology, catalog = data[0]()
    instance = toys.instance(topology, catalog, k=2)
    stage1 = build_stage1(instance, data[1])
    stage3 = build_stage3(instance, 2, 2, data[1], model=stage1.model)

    for program in (stage1, stage3):
        path = tmp_path / f"stage{program.stage}.lp"
        text = export_lp(program, path)
        parsed = load_lp(path)

        assert lp_text(parsed) == text
        assert [row.name for row in parsed.constraints] == [
            row.name for row in program.constraints
        ]
        for tag in Tag:
            assert len(parsed.rows_tagged(tag)) == len(program.rows_tagged(tag))
        assert {n: v.kind for n, v in parsed.variables.items()} == {
            n: v.kind for n, v in program.variables.items()
        }

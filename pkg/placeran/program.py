from __future__ import annotations

import json
import logging
import math
import textwrap
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Iterator, Mapping, NamedTuple, Optional, Sequence, Union

from placeran.domain import VIRTUALIZED_VNFS, VNF_IDS
from placeran.errors import InfeasibleInstanceError
from placeran.expressions import (
    Constraint,
    LinearExpr,
    Relation,
    Sense,
    Tag,
    Term,
    Variable,
    VarKind,
    ceil_div,
    format_number,
)
from placeran.pathgen import CandidateAssignment, Instance
from placeran.placeran_types import LinkId, NodeId, Number

logger = logging.getLogger(__name__)

# Relative slack allowed on capacity rows (float bandwidth and core sums)
CAPACITY_TOLERANCE = 1e-9

LP_HEADER = "\\* placeran integer program *\\"
LP_LINE_WIDTH = 250


class ObjectiveMode(Enum):
    """How the CR-count and grouping terms of the first objective are read

    INDICATOR counts a CR once when it hosts any function, and a function
    type once per CR when it is placed there at all. LITERAL takes the
    ceiling terms at face value: CRs on a route count in blocks of the CR
    total, function instances in blocks of the function total.
    """

    INDICATOR = "indicator"
    LITERAL = "literal"


class ObjectiveVector(NamedTuple):
    v1: int
    v2: int
    v3: int

    def __str__(self):
        return f"({self.v1}, {self.v2}, {self.v3})"


@dataclass(frozen=True)
class Item:
    """A counted term of the first objective: contributes ceil(count / capacity)"""

    name: str
    capacity: Optional[int]


@dataclass(frozen=True)
class CompiledCandidate:
    """A candidate flattened to integer indices for the search"""

    candidate: CandidateAssignment
    variable: str
    link_loads: tuple[tuple[int, float], ...]
    cr_loads: tuple[tuple[int, float], ...]
    items: tuple[int, ...]
    instances: int
    drc: int
    drc_index: int
    priority: int

    def __repr__(self):
        return f"CompiledCandidate[{self.variable} drc: {self.drc}]"


@dataclass(frozen=True)
class PlacementModel:
    """The numeric core shared by every stage of an instance

    Args:
        instance: The instance the model was compiled from.
        mode: Reading of the first objective.
        rus: RUs in variable order.
        options: Compiled candidates of each RU, in candidate order.
        link_ids: Links some candidate loads.
        link_capacity: Capacity of each of those links.
        cr_ids: CRs some candidate loads.
        cr_capacity: Processing capacity of each of those CRs.
        items: Counted terms of the first objective.
        drc_ids: DRCs some candidate uses, ascending.
    """

    instance: Instance
    mode: ObjectiveMode
    rus: tuple[NodeId, ...]
    options: tuple[tuple[CompiledCandidate, ...], ...]
    link_ids: tuple[LinkId, ...]
    link_capacity: tuple[float, ...]
    cr_ids: tuple[NodeId, ...]
    cr_capacity: tuple[float, ...]
    items: tuple[Item, ...]
    drc_ids: tuple[int, ...]

    def _chosen(self, choice: Sequence[int]) -> Iterator[CompiledCandidate]:
        if len(choice) != len(self.rus):
            raise ValueError(f"expected {len(self.rus)} choices, got {len(choice)}")
        for options, index in zip(self.options, choice):
            yield options[index]

    def item_counts(self, choice: Sequence[int]) -> list[int]:
        counts = [0] * len(self.items)
        for option in self._chosen(choice):
            for item in option.items:
                counts[item] += 1
        return counts

    def objective_vector(self, choice: Sequence[int]) -> ObjectiveVector:
        chosen = list(self._chosen(choice))
        counts = self.item_counts(choice)
        v1 = sum(ceil_div(n, item.capacity) for n, item in zip(counts, self.items))
        v1 -= sum(option.instances for option in chosen)
        v2 = len({option.drc for option in chosen})
        v3 = sum(option.priority for option in chosen)
        return ObjectiveVector(v1, v2, v3)

    def fits(self, choice: Sequence[int]) -> bool:
        """Whether the choice respects every link and CR capacity"""

        link_load = [0.0] * len(self.link_ids)
        cr_load = [0.0] * len(self.cr_ids)
        for option in self._chosen(choice):
            for link, load in option.link_loads:
                link_load[link] += load
            for cr, load in option.cr_loads:
                cr_load[cr] += load
        return all(
            within_capacity(load, capacity)
            for load, capacity in zip(link_load, self.link_capacity)
        ) and all(
            within_capacity(load, capacity) for load, capacity in zip(cr_load, self.cr_capacity)
        )

    def assignment(self, choice: Sequence[int]) -> dict[NodeId, CandidateAssignment]:
        return {
            ru: option.candidate for ru, option in zip(self.rus, self._chosen(choice))
        }

    def choice_of(self, assignment: Mapping[NodeId, CandidateAssignment]) -> list[int]:
        """Maps an assignment back to candidate indices

        Raises:
            KeyError: an RU of the model is not assigned, or its candidate
                is not among the model's candidates.
        """

        choice = []
        for ru, options in zip(self.rus, self.options):
            wanted = assignment[ru].describe()
            for index, option in enumerate(options):
                if option.candidate.describe() == wanted:
                    choice.append(index)
                    break
            else:
                raise KeyError(ru)
        return choice


def within_capacity(load: float, capacity: float) -> bool:
    return load <= capacity + CAPACITY_TOLERANCE * max(1.0, abs(capacity))


def compile_model(
    instance: Instance, mode: ObjectiveMode = ObjectiveMode.INDICATOR
) -> PlacementModel:
    """Flattens the candidates of an instance into index-based arrays"""

    topology = instance.topology
    catalog = instance.catalog
    rus = tuple(instance.rus)
    cr_number = {cr: i for i, cr in enumerate(sorted(topology.crs))}
    cr_total = len(cr_number)

    links = sorted({link for ru in rus for c in instance.candidates[ru] for link in c.link_loads})
    crs = sorted({cr for ru in rus for c in instance.candidates[ru] for cr in c.cr_loads})
    drcs = sorted({c.drc for ru in rus for c in instance.candidates[ru]})
    link_index = {link: i for i, link in enumerate(links)}
    cr_index = {cr: i for i, cr in enumerate(crs)}
    drc_index = {drc: i for i, drc in enumerate(drcs)}

    def cr_items(candidate: CandidateAssignment) -> set[NodeId]:
        if mode is ObjectiveMode.LITERAL:
            return set(candidate.route_crs)
        return set(candidate.used_crs)

    cr_keys = sorted(
        {cr for ru in rus for c in instance.candidates[ru] for cr in cr_items(c)},
        key=cr_number.__getitem__,
    )
    pair_keys = sorted(
        {pair for ru in rus for c in instance.candidates[ru] for pair in c.placements},
        key=lambda pair: (cr_number[pair[0]], pair[1]),
    )

    if mode is ObjectiveMode.LITERAL:
        cr_items_list = [Item(f"w_{cr_number[cr]}", cr_total) for cr in cr_keys]
        pair_items = [Item(f"v_{cr_number[cr]}_{f}", len(VNF_IDS)) for cr, f in pair_keys]
    else:
        cr_items_list = [Item(f"z_{cr_number[cr]}", None) for cr in cr_keys]
        pair_items = [Item(f"y_{cr_number[cr]}_{f}", None) for cr, f in pair_keys]
    items = tuple(cr_items_list + pair_items)
    cr_item = {cr: i for i, cr in enumerate(cr_keys)}
    pair_item = {pair: len(cr_keys) + i for i, pair in enumerate(pair_keys)}

    options = []
    for l, ru in enumerate(rus):
        compiled = []
        for a, candidate in enumerate(instance.candidates[ru]):
            drc = catalog.get(candidate.drc)
            own_items = sorted(
                [cr_item[cr] for cr in cr_items(candidate)]
                + [pair_item[pair] for pair in candidate.placements]
            )
            compiled.append(
                CompiledCandidate(
                    candidate=candidate,
                    variable=f"x_{l}_{a}",
                    link_loads=tuple(
                        sorted((link_index[k], v) for k, v in candidate.link_loads.items())
                    ),
                    cr_loads=tuple(
                        sorted((cr_index[k], v) for k, v in candidate.cr_loads.items())
                    ),
                    items=tuple(own_items),
                    instances=candidate.instances,
                    drc=candidate.drc,
                    drc_index=drc_index[candidate.drc],
                    priority=drc.priority,
                )
            )
        options.append(tuple(compiled))

    return PlacementModel(
        instance=instance,
        mode=mode,
        rus=rus,
        options=tuple(options),
        link_ids=tuple(links),
        link_capacity=tuple(topology.links[link].capacity for link in links),
        cr_ids=tuple(crs),
        cr_capacity=tuple(topology.nodes[cr].proc_capacity or 0.0 for cr in crs),
        items=items,
        drc_ids=tuple(drcs),
    )


class IntegerProgram:
    """A staged integer program over the candidate variables

    Programs built from an instance keep their `PlacementModel` and derive
    the variables, objective and rows from it on first access. Programs read
    from an LP file carry them explicitly and have no model.

    Args:
        stage: 1, 2 or 3, None when unknown.
        sense: Direction of the objective.
        objective: The objective expression.
        constraints: The rows, in output order.
        variables: The declared variables by name, in declaration order.
        model: The compiled instance the program was built from.
        targets: Optimal values of the earlier stages the program fixes.

    Attributes:
        stage: 1, 2 or 3, None when unknown.
        sense: Direction of the objective.
        model: The compiled instance, None for programs read from a file.
        targets: Optimal values of the earlier stages.
    """

    def __init__(
        self,
        stage: Optional[int],
        sense: Sense = Sense.MINIMIZE,
        objective: Optional[LinearExpr] = None,
        constraints: Optional[list[Constraint]] = None,
        variables: Optional[dict[str, Variable]] = None,
        model: Optional[PlacementModel] = None,
        targets: tuple[int, ...] = (),
    ):
        if model is None and (objective is None or constraints is None or variables is None):
            raise ValueError("a program needs a model or explicit objective, rows and variables")

        self.stage = stage
        self.sense = sense
        self.model = model
        self.targets = tuple(targets)
        self._objective = objective
        self._constraints = constraints
        self._variables = variables

    @property
    def mode(self) -> Optional[ObjectiveMode]:
        return self.model.mode if self.model is not None else None

    @property
    def variables(self) -> dict[str, Variable]:
        if self._variables is None:
            self._variables = _placement_variables(self.model, self.stage)
        return self._variables

    @property
    def objective(self) -> LinearExpr:
        if self._objective is None:
            self._objective = _placement_objective(self.model, self.stage)
        return self._objective

    @property
    def constraints(self) -> list[Constraint]:
        if self._constraints is None:
            self._constraints = list(_placement_rows(self.model, self.stage, self.targets))
        return self._constraints

    def rows_tagged(self, tag: Tag) -> list[Constraint]:
        return [row for row in self.constraints if row.tag is tag]

    def __repr__(self):
        return f"IntegerProgram[stage: {self.stage} targets: {self.targets}]"


def _x_names(model: PlacementModel) -> list[str]:
    return [option.variable for options in model.options for option in options]


def _placement_variables(model: PlacementModel, stage: int) -> dict[str, Variable]:
    variables = {name: Variable(name) for name in _x_names(model)}
    ru_count = len(model.rus)
    for item in model.items:
        if item.capacity is None:
            variables[item.name] = Variable(item.name)
        else:
            upper = ceil_div(ru_count, item.capacity)
            variables[item.name] = Variable(item.name, VarKind.GENERAL, 0, upper)
    if stage >= 2:
        for drc in model.drc_ids:
            variables[f"d_{drc}"] = Variable(f"d_{drc}")
    return variables


def _stage1_expr(model: PlacementModel) -> LinearExpr:
    terms = [Term(1, item.name) for item in model.items]
    terms += [
        Term(-option.instances, option.variable)
        for options in model.options
        for option in options
        if option.instances
    ]
    return LinearExpr(terms)


def _placement_objective(model: PlacementModel, stage: int) -> LinearExpr:
    if stage == 1:
        return _stage1_expr(model)
    if stage == 2:
        return LinearExpr.of((1, f"d_{drc}") for drc in model.drc_ids)
    return LinearExpr.of(
        (option.priority, option.variable) for options in model.options for option in options
    )


class _RowNamer:
    def __init__(self):
        self.counters: dict[Tag, int] = defaultdict(int)

    def __call__(self, tag: Tag) -> str:
        index = self.counters[tag]
        self.counters[tag] += 1
        return f"{tag.prefix}_{index}"


def _placement_rows(
    model: PlacementModel, stage: int, targets: Sequence[int]
) -> Iterator[Constraint]:
    name = _RowNamer()
    ru_count = len(model.rus)

    # One candidate per RU
    for options in model.options:
        expr = LinearExpr.of((1, option.variable) for option in options)
        yield Constraint(name(Tag.ASSIGN), expr, Relation.EQ, 1, Tag.ASSIGN)

    # Link bandwidth and CR cores
    link_terms: list[list[Term]] = [[] for _ in model.link_ids]
    cr_terms: list[list[Term]] = [[] for _ in model.cr_ids]
    item_members: list[list[str]] = [[] for _ in model.items]
    drc_members: list[list[str]] = [[] for _ in model.drc_ids]
    for options in model.options:
        for option in options:
            for link, load in option.link_loads:
                link_terms[link].append(Term(load, option.variable))
            for cr, load in option.cr_loads:
                cr_terms[cr].append(Term(load, option.variable))
            for item in option.items:
                item_members[item].append(option.variable)
            drc_members[option.drc_index].append(option.variable)

    for terms, capacity in zip(link_terms, model.link_capacity):
        tag = Tag.LINK_CAPACITY
        yield Constraint(name(tag), LinearExpr(terms), Relation.LE, capacity, tag)
    for terms, capacity in zip(cr_terms, model.cr_capacity):
        tag = Tag.CR_CAPACITY
        yield Constraint(name(tag), LinearExpr(terms), Relation.LE, capacity, tag)

    pair_offset = sum(1 for item in model.items if item.name[0] in "zw")
    if model.mode is ObjectiveMode.LITERAL:
        yield from _literal_rows(model, item_members, name)
    else:
        yield from _indicator_rows(model, item_members, pair_offset, ru_count, name)

    if stage >= 2:
        for drc, members in zip(model.drc_ids, drc_members):
            d = f"d_{drc}"
            for x in members:
                yield Constraint(
                    name(Tag.LINK_D), LinearExpr.of([(1, d), (-1, x)]), Relation.GE, 0, Tag.LINK_D
                )
            expr = LinearExpr([Term(1, d)] + [Term(-1, x) for x in members])
            yield Constraint(name(Tag.LINK_D), expr, Relation.LE, 0, Tag.LINK_D)

        tag = Tag.FIX_FIRST
        yield Constraint(name(tag), _stage1_expr(model), Relation.EQ, targets[0], tag)

    if stage >= 3:
        expr = LinearExpr.of((1, f"d_{drc}") for drc in model.drc_ids)
        yield Constraint(name(Tag.FIX_SECOND), expr, Relation.EQ, targets[1], Tag.FIX_SECOND)


def _indicator_rows(
    model: PlacementModel,
    item_members: list[list[str]],
    pair_offset: int,
    ru_count: int,
    name: _RowNamer,
) -> Iterator[Constraint]:
    pairs_of_cr: dict[str, list[str]] = defaultdict(list)
    for item in model.items[pair_offset:]:
        _, cr, _ = item.name.split("_")
        pairs_of_cr[cr].append(item.name)

    for index in range(pair_offset, len(model.items)):
        y = model.items[index].name
        members = item_members[index]
        for x in members:
            yield Constraint(
                name(Tag.LINK_Y), LinearExpr.of([(1, y), (-1, x)]), Relation.GE, 0, Tag.LINK_Y
            )
        n = [Term(1, x) for x in members]
        yield Constraint(
            name(Tag.LINK_Y), LinearExpr(n + [Term(-ru_count, y)]), Relation.LE, 0, Tag.LINK_Y
        )
        yield Constraint(
            name(Tag.LINK_Y),
            LinearExpr([Term(1, y)] + [Term(-1, x) for x in members]),
            Relation.LE,
            0,
            Tag.LINK_Y,
        )

    for index in range(pair_offset):
        z = model.items[index].name
        ys = pairs_of_cr[z.split("_")[1]]
        for y in ys:
            yield Constraint(
                name(Tag.LINK_Z), LinearExpr.of([(1, z), (-1, y)]), Relation.GE, 0, Tag.LINK_Z
            )
        expr = LinearExpr([Term(1, y) for y in ys] + [Term(-len(VIRTUALIZED_VNFS), z)])
        yield Constraint(name(Tag.LINK_Z), expr, Relation.LE, 0, Tag.LINK_Z)
        expr = LinearExpr([Term(1, z)] + [Term(-1, y) for y in ys])
        yield Constraint(name(Tag.LINK_Z), expr, Relation.LE, 0, Tag.LINK_Z)


def _literal_rows(
    model: PlacementModel, item_members: list[list[str]], name: _RowNamer
) -> Iterator[Constraint]:
    # capacity * v - n lies in [0, capacity - 1], so v = ceil(n / capacity)
    for item, members in zip(model.items, item_members):
        tag = Tag.LINK_Z if item.name.startswith("w") else Tag.LINK_Y
        expr = [Term(item.capacity, item.name)] + [Term(-1, x) for x in members]
        yield Constraint(name(tag), LinearExpr(expr), Relation.GE, 0, tag)
        yield Constraint(name(tag), LinearExpr(expr), Relation.LE, item.capacity - 1, tag)


def _log_program(program: IntegerProgram):
    model = program.model
    logger.info(
        "stage %d program: %d RUs, %d x variables, %d items, targets %s",
        program.stage,
        len(model.rus),
        sum(len(options) for options in model.options),
        len(model.items),
        program.targets,
    )


def build_stage1(
    instance: Instance,
    mode: ObjectiveMode = ObjectiveMode.INDICATOR,
    model: Optional[PlacementModel] = None,
) -> IntegerProgram:
    """Builds the program minimizing CRs employed minus functions grouped

    Raises:
        InfeasibleInstanceError: Some RU has no admissible candidate.
    """

    missing = instance.missing_rus()
    if missing:
        raise InfeasibleInstanceError(
            f"{len(missing)} RU(s) without an admissible candidate", rus=missing
        )

    program = IntegerProgram(1, model=model or compile_model(instance, mode))
    _log_program(program)
    return program


def build_stage2(
    instance: Instance,
    v1_star: int,
    mode: ObjectiveMode = ObjectiveMode.INDICATOR,
    model: Optional[PlacementModel] = None,
) -> IntegerProgram:
    """Builds the program minimizing distinct DRCs at the first optimum"""

    program = IntegerProgram(2, model=model or compile_model(instance, mode), targets=(v1_star,))
    _log_program(program)
    return program


def build_stage3(
    instance: Instance,
    v1_star: int,
    v2_star: int,
    mode: ObjectiveMode = ObjectiveMode.INDICATOR,
    model: Optional[PlacementModel] = None,
) -> IntegerProgram:
    """Builds the program minimizing the priority sum at the first two optima"""

    program = IntegerProgram(
        3, model=model or compile_model(instance, mode), targets=(v1_star, v2_star)
    )
    _log_program(program)
    return program


def values_for(program: IntegerProgram, choice: Sequence[int]) -> dict[str, Number]:
    """Variable values of a candidate choice, auxiliaries at their exact values"""

    model = program.model
    if model is None:
        raise ValueError("values_for needs a program built from an instance")

    values: dict[str, Number] = {name: 0 for name in program.variables}
    for options, index in zip(model.options, choice):
        values[options[index].variable] = 1
    for item, count in zip(model.items, model.item_counts(choice)):
        values[item.name] = ceil_div(count, item.capacity)
    if program.stage is not None and program.stage >= 2:
        for options, index in zip(model.options, choice):
            values[f"d_{options[index].drc}"] = 1
    return values


def evaluate(program: IntegerProgram, values: Mapping[str, Number]) -> Number:
    value = program.objective.value(values)
    return int(round(value)) if abs(value - round(value)) < 1e-6 else value


def violations(
    program: IntegerProgram, values: Mapping[str, Number], tolerance: float = CAPACITY_TOLERANCE
) -> list[str]:
    """Names of violated rows, and `bound:<name>` for variables out of their domain"""

    found = [
        f"bound:{name}"
        for name, variable in program.variables.items()
        if not variable.admits(values.get(name, 0), tolerance)
    ]
    found += [row.name for row in program.constraints if not row.satisfied(values, tolerance)]
    return found


def _wrap(text: str) -> list[str]:
    return textwrap.wrap(
        text,
        width=LP_LINE_WIDTH,
        initial_indent=" ",
        subsequent_indent="   ",
        break_long_words=False,
        break_on_hyphens=False,
    )


def _bound_line(variable: Variable) -> Optional[str]:
    lower, upper = variable.lower, variable.upper
    if lower == 0 and upper == math.inf:
        return None
    if lower == -math.inf and upper == math.inf:
        return f" {variable.name} free"
    if upper == math.inf:
        return f" {variable.name} >= {format_number(lower)}"
    low = "-inf" if lower == -math.inf else format_number(lower)
    return f" {low} <= {variable.name} <= {format_number(upper)}"


def lp_text(program: IntegerProgram) -> str:
    """Renders a program in CPLEX LP syntax"""

    lines = [LP_HEADER, program.sense.value]
    lines += _wrap(f"obj: {program.objective}")
    lines.append("Subject To")
    for row in program.constraints:
        lines += _wrap(str(row))

    variables = list(program.variables.values())
    bounds = [
        line
        for line in (_bound_line(v) for v in variables if v.kind is not VarKind.BINARY)
        if line is not None
    ]
    if bounds:
        lines.append("Bounds")
        lines += bounds

    for header, kind in (("Binaries", VarKind.BINARY), ("Generals", VarKind.GENERAL)):
        names = [v.name for v in variables if v.kind is kind]
        if names:
            lines.append(header)
            lines += _wrap(" ".join(names))

    lines.append("End")
    return "\n".join(lines) + "\n"


def export_lp(program: IntegerProgram, destination: Union[str, Path]) -> str:
    """Writes the program as an LP file and returns the text written"""

    text = lp_text(program)
    Path(destination).write_text(text)
    logger.info("wrote %s (%d rows)", destination, len(program.constraints))
    return text


def program_to_dict(program: IntegerProgram) -> dict[str, Any]:
    return {
        "stage": program.stage,
        "sense": program.sense.value,
        "targets": list(program.targets),
        "objective": str(program.objective),
        "variables": [
            {"name": v.name, "kind": v.kind.value, "lower": v.lower, "upper": v.upper}
            for v in program.variables.values()
        ],
        "constraints": [
            {
                "name": row.name,
                "tag": row.tag.value if row.tag is not None else None,
                "expr": str(row.expr),
                "relation": row.relation.value,
                "rhs": row.rhs,
            }
            for row in program.constraints
        ],
    }


def dump_program(program: IntegerProgram, path: Union[str, Path]):
    Path(path).write_text(json.dumps(program_to_dict(program), indent=2) + "\n")

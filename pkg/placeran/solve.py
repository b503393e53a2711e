from __future__ import annotations

import itertools
import json
import logging
import math
import threading
import time
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Callable, NamedTuple, Optional, Sequence, Union

from placeran.domain import DrcCatalog, Topology
from placeran.errors import BruteForceGuardError, InfeasibleInstanceError
from placeran.expressions import ceil_div
from placeran.milp import HIGHS_OPTIMAL, run_highs
from placeran.pathgen import CandidateAssignment, Instance, build_candidate
from placeran.placeran_types import NodeId
from placeran.program import (
    CAPACITY_TOLERANCE,
    CompiledCandidate,
    IntegerProgram,
    ObjectiveMode,
    ObjectiveVector,
    PlacementModel,
    build_stage1,
    build_stage2,
    build_stage3,
    compile_model,
)

logger = logging.getLogger(__name__)

# Largest candidate product the oracle enumerates
BRUTE_FORCE_LIMIT = 1_000_000

# Nodes between two looks at the clock
CHECK_INTERVAL = 256

# Float noise tolerated before rounding a fractional bound up
BOUND_EPSILON = 1e-7


class SolveStatus(Enum):
    OPTIMAL = "optimal"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    BUDGET_EXCEEDED = "budget_exceeded"


class Backend(Enum):
    """Engine that solves each stage program"""

    HIGHS = "highs"
    BRANCH_AND_BOUND = "bnb"


@dataclass(frozen=True)
class SolveLimits:
    """Budgets of one solve

    Args:
        time_budget: Wall seconds per stage, None for no limit.
        node_budget: Branching nodes per stage, None for no limit.
        require_optimal: Whether callers must treat an uncertified stage as a failure.
        workers: Threads exploring the children of the root, branch and bound only.
        gap_tolerance: Relative gap at which a stopped search reports FEASIBLE.
        backend: HiGHS through scipy, or the built-in branch and bound.
    """

    time_budget: Optional[float] = None
    node_budget: Optional[int] = None
    require_optimal: bool = False
    workers: int = 1
    gap_tolerance: float = 0.0
    backend: Backend = Backend.HIGHS

    def __post_init__(self):
        if self.time_budget is not None and self.time_budget <= 0:
            raise ValueError("time budget must be positive")
        if self.node_budget is not None and self.node_budget <= 0:
            raise ValueError("node budget must be positive")
        if self.workers < 1:
            raise ValueError("at least one worker is needed")
        if self.gap_tolerance < 0:
            raise ValueError("gap tolerance cannot be negative")


@dataclass
class SolveStats:
    nodes: int = 0
    wall_time: float = 0.0
    incumbent_updates: int = 0
    pruned: int = 0


@dataclass
class Solution:
    """Outcome of one stage

    Attributes:
        status: How the search ended.
        stage: The stage solved.
        assignment: The chosen candidate of every RU, empty without an incumbent.
        objective_vector: Values of the three objectives at the assignment.
        bound: Proven lower bound on the stage objective.
        stats: Search statistics.
        choice: Candidate index of every RU in model order.
    """

    status: SolveStatus
    stage: int
    assignment: dict[NodeId, CandidateAssignment]
    objective_vector: Optional[ObjectiveVector]
    bound: Optional[int] = None
    stats: SolveStats = field(default_factory=SolveStats)
    choice: Optional[tuple[int, ...]] = None

    @property
    def objective(self) -> Optional[int]:
        if self.objective_vector is None:
            return None
        return self.objective_vector[self.stage - 1]

    @property
    def gap(self) -> Optional[float]:
        if self.objective is None or self.bound is None:
            return None
        return max(0, self.objective - self.bound) / max(1, abs(self.objective))

    @property
    def certified(self) -> bool:
        return self.status is SolveStatus.OPTIMAL

    def __repr__(self):
        return f"Solution[stage {self.stage} {self.status.value} {self.objective_vector}]"


class _BudgetHit(Exception):
    def __init__(self, bound: int):
        super().__init__(bound)
        self.bound = bound


class _Incumbent:
    """Best leaf found so far, shared by every worker of a solve"""

    def __init__(self):
        self.value: Optional[int] = None
        self.choice: Optional[tuple[int, ...]] = None
        self.updates = 0
        self.lock = threading.Lock()

    def offer(self, value: int, choice: Sequence[int]) -> bool:
        with self.lock:
            if self.value is None or value < self.value:
                self.value = value
                self.choice = tuple(choice)
                self.updates += 1
                return True
        return False


class _Budget:
    def __init__(self, limits: SolveLimits, start: float):
        self.node_budget = limits.node_budget
        self.deadline = start + limits.time_budget if limits.time_budget is not None else None
        self.nodes = 0
        self.exhausted = False
        self.lock = threading.Lock()

    def spend(self, nodes: int, check_clock: bool) -> bool:
        with self.lock:
            self.nodes += nodes
            if self.node_budget is not None and self.nodes > self.node_budget:
                self.exhausted = True
            if check_clock and self.deadline is not None and time.monotonic() >= self.deadline:
                self.exhausted = True
            return self.exhausted


def stage_value(stage: int, vector: ObjectiveVector) -> int:
    return vector[stage - 1]


def meets_targets(program: IntegerProgram, vector: ObjectiveVector) -> bool:
    return all(vector[i] == target for i, target in enumerate(program.targets))


def reduce_dominated(model: PlacementModel) -> list[list[int]]:
    """Candidate indices of each RU worth exploring

    A candidate is dropped when another one of the same RU has the same
    objective items, DRC and priority and no larger load anywhere. Of two
    identical candidates the lower index stays.
    """

    kept = []
    for options in model.options:
        groups: dict[tuple, list[int]] = defaultdict(list)
        for a, option in enumerate(options):
            groups[(option.items, option.drc, option.priority)].append(a)

        survivors = []
        for members in groups.values():
            for a in members:
                loads_a = _loads(options[a])
                dominated = False
                for b in members:
                    if b == a:
                        continue
                    loads_b = _loads(options[b])
                    if all(loads_b.get(k, 0.0) <= v for k, v in loads_a.items()) and all(
                        k in loads_a for k in loads_b
                    ):
                        if loads_a != loads_b or b < a:
                            dominated = True
                            break
                if not dominated:
                    survivors.append(a)
        kept.append(sorted(survivors))
    return kept


def _loads(option) -> dict[tuple[str, int], float]:
    loads = {("link", j): v for j, v in option.link_loads}
    loads.update({("cr", c): v for c, v in option.cr_loads})
    return loads


class BranchAndBound:
    """Depth-first branch and bound choosing one candidate per RU

    Branches on the RU with the fewest candidates still fitting the residual
    capacities, trying its candidates by their immediate objective change.
    Every node carries the candidates that still fit, so an RU left without
    any closes the node. Lower bounds charge each undecided RU its cheapest
    candidate, sharing the cost of opening a CR, a function type or a DRC
    among every undecided RU that could open it.

    Args:
        program: The stage program, built from an instance.
        incumbent: Best leaf so far, possibly shared with other workers.
        budget: Node and time budget, possibly shared with other workers.

    Attributes:
        nodes: Candidates tried by this search.
        pruned: Nodes closed by their bound.
        frames: Bounds of the nodes on the current path.
    """

    def __init__(self, program: IntegerProgram, incumbent: _Incumbent, budget: _Budget):
        model = program.model
        self.program = program
        self.model = model
        self.stage = program.stage
        self.targets = program.targets
        self.options = model.options
        self.incumbent = incumbent
        self.budget = budget

        self.capacities = [item.capacity for item in model.items]
        self.link_limit = [
            c + CAPACITY_TOLERANCE * max(1.0, abs(c)) for c in model.link_capacity
        ]
        self.cr_limit = [c + CAPACITY_TOLERANCE * max(1.0, abs(c)) for c in model.cr_capacity]
        self.link_sets = [
            [frozenset(j for j, _ in o.link_loads) for o in opts] for opts in self.options
        ]
        self.cr_sets = [
            [frozenset(c for c, _ in o.cr_loads) for o in opts] for opts in self.options
        ]

        self.link_used = [0.0] * len(model.link_ids)
        self.cr_used = [0.0] * len(model.cr_ids)
        self.item_count = [0] * len(model.items)
        self.drc_count = [0] * len(model.drc_ids)
        self.v1 = 0
        self.v2 = 0
        self.v3 = 0
        self.choice = [-1] * len(model.rus)

        self.frames: list[int] = []
        self.nodes = 0
        self.pending = 0
        self.pruned = 0

    def fits(self, option) -> bool:
        link_used, link_limit = self.link_used, self.link_limit
        for j, load in option.link_loads:
            if link_used[j] + load > link_limit[j]:
                return False
        cr_used, cr_limit = self.cr_used, self.cr_limit
        for c, load in option.cr_loads:
            if cr_used[c] + load > cr_limit[c]:
                return False
        return True

    def delta(self, option) -> tuple[int, int, int]:
        counts, capacities = self.item_count, self.capacities
        dv1 = -option.instances
        for i in option.items:
            dv1 += ceil_div(counts[i] + 1, capacities[i]) - ceil_div(counts[i], capacities[i])
        dv2 = 0 if self.drc_count[option.drc_index] else 1
        return dv1, dv2, option.priority

    def order_key(self, ru: int, a: int) -> tuple[int, ...]:
        dv1, dv2, dv3 = self.delta(self.options[ru][a])
        if self.stage == 1:
            return dv1, a
        if self.stage == 2:
            return dv2, dv1, a
        return dv3, dv1, dv2, a

    def apply(self, ru: int, a: int):
        option = self.options[ru][a]
        dv1, dv2, dv3 = self.delta(option)
        self.v1 += dv1
        self.v2 += dv2
        self.v3 += dv3
        for i in option.items:
            self.item_count[i] += 1
        self.drc_count[option.drc_index] += 1
        for j, load in option.link_loads:
            self.link_used[j] += load
        for c, load in option.cr_loads:
            self.cr_used[c] += load
        self.choice[ru] = a

    def undo(self, ru: int, a: int):
        option = self.options[ru][a]
        for i in option.items:
            self.item_count[i] -= 1
        self.drc_count[option.drc_index] -= 1
        for j, load in option.link_loads:
            self.link_used[j] -= load
        for c, load in option.cr_loads:
            self.cr_used[c] -= load
        dv1, dv2, dv3 = self.delta(option)
        self.v1 -= dv1
        self.v2 -= dv2
        self.v3 -= dv3
        self.choice[ru] = -1

    def root(self) -> Optional[dict[int, list[int]]]:
        """Candidates of every RU that fit the empty network, None if some RU has none"""

        feasible = {}
        for ru, active in enumerate(reduce_dominated(self.model)):
            fitting = [a for a in active if self.fits(self.options[ru][a])]
            if not fitting:
                logger.debug("RU %s has no candidate within capacity", self.model.rus[ru])
                return None
            feasible[ru] = fitting
        return feasible

    def propagate(
        self, rest: dict[int, list[int]], ru: int, a: int
    ) -> Optional[dict[int, list[int]]]:
        """Drops the candidates the last choice left without room"""

        links = self.link_sets[ru][a]
        crs = self.cr_sets[ru][a]
        child = {}
        for l, opts in rest.items():
            link_sets, cr_sets = self.link_sets[l], self.cr_sets[l]
            kept = [
                b
                for b in opts
                if (links.isdisjoint(link_sets[b]) and crs.isdisjoint(cr_sets[b]))
                or self.fits(self.options[l][b])
            ]
            if not kept:
                return None
            child[l] = kept
        return child

    def _shared_bound(
        self,
        feasible: dict[int, list[int]],
        keys: Callable[[CompiledCandidate], Sequence[int]],
        opened: list[int],
        fixed: Callable[[CompiledCandidate], int],
    ) -> float:
        # An unopened key used by k of the m RUs able to use it costs at least 1 >= k/m
        share: Counter = Counter()
        for l, opts in feasible.items():
            fresh = set()
            for b in opts:
                fresh.update(k for k in keys(self.options[l][b]) if not opened[k])
            share.update(fresh)

        total = 0.0
        for l, opts in feasible.items():
            total += min(
                sum(1.0 / share[k] for k in keys(option) if not opened[k]) + fixed(option)
                for option in (self.options[l][b] for b in opts)
            )
        return total

    def v1_bound(self, feasible: dict[int, list[int]]) -> int:
        total = self.v1 + self._shared_bound(
            feasible, _item_keys, self.item_count, lambda option: -option.instances
        )
        return math.ceil(total - BOUND_EPSILON)

    def v2_bound(self, feasible: dict[int, list[int]]) -> int:
        total = self.v2 + self._shared_bound(
            feasible, _drc_keys, self.drc_count, lambda option: 0
        )
        return math.ceil(total - BOUND_EPSILON)

    def v3_bound(self, feasible: dict[int, list[int]]) -> int:
        return self.v3 + sum(
            min(self.options[l][b].priority for b in opts) for l, opts in feasible.items()
        )

    def bound(self, feasible: dict[int, list[int]]) -> Optional[int]:
        """Lower bound on the stage objective below this node, None when the
        node cannot meet the earlier stages' values"""

        if self.stage == 1:
            return self.v1_bound(feasible)
        if self.v1_bound(feasible) > self.targets[0]:
            return None
        if self.stage == 2:
            return self.v2_bound(feasible)
        if self.v2_bound(feasible) > self.targets[1]:
            return None
        return self.v3_bound(feasible)

    def leaf(self):
        vector = ObjectiveVector(self.v1, self.v2, self.v3)
        if not meets_targets(self.program, vector):
            return
        value = stage_value(self.stage, vector)
        if self.incumbent.offer(value, self.choice):
            logger.debug("stage %d incumbent %d after %d nodes", self.stage, value, self.nodes)

    def tick(self):
        self.nodes += 1
        self.pending += 1
        check_clock = self.pending >= CHECK_INTERVAL
        if check_clock or self.budget.node_budget is not None or self.budget.exhausted:
            if self.budget.spend(self.pending, check_clock):
                raise _BudgetHit(min(self.frames))
            self.pending = 0

    def closed(self, bound: int) -> bool:
        best = self.incumbent.value
        return best is not None and bound >= best

    def branch(self, feasible: dict[int, list[int]]):
        if not feasible:
            self.leaf()
            return

        bound = self.bound(feasible)
        if bound is None or self.closed(bound):
            self.pruned += 1
            return

        ru = min(feasible, key=lambda l: (len(feasible[l]), l))
        rest = {l: opts for l, opts in feasible.items() if l != ru}
        order = sorted(feasible[ru], key=lambda b: self.order_key(ru, b))

        self.frames.append(bound)
        try:
            for a in order:
                self.tick()
                self.apply(ru, a)
                child = self.propagate(rest, ru, a)
                if child is not None:
                    self.branch(child)
                self.undo(ru, a)
                if self.closed(bound):
                    break
        finally:
            self.frames.pop()


def _item_keys(option: CompiledCandidate) -> tuple[int, ...]:
    return option.items


def _drc_keys(option: CompiledCandidate) -> tuple[int, ...]:
    return (option.drc_index,)


def _explore_parallel(
    search: BranchAndBound, feasible: dict[int, list[int]], workers: int
) -> tuple[list[BranchAndBound], Optional[int]]:
    """Hands the children of the root to a thread pool

    The workers share the incumbent and the budget, so the outcome depends
    on thread timing whenever several optima exist.

    Returns:
        The worker searches, and the open bound when a budget stopped them.
    """

    if not feasible:
        search.leaf()
        return [], None
    bound = search.bound(feasible)
    if bound is None:
        return [], None

    ru = min(feasible, key=lambda l: (len(feasible[l]), l))
    rest = {l: opts for l, opts in feasible.items() if l != ru}
    order = sorted(feasible[ru], key=lambda b: search.order_key(ru, b))

    def run(a: int) -> tuple[BranchAndBound, Optional[int]]:
        worker = BranchAndBound(search.program, search.incumbent, search.budget)
        worker.frames.append(bound)
        try:
            worker.tick()
            worker.apply(ru, a)
            child = worker.propagate(rest, ru, a)
            if child is not None and not worker.closed(bound):
                worker.branch(child)
        except _BudgetHit as hit:
            return worker, hit.bound
        return worker, None

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(run, order))

    hits = [hit for _, hit in results if hit is not None]
    return [worker for worker, _ in results], min(hits) if hits else None


def _seed(program: IntegerProgram, incumbent: _Incumbent, choice: Sequence[int]):
    model = program.model
    if len(choice) != len(model.rus) or not model.fits(choice):
        return
    vector = model.objective_vector(choice)
    if meets_targets(program, vector):
        incumbent.offer(stage_value(program.stage, vector), choice)


def _classify(
    best: Optional[int], open_bound: Optional[int], closed: bool, limits: SolveLimits
) -> tuple[SolveStatus, Optional[int]]:
    """Status and bound of a stage from its best value and the bound left open"""

    if closed:
        return (SolveStatus.OPTIMAL if best is not None else SolveStatus.INFEASIBLE), best
    if best is None:
        return SolveStatus.BUDGET_EXCEEDED, open_bound
    if open_bound is None:
        return SolveStatus.BUDGET_EXCEEDED, None

    bound = min(open_bound, best)
    gap = (best - bound) / max(1, abs(best))
    if bound >= best:
        return SolveStatus.OPTIMAL, bound
    if gap <= limits.gap_tolerance:
        return SolveStatus.FEASIBLE, bound
    return SolveStatus.BUDGET_EXCEEDED, bound


def _choice_from_values(
    model: PlacementModel, values: dict[str, float]
) -> Optional[tuple[int, ...]]:
    choice = []
    for options in model.options:
        picked = max(range(len(options)), key=lambda a: values.get(options[a].variable, 0.0))
        if values.get(options[picked].variable, 0.0) < 0.5:
            return None
        choice.append(picked)
    return tuple(choice)


def _search_highs(
    program: IntegerProgram, limits: SolveLimits, shared: _Incumbent
) -> tuple[Optional[int], bool, SolveStats]:
    outcome = run_highs(program, limits.time_budget, limits.node_budget, limits.gap_tolerance)
    logger.debug("stage %d: HiGHS says %s", program.stage, outcome.message)

    model = program.model
    updates = 0
    if outcome.values is not None:
        choice = _choice_from_values(model, outcome.values)
        if choice is not None and model.fits(choice):
            vector = model.objective_vector(choice)
            if meets_targets(program, vector):
                updates = int(shared.offer(stage_value(program.stage, vector), choice))
            else:
                logger.warning("stage %d: HiGHS placement misses the fixed targets", program.stage)
        else:
            logger.warning("stage %d: HiGHS returned no usable placement", program.stage)

    open_bound = None
    if outcome.bound is not None:
        open_bound = math.ceil(outcome.bound - BOUND_EPSILON)
    closed = outcome.infeasible and shared.value is None
    exact = outcome.status == HIGHS_OPTIMAL and limits.gap_tolerance == 0
    if exact and shared.value is not None:
        closed = True
    if shared.value is not None and open_bound is not None and open_bound >= shared.value:
        closed = True

    stats = SolveStats(nodes=outcome.nodes, incumbent_updates=updates)
    return open_bound, closed, stats


def _search_branch_and_bound(
    program: IntegerProgram, limits: SolveLimits, shared: _Incumbent, start: float
) -> tuple[Optional[int], bool, SolveStats]:
    seeded = shared.value
    budget = _Budget(limits, start)
    search = BranchAndBound(program, shared, budget)
    searches = [search]

    # Lower bound of the part left unexplored when a budget stops the search
    open_bound: Optional[int] = None
    feasible = search.root()
    if feasible is not None:
        if limits.workers > 1:
            workers, open_bound = _explore_parallel(search, feasible, limits.workers)
            searches += workers
        else:
            try:
                search.branch(feasible)
            except _BudgetHit as hit:
                open_bound = hit.bound

    stats = SolveStats(
        nodes=sum(s.nodes for s in searches),
        incumbent_updates=shared.updates - (1 if seeded is not None else 0),
        pruned=sum(s.pruned for s in searches),
    )
    return open_bound, open_bound is None, stats


def solve_program(
    program: IntegerProgram,
    limits: SolveLimits = SolveLimits(),
    incumbent: Optional[Sequence[int]] = None,
) -> Solution:
    """Solves one stage program exactly, within the budgets

    Args:
        program: A program built from an instance.
        limits: Budgets, gap tolerance and the backend to run.
        incumbent: A candidate choice to start from, used when it is
            feasible for the program.

    Returns:
        OPTIMAL when the search closed, INFEASIBLE when it closed without
        a leaf, FEASIBLE or BUDGET_EXCEEDED when a budget stopped it.
    """

    if program.model is None:
        raise ValueError("only programs built from an instance can be solved")

    start = time.monotonic()
    model = program.model
    shared = _Incumbent()
    if incumbent is not None:
        _seed(program, shared, incumbent)

    if limits.backend is Backend.HIGHS:
        open_bound, closed, stats = _search_highs(program, limits, shared)
    else:
        open_bound, closed, stats = _search_branch_and_bound(program, limits, shared, start)
    status, bound = _classify(shared.value, open_bound, closed, limits)
    stats.wall_time = time.monotonic() - start

    choice = shared.choice
    solution = Solution(
        status=status,
        stage=program.stage,
        assignment=model.assignment(choice) if choice is not None else {},
        objective_vector=model.objective_vector(choice) if choice is not None else None,
        bound=bound,
        stats=stats,
        choice=choice,
    )
    logger.info(
        "stage %d: %s objective %s bound %s, %d nodes in %.2fs (%s)",
        program.stage,
        status.value,
        solution.objective,
        bound,
        stats.nodes,
        stats.wall_time,
        limits.backend.value,
    )
    return solution


def _unsolved(stage: int) -> Solution:
    return Solution(SolveStatus.BUDGET_EXCEEDED, stage, {}, None)


def _downgrade(solution: Solution, previous: Solution) -> Solution:
    if solution.status is SolveStatus.OPTIMAL and not previous.certified:
        logger.warning(
            "stage %d is optimal for uncertified targets, reporting it as feasible",
            solution.stage,
        )
        solution.status = SolveStatus.FEASIBLE
    return solution


def solve_lexicographic(
    instance: Instance,
    limits: SolveLimits = SolveLimits(),
    mode: ObjectiveMode = ObjectiveMode.INDICATOR,
) -> tuple[Solution, Solution, Solution]:
    """Solves the three stages in order, each fixing the values found before it

    Returns:
        The solution of every stage; the third one is the final placement.

    Raises:
        InfeasibleInstanceError: Some RU has no candidate, or no choice of
            candidates fits the capacities.
    """

    model = compile_model(instance, mode)

    first = solve_program(build_stage1(instance, mode, model), limits)
    if first.status is SolveStatus.INFEASIBLE:
        raise InfeasibleInstanceError("no placement satisfies the capacity constraints")
    if first.choice is None:
        return first, _unsolved(2), _unsolved(3)

    v1 = first.objective_vector.v1
    second = solve_program(build_stage2(instance, v1, mode, model), limits, first.choice)
    assert second.choice is not None, "the first stage placement is feasible for the second"
    _downgrade(second, first)

    v2 = second.objective_vector.v2
    third = solve_program(build_stage3(instance, v1, v2, mode, model), limits, second.choice)
    assert third.choice is not None, "the second stage placement is feasible for the third"
    _downgrade(third, second)

    return first, second, third


class BruteForceResult(NamedTuple):
    vector: ObjectiveVector
    assignment: dict[NodeId, CandidateAssignment]


def _combination_fits(combination: Sequence[CandidateAssignment], topology: Topology) -> bool:
    link_load: Counter = Counter()
    cr_load: Counter = Counter()
    for candidate in combination:
        link_load.update(candidate.link_loads)
        cr_load.update(candidate.cr_loads)

    def within(load: float, capacity: float) -> bool:
        return load <= capacity + CAPACITY_TOLERANCE * max(1.0, abs(capacity))

    return all(within(load, topology.links[k].capacity) for k, load in link_load.items()) and all(
        within(load, topology.nodes[k].proc_capacity or 0.0) for k, load in cr_load.items()
    )


def _combination_vector(
    combination: Sequence[CandidateAssignment], catalog: DrcCatalog
) -> ObjectiveVector:
    placed = Counter(pair for candidate in combination for pair in candidate.placements)
    employed = {cr for cr, _ in placed}
    grouped = sum(max(n - 1, 0) for n in placed.values())
    drcs = {candidate.drc for candidate in combination}
    priorities = sum(catalog.get(candidate.drc).priority for candidate in combination)
    return ObjectiveVector(len(employed) - grouped, len(drcs), priorities)


def brute_force(instance: Instance, limit: int = BRUTE_FORCE_LIMIT) -> BruteForceResult:
    """Enumerates every combination of candidates and returns the
    lexicographically smallest feasible objective vector

    Raises:
        BruteForceGuardError: The candidate product exceeds `limit`.
        InfeasibleInstanceError: No combination fits the capacities.
    """

    rus = instance.rus
    product = instance.candidate_product()
    if product > limit:
        raise BruteForceGuardError(product, limit)

    best: Optional[tuple[ObjectiveVector, tuple[CandidateAssignment, ...]]] = None
    for combination in itertools.product(*(instance.candidates[ru] for ru in rus)):
        if not _combination_fits(combination, instance.topology):
            continue
        vector = _combination_vector(combination, instance.catalog)
        if best is None or vector < best[0]:
            best = (vector, combination)

    if best is None:
        raise InfeasibleInstanceError("no combination of candidates fits the capacities")

    vector, combination = best
    return BruteForceResult(vector, dict(zip(rus, combination)))


def assignment_to_dict(assignment: dict[NodeId, CandidateAssignment]) -> dict[str, Any]:
    return {ru: assignment[ru].describe() for ru in sorted(assignment)}


def solution_to_dict(solution: Solution, stages: Sequence[Solution] = ()) -> dict[str, Any]:
    data = {
        "status": solution.status.value,
        "stage": solution.stage,
        "objective_vector": list(solution.objective_vector)
        if solution.objective_vector is not None
        else None,
        "bound": solution.bound,
        "gap": solution.gap,
        "assignment": assignment_to_dict(solution.assignment),
        "stats": {"nodes": solution.stats.nodes},
    }
    if stages:
        data["stages"] = [
            {
                "stage": s.stage,
                "status": s.status.value,
                "objective": s.objective,
                "bound": s.bound,
                "nodes": s.stats.nodes,
            }
            for s in stages
        ]
    return data


def dump_solution(
    solution: Solution, path: Union[str, Path], stages: Sequence[Solution] = ()
):
    text = json.dumps(solution_to_dict(solution, stages), indent=2, sort_keys=True) + "\n"
    Path(path).write_text(text)
    logger.info("wrote %s", path)


def solution_from_dict(data: dict[str, Any], topology: Topology, catalog: DrcCatalog) -> Solution:
    """Rebuilds a solution, re-deriving every candidate from the topology"""

    assignment = {
        ru: build_candidate(
            topology,
            catalog,
            ru,
            int(entry["drc"]),
            entry["route"],
            entry.get("cu_host"),
            entry.get("du_host"),
        )
        for ru, entry in data["assignment"].items()
    }
    vector = data.get("objective_vector")
    return Solution(
        status=SolveStatus(data["status"]),
        stage=int(data["stage"]),
        assignment=assignment,
        objective_vector=ObjectiveVector(*vector) if vector is not None else None,
        bound=data.get("bound"),
        stats=SolveStats(nodes=data.get("stats", {}).get("nodes", 0)),
    )


def load_solution(path: Union[str, Path], topology: Topology, catalog: DrcCatalog) -> Solution:
    return solution_from_dict(json.loads(Path(path).read_text()), topology, catalog)

from __future__ import annotations

import csv
import json
import logging
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence, Union

from placeran.domain import (
    REPORT_GROUPS,
    VIRTUALIZED_VNFS,
    DrcCatalog,
    DrcSet,
    Topology,
    catalog_for,
)
from placeran.errors import InfeasibleInstanceError
from placeran.pathgen import Instance, PathMetric, build_instance
from placeran.program import ObjectiveMode, build_stage1
from placeran.scenario import ScenarioSpec, build_scenario
from placeran.solve import Solution, SolveLimits, SolveStatus, solve_lexicographic, solve_program

logger = logging.getLogger(__name__)

# DRCs of the full packaged catalog, the base of the unique-DRC percentage
DRC_COUNT = 9


def _pct(part: float, whole: float) -> float:
    return 100.0 * part / whole if whole else 0.0


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values) if values else 0.0


@dataclass
class MetricsReport:
    """Every evaluation figure of one placement

    Percentages are on a 0 to 100 scale. Per-class figures are keyed by
    AG1, AG2 and AC, where AC merges the access classes.
    """

    status: str
    objective_vector: Optional[list[int]]
    ru_count: int
    cr_count: int
    employed_crs: int
    phi1: int
    phi2: int
    employed_cr_pct: float
    aggregation_pct: float
    unique_drc_pct: float
    priority_sum_pct: float
    drc_set_histogram: dict[str, int]
    drc_counts: dict[int, int]
    avg_network_latency_s: float
    avg_network_latency_pct: Optional[float]
    cr_occupation_pct: dict[str, float] = field(default_factory=dict)
    link_occupation_pct: dict[str, float] = field(default_factory=dict)
    employed_crs_by_class: dict[str, int] = field(default_factory=dict)
    aggregation_by_class: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["drc_counts"] = {str(k): v for k, v in self.drc_counts.items()}
        return data

    def rows(self) -> list[tuple[str, Any]]:
        """Flat (metric, value) pairs, nested maps as `name.key`"""

        flat = []
        for name, value in self.to_dict().items():
            if isinstance(value, dict):
                flat += [(f"{name}.{key}", item) for key, item in value.items()]
            elif isinstance(value, list):
                flat.append((name, " ".join(str(v) for v in value)))
            else:
                flat.append((name, value))
        return flat


def set_histogram(solution: Solution, catalog: DrcCatalog) -> dict[str, int]:
    histogram = {label.value: 0 for label in DrcSet}
    for candidate in solution.assignment.values():
        histogram[catalog.get(candidate.drc).set_label.value] += 1
    return histogram


def drc_counts(solution: Solution, catalog: DrcCatalog) -> dict[int, int]:
    counts = {drc: 0 for drc in catalog.ids}
    for candidate in solution.assignment.values():
        counts[candidate.drc] += 1
    return counts


def average_link_latency(topology: Topology) -> float:
    """Mean latency over the transport links, CR attachment links excluded"""

    return _mean(
        [
            link.latency
            for link in topology.links.values()
            if link.id not in topology.attachment_links
        ]
    )


def _node_group(topology: Topology, node: str) -> Optional[str]:
    cls = topology.nodes[node].transport_class
    return cls.group if cls is not None else None


def compute_metrics(
    solution: Solution,
    topology: Topology,
    catalog: DrcCatalog,
    reference_latency: Optional[float] = None,
) -> MetricsReport:
    """Computes the evaluation figures of a placement from raw placements and loads

    Args:
        solution: A solution whose assignment covers every RU.
        topology: The topology the solution was computed on.
        catalog: The catalog the solution was computed with.
        reference_latency: Average link latency taken as 100%, the latency
            percentage is left out without it.
    """

    rus = topology.rus
    missing = [ru for ru in rus if ru not in solution.assignment]
    if missing:
        raise ValueError(f"solution leaves {len(missing)} RU(s) unassigned")

    assignment = [solution.assignment[ru] for ru in rus]
    placed = Counter(pair for candidate in assignment for pair in candidate.placements)
    employed = {cr for cr, _ in placed}
    phi2 = sum(max(n - 1, 0) for n in placed.values())
    drcs = {candidate.drc for candidate in assignment}
    priority_sum = sum(catalog.get(candidate.drc).priority for candidate in assignment)

    link_load: Counter = Counter()
    cr_load: Counter = Counter()
    for candidate in assignment:
        link_load.update(candidate.link_loads)
        cr_load.update(candidate.cr_loads)

    cr_occupation: dict[str, list[float]] = defaultdict(list)
    employed_by_class = {group: 0 for group in REPORT_GROUPS}
    aggregation_by_class = {group: 0 for group in REPORT_GROUPS}
    for cr in topology.crs:
        cls = topology.transport_class_of(cr)
        if cls is None:
            continue
        capacity = topology.nodes[cr].proc_capacity or 0.0
        cr_occupation[cls.group].append(_pct(cr_load.get(cr, 0.0), capacity))
        if cr in employed:
            employed_by_class[cls.group] += 1
    for (cr, _), n in placed.items():
        cls = topology.transport_class_of(cr)
        if cls is not None:
            aggregation_by_class[cls.group] += max(n - 1, 0)

    link_occupation: dict[str, list[float]] = defaultdict(list)
    for link in topology.links.values():
        if link.id in topology.attachment_links:
            continue
        groups = {_node_group(topology, node) for node in link.endpoints}
        for group in groups - {None}:
            link_occupation[group].append(_pct(link_load.get(link.id, 0.0), link.capacity))

    avg_latency = average_link_latency(topology)
    latency_pct = None
    if reference_latency is not None:
        latency_pct = _pct(avg_latency, reference_latency)
        if latency_pct > 100.0:
            logger.warning(
                "average latency %.3g s exceeds the reference %.3g s, clamping to 100%%",
                avg_latency,
                reference_latency,
            )
            latency_pct = 100.0

    ru_count = len(rus)
    cr_count = len(topology.crs)
    return MetricsReport(
        status=solution.status.value,
        objective_vector=list(solution.objective_vector) if solution.objective_vector else None,
        ru_count=ru_count,
        cr_count=cr_count,
        employed_crs=len(employed),
        phi1=len(employed),
        phi2=phi2,
        employed_cr_pct=_pct(len(employed), cr_count),
        aggregation_pct=_pct(phi2, len(VIRTUALIZED_VNFS) * ru_count),
        unique_drc_pct=_pct(len(drcs), DRC_COUNT),
        priority_sum_pct=_pct(priority_sum, ru_count * catalog.max_priority),
        drc_set_histogram=set_histogram(solution, catalog),
        drc_counts=drc_counts(solution, catalog),
        avg_network_latency_s=avg_latency,
        avg_network_latency_pct=latency_pct,
        cr_occupation_pct={g: _mean(cr_occupation[g]) for g in REPORT_GROUPS},
        link_occupation_pct={g: _mean(link_occupation[g]) for g in REPORT_GROUPS},
        employed_crs_by_class=employed_by_class,
        aggregation_by_class=aggregation_by_class,
    )


@dataclass(frozen=True)
class SweepRow:
    k: int
    status: str
    v1: Optional[int]
    phi2: int
    stage1_objective_pct: float
    aggregation_pct: float


def sweep_references(ru_count: int) -> tuple[int, int]:
    """First objective and grouping of every RU on C-RAN from a single CR"""

    grouped = len(VIRTUALIZED_VNFS) * max(ru_count - 1, 0)
    return 1 - grouped, grouped


def _sweep_row(k: int, solution: Optional[Solution], ru_count: int) -> SweepRow:
    if solution is None or solution.choice is None:
        status = solution.status.value if solution is not None else SolveStatus.INFEASIBLE.value
        return SweepRow(k, status, None, 0, 0.0, 0.0)

    v1 = solution.objective_vector.v1
    placed = Counter(pair for c in solution.assignment.values() for pair in c.placements)
    phi2 = sum(max(n - 1, 0) for n in placed.values())
    v1_ref, phi2_ref = sweep_references(ru_count)
    objective_pct = min(100.0, max(0.0, _pct(v1, v1_ref)))
    aggregation_pct = min(100.0, _pct(phi2, phi2_ref))
    return SweepRow(k, solution.status.value, v1, phi2, objective_pct, aggregation_pct)


def k_sweep(
    source: Union[ScenarioSpec, Topology],
    k_max: int,
    limits: SolveLimits = SolveLimits(),
    catalog: Optional[DrcCatalog] = None,
    mode: ObjectiveMode = ObjectiveMode.INDICATOR,
    metric: PathMetric = PathMetric.LATENCY,
) -> list[SweepRow]:
    """Solves the first stage for k = 1..k_max paths per RU

    Rows of values of k without a solution carry zeros. A stage stopped by
    its budget is recorded with its status and the sweep goes on.
    """

    if k_max < 1:
        raise ValueError("k_max must be at least 1")

    topology = build_scenario(source) if isinstance(source, ScenarioSpec) else source
    catalog = catalog or catalog_for(topology)
    ru_count = len(topology.rus)

    rows = []
    for k in range(1, k_max + 1):
        instance = build_instance(topology, catalog, k, metric)
        try:
            solution: Optional[Solution] = solve_program(build_stage1(instance, mode), limits)
        except InfeasibleInstanceError:
            solution = None
        row = _sweep_row(k, solution, ru_count)
        logger.info("k=%d: %s V1=%s", k, row.status, row.v1)
        rows.append(row)
    return rows


def stage_comparison(
    instance: Instance,
    limits: SolveLimits = SolveLimits(),
    mode: ObjectiveMode = ObjectiveMode.INDICATOR,
) -> list[dict[str, Any]]:
    """DRC-set histogram and per-DRC counts of the placement after each stage"""

    catalog = instance.catalog
    return [
        {
            "stage": solution.stage,
            "status": solution.status.value,
            "objective_vector": list(solution.objective_vector)
            if solution.objective_vector is not None
            else None,
            "drc_set_histogram": set_histogram(solution, catalog),
            "drc_counts": {str(k): v for k, v in drc_counts(solution, catalog).items()},
        }
        for solution in solve_lexicographic(instance, limits, mode)
    ]


def write_report_json(report: MetricsReport, path: Union[str, Path]):
    Path(path).write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    logger.info("wrote %s", path)


def write_report_csv(report: MetricsReport, path: Union[str, Path]):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["metric", "value"])
        writer.writerows(report.rows())
    logger.info("wrote %s", path)


def write_sweep_csv(rows: Sequence[SweepRow], path: Union[str, Path]):
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(SweepRow.__dataclass_fields__))
        writer.writeheader()
        for row in rows:
            writer.writerow(asdict(row))
    logger.info("wrote %s", path)


def write_sweep_json(rows: Sequence[SweepRow], path: Union[str, Path]):
    Path(path).write_text(json.dumps([asdict(row) for row in rows], indent=2) + "\n")
    logger.info("wrote %s", path)

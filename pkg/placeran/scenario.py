from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Any, Mapping, Optional, Union

import numpy as np

from placeran.domain import Link, Node, NodeKind, Topology, TransportClass
from placeran.errors import ScenarioError

logger = logging.getLogger(__name__)

CORE_ID = "core"

# Ring and tree shapes, chosen to give 51 (T1) and 128 (T2) transport nodes
T1_AG1_COUNT = 2
T1_AG2_COUNT = 9
T1_ACCESS_RINGS = 8
T1_ACCESS_RING_SIZE = 5

T2_AG1_COUNT = 2
T2_AG2_COUNT = 6
T2_AC1_PER_AG2_PAIR = 8
T2_AC2_PER_AC1 = 4

LEVELS = {
    TransportClass.AG1: 1,
    TransportClass.AG2: 2,
    TransportClass.AC1: 3,
    TransportClass.AC2: 4,
}

# Independent random streams per generation step
STREAM_CAPACITY = 1
STREAM_LATENCY = 2
STREAM_RU_SELECTION = 3
STREAM_RU_CAPACITY = 4
STREAM_RU_LATENCY = 5

GBPS = 1e9


class TopologyKind(Enum):
    T1 = "T1"
    T2 = "T2"


class CapacityScenario(Enum):
    LC = "LC"
    RC = "RC"
    HC = "HC"


class RuConfig(Enum):
    F1 = "F1"
    R1 = "R1"


@dataclass(frozen=True)
class ClassParams:
    """Generator parameters of one transport class

    Attributes:
        cr_count: CRs attached to every node of the class.
        cr_capacity: (low, high) processing capacity in reference cores. LC
            takes the low end, HC the high end, RC draws within the range.
        link_rates: Ascending standard link rates in bps. LC takes the
            first, HC the last, RC draws among them.
        distance_km: (min, avg, max) link distance.
        ru_slots: RUs attached to every node of the class under F1.
    """

    cr_count: int
    cr_capacity: tuple[float, float]
    link_rates: tuple[float, ...]
    distance_km: tuple[float, float, float]
    ru_slots: int


@dataclass(frozen=True)
class ScenarioParams:
    classes: Mapping[TransportClass, ClassParams]
    propagation_s_per_km: float = 5e-6
    computing_latency: float = 2e-5
    optical_transit_latency: float = 0.0
    regenerator_latency: float = 0.0
    ru_probability: float = 0.5
    attachment_capacity: float = 1e12


_T1_AGGREGATION_RATES = (40 * GBPS, 100 * GBPS, 200 * GBPS, 400 * GBPS)
_T1_ACCESS_RATES = (10 * GBPS, 25 * GBPS, 40 * GBPS)
_T2_AGGREGATION_RATES = (100 * GBPS, 200 * GBPS, 400 * GBPS, 1000 * GBPS)
_T2_ACCESS_RATES = (40 * GBPS, 50 * GBPS, 100 * GBPS)

T1_PARAMS = ScenarioParams(
    classes={
        TransportClass.AG1: ClassParams(1, (64, 256), _T1_AGGREGATION_RATES, (5, 15, 30), 0),
        TransportClass.AG2: ClassParams(1, (16, 64), _T1_AGGREGATION_RATES, (5, 15, 30), 1),
        TransportClass.AC1: ClassParams(1, (8, 16), _T1_ACCESS_RATES, (1, 4, 10), 1),
    },
)

T2_PARAMS = ScenarioParams(
    classes={
        TransportClass.AG1: ClassParams(1, (128, 512), _T2_AGGREGATION_RATES, (10, 20, 40), 0),
        TransportClass.AG2: ClassParams(1, (32, 128), _T2_AGGREGATION_RATES, (10, 20, 40), 1),
        TransportClass.AC1: ClassParams(1, (16, 32), _T2_ACCESS_RATES, (1, 5, 10), 1),
        TransportClass.AC2: ClassParams(1, (8, 16), _T2_ACCESS_RATES, (1, 5, 10), 1),
    },
    optical_transit_latency=5e-6,
    regenerator_latency=1e-5,
)


def default_params(kind: TopologyKind) -> ScenarioParams:
    return T1_PARAMS if kind is TopologyKind.T1 else T2_PARAMS


@dataclass(frozen=True)
class ScenarioSpec:
    """Everything needed to regenerate one evaluation instance

    Args:
        topology_kind: T1 (rings) or T2 (hierarchical tree).
        capacity: LC, RC or HC.
        ru_config: F1 (one RU per eligible node) or R1 (zero or one).
        seed: Non-negative seed of every random draw.
        params: Per-class table, defaults to the built-in table of the kind.
        ru_count: Exact R1 RU count, drawn without replacement.
    """

    topology_kind: TopologyKind
    capacity: CapacityScenario
    ru_config: RuConfig
    seed: int = 0
    params: Optional[ScenarioParams] = None
    ru_count: Optional[int] = None

    @property
    def resolved_params(self) -> ScenarioParams:
        return self.params if self.params is not None else default_params(self.topology_kind)

    def validate(self):
        """Raises `ScenarioError` with the reason when the spec is not usable"""

        if not 0 <= self.seed < 2**64:
            raise ScenarioError("seed must be a non-negative 64-bit integer", seed=self.seed)

        params = self.resolved_params
        classes = set(params.classes)
        if self.topology_kind is TopologyKind.T1:
            expected = {TransportClass.AG1, TransportClass.AG2, TransportClass.AC1}
        else:
            expected = set(TransportClass)
        if classes != expected:
            raise ScenarioError(
                f"{self.topology_kind.value} needs classes "
                f"{sorted(c.value for c in expected)}",
                classes=sorted(c.value for c in classes),
            )

        for cls, table in params.classes.items():
            low, high = table.cr_capacity
            if not 0 <= low <= high:
                raise ScenarioError(f"{cls.value}: empty CR capacity range", cls=cls.value)
            rates = list(table.link_rates)
            if not rates or rates != sorted(rates) or rates[0] <= 0:
                raise ScenarioError(
                    f"{cls.value}: link rates must be positive and ascending", cls=cls.value
                )
            distances = list(table.distance_km)
            if len(distances) != 3 or distances != sorted(distances) or distances[0] < 0:
                raise ScenarioError(
                    f"{cls.value}: distances must be (min, avg, max)", cls=cls.value
                )
            if table.cr_count < 0 or table.ru_slots < 0:
                raise ScenarioError(f"{cls.value}: negative counts", cls=cls.value)

        if params.classes[TransportClass.AG1].ru_slots != 0:
            raise ScenarioError("AG1 nodes never host RUs")
        if not 0 <= params.ru_probability <= 1:
            raise ScenarioError("ru_probability must lie in [0, 1]")
        if self.ru_count is not None and self.ru_count < 0:
            raise ScenarioError("ru_count must be non-negative", ru_count=self.ru_count)


def _rng(spec: ScenarioSpec, stream: int) -> np.random.Generator:
    return np.random.default_rng([spec.seed, stream])


def _node_name(cls: TransportClass, index: int) -> str:
    return f"{cls.value.lower()}-{index:03d}"


def _link(a: str, b: str, capacity: float, latency: float = 0.0) -> Link:
    a, b = sorted((a, b))
    return Link(f"{a}~{b}", (a, b), capacity, latency)


def _t1_layout() -> tuple[dict[TransportClass, list[str]], list[tuple[str, str]]]:
    ag1 = [_node_name(TransportClass.AG1, i) for i in range(T1_AG1_COUNT)]
    ag2 = [_node_name(TransportClass.AG2, i) for i in range(T1_AG2_COUNT)]
    ac1 = [
        _node_name(TransportClass.AC1, i)
        for i in range(T1_ACCESS_RINGS * T1_ACCESS_RING_SIZE)
    ]

    edges = [(CORE_ID, node) for node in ag1]

    # Aggregation ring: first AG1, the AG2 chain, second AG1, back to the first
    ring = [ag1[0], *ag2, ag1[1]]
    edges += list(zip(ring, ring[1:])) + [(ag1[1], ag1[0])]

    # Access ring j hangs between AG2 j and AG2 j+1
    for j in range(T1_ACCESS_RINGS):
        members = ac1[j * T1_ACCESS_RING_SIZE : (j + 1) * T1_ACCESS_RING_SIZE]
        chain = [ag2[j], *members, ag2[j + 1]]
        edges += list(zip(chain, chain[1:]))

    classes = {TransportClass.AG1: ag1, TransportClass.AG2: ag2, TransportClass.AC1: ac1}
    return classes, edges


def _t2_layout() -> tuple[dict[TransportClass, list[str]], list[tuple[str, str]]]:
    ag1 = [_node_name(TransportClass.AG1, i) for i in range(T2_AG1_COUNT)]
    ag2 = [_node_name(TransportClass.AG2, i) for i in range(T2_AG2_COUNT)]
    ac1_count = (T2_AG2_COUNT // 2) * T2_AC1_PER_AG2_PAIR
    ac1 = [_node_name(TransportClass.AC1, i) for i in range(ac1_count)]
    ac2 = [_node_name(TransportClass.AC2, i) for i in range(ac1_count * T2_AC2_PER_AC1)]

    edges = [(CORE_ID, node) for node in ag1]
    edges += [(a, b) for b in ag2 for a in ag1]

    # AC1 nodes are dual-homed to one pair of AG2 nodes
    for i, node in enumerate(ac1):
        pair = i // T2_AC1_PER_AG2_PAIR
        edges += [(ag2[2 * pair], node), (ag2[2 * pair + 1], node)]

    for i, node in enumerate(ac2):
        edges.append((ac1[i // T2_AC2_PER_AC1], node))

    classes = {
        TransportClass.AG1: ag1,
        TransportClass.AG2: ag2,
        TransportClass.AC1: ac1,
        TransportClass.AC2: ac2,
    }
    return classes, edges


def generate_topology(spec: ScenarioSpec) -> Topology:
    """Builds the transport structure of a scenario

    CRs get the low end of their class range and links the lowest rate of
    their class with zero latency; `apply_capacity` assigns the scenario's
    values. The structure itself does not depend on the seed.
    """

    spec.validate()
    params = spec.resolved_params
    leveled = spec.topology_kind is TopologyKind.T2

    classes, edges = _t1_layout() if not leveled else _t2_layout()

    nodes = [Node(CORE_ID, NodeKind.CORE, level=0 if leveled else None)]
    links = []
    for cls, members in classes.items():
        table = params.classes[cls]
        for name in members:
            nodes.append(
                Node(
                    name,
                    NodeKind.TRANSPORT,
                    transport_class=cls,
                    level=LEVELS[cls] if leveled else None,
                )
            )
            for i in range(table.cr_count):
                cr = f"cr-{name}" if table.cr_count == 1 else f"cr-{name}-{i}"
                nodes.append(
                    Node(cr, NodeKind.COMPUTING_RESOURCE, proc_capacity=float(table.cr_capacity[0]))
                )
                links.append(_link(cr, name, params.attachment_capacity))

    node_classes = {name: cls for cls, members in classes.items() for name in members}
    for a, b in edges:
        cls = _link_class(node_classes.get(a), node_classes.get(b))
        links.append(_link(a, b, params.classes[cls].link_rates[0]))

    metadata = {
        "topology": spec.topology_kind.value,
        "capacity": spec.capacity.value,
        "ru_config": spec.ru_config.value,
        "seed": spec.seed,
    }
    topology = Topology.build(nodes, links, metadata)
    logger.info(
        "generated %s: %d transport nodes, %d CRs",
        spec.topology_kind.value,
        len(topology.transport_nodes),
        len(topology.crs),
    )
    return topology


def _link_class(*classes: Optional[TransportClass]) -> TransportClass:
    """The class of the endpoint farthest from the core"""
    return max((c for c in classes if c is not None), key=lambda c: LEVELS[c])


def _draw_cr_capacity(table: ClassParams, scenario: CapacityScenario, rng: np.random.Generator):
    low, high = table.cr_capacity
    if scenario is CapacityScenario.LC:
        return float(low)
    if scenario is CapacityScenario.HC:
        return float(high)
    return float(rng.integers(int(low), int(high), endpoint=True))


def _draw_link_rate(table: ClassParams, scenario: CapacityScenario, rng: np.random.Generator):
    if scenario is CapacityScenario.LC:
        return float(table.link_rates[0])
    if scenario is CapacityScenario.HC:
        return float(table.link_rates[-1])
    return float(table.link_rates[int(rng.integers(len(table.link_rates)))])


def _draw_latency(
    table: ClassParams, spec: ScenarioSpec, params: ScenarioParams, rng: np.random.Generator
) -> float:
    low, avg, high = table.distance_km

    if spec.topology_kind is TopologyKind.T1:
        # Per-link distances, identical across capacity scenarios of a seed
        distance = float(rng.uniform(low, high))
        return distance * params.propagation_s_per_km + params.computing_latency

    if spec.capacity is CapacityScenario.HC:
        distance = low
    elif spec.capacity is CapacityScenario.LC:
        distance = (avg, high)[int(rng.integers(2))]
    else:
        distance = (low, avg, high)[int(rng.integers(3))]

    return (
        distance * params.propagation_s_per_km
        + params.computing_latency
        + params.optical_transit_latency
        + params.regenerator_latency
    )


def _endpoint_classes(topology: Topology, link: Link) -> list[Optional[TransportClass]]:
    return [topology.nodes[e].transport_class for e in link.endpoints]


def apply_capacity(topology: Topology, spec: ScenarioSpec) -> Topology:
    """Assigns CR capacities and link capacities and latencies for the scenario"""

    spec.validate()
    params = spec.resolved_params
    capacity_rng = _rng(spec, STREAM_CAPACITY)
    latency_rng = _rng(spec, STREAM_LATENCY)

    nodes = []
    for node_id in sorted(topology.nodes):
        node = topology.nodes[node_id]
        if node.kind is NodeKind.COMPUTING_RESOURCE:
            cls = topology.transport_class_of(node_id)
            if cls is not None:
                capacity = _draw_cr_capacity(params.classes[cls], spec.capacity, capacity_rng)
                node = replace(node, proc_capacity=capacity)
        nodes.append(node)

    attachment = topology.attachment_links
    links = []
    for link_id in sorted(topology.links):
        link = topology.links[link_id]
        if link_id not in attachment:
            table = params.classes[_link_class(*_endpoint_classes(topology, link))]
            link = replace(
                link,
                capacity=_draw_link_rate(table, spec.capacity, capacity_rng),
                latency=_draw_latency(table, spec, params, latency_rng),
            )
        links.append(link)

    return Topology.build(nodes, links, topology.metadata)


def attach_rus(topology: Topology, spec: ScenarioSpec) -> Topology:
    """Connects RUs to the eligible transport nodes

    F1 attaches `ru_slots` RUs (one by default) to every eligible node. R1
    attaches zero or one per eligible node, by a seeded Bernoulli draw or,
    when `ru_count` is set, by drawing exactly that many nodes.
    """

    spec.validate()
    params = spec.resolved_params
    eligible = [
        n
        for n in topology.transport_nodes
        if params.classes[topology.nodes[n].transport_class].ru_slots > 0
    ]

    if spec.ru_config is RuConfig.F1:
        if spec.ru_count is not None:
            logger.warning("ru_count is ignored under F1")
        slots = {
            n: params.classes[topology.nodes[n].transport_class].ru_slots for n in eligible
        }
    else:
        rng = _rng(spec, STREAM_RU_SELECTION)
        if spec.ru_count is not None:
            if spec.ru_count > len(eligible):
                raise ScenarioError(
                    f"ru_count {spec.ru_count} exceeds the {len(eligible)} eligible nodes",
                    ru_count=spec.ru_count,
                )
            chosen = set(rng.choice(eligible, size=spec.ru_count, replace=False).tolist())
        else:
            draws = rng.random(len(eligible))
            chosen = {n for n, draw in zip(eligible, draws) if draw < params.ru_probability}
        slots = {n: 1 for n in eligible if n in chosen}

    capacity_rng = _rng(spec, STREAM_RU_CAPACITY)
    latency_rng = _rng(spec, STREAM_RU_LATENCY)

    crs = set(topology.crs)
    nodes = list(topology.nodes.values())
    links = list(topology.links.values())
    for site, count in slots.items():
        cls = topology.nodes[site].transport_class
        table = params.classes[cls]
        local_crs = [n for n in topology.neighbors(site) if n in crs]
        for i in range(count):
            ru = f"ru-{site}" if count == 1 else f"ru-{site}-{i}"
            nodes.append(
                Node(
                    ru,
                    NodeKind.RADIO_UNIT,
                    attached_cr=local_crs[0] if local_crs else None,
                )
            )
            links.append(
                _link(
                    ru,
                    site,
                    _draw_link_rate(table, spec.capacity, capacity_rng),
                    _draw_latency(table, spec, params, latency_rng),
                )
            )

    metadata = {**topology.metadata, "rus": sum(slots.values())}
    attached = Topology.build(nodes, links, metadata)
    logger.info("attached %d RUs (%s)", len(attached.rus), spec.ru_config.value)
    return attached


def build_scenario(spec: ScenarioSpec) -> Topology:
    return attach_rus(apply_capacity(generate_topology(spec), spec), spec)


def params_from_dict(data: Mapping[str, Any], kind: TopologyKind) -> ScenarioParams:
    """Overlays a JSON parameter table on the defaults of a topology kind"""

    base = default_params(kind)
    try:
        classes = dict(base.classes)
        for name, raw in data.get("classes", {}).items():
            cls = TransportClass(name)
            current = classes.get(cls)
            merged: dict[str, Any] = {} if current is None else asdict(current)
            merged.update(raw)
            classes[cls] = ClassParams(
                cr_count=int(merged["cr_count"]),
                cr_capacity=tuple(float(v) for v in merged["cr_capacity"]),
                link_rates=tuple(float(v) for v in merged["link_rates"]),
                distance_km=tuple(float(v) for v in merged["distance_km"]),
                ru_slots=int(merged["ru_slots"]),
            )
        scalars = {
            key: float(data[key])
            for key in (
                "propagation_s_per_km",
                "computing_latency",
                "optical_transit_latency",
                "regenerator_latency",
                "ru_probability",
                "attachment_capacity",
            )
            if key in data
        }
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"malformed scenario parameters: {exc!r}") from exc

    return replace(base, classes=classes, **scalars)


def load_params(path: Union[str, Path], kind: TopologyKind) -> ScenarioParams:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read parameters {path}: {exc}", path=str(path)) from exc
    return params_from_dict(data, kind)


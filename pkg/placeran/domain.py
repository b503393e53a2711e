from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping, NamedTuple, Optional, Union

import networkx as nx

from placeran.errors import CatalogError, TopologyError
from placeran.placeran_types import Bps, Cores, LinkId, NodeId, Seconds, VnfId

# Protocol stack order, Low PHY first
VNF_IDS: tuple[VnfId, ...] = ("f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8")

# f1 stays on the RU, the rest can run on computing resources
VIRTUALIZED_VNFS: tuple[VnfId, ...] = VNF_IDS[1:]

SUBPATH_KEYS = ("bh", "mh", "fh")

# Latency bound of a sub-path the DRC does not have
ABSENT_LATENCY = math.inf

MAPPED_DRC_IDS = range(1, 20)

CATALOG_DIR = Path(__file__).parent / "catalog"
DEFAULT_CATALOG_PATH = CATALOG_DIR / "default.json"
# Same DRCs sized for the wider T2 carrier (100 MHz against 40 MHz)
T2_CATALOG_PATH = CATALOG_DIR / "t2.json"


class NodeKind(Enum):
    CORE = "core"
    TRANSPORT = "transport"
    COMPUTING_RESOURCE = "cr"
    RADIO_UNIT = "ru"


class TransportClass(Enum):
    AG1 = "AG1"
    AG2 = "AG2"
    AC1 = "AC1"
    AC2 = "AC2"

    @property
    def group(self) -> str:
        """Reporting group, access classes are merged into `AC`"""
        return "AC" if self in (TransportClass.AC1, TransportClass.AC2) else self.value


REPORT_GROUPS = ("AG1", "AG2", "AC")


class DrcSet(Enum):
    NG_RAN_3 = "NG-RAN(3)"
    NG_RAN_2 = "NG-RAN(2)"
    C_RAN = "C-RAN"
    D_RAN = "D-RAN"


# Set label of the nine industry DRCs
INDUSTRY_DRC_SETS = {
    1: DrcSet.NG_RAN_3,
    2: DrcSet.NG_RAN_3,
    7: DrcSet.NG_RAN_3,
    8: DrcSet.NG_RAN_3,
    12: DrcSet.NG_RAN_2,
    13: DrcSet.NG_RAN_2,
    17: DrcSet.C_RAN,
    18: DrcSet.C_RAN,
    19: DrcSet.D_RAN,
}

# Sub-paths each family of DRCs carries
SUBPATHS_BY_SET = {
    DrcSet.NG_RAN_3: ("bh", "mh", "fh"),
    DrcSet.NG_RAN_2: ("bh", "mh"),
    DrcSet.C_RAN: ("bh", "fh"),
    DrcSet.D_RAN: ("bh",),
}


@dataclass(frozen=True)
class Node:
    """A vertex of the transport graph

    Attributes:
        id: Identifier unique within the topology.
        kind: Core, transport node, computing resource (CR) or radio unit (RU).
        transport_class: AG1/AG2/AC1/AC2, transport nodes only.
        proc_capacity: Processing capacity in reference cores, CRs only.
        attached_cr: CR co-located with the attachment point of an RU.
        level: Hierarchy level, set on topologies where routes may not
            repeat a level.
    """

    id: NodeId
    kind: NodeKind
    transport_class: Optional[TransportClass] = None
    proc_capacity: Optional[Cores] = None
    attached_cr: Optional[NodeId] = None
    level: Optional[int] = None


@dataclass(frozen=True)
class Link:
    """An undirected link with a single (downlink) capacity"""

    id: LinkId
    endpoints: tuple[NodeId, NodeId]
    capacity: Bps
    latency: Seconds

    def other(self, node: NodeId) -> NodeId:
        return self.endpoints[1] if self.endpoints[0] == node else self.endpoints[0]


@dataclass(frozen=True)
class Topology:
    """The annotated graph of core, transport nodes, CRs and RUs

    Topologies are immutable; derived views (the networkx graph, sorted id
    lists) are computed once and cached on the instance.

    Attributes:
        nodes: Nodes keyed by id.
        links: Links keyed by id.
        metadata: Free-form provenance (topology kind, capacity scenario, ...).
    """

    nodes: Mapping[NodeId, Node]
    links: Mapping[LinkId, Link]
    metadata: Mapping[str, Any] = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        nodes: Iterable[Node],
        links: Iterable[Link],
        metadata: Optional[Mapping[str, Any]] = None,
    ) -> Topology:
        node_map: dict[NodeId, Node] = {}
        for node in nodes:
            if node.id in node_map:
                raise TopologyError(f"duplicate node id {node.id}", node=node.id)
            node_map[node.id] = node

        link_map: dict[LinkId, Link] = {}
        for link in links:
            if link.id in link_map:
                raise TopologyError(f"duplicate link id {link.id}", link=link.id)
            link_map[link.id] = link

        return cls(node_map, link_map, dict(metadata or {}))

    @cached_property
    def graph(self) -> nx.Graph:
        graph = nx.Graph()
        for node in self.nodes.values():
            graph.add_node(node.id, kind=node.kind, level=node.level)
        for link in self.links.values():
            a, b = link.endpoints
            graph.add_edge(a, b, link=link.id, latency=link.latency, capacity=link.capacity)
        return graph

    def ids_of(self, kind: NodeKind) -> list[NodeId]:
        return sorted(node.id for node in self.nodes.values() if node.kind is kind)

    @cached_property
    def core(self) -> Optional[NodeId]:
        cores = self.ids_of(NodeKind.CORE)
        return cores[0] if cores else None

    @cached_property
    def rus(self) -> list[NodeId]:
        return self.ids_of(NodeKind.RADIO_UNIT)

    @cached_property
    def crs(self) -> list[NodeId]:
        return self.ids_of(NodeKind.COMPUTING_RESOURCE)

    @cached_property
    def transport_nodes(self) -> list[NodeId]:
        return self.ids_of(NodeKind.TRANSPORT)

    @cached_property
    def adjacency(self) -> dict[NodeId, list[tuple[NodeId, LinkId]]]:
        adjacency: dict[NodeId, list[tuple[NodeId, LinkId]]] = {n: [] for n in self.nodes}
        for link in self.links.values():
            a, b = link.endpoints
            if a in adjacency and b in adjacency and a != b:
                adjacency[a].append((b, link.id))
                adjacency[b].append((a, link.id))
        for neighbors in adjacency.values():
            neighbors.sort()
        return adjacency

    def neighbors(self, node: NodeId) -> list[NodeId]:
        return [neighbor for neighbor, _ in self.adjacency.get(node, [])]

    def link_between(self, a: NodeId, b: NodeId) -> Optional[Link]:
        data = self.graph.get_edge_data(a, b)
        return None if data is None else self.links[data["link"]]

    def cr_site(self, cr: NodeId) -> Optional[NodeId]:
        """Returns the transport node or RU a CR is attached to"""

        sites = [
            n
            for n in self.neighbors(cr)
            if self.nodes[n].kind in (NodeKind.TRANSPORT, NodeKind.RADIO_UNIT)
        ]
        return sites[0] if len(self.neighbors(cr)) == 1 and len(sites) == 1 else None

    @cached_property
    def crs_by_site(self) -> dict[NodeId, list[NodeId]]:
        sites: dict[NodeId, list[NodeId]] = {}
        for cr in self.crs:
            site = self.cr_site(cr)
            if site is not None:
                sites.setdefault(site, []).append(cr)
        return sites

    def colocated_cr(self, ru: NodeId) -> Optional[NodeId]:
        """Returns the CR co-located with an RU, if any

        The RU's `attached_cr` wins when it names a CR linked to the RU
        itself or to a transport node adjacent to the RU. Otherwise the
        unique CR linked directly to the RU is used.
        """

        node = self.nodes[ru]
        if node.attached_cr is not None and self._attached_cr_valid(ru, node.attached_cr):
            return node.attached_cr

        direct = [
            n for n in self.neighbors(ru) if self.nodes[n].kind is NodeKind.COMPUTING_RESOURCE
        ]
        return direct[0] if len(direct) == 1 else None

    def _attached_cr_valid(self, ru: NodeId, cr: NodeId) -> bool:
        target = self.nodes.get(cr)
        if target is None or target.kind is not NodeKind.COMPUTING_RESOURCE:
            return False

        site = self.cr_site(cr)
        if site == ru:
            return True
        return (
            site is not None
            and self.nodes[site].kind is NodeKind.TRANSPORT
            and site in self.neighbors(ru)
        )

    @cached_property
    def attachment_links(self) -> frozenset[LinkId]:
        """Links touching a CR, these are intra-site and never carry traffic"""

        return frozenset(
            link.id
            for link in self.links.values()
            if any(
                e in self.nodes and self.nodes[e].kind is NodeKind.COMPUTING_RESOURCE
                for e in link.endpoints
            )
        )

    def transport_class_of(self, cr: NodeId) -> Optional[TransportClass]:
        site = self.cr_site(cr)
        return None if site is None else self.nodes[site].transport_class


class Violation(NamedTuple):
    code: str
    message: str
    ids: tuple[str, ...] = ()


@dataclass
class ValidationReport:
    """The invariant violations found in a topology, empty means valid"""

    violations: list[Violation] = field(default_factory=list)

    def add(self, code: str, message: str, *ids: str):
        self.violations.append(Violation(code, message, tuple(ids)))

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[str]:
        return {violation.code for violation in self.violations}

    def to_dict(self) -> dict[str, Any]:
        return {
            "valid": self.ok,
            "violations": [
                {"code": v.code, "message": v.message, "ids": list(v.ids)}
                for v in self.violations
            ],
        }

    def __len__(self):
        return len(self.violations)

    def __iter__(self) -> Iterator[Violation]:
        return iter(self.violations)


def validate_topology(topology: Topology) -> ValidationReport:
    """Checks every Topology, Node and Link invariant

    Args:
        topology: The topology to check.

    Returns:
        A report listing each violation with the offending ids. Nothing is
        raised, an invalid topology is a normal result.
    """

    report = ValidationReport()
    nodes = topology.nodes

    cores = topology.ids_of(NodeKind.CORE)
    if not cores:
        report.add("no-core", "topology has no core node")
    elif len(cores) > 1:
        report.add("multiple-cores", f"multiple cores: {', '.join(cores)}", *cores)

    if not topology.rus:
        report.add("no-ru", "topology has no radio unit")

    for node in nodes.values():
        is_cr = node.kind is NodeKind.COMPUTING_RESOURCE
        if is_cr != (node.proc_capacity is not None):
            report.add(
                "proc-capacity",
                f"node {node.id}: proc_capacity must be set exactly on CRs",
                node.id,
            )
        elif is_cr and not (0 <= node.proc_capacity < math.inf):
            report.add("proc-capacity", f"CR {node.id}: invalid capacity", node.id)

        if (node.kind is NodeKind.TRANSPORT) != (node.transport_class is not None):
            report.add(
                "transport-class",
                f"node {node.id}: transport_class must be set exactly on transport nodes",
                node.id,
            )

        if node.attached_cr is not None:
            if node.kind is not NodeKind.RADIO_UNIT:
                report.add("attached-cr", f"node {node.id}: only RUs name a CR", node.id)
            elif not topology._attached_cr_valid(node.id, node.attached_cr):
                report.add(
                    "attached-cr",
                    f"RU {node.id}: {node.attached_cr} is not a CR at its attachment point",
                    node.id,
                    node.attached_cr,
                )

    pairs: set[frozenset[NodeId]] = set()
    for link in topology.links.values():
        a, b = link.endpoints
        if a not in nodes or b not in nodes:
            report.add("unknown-endpoint", f"link {link.id}: unknown endpoint", link.id)
            continue
        if a == b:
            report.add("self-loop", f"link {link.id}: self-loop on {a}", link.id)
            continue
        pair = frozenset((a, b))
        if pair in pairs:
            report.add("parallel-link", f"link {link.id}: parallel link {a}-{b}", link.id)
        pairs.add(pair)
        if not (0 < link.capacity < math.inf):
            report.add("link-capacity", f"link {link.id}: invalid capacity", link.id)
        if not (0 <= link.latency < math.inf):
            report.add("link-latency", f"link {link.id}: invalid latency", link.id)

    for cr in topology.crs:
        if topology.cr_site(cr) is None:
            report.add(
                "cr-attachment",
                f"CR {cr} must be linked to exactly one transport node or RU",
                cr,
            )

    graph = topology.graph
    if graph.number_of_nodes() and not nx.is_connected(graph):
        report.add("disconnected", "topology is not connected")

    if topology.core is not None:
        routable = [
            n for n in nodes.values() if n.kind in (NodeKind.CORE, NodeKind.TRANSPORT)
        ]
        backbone = graph.subgraph(n.id for n in routable)
        reachable = nx.node_connected_component(backbone, topology.core)
        for ru in topology.rus:
            if topology.core not in topology.neighbors(ru) and not any(
                n in reachable for n in topology.neighbors(ru)
            ):
                report.add("unreachable-ru", f"unreachable RU {ru}", ru)

    return report


def topology_from_dict(data: Mapping[str, Any]) -> Topology:
    try:
        nodes = [
            Node(
                id=str(raw["id"]),
                kind=NodeKind(raw["kind"]),
                transport_class=(
                    TransportClass(raw["transport_class"])
                    if raw.get("transport_class") is not None
                    else None
                ),
                proc_capacity=(
                    float(raw["proc_capacity"])
                    if raw.get("proc_capacity") is not None
                    else None
                ),
                attached_cr=(
                    str(raw["attached_cr"]) if raw.get("attached_cr") is not None else None
                ),
                level=int(raw["level"]) if raw.get("level") is not None else None,
            )
            for raw in data["nodes"]
        ]
        links = [
            Link(
                id=str(raw["id"]),
                endpoints=(str(raw["endpoints"][0]), str(raw["endpoints"][1])),
                capacity=float(raw["capacity"]),
                latency=float(raw["latency"]),
            )
            for raw in data["links"]
        ]
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise TopologyError(f"malformed topology: {exc!r}") from exc

    return Topology.build(nodes, links, data.get("metadata", {}))


def topology_to_dict(topology: Topology) -> dict[str, Any]:
    nodes = []
    for node_id in sorted(topology.nodes):
        node = topology.nodes[node_id]
        raw: dict[str, Any] = {"id": node.id, "kind": node.kind.value}
        if node.transport_class is not None:
            raw["transport_class"] = node.transport_class.value
        if node.proc_capacity is not None:
            raw["proc_capacity"] = node.proc_capacity
        if node.attached_cr is not None:
            raw["attached_cr"] = node.attached_cr
        if node.level is not None:
            raw["level"] = node.level
        nodes.append(raw)

    links = [
        {
            "id": link.id,
            "endpoints": list(link.endpoints),
            "capacity": link.capacity,
            "latency": link.latency,
        }
        for link in (topology.links[i] for i in sorted(topology.links))
    ]
    return {"nodes": nodes, "links": links, "metadata": dict(topology.metadata)}


def load_topology(path: Union[str, Path]) -> Topology:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise TopologyError(f"cannot read topology {path}: {exc}", path=str(path)) from exc
    return topology_from_dict(data)


def dump_topology(topology: Topology, path: Union[str, Path]):
    Path(path).write_text(json.dumps(topology_to_dict(topology), indent=2, sort_keys=True) + "\n")


@dataclass(frozen=True)
class Vnf:
    id: VnfId
    compute_demand: Cores


class Requirement(NamedTuple):
    """Bandwidth and latency bound of one sub-path"""

    bandwidth: Bps
    latency: Seconds


@dataclass(frozen=True)
class Drc:
    """A Disaggregated RAN Combination

    One functional split together with the placement of f1..f8 into the
    CU, DU and RU units, the bandwidth and latency each transport sub-path
    needs, and a priority (smaller is preferred).
    """

    id: int
    set_label: DrcSet
    cu_functions: frozenset[VnfId]
    du_functions: frozenset[VnfId]
    ru_functions: frozenset[VnfId]
    bh_bw: Bps = 0.0
    mh_bw: Bps = 0.0
    fh_bw: Bps = 0.0
    bh_lat: Seconds = ABSENT_LATENCY
    mh_lat: Seconds = ABSENT_LATENCY
    fh_lat: Seconds = ABSENT_LATENCY
    priority: int = 1

    @property
    def units(self) -> int:
        """Number of independent locations (CU, DU, RU site) the DRC uses"""
        partition = unit_partition(self)
        return 1 + bool(partition.cu) + bool(partition.du)

    def bandwidth(self, key: str) -> Bps:
        return getattr(self, f"{key}_bw")

    def latency(self, key: str) -> Seconds:
        return getattr(self, f"{key}_lat")


class UnitPartition(NamedTuple):
    """Where a DRC's functions run

    `cu` and `du` are the units on their own host CRs (C-RAN reports the
    merged CU+DU unit as `cu`), `ru` is always {f1} and `colocated` is the
    unit on the CR co-located with the RU.
    """

    cu: frozenset[VnfId]
    du: frozenset[VnfId]
    ru: frozenset[VnfId]
    colocated: frozenset[VnfId]


def unit_partition(drc: Drc) -> UnitPartition:
    ru = frozenset({"f1"})
    ru_side = frozenset(drc.ru_functions) - ru
    empty: frozenset[VnfId] = frozenset()

    if drc.set_label is DrcSet.D_RAN:
        return UnitPartition(empty, empty, ru, frozenset(VIRTUALIZED_VNFS))
    if drc.set_label is DrcSet.NG_RAN_2:
        return UnitPartition(frozenset(drc.cu_functions), empty, ru, drc.du_functions | ru_side)
    if drc.set_label is DrcSet.C_RAN:
        return UnitPartition(drc.cu_functions | drc.du_functions, empty, ru, ru_side)
    return UnitPartition(frozenset(drc.cu_functions), frozenset(drc.du_functions), ru, ru_side)


def subpath_profile(drc: Drc) -> dict[str, Requirement]:
    """Returns the sub-paths a DRC uses, absent ones omitted"""

    return {
        key: Requirement(drc.bandwidth(key), drc.latency(key))
        for key in SUBPATHS_BY_SET[drc.set_label]
    }


@dataclass(frozen=True)
class DrcCatalog:
    """The DRCs available to the planner and the compute demand of each VNF"""

    drcs: tuple[Drc, ...]
    vnf_demands: Mapping[VnfId, Cores]

    @cached_property
    def by_id(self) -> dict[int, Drc]:
        return {drc.id: drc for drc in self.drcs}

    @property
    def ids(self) -> list[int]:
        return sorted(self.by_id)

    @property
    def max_priority(self) -> int:
        return max(drc.priority for drc in self.drcs)

    @property
    def vnfs(self) -> list[Vnf]:
        return [Vnf(f, self.demand(f)) for f in VNF_IDS]

    def get(self, drc_id: int) -> Drc:
        try:
            return self.by_id[drc_id]
        except KeyError:
            raise CatalogError(f"DRC {drc_id} is not in the catalog", drc=drc_id) from None

    def demand(self, vnf: VnfId) -> Cores:
        # f1 runs on the RU hardware and never loads a CR
        return 0.0 if vnf == "f1" else self.vnf_demands[vnf]

    def subset(self, ids: Iterable[int]) -> DrcCatalog:
        return DrcCatalog(tuple(self.get(i) for i in sorted(set(ids))), dict(self.vnf_demands))


def validate_catalog(catalog: DrcCatalog):
    """Raises `CatalogError` on the first broken catalog invariant"""

    if set(catalog.vnf_demands) != set(VIRTUALIZED_VNFS):
        raise CatalogError("vnf_demands must list exactly f2..f8")
    for vnf, demand in catalog.vnf_demands.items():
        if not (0 <= demand < math.inf):
            raise CatalogError(f"invalid compute demand for {vnf}", vnf=vnf)

    seen_ids: set[int] = set()
    seen_priorities: dict[int, int] = {}
    rank = {"ru": 0, "du": 1, "cu": 2}

    for drc in catalog.drcs:
        if drc.id not in MAPPED_DRC_IDS:
            raise CatalogError(f"unknown DRC id {drc.id}", drc=drc.id)
        if drc.id in seen_ids:
            raise CatalogError(f"duplicate DRC id {drc.id}", drc=drc.id)
        seen_ids.add(drc.id)

        expected = INDUSTRY_DRC_SETS.get(drc.id)
        if expected is not None and drc.set_label is not expected:
            raise CatalogError(
                f"DRC {drc.id} belongs to {expected.value}, not {drc.set_label.value}",
                drc=drc.id,
            )

        units = {"cu": drc.cu_functions, "du": drc.du_functions, "ru": drc.ru_functions}
        placed = [f for unit in units.values() for f in unit]
        if sorted(placed) != list(VNF_IDS):
            raise CatalogError(
                f"DRC {drc.id}: units must partition f1..f8", drc=drc.id
            )
        if "f1" not in drc.ru_functions:
            raise CatalogError(f"DRC {drc.id}: f1 must stay on the RU", drc=drc.id)

        # Unit rank never decreases along the stack: RU prefix, DU, CU suffix
        ranks = [rank[next(u for u, fs in units.items() if f in fs)] for f in VNF_IDS]
        if ranks != sorted(ranks):
            raise CatalogError(f"DRC {drc.id}: units interleave the stack", drc=drc.id)

        split = bool(drc.cu_functions), bool(drc.du_functions)
        if drc.set_label is DrcSet.D_RAN and split != (False, False):
            raise CatalogError(f"DRC {drc.id}: D-RAN has no CU or DU", drc=drc.id)
        if drc.set_label is not DrcSet.D_RAN and split != (True, True):
            raise CatalogError(f"DRC {drc.id}: CU and DU must be non-empty", drc=drc.id)

        present = SUBPATHS_BY_SET[drc.set_label]
        for key in SUBPATH_KEYS:
            bandwidth, latency = drc.bandwidth(key), drc.latency(key)
            if key in present and not (0 <= bandwidth < math.inf and 0 <= latency < math.inf):
                raise CatalogError(f"DRC {drc.id}: sub-path {key} is required", drc=drc.id)
            if key not in present and (bandwidth != 0 or latency != ABSENT_LATENCY):
                raise CatalogError(f"DRC {drc.id}: sub-path {key} must be absent", drc=drc.id)

        if drc.priority < 1:
            raise CatalogError(f"DRC {drc.id}: priority must be positive", drc=drc.id)
        if drc.priority in seen_priorities:
            raise CatalogError(
                f"DRC {drc.id} and DRC {seen_priorities[drc.priority]} share a priority",
                drc=drc.id,
            )
        seen_priorities[drc.priority] = drc.id


def _stack_sorted(functions: Iterable[str]) -> list[str]:
    return sorted(functions, key=VNF_IDS.index)


def catalog_from_dict(data: Mapping[str, Any]) -> DrcCatalog:
    try:
        drcs = []
        for raw in data["drcs"]:
            requirements: dict[str, Any] = {}
            for key in SUBPATH_KEYS:
                if key in raw:
                    requirements[f"{key}_bw"] = float(raw[key]["bandwidth"])
                    requirements[f"{key}_lat"] = float(raw[key]["latency"])
            functions = {
                unit: frozenset(raw.get(unit, [])) for unit in ("cu", "du", "ru")
            }
            unknown = set().union(*functions.values()) - set(VNF_IDS)
            if unknown:
                raise CatalogError(f"unknown VNF ids {sorted(unknown)}", drc=raw.get("id"))
            drcs.append(
                Drc(
                    id=int(raw["id"]),
                    set_label=DrcSet(raw["set"]),
                    cu_functions=functions["cu"],
                    du_functions=functions["du"],
                    ru_functions=functions["ru"],
                    priority=int(raw["priority"]),
                    **requirements,
                )
            )
        demands = {str(k): float(v) for k, v in data["vnf_demands"].items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise CatalogError(f"malformed catalog: {exc!r}") from exc

    catalog = DrcCatalog(tuple(sorted(drcs, key=lambda d: d.id)), demands)
    validate_catalog(catalog)
    return catalog


def catalog_to_dict(catalog: DrcCatalog) -> dict[str, Any]:
    drcs = []
    for drc in sorted(catalog.drcs, key=lambda d: d.id):
        raw: dict[str, Any] = {
            "id": drc.id,
            "set": drc.set_label.value,
            "cu": _stack_sorted(drc.cu_functions),
            "du": _stack_sorted(drc.du_functions),
            "ru": _stack_sorted(drc.ru_functions),
            "priority": drc.priority,
        }
        for key, requirement in subpath_profile(drc).items():
            raw[key] = {"bandwidth": requirement.bandwidth, "latency": requirement.latency}
        drcs.append(raw)

    demands = {f: catalog.vnf_demands[f] for f in VIRTUALIZED_VNFS}
    return {"drcs": drcs, "vnf_demands": demands}


def load_catalog(path: Union[str, Path]) -> DrcCatalog:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CatalogError(f"cannot read catalog {path}: {exc}", path=str(path)) from exc
    return catalog_from_dict(data)


def dump_catalog(catalog: DrcCatalog, path: Union[str, Path]):
    Path(path).write_text(json.dumps(catalog_to_dict(catalog), indent=2, sort_keys=True) + "\n")


def default_catalog() -> DrcCatalog:
    return load_catalog(DEFAULT_CATALOG_PATH)


def catalog_for(topology: Topology) -> DrcCatalog:
    """The packaged catalog matching the RAN profile of a generated topology"""

    if topology.metadata.get("topology") == "T2":
        return load_catalog(T2_CATALOG_PATH)
    return default_catalog()

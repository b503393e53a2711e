from __future__ import annotations

import json
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Mapping, NamedTuple, Optional, Sequence, Union

import networkx as nx

from placeran.domain import (
    SUBPATH_KEYS,
    Drc,
    DrcCatalog,
    DrcSet,
    NodeKind,
    Topology,
    unit_partition,
)
from placeran.errors import TopologyError
from placeran.placeran_types import Bps, Cores, LinkId, NodeId, Seconds, VnfId

logger = logging.getLogger(__name__)

# Float noise tolerated when a sub-path latency meets its bound
LATENCY_SLACK = 1e-12

# Decimal places kept when ranking routes by latency (picoseconds)
LATENCY_DIGITS = 12


class PathMetric(Enum):
    LATENCY = "latency"
    HOPS = "hops"


@dataclass(frozen=True)
class Route:
    """A loop-free path from the core to one RU"""

    ru: NodeId
    nodes: tuple[NodeId, ...]
    links: tuple[LinkId, ...]
    total_latency: Seconds

    @property
    def hops(self) -> int:
        return len(self.links)

    def __repr__(self):
        return f"Route[{' > '.join(self.nodes)}]"


class RouteHost(NamedTuple):
    """A CR that can host a unit of a route, with its position on the route"""

    cr: NodeId
    position: int


@dataclass(frozen=True)
class CandidateAssignment:
    """One admissible way to serve an RU

    A route, a DRC and the CRs hosting its units, with everything the
    program needs precomputed: the links of each sub-path, their latencies,
    the bandwidth each link carries and the cores each CR spends.

    Attributes:
        ru: The RU served.
        route: Core to RU route.
        drc: Catalog id of the DRC.
        cu_host: CR running the CU (the merged CU+DU under C-RAN).
        du_host: CR running the DU.
        ru_host: The RU's co-located CR when it runs virtualized functions.
        subpaths: Backhaul, midhaul and fronthaul link sequences.
        subpath_latency: Latency of each sub-path in seconds.
        link_loads: Bandwidth placed on every loaded link.
        cr_loads: Cores placed on every used CR.
        placements: (CR, VNF) pairs for every function of f2..f8.
        route_crs: Every CR that can host a unit of the route, in route order.
    """

    ru: NodeId
    route: Route
    drc: int
    cu_host: Optional[NodeId]
    du_host: Optional[NodeId]
    ru_host: Optional[NodeId]
    subpaths: Mapping[str, tuple[LinkId, ...]]
    subpath_latency: Mapping[str, Seconds]
    link_loads: Mapping[LinkId, Bps]
    cr_loads: Mapping[NodeId, Cores]
    placements: frozenset[tuple[NodeId, VnfId]]
    route_crs: tuple[NodeId, ...]

    @property
    def instances(self) -> int:
        """Number of virtualized function instances the candidate places"""
        return len(self.placements)

    @property
    def used_crs(self) -> frozenset[NodeId]:
        return frozenset(cr for cr, _ in self.placements)

    def describe(self) -> dict[str, Any]:
        return {
            "drc": self.drc,
            "route": list(self.route.nodes),
            "cu_host": self.cu_host,
            "du_host": self.du_host,
            "ru_host": self.ru_host,
        }

    def __repr__(self):
        return (
            f"Candidate[{self.ru} drc: {self.drc} cu: {self.cu_host} "
            f"du: {self.du_host} route: {'>'.join(self.route.nodes)}]"
        )


def routing_graph(topology: Topology, ru: NodeId) -> nx.Graph:
    """The graph routes to `ru` may use: core, transport nodes and the RU

    When every core and transport node carries a level, routes may not
    repeat a level and the result is a DAG whose edges climb the levels.
    """

    allowed = [topology.core, *topology.transport_nodes, ru]
    view = topology.graph.subgraph(n for n in allowed if n is not None)

    levels = {n: topology.nodes[n].level for n in view.nodes if n != ru}
    if not levels or any(level is None for level in levels.values()):
        return nx.Graph(view)

    levels[ru] = math.inf
    dag = nx.DiGraph()
    dag.add_nodes_from(view.nodes)
    for a, b, data in view.edges(data=True):
        if levels[a] < levels[b]:
            dag.add_edge(a, b, **data)
        elif levels[b] < levels[a]:
            dag.add_edge(b, a, **data)
    return dag


def make_route(topology: Topology, ru: NodeId, nodes: Sequence[NodeId]) -> Route:
    links = []
    for a, b in zip(nodes, nodes[1:]):
        link = topology.link_between(a, b)
        if link is None:
            raise TopologyError(f"no link between {a} and {b}", ru=ru)
        links.append(link.id)
    latency = sum(topology.links[link].latency for link in links)
    return Route(ru, tuple(nodes), tuple(links), latency)


def _route_cost(route: Route, metric: PathMetric) -> float:
    if metric is PathMetric.HOPS:
        return route.hops
    return round(route.total_latency, LATENCY_DIGITS)


def k_shortest_routes(
    topology: Topology, ru: NodeId, k: int, metric: PathMetric = PathMetric.LATENCY
) -> list[Route]:
    """Returns up to `k` loop-free core to RU routes, cheapest first

    Routes with the same cost as the k-th one are all collected before
    ranking by (cost, node ids) and truncating, so the result does not
    depend on the order networkx yields ties in, and the routes for k are a
    prefix of the routes for k + 1.

    Args:
        topology: The topology to route in.
        ru: Target RU.
        k: Maximum number of routes (at least 1).
        metric: Total latency, or hop count.

    Returns:
        The routes, an empty list when the RU is unreachable.
    """

    if k < 1:
        raise ValueError("k must be at least 1")

    core = topology.core
    graph = routing_graph(topology, ru)
    if core is None or core not in graph or ru not in graph or not nx.has_path(graph, core, ru):
        return []

    weight = "latency" if metric is PathMetric.LATENCY else None
    ranked: list[tuple[float, tuple[NodeId, ...], Route]] = []
    boundary = None

    for nodes in nx.shortest_simple_paths(graph, core, ru, weight=weight):
        route = make_route(topology, ru, nodes)
        cost = _route_cost(route, metric)
        if boundary is not None and cost > boundary:
            break
        ranked.append((cost, route.nodes, route))
        if len(ranked) == k:
            boundary = cost

    ranked.sort(key=lambda item: (item[0], item[1]))
    return [route for _, _, route in ranked[:k]]


def route_hosts(topology: Topology, route: Route) -> list[RouteHost]:
    """CRs that may host units of a route, ordered along the route

    A CR sits at the position of the route node it is attached to. The
    RU's co-located CR is always included, at the RU position when its
    site is not on the route.
    """

    hosts = []
    for position, node in enumerate(route.nodes):
        for cr in topology.crs_by_site.get(node, []):
            hosts.append(RouteHost(cr, position))

    colocated = topology.colocated_cr(route.ru)
    if colocated is not None and colocated not in {h.cr for h in hosts}:
        hosts.append(RouteHost(colocated, len(route.nodes) - 1))

    hosts.sort(key=lambda h: (h.position, h.cr))
    return hosts


def make_candidate(
    topology: Topology,
    catalog: DrcCatalog,
    route: Route,
    drc: Drc,
    cu_host: Optional[NodeId],
    du_host: Optional[NodeId],
    hosts: Optional[list[RouteHost]] = None,
) -> Optional[CandidateAssignment]:
    """Builds the candidate for a route, DRC and host choice

    Returns:
        The candidate, or None when the hosts do not fit the DRC or a
        sub-path exceeds its latency bound.
    """

    hosts = hosts if hosts is not None else route_hosts(topology, route)
    position = {h.cr: h.position for h in hosts}
    partition = unit_partition(drc)
    colocated = topology.colocated_cr(route.ru)

    if partition.colocated and colocated is None:
        return None

    # Sub-paths split at host positions; the co-located CR sits at its site
    label = drc.set_label
    if label is DrcSet.NG_RAN_3:
        if cu_host not in position or du_host not in position:
            return None
        if position[cu_host] >= position[du_host]:
            return None
        if partition.colocated and du_host == colocated:
            return None
        cuts = position[cu_host], position[du_host]
    elif label is DrcSet.NG_RAN_2:
        if du_host != colocated or cu_host not in position or colocated not in position:
            return None
        if position[cu_host] >= position[du_host]:
            return None
        cuts = position[cu_host], position[du_host]
    elif label is DrcSet.C_RAN:
        if cu_host != du_host or cu_host not in position:
            return None
        if partition.colocated and cu_host == colocated:
            return None
        cuts = position[cu_host], position[cu_host]
    else:
        if cu_host is not None or du_host is not None or colocated not in position:
            return None
        cuts = position[colocated], position[colocated]

    links = route.links
    subpaths = {
        "bh": links[: cuts[0]],
        "mh": links[cuts[0] : cuts[1]],
        "fh": links[cuts[1] :],
    }
    latency = {
        key: sum(topology.links[link].latency for link in subpaths[key])
        for key in SUBPATH_KEYS
    }
    if any(latency[key] > drc.latency(key) + LATENCY_SLACK for key in SUBPATH_KEYS):
        return None

    link_loads: dict[LinkId, Bps] = {}
    for key in SUBPATH_KEYS:
        bandwidth = drc.bandwidth(key)
        if bandwidth > 0:
            for link in subpaths[key]:
                link_loads[link] = link_loads.get(link, 0.0) + bandwidth

    units = [
        (cu_host, partition.cu),
        (du_host, partition.du),
        (colocated, partition.colocated),
    ]
    cr_loads: dict[NodeId, Cores] = defaultdict(float)
    placements = set()
    for host, functions in units:
        for vnf in functions:
            placements.add((host, vnf))
            cr_loads[host] += catalog.demand(vnf)

    return CandidateAssignment(
        ru=route.ru,
        route=route,
        drc=drc.id,
        cu_host=cu_host,
        du_host=du_host,
        ru_host=colocated if partition.colocated else None,
        subpaths=subpaths,
        subpath_latency=latency,
        link_loads=link_loads,
        cr_loads=dict(cr_loads),
        placements=frozenset(placements),
        route_crs=tuple(h.cr for h in hosts),
    )


def _host_choices(
    drc: Drc, hosts: list[RouteHost], colocated: Optional[NodeId]
) -> list[tuple[Optional[NodeId], Optional[NodeId]]]:
    label = drc.set_label
    if label is DrcSet.NG_RAN_3:
        return [(cu.cr, du.cr) for cu in hosts for du in hosts if cu.position < du.position]
    if label is DrcSet.NG_RAN_2:
        site = next((h.position for h in hosts if h.cr == colocated), None)
        if site is None:
            return []
        return [(h.cr, colocated) for h in hosts if h.position < site]
    if label is DrcSet.C_RAN:
        return [(h.cr, h.cr) for h in hosts]
    return [(None, None)]


def enumerate_candidates(
    route: Route, catalog: DrcCatalog, topology: Topology
) -> list[CandidateAssignment]:
    """Expands a route into every admissible (DRC, hosts) candidate

    Candidates come in DRC id order, then in host order along the route.
    Those breaking a sub-path latency bound are left out.
    """

    hosts = route_hosts(topology, route)
    colocated = topology.colocated_cr(route.ru)

    candidates = []
    for drc in sorted(catalog.drcs, key=lambda d: d.id):
        for cu_host, du_host in _host_choices(drc, hosts, colocated):
            candidate = make_candidate(topology, catalog, route, drc, cu_host, du_host, hosts)
            if candidate is not None:
                candidates.append(candidate)
    return candidates


@dataclass(frozen=True)
class Instance:
    """A planning instance: topology, catalog and the candidates of every RU"""

    topology: Topology
    catalog: DrcCatalog
    k: int
    metric: PathMetric
    candidates: Mapping[NodeId, tuple[CandidateAssignment, ...]]

    @property
    def rus(self) -> list[NodeId]:
        return sorted(self.candidates)

    def missing_rus(self) -> list[NodeId]:
        return [ru for ru in self.rus if not self.candidates[ru]]

    def candidate_count(self) -> int:
        return sum(len(c) for c in self.candidates.values())

    def candidate_product(self) -> int:
        return math.prod(len(self.candidates[ru]) for ru in self.rus)


def build_instance(
    topology: Topology,
    catalog: DrcCatalog,
    k: int = 4,
    metric: PathMetric = PathMetric.LATENCY,
) -> Instance:
    candidates = {}
    for ru in topology.rus:
        routes = k_shortest_routes(topology, ru, k, metric)
        candidates[ru] = tuple(
            c for route in routes for c in enumerate_candidates(route, catalog, topology)
        )

    instance = Instance(topology, catalog, k, metric, candidates)
    logger.info(
        "instance with %d RUs, %d candidates (k=%d, %s)",
        len(instance.rus),
        instance.candidate_count(),
        k,
        metric.value,
    )
    for ru in instance.missing_rus():
        logger.warning("RU %s has no admissible candidate", ru)
    return instance


def build_candidate(
    topology: Topology,
    catalog: DrcCatalog,
    ru: NodeId,
    drc_id: int,
    route_nodes: Sequence[NodeId],
    cu_host: Optional[NodeId],
    du_host: Optional[NodeId],
) -> CandidateAssignment:
    """Rebuilds the candidate a solution file describes"""

    nodes = [str(n) for n in route_nodes]
    if not nodes or nodes[0] != topology.core or nodes[-1] != ru:
        raise TopologyError(f"route of RU {ru} must run from the core to the RU", ru=ru)
    for node in nodes[1:-1]:
        if topology.nodes.get(node) is None or topology.nodes[node].kind is not NodeKind.TRANSPORT:
            raise TopologyError(f"route of RU {ru} passes through {node}", ru=ru)

    route = make_route(topology, ru, nodes)
    candidate = make_candidate(topology, catalog, route, catalog.get(drc_id), cu_host, du_host)
    if candidate is None:
        raise TopologyError(f"assignment of RU {ru} is not an admissible candidate", ru=ru)
    return candidate


def candidate_to_dict(candidate: CandidateAssignment) -> dict[str, Any]:
    return {
        **candidate.describe(),
        "subpaths": {key: list(links) for key, links in candidate.subpaths.items()},
        "subpath_latency": dict(candidate.subpath_latency),
        "link_loads": dict(sorted(candidate.link_loads.items())),
        "cr_loads": dict(sorted(candidate.cr_loads.items())),
    }


def dump_candidates(instance: Instance, path: Union[str, Path]):
    data = {
        "k": instance.k,
        "metric": instance.metric.value,
        "candidates": {
            ru: [candidate_to_dict(c) for c in instance.candidates[ru]] for ru in instance.rus
        },
    }
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")

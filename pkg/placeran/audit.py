"""Independent re-check of a placement against the raw topology

Nothing here reuses the candidate data computed during path generation:
routes, host positions, sub-path splits, latencies and loads are derived
again from the links and nodes of the topology.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Mapping, Optional

from placeran.domain import (
    SUBPATH_KEYS,
    DrcCatalog,
    DrcSet,
    NodeKind,
    Topology,
    unit_partition,
)
from placeran.pathgen import CandidateAssignment
from placeran.placeran_types import LinkId, NodeId

# Same slack as candidate generation and the capacity rows
LATENCY_SLACK = 1e-12
CAPACITY_TOLERANCE = 1e-9


def _link_index(topology: Topology) -> dict[frozenset, tuple[LinkId, ...]]:
    index: dict[frozenset, list[LinkId]] = defaultdict(list)
    for link in topology.links.values():
        index[frozenset(link.endpoints)].append(link.id)
    return {key: tuple(sorted(ids)) for key, ids in index.items()}


def _host_site(topology: Topology, cr: NodeId) -> Optional[NodeId]:
    sites = [
        link.other(cr)
        for link in topology.links.values()
        if cr in link.endpoints
    ]
    return sites[0] if len(sites) == 1 else None


def _over(load: float, capacity: float) -> bool:
    return load > capacity + CAPACITY_TOLERANCE * max(1.0, abs(capacity))


def audit_assignment(
    topology: Topology,
    catalog: DrcCatalog,
    assignment: Mapping[NodeId, CandidateAssignment],
) -> list[str]:
    """Lists every violated placement rule, an empty list for a clean placement

    Checks one assignment per RU, loop-free core to RU routes over existing
    links and transport nodes, hosts matching the DRC family, sub-path
    latencies within the DRC bounds, and link and CR loads within capacity.
    """

    problems: list[str] = []
    links_by_pair = _link_index(topology)
    link_load: dict[LinkId, float] = defaultdict(float)
    cr_load: dict[NodeId, float] = defaultdict(float)

    rus = set(topology.rus)
    for ru in sorted(rus - set(assignment)):
        problems.append(f"assign: RU {ru} has no assignment")
    for ru in sorted(set(assignment) - rus):
        problems.append(f"assign: {ru} is not an RU of the topology")

    for ru in sorted(set(assignment) & rus):
        candidate = assignment[ru]
        nodes = list(candidate.route.nodes)

        if not nodes or nodes[0] != topology.core or nodes[-1] != ru:
            problems.append(f"route: RU {ru} route does not run from the core to the RU")
            continue
        if len(set(nodes)) != len(nodes):
            problems.append(f"route: RU {ru} route repeats a node")
            continue
        if any(topology.nodes[n].kind is not NodeKind.TRANSPORT for n in nodes[1:-1]):
            problems.append(f"route: RU {ru} route leaves the transport network")
            continue

        route_links = []
        for a, b in zip(nodes, nodes[1:]):
            ids = links_by_pair.get(frozenset((a, b)))
            if not ids:
                problems.append(f"route: RU {ru} uses a missing link {a}-{b}")
                break
            route_links.append(ids[0])
        else:
            problems += _audit_candidate(
                topology, catalog, ru, candidate, nodes, route_links, link_load, cr_load
            )

    for link_id, load in sorted(link_load.items()):
        capacity = topology.links[link_id].capacity
        if _over(load, capacity):
            problems.append(f"capacity: link {link_id} carries {load:g} over capacity {capacity:g}")

    for cr, load in sorted(cr_load.items()):
        capacity = topology.nodes[cr].proc_capacity or 0.0
        if _over(load, capacity):
            problems.append(f"capacity: CR {cr} runs {load:g} cores over capacity {capacity:g}")

    return problems


def _audit_candidate(
    topology: Topology,
    catalog: DrcCatalog,
    ru: NodeId,
    candidate: CandidateAssignment,
    nodes: list[NodeId],
    route_links: list[LinkId],
    link_load: dict[LinkId, float],
    cr_load: dict[NodeId, float],
) -> list[str]:
    drc = catalog.get(candidate.drc)
    partition = unit_partition(drc)
    colocated = topology.colocated_cr(ru)
    ru_position = len(nodes) - 1

    def position(cr: Optional[NodeId]) -> Optional[int]:
        if cr is None or cr not in topology.nodes:
            return None
        if topology.nodes[cr].kind is not NodeKind.COMPUTING_RESOURCE:
            return None
        site = _host_site(topology, cr)
        if site in nodes:
            return nodes.index(site)
        return ru_position if cr == colocated else None

    cu, du = candidate.cu_host, candidate.du_host
    label = drc.set_label
    if label is DrcSet.D_RAN:
        local = position(colocated)
        if cu is not None or du is not None or local is None:
            return [f"hosts: RU {ru} D-RAN needs its co-located CR and no CU/DU host"]
        cuts = (local, local)
    else:
        pos_cu, pos_du = position(cu), position(du)
        if pos_cu is None or pos_du is None:
            return [f"hosts: RU {ru} CU/DU host is not on its route"]
        if label is DrcSet.NG_RAN_3:
            if pos_cu >= pos_du:
                return [f"hosts: RU {ru} needs the CU strictly before the DU"]
            cuts = (pos_cu, pos_du)
        elif label is DrcSet.NG_RAN_2:
            if du != colocated or pos_cu >= pos_du:
                return [f"hosts: RU {ru} NG-RAN(2) needs its DU on the co-located CR"]
            cuts = (pos_cu, pos_du)
        else:
            if cu != du:
                return [f"hosts: RU {ru} C-RAN needs one CU+DU host"]
            cuts = (pos_cu, pos_cu)
    if partition.colocated and colocated is None:
        return [f"hosts: RU {ru} has no co-located CR for its RU-side functions"]

    problems = []
    subpaths = {
        "bh": route_links[: cuts[0]],
        "mh": route_links[cuts[0] : cuts[1]],
        "fh": route_links[cuts[1] :],
    }
    for key in SUBPATH_KEYS:
        latency = sum(topology.links[link].latency for link in subpaths[key])
        if latency > drc.latency(key) + LATENCY_SLACK:
            problems.append(
                f"latency: RU {ru} {key} latency {latency:g}s over {drc.latency(key):g}s"
            )
        for link in subpaths[key]:
            link_load[link] += drc.bandwidth(key)

    hosted = ((cu, partition.cu), (du, partition.du), (colocated, partition.colocated))
    for host, functions in hosted:
        for vnf in functions:
            cr_load[host] += catalog.demand(vnf)

    return problems

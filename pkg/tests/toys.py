"""Small hand-checkable topologies shared by the tests"""

from dataclasses import replace
from typing import Iterable, Optional

import numpy as np

from placeran.domain import (
    DrcCatalog,
    Link,
    Node,
    NodeKind,
    Topology,
    TransportClass,
    default_catalog,
)
from placeran.pathgen import Instance, build_instance

MS = 1e-3
GBPS = 1e9
ATTACHMENT_CAPACITY = 1e12

RATES = (5 * GBPS, 10 * GBPS, 20 * GBPS, 100 * GBPS)
CR_CAPACITIES = (4.0, 8.0, 16.0, 32.0)


def core() -> Node:
    return Node("core", NodeKind.CORE)


def transport(node_id: str, cls: TransportClass = TransportClass.AC1) -> Node:
    return Node(node_id, NodeKind.TRANSPORT, transport_class=cls)


def cr(node_id: str, capacity: float = 100.0) -> Node:
    return Node(node_id, NodeKind.COMPUTING_RESOURCE, proc_capacity=capacity)


def ru(node_id: str, attached_cr: Optional[str] = None) -> Node:
    return Node(node_id, NodeKind.RADIO_UNIT, attached_cr=attached_cr)


def link(a: str, b: str, latency: float = 0.1 * MS, capacity: float = 100 * GBPS) -> Link:
    return Link(f"{a}-{b}", (a, b), capacity, latency)


def attach(cr_id: str, site: str) -> Link:
    return Link(f"{cr_id}-{site}", (cr_id, site), ATTACHMENT_CAPACITY, 0.0)


def catalog(*ids: int) -> DrcCatalog:
    full = default_catalog()
    return full.subset(ids) if ids else full


def instance(topology: Topology, drc_catalog: DrcCatalog, k: int = 1) -> Instance:
    return build_instance(topology, drc_catalog, k)


def tie_on_priority() -> tuple[Topology, DrcCatalog]:
    """Two RUs; r1 may use DRC 1 or DRC 2 at equal cost, r2 only DRC 12

    Both placements reach the same first and second objectives, only the
    priority sum (9 against 8) tells them apart.
    """

    nodes = [
        core(),
        transport("t1", TransportClass.AG1),
        transport("t2", TransportClass.AC1),
        transport("t3", TransportClass.AC1),
        cr("cA"),
        cr("cB"),
        cr("cC"),
        ru("r1"),
        ru("r2", attached_cr="cC"),
    ]
    links = [
        link("core", "t1"),
        link("t1", "t2"),
        link("t1", "t3"),
        link("t2", "r1", latency=0.01 * MS),
        # Too slow for any fronthaul
        link("t3", "r2", latency=1 * MS),
        attach("cA", "t1"),
        attach("cB", "t2"),
        attach("cC", "t3"),
    ]
    return Topology.build(nodes, links), catalog(1, 2, 12)


def tie_on_drcs() -> tuple[Topology, DrcCatalog]:
    """Two RUs sharing one CR; r1 can only run D-RAN, r2 D-RAN or C-RAN

    Every placement employs the one CR and groups all seven functions, so
    the first objective cannot tell (19, 17) from (19, 19).
    """

    nodes = [
        core(),
        transport("t", TransportClass.AG2),
        cr("cS"),
        ru("r1", attached_cr="cS"),
        ru("r2", attached_cr="cS"),
    ]
    links = [
        link("core", "t"),
        link("t", "r1", latency=1 * MS),
        link("t", "r2", latency=0.01 * MS),
        attach("cS", "t"),
    ]
    return Topology.build(nodes, links), catalog(17, 19)


def single_ru() -> tuple[Topology, DrcCatalog]:
    """One RU whose C-RAN and D-RAN placements share every CR and function"""

    nodes = [core(), transport("t"), cr("cS"), ru("r", attached_cr="cS")]
    links = [link("core", "t"), link("t", "r", latency=0.01 * MS), attach("cS", "t")]
    return Topology.build(nodes, links), catalog(17, 19)


def shared_site(drc_catalog: Optional[DrcCatalog] = None) -> tuple[Topology, DrcCatalog]:
    """Two RUs on one site served by the same co-located CR"""

    nodes = [
        core(),
        transport("t"),
        cr("cS"),
        ru("r1", attached_cr="cS"),
        ru("r2", attached_cr="cS"),
    ]
    links = [
        link("core", "t"),
        link("t", "r1", latency=0.01 * MS),
        link("t", "r2", latency=0.01 * MS),
        attach("cS", "t"),
    ]
    return Topology.build(nodes, links), drc_catalog or catalog(19)


def separate_sites() -> tuple[Topology, DrcCatalog]:
    """Two RUs on different sites, each with its own co-located CR"""

    nodes = [
        core(),
        transport("t1"),
        transport("t2"),
        cr("c1"),
        cr("c2"),
        ru("r1", attached_cr="c1"),
        ru("r2", attached_cr="c2"),
    ]
    links = [
        link("core", "t1"),
        link("core", "t2"),
        link("t1", "r1", latency=0.01 * MS),
        link("t2", "r2", latency=0.01 * MS),
        attach("c1", "t1"),
        attach("c2", "t2"),
    ]
    return Topology.build(nodes, links), catalog(19)


def bottleneck(narrow: float = 4 * GBPS) -> tuple[Topology, DrcCatalog]:
    """Two D-RAN RUs whose shortest route shares a link too narrow for both"""

    nodes = [
        core(),
        transport("ta", TransportClass.AG2),
        transport("tb", TransportClass.AG2),
        transport("ts", TransportClass.AC1),
        cr("cS"),
        ru("r1", attached_cr="cS"),
        ru("r2", attached_cr="cS"),
    ]
    links = [
        link("core", "ta"),
        link("core", "tb"),
        link("ta", "ts", capacity=narrow),
        link("tb", "ts", latency=0.2 * MS),
        link("ts", "r1", latency=0.01 * MS),
        link("ts", "r2", latency=0.01 * MS),
        attach("cS", "ts"),
    ]
    return Topology.build(nodes, links), catalog(19)


def stacked_site() -> tuple[Topology, DrcCatalog]:
    """Two CRs on r's site behind a third one on the aggregation node"""

    nodes = [
        core(),
        transport("t0", TransportClass.AG1),
        transport("t1"),
        cr("cZ"),
        cr("cA"),
        cr("cB"),
        ru("r"),
    ]
    links = [
        link("core", "t0"),
        link("t0", "t1"),
        link("t1", "r", latency=0.01 * MS),
        attach("cZ", "t0"),
        attach("cA", "t1"),
        attach("cB", "t1"),
    ]
    return Topology.build(nodes, links), catalog(1)


def site_hop(drc_catalog: Optional[DrcCatalog] = None) -> tuple[Topology, DrcCatalog]:
    """One RU whose co-located CR sits one hop short of it, behind an aggregation CR"""

    nodes = [
        core(),
        transport("t1", TransportClass.AG1),
        transport("t2"),
        cr("cA"),
        cr("cS"),
        ru("r", attached_cr="cS"),
    ]
    links = [
        link("core", "t1"),
        link("t1", "t2"),
        link("t2", "r", latency=0.01 * MS),
        attach("cA", "t1"),
        attach("cS", "t2"),
    ]
    return Topology.build(nodes, links), drc_catalog or catalog(1, 12, 17, 19)


def shared_cu() -> tuple[Topology, DrcCatalog]:
    """Three RUs with their CUs on cA; (2, 2, 12) ties (1, 2, 13) on the first objective

    r1 and r2 have no co-located CR and share the DU host cB. r3's access
    link is too slow for a fronthaul, so it runs NG-RAN(2) on c3. cA fits
    at most two two-function CUs and cB at most one DRC 1 DU, which leaves
    {2, 12} and {1, 2, 13} as the best first-stage DRC sets.
    """

    nodes = [
        core(),
        transport("t1", TransportClass.AG1),
        transport("t2"),
        transport("t3"),
        cr("cA", capacity=4.0),
        cr("cB", capacity=14.5),
        cr("c3"),
        ru("r1"),
        ru("r2"),
        ru("r3", attached_cr="c3"),
    ]
    links = [
        link("core", "t1"),
        link("t1", "t2"),
        link("t1", "t3"),
        link("t2", "r1", latency=0.01 * MS),
        link("t2", "r2", latency=0.01 * MS),
        link("t3", "r3", latency=1 * MS),
        attach("cA", "t1"),
        attach("cB", "t2"),
        attach("c3", "t3"),
    ]
    return Topology.build(nodes, links), catalog(1, 2, 12, 13)


def unreachable() -> tuple[Topology, DrcCatalog]:
    """A served RU next to one with no link at all"""

    topology, drc_catalog = shared_site()
    nodes = list(topology.nodes.values()) + [ru("r3")]
    return Topology.build(nodes, topology.links.values()), drc_catalog


def empty() -> tuple[Topology, DrcCatalog]:
    nodes = [core(), transport("t"), cr("c")]
    return Topology.build(nodes, [link("core", "t"), attach("c", "t")]), catalog()


def scaled(topology: Topology, factor: float) -> Topology:
    """The same topology with every link and CR capacity multiplied"""

    nodes = [
        replace(node, proc_capacity=node.proc_capacity * factor)
        if node.proc_capacity is not None
        else node
        for node in topology.nodes.values()
    ]
    links = [replace(link, capacity=link.capacity * factor) for link in topology.links.values()]
    return Topology.build(nodes, links, topology.metadata)


def random_topology(seed: int) -> tuple[Topology, int]:
    """A seeded topology of at most 4 RUs and 6 CRs, with a k in 1..3"""

    rng = np.random.default_rng(seed)
    transport_count = int(rng.integers(2, 5))
    names = [f"t{i}" for i in range(transport_count)]
    nodes = [core()] + [transport(name) for name in names]
    links = []

    for i, name in enumerate(names):
        pool = ["core", *names[:i]]
        count = 2 if len(pool) > 1 and rng.random() < 0.4 else 1
        for p in sorted(rng.choice(len(pool), size=count, replace=False)):
            links.append(
                link(
                    pool[int(p)],
                    name,
                    latency=float(rng.uniform(0.05, 0.5)) * MS,
                    capacity=float(rng.choice(RATES)),
                )
            )

    sites: dict[str, list[str]] = {}
    for i in range(int(rng.integers(1, 7))):
        site = names[int(rng.integers(transport_count))]
        nodes.append(cr(f"c{i}", float(rng.choice(CR_CAPACITIES))))
        links.append(attach(f"c{i}", site))
        sites.setdefault(site, []).append(f"c{i}")

    for i in range(int(rng.integers(1, 5))):
        site = names[int(rng.integers(transport_count))]
        local = sites.get(site, [])
        attached = local[0] if local and rng.random() < 0.6 else None
        nodes.append(ru(f"r{i}", attached))
        links.append(
            link(
                site,
                f"r{i}",
                latency=float(rng.uniform(0.01, 0.4)) * MS,
                capacity=float(rng.choice(RATES)),
            )
        )

    return Topology.build(nodes, links), int(rng.integers(1, 4))


def random_instances(
    count: int, limit: int = 5000, seeds: Iterable[int] = range(10_000)
) -> list[Instance]:
    """The first `count` seeded instances whose candidate product lies in 1..limit"""

    drc_catalog = catalog()
    found = []
    for seed in seeds:
        topology, k = random_topology(seed)
        candidate = build_instance(topology, drc_catalog, k)
        if 1 <= candidate.candidate_product() <= limit:
            found.append(candidate)
            if len(found) == count:
                break
    return found

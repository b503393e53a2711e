from dataclasses import replace

import pytest

from placeran.audit import audit_assignment
from placeran.errors import InfeasibleInstanceError
from placeran.pathgen import Route
from placeran.solve import brute_force, solve_lexicographic
from tests import toys


def _placement(toy, k=1):
    topology, catalog = toy()
    instance = toys.instance(topology, catalog, k)
    return topology, catalog, dict(solve_lexicographic(instance)[-1].assignment)


def _reroute(candidate, nodes):
    route = Route(candidate.ru, tuple(nodes), (), 0.0)
    return replace(candidate, route=route)


@pytest.mark.parametrize(
    "data",
    [
        (toys.tie_on_priority, 1),
        (toys.tie_on_drcs, 1),
        (toys.single_ru, 1),
        (toys.separate_sites, 1),
        (toys.bottleneck, 2),
        (lambda: toys.shared_site(toys.catalog()), 1),
    ],
)
def test_solved_placements_are_clean(data):
    topology, catalog, assignment = _placement(data[0], data[1])
    assert audit_assignment(topology, catalog, assignment) == []


def test_oracle_placements_are_clean():
    for instance in toys.random_instances(40, limit=2000):
        try:
            result = brute_force(instance)
        except InfeasibleInstanceError:
            continue
        assert audit_assignment(instance.topology, instance.catalog, result.assignment) == []


def test_assignment_coverage():
    topology, catalog, assignment = _placement(toys.tie_on_priority)
    stray = assignment.pop("r2")
    assignment["cA"] = stray
    assert audit_assignment(topology, catalog, assignment) == [
        "assign: RU r2 has no assignment",
        "assign: cA is not an RU of the topology",
    ]


@pytest.mark.parametrize(
    "data",
    [
        (["t1", "t2", "r1"], "route: RU r1 route does not run from the core to the RU"),
        (["core", "t1", "t2", "t1", "t2", "r1"], "route: RU r1 route repeats a node"),
        (["core", "t1", "cB", "r1"], "route: RU r1 route leaves the transport network"),
        (["core", "t2", "r1"], "route: RU r1 uses a missing link core-t2"),
        ([], "route: RU r1 route does not run from the core to the RU"),
    ],
)
def test_broken_routes(data):
    topology, catalog, assignment = _placement(toys.tie_on_priority)
    assignment["r1"] = _reroute(assignment["r1"], data[0])
    assert audit_assignment(topology, catalog, assignment) == [data[1]]


@pytest.mark.parametrize(
    "data",
    [
        (19, None, None, "hosts: RU r1 D-RAN needs its co-located CR and no CU/DU host"),
        (17, "cA", "cB", "hosts: RU r1 C-RAN needs one CU+DU host"),
        (12, "cA", "cB", "hosts: RU r1 NG-RAN(2) needs its DU on the co-located CR"),
        (1, "cB", "cA", "hosts: RU r1 needs the CU strictly before the DU"),
        (1, "cA", "cA", "hosts: RU r1 needs the CU strictly before the DU"),
        (1, "cC", "cB", "hosts: RU r1 CU/DU host is not on its route"),
        (1, "t1", "cB", "hosts: RU r1 CU/DU host is not on its route"),
    ],
)
def test_wrong_hosts(data):
    topology, _, assignment = _placement(toys.tie_on_priority)
    assignment["r1"] = replace(assignment["r1"], drc=data[0], cu_host=data[1], du_host=data[2])
    assert audit_assignment(topology, toys.catalog(), assignment) == [data[3]]


def test_latency_over_bound():
    topology, catalog, assignment = _placement(toys.tie_on_priority)
    # Fronthaul over the 1 ms t3-r2 link
    assignment["r2"] = replace(assignment["r2"], drc=1, cu_host="cA", du_host="cC")
    assert audit_assignment(topology, catalog, assignment) == [
        "latency: RU r2 fh latency 0.001s over 0.00025s"
    ]


def test_link_over_capacity():
    topology, catalog = toys.bottleneck()
    candidates = toys.instance(topology, catalog).candidates
    assignment = {ru: candidates[ru][0] for ru in ("r1", "r2")}
    assert audit_assignment(topology, catalog, assignment) == [
        "capacity: link ta-ts carries 6e+09 over capacity 4e+09"
    ]


def test_cr_over_capacity():
    topology, catalog, assignment = _placement(toys.shared_site)
    smaller = toys.scaled(topology, 0.1)
    assert audit_assignment(smaller, catalog, assignment) == [
        "capacity: CR cS runs 16 cores over capacity 10"
    ]


def test_same_site_split_is_flagged():
    topology, catalog = toys.stacked_site()
    candidate = toys.instance(topology, catalog).candidates["r"][0]
    assignment = {"r": replace(candidate, cu_host="cA", du_host="cB")}
    assert audit_assignment(topology, catalog, assignment) == [
        "hosts: RU r needs the CU strictly before the DU"
    ]

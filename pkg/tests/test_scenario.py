import json
import math

import pytest

from placeran.domain import NodeKind, TransportClass, topology_to_dict, validate_topology
from placeran.errors import ScenarioError
from placeran.scenario import (
    T1_PARAMS,
    CapacityScenario,
    RuConfig,
    ScenarioSpec,
    TopologyKind,
    build_scenario,
    load_params,
    params_from_dict,
)


def _spec(kind="T1", capacity="LC", ru="F1", seed=1, **extra):
    return ScenarioSpec(TopologyKind(kind), CapacityScenario(capacity), RuConfig(ru), seed, **extra)


@pytest.mark.parametrize(
    "data",
    [
        ("T1", 51, 49, 51),
        ("T2", 128, 126, 128),
    ],
)
def test_sizes(data):
    topology = build_scenario(_spec(data[0]))
    assert len(topology.transport_nodes) == data[1]
    assert len(topology.rus) == data[2]
    assert len(topology.crs) == data[3]
    assert validate_topology(topology).ok
    assert topology.metadata["topology"] == data[0]
    assert topology.metadata["rus"] == data[2]


def test_every_ru_has_a_colocated_cr():
    topology = build_scenario(_spec("T1"))
    assert all(topology.colocated_cr(ru) is not None for ru in topology.rus)


def test_levels():
    t1 = build_scenario(_spec("T1"))
    t2 = build_scenario(_spec("T2"))
    assert all(t1.nodes[n].level is None for n in t1.transport_nodes)
    assert {t2.nodes[n].level for n in t2.transport_nodes} == {1, 2, 3, 4}
    assert t2.nodes["core"].level == 0


@pytest.mark.parametrize("data", ["T1", "T2"])
def test_same_seed_same_topology(data):
    first = topology_to_dict(build_scenario(_spec(data, "RC", "R1", seed=7)))
    second = topology_to_dict(build_scenario(_spec(data, "RC", "R1", seed=7)))
    assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)


def _cr_capacities(topology, cls):
    return {
        topology.nodes[cr].proc_capacity
        for cr in topology.crs
        if topology.transport_class_of(cr) is cls
    }


@pytest.mark.parametrize(
    "data",
    [
        ("LC", TransportClass.AG1, {64.0}),
        ("HC", TransportClass.AG1, {256.0}),
        ("LC", TransportClass.AC1, {8.0}),
        ("HC", TransportClass.AC1, {16.0}),
    ],
)
def test_cr_capacity_ends(data):
    topology = build_scenario(_spec("T1", data[0]))
    assert _cr_capacities(topology, data[1]) == data[2]


def test_random_capacity_within_range():
    topology = build_scenario(_spec("T1", "RC", seed=3))
    for cls, table in T1_PARAMS.classes.items():
        low, high = table.cr_capacity
        assert all(low <= c <= high for c in _cr_capacities(topology, cls))
    rates = {rate for table in T1_PARAMS.classes.values() for rate in table.link_rates}
    transport = [
        link for link in topology.links.values() if link.id not in topology.attachment_links
    ]
    assert all(link.capacity in rates for link in transport)


def test_t1_latency_ignores_capacity():
    low = build_scenario(_spec("T1", "LC", seed=5))
    high = build_scenario(_spec("T1", "HC", seed=5))
    assert {k: v.latency for k, v in low.links.items()} == {
        k: v.latency for k, v in high.links.items()
    }
    assert any(low.links[k].capacity < high.links[k].capacity for k in low.links)


def test_t2_high_capacity_takes_shortest_distance():
    high = build_scenario(_spec("T2", "HC"))
    low = build_scenario(_spec("T2", "LC"))
    for link_id, link in high.links.items():
        if link_id not in high.attachment_links:
            assert link.latency <= low.links[link_id].latency


@pytest.mark.parametrize("data", [("T1", 39), ("T2", 101), ("T1", 0)])
def test_exact_ru_count(data):
    topology = build_scenario(_spec(data[0], ru="R1", ru_count=data[1]))
    assert len(topology.rus) == data[1]


def test_random_ru_count_depends_on_seed():
    counts = {len(build_scenario(_spec("T2", ru="R1", seed=s)).rus) for s in range(5)}
    assert all(0 < count < 126 for count in counts)
    assert len(counts) > 1


@pytest.mark.parametrize("data", [("T1", 49, 0.5), ("T2", 126, 0.5), ("T1", 49, 0.25)])
def test_random_ru_count_is_bernoulli(data):
    kind, eligible, p = data
    params = params_from_dict({"ru_probability": p}, TopologyKind(kind))
    draws = 40
    counts = [
        len(build_scenario(_spec(kind, ru="R1", seed=s, params=params)).rus)
        for s in range(draws)
    ]
    sigma = math.sqrt(eligible * p * (1 - p) / draws)
    assert abs(sum(counts) / draws - eligible * p) <= 3 * sigma


def test_rus_hang_off_eligible_nodes():
    topology = build_scenario(_spec("T1", ru="R1", seed=2))
    for ru in topology.rus:
        sites = [n for n in topology.neighbors(ru) if topology.nodes[n].kind is NodeKind.TRANSPORT]
        assert len(sites) == 1
        assert topology.nodes[sites[0]].transport_class is not TransportClass.AG1


@pytest.mark.parametrize(
    "data",
    [
        _spec(seed=-1),
        _spec("T1", ru="R1", ru_count=-2),
        _spec("T1", params=params_from_dict({"ru_probability": 2.0}, TopologyKind.T1)),
        _spec(
            "T1",
            params=params_from_dict(
                {"classes": {"AC1": {"cr_capacity": [16, 8]}}}, TopologyKind.T1
            ),
        ),
        # T1 has no AC2 class
        _spec("T1", params=params_from_dict({}, TopologyKind.T2)),
        _spec("T1", ru="R1", ru_count=50),
    ],
)
def test_invalid_spec(data):
    with pytest.raises(ScenarioError):
        build_scenario(data)


def test_parameter_overrides(tmp_path):
    path = tmp_path / "params.json"
    path.write_text(json.dumps({"classes": {"AC1": {"cr_count": 2}}, "ru_probability": 0.25}))
    params = load_params(path, TopologyKind.T1)
    assert params.classes[TransportClass.AC1].cr_count == 2
    assert params.classes[TransportClass.AG1] == T1_PARAMS.classes[TransportClass.AG1]
    assert params.ru_probability == 0.25

    topology = build_scenario(_spec("T1", params=params))
    assert len(topology.crs) == 2 + 9 + 2 * 40


def test_bad_parameter_file(tmp_path):
    path = tmp_path / "params.json"
    path.write_text("{not json")
    with pytest.raises(ScenarioError):
        load_params(path, TopologyKind.T1)
    with pytest.raises(ScenarioError):
        params_from_dict({"classes": {"AC9": {}}}, TopologyKind.T1)

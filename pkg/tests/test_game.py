from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netshield.errors import DomainError, InputError, InstanceSemanticError
from netshield.game import (
    Adversary,
    Instance,
    Strategy,
    all_utilities,
    attack,
    attack_targets,
    build_network,
    components,
    delta_of_player_region,
    delta_of_region,
    format_fraction,
    parse_fraction,
    player_utility,
    social_welfare,
    vulnerable_regions,
    weighted_target_count,
)

from conftest import allvuln, chain4, connected_instances, path3, star4

MD = Adversary.MAX_DISRUPTION
EMPTY = Strategy.of()


def edges(network):
    return {frozenset((a, b)) for a in range(network.n) for b in network.adjacency[a]}


def test_build_network_path3():
    net = build_network(path3(), EMPTY)
    assert edges(net) == {frozenset((1, 2)), frozenset((0, 2))}
    assert [v for v in range(3) if net.immunised[v]] == [2]
    net = build_network(path3(), Strategy.of([1], True))
    assert frozenset((0, 1)) in edges(net) and net.immunised[0]


def test_duplicate_endpoint_is_same_network():
    a = build_network(chain4(), Strategy.of([2, 2]))
    b = build_network(chain4(), Strategy.of([2]))
    assert a == b


def test_invalid_endpoint_rejected():
    with pytest.raises(InputError):
        build_network(path3(), Strategy.of([0]))
    with pytest.raises(InputError):
        build_network(path3(), Strategy.of([7]))


def test_regions():
    assert vulnerable_regions(build_network(path3(), EMPTY)) == [frozenset({0}), frozenset({1})]
    assert vulnerable_regions(build_network(allvuln(), EMPTY)) == [frozenset(range(5))]
    clique = Instance.build(3, 0, {1: [0], 2: [0, 1]}, [1, 2])
    assert vulnerable_regions(build_network(clique, Strategy.of((), True))) == []


def test_attack_outcomes():
    out = attack(build_network(path3(), EMPTY), {0})
    assert out.destroyed == {0} and [set(c) for c in out.surviving_components] == [{1, 2}]
    out = attack(build_network(allvuln(), EMPTY), set(range(5)))
    assert out.surviving_components == ()
    out = attack(build_network(chain4(), Strategy.of((), True)), {1})
    assert sorted(map(sorted, out.surviving_components)) == [[0], [2, 3]]


def test_attack_rejects_non_region():
    net = build_network(chain4(), EMPTY)
    with pytest.raises(InputError):
        attack(net, {2})  # immune
    with pytest.raises(InputError):
        attack(net, {0})  # only part of {0, 1}


def test_deltas():
    assert delta_of_region(build_network(path3(), EMPTY), {0}) == 4
    assert delta_of_region(build_network(allvuln(), EMPTY), set(range(5))) == 0
    assert delta_of_region(build_network(chain4(), Strategy.of((), True)), {1}) == 5
    assert delta_of_player_region(chain4(), EMPTY, 0) == 4
    assert delta_of_player_region(chain4(), Strategy.of([2]), 0) == 4
    assert delta_of_player_region(allvuln(), EMPTY, 3) == 0
    with pytest.raises(DomainError):
        delta_of_player_region(chain4(), EMPTY, 2)


def test_targets_by_adversary():
    net = build_network(path3(), EMPTY)
    assert attack_targets(net, MD) == [frozenset({0}), frozenset({1})]
    net = build_network(star4(), EMPTY)
    assert len(attack_targets(net, Adversary.MAX_CARNAGE)) == 3
    assert attack_targets(build_network(allvuln(), EMPTY), Adversary.RANDOM) == [frozenset(range(5))]


def test_weights():
    assert weighted_target_count(build_network(path3(), EMPTY), MD) == {
        frozenset({0}): 1, frozenset({1}): 1}
    net = build_network(allvuln(), EMPTY)
    assert weighted_target_count(net, Adversary.RANDOM) == {frozenset(range(5)): 5}
    assert weighted_target_count(net, MD, "region") == {frozenset(range(5)): 1}
    with pytest.raises(InputError):
        weighted_target_count(net, MD, "edge")


def test_named_utilities():
    assert player_utility(path3(), EMPTY, 0) == 1
    assert player_utility(path3(), Strategy.of((), True), 0) == 1
    assert player_utility(chain4(), Strategy.of([2], True), 0) == 1
    assert player_utility(star4(), Strategy.of((), True), 0) == Fraction(5, 2)


def test_welfare_examples():
    clique = Instance.build(3, 0, {1: [2], 2: [0]}, [1, 2])
    # u buys the third edge and immunises: nothing is attacked
    assert social_welfare(clique, Strategy.of([1], True)) == 3
    assert social_welfare(path3(), EMPTY) == 1
    utils = all_utilities(allvuln(), EMPTY)
    assert utils == [Fraction(0)] + [Fraction(-1)] * 4


def test_player_utility_matches_all_utilities_on_named():
    for inst in (path3(), chain4(), star4(), allvuln()):
        for s in (EMPTY, Strategy.of((), True)):
            assert all_utilities(inst, s)[0] == player_utility(inst, s, 0)


def test_fractions():
    assert format_fraction(Fraction(4, 2)) == "2/1"
    assert parse_fraction("6/4") == Fraction(3, 2)
    assert parse_fraction("3") == 3
    for bad in ("3/0", "a/2", "-1/2", "1/-2", "", "1/2/3"):
        with pytest.raises(InstanceSemanticError):
            parse_fraction(bad)


def test_instance_validation():
    with pytest.raises(InstanceSemanticError):
        Instance.build(3, 0, {1: [1]}, [])
    with pytest.raises(InstanceSemanticError):
        Instance.build(3, 0, {1: [3]}, [])
    with pytest.raises(InstanceSemanticError):
        Instance.build(3, 0, {1: [2]}, [], alpha=0)
    assert not Instance.build(3, 0, {1: [2]}, []).is_connected


@settings(max_examples=150, deadline=None)
@given(connected_instances(max_n=8), st.data())
def test_region_partition_and_double_counting(inst, data):
    others = inst.others
    links = data.draw(st.sets(st.sampled_from(others), max_size=3)) if others else set()
    s = Strategy.of(links, data.draw(st.booleans()))
    net = build_network(inst, s)
    regions = vulnerable_regions(net)
    covered = [v for r in regions for v in r]
    assert sorted(covered) == [v for v in range(net.n) if not net.immunised[v]]
    where = {v: i for i, r in enumerate(regions) for v in r}
    for a in range(net.n):
        for b in net.adjacency[a]:
            if a in where and b in where:
                assert where[a] == where[b]
    for r in regions:
        comps = components(net, r)
        per_node = sum(len(c) for c in comps for _ in c)
        assert per_node == delta_of_region(net, r)
    utils = all_utilities(inst, s)
    assert [player_utility(inst, s, v) for v in range(inst.n)] == utils
    assert social_welfare(inst, s) == sum(utils)

import networkx as nx
import pytest
from hypothesis import given, settings

from netshield.errors import PreconditionError
from netshield.game import Instance, Strategy, build_network, delta_of_region
from netshield.meta import (
    BLOCK,
    CUT,
    build_meta_graph,
    build_meta_tree,
    classify_meta_nodes,
    decompose,
    empty_strategy_deltas,
    render,
)

from conftest import DATA, chain4, connected_instances, star4


def meta_sets(meta):
    return sorted((sorted(m.members), m.immunised) for m in meta.nodes)


def test_chain4_meta_graph():
    d = decompose(chain4())
    assert meta_sets(d.meta) == [([0], True), ([1], False), ([2], True), ([3], False)]
    u1, u2 = classify_meta_nodes(d.meta)
    assert u2 == {d.meta.node_of[1]} and u1 == {d.meta.node_of[3]}


def test_star4_meta_graph_merges_u_with_centre():
    d = decompose(star4())
    assert meta_sets(d.meta) == [([0, 1], True), ([2], False), ([3], False)]
    u1, u2 = classify_meta_nodes(d.meta)
    assert u2 == set() and len(u1) == 2


def test_all_immune_single_meta_node():
    inst = Instance.build(3, 0, {1: [0, 2]}, [1, 2])
    d = decompose(inst)
    assert len(d.meta.nodes) == 1
    assert len(d.tree.nodes) == 1 and d.tree.nodes[0].kind == BLOCK
    assert d.purchases == {}


def test_alternating_4_cycle_has_no_cuts():
    inst = Instance.build(4, 0, {1: [0, 2], 3: [2, 0]}, [2])
    assert classify_meta_nodes(decompose(inst).meta)[1] == set()


def test_chain4_tree_annotations():
    d = decompose(chain4())
    tree = d.tree
    root, cut, child = tree.nodes
    assert (root.kind, cut.kind, child.kind) == (BLOCK, CUT, BLOCK)
    assert cut.subtree_mass == 3 and cut.complement_mass == 1
    assert child.subtree_mass == 2
    assert child.mtilde(9) == 1
    assert empty_strategy_deltas(tree) == {d.meta.node_of[1]: 5, d.meta.node_of[3]: 9}
    assert list(d.purchases) == [2] and d.purchases[2].endpoint == 2


def test_star4_tree():
    d = decompose(star4())
    assert len(d.tree.nodes) == 1 and d.tree.nodes[0].mtilde(9) == 2
    assert d.purchases == {}


def test_triangles_sharing_immunised_node_merge():
    # u-a-c triangle and c-b-d triangle sharing immunised c; a, b vulnerable, d immune
    inst = Instance.build(5, 0, {1: [0, 2], 2: [0, 3, 4], 3: [4]}, [2, 4])
    d = decompose(inst)
    assert [n.kind for n in d.tree.nodes] == [BLOCK]


def test_two_purchasable_blocks_on_chain():
    # u - x - y - x2 - y2 with x, x2 vulnerable cuts
    inst = Instance.build(5, 0, {1: [0, 2], 2: [3], 3: [4]}, [2, 4])
    d = decompose(inst)
    assert len(d.purchases) == 2
    assert sorted(p.endpoint for p in d.purchases.values()) == [2, 4]


def test_disconnected_rejected():
    inst = Instance.build(4, 0, {1: [0], 2: [3]}, [])
    with pytest.raises(PreconditionError):
        decompose(inst)


@pytest.mark.parametrize("name,factory", [("chain4", chain4), ("star4", star4)])
def test_render_golden(name, factory):
    d = decompose(factory())
    assert render(d.meta, d.tree) == (DATA / f"{name}.meta.txt").read_text()


def _meta_nx(meta):
    return meta.to_networkx()


@settings(max_examples=200, deadline=None)
@given(connected_instances(max_n=9))
def test_tree_invariants(inst):
    d = decompose(inst)
    meta, tree = d.meta, d.tree
    g = _meta_nx(meta)
    vulnerable = [m.id for m in meta.nodes if not m.immunised]

    # adjacent meta-nodes alternate immunisation
    for a, b in g.edges:
        assert meta.nodes[a].immunised != meta.nodes[b].immunised

    # mass accounting and alternation
    assert sum(node.owned for node in tree.nodes) == inst.n
    owned = sorted(m for v in range(len(tree.nodes)) for m in tree.owned_meta(v))
    assert owned == list(range(len(meta.nodes)))
    for node in tree.nodes:
        assert node.subtree_mass == node.owned + sum(tree.nodes[c].subtree_mass for c in node.children)
        assert node.complement_mass == inst.n - node.subtree_mass
        for c in node.children:
            assert tree.nodes[c].kind != node.kind
            assert tree.nodes[c].parent == node.id
    assert tree.nodes[tree.root].kind == BLOCK
    assert d.u_meta in tree.nodes[tree.root].content

    blocks = [node for node in tree.nodes if node.kind == BLOCK]
    for node in blocks:
        if len(node.content) >= 2:
            assert any(meta.nodes[m].immunised for m in node.content)
        # merge soundness: any single vulnerable removal keeps the block connected
        for z in vulnerable:
            rest = [m for m in node.content if m != z]
            if len(rest) > 1:
                h = g.subgraph([m for m in g if m != z])
                assert all(nx.has_path(h, rest[0], m) for m in rest)

    # maximality: removing cut w separates its child blocks from the root side
    for node in tree.nodes:
        if node.kind != CUT:
            continue
        (w,) = node.content
        h = g.subgraph([m for m in g if m != w])
        root_side = nx.node_connected_component(h, d.u_meta)
        for c in node.children:
            assert not (tree.nodes[c].content - {w}) & root_side

    # cross-check the empty-strategy deltas against the game model
    net = build_network(inst, Strategy.of((), True))
    for z, delta in empty_strategy_deltas(tree).items():
        assert delta == delta_of_region(net, meta.nodes[z].members)


@settings(max_examples=60, deadline=None)
@given(connected_instances(max_n=8))
def test_meta_graph_is_quotient(inst):
    net = build_network(inst, Strategy.of((), True))
    meta = build_meta_graph(net)
    for a in range(net.n):
        for b in net.adjacency[a]:
            ma, mb = meta.node_of[a], meta.node_of[b]
            if ma != mb:
                assert mb in meta.adjacency[ma]
            else:
                assert net.immunised[a] == net.immunised[b]
    assert build_meta_tree(meta, meta.node_of[inst.u]).n == inst.n

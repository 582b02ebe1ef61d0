"""Meta-graph of same-immunisation regions and its block/cut meta-tree.

The meta-tree is built on G(empty, 1): u immunised, u buying nothing, every
other player's links intact. Blocks are maximal sub-graphs of meta-nodes
that stay connected when any one vulnerable meta-node is deleted; cuts are
the vulnerable articulation meta-nodes separating them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx

from .errors import PreconditionError
from .game import Instance, Network, Strategy, build_network

BLOCK = "block"
CUT = "cut"


@dataclass(frozen=True)
class MetaNode:
    id: int
    members: frozenset
    immunised: bool

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass
class MetaGraph:
    nodes: list  # list[MetaNode], ids are list positions
    adjacency: list  # list[frozenset[int]] over meta ids
    node_of: list  # base player -> meta id

    def is_connected(self) -> bool:
        if not self.nodes:
            return True
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in self.adjacency[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(self.nodes)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(len(self.nodes)))
        for a, nbrs in enumerate(self.adjacency):
            g.add_edges_from((a, b) for b in nbrs if a < b)
        return g


@dataclass
class MetaTreeNode:
    id: int
    kind: str  # BLOCK or CUT
    content: frozenset  # meta ids; a cut holds exactly its own meta-node
    parent: int | None = None
    children: list = field(default_factory=list)
    owned: int = 0  # base nodes owned by this tree node
    subtree_mass: int = 0  # |T(v)|
    complement_mass: int = 0  # |T-bar(v)| = n - |T(v)|
    # blocks only: (meta id, size, delta) of vulnerable non-cut meta-nodes
    interior_u1: list = field(default_factory=list)
    # cuts only: sum of squared child subtree masses
    child_squares: int = 0

    def mtilde(self, delta0: int, weighting: str = "region") -> int:
        """Weighted count of interior vulnerable meta-nodes with delta ``delta0``."""
        return sum(
            (size if weighting == "node" else 1)
            for _, size, d in self.interior_u1
            if d == delta0
        )


@dataclass
class MetaTree:
    n: int
    nodes: list  # list[MetaTreeNode]; ids are positions, root is 0
    root: int
    cut_of: dict  # vulnerable articulation meta id -> tree id
    block_of: dict  # non-cut meta id -> tree id of its unique block

    def preorder(self, v: int | None = None) -> list:
        start = self.root if v is None else v
        out, stack = [], [start]
        while stack:
            x = stack.pop()
            out.append(x)
            stack.extend(reversed(self.nodes[x].children))
        return out

    def postorder(self, v: int | None = None) -> list:
        return list(reversed(self.preorder(v)))

    def owner(self, meta_id: int) -> int:
        """Tree node that owns a meta-node's base players."""
        if meta_id in self.cut_of:
            return self.cut_of[meta_id]
        return self.block_of[meta_id]

    def owned_meta(self, v: int) -> list:
        node = self.nodes[v]
        if node.kind == CUT:
            return sorted(node.content)
        return sorted(m for m in node.content if m not in self.cut_of)

    def meta_in_subtree(self, v: int) -> list:
        out = []
        for x in self.preorder(v):
            out.extend(self.owned_meta(x))
        return sorted(out)

    def in_subtree(self, v: int) -> set:
        return set(self.preorder(v))


def build_meta_graph(network: Network) -> MetaGraph:
    node_of = [-1] * network.n
    nodes = []
    for v in range(network.n):
        if node_of[v] != -1:
            continue
        status = network.immunised[v]
        mid = len(nodes)
        stack = [v]
        node_of[v] = mid
        members = [v]
        while stack:
            x = stack.pop()
            for y in network.adjacency[x]:
                if node_of[y] == -1 and network.immunised[y] == status:
                    node_of[y] = mid
                    members.append(y)
                    stack.append(y)
        nodes.append(MetaNode(mid, frozenset(members), status))
    adjacency = [set() for _ in nodes]
    for x in range(network.n):
        for y in network.adjacency[x]:
            a, b = node_of[x], node_of[y]
            if a != b:
                adjacency[a].add(b)
    return MetaGraph(nodes, [frozenset(a) for a in adjacency], node_of)


def classify_meta_nodes(meta: MetaGraph) -> tuple:
    """Split vulnerable meta-nodes into non-articulation (U1) and articulation (U>=2)."""
    if not meta.is_connected():
        raise PreconditionError("meta-graph is disconnected")
    arts = set(nx.articulation_points(meta.to_networkx()))
    vulnerable = {m.id for m in meta.nodes if not m.immunised}
    ugeq2 = vulnerable & arts
    return vulnerable - ugeq2, ugeq2


def _merged_blocks(meta: MetaGraph) -> list:
    """Biconnected components glued along immunised articulation meta-nodes."""
    g = meta.to_networkx()
    bccs = [frozenset(c) for c in nx.biconnected_components(g)]
    parent = list(range(len(bccs)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    containing: dict = {}
    for i, comp in enumerate(bccs):
        for m in comp:
            containing.setdefault(m, []).append(i)
    for m, idxs in containing.items():
        if meta.nodes[m].immunised and len(idxs) > 1:
            for i in idxs[1:]:
                parent[find(i)] = find(idxs[0])
    groups: dict = {}
    for i, comp in enumerate(bccs):
        groups.setdefault(find(i), set()).update(comp)
    return sorted((frozenset(s) for s in groups.values()), key=min)


def build_meta_tree(meta: MetaGraph, u_meta: int) -> MetaTree:
    if not meta.is_connected():
        raise PreconditionError("meta-graph is disconnected")
    if not meta.nodes[u_meta].immunised:
        raise PreconditionError("the meta-tree is built with u immunised")
    n = sum(m.size for m in meta.nodes)
    if len(meta.nodes) == 1:
        blocks = [frozenset([0])]
        cuts: set = set()
    else:
        blocks = _merged_blocks(meta)
        _, cuts = classify_meta_nodes(meta)

    blocks_at: dict = {}
    for b, content in enumerate(blocks):
        for m in content:
            blocks_at.setdefault(m, []).append(b)
    root_block = blocks_at[u_meta][0]

    # breadth-first from the root block; ids follow discovery order
    nodes: list = []
    cut_of: dict = {}
    block_of: dict = {}
    queue = [(BLOCK, root_block, None)]
    seen_blocks = {root_block}
    seen_cuts: set = set()
    while queue:
        kind, key, parent = queue.pop(0)
        tid = len(nodes)
        if kind == BLOCK:
            node = MetaTreeNode(tid, BLOCK, blocks[key], parent)
            for m in blocks[key]:
                if m not in cuts:
                    block_of[m] = tid
            for m in sorted(blocks[key]):
                if m in cuts and m not in seen_cuts:
                    seen_cuts.add(m)
                    queue.append((CUT, m, tid))
        else:
            node = MetaTreeNode(tid, CUT, frozenset([key]), parent)
            cut_of[key] = tid
            for b in sorted(blocks_at[key], key=lambda b: min(blocks[b])):
                if b not in seen_blocks:
                    seen_blocks.add(b)
                    queue.append((BLOCK, b, tid))
        if parent is not None:
            nodes[parent].children.append(tid)
        nodes.append(node)

    tree = MetaTree(n, nodes, 0, cut_of, block_of)
    for v in tree.postorder():
        node = nodes[v]
        node.owned = sum(meta.nodes[m].size for m in tree.owned_meta(v))
        node.subtree_mass = node.owned + sum(nodes[c].subtree_mass for c in node.children)
        node.complement_mass = n - node.subtree_mass
        if node.kind == BLOCK:
            node.interior_u1 = [
                (m, meta.nodes[m].size, (n - meta.nodes[m].size) ** 2)
                for m in tree.owned_meta(v)
                if not meta.nodes[m].immunised
            ]
        else:
            node.child_squares = sum(nodes[c].subtree_mass ** 2 for c in node.children)
    return tree


@dataclass(frozen=True)
class Purchase:
    """A non-root block u may link into, with the endpoint used to do so."""

    block: int  # tree id
    meta_id: int  # representative immunised meta-node
    endpoint: int  # representative base player inside it


def purchasable_blocks(tree: MetaTree, meta: MetaGraph) -> dict:
    out = {}
    for node in tree.nodes:
        if node.kind != BLOCK or node.id == tree.root:
            continue
        immune = sorted(m for m in node.content if meta.nodes[m].immunised)
        if not immune:
            continue
        rep = immune[0]
        out[node.id] = Purchase(node.id, rep, min(meta.nodes[rep].members))
    return out


def empty_strategy_deltas(tree: MetaTree) -> dict:
    """Delta of every vulnerable meta-node when u (immunised) buys nothing."""
    out = {}
    for node in tree.nodes:
        if node.kind == BLOCK:
            for m, _, d in node.interior_u1:
                out[m] = d
        else:
            (m,) = node.content
            out[m] = node.complement_mass ** 2 + node.child_squares
    return out


@dataclass
class Decomposition:
    """Everything derived from G(empty, 1) that the solver and its checks share."""

    instance: Instance
    network: Network
    meta: MetaGraph
    tree: MetaTree
    purchases: dict  # block tree id -> Purchase

    @property
    def u_meta(self) -> int:
        return self.meta.node_of[self.instance.u]

    def endpoints(self, blocks) -> frozenset:
        return frozenset(self.purchases[b].endpoint for b in blocks)


def decompose(instance: Instance) -> Decomposition:
    network = build_network(instance, Strategy(frozenset(), True))
    meta = build_meta_graph(network)
    if not meta.is_connected():
        raise PreconditionError("G(empty, 1) is disconnected")
    tree = build_meta_tree(meta, meta.node_of[instance.u])
    return Decomposition(instance, network, meta, tree, purchasable_blocks(tree, meta))


def render(meta: MetaGraph, tree: MetaTree) -> str:
    """Deterministic text dump of the meta-graph and meta-tree."""
    lines = [f"metagraph nodes={len(meta.nodes)}"]
    for m in meta.nodes:
        tag = "I" if m.immunised else "U"
        nbrs = ",".join(str(x) for x in sorted(meta.adjacency[m.id]))
        lines.append(f"  meta {m.id} {tag} members={sorted(m.members)} adj=[{nbrs}]")
    lines.append(f"metatree nodes={len(tree.nodes)} root={tree.root} n={tree.n}")
    for node in tree.nodes:
        parent = "-" if node.parent is None else str(node.parent)
        lines.append(
            f"  {node.kind} {node.id} parent={parent} content={sorted(node.content)}"
            f" children={node.children} owned={node.owned}"
            f" mass={node.subtree_mass} complement={node.complement_mass}"
        )
        if node.kind == BLOCK and node.interior_u1:
            table: dict = {}
            for _, _, d in node.interior_u1:
                table[d] = table.get(d, 0) + 1
            cells = " ".join(f"{d}:{c}" for d, c in sorted(table.items()))
            lines.append(f"    mtilde {cells}")
    return "\n".join(lines) + "\n"

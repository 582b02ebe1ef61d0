"""Exact best response against the maximum disruption adversary.

The solver guesses the minimum delta value ``delta0`` of the final network
and, for each guess, runs a bottom-up dynamic program over the meta-tree.
A table entry is keyed by ``(m, links)``: ``m`` is the (weighted) number of
vulnerable meta-nodes inside the subtree whose delta equals ``delta0`` and
``links`` the number of blocks bought inside it. The stored value is the
largest integer *benefit* ``sum(w(a) * |CC_u(a)|)`` over attacked meta-nodes
``a`` of the subtree. The restricted utility for a denominator ``|A|`` is
then ``-alpha * links + benefit / |A|``, so one table per ``delta0`` serves
every ``|A|`` at once and the whole recursion runs on integers.

Weights ``w(a)`` are the member counts of the attacked regions (``"node"``
weighting: the adversary picks a uniformly random node among the target
regions) or 1 (``"region"`` weighting).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import DisconnectedError, InternalError
from .game import (
    Adversary,
    Instance,
    Strategy,
    _check_weighting,
    attack,
    attack_targets,
    build_network,
    delta_of_player_region,
    player_utility,
    region_of,
    weighted_target_count,
)
from .meta import BLOCK, CUT, Decomposition, decompose

IMMUNISED = "Immunised"
NOT_IMM_ATTACKED = "NotImmAttacked"
NOT_IMM_SAFE = "NotImmSafe"

SKIP, LINK, CHILD = "skip", "link", "child"


@dataclass(frozen=True)
class Entry:
    benefit: int
    choice: tuple  # block: ((cut, m, links), ...); cut: ((block, m, links, action), ...)


@dataclass(frozen=True)
class DpEntry:
    """A table cell projected onto a concrete ``|A|``."""

    value: Fraction
    links: int
    blocks: frozenset  # reconstructed purchasable-block tree ids


@dataclass(frozen=True)
class BestResponse:
    strategy: Strategy
    utility: Fraction
    immunised_branch: str
    certificate: tuple  # (delta0, a_count); delta0 is None when nothing is attacked
    blocks: frozenset = frozenset()


def _weight(size: int, weighting: str) -> int:
    return size if weighting == "node" else 1


def _pareto(table: dict) -> dict:
    """Drop ``(m, L)`` cells beaten by a cell with the same m, fewer links, more benefit.

    The zero-link cell is the empty strategy and is kept regardless: whether
    a subtree is linked at all matters to the cut above it.
    """
    by_m: dict = {}
    for (m, links), e in table.items():
        by_m.setdefault(m, []).append((links, e))
    out = {}
    for m, cells in by_m.items():
        cells.sort(key=lambda c: c[0])
        best = None
        for links, e in cells:
            if links == 0:
                out[(m, 0)] = e
                continue
            if best is None or e.benefit > best:
                best = e.benefit
                out[(m, links)] = e
    return out


def _put(table: dict, key, entry: Entry) -> None:
    old = table.get(key)
    if old is None or entry.benefit > old.benefit:
        table[key] = entry


class DeltaTables:
    """All DP tables for one guess of ``delta0`` (shared by every ``|A|``)."""

    def __init__(self, decomp: Decomposition, delta0: int, weighting: str = "node"):
        _check_weighting(weighting)
        self.decomp = decomp
        self.delta0 = delta0
        self.weighting = weighting
        self.tables: dict = {}
        tree = decomp.tree
        for v in tree.postorder():
            if tree.nodes[v].kind == BLOCK:
                self.tables[v] = self._block(v)
            else:
                self.tables[v] = self._cut(v)

    @property
    def root(self) -> dict:
        return self.tables[self.decomp.tree.root]

    def _block(self, v: int) -> dict:
        node = self.decomp.tree.nodes[v]
        n = self.decomp.tree.n
        if any(d < self.delta0 for _, _, d in node.interior_u1):
            return {}
        states = {(0, 0): Entry(0, ())}
        for c in node.children:
            child = self.tables[c]
            if not child:
                return {}
            nxt: dict = {}
            for (m1, l1), e1 in states.items():
                for (m2, l2), e2 in child.items():
                    _put(nxt, (m1 + m2, l1 + l2),
                         Entry(e1.benefit + e2.benefit, e1.choice + ((c, m2, l2),)))
            states = _pareto(nxt)
        hit = [(size, n - size) for _, size, d in node.interior_u1 if d == self.delta0]
        mt = sum(_weight(size, self.weighting) for size, _ in hit)
        gain = sum(_weight(size, self.weighting) * cc for size, cc in hit)
        return {(m + mt, links): Entry(e.benefit + gain, e.choice)
                for (m, links), e in states.items()}

    def _cut(self, v: int) -> dict:
        tree = self.decomp.tree
        node = tree.nodes[v]
        if not node.children:
            raise InternalError(f"cut {v} has no child block")
        (meta_id,) = node.content
        w = _weight(self.decomp.meta.nodes[meta_id].size, self.weighting)
        outside = node.complement_mass
        # prefix states keyed by (m, links, t, q): t and q are the mass and
        # squared mass of the children linked to u so far
        states = {(0, 0, 0, 0): Entry(0, ())}
        for b in node.children:
            child = self.tables[b]
            if not child:
                return {}
            s = tree.nodes[b].subtree_mass
            nxt: dict = {}
            for (m1, l1, t, q), e1 in states.items():
                for (m2, l2), e2 in child.items():
                    base = e1.benefit + e2.benefit
                    if l2 == 0:
                        _put(nxt, (m1 + m2, l1, t, q),
                             Entry(base, e1.choice + ((b, m2, 0, SKIP),)))
                        _put(nxt, (m1 + m2, l1 + 1, t + s, q + s * s),
                             Entry(base, e1.choice + ((b, m2, 0, LINK),)))
                    else:
                        _put(nxt, (m1 + m2, l1 + l2, t + s, q + s * s),
                             Entry(base, e1.choice + ((b, m2, l2, CHILD),)))
            states = nxt
        table: dict = {}
        for (m, links, t, q), e in states.items():
            d = (outside + t) ** 2 + (node.child_squares - q)
            if d < self.delta0:
                continue
            if d == self.delta0:
                _put(table, (m + w, links), Entry(e.benefit + w * (outside + t), e.choice))
            else:
                _put(table, (m, links), e)
        return _pareto(table)

    def reconstruct(self, v: int, m: int, links: int) -> frozenset:
        """Purchasable blocks (tree ids) realising cell ``(m, links)`` of node ``v``."""
        out: set = set()
        stack = [(v, m, links)]
        while stack:
            x, mx, lx = stack.pop()
            entry = self.tables[x][(mx, lx)]
            if self.decomp.tree.nodes[x].kind == BLOCK:
                stack.extend(entry.choice)
            else:
                for b, mb, lb, action in entry.choice:
                    if action == LINK:
                        out.add(b)
                    stack.append((b, mb, lb))
        return frozenset(out)

    def project(self, v: int, a_count: int) -> dict:
        """Table of node ``v`` for a fixed ``|A|``: ``m -> DpEntry``."""
        alpha = self.decomp.instance.alpha
        best: dict = {}
        for (m, links), e in sorted(self.tables[v].items()):
            value = -alpha * links + Fraction(e.benefit, a_count)
            cur = best.get(m)
            if cur is None or value > cur[0]:
                best[m] = (value, links)
        return {m: DpEntry(value, links, self.reconstruct(v, m, links))
                for m, (value, links) in sorted(best.items())}


# ---------------------------------------------------------------------------
# direct (non-DP) restricted quantities, used as references by the tests


def _strategy_for(decomp: Decomposition, blocks: Iterable[int]) -> Strategy:
    return Strategy(decomp.endpoints(blocks), True)


def _restricted_blocks(decomp: Decomposition, blocks: Iterable[int], v: int) -> set:
    inside = decomp.tree.in_subtree(v)
    return {b for b in blocks if b in inside}


def _vulnerable_in(decomp: Decomposition, v: int) -> list:
    return [m for m in decomp.tree.meta_in_subtree(v) if not decomp.meta.nodes[m].immunised]


def _simulate(decomp: Decomposition, blocks: Iterable[int], v: int) -> list:
    """``(meta id, delta, |CC_u|)`` for each vulnerable meta-node of T(v)."""
    network = build_network(decomp.instance, _strategy_for(decomp, blocks))
    u = decomp.instance.u
    out = []
    for z in _vulnerable_in(decomp, v):
        outcome = attack(network, decomp.meta.nodes[z].members)
        comps = outcome.surviving_components
        cc = next((len(c) for c in comps if u in c), 0)
        out.append((z, sum(len(c) ** 2 for c in comps), cc))
    return out


def restricted_attack_set(decomp: Decomposition, blocks, delta0: int, v: int) -> set:
    return {z for z, d, _ in _simulate(decomp, blocks, v) if d == delta0}


def restricted_utility_eval(
    decomp: Decomposition, blocks, delta0: int, a_count: int, v: int, weighting: str = "node"
) -> Fraction | None:
    """Restricted utility of ``blocks & T(v)`` by direct simulation; None is bottom."""
    mine = _restricted_blocks(decomp, blocks, v)
    acc = 0
    for z, d, cc in _simulate(decomp, mine, v):
        if d < delta0:
            return None
        if d == delta0:
            acc += _weight(decomp.meta.nodes[z].size, weighting) * cc
    return -decomp.instance.alpha * len(mine) + Fraction(acc, a_count)


def restricted_count(decomp: Decomposition, blocks, delta0: int, v: int,
                     weighting: str = "node") -> int | None:
    """Weighted size of the restricted attack set, or None if some delta is below delta0."""
    mine = _restricted_blocks(decomp, blocks, v)
    m = 0
    for z, d, _ in _simulate(decomp, mine, v):
        if d < delta0:
            return None
        if d == delta0:
            m += _weight(decomp.meta.nodes[z].size, weighting)
    return m


def empty_valid(decomp: Decomposition, v: int, delta0: int, m: int, weighting: str = "node") -> bool:
    """Whether buying nothing inside T(v) is a valid (delta0, m) restricted strategy."""
    tree = decomp.tree
    count = 0
    for x in tree.preorder(v):
        node = tree.nodes[x]
        if node.kind == BLOCK:
            deltas = [(size, d) for _, size, d in node.interior_u1]
        else:
            (mid,) = node.content
            deltas = [(decomp.meta.nodes[mid].size,
                       node.complement_mass ** 2 + node.child_squares)]
        for size, d in deltas:
            if d < delta0:
                return False
            if d == delta0:
                count += _weight(size, weighting)
    return count == m


def block_table(decomp: Decomposition, v: int, delta0: int, a_count: int,
                weighting: str = "node") -> dict:
    if decomp.tree.nodes[v].kind != BLOCK:
        raise ValueError(f"tree node {v} is not a block")
    return DeltaTables(decomp, delta0, weighting).project(v, a_count)


def cut_table(decomp: Decomposition, v: int, delta0: int, a_count: int,
              weighting: str = "node") -> dict:
    if decomp.tree.nodes[v].kind != CUT:
        raise ValueError(f"tree node {v} is not a cut")
    return DeltaTables(decomp, delta0, weighting).project(v, a_count)


def root_table(decomp: Decomposition, delta0: int, a_count: int, weighting: str = "node") -> dict:
    return DeltaTables(decomp, delta0, weighting).project(decomp.tree.root, a_count)


# ---------------------------------------------------------------------------
# delta0 candidates and finalisation


def delta_candidates(decomp: Decomposition) -> list:
    """Every delta a vulnerable meta-node can reach under some block purchase.

    A guess outside this set can only produce m = 0 at the root, which is
    never selected, so restricting the search to it is exact.
    """
    tree = decomp.tree
    values: set = set()
    ceiling = None
    for node in tree.nodes:
        if node.kind == BLOCK:
            for _, _, d in node.interior_u1:
                values.add(d)
                ceiling = d if ceiling is None else min(ceiling, d)
        else:
            sums = {(0, 0)}
            for c in node.children:
                s = tree.nodes[c].subtree_mass
                sums |= {(t + s, q + s * s) for t, q in sums}
            outside = node.complement_mass
            values.update((outside + t) ** 2 + node.child_squares - q for t, q in sums)
    if ceiling is not None:
        values = {d for d in values if d <= ceiling}
    return sorted(values)


@dataclass
class _Candidate:
    value: Fraction
    links: int
    immunised: bool
    branch: str
    certificate: tuple
    blocks: frozenset | None = None  # None: explicit strategy below
    strategy: Strategy | None = None
    where: tuple = ()  # (delta0, m, links) locating the root cell

    def key(self) -> tuple:
        return (self.value, -self.links, not self.immunised)


def _baseline(instance: Instance, immunised: bool, weighting: str) -> _Candidate:
    strategy = Strategy(frozenset(), immunised)
    network = build_network(instance, strategy)
    weights = weighted_target_count(network, Adversary.MAX_DISRUPTION, weighting)
    if weights:
        region = next(iter(weights))
        certificate = (attack_delta(network, region), sum(weights.values()))
    else:
        certificate = (None, 0)
    if immunised:
        branch = IMMUNISED
    else:
        attacked = any(instance.u in r for r in weights)
        branch = NOT_IMM_ATTACKED if attacked else NOT_IMM_SAFE
    value = player_utility(instance, strategy, instance.u, Adversary.MAX_DISRUPTION, weighting)
    return _Candidate(value, 0, immunised, branch, certificate, strategy=strategy)


def attack_delta(network, region) -> int:
    return sum(len(c) ** 2 for c in attack(network, region).surviving_components)


def finalize(decomp: Decomposition, tables: dict, weighting: str = "node",
             verify: bool = True) -> BestResponse:
    """Pick the best of the three branches plus the two empty strategies.

    ``tables`` maps each delta0 guess to its DeltaTables.
    """
    instance = decomp.instance
    beta = instance.beta
    alpha = instance.alpha
    plain = Strategy(frozenset(), False)
    d_u = delta_of_player_region(instance, plain, instance.u)
    w_u = _weight(len(region_of(build_network(instance, plain), instance.u)), weighting)

    best = None

    def offer(cand: _Candidate) -> None:
        nonlocal best
        if best is None or cand.key() > best.key():
            best = cand

    offer(_baseline(instance, False, weighting))
    offer(_baseline(instance, True, weighting))
    for delta0 in sorted(tables):
        dt = tables[delta0]
        for (m, links), e in sorted(dt.root.items()):
            if m == 0:
                continue
            base = -alpha * links
            where = (delta0, m, links)
            offer(_Candidate(base + Fraction(e.benefit, m) - beta, links, True,
                             IMMUNISED, (delta0, m), where=where))
            if delta0 < d_u:
                offer(_Candidate(base + Fraction(e.benefit, m), links, False,
                                 NOT_IMM_SAFE, (delta0, m), where=where))
            elif delta0 == d_u:
                offer(_Candidate(base + Fraction(e.benefit, m + w_u), links, False,
                                 NOT_IMM_ATTACKED, (delta0, m + w_u), where=where))

    if best.strategy is None:
        delta0, m, links = best.where
        blocks = tables[delta0].reconstruct(decomp.tree.root, m, links)
        strategy = Strategy(decomp.endpoints(blocks), best.immunised)
    else:
        blocks = frozenset()
        strategy = best.strategy
    if verify:
        direct = player_utility(instance, strategy, instance.u, Adversary.MAX_DISRUPTION, weighting)
        if direct != best.value:
            raise InternalError(
                f"reconstructed strategy evaluates to {direct}, table says {best.value}"
            )
    return BestResponse(strategy, best.value, best.branch, best.certificate, blocks)


def best_response(instance: Instance, weighting: str = "node", prune: bool = False,
                  verify: bool = True) -> BestResponse:
    """Exact best response of ``instance.u`` against the maximum disruption adversary.

    With ``prune`` the delta0 guesses are limited to ``delta_candidates``;
    otherwise every integer in 0..n^2 is tried.
    """
    _check_weighting(weighting)
    if not instance.is_connected:
        raise DisconnectedError("G(empty, .) is disconnected; use the oracle instead")
    decomp = decompose(instance)
    deltas = delta_candidates(decomp) if prune else range(0, instance.n ** 2 + 1)
    tables = {d: DeltaTables(decomp, d, weighting) for d in deltas}
    return finalize(decomp, tables, weighting, verify)


def targets_of(instance: Instance, strategy: Strategy) -> list:
    network = build_network(instance, strategy)
    return attack_targets(network, Adversary.MAX_DISRUPTION)


__all__ = [
    "BestResponse", "DeltaTables", "DpEntry", "best_response", "block_table", "cut_table",
    "delta_candidates", "empty_valid", "finalize", "restricted_attack_set",
    "restricted_count", "restricted_utility_eval", "root_table",
]

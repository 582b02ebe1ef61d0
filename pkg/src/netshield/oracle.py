"""Brute-force reference answers.

Nothing here touches the dynamic program; agreement between the two is
only meaningful because the oracle evaluates every candidate strategy
through the plain game definitions.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from itertools import combinations

from .errors import SizeError
from .game import (
    Adversary,
    Instance,
    Strategy,
    all_utilities,
    build_network,
    components,
    player_utility,
    vulnerable_regions,
)
from .meta import Decomposition, decompose

FULL_RAW_CAP = 14
RESTRICTED_CAP = 16


class SearchSpace(str, Enum):
    FULL_RAW = "full"
    REDUCED_BLOCKS = "blocks"


def _subsets(items: list):
    for k in range(len(items) + 1):
        yield from combinations(items, k)


def _tie_key(value: Fraction, strategy: Strategy) -> tuple:
    # larger is better: utility, then fewer links, then not immunised
    return (value, -len(strategy.links), not strategy.immunised)


def enumerate_strategies(instance: Instance, space: SearchSpace = SearchSpace.FULL_RAW,
                         decomp: Decomposition | None = None):
    """Strategies in deterministic order: endpoint set, then immunisation bit."""
    space = SearchSpace(space)
    if space is SearchSpace.FULL_RAW:
        pool = instance.others
        for links in sorted(_subsets(pool)):
            for bit in (False, True):
                yield Strategy(frozenset(links), bit)
        return
    decomp = decomp or decompose(instance)
    ends = sorted(p.endpoint for p in decomp.purchases.values())
    for links in sorted(_subsets(ends)):
        for bit in (False, True):
            yield Strategy(frozenset(links), bit)


def brute_force_best_response(
    instance: Instance,
    adversary: Adversary = Adversary.MAX_DISRUPTION,
    space: SearchSpace = SearchSpace.FULL_RAW,
    weighting: str = "node",
    cap: int = FULL_RAW_CAP,
) -> tuple:
    """Exhaustive argmax of u's utility over the search space."""
    space = SearchSpace(space)
    if space is SearchSpace.FULL_RAW and instance.n > cap:
        raise SizeError(f"n={instance.n} exceeds the exhaustive cap {cap}")
    decomp = None
    if space is SearchSpace.REDUCED_BLOCKS:
        decomp = decompose(instance)
        if len(decomp.purchases) > cap:
            raise SizeError(f"{len(decomp.purchases)} purchasable blocks exceed the cap {cap}")
    best = None
    for strategy in enumerate_strategies(instance, space, decomp):
        value = player_utility(instance, strategy, instance.u, adversary, weighting)
        key = _tie_key(value, strategy)
        if best is None or key > best[0]:
            best = (key, strategy, value)
    return best[1], best[2]


def brute_force_restricted(
    decomp: Decomposition,
    delta0: int,
    a_count: int,
    v: int,
    m: int,
    weighting: str = "node",
    cap: int = RESTRICTED_CAP,
) -> Fraction | None:
    """Best restricted utility over block subsets inside T(v) with exactly m at delta0."""
    tree = decomp.tree
    inside = tree.in_subtree(v)
    blocks = sorted(b for b in decomp.purchases if b in inside)
    if len(blocks) > cap:
        raise SizeError(f"{len(blocks)} purchasable blocks in T({v}) exceed the cap {cap}")
    vulnerable = [z for z in tree.meta_in_subtree(v) if not decomp.meta.nodes[z].immunised]
    u = decomp.instance.u
    best = None
    for chosen in _subsets(blocks):
        links = frozenset(decomp.purchases[b].endpoint for b in chosen)
        network = build_network(decomp.instance, Strategy(links, True))
        ok, count, acc = True, 0, 0
        for z in vulnerable:
            members = decomp.meta.nodes[z].members
            comps = components(network, members)
            d = sum(len(c) ** 2 for c in comps)
            if d < delta0:
                ok = False
                break
            if d == delta0:
                w = len(members) if weighting == "node" else 1
                count += w
                acc += w * next((len(c) for c in comps if u in c), 0)
        if not ok or count != m:
            continue
        value = -decomp.instance.alpha * len(chosen) + Fraction(acc, a_count)
        if best is None or value > best:
            best = value
    return best


def welfare_argmin_targets(instance: Instance, strategy: Strategy) -> list:
    """Regions whose destruction minimises the post-attack benefit sum, found directly."""
    network = build_network(instance, strategy)
    scores = []
    for region in vulnerable_regions(network):
        total = 0
        for comp in components(network, region):
            # every member of comp keeps the whole of comp
            total += sum(len(comp) for _ in comp)
        scores.append((region, total))
    if not scores:
        return []
    low = min(s for _, s in scores)
    return [r for r, s in scores if s == low]


def welfare_if_attacked(instance: Instance, strategy: Strategy, region) -> Fraction:
    """Social welfare when the adversary is forced to hit ``region``."""
    network = build_network(instance, strategy)
    benefit = sum(len(c) ** 2 for c in components(network, frozenset(region)))
    cost = Fraction(0)
    for v in range(instance.n):
        cost += instance.alpha * instance.links_bought(v, strategy)
        if instance.is_immunised(v, strategy):
            cost += instance.beta
    return benefit - cost


__all__ = [
    "SearchSpace",
    "all_utilities",
    "brute_force_best_response",
    "brute_force_restricted",
    "enumerate_strategies",
    "welfare_argmin_targets",
    "welfare_if_attacked",
]

"""Game model: instances, strategies, networks, attacks and utilities.

Everything here is evaluated directly from the definitions, with no
structural shortcuts, so the module doubles as the ground truth that the
best-response solver and the brute-force oracle are checked against.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import DomainError, InputError, InstanceSemanticError

VulnRegion = frozenset  # frozenset[int] of vulnerable player ids

WEIGHTINGS = ("node", "region")


class Adversary(str, Enum):
    MAX_CARNAGE = "max-carnage"
    RANDOM = "random"
    MAX_DISRUPTION = "max-disruption"


@dataclass(frozen=True)
class Strategy:
    links: frozenset
    immunised: bool = False

    @classmethod
    def of(cls, links: Iterable[int] = (), immunised: bool = False) -> "Strategy":
        return cls(frozenset(links), bool(immunised))


@dataclass(frozen=True)
class Instance:
    """The world as seen by the distinguished player ``u``.

    ``others_links[v]`` is the set of endpoints bought by player ``v``; the
    entry for ``u`` is always empty (``u``'s links live in a Strategy).
    ``others_immunised[u]`` is ignored and stored as False.
    """

    n: int
    u: int
    others_links: tuple
    others_immunised: tuple
    alpha: Fraction
    beta: Fraction

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InstanceSemanticError(f"n must be positive, got {self.n}")
        if not 0 <= self.u < self.n:
            raise InstanceSemanticError(f"u={self.u} out of range for n={self.n}")
        if len(self.others_links) != self.n or len(self.others_immunised) != self.n:
            raise InstanceSemanticError("per-player tables must have length n")
        if self.others_links[self.u]:
            raise InstanceSemanticError("u's links belong to its strategy, not the instance")
        for v, links in enumerate(self.others_links):
            for w in links:
                if not 0 <= w < self.n:
                    raise InstanceSemanticError(f"player {v} links to out-of-range id {w}")
                if w == v:
                    raise InstanceSemanticError(f"player {v} has a self-link")
        if self.alpha <= 0 or self.beta <= 0:
            raise InstanceSemanticError("alpha and beta must be positive")

    @classmethod
    def build(
        cls,
        n: int,
        u: int,
        links: Mapping[int, Iterable[int]],
        immunised: Iterable[int],
        alpha=1,
        beta=1,
    ) -> "Instance":
        """Convenience constructor from sparse link/immunisation data."""
        table = [frozenset() for _ in range(n)]
        for v, ends in links.items():
            table[v] = frozenset(ends)
        imm = set(immunised)
        imm.discard(u)
        flags = tuple(v in imm for v in range(n))
        return cls(n, u, tuple(table), flags, Fraction(alpha), Fraction(beta))

    @property
    def others(self) -> list[int]:
        return [v for v in range(self.n) if v != self.u]

    def base_adjacency(self) -> list[set]:
        adj = [set() for _ in range(self.n)]
        for v, links in enumerate(self.others_links):
            for w in links:
                adj[v].add(w)
                adj[w].add(v)
        return adj

    @property
    def is_connected(self) -> bool:
        """Whether G(empty, .) -- the network without u's links -- is connected."""
        adj = self.base_adjacency()
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == self.n

    def links_bought(self, player: int, strategy: Strategy) -> int:
        if player == self.u:
            return len(strategy.links)
        return len(self.others_links[player])

    def is_immunised(self, player: int, strategy: Strategy) -> bool:
        if player == self.u:
            return strategy.immunised
        return self.others_immunised[player]


@dataclass(frozen=True)
class Network:
    n: int
    adjacency: tuple  # tuple[frozenset[int], ...]
    immunised: tuple  # tuple[bool, ...]

    @property
    def vulnerable(self) -> list[int]:
        return [v for v in range(self.n) if not self.immunised[v]]


@dataclass(frozen=True)
class AttackOutcome:
    destroyed: frozenset
    surviving_components: tuple  # tuple[frozenset[int], ...], sorted by min member


def _check_strategy(instance: Instance, strategy: Strategy) -> None:
    for w in strategy.links:
        if not isinstance(w, int) or not 0 <= w < instance.n:
            raise InputError(f"strategy endpoint {w!r} is not a valid player id")
        if w == instance.u:
            raise InputError("u cannot link to itself")


def build_network(instance: Instance, strategy: Strategy) -> Network:
    _check_strategy(instance, strategy)
    adj = instance.base_adjacency()
    for w in strategy.links:
        adj[instance.u].add(w)
        adj[w].add(instance.u)
    imm = list(instance.others_immunised)
    imm[instance.u] = strategy.immunised
    return Network(instance.n, tuple(frozenset(a) for a in adj), tuple(imm))


def _flood(network: Network, start: int, allowed) -> set:
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in network.adjacency[x]:
            if y not in seen and allowed(y):
                seen.add(y)
                queue.append(y)
    return seen


def vulnerable_regions(network: Network) -> list:
    """Maximal connected vulnerable sets, ordered by smallest member."""
    imm = network.immunised
    seen: set = set()
    regions = []
    for v in range(network.n):
        if imm[v] or v in seen:
            continue
        region = _flood(network, v, lambda y: not imm[y])
        seen |= region
        regions.append(frozenset(region))
    return regions


def components(network: Network, removed=frozenset()) -> list:
    """Connected components of the network after deleting ``removed``."""
    seen = set(removed)
    out = []
    for v in range(network.n):
        if v in seen:
            continue
        comp = _flood(network, v, lambda y: y not in removed)
        seen |= comp
        out.append(frozenset(comp))
    return out


def _require_region(network: Network, target) -> frozenset:
    target = frozenset(target)
    if not target:
        raise InputError("empty attack target")
    start = min(target)
    if start < 0 or max(target) >= network.n or network.immunised[start]:
        raise InputError(f"{sorted(target)} is not a vulnerable region")
    region = _flood(network, start, lambda y: not network.immunised[y])
    if region != target:
        raise InputError(f"{sorted(target)} is not a vulnerable region")
    return target


def attack(network: Network, target) -> AttackOutcome:
    target = _require_region(network, target)
    return AttackOutcome(target, tuple(components(network, target)))


def _sum_squares(comps) -> int:
    return sum(len(c) * len(c) for c in comps)


def delta_of_region(network: Network, target) -> int:
    """Sum of squared component sizes left after destroying ``target``."""
    return _sum_squares(attack(network, target).surviving_components)


def attack_targets(network: Network, adversary: Adversary) -> list:
    regions = vulnerable_regions(network)
    if not regions:
        return []
    adversary = Adversary(adversary)
    if adversary is Adversary.RANDOM:
        return regions
    if adversary is Adversary.MAX_CARNAGE:
        biggest = max(len(r) for r in regions)
        return [r for r in regions if len(r) == biggest]
    deltas = [_sum_squares(components(network, r)) for r in regions]
    low = min(deltas)
    return [r for r, d in zip(regions, deltas) if d == low]


def _check_weighting(weighting: str) -> None:
    if weighting not in WEIGHTINGS:
        raise InputError(f"unknown weighting {weighting!r}; expected one of {WEIGHTINGS}")


def weighted_target_count(
    network: Network, adversary: Adversary, weighting: str = "node"
) -> dict:
    """Attack probability mass of each target region, as integer weights.

    Random and max-carnage attacks are uniform over attacked nodes, so a
    region weighs its member count. For max-disruption the weighting picks
    between per-node (the default) and per-region averaging.
    """
    _check_weighting(weighting)
    targets = attack_targets(network, adversary)
    if Adversary(adversary) is Adversary.MAX_DISRUPTION and weighting == "region":
        return {r: 1 for r in targets}
    return {r: len(r) for r in targets}


def _component_size_map(network: Network, removed: frozenset) -> list:
    size = [0] * network.n
    for comp in components(network, removed):
        for v in comp:
            size[v] = len(comp)
    return size


def _benefits(network: Network, adversary: Adversary, weighting: str) -> list:
    """Expected post-attack component size of every player."""
    weights = weighted_target_count(network, adversary, weighting)
    if not weights:
        # no vulnerable node: nothing is attacked, the network survives intact
        size = _component_size_map(network, frozenset())
        return [Fraction(s) for s in size]
    total = sum(weights.values())
    acc = [0] * network.n
    for region, w in weights.items():
        size = _component_size_map(network, region)
        for v in range(network.n):
            acc[v] += w * size[v]
    return [Fraction(a, total) for a in acc]


def all_utilities(
    instance: Instance,
    strategy: Strategy,
    adversary: Adversary = Adversary.MAX_DISRUPTION,
    weighting: str = "node",
) -> list:
    network = build_network(instance, strategy)
    benefit = _benefits(network, adversary, weighting)
    out = []
    for v in range(instance.n):
        cost = instance.alpha * instance.links_bought(v, strategy)
        if instance.is_immunised(v, strategy):
            cost += instance.beta
        out.append(benefit[v] - cost)
    return out


def player_utility(
    instance: Instance,
    strategy: Strategy,
    player: int,
    adversary: Adversary = Adversary.MAX_DISRUPTION,
    weighting: str = "node",
) -> Fraction:
    if not 0 <= player < instance.n:
        raise InputError(f"player {player} out of range")
    network = build_network(instance, strategy)
    weights = weighted_target_count(network, adversary, weighting)
    if weights:
        total = sum(weights.values())
        acc = 0
        for region, w in weights.items():
            if player in region:
                continue
            comp = _flood(network, player, lambda y, r=region: y not in r)
            acc += w * len(comp)
        benefit = Fraction(acc, total)
    else:
        benefit = Fraction(len(_flood(network, player, lambda y: True)))
    cost = instance.alpha * instance.links_bought(player, strategy)
    if instance.is_immunised(player, strategy):
        cost += instance.beta
    return benefit - cost


def social_welfare(
    instance: Instance,
    strategy: Strategy,
    adversary: Adversary = Adversary.MAX_DISRUPTION,
    weighting: str = "node",
) -> Fraction:
    return sum(all_utilities(instance, strategy, adversary, weighting), Fraction(0))


def region_of(network: Network, player: int) -> frozenset:
    if network.immunised[player]:
        raise DomainError(f"player {player} is immunised and has no vulnerable region")
    return frozenset(_flood(network, player, lambda y: not network.immunised[y]))


def delta_of_player_region(instance: Instance, strategy: Strategy, player: int) -> int:
    network = build_network(instance, strategy)
    return delta_of_region(network, region_of(network, player))


def region_deltas(network: Network) -> list:
    """``(region, delta)`` for every vulnerable region, in region order."""
    return [(r, _sum_squares(components(network, r))) for r in vulnerable_regions(network)]


def format_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(text: str) -> Fraction:
    """Parse ``"p/q"`` (or a bare integer ``"p"``) with p >= 0, q >= 1."""
    if not isinstance(text, str):
        raise InstanceSemanticError(f"fraction must be a string, got {text!r}")
    num, sep, den = text.strip().partition("/")
    if not sep:
        den = "1"
    if not (num.isdigit() and den.isdigit()):
        raise InstanceSemanticError(f"malformed fraction {text!r}")
    if int(den) == 0:
        raise InstanceSemanticError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den))


__all__: Sequence[str] = (
    "Adversary",
    "AttackOutcome",
    "Instance",
    "Network",
    "Strategy",
    "VulnRegion",
    "all_utilities",
    "attack",
    "attack_targets",
    "build_network",
    "components",
    "delta_of_player_region",
    "delta_of_region",
    "format_fraction",
    "parse_fraction",
    "player_utility",
    "region_deltas",
    "region_of",
    "social_welfare",
    "vulnerable_regions",
    "weighted_target_count",
)

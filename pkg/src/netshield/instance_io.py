"""Instance/result files and the seeded random instance generator.

Files are JSON. Fractions travel as ``"p/q"`` strings so nothing is ever
rounded; output is canonical (sorted keys, sorted id lists) so identical
inputs give byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
import random
from fractions import Fraction

from .errors import GenerationError, InstanceSemanticError, InstanceSyntaxError
from .game import Instance, Strategy, format_fraction, parse_fraction

FORMAT_VERSION = 1


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def instance_to_dict(instance: Instance) -> dict:
    players = []
    for v in instance.others:
        players.append({
            "id": v,
            "immunised": bool(instance.others_immunised[v]),
            "links": sorted(instance.others_links[v]),
        })
    return {
        "version": FORMAT_VERSION,
        "n": instance.n,
        "u": instance.u,
        "alpha": format_fraction(instance.alpha),
        "beta": format_fraction(instance.beta),
        "players": players,
    }


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def serialize_instance(instance: Instance) -> str:
    return dumps(instance_to_dict(instance))


def instance_digest(instance: Instance) -> str:
    return hashlib.sha256(serialize_instance(instance).encode()).hexdigest()


def parse_instance(data) -> Instance:
    """Strictly parse an instance file (bytes or str).

    Connectivity is not checked here; read ``Instance.is_connected``.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InstanceSyntaxError(f"instance file is not UTF-8: {exc}") from None
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise InstanceSyntaxError(f"invalid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise InstanceSyntaxError("instance must be a JSON object")
    for key, check in (("version", _is_int), ("n", _is_int), ("u", _is_int),
                       ("alpha", lambda x: isinstance(x, str)),
                       ("beta", lambda x: isinstance(x, str)),
                       ("players", lambda x: isinstance(x, list))):
        if key not in raw:
            raise InstanceSyntaxError(f"missing field {key!r}")
        if not check(raw[key]):
            raise InstanceSyntaxError(f"field {key!r} has the wrong type")
    if raw["version"] != FORMAT_VERSION:
        raise InstanceSemanticError(f"unsupported version {raw['version']}")
    n, u = raw["n"], raw["u"]
    if n < 1 or not 0 <= u < n:
        raise InstanceSemanticError(f"bad n/u: n={n}, u={u}")
    alpha = parse_fraction(raw["alpha"])
    beta = parse_fraction(raw["beta"])

    links = [frozenset() for _ in range(n)]
    immunised = [False] * n
    seen = set()
    for entry in raw["players"]:
        if not isinstance(entry, dict):
            raise InstanceSyntaxError("each player must be an object")
        pid = entry.get("id")
        if not _is_int(pid):
            raise InstanceSyntaxError("player id must be an integer")
        ends = entry.get("links", [])
        if not isinstance(ends, list) or not all(_is_int(x) for x in ends):
            raise InstanceSyntaxError(f"player {pid}: links must be a list of integers")
        imm = entry.get("immunised")
        if not isinstance(imm, bool):
            raise InstanceSyntaxError(f"player {pid}: immunised must be a boolean")
        if pid == u:
            raise InstanceSemanticError("u must not appear among the players")
        if not 0 <= pid < n:
            raise InstanceSemanticError(f"player id {pid} out of range")
        if pid in seen:
            raise InstanceSemanticError(f"player {pid} listed twice")
        seen.add(pid)
        for w in ends:
            if not 0 <= w < n:
                raise InstanceSemanticError(f"player {pid} links to out-of-range id {w}")
            if w == pid:
                raise InstanceSemanticError(f"player {pid} has a self-link")
        links[pid] = frozenset(ends)
        immunised[pid] = imm
    missing = set(range(n)) - seen - {u}
    if missing:
        raise InstanceSemanticError(f"players missing from file: {sorted(missing)}")
    return Instance(n, u, tuple(links), tuple(immunised), alpha, beta)


def strategy_to_dict(strategy: Strategy) -> dict:
    return {"links": sorted(strategy.links), "immunised": strategy.immunised}


def generate(
    seed: int,
    n: int,
    edge_prob: float,
    immun_prob: float,
    alpha=Fraction(1),
    beta=Fraction(1),
    u: int = 0,
    require_connected: bool = True,
    max_retries: int = 1000,
) -> Instance:
    """Seeded G(n, p) instance; retries until G(empty, .) is connected.

    Each edge is owned by one endpoint other than u, chosen at random when
    neither endpoint is u.
    """
    if n < 1 or not 0 <= u < n:
        raise GenerationError(f"bad size n={n}, u={u}")
    if not (0 <= edge_prob <= 1 and 0 <= immun_prob <= 1):
        raise GenerationError("probabilities must lie in [0, 1]")
    rng = random.Random(seed)
    for _ in range(max_retries):
        links = {v: set() for v in range(n)}
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < edge_prob:
                    if i == u:
                        owner = j
                    elif j == u:
                        owner = i
                    else:
                        owner = rng.choice((i, j))
                    links[owner].add(i + j - owner)
        immunised = [v for v in range(n) if v != u and rng.random() < immun_prob]
        instance = Instance.build(n, u, links, immunised, alpha, beta)
        if instance.is_connected or not require_connected:
            return instance
    raise GenerationError(
        f"no connected instance after {max_retries} draws (seed={seed}, n={n}, p={edge_prob})"
    )

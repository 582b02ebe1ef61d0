"""Exact best responses in the network formation game with attack and immunisation."""

from .dp import BestResponse, best_response
from .errors import (
    DisconnectedError,
    InputError,
    InternalError,
    MismatchError,
    NetshieldError,
    PreconditionError,
    SizeError,
)
from .game import Adversary, Instance, Strategy, all_utilities, player_utility, social_welfare
from .instance_io import generate, parse_instance, serialize_instance
from .meta import decompose
from .oracle import SearchSpace, brute_force_best_response

__version__ = "0.1.0"

__all__ = [
    "Adversary",
    "BestResponse",
    "DisconnectedError",
    "InputError",
    "Instance",
    "InternalError",
    "MismatchError",
    "NetshieldError",
    "PreconditionError",
    "SearchSpace",
    "SizeError",
    "Strategy",
    "all_utilities",
    "best_response",
    "brute_force_best_response",
    "decompose",
    "generate",
    "parse_instance",
    "player_utility",
    "serialize_instance",
    "social_welfare",
]

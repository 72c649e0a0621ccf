import os

from .exceptions import InvalidArgumentError

DEFAULT_MAX_NODES = 10**7
MERGE_TOL = 1e-12


def default_max_nodes():
    """Node cap, overridable through ``SPAMKIT_MAX_NODES``."""
    raw = os.environ.get("SPAMKIT_MAX_NODES")
    if raw is None:
        return DEFAULT_MAX_NODES
    try:
        cap = int(raw)
    except ValueError:
        raise InvalidArgumentError(f"SPAMKIT_MAX_NODES is not an integer: {raw!r}")
    if cap <= 0:
        raise InvalidArgumentError("SPAMKIT_MAX_NODES must be positive")
    return cap


def resolve_max_nodes(max_nodes):
    if max_nodes is None:
        return default_max_nodes()
    if max_nodes <= 0:
        raise InvalidArgumentError("max_nodes must be positive")
    return int(max_nodes)

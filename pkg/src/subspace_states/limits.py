"""Dense-size caps.

Each cap can be overridden through an environment variable, read at call time
so that a running process (or a test) can change it.
"""
import os

from .errors import ResourceLimit

_DEFAULTS = {
    "MAX_DENSE_QUBITS": 20,
    "MAX_UNITARY_QUBITS": 12,
    "MAX_SECTOR_DIM": 10**6,
    "MAX_COMPOUND_DIM": 5000,
    "MAX_LOADER_QUBITS": 14,
    "MAX_COMPLEX_VERTICES": 16,
    "MAX_LAPLACIAN_BLOCK": 5000,
}

ENV_PREFIX = "SUBSPACE_STATES_"


def cap(name: str) -> int:
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None:
        return _DEFAULTS[name]
    return int(raw)


def require(name: str, value: int, what: str) -> None:
    limit = cap(name)
    if value > limit:
        raise ResourceLimit(f"{what} = {value} exceeds {name} = {limit} "
                            f"(override with ${ENV_PREFIX}{name})")

"""Process-wide knobs: arity cap and float comparison tolerance.

Both can be set programmatically or through environment variables
(HOLANT_ARITY_CAP, HOLANT_EPSILON) read once at import.
"""

from __future__ import annotations

import os

from .errors import DomainError

_DEFAULT_ARITY_CAP = 16
_DEFAULT_EPSILON = 1e-9

_arity_cap = int(os.environ.get("HOLANT_ARITY_CAP", _DEFAULT_ARITY_CAP))
_epsilon = float(os.environ.get("HOLANT_EPSILON", _DEFAULT_EPSILON))


def get_arity_cap() -> int:
    return _arity_cap


def set_arity_cap(cap: int) -> None:
    global _arity_cap
    if cap < 1:
        raise DomainError(f"arity cap must be positive, got {cap}")
    _arity_cap = cap


def get_epsilon() -> float:
    return _epsilon


def set_epsilon(eps: float) -> None:
    global _epsilon
    if eps <= 0:
        raise DomainError(f"epsilon must be positive, got {eps}")
    _epsilon = eps

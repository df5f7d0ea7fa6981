"""Dimension records for bipartite and tripartite Hilbert-space splits."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError


def _positive_int(name, value):
    if isinstance(value, bool) or int(value) != value or value < 1:
        raise DomainError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class SubsystemDims:
    """A system ``S`` of dimension ``d_S`` entangled with an environment ``E``."""

    d_S: int
    d_E: int

    def __post_init__(self):
        object.__setattr__(self, "d_S", _positive_int("d_S", self.d_S))
        object.__setattr__(self, "d_E", _positive_int("d_E", self.d_E))

    @property
    def N(self) -> int:
        return self.d_S * self.d_E


@dataclass(frozen=True)
class TripartiteDims:
    """Subsystems ``A`` and ``B`` plus an environment ``E``; ``N = d_A d_B d_E``."""

    d_A: int
    d_B: int
    d_E: int

    def __post_init__(self):
        for name in ("d_A", "d_B", "d_E"):
            object.__setattr__(self, name, _positive_int(name, getattr(self, name)))

    @property
    def N(self) -> int:
        return self.d_A * self.d_B * self.d_E

    @property
    def page_regime(self) -> bool:
        """True when ``d_A d_B <= d_E``, where the factorised forms hold."""
        return self.d_A * self.d_B <= self.d_E

    def swapped(self) -> "TripartiteDims":
        return TripartiteDims(self.d_B, self.d_A, self.d_E)

"""Band handover state machines for the two transceiver architectures.

A single-chain transceiver shares one oscillator and amplifier between the
bands, so it is on V or E but never both. A dual-chain transceiver has a
separate RF chain per band and may run both at once; when one band stays
live during a handover it doubles as a feedback link, which shortens
resynchronisation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

from .errors import CapabilityError, DomainError
from .regulatory import BOTH, Band

DEFAULT_SYNC_DELAY_S = 0.010
DEFAULT_FEEDBACK_FACTOR = 0.5


class Architecture(str, enum.Enum):
    SINGLE_CHAIN = "single"
    DUAL_CHAIN = "dual"

    def allows(self, bands: Iterable[Band]) -> bool:
        return self is Architecture.DUAL_CHAIN or len(frozenset(bands)) <= 1


@dataclass(frozen=True)
class HandoverCostModel:
    sync_delay_s: float = DEFAULT_SYNC_DELAY_S
    feedback_assisted_factor: float = DEFAULT_FEEDBACK_FACTOR

    def __post_init__(self):
        if self.sync_delay_s < 0:
            raise DomainError("sync delay must be nonnegative")
        if not 0 < self.feedback_assisted_factor <= 1:
            raise DomainError("feedback factor must be in (0, 1]")


@dataclass(frozen=True)
class HandoverState:
    """Either settled on ``bands`` (empty means idle) or switching to ``target``."""

    bands: frozenset = frozenset()
    target: frozenset | None = None
    remaining_s: float = 0.0

    @property
    def switching(self) -> bool:
        return self.target is not None

    @property
    def name(self) -> str:
        if self.switching:
            return "Switching"
        if not self.bands:
            return "Idle"
        if self.bands == BOTH:
            return "ActiveDual"
        return f"Active{next(iter(self.bands)).value}"

    def __str__(self):
        if self.switching:
            tgt = "".join(sorted(b.value for b in self.target))
            return f"Switching({tgt}, {self.remaining_s * 1e3:g} ms)"
        return self.name


IDLE = HandoverState()


def active(*bands: Band) -> HandoverState:
    return HandoverState(bands=frozenset(bands))


ACTIVE_V = active(Band.V)
ACTIVE_E = active(Band.E)
ACTIVE_DUAL = active(Band.V, Band.E)


def switching(target: Iterable[Band], remaining_s: float) -> HandoverState:
    return HandoverState(target=frozenset(target), remaining_s=remaining_s)


def request_bands(
    fsm: HandoverState,
    arch: Architecture,
    target: Iterable[Band],
    cost: HandoverCostModel = HandoverCostModel(),
) -> HandoverState:
    target = frozenset(target)
    if not target:
        raise DomainError("target band set must be nonempty")
    if not target <= BOTH:
        raise DomainError(f"unknown bands in target {set(target)}")
    if not arch.allows(target):
        raise CapabilityError("single-chain transceiver cannot run V and E at once")

    if fsm.switching:
        if fsm.target == target:
            return fsm
        live = frozenset()
    else:
        if fsm.bands == target:
            return fsm
        live = fsm.bands

    delay = cost.sync_delay_s
    if arch is Architecture.DUAL_CHAIN and live & target:
        delay *= cost.feedback_assisted_factor
    if delay <= 0:
        return HandoverState(bands=target)
    return switching(target, delay)


def advance(fsm: HandoverState, dt: float) -> HandoverState:
    if dt < 0:
        raise DomainError("dt must be nonnegative")
    if not fsm.switching:
        return fsm
    remaining = fsm.remaining_s - dt
    if remaining <= 0:
        return HandoverState(bands=fsm.target)
    return switching(fsm.target, remaining)


def transmittable_bands(fsm: HandoverState) -> frozenset:
    return frozenset() if fsm.switching else fsm.bands


def settle(fsm: HandoverState) -> HandoverState:
    """Advance a switching machine to the end of its countdown."""
    return advance(fsm, fsm.remaining_s) if fsm.switching else fsm

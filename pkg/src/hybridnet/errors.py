"""Exception types shared across the simulator."""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class CapabilityError(ValueError):
    """A request exceeds what a transceiver architecture can do."""


class ScenarioError(ValueError):
    """Malformed scenario text. Carries the offending line and key when known."""

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class ValidationFailed(ValueError):
    """A scenario parsed cleanly but breaks a regulatory rule."""

    def __init__(self, reports):
        self.reports = reports
        # "line N, key K: message" strings, filled in when parsed from a file
        self.locations: list[str] = []
        lines = [line for r in reports for line in r.lines() if not line.startswith("waived")]
        super().__init__("; ".join(lines) or "regulatory validation failed")

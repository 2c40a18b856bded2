"""Pass/warn/fail reporting shared by the topology, gain, and trajectory checks."""
from __future__ import annotations

from dataclasses import dataclass, field

PASS = "pass"
WARN = "warn"
FAIL = "fail"


@dataclass(frozen=True)
class CheckItem:
    name: str
    status: str  # one of PASS, WARN, FAIL
    detail: str = ""


@dataclass
class ValidationReport:
    """Ordered collection of named check results."""

    items: list[CheckItem] = field(default_factory=list)

    def add(self, name: str, status: str, detail: str = "") -> None:
        if status not in (PASS, WARN, FAIL):
            raise ValueError(f"unknown status {status!r}")
        self.items.append(CheckItem(name, status, detail))

    def add_pass(self, name: str, detail: str = "") -> None:
        self.add(name, PASS, detail)

    def add_warn(self, name: str, detail: str = "") -> None:
        self.add(name, WARN, detail)

    def add_fail(self, name: str, detail: str = "") -> None:
        self.add(name, FAIL, detail)

    def extend(self, other: "ValidationReport") -> None:
        self.items.extend(other.items)

    @property
    def failures(self) -> list[CheckItem]:
        return [it for it in self.items if it.status == FAIL]

    @property
    def warnings(self) -> list[CheckItem]:
        return [it for it in self.items if it.status == WARN]

    @property
    def ok(self) -> bool:
        """True when no check failed (warnings allowed)."""
        return not self.failures

    def format(self) -> str:
        lines = []
        for it in self.items:
            tag = it.status.upper()
            lines.append(f"[{tag}] {it.name}" + (f": {it.detail}" if it.detail else ""))
        return "\n".join(lines)

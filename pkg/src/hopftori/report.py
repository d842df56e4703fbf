"""Plain-text verification reports made of named tolerance checks."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tol: float
    identity: str = ""

    @property
    def passed(self) -> bool:
        # NaN never passes
        return bool(self.value <= self.tol)


@dataclass
class Report:
    """Ordered key-value metadata plus pass/fail checks.

    ``to_text`` renders ``key=value`` lines and is byte-stable for identical
    inputs; ``to_json`` carries the same content for machines.
    """

    title: str
    meta: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)

    def add(self, name, value, tol, identity=""):
        self.checks.append(Check(name, float(value), float(tol), identity))
        return self

    def extend(self, other: "Report", prefix: str = ""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.value, c.tol, c.identity))
        return self

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_text(self) -> str:
        lines = [f"[{self.title}]"]
        for k, v in self.meta.items():
            lines.append(f"{k}={_fmt(v)}")
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            ident = f"  # {c.identity}" if c.identity else ""
            lines.append(f"{c.name}={c.value:.6e} tol={c.tol:.1e} {status}{ident}")
        lines.append(f"status={'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(
            {
                "title": self.title,
                "meta": {k: _plain(v) for k, v in self.meta.items()},
                "checks": [
                    {"name": c.name, "value": c.value, "tol": c.tol, "passed": c.passed, "identity": c.identity}
                    for c in self.checks
                ],
                "passed": self.passed,
            },
            indent=2,
            sort_keys=False,
        )


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _plain(v):
    if isinstance(v, (int, float, str, bool)) or v is None:
        return v
    return str(v)

"""Check results and machine-readable reports."""

import json
from dataclasses import dataclass, field

PASS, FAIL, ERROR = "pass", "fail", "error"


@dataclass
class Check:
    check: str
    status: str
    witness: object = None

    @property
    def ok(self):
        return self.status == PASS

    def to_dict(self):
        out = {"check": self.check, "status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)

    def add(self, name, ok, witness=None, status=None):
        self.checks.append(Check(name, status or (PASS if ok else FAIL), witness))

    @property
    def passed(self):
        return all(c.ok for c in self.checks)

    def get(self, name):
        for c in self.checks:
            if c.check == name:
                return c
        raise KeyError(name)

    def failures(self):
        return [c.check for c in self.checks if c.status == FAIL]

    def __iter__(self):
        return iter(self.checks)


@dataclass
class Report:
    command: str
    fixture: str
    checks: list = field(default_factory=list)
    wall_time: float = 0.0
    data: dict = field(default_factory=dict)

    def add(self, name, ok, witness=None, status=None):
        self.checks.append(Check(name, status or (PASS if ok else FAIL), witness))

    def extend(self, checks, prefix=""):
        for c in checks:
            self.checks.append(Check(prefix + c.check, c.status, c.witness))

    @property
    def passed(self):
        return all(c.ok for c in self.checks)

    def to_dict(self, with_time=True):
        out = {
            "command": self.command,
            "fixture": self.fixture,
            "checks": [c.to_dict() for c in self.checks],
            "passed": self.passed,
        }
        if self.data:
            out["data"] = self.data
        if with_time:
            out["wall_time"] = round(self.wall_time, 6)
        return out

    def to_json(self, with_time=True):
        return json.dumps(self.to_dict(with_time), indent=2, sort_keys=True)

    def render_text(self):
        lines = [f"{self.command} {self.fixture}"]
        for c in self.checks:
            line = f"  [{c.status.upper():5}] {c.check}"
            if c.witness is not None and c.status != PASS:
                line += f"  -- {c.witness}"
            lines.append(line)
        for key, value in self.data.items():
            lines.append(f"  {key}: {value}")
        verdict = "all checks passed" if self.passed else "SOME CHECKS FAILED"
        lines.append(f"  {verdict} ({self.wall_time:.3f}s)")
        return "\n".join(lines)

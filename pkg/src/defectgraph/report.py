"""Structured validation reports: one row per invariant, with the maximum
residual observed.  Validators return these instead of raising, so malformed
inputs produce a readable table rather than a stack trace."""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = ["Check", "Report"]


@dataclass
class Check:
    name: str
    passed: bool
    residual: float = 0.0
    detail: str = ""

    def to_json(self):
        return {"name": self.name, "passed": self.passed,
                "residual": self.residual, "detail": self.detail}


@dataclass
class Report:
    subject: str
    checks: list = field(default_factory=list)
    seed: int | None = None

    def add(self, name, passed, residual=0.0, detail=""):
        self.checks.append(Check(name, bool(passed), float(residual), detail))

    def add_residual(self, name, residual, tol, detail=""):
        self.add(name, residual <= tol, residual, detail)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def max_residual(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)

    def to_json(self):
        out = {"subject": self.subject, "passed": self.passed,
               "checks": [c.to_json() for c in self.checks]}
        if self.seed is not None:
            out["seed"] = self.seed
        return out

    def summary(self) -> str:
        lines = [f"[{'PASS' if self.passed else 'FAIL'}] {self.subject}"]
        for c in self.checks:
            mark = "ok  " if c.passed else "FAIL"
            lines.append(f"  {mark} {c.name}  residual={c.residual:.3g} {c.detail}")
        return "\n".join(lines)

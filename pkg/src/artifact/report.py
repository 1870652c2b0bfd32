"""Deterministic, plain-text reports shared by every checker."""

from __future__ import annotations

from fractions import Fraction

MAX_WITNESSES = 20


def _fmt(value) -> str:
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    return str(value)


class Check:
    def __init__(self, name: str):
        self.name = name
        self.total = 0
        self.failures: list[tuple] = []
        self.notes: list[str] = []

    def record(self, ok: bool, witness=None):
        self.total += 1
        if not ok:
            self.failures.append(witness)

    def fail(self, witness):
        self.record(False, witness)

    @property
    def ok(self) -> bool:
        return not self.failures


class Report:
    """Named checks, each counting how many items were examined and which failed."""

    def __init__(self, title: str):
        self.title = title
        self.checks: dict[str, Check] = {}
        self.info: list[str] = []

    def check(self, name: str) -> Check:
        if name not in self.checks:
            self.checks[name] = Check(name)
        return self.checks[name]

    def record(self, name: str, ok: bool, witness=None):
        self.check(name).record(ok, witness)

    def note(self, text: str):
        self.info.append(text)

    def merge(self, other: "Report", prefix: str = ""):
        for name, chk in other.checks.items():
            mine = self.check(prefix + name)
            mine.total += chk.total
            mine.failures.extend(chk.failures)
            mine.notes.extend(chk.notes)
        self.info.extend(other.info)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks.values())

    @property
    def nonzero(self) -> int:
        return sum(len(c.failures) for c in self.checks.values())

    @property
    def total(self) -> int:
        return sum(c.total for c in self.checks.values())

    def failed_names(self) -> list[str]:
        return [n for n, c in self.checks.items() if not c.ok]

    def render(self) -> str:
        lines = [f"== {self.title}"]
        for text in self.info:
            lines.append(f"info: {text}")
        for name in sorted(self.checks):
            chk = self.checks[name]
            status = "PASS" if chk.ok else "FAIL"
            lines.append(f"{status} {name}: {len(chk.failures)} of {chk.total} nonzero")
            for w in chk.failures[:MAX_WITNESSES]:
                lines.append(f"  at {_render_witness(w)}")
            if len(chk.failures) > MAX_WITNESSES:
                lines.append(f"  ... {len(chk.failures) - MAX_WITNESSES} more")
            for text in chk.notes:
                lines.append(f"  note: {text}")
        lines.append(f"residuals: {self.nonzero} of {self.total} nonzero")
        return "\n".join(lines)

    def __str__(self):
        return self.render()


def _render_witness(w) -> str:
    if isinstance(w, dict):
        return ", ".join(f"{k}={_render_witness(v)}" for k, v in w.items())
    if isinstance(w, (tuple, list)):
        return "(" + ", ".join(_render_witness(v) for v in w) + ")"
    return _fmt(w)

"""Validation reports and the exception hierarchy shared across the package.

Structural problems (wrong shapes, out-of-range indices, mismatched
constituents) raise :class:`StructuralError` immediately.  Semantic checks
(group axioms, cocycle conditions, morphism compatibility) never raise from
the ``*_verify`` functions; they return a :class:`ValidationReport` carrying
one entry per failed law together with a concrete witness tuple, so a caller
can see *which* axiom broke and *where*.
"""

from __future__ import annotations

from typing import Any


class StructuralError(ValueError):
    """Input data is malformed: shapes, ranges or constituents do not line up."""


class InvariantViolation(ValueError):
    """An operation's precondition (a verified structure) does not hold."""


class ResourceBudgetError(RuntimeError):
    """An exhaustive search exceeded the configured candidate budget."""


class UnsupportedOperation(StructuralError):
    """The requested operation is not defined for this structure or level."""


class Failure:
    """A single broken law: the law's name plus the witness that breaks it."""

    __slots__ = ("law", "witness", "detail")

    def __init__(self, law: str, witness: tuple, detail: str = ""):
        self.law = law
        self.witness = witness
        self.detail = detail

    def __repr__(self) -> str:
        base = f"Failure({self.law!r}, witness={self.witness!r}"
        if self.detail:
            base += f", detail={self.detail!r}"
        return base + ")"

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Failure)
            and (self.law, self.witness, self.detail)
            == (other.law, other.witness, other.detail)
        )


class ValidationReport:
    """Outcome of a semantic verification.

    ``valid`` is True when no law failed.  ``failures`` lists every violated
    law with a witness (first witness per law is enough for diagnosis, but we
    record all of them up to ``max_failures`` so reports stay bounded on
    badly broken inputs).  ``notes`` carries informational key/value pairs,
    e.g. which formula variant a verification ran under.
    """

    max_failures = 32

    def __init__(self, subject: str):
        self.subject = subject
        self.failures: list[Failure] = []
        self.notes: dict[str, Any] = {}
        self._truncated = False

    @property
    def valid(self) -> bool:
        return not self.failures

    def fail(self, law: str, witness: tuple, detail: str = "") -> None:
        if len(self.failures) >= self.max_failures:
            self._truncated = True
            return
        self.failures.append(Failure(law, witness, detail))

    def merge(self, other: "ValidationReport", prefix: str = "") -> None:
        """Fold a constituent's report into this one, prefixing law names."""
        for f in other.failures:
            self.fail(prefix + f.law if prefix else f.law, f.witness, f.detail)
        for key, value in other.notes.items():
            self.notes.setdefault(prefix + key if prefix else key, value)

    def require_valid(self) -> "ValidationReport":
        """Raise InvariantViolation when invalid; convenience for operations."""
        if not self.valid:
            first = self.failures[0]
            raise InvariantViolation(
                f"{self.subject}: {first.law} fails at witness {first.witness}"
                + (f" ({first.detail})" if first.detail else "")
            )
        return self

    def lines(self) -> list[str]:
        """Deterministic ``KEY: value`` lines used by the CLI reports."""
        out = [f"{self.subject}: {'valid' if self.valid else 'invalid'}"]
        for f in self.failures:
            line = f"violation: {f.law} at {','.join(map(str, f.witness))}"
            if f.detail:
                line += f" [{f.detail}]"
            out.append(line)
        if self._truncated:
            out.append("violation: further failures truncated")
        for key in sorted(self.notes):
            out.append(f"note: {key}={self.notes[key]}")
        return out

    def __repr__(self) -> str:
        state = "valid" if self.valid else f"{len(self.failures)} failures"
        return f"<ValidationReport {self.subject}: {state}>"

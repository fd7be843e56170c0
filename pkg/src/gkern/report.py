"""Certification verdicts and their plain-text reports."""

from dataclasses import dataclass, field

CERTIFIED_PD = "certified-PD"
CERTIFIED_NOT_PD = "certified-not-PD"
INCONCLUSIVE = "inconclusive"


@dataclass
class CertReport:
    """Outcome of a positive-definiteness certification.

    Attributes
    ----------
    verdict : str
        One of ``certified-PD``, ``certified-not-PD``, ``inconclusive``.
    witness : object
        Location of the most negative value: a dual frequency, an expansion
        degree, or a ``(degree, frequency)`` pair, depending on the test.
    min_value : float
        Most negative real transform/coefficient value encountered.
    tolerances : dict
        Every tolerance the verdict depended on, echoed for auditability.
    truncation : int or None
        Expansion truncation used, when the test expands in a basis.
    tail_estimate : float or None
        Estimated mass beyond the truncation.
    detail : str
        Free-form diagnostic (boundary guards tripped, symmetry defects, ...).
    """

    verdict: str
    witness: object = None
    min_value: float = 0.0
    tolerances: dict = field(default_factory=dict)
    truncation: int | None = None
    tail_estimate: float | None = None
    detail: str = ""

    @property
    def certified(self) -> bool:
        return self.verdict == CERTIFIED_PD

    def to_text(self) -> str:
        """Render as a small key/value report, one field per line."""
        lines = [f"verdict: {self.verdict}"]
        if self.witness is not None:
            lines.append(f"witness: {self.witness}")
        lines.append(f"min_value: {self.min_value:.17g}")
        if self.truncation is not None:
            lines.append(f"truncation: {self.truncation}")
        if self.tail_estimate is not None:
            lines.append(f"tail_estimate: {self.tail_estimate:.17g}")
        for name in sorted(self.tolerances):
            lines.append(f"tolerance.{name}: {self.tolerances[name]:.17g}")
        if self.detail:
            lines.append(f"detail: {self.detail}")
        return "\n".join(lines) + "\n"

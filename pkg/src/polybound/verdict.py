"""Three-valued verdicts shared by every checker."""

from dataclasses import dataclass, field

VERIFIED = "verified"
COUNTEREXAMPLE = "counterexample"
REPORT = "report"

# scope of a positive verdict
EXHAUSTIVE = "exhaustive"
WINDOW = "window"
STRUCTURAL = "structural"


@dataclass(frozen=True)
class Verdict:
    """Outcome of a check on a window.

    ``scope`` is ``exhaustive`` (a proof on a finite handle), ``structural``
    (a proof supplied by a builtin oracle) or ``window`` (no violation found
    among the first N elements, which is not a proof).
    """

    status: str
    scope: str = WINDOW
    witness: object = None
    info: dict = field(default_factory=dict)

    @property
    def verified(self):
        return self.status == VERIFIED

    @property
    def exhaustive(self):
        return self.status == VERIFIED and self.scope == EXHAUSTIVE

    def __bool__(self):
        return self.verified

    def as_dict(self):
        d = {"status": self.status, "scope": self.scope if self.status == VERIFIED else None,
             "witness": self.witness}
        d.update(self.info)
        return d


def verified(scope, **info):
    return Verdict(VERIFIED, scope, None, info)


def counterexample(witness, **info):
    return Verdict(COUNTEREXAMPLE, WINDOW, witness, info)


def report(**info):
    return Verdict(REPORT, WINDOW, None, info)

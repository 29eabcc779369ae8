from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Verdict:
    """Outcome of a check. Truthy iff the check passed.

    ``witness`` is populated on failure with whatever is needed to reproduce
    the violation; ``info`` carries diagnostic numbers for passing checks too.
    """

    ok: bool
    witness: dict[str, Any] | None = None
    info: dict[str, Any] = field(default_factory=dict)

    def __bool__(self):
        return bool(self.ok)

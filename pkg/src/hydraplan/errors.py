from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Issue:
    """One problem found in input data. ``where`` is the full index path."""

    code: str
    message: str
    where: tuple = ()
    source: str = ""

    def as_dict(self) -> dict:
        return {"code": self.code, "message": self.message,
                "where": [str(w) for w in self.where], "source": self.source}

    def __str__(self) -> str:
        loc = f" at {self.where}" if self.where else ""
        src = f" [{self.source}]" if self.source else ""
        return f"{self.code}: {self.message}{loc}{src}"


class DataError(Exception):
    """Input data could not be loaded; carries every issue found."""

    def __init__(self, issues: list[Issue]):
        self.issues = list(issues)
        head = "; ".join(str(i) for i in self.issues[:5])
        more = f" (+{len(self.issues) - 5} more)" if len(self.issues) > 5 else ""
        super().__init__(head + more)

    @property
    def codes(self) -> set[str]:
        return {i.code for i in self.issues}

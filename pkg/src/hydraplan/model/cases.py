"""Green-hydrogen policy cases."""

from __future__ import annotations

from dataclasses import dataclass

# name -> (additionality, spatial, temporal, exemption90)
PRESETS: dict[str, tuple[bool, bool, bool, bool]] = {
    "Base": (False, False, False, False),
    "AST90": (True, True, True, True),
    "ST90": (False, True, True, True),
    "AT90": (True, False, True, True),
    "AS90": (True, True, False, True),
    "AST": (True, True, True, False),
}


class CaseError(ValueError):
    code = "CASE_INCONSISTENT"


@dataclass(frozen=True)
class CaseConfig:
    additionality: bool = False
    spatial: bool = False
    temporal: bool = False
    exemption90: bool = False
    custom: bool = False
    label: str | None = None

    def __post_init__(self):
        if not self.custom and self.flags not in PRESETS.values():
            raise CaseError(f"flags {self.flags} match no preset case; mark the case custom to use them")

    @classmethod
    def preset(cls, name: str) -> "CaseConfig":
        try:
            a, s, t, e = PRESETS[name]
        except KeyError:
            raise CaseError(f"unknown case {name!r}; presets are {', '.join(PRESETS)}") from None
        return cls(a, s, t, e)

    @property
    def flags(self) -> tuple[bool, bool, bool, bool]:
        return (self.additionality, self.spatial, self.temporal, self.exemption90)

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        for name, flags in PRESETS.items():
            if flags == self.flags:
                return name if not self.custom else f"custom-{name}"
        letters = "".join(ch for ch, on in zip("AST", self.flags[:3]) if on)
        return "custom-" + (letters or "none") + ("90" if self.exemption90 else "")

    @property
    def green(self) -> bool:
        """Whether any of the three production rules is active."""
        return self.additionality or self.spatial or self.temporal

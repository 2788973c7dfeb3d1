"""Unit strings used in input headers and their conversion to internal units.

Internal units: MW / MWh for power, ton/h and ton for H2 and NG, tCO2 for
emissions, EUR for money, hours for time.  A unit string is either an atom
(``MWh``), a ratio (``EUR/MWh``) or a ratio with a parenthesised
denominator (``EUR/(ton/h)``).
"""

from __future__ import annotations

from collections import Counter

from .dimensions import CO2, H2, NG, POWER

# atom -> (base dimension, factor to internal unit)
_ATOMS: dict[str, tuple[str, float]] = {
    "W": ("power", 1e-6), "kW": ("power", 1e-3), "MW": ("power", 1.0),
    "GW": ("power", 1e3), "TW": ("power", 1e6),
    "kWh": ("energy", 1e-3), "MWh": ("energy", 1.0), "GWh": ("energy", 1e3),
    "TWh": ("energy", 1e6),
    "kg": ("mass", 1e-3), "t": ("mass", 1.0), "ton": ("mass", 1.0), "tonne": ("mass", 1.0),
    "kt": ("mass", 1e3), "Mt": ("mass", 1e6),
    "EUR": ("money", 1.0), "kEUR": ("money", 1e3), "MEUR": ("money", 1e6), "bnEUR": ("money", 1e9),
    "kgCO2": ("co2", 1e-3), "tCO2": ("co2", 1.0), "ktCO2": ("co2", 1e3), "MtCO2": ("co2", 1e6),
    "h": ("time", 1.0), "yr": ("time", 8760.0), "year": ("time", 8760.0),
    "1": ("", 1.0), "-": ("", 1.0), "fraction": ("", 1.0), "%": ("", 0.01),
    "periods": ("period", 1.0),
}

# (rate unit, amount unit) per commodity
COMMODITY_UNITS = {
    POWER: ("MW", "MWh"),
    H2: ("ton/h", "ton"),
    NG: ("ton/h", "ton"),
    CO2: ("tCO2/h", "tCO2"),
}
_DEFAULT_UNITS = ("ton/h", "ton")


class UnitError(ValueError):
    pass


def rate_unit(commodity: str) -> str:
    return COMMODITY_UNITS.get(commodity, _DEFAULT_UNITS)[0]


def amount_unit(commodity: str) -> str:
    return COMMODITY_UNITS.get(commodity, _DEFAULT_UNITS)[1]


def _term(text: str) -> tuple[Counter, float]:
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        return parse_unit(text[1:-1])
    if text not in _ATOMS:
        raise UnitError(f"unknown unit {text!r}")
    dim, factor = _ATOMS[text]
    return (Counter({dim: 1}) if dim else Counter()), factor


def parse_unit(text: str) -> tuple[Counter, float]:
    """Return ``(dimension exponents, factor to internal units)``."""
    text = text.strip()
    depth = 0
    for k, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "/" and depth == 0:
            nd, nf = _term(text[:k])
            dd, df = _term(text[k + 1:])
            dims = Counter(nd)
            dims.subtract(dd)
            return Counter({k2: v for k2, v in dims.items() if v}), nf / df
    return _term(text)


def conversion_factor(given: str, expected: str) -> float:
    """Multiplier taking a value in ``given`` units to ``expected`` units.

    Raises :class:`UnitError` when the two units measure different things.
    """
    gd, gf = parse_unit(given)
    ed, ef = parse_unit(expected)
    if gd != ed:
        raise UnitError(f"unit {given!r} is not compatible with {expected!r}")
    return gf / ef

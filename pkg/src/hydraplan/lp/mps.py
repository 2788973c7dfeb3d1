"""Free-format MPS writer and reader.

Layout written by :func:`to_mps`::

    NAME <name>
    ROWS
     N  OBJ
     L  <row>          (E / G likewise)
    COLUMNS
        <col>  <row>  <value>
    RHS
        RHS  <row>  <value>
    BOUNDS
     UP BND  <col>  <value>
    ENDATA

Every variable appears in COLUMNS at least once (with an ``OBJ 0`` entry when
it has no nonzero), so variables without coefficients survive a round trip.
Numbers use 17 significant digits.  A constant objective term is written as
the negated RHS of the objective row, the usual solver convention.
"""

from __future__ import annotations

import math

from .program import EQ, GE, LE, LinearProgram, LPError

OBJ_ROW = "OBJ"
_SENSE_CODE = {LE: "L", EQ: "E", GE: "G"}
_CODE_SENSE = {v: k for k, v in _SENSE_CODE.items()}


class MPSError(LPError):
    code = "PARSE_ERROR"

    def __init__(self, message: str, line: int | None = None, code: str | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message, code)


def _num(v: float) -> str:
    if v == math.inf:
        return "Inf"
    if v == -math.inf:
        return "-Inf"
    return format(v, ".17g")


def _check_name(name: str) -> None:
    if not name.isascii():
        raise MPSError(f"name {name!r} is not ASCII", code="NON_ASCII_NAME")
    if not name or len(name) > 255 or any(ch.isspace() for ch in name):
        raise MPSError(f"name {name!r} cannot be written in free MPS", code="NON_ASCII_NAME")


def to_mps(lp: LinearProgram) -> str:
    _check_name(lp.name)
    for v in lp.variables:
        _check_name(v.name)
    for c in lp.constraints:
        _check_name(c.name)
        if c.name == OBJ_ROW:
            raise MPSError(f"row name {OBJ_ROW!r} is reserved for the objective", code="NON_ASCII_NAME")

    by_column: list[list[tuple[str, float]]] = [[] for _ in lp.variables]
    for con in lp.constraints:
        for j, a in con.coeffs.items():
            by_column[j].append((con.name, a))

    out = [f"NAME {lp.name}", "ROWS", f" N  {OBJ_ROW}"]
    out += [f" {_SENSE_CODE[c.sense]}  {c.name}" for c in lp.constraints]
    out.append("COLUMNS")
    for j, v in enumerate(lp.variables):
        entries = by_column[j]
        if v.obj != 0.0 or not entries:
            out.append(f"    {v.name}  {OBJ_ROW}  {_num(v.obj)}")
        out += [f"    {v.name}  {row}  {_num(a)}" for row, a in entries]
    out.append("RHS")
    if lp.obj_constant != 0.0:
        out.append(f"    RHS  {OBJ_ROW}  {_num(-lp.obj_constant)}")
    out += [f"    RHS  {c.name}  {_num(c.rhs)}" for c in lp.constraints if c.rhs != 0.0]
    out.append("BOUNDS")
    for v in lp.variables:
        out += [f" {kind} BND  {v.name}" + (f"  {_num(val)}" if val is not None else "")
                for kind, val in _bound_records(v.lower, v.upper)]
    out.append("ENDATA")
    return "\n".join(out) + "\n"


def _bound_records(lower: float, upper: float):
    if lower == upper:
        return [("FX", lower)]
    recs = []
    if lower == -math.inf and upper == math.inf:
        return [("FR", None)]
    if lower == -math.inf:
        recs.append(("MI", None))
    elif lower != 0.0:
        recs.append(("LO", lower))
    if upper != math.inf:
        recs.append(("UP", upper))
    return recs


def _parse_float(tok: str, lineno: int) -> float:
    low = tok.lower()
    if low in ("inf", "+inf", "infinity", "+infinity", "1e+30", "1e30"):
        return math.inf
    if low in ("-inf", "-infinity", "-1e+30", "-1e30"):
        return -math.inf
    try:
        return float(tok)
    except ValueError:
        raise MPSError(f"bad number {tok!r}", lineno) from None


def parse_mps(text: str) -> LinearProgram:
    """Read free-format MPS (N/L/E/G rows, COLUMNS, RHS, BOUNDS) into a LinearProgram."""
    lp: LinearProgram | None = None
    name = "model"
    section = None
    obj_row = None
    row_sense: dict[str, str] = {}
    row_order: list[str] = []
    row_coeffs: dict[str, dict[int, float]] = {}
    rhs: dict[str, float] = {}
    col_index: dict[str, int] = {}
    col_names: list[str] = []
    obj: list[float] = []
    lower: list[float] = []
    upper: list[float] = []
    obj_constant = 0.0
    ended = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not line.strip() or line.lstrip().startswith("*"):
            continue
        toks = line.split()
        if not raw[0].isspace():
            head = toks[0].upper()
            if head == "NAME":
                name = toks[1] if len(toks) > 1 else "model"
                section = "NAME"
            elif head in ("ROWS", "COLUMNS", "RHS", "BOUNDS", "RANGES"):
                if head == "RANGES":
                    raise MPSError("RANGES section is not supported", lineno)
                section = head
            elif head == "ENDATA":
                ended = True
                break
            else:
                raise MPSError(f"unknown section {toks[0]!r}", lineno)
            continue

        if section == "ROWS":
            if len(toks) != 2:
                raise MPSError("ROWS entry needs a type and a name", lineno)
            kind, rname = toks[0].upper(), toks[1]
            if kind == "N":
                if obj_row is None:
                    obj_row = rname
                continue
            if kind not in _CODE_SENSE:
                raise MPSError(f"unknown row type {kind!r}", lineno)
            if rname in row_sense:
                raise MPSError(f"duplicate row {rname!r}", lineno)
            row_sense[rname] = _CODE_SENSE[kind]
            row_order.append(rname)
            row_coeffs[rname] = {}
        elif section == "COLUMNS":
            if "'MARKER'" in toks:
                raise MPSError("integer markers are not supported", lineno)
            if len(toks) not in (3, 5):
                raise MPSError("COLUMNS entry needs column, row, value [, row, value]", lineno)
            cname = toks[0]
            if cname not in col_index:
                col_index[cname] = len(col_names)
                col_names.append(cname)
                obj.append(0.0)
                lower.append(0.0)
                upper.append(math.inf)
            j = col_index[cname]
            for rname, val in zip(toks[1::2], toks[2::2]):
                value = _parse_float(val, lineno)
                if rname == obj_row:
                    obj[j] += value
                elif rname in row_coeffs:
                    if value != 0.0:
                        row_coeffs[rname][j] = row_coeffs[rname].get(j, 0.0) + value
                else:
                    raise MPSError(f"unknown row {rname!r}", lineno)
        elif section == "RHS":
            if len(toks) not in (3, 5):
                raise MPSError("RHS entry needs set, row, value [, row, value]", lineno)
            for rname, val in zip(toks[1::2], toks[2::2]):
                value = _parse_float(val, lineno)
                if rname == obj_row:
                    obj_constant = -value
                elif rname in row_sense:
                    rhs[rname] = value
                else:
                    raise MPSError(f"unknown row {rname!r}", lineno)
        elif section == "BOUNDS":
            if len(toks) < 3:
                raise MPSError("BOUNDS entry too short", lineno)
            kind, cname = toks[0].upper(), toks[2]
            if cname not in col_index:
                raise MPSError(f"unknown column {cname!r}", lineno)
            j = col_index[cname]
            needs_value = kind in ("UP", "LO", "FX")
            if needs_value and len(toks) != 4:
                raise MPSError(f"{kind} bound needs a value", lineno)
            if kind == "UP":
                upper[j] = _parse_float(toks[3], lineno)
            elif kind == "LO":
                lower[j] = _parse_float(toks[3], lineno)
            elif kind == "FX":
                lower[j] = upper[j] = _parse_float(toks[3], lineno)
            elif kind == "FR":
                lower[j], upper[j] = -math.inf, math.inf
            elif kind == "MI":
                lower[j] = -math.inf
            elif kind == "PL":
                upper[j] = math.inf
            else:
                raise MPSError(f"unsupported bound type {kind!r}", lineno)
        else:
            raise MPSError("data line outside of a section", lineno)

    if not ended:
        raise MPSError("missing ENDATA", None)
    lp = LinearProgram(name)
    for j, cname in enumerate(col_names):
        lp.add_variable(cname, lower[j], upper[j], obj[j])
    for rname in row_order:
        lp.add_constraint(rname, row_coeffs[rname], row_sense[rname], rhs.get(rname, 0.0))
    lp.obj_constant = obj_constant
    return lp


def write_mps(lp: LinearProgram, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(to_mps(lp))


def read_mps(path) -> LinearProgram:
    with open(path, encoding="ascii") as fh:
        return parse_mps(fh.read())

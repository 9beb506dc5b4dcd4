"""MPS subset reader and writer.

Covers the sections the desk-scale study instances need: NAME, ROWS,
COLUMNS (with INTORG/INTEND markers), RHS, RANGES, BOUNDS, ENDATA.
Anything else raises, never skips silently.  All numeric fields are
parsed exactly; as an extension, "p/q" literals are accepted and are
emitted by the writer whenever a value has no terminating decimal.

Two conventions from the classic format are honored and worth knowing:

* MPS objectives are minimization.  The in-memory model maximizes, so
  reading negates the objective row and writing negates it back; a file
  round trips to an identical instance.
* Integer variables (inside markers) with no BOUNDS entry at all get
  the historic default bounds [0, 1].  Any explicit bound entry for the
  variable switches the default upper bound to +infinity before the
  entry is applied.  Continuous variables default to [0, +infinity),
  and an UP bound with a negative value drops the default lower bound
  of such a variable to -infinity.

G and E rows are rewritten to <= form on ingest (E as a pair), RANGES
turn a row into the usual interval and arrive as the extra <= row.
"""

from __future__ import annotations

from typing import Optional

from .model import MipInstance, build_instance
from .rational import parse_rational, rat, rat_str


class MpsParseError(ValueError):
    def __init__(self, message: str, line_no: Optional[int] = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


_SUPPORTED = {"NAME", "ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS", "ENDATA"}


def read_instance_mps(text: str, integer_default_upper=rat(1)) -> MipInstance:
    """Parse an MPS document into an instance.

    `integer_default_upper` is the historic bound applied to integer
    variables that appear in no BOUNDS entry; pass None to default them
    to +infinity instead.
    """
    name = ""
    section = None
    obj_row: Optional[str] = None
    row_types: dict[str, str] = {}
    row_order: list[str] = []
    columns: dict[str, dict[str, object]] = {}
    col_order: list[str] = []
    integer_cols: set[str] = set()
    obj_coeffs: dict[str, object] = {}
    rhs: dict[str, object] = {}
    ranges: dict[str, object] = {}
    bound_entries: list[tuple[str, str, Optional[object], int]] = []
    in_integer_block = False
    saw_endata = False

    def number(token: str, line_no: int):
        try:
            return parse_rational(token)
        except ValueError as exc:
            raise MpsParseError(str(exc), line_no) from exc

    for line_no, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("*"):
            continue
        if saw_endata:
            raise MpsParseError("content after ENDATA", line_no)
        if not raw[0].isspace():
            fields = raw.split()
            keyword = fields[0].upper()
            if keyword not in _SUPPORTED:
                raise MpsParseError(f"unsupported section {fields[0]!r}", line_no)
            section = keyword
            if keyword == "NAME":
                name = fields[1] if len(fields) > 1 else ""
            if keyword == "ENDATA":
                saw_endata = True
            continue

        fields = raw.split()
        if section == "ROWS":
            if len(fields) != 2:
                raise MpsParseError("ROWS entries need a type and a name", line_no)
            rtype, rname = fields[0].upper(), fields[1]
            if rname in row_types or rname == obj_row:
                raise MpsParseError(f"duplicate row {rname!r}", line_no)
            if rtype == "N":
                if obj_row is not None:
                    raise MpsParseError("multiple free (N) rows", line_no)
                obj_row = rname
            elif rtype in ("L", "G", "E"):
                row_types[rname] = rtype
                row_order.append(rname)
            else:
                raise MpsParseError(f"unknown row type {rtype!r}", line_no)
        elif section == "COLUMNS":
            if len(fields) >= 3 and fields[1].strip("'\"").upper() == "MARKER":
                marker = fields[-1].strip("'\"").upper()
                if marker == "INTORG":
                    in_integer_block = True
                elif marker == "INTEND":
                    in_integer_block = False
                else:
                    raise MpsParseError(f"unknown marker {marker!r}", line_no)
                continue
            if len(fields) < 3 or len(fields) % 2 == 0:
                raise MpsParseError("COLUMNS entries come as column then row/value pairs", line_no)
            col = fields[0]
            if col not in columns:
                columns[col] = {}
                col_order.append(col)
            if in_integer_block:
                integer_cols.add(col)
            for row_name, value in zip(fields[1::2], fields[2::2]):
                val = number(value, line_no)
                if row_name == obj_row:
                    obj_coeffs[col] = obj_coeffs.get(col, rat(0)) + val
                elif row_name in row_types:
                    cell = columns[col]
                    cell[row_name] = cell.get(row_name, rat(0)) + val
                else:
                    raise MpsParseError(f"unknown row {row_name!r}", line_no)
        elif section == "RHS":
            if len(fields) < 3 or len(fields) % 2 == 0:
                raise MpsParseError("RHS entries come as a set name then row/value pairs", line_no)
            for row_name, value in zip(fields[1::2], fields[2::2]):
                if row_name == obj_row:
                    raise MpsParseError("objective-row RHS (objective constant) is unsupported", line_no)
                if row_name not in row_types:
                    raise MpsParseError(f"unknown row {row_name!r}", line_no)
                rhs[row_name] = number(value, line_no)
        elif section == "RANGES":
            if len(fields) < 3 or len(fields) % 2 == 0:
                raise MpsParseError("RANGES entries come as a set name then row/value pairs", line_no)
            for row_name, value in zip(fields[1::2], fields[2::2]):
                if row_name not in row_types:
                    raise MpsParseError(f"unknown row {row_name!r}", line_no)
                ranges[row_name] = number(value, line_no)
        elif section == "BOUNDS":
            btype = fields[0].upper()
            if btype in ("FR", "MI", "PL", "BV"):
                if len(fields) != 3:
                    raise MpsParseError(f"{btype} bound needs a set name and a column", line_no)
                bound_entries.append((btype, fields[2], None, line_no))
            elif btype in ("UP", "LO", "FX", "UI", "LI"):
                if len(fields) != 4:
                    raise MpsParseError(f"{btype} bound needs a set name, column and value", line_no)
                bound_entries.append((btype, fields[2], number(fields[3], line_no), line_no))
            else:
                raise MpsParseError(f"unknown bound type {btype!r}", line_no)
        elif section == "NAME":
            raise MpsParseError("data outside any section", line_no)
        elif section is None:
            raise MpsParseError("data before the first section header", line_no)

    if obj_row is None:
        raise MpsParseError("no objective (N) row")
    if not saw_endata:
        raise MpsParseError("missing ENDATA")

    n = len(col_order)
    col_index = {c: j for j, c in enumerate(col_order)}
    for col in obj_coeffs:
        if col not in col_index:
            raise MpsParseError(f"objective entry for unknown column {col!r}")

    # bounds: defaults, then explicit entries in file order
    explicit = {entry[1] for entry in bound_entries}
    lower: list[Optional[object]] = []
    upper: list[Optional[object]] = []
    for col in col_order:
        lower.append(rat(0))
        if col in integer_cols and col not in explicit:
            upper.append(integer_default_upper)
        else:
            upper.append(None)
    for btype, col, value, line_no in bound_entries:
        if col not in col_index:
            raise MpsParseError(f"bound for unknown column {col!r}", line_no)
        j = col_index[col]
        if btype == "UP":
            if value < 0 and lower[j] == 0 and not any(
                e[0] in ("LO", "MI", "FR", "BV", "LI", "FX") and e[1] == col for e in bound_entries
            ):
                lower[j] = None  # classic convention for negative upper bounds
            upper[j] = value
        elif btype == "LO":
            lower[j] = value
        elif btype == "FX":
            lower[j] = value
            upper[j] = value
        elif btype == "FR":
            lower[j] = None
            upper[j] = None
        elif btype == "MI":
            lower[j] = None
        elif btype == "PL":
            upper[j] = None
        elif btype == "BV":
            lower[j] = rat(0)
            upper[j] = rat(1)
            integer_cols.add(col)
        elif btype == "UI":
            upper[j] = value
            integer_cols.add(col)
        elif btype == "LI":
            lower[j] = value
            integer_cols.add(col)

    # rows to <= form
    matrix_rows = []
    rhs_values = []
    for rname in row_order:
        coeffs = [columns[c].get(rname, rat(0)) for c in col_order]
        b = rhs.get(rname, rat(0))
        rtype = row_types[rname]
        rng = ranges.get(rname)
        if rtype == "L":
            matrix_rows.append(coeffs)
            rhs_values.append(b)
            if rng is not None:
                matrix_rows.append([-v for v in coeffs])
                rhs_values.append(-(b - abs(rng)))
        elif rtype == "G":
            matrix_rows.append([-v for v in coeffs])
            rhs_values.append(-b)
            if rng is not None:
                matrix_rows.append(coeffs)
                rhs_values.append(b + abs(rng))
        else:  # E
            if rng is None:
                lo = hi = b
            elif rng >= 0:
                lo, hi = b, b + rng
            else:
                lo, hi = b + rng, b
            matrix_rows.append(coeffs)
            rhs_values.append(hi)
            matrix_rows.append([-v for v in coeffs])
            rhs_values.append(-lo)

    objective = [-obj_coeffs.get(c, rat(0)) for c in col_order]  # min file, max model
    return build_instance(
        name=name or "unnamed",
        constraint_matrix=matrix_rows,
        rhs=rhs_values,
        objective=objective,
        integer_vars=[col_index[c] for c in integer_cols],
        lower_bounds=lower,
        upper_bounds=upper,
    )


def _mps_number(value) -> str:
    """Exact decimal when it terminates, "p/q" otherwise."""
    q = rat(value)
    if q.denominator == 1:
        return str(q.numerator)
    den = int(q.denominator)
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return rat_str(q)
    places = max(twos, fives)
    scaled = abs(int(q.numerator)) * 10**places // int(q.denominator)
    sign = "-" if q.numerator < 0 else ""
    digits = f"{scaled:0{places + 1}d}"
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def write_instance_mps(inst: MipInstance) -> str:
    """Serialize to the MPS subset; reading it back yields an equal instance.

    Rows are emitted as L rows named r0..r{m-1}, columns as x0..x{n-1},
    the objective negated into minimization form, and every variable
    gets explicit bounds so no default rule is in play on re-read.
    """
    lines = [f"NAME {inst.name}", "ROWS", " N  obj"]
    for i in range(inst.num_constraints):
        lines.append(f" L  r{i}")
    lines.append("COLUMNS")
    in_block = False
    for j in range(inst.num_vars):
        is_int = j in inst.integer_vars
        if is_int and not in_block:
            lines.append("    m1  'MARKER'  'INTORG'")
            in_block = True
        elif not is_int and in_block:
            lines.append("    m2  'MARKER'  'INTEND'")
            in_block = False
        entries = [("obj", _mps_number(-inst.objective[j]))]
        for i, row in enumerate(inst.constraint_matrix):
            if row[j] != 0:
                entries.append((f"r{i}", _mps_number(row[j])))
        for pos in range(0, len(entries), 2):
            chunk = entries[pos : pos + 2]
            parts = "  ".join(f"{rname}  {val}" for rname, val in chunk)
            lines.append(f"    x{j}  {parts}")
    if in_block:
        lines.append("    m2  'MARKER'  'INTEND'")
    lines.append("RHS")
    for i, b in enumerate(inst.rhs):
        if b != 0:
            lines.append(f"    rhs  r{i}  {_mps_number(b)}")
    lines.append("BOUNDS")
    for j in range(inst.num_vars):
        lo, hi = inst.lower_bounds[j], inst.upper_bounds[j]
        if lo is None:
            lines.append(f" MI bnd  x{j}")
        else:
            lines.append(f" LO bnd  x{j}  {_mps_number(lo)}")
        if hi is None:
            lines.append(f" PL bnd  x{j}")
        else:
            lines.append(f" UP bnd  x{j}  {_mps_number(hi)}")
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"

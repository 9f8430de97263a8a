"""Standalone MPS reader.

This parser is deliberately independent of the writer in `ip`: it
tokenizes the file from scratch so that write/parse round-trips act as a
genuine cross-check on the exported instances.  It understands the
sections the toolkit emits (NAME, OBJSENSE, ROWS, COLUMNS, RHS, BOUNDS,
ENDATA) in both fixed and free layout, since both are whitespace-
delimited.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import WclError


class MpsParseError(WclError):
    pass


@dataclass
class ParsedMps:
    name: str = ""
    sense: str = "min"                      # "min" | "max"
    objective_row: str = ""
    row_types: dict[str, str] = field(default_factory=dict)   # name -> N/L/G/E
    row_order: list[str] = field(default_factory=list)
    columns: dict[str, dict[str, float]] = field(default_factory=dict)
    rhs: dict[str, float] = field(default_factory=dict)
    bounds: dict[str, str] = field(default_factory=dict)      # var -> type

    @property
    def n_vars(self) -> int:
        return len(self.columns)

    @property
    def n_constraints(self) -> int:
        return sum(1 for t in self.row_types.values() if t != "N")

    def objective_coefs(self) -> dict[str, float]:
        out = {}
        for var, coefs in self.columns.items():
            if self.objective_row in coefs:
                out[var] = coefs[self.objective_row]
        return out

    def row_violations(self, assignment: dict[str, float],
                       tol: float = 1e-9) -> list[str]:
        """Constraint rows violated by a full variable assignment."""
        activity: dict[str, float] = {r: 0.0 for r in self.row_types}
        for var, coefs in self.columns.items():
            x = assignment.get(var, 0.0)
            if x == 0.0:
                continue
            for row, c in coefs.items():
                activity[row] += c * x
        bad = []
        for row, rtype in self.row_types.items():
            if rtype == "N":
                continue
            lhs = activity[row]
            rhs = self.rhs.get(row, 0.0)
            ok = {"L": lhs <= rhs + tol,
                  "G": lhs >= rhs - tol,
                  "E": abs(lhs - rhs) <= tol}[rtype]
            if not ok:
                bad.append(f"{row}: {rtype} lhs={lhs!r} rhs={rhs!r}")
        return bad


def parse_mps(text: str | bytes) -> ParsedMps:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    out = ParsedMps()
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.startswith("*"):
            continue
        if not raw[0].isspace():
            fields = raw.split()
            section = fields[0].upper()
            if section == "NAME":
                out.name = fields[1] if len(fields) > 1 else ""
            elif section == "ENDATA":
                break
            elif section not in ("OBJSENSE", "ROWS", "COLUMNS", "RHS",
                                 "BOUNDS", "RANGES"):
                raise MpsParseError(f"line {lineno}: unknown section "
                                    f"{section!r}")
            continue
        fields = raw.split()
        if section == "OBJSENSE":
            word = fields[0].upper()
            if word.startswith("MAX"):
                out.sense = "max"
            elif word.startswith("MIN"):
                out.sense = "min"
            else:
                raise MpsParseError(f"line {lineno}: bad OBJSENSE {word!r}")
        elif section == "ROWS":
            if len(fields) != 2:
                raise MpsParseError(f"line {lineno}: bad ROWS entry")
            rtype, rname = fields[0].upper(), fields[1]
            if rtype not in ("N", "L", "G", "E"):
                raise MpsParseError(f"line {lineno}: bad row type {rtype!r}")
            if rname in out.row_types:
                raise MpsParseError(f"line {lineno}: duplicate row {rname!r}")
            out.row_types[rname] = rtype
            out.row_order.append(rname)
            if rtype == "N" and not out.objective_row:
                out.objective_row = rname
        elif section == "COLUMNS":
            if len(fields) not in (3, 5):
                raise MpsParseError(f"line {lineno}: bad COLUMNS entry")
            var = fields[0]
            col = out.columns.setdefault(var, {})
            for i in range(1, len(fields), 2):
                row, val = fields[i], float(fields[i + 1])
                if row not in out.row_types:
                    raise MpsParseError(
                        f"line {lineno}: unknown row {row!r}")
                col[row] = col.get(row, 0.0) + val
        elif section == "RHS":
            if len(fields) not in (3, 5):
                raise MpsParseError(f"line {lineno}: bad RHS entry")
            for i in range(1, len(fields), 2):
                row, val = fields[i], float(fields[i + 1])
                if row not in out.row_types:
                    raise MpsParseError(
                        f"line {lineno}: unknown RHS row {row!r}")
                out.rhs[row] = val
        elif section == "BOUNDS":
            if len(fields) < 3:
                raise MpsParseError(f"line {lineno}: bad BOUNDS entry")
            btype, var = fields[0].upper(), fields[2]
            out.bounds[var] = btype
            out.columns.setdefault(var, {})
        else:
            raise MpsParseError(f"line {lineno}: data outside a section")
    return out

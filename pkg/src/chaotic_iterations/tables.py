"""Text format for truth tables.

    N=<arity>
    <hex image of state 0>
    <hex image of state 1>
    ...

One line per state in canonical order (2^N lines after the header).  Images
are written in lowercase hex, zero-padded to ceil(N/4) digits; any case and
padding are accepted on input.  Blank trailing lines are ignored.
"""
import re

from .core import MAX_TABLE_ARITY, TruthTable, UpdateFunction
from .errors import (
    TruthTableError,
    TruthTableHeaderError,
    TruthTableHexError,
    TruthTableLineCountError,
)

_HEADER = re.compile(r"^N\s*=\s*(\d+)$")
_HEX = re.compile(r"^(0[xX])?[0-9a-fA-F]+$")


def write_truth_table(f: UpdateFunction) -> str:
    width = (f.arity + 3) // 4
    lines = [f"N={f.arity}"]
    lines.extend(format(c, f"0{width}x") for c in f.table)
    return "\n".join(lines) + "\n"


def parse_truth_table(text: str) -> TruthTable:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise TruthTableHeaderError("empty truth table document")
    m = _HEADER.match(lines[0].strip())
    if not m:
        raise TruthTableHeaderError(f"bad header {lines[0]!r}, expected 'N=<arity>'")
    n = int(m.group(1))
    if n < 1:
        raise TruthTableHeaderError("arity must be at least 1")
    if n > MAX_TABLE_ARITY:
        raise TruthTableError(f"arity {n} exceeds the supported maximum {MAX_TABLE_ARITY}")
    body = lines[1:]
    if len(body) != 1 << n:
        raise TruthTableLineCountError(
            f"N={n} needs {1 << n} table lines, found {len(body)}")
    top = 1 << n
    table = []
    for lineno, raw in enumerate(body, start=2):
        word = raw.strip()
        if not _HEX.match(word):
            raise TruthTableHexError(f"line {lineno}: {raw!r} is not hexadecimal")
        value = int(word, 16)
        if value >= top:
            raise TruthTableHexError(f"line {lineno}: {word} does not fit in {n} cells")
        table.append(value)
    return TruthTable(n, table)


def read_truth_table(path) -> TruthTable:
    with open(path, encoding="utf-8") as fh:
        return parse_truth_table(fh.read())

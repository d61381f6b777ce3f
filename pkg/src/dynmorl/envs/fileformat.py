"""Reader/writer for the plain-text environment description format.

A file is a sequence of ``key = value`` lines, optionally followed by a
``grid:`` line and then whitespace-separated grid rows::

    # comments start with '#' followed by a space or end of line
    kind = dst
    gamma = 0.95
    grid:
    S  .  .
    T1 #  .

Keys may repeat (``mine = ...`` lines in Minecart configs); values are kept
in order.  A grid row token ``#`` is a cell, so comments inside the grid
block are not allowed.
"""

from __future__ import annotations

from pathlib import Path


class FormatError(ValueError):
    pass


def parse_text(text: str) -> tuple[dict[str, list[str]], list[list[str]] | None]:
    fields: dict[str, list[str]] = {}
    grid: list[list[str]] | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        if grid is not None:
            if raw.strip():
                grid.append(raw.split())
            continue
        line = raw.strip()
        if not line or line == "#" or line.startswith("# "):
            continue
        if line == "grid:":
            grid = []
            continue
        if "=" not in line:
            raise FormatError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise FormatError(f"line {lineno}: empty key")
        fields.setdefault(key, []).append(value)
    if grid is not None:
        widths = {len(r) for r in grid}
        if len(widths) > 1:
            raise FormatError(f"grid rows have unequal widths {sorted(widths)}")
    return fields, grid


def read_file(path) -> tuple[dict[str, list[str]], list[list[str]] | None]:
    return parse_text(Path(path).read_text())


def format_text(fields: dict[str, object], grid: list[list[str]] | None = None) -> str:
    lines = []
    for key, value in fields.items():
        values = value if isinstance(value, list) else [value]
        for v in values:
            lines.append(f"{key} = {v}")
    if grid is not None:
        width = max(len(tok) for row in grid for tok in row)
        lines.append("grid:")
        lines.extend(" ".join(tok.ljust(width) for tok in row).rstrip() for row in grid)
    return "\n".join(lines) + "\n"

"""CSV and aligned-text report writers with byte-stable formatting."""

from __future__ import annotations

import csv
from pathlib import Path


def fmt(value) -> str:
    """Numbers at 12 significant digits; everything else as str."""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def stars(p_value: float) -> str:
    if p_value < 0.01:
        return "***"
    if p_value < 0.05:
        return "**"
    if p_value < 0.1:
        return "*"
    return ""


def write_csv(path, header, rows) -> str:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return str(path)


def write_text_table(path, title: str, header, rows, footer: str = "") -> str:
    """Fixed-width table: numbers right-aligned, text left-aligned."""
    path = Path(path)
    cells = [[fmt(v) for v in row] for row in rows]
    widths = [
        max(len(str(h)), *(len(r[i]) for r in cells)) if cells else len(str(h))
        for i, h in enumerate(header)
    ]

    def render(row, is_num):
        parts = []
        for i, cell in enumerate(row):
            parts.append(cell.rjust(widths[i]) if is_num[i] else cell.ljust(widths[i]))
        return "  ".join(parts).rstrip()

    numeric = [all(_is_num(r[i]) for r in cells) if cells else False for i in range(len(header))]
    lines = [title, "=" * len(title), render([str(h) for h in header], numeric)]
    lines.append("-" * len(lines[-1]))
    lines.extend(render(r, numeric) for r in cells)
    if footer:
        lines.extend(["", footer])
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return str(path)


def _is_num(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False

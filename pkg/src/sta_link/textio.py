"""Deterministic text serialization helpers.

All numbers are rendered with 12 significant digits, '.' decimal separator,
and no locale dependence, so identical runs produce byte-identical files.
"""

from __future__ import annotations

from pathlib import Path

__all__ = ["format_number", "write_text", "parse_key_value"]


def format_number(x: float) -> str:
    """12-significant-digit, locale-independent rendering."""
    return f"{x:.12g}"


def write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def parse_key_value(text: str) -> dict[str, str]:
    """Parse a flat ``key = value`` config file; '#' starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out

"""Number formatting shared by premise texts and graph renderings.

Display values are always derived from the 12-significant-digit canonical
form, so text produced at decision time and text re-rendered from a parsed
graph file agree byte for byte.
"""

from __future__ import annotations


def fmt12(x: float) -> str:
    """Canonical 12-significant-digit decimal string."""
    return f"{x:.12g}"


def fmt4(x: float) -> str:
    """4-significant-digit display form of the canonical value."""
    return f"{float(fmt12(x)):.4g}"


def force_text(force) -> str:
    """Human-readable strength: a scalar, or a tier vector in angle brackets."""
    if isinstance(force, (tuple, list)):
        return "<" + ", ".join(fmt4(x) for x in force) + ">"
    return fmt4(force)

"""Shipped element table.

Valency bounds the number of single bonds an atom can form; covalent
radii pin the default bond rest length (sum of the two radii, so C-C is
1.54 A and C-H is 1.09 A). Colors and display radii only matter to
rendering clients.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnknownElement


@dataclass(frozen=True)
class ElementSpec:
    symbol: str
    valency: int
    covalent_radius: float  # Angstrom
    display_color: tuple[int, int, int]
    display_radius: float  # Angstrom


ELEMENTS: dict[str, ElementSpec] = {
    "C": ElementSpec("C", 4, 0.77, (64, 64, 64), 0.38),
    "H": ElementSpec("H", 1, 0.32, (255, 255, 255), 0.18),
    "O": ElementSpec("O", 2, 0.66, (236, 32, 16), 0.33),
    "N": ElementSpec("N", 3, 0.70, (48, 80, 248), 0.35),
}


def element_spec(symbol: str) -> ElementSpec:
    """Look up an element by symbol; raises UnknownElement if absent."""
    try:
        return ELEMENTS[symbol]
    except KeyError:
        raise UnknownElement(f"unknown element symbol {symbol!r}") from None

"""Text measurement from bundled core-font metric tables.

Rendering never touches a system font library: widths come from the
standard AFM advance tables for Helvetica, Times Roman and Courier
(units per 1000 em), so measured boxes are identical on every platform.
"""
from __future__ import annotations

# fmt: off
_HELVETICA = {
    " ": 278, "!": 278, '"': 355, "#": 556, "$": 556, "%": 889, "&": 667,
    "'": 191, "(": 333, ")": 333, "*": 389, "+": 584, ",": 278, "-": 333,
    ".": 278, "/": 278, "0": 556, "1": 556, "2": 556, "3": 556, "4": 556,
    "5": 556, "6": 556, "7": 556, "8": 556, "9": 556, ":": 278, ";": 278,
    "<": 584, "=": 584, ">": 584, "?": 556, "@": 1015, "A": 667, "B": 667,
    "C": 722, "D": 722, "E": 667, "F": 611, "G": 778, "H": 722, "I": 278,
    "J": 500, "K": 667, "L": 556, "M": 833, "N": 722, "O": 778, "P": 667,
    "Q": 778, "R": 722, "S": 667, "T": 611, "U": 722, "V": 667, "W": 944,
    "X": 667, "Y": 667, "Z": 611, "[": 278, "\\": 278, "]": 278, "^": 469,
    "_": 556, "`": 333, "a": 556, "b": 556, "c": 500, "d": 556, "e": 556,
    "f": 278, "g": 556, "h": 556, "i": 222, "j": 222, "k": 500, "l": 222,
    "m": 833, "n": 556, "o": 556, "p": 556, "q": 556, "r": 333, "s": 500,
    "t": 278, "u": 556, "v": 500, "w": 722, "x": 500, "y": 500, "z": 500,
    "{": 334, "|": 260, "}": 334, "~": 584,
}

_TIMES = {
    " ": 250, "!": 333, '"': 408, "#": 500, "$": 500, "%": 833, "&": 778,
    "'": 180, "(": 333, ")": 333, "*": 500, "+": 564, ",": 250, "-": 333,
    ".": 250, "/": 278, "0": 500, "1": 500, "2": 500, "3": 500, "4": 500,
    "5": 500, "6": 500, "7": 500, "8": 500, "9": 500, ":": 278, ";": 278,
    "<": 564, "=": 564, ">": 564, "?": 444, "@": 921, "A": 722, "B": 667,
    "C": 667, "D": 722, "E": 611, "F": 556, "G": 722, "H": 722, "I": 333,
    "J": 389, "K": 722, "L": 611, "M": 889, "N": 722, "O": 722, "P": 556,
    "Q": 722, "R": 667, "S": 556, "T": 611, "U": 722, "V": 722, "W": 944,
    "X": 722, "Y": 722, "Z": 611, "[": 333, "\\": 278, "]": 333, "^": 469,
    "_": 500, "`": 333, "a": 444, "b": 500, "c": 444, "d": 500, "e": 444,
    "f": 333, "g": 500, "h": 500, "i": 278, "j": 278, "k": 500, "l": 278,
    "m": 778, "n": 500, "o": 500, "p": 500, "q": 500, "r": 333, "s": 389,
    "t": 278, "u": 500, "v": 500, "w": 722, "x": 500, "y": 500, "z": 444,
    "{": 480, "|": 200, "}": 480, "~": 541,
}
# fmt: on

# Fallback width for characters outside the table (per 1000 em).
_DEFAULT = {"sans": 556, "serif": 500, "mono": 600}

_TABLES = {"sans": _HELVETICA, "serif": _TIMES, "mono": None}

# font-family attribute written into the SVG for each family token.
SVG_FAMILY = {
    "sans": "Helvetica, Arial, sans-serif",
    "serif": "'Times New Roman', Times, serif",
    "mono": "'Courier New', Courier, monospace",
}

# Fraction of the em box above the baseline / total line height.
ASCENT_FRACTION = 0.8
LINE_HEIGHT_FRACTION = 1.0


def char_width(ch: str, family: str) -> float:
    """Advance width of one character in units per 1000 em."""
    if family == "mono":
        return 600.0
    table = _TABLES[family]
    return float(table.get(ch, _DEFAULT[family]))


def text_width(text: str, family: str, size: float) -> float:
    """Width of a single-line string in user units."""
    units = sum(char_width(ch, family) for ch in text)
    return units * size / 1000.0


def text_ascent(size: float) -> float:
    """Height of text above the baseline in user units."""
    return ASCENT_FRACTION * size


def text_height(size: float) -> float:
    """Total line height in user units."""
    return LINE_HEIGHT_FRACTION * size


def baseline_box(text: str, family: str, size: float,
                 x: float, y: float, anchor: str = "start") -> tuple:
    """Tight layout box for text drawn at baseline point (x, y).

    ``anchor`` is the SVG text-anchor value (start/middle/end). Returns
    (x0, y0, x1, y1) with y increasing downward.
    """
    w = text_width(text, family, size)
    if anchor == "middle":
        x0 = x - w / 2.0
    elif anchor == "end":
        x0 = x - w
    else:
        x0 = x
    y0 = y - text_ascent(size)
    y1 = y0 + text_height(size)
    return (x0, y0, x0 + w, y1)

"""Pure text helpers for letter tokens, words and rationals (no I/O, unit-tested)."""
from __future__ import annotations

import re
from fractions import Fraction

_LETTER_TOKEN = re.compile(r"^\s*([A-Za-z_][A-Za-z_0-9~']*)\s*(?:\[\s*(-?\d+(?:\s*,\s*-?\d+)*)\s*\])?\s*$")
_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")
_WORD_SEPARATORS = re.compile(r"[\s*·]+")
_BRACKETS = re.compile(r"\[[^\]]*\]")
# a signed summand: optional sign, optional rational coefficient, optional word;
# a minus inside brackets belongs to a letter index, not to the next summand
_TERM = re.compile(r"([+-])?\s*(\d+(?:\s*/\s*\d+)?)?\s*\*?\s*((?:\[[^\]]*\]|[^+\-\[])*)")


def parse_letter_token(text: str) -> tuple[str, tuple[int, ...]]:
    """Split `name` or `name[i,j,...]` into (name, indices)."""
    m = _LETTER_TOKEN.match(text)
    if not m:
        raise ValueError(f"not a letter token: {text!r}")
    name, raw = m.group(1), m.group(2)
    if raw is None:
        return name, ()
    return name, tuple(int(part) for part in raw.split(","))


def format_letter_token(name: str, indices: tuple[int, ...]) -> str:
    if not indices:
        return name
    return f"{name}[{','.join(str(i) for i in indices)}]"


def canonical_token(text: str) -> str:
    """Normalize spacing inside a token: ' a[ 1, 2 ]' -> 'a[1,2]'."""
    return format_letter_token(*parse_letter_token(text))


def split_word(text: str, known: set[str]) -> list[str]:
    """Tokenize a word against the known letter tokens by longest match.

    `1` and the empty string denote the empty word. Whitespace, `*` and `·`
    may separate letters but are never required.
    """
    stripped = text.strip()
    if stripped in ("", "1"):
        return []
    # spacing inside an index list is not a separator
    stripped = _BRACKETS.sub(lambda m: re.sub(r"\s+", "", m.group()), stripped)
    longest = max((len(t) for t in known), default=0)
    tokens: list[str] = []
    for chunk in _WORD_SEPARATORS.split(stripped):
        pos = 0
        while pos < len(chunk):
            for size in range(min(longest, len(chunk) - pos), 0, -1):
                piece = chunk[pos:pos + size]
                if piece in known:
                    tokens.append(piece)
                    pos += size
                    break
            else:
                raise ValueError(f"unknown letter at {chunk[pos:]!r} in word {text!r}")
    return tokens


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse `p/q` or `p` into a reduced Fraction with positive denominator."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    m = _RATIONAL.match(str(text))
    if not m:
        raise ValueError(f"not a rational: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(num, den)


def format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def split_terms(text: str) -> list[tuple[Fraction, str]]:
    """Split a polynomial like `a[1,1]a[1,1] - 3/5*a[1,2] + 1` into (coefficient, word text)."""
    stripped = text.strip()
    if not stripped:
        return []
    if stripped == "0":
        return []
    result: list[tuple[Fraction, str]] = []
    pos = 0
    while pos < len(stripped):
        m = _TERM.match(stripped, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial at {stripped[pos:]!r}")
        sign, coeff, word = m.group(1), m.group(2), m.group(3).strip()
        if coeff is None and not word:
            raise ValueError(f"empty summand in {text!r}")
        value = parse_rational(coeff.replace(" ", "")) if coeff else Fraction(1)
        if sign == "-":
            value = -value
        result.append((value, word))
        pos = m.end()
    return result

"""Exact rational string forms and canonical JSON bytes for reports."""

from __future__ import annotations

import hashlib
import json
import re
from fractions import Fraction

_FRACTION_RE = re.compile(r"^-?\d+(/\d+)?$")


def frac_str(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def parse_frac(text: str) -> Fraction:
    if not isinstance(text, str) or not _FRACTION_RE.match(text):
        raise ValueError(f"malformed rational {text!r}, expected 'p/q' or 'p'")
    if "/" in text and text.split("/")[1] == "0":
        raise ValueError(f"malformed rational {text!r}: zero denominator")
    return Fraction(text)


def canonical_json_bytes(obj: object) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True).encode("utf-8")


def digest(obj: object) -> str:
    return hashlib.sha256(canonical_json_bytes(obj)).hexdigest()

"""Deterministic JSONL traces with exact rational serialization.

Every number that came from exact arithmetic travels as a "p/q" string; no
floats appear in traces, so byte-identical replay is just determinism of the
underlying run.  Records are one JSON object per line with sorted keys.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Union


def frac_str(x: Union[Fraction, int]) -> str:
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def parse_frac(s: str) -> Fraction:
    num, _, den = s.partition("/")
    return Fraction(int(num), int(den) if den else 1)


def dump_record(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def write_trace(path: Union[str, Path], records: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(dump_record(rec) + "\n")


def read_trace(path: Union[str, Path]) -> list[dict]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def header_of(records: list[dict]) -> Optional[dict]:
    for rec in records:
        if rec.get("record") == "header":
            return rec
    return None

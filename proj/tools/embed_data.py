#!/usr/bin/env python3
"""Regenerate include/homeworld/data/*.inc from data/."""
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent
PAIRS = [
    ("data/lexicon_v1.json", "include/homeworld/data/lexicon_v1.inc"),
    ("data/class_vectors_v1.csv", "include/homeworld/data/class_vectors_v1.inc"),
]

for src, dst in PAIRS:
    text = (ROOT / src).read_text()
    assert ")hw\"" not in text
    out = ROOT / dst
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text('R"hw(' + text + ')hw"\n')
    print(dst)

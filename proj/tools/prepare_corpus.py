#!/usr/bin/env python3
"""Normalize raw UTF-8 text into the toolkit's plaintext format and split it
into two disjoint halves (cipher plaintext source / language model training).

Normalization: lowercase, keep ASCII letters and spaces only, collapse runs of
whitespace, one sentence-like chunk per line. Lines that look like code or
tables (low letter ratio) are dropped, and duplicate lines are removed so the
two halves stay disjoint.

Usage:
  prepare_corpus.py INPUT... --out-a gen.txt --out-b lm.txt \
      [--max-kb-a 512] [--max-kb-b 2048] [--seed 7]
"""

import argparse
import random
import sys


def normalize_line(line: str) -> str:
    out = []
    prev_space = True
    for ch in line:
        if "A" <= ch <= "Z":
            out.append(ch.lower())
            prev_space = False
        elif "a" <= ch <= "z":
            out.append(ch)
            prev_space = False
        elif not prev_space:
            out.append(" ")
            prev_space = True
    return "".join(out).strip()


def letter_ratio(line: str) -> float:
    if not line:
        return 0.0
    n = sum(1 for ch in line if ch.isalpha() or ch == " ")
    return n / len(line)


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("inputs", nargs="+")
    ap.add_argument("--out-a", required=True)
    ap.add_argument("--out-b", required=True)
    ap.add_argument("--max-kb-a", type=int, default=512)
    ap.add_argument("--max-kb-b", type=int, default=2048)
    ap.add_argument("--min-len", type=int, default=50)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    seen = set()
    lines = []
    for path in args.inputs:
        with open(path, encoding="utf-8", errors="ignore") as fh:
            for raw in fh:
                raw = raw.strip()
                if letter_ratio(raw) < 0.75:
                    continue
                norm = normalize_line(raw)
                if len(norm) < args.min_len:
                    continue
                if norm in seen:
                    continue
                seen.add(norm)
                lines.append(norm)

    rng = random.Random(args.seed)
    rng.shuffle(lines)

    def write(path, budget_kb, pool):
        written = 0
        with open(path, "w", encoding="utf-8") as fh:
            while pool and written < budget_kb * 1024:
                line = pool.pop()
                fh.write(line + "\n")
                written += len(line) + 1
        return written

    na = write(args.out_a, args.max_kb_a, lines)
    nb = write(args.out_b, args.max_kb_b, lines)
    print(f"wrote {na} bytes to {args.out_a}, {nb} bytes to {args.out_b}",
          file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())

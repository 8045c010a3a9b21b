#!/usr/bin/env python3
"""Generates the desk-scale rate-0.02 MET protograph shipped in protographs/.

Layout (columns): `n_core` core variable nodes, then one degree-1 variable
node per extension check. Rows: extension checks first, each joining a few
core variable nodes (`--ext-span`, cycled per row) and its own degree-1 node, then the core checks, which only
touch core variable nodes.

Edge types: core-check edges are labeled per core column, extension edges
into core columns per core column, and all degree-1 edges share one label.
"""
import argparse
import itertools
from pathlib import Path


def build(name, n_core, core_rows, ext_rows, spans=(2,), punctured=()):
    combos = {s: list(itertools.combinations(range(n_core), s)) for s in set(spans)}
    used = {s: 0 for s in combos}
    cols = n_core + ext_rows
    rows = ext_rows + len(core_rows)
    base = [[0] * cols for _ in range(rows)]
    labels = {}
    for r in range(ext_rows):
        span = spans[r % len(spans)]
        combo = combos[span][used[span] % len(combos[span])]
        used[span] += 1
        for c in combo:
            base[r][c] = 1
            labels[(r, c, 0)] = n_core + 1 + c
        base[r][n_core + r] = 1
        labels[(r, n_core + r, 0)] = 2 * n_core + 1
    for k, entries in enumerate(core_rows):
        r = ext_rows + k
        for c, v in enumerate(entries):
            if v:
                base[r][c] = v
                labels[(r, c, 0)] = 1 + c
    e = len(set(labels.values()))
    assert sorted(set(labels.values())) == list(range(1, e + 1))
    out = [f"# name: {name}", f"{rows} {cols} {e}"]
    out += [" ".join(map(str, row)) for row in base]
    items = sorted(labels.items())
    out += [" ".join(f"({r},{c},{s})={l}" for (r, c, s), l in items[i:i + 16]) for i in range(0, len(items), 16)]
    out.append(" ".join("1" if c in punctured else "0" for c in range(cols)))
    return "\n".join(out) + "\n"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "protographs" / "met_r0p02_desk.proto")
    ap.add_argument("--name", default="met_r0p02_desk")
    ap.add_argument("--core", default="2,2,2,2;2,2,2,2", help="core rows, ';'-separated, entries ','-separated")
    ap.add_argument("--ext-rows", type=int, default=96)
    ap.add_argument("--ext-span", default="2,3", help="core variable nodes per extension check, cycled per row (e.g. '2,3')")
    ap.add_argument("--punctured", default="", help="comma-separated punctured core columns")
    args = ap.parse_args()
    core_rows = [[int(v) for v in row.split(",")] for row in args.core.split(";")]
    n_core = len(core_rows[0])
    spans = [int(v) for v in args.ext_span.split(",")]
    punctured = {int(c) for c in args.punctured.split(",") if c}
    args.out.write_text(build(args.name, n_core, core_rows, args.ext_rows, spans, punctured))


if __name__ == "__main__":
    main()

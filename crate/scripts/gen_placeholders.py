#!/usr/bin/env python3
"""Generates the placeholder low-rate MET protographs shipped in protographs/.

Each protograph has a small core (a few high-degree variable nodes and a
couple of core checks) and an extension part in which every extension check
joins one core variable node to its own degree-1 variable node.
"""
import sys
from pathlib import Path


def build(name, n_core_vn, core_rows, ext_rows, core_label, ext_label, deg1_label, punctured=()):
    cols = n_core_vn + ext_rows
    rows = ext_rows + len(core_rows)
    base = [[0] * cols for _ in range(rows)]
    labels = {}
    for r in range(ext_rows):
        core = r % n_core_vn
        base[r][core] = 1
        base[r][n_core_vn + r] = 1
        labels[(r, core, 0)] = ext_label(core)
        labels[(r, n_core_vn + r, 0)] = deg1_label
    for k, entries in enumerate(core_rows):
        r = ext_rows + k
        for c, v in enumerate(entries):
            if v:
                base[r][c] = v
                labels[(r, c, 0)] = core_label(k, c)
    e = len(set(labels.values()))
    out = [f"# name: {name}", f"{rows} {cols} {e}"]
    out += [" ".join(map(str, row)) for row in base]
    items = sorted(labels.items())
    out += [" ".join(f"({r},{c},{s})={l}" for (r, c, s), l in items[i:i + 16]) for i in range(0, len(items), 16)]
    out.append(" ".join("1" if c in punctured else "0" for c in range(cols)))
    return "\n".join(out) + "\n"


def main(outdir):
    outdir = Path(outdir)
    # rate (200-198)/200 = 0.01, e = 11, 196 of 198 checks touch a degree-1 node
    r001 = build(
        "tbp_r0p01_placeholder", 4, [[1, 1, 2, 1], [1, 1, 1, 2]], 196,
        core_label=lambda k, c: 1 + 4 * k + c,
        ext_label=lambda core: 9 if core < 2 else 10,
        deg1_label=11,
    )
    (outdir / "tbp_r0p01_placeholder.proto").write_text(r001)
    # rate (20-18)/20 = 0.1, e = 8
    r01 = build(
        "tbp_r0p1_placeholder", 4, [[1, 1, 2, 1], [1, 1, 1, 2]], 16,
        core_label=lambda k, c: 1 + 2 * k + (c // 2),
        ext_label=lambda core: 5 + min(core, 2),
        deg1_label=8,
    )
    (outdir / "tbp_r0p1_placeholder.proto").write_text(r01)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "protographs")

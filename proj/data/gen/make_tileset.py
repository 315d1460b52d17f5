#!/usr/bin/env python3
"""Regenerate data/robinson_p8.json: a period-8 red-square tile set over labels 1..12.

Vertical edges carry labels {2,3,6,7,10,11}, horizontal edges {1,4,5,8,9,12}; the
fundamental block is symmetric under both mirrors, so the full set is the block's
tiles plus their quarter-turn images.
"""
import json, sys

P = 8
m = lambda a: 13 - a
IOTA = {1: 12, 12: 1, 2: 11, 11: 2, 5: 8, 8: 5, 6: 7, 7: 6, 3: 3, 10: 10, 4: 4, 9: 9}
io = lambda a: IOTA[a]

# label seen from the left of vertical edge k (between columns k-1 and k), per row
V = [[11, 6, 6, 6, 6, 11, 3, 10], [3, 3, 3, 10, 10, 10, 3, 10], [3, 3, 10, 3, 10, 10, 3, 10],
     [3, 3, 3, 10, 10, 10, 3, 10], [2, 7, 7, 7, 7, 2, 3, 10], [11, 11, 3, 10, 11, 11, 3, 10],
     [10, 3, 10, 3, 10, 3, 10, 3], [2, 2, 3, 10, 2, 2, 3, 10]]
# label seen from above horizontal edge j (between rows j-1 and j), per column
Hz = [[12, 5, 4, 8, 1, 5, 9, 8], [5, 12, 4, 1, 8, 9, 4, 9], [5, 9, 9, 9, 8, 4, 9, 4],
      [5, 4, 4, 4, 8, 9, 4, 9], [5, 12, 9, 1, 8, 4, 9, 4], [12, 5, 9, 8, 1, 5, 4, 8],
      [9, 9, 4, 9, 9, 9, 9, 9], [4, 4, 9, 4, 4, 4, 4, 4]]


def cell(x, y):
    x %= P; y %= P
    return (m(Hz[y][x]), V[y][(x + 1) % P], Hz[(y + 1) % P][x], m(V[y][x]))


def rot(t): return (t[3], t[0], t[1], t[2])
def refl(t): return (io(t[3]), io(t[2]), io(t[1]), io(t[0]))


def corner_roles():
    """D4 images of the top-left corner, each with the positions of its red edges."""
    roles = {frozenset({1, 2}): "tl", frozenset({2, 3}): "tr", frozenset({0, 1}): "bl", frozenset({0, 3}): "br"}
    out, todo = {}, [((1, 6, 5, 2), frozenset({1, 2}))]
    while todo:
        t, red = todo.pop()
        if t in out:
            continue
        out[t] = roles[red]
        todo.append((rot(t), frozenset((p + 1) % 4 for p in red)))
        todo.append((refl(t), frozenset(3 - p for p in red)))
    return [[out[t], list(t)] for t in sorted(out)]


def main(out):
    block = [[list(cell(x, y)) for x in range(P)] for y in range(P)]
    tiles = set()
    for row in block:
        for t in row:
            t = tuple(t)
            for r in (t, refl(t)):
                for _ in range(4):
                    tiles.add(r); r = rot(r)
    doc = {
        "format": "gapforge-tileset",
        "version": "p8-1",
        "description": "Period-8 reconstruction: one 5x5 red square per 8x8 block, corner (1,6,5,2), arm pairs (6,7),(7,6),(5,8),(8,5).",
        "match_table": [m(a) for a in range(1, 13)],
        "reflection_involution": [IOTA[a] for a in range(1, 13)],
        "corner_tuples": [[1, 6, 5, 2], [2, 1, 6, 5], [5, 2, 1, 6], [6, 5, 2, 1]],
        "corners": corner_roles(),
        "arm_pairs": [[6, 7], [7, 6], [5, 8], [8, 5]],
        "pattern": {"period": P, "cells": block},
        "tiles": [list(t) for t in sorted(tiles)],
    }
    with open(out, "w") as f:
        json.dump(doc, f, indent=1, sort_keys=True)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/robinson_p8.json")

#!/usr/bin/env python3
"""Writes the bundled machine corpus into data/machines/."""
import json
import os

OUT = os.path.join(os.path.dirname(__file__), "..", "machines")
BIN = ["#", "0", "1"]


def doc(name, alphabet, states, delta, generalised=False):
    return {
        "format": "gapforge-machine",
        "name": name,
        "alphabet": alphabet,
        "blank": "#",
        "states": states,
        "initial": states[0],
        "final": "halt",
        "generalised": generalised,
        "delta": delta,
    }


def counter(n):
    bits = format(n, "b")
    states = [f"w{i}" for i in range(len(bits))] + ["halt"]
    delta = []
    for i, b in enumerate(bits):
        for s in BIN:
            w = b if s == "#" else ("#" if s == b else s)
            delta.append([states[i], s, w, states[i + 1], "R"])
    return doc(f"binary-writer-{n}", BIN, states, delta)


def halter():
    return doc("halter", BIN, ["start", "halt"], [["start", s, s, "halt", "R"] for s in BIN])


def loop():
    return doc("loop", BIN, ["run", "halt"], [["run", s, s, "run", "R"] for s in BIN])


def copier():
    A = ["#", "0", "1", "a", "b"]
    unmark = {"a": "0", "b": "1"}
    d = []
    # scan: mark the next unread symbol and carry it right
    d += [["scan", "0", "a", "c0w", "R"], ["scan", "1", "b", "c1w", "R"], ["scan", "#", "#", "clean", "L"]]
    d += [["scan", s, s, "scan", "R"] for s in "ab"]
    for bit in "01":
        w, c = f"c{bit}w", f"c{bit}c"
        d += [[w, s, s, w, "R"] for s in "01ab"] + [[w, "#", "#", c, "R"]]
        d += [[c, s, s, c, "R"] for s in "01ab"] + [[c, "#", bit, "backc", "L"]]
    d += [["backc", s, s, "backc", "L"] for s in "01ab"] + [["backc", "#", "#", "backw", "L"]]
    d += [["backw", s, s, "backw", "L"] for s in "01"] + [["backw", s, s, "scan", "R"] for s in "ab#"]
    d += [["clean", s, unmark.get(s, s), "clean", "L"] for s in "01ab"] + [["clean", "#", "#", "halt", "R"]]
    states = ["scan", "c0w", "c0c", "c1w", "c1c", "backc", "backw", "clean", "halt"]
    return doc("copier", A, states, d)


def hadamard_walk():
    # Normal-form QTM: one coin step with Hadamard amplitudes on the written bit.
    r = 2 ** -0.5
    rows = []
    for s, sign in (("0", 1.0), ("1", -1.0)):
        rows.append(["start", s, "0", "done", "R", r, 0.0])
        rows.append(["start", s, "1", "done", "R", sign * r, 0.0])
    rows.append(["start", "#", "#", "done", "R", 1.0, 0.0])
    for s in BIN:
        rows.append(["done", s, s, "halt", "R", 1.0, 0.0])
        rows.append(["halt", s, s, "start", "N", 1.0, 0.0])
    return {
        "format": "gapforge-qtm",
        "name": "hadamard-step",
        "alphabet": BIN,
        "blank": "#",
        "states": ["start", "done", "halt"],
        "initial": "start",
        "final": "halt",
        "amplitudes": rows,
    }


def main():
    os.makedirs(OUT, exist_ok=True)
    for name, d in (("counter", counter(5)), ("halter", halter()), ("loop", loop()), ("copier", copier()),
                    ("hadamard_qtm", hadamard_walk())):
        with open(os.path.join(OUT, name + ".json"), "w") as f:
            json.dump(d, f, indent=1, sort_keys=True)
            f.write("\n")


if __name__ == "__main__":
    main()

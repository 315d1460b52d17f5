#!/usr/bin/env python3
"""Regenerate the bundled chain rulesets (track0, clock, toy7).

In toy7 the last interior tape cell holds a fixed sentinel 0 so that the erase
sweep stays deterministic in both directions.

The canonical sweep is simulated globally; each step changes exactly one adjacent
pair, which is recorded as a transition rule. Reverse rules are the mirror images.
Legal pairs are the adjacent pairs seen on canonical and reverse orbits for
even L in 4..16; every other pair is penalized.
"""
import json, sys

X = "X"


def opp(l): return "B" if l == "A" else "A"


def canonical_orbit(n, tier):
    """Configurations of the canonical orbit for n interior sites (n even)."""
    N = ["A" if k % 2 == 0 else "B" for k in range(n - 1)]
    confs = []
    for d, ps in (("R", range(1, n + 1)), ("L", range(n, 0, -1))):
        for p in ps:
            sites = []
            for s in range(1, n + 1):
                if s < p:
                    lab = N[s - 1]
                elif s > p:
                    lab = N[s - 2]
                else:
                    lab = None
                if lab is not None:
                    bit = "1" if s < p else "0"
                    tape = ("1" if lab == "A" else "0") if s < p else "_"
                    if s == n:
                        tape = "0"
                    sites.append((lab, bit, ".", ".", ".", tape, "."))
                else:
                    if d == "R":
                        cl = N[p - 1] if p < n else "B"
                        st = "q0" if cl == "A" else "q1"
                        sites.append((">" + cl, "0", ".", ".", st, "0" if p == n else "_", "."))
                    else:
                        cl = N[p - 2] if p > 1 else "B"
                        st = "h" if p == n else ("q0" if cl == "A" else "q1")
                        tape = "0" if p == n else ("1" if N[p - 1] == "A" else "0")
                        sites.append(("<" + cl, "1", ".", ".", st, tape, "."))
            confs.append(sites)
    return [[project(s, tier) for s in c] for c in confs]


def project(site, tier):
    if tier == "track0":
        return site[0]
    if tier == "clock":
        return site[0] + "|" + site[1]
    return "|".join(site)


def bracket(c): return [X] + c + [X]


def rules_from(orbit):
    rules = {}
    T = len(orbit)
    for t in range(T):
        a, b = bracket(orbit[t]), bracket(orbit[(t + 1) % T])
        diff = [i for i in range(len(a)) if a[i] != b[i]]
        if len(diff) == 2:
            i = diff[0]
            assert diff[1] == i + 1, (a, b)
        else:
            (j,) = diff
            i = j if a[j + 1] == X else j - 1
        key, val = (a[i], a[i + 1]), (b[i], b[i + 1])
        assert rules.get(key, val) == val, ("nondeterministic", key)
        rules[key] = val
    return rules


def tracks(tier):
    t0 = {"name": "control", "symbols": ["A", "B", ">A", "<A", ">B", "<B"]}
    if tier == "track0":
        return [t0]
    t1 = {"name": "sweep", "symbols": ["0", "1"]}
    if tier == "clock":
        return [t0, t1]
    return [t0, t1, {"name": "counter_head", "symbols": ["."]}, {"name": "counter_tape", "symbols": ["."]},
            {"name": "machine_head", "symbols": [".", "q0", "q1", "h"]},
            {"name": "machine_tape", "symbols": ["_", "0", "1"]}, {"name": "scratch", "symbols": ["."]}]


def build(tier):
    canon = {}
    pairs = set()
    for n in range(2, 15, 2):
        orb = canonical_orbit(n, tier)
        for k, v in rules_from(orb).items():
            assert canon.get(k, v) == v
            canon[k] = v
        for c in orb:
            b = bracket(c)
            for i in range(len(b) - 1):
                pairs.add((b[i], b[i + 1]))
            r = b[::-1]
            for i in range(len(r) - 1):
                pairs.add((r[i], r[i + 1]))
    trans = []
    for (a, b), (c, d) in sorted(canon.items()):
        trans.append({"a": a, "b": b, "c": c, "d": d, "orientation": "canonical"})
    for (a, b), (c, d) in sorted(canon.items()):
        trans.append({"a": b, "b": a, "c": d, "d": c, "orientation": "reverse"})
    doc = {
        "format": "gapforge-ruleset",
        "version": "1",
        "name": tier,
        "tracks": tracks(tier),
        "marker": X,
        "blank": "-",
        "transitions": trans,
        "penalties": {"legal_pairs": [list(p) for p in sorted(pairs)]},
        "orientation_penalties": [[X, proj_ctrl(">B", tier)], [X, proj_ctrl("<A", tier)]],
        # left-end signatures of the canonical orbit; penalized where a side must run in reverse
        "vertical_orientation_penalties": [[X, proj_ctrl(">A", tier)], [X, proj_ctrl("<B", tier)]],
        "halt_marker": None if tier != "toy7" else "*|*|*|*|h|*|*",
        "transition_scale": 1.0,
        "initial": initial_template(tier),
    }
    return doc


def initial_template(tier):
    # canonical start for n interior sites: first, then cycle[k % 2] for sites 2..n-1, then last
    c = canonical_orbit(4, tier)[0]
    return {"first": c[0], "cycle": [c[1], c[2]], "last": c[3]}


def proj_ctrl(sym, tier):
    # orientation penalties are expressed on Track 0 only; other tracks are wildcards
    if tier == "track0":
        return sym
    k = len(tracks(tier))
    return "|".join([sym] + ["*"] * (k - 1))


def reduced_halting():
    # Smallest halting layout for 2x2 fused checks: one hop X p -> X q, mirrored, with q halting.
    legal = [[X, "p"], ["p", X], [X, "q"], ["q", X]]
    return {
        "format": "gapforge-ruleset",
        "version": "1",
        "name": "reduced-halting",
        "tracks": [{"name": "control", "symbols": ["p", "q"]}],
        "marker": X,
        "blank": "-",
        "transitions": [
            {"a": X, "b": "p", "c": X, "d": "q", "orientation": "canonical"},
            {"a": "p", "b": X, "c": "q", "d": X, "orientation": "reverse"},
        ],
        "penalties": {"legal_pairs": legal},
        "halt_marker": "q",
        "transition_scale": 1.0,
    }


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "data"
    for tier in ("track0", "clock", "toy7"):
        doc = build(tier)
        with open(f"{out}/{tier}.json", "w") as f:
            json.dump(doc, f, indent=1, sort_keys=True)
            f.write("\n")
        print(tier, len(doc["transitions"]), len(doc["penalties"]["legal_pairs"]))
    with open(f"{out}/reduced_halting.json", "w") as f:
        json.dump(reduced_halting(), f, indent=1, sort_keys=True)
        f.write("\n")

#!/usr/bin/env python3
"""Generate data/ieee123.json: the IEEE 123-node feeder cut into four islands.

Standard line, configuration and spot-load data are renumbered so that each
island occupies a contiguous id range (1-18, 19-53, 54-69, 70-119), with the
substation as bus 150. Loads are scaled to a 1773 kW total. Switch placement
is a reconstruction choice recorded in SWITCHES below.
"""
import json
import sys
from pathlib import Path

# Configuration impedances in ohm/mile, upper triangle [(i, j, r, x)].
CONFIGS = {
    1: [(0, 0, .4576, 1.0780), (0, 1, .1560, .5017), (0, 2, .1535, .3849),
        (1, 1, .4666, 1.0482), (1, 2, .1580, .4236), (2, 2, .4615, 1.0651)],
    2: [(0, 0, .4666, 1.0482), (0, 1, .1580, .4236), (0, 2, .1560, .5017),
        (1, 1, .4615, 1.0651), (1, 2, .1535, .3849), (2, 2, .4576, 1.0780)],
    3: [(0, 0, .4615, 1.0651), (0, 1, .1535, .3849), (0, 2, .1580, .4236),
        (1, 1, .4576, 1.0780), (1, 2, .1560, .5017), (2, 2, .4666, 1.0482)],
    4: [(0, 0, .4615, 1.0651), (0, 1, .1580, .4236), (0, 2, .1535, .3849),
        (1, 1, .4666, 1.0482), (1, 2, .1560, .5017), (2, 2, .4576, 1.0780)],
    5: [(0, 0, .4666, 1.0482), (0, 1, .1560, .5017), (0, 2, .1580, .4236),
        (1, 1, .4576, 1.0780), (1, 2, .1535, .3849), (2, 2, .4615, 1.0651)],
    6: [(0, 0, .4576, 1.0780), (0, 1, .1535, .3849), (0, 2, .1560, .5017),
        (1, 1, .4615, 1.0651), (1, 2, .1580, .4236), (2, 2, .4666, 1.0482)],
    7: [(0, 0, .4576, 1.0780), (0, 2, .1535, .3849), (2, 2, .4615, 1.0651)],
    8: [(0, 0, .4576, 1.0780), (0, 1, .1535, .3849), (1, 1, .4615, 1.0651)],
    9: [(0, 0, 1.3292, 1.3475)],
    10: [(1, 1, 1.3292, 1.3475)],
    11: [(2, 2, 1.3292, 1.3475)],
    12: [(0, 0, 1.5209, .7521), (0, 1, .5198, .2775), (0, 2, .4924, .2157),
         (1, 1, 1.5329, .7162), (1, 2, .5198, .2775), (2, 2, 1.5209, .7521)],
}

# (from, to, feet, config) in standard numbering. Regulators are modelled
# as their adjacent line segment; 149 is merged into the substation.
LINES = """
1 2 175 10; 1 3 250 11; 1 7 300 1; 3 4 200 11; 3 5 325 11; 5 6 250 11;
7 8 200 1; 8 12 225 10; 8 9 225 9; 8 13 300 1; 9 14 425 9; 13 34 150 11;
13 18 825 2; 14 11 250 9; 14 10 250 9; 15 16 375 11; 15 17 350 11;
18 19 250 9; 18 21 300 2; 19 20 325 9; 21 22 525 10; 21 23 250 2;
23 24 550 11; 23 25 275 2; 25 26 350 7; 25 28 200 2; 26 27 275 7;
26 31 225 11; 27 33 500 9; 28 29 300 2; 29 30 350 2; 30 250 200 2;
31 32 300 11; 34 15 100 11; 35 36 650 8; 35 40 250 1; 36 37 300 9;
36 38 250 10; 38 39 325 10; 40 41 325 11; 40 42 250 1; 42 43 500 10;
42 44 200 1; 44 45 200 9; 44 47 250 1; 45 46 300 9; 47 48 150 4;
47 49 250 4; 49 50 250 4; 50 51 250 4; 52 53 200 1; 53 54 125 1;
54 55 275 1; 54 57 350 3; 55 56 275 1; 57 58 250 10; 57 60 750 3;
58 59 250 10; 60 61 550 5; 60 62 250 12; 62 63 175 12; 63 64 350 12;
64 65 425 12; 65 66 325 12; 67 68 200 9; 67 72 275 3; 67 97 250 3;
68 69 275 9; 69 70 325 9; 70 71 275 9; 72 73 275 11; 72 76 200 3;
73 74 350 11; 74 75 400 11; 76 77 400 6; 76 86 700 3; 77 78 100 6;
78 79 225 6; 78 80 475 6; 80 81 475 6; 81 82 250 6; 81 84 675 11;
82 83 250 6; 84 85 475 11; 86 87 450 6; 87 88 175 9; 87 89 275 6;
89 90 225 10; 89 91 225 6; 91 92 300 11; 91 93 225 6; 93 94 275 9;
93 95 300 6; 95 96 200 10; 97 98 275 3; 98 99 550 3; 99 100 300 3;
101 102 225 11; 101 105 275 3; 102 103 325 11; 103 104 700 11;
105 106 225 10; 105 108 325 3; 106 107 575 10; 108 109 450 9;
109 110 300 9; 110 111 575 9; 110 112 125 9; 112 113 525 9;
113 114 325 9; 135 35 375 4; 150 1 400 1; 152 52 400 1; 160 67 350 6;
197 101 250 3; 18 135 1 1; 13 152 1 1; 60 160 1 6; 97 197 1 3
"""

# Spot loads: bus -> {phase: (kW, kVAr)}. Delta loads are kept on the phase
# of their first terminal.
LOADS = {
    1: {"a": (40, 20)}, 2: {"b": (20, 10)}, 4: {"c": (40, 20)}, 5: {"c": (20, 10)},
    6: {"c": (40, 20)}, 7: {"a": (20, 10)}, 9: {"a": (40, 20)}, 10: {"a": (20, 10)},
    11: {"a": (40, 20)}, 12: {"b": (20, 10)}, 16: {"c": (40, 20)}, 17: {"c": (20, 10)},
    19: {"a": (40, 20)}, 20: {"a": (40, 20)}, 22: {"b": (40, 20)}, 24: {"c": (40, 20)},
    28: {"a": (40, 20)}, 29: {"a": (40, 20)}, 30: {"c": (40, 20)}, 31: {"c": (20, 10)},
    32: {"c": (20, 10)}, 33: {"a": (40, 20)}, 34: {"c": (40, 20)}, 35: {"a": (40, 20)},
    37: {"a": (40, 20)}, 38: {"b": (20, 10)}, 39: {"b": (20, 10)}, 41: {"c": (20, 10)},
    42: {"a": (20, 10)}, 43: {"b": (40, 20)}, 45: {"a": (20, 10)}, 46: {"a": (20, 10)},
    47: {"a": (35, 25), "b": (35, 25), "c": (35, 25)},
    48: {"a": (70, 50), "b": (70, 50), "c": (70, 50)},
    49: {"a": (35, 25), "b": (70, 50), "c": (35, 20)},
    50: {"c": (40, 20)}, 51: {"a": (20, 10)}, 52: {"a": (40, 20)}, 53: {"a": (40, 20)},
    55: {"a": (20, 10)}, 56: {"b": (20, 10)}, 58: {"b": (20, 10)}, 59: {"b": (20, 10)},
    60: {"a": (20, 10)}, 62: {"c": (40, 20)}, 63: {"a": (40, 20)}, 64: {"b": (75, 35)},
    65: {"a": (35, 25), "b": (35, 25), "c": (70, 50)}, 66: {"c": (75, 35)},
    68: {"a": (20, 10)}, 69: {"a": (40, 20)}, 70: {"a": (20, 10)}, 71: {"a": (40, 20)},
    73: {"c": (40, 20)}, 74: {"c": (40, 20)}, 75: {"c": (40, 20)},
    76: {"a": (105, 80), "b": (70, 50), "c": (70, 50)},
    77: {"b": (40, 20)}, 79: {"a": (40, 20)}, 80: {"b": (40, 20)}, 82: {"a": (40, 20)},
    83: {"c": (20, 10)}, 84: {"c": (20, 10)}, 85: {"c": (40, 20)}, 86: {"b": (20, 10)},
    87: {"b": (40, 20)}, 88: {"a": (40, 20)}, 90: {"b": (40, 20)}, 92: {"c": (40, 20)},
    94: {"a": (40, 20)}, 95: {"b": (20, 10)}, 96: {"b": (20, 10)}, 98: {"a": (40, 20)},
    99: {"b": (40, 20)}, 100: {"c": (40, 20)}, 102: {"c": (20, 10)}, 103: {"c": (40, 20)},
    104: {"c": (40, 20)}, 106: {"b": (40, 20)}, 107: {"b": (40, 20)}, 109: {"a": (40, 20)},
    111: {"a": (20, 10)}, 112: {"a": (20, 10)}, 113: {"a": (40, 20)}, 114: {"a": (20, 10)},
}

# Standard buses of each island in renumbering order.
ISLANDS = [
    [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 14, 13, 34, 15, 16, 17],
    list(range(18, 34)) + [250, 135] + list(range(35, 52)),
    [152, 52, 53, 54, 55, 56, 57, 58, 60, 59, 61, 62, 63, 64, 65, 66],
    [160, 67] + list(range(72, 97)) + [68, 69, 70, 71, 97, 98, 99, 100, 197]
    + list(range(101, 115)),
]

FORMING = [14, 19, 62, 72]
FOLLOWING_1PH = [5, 11, 16, 28, 40, 42, 47, 81, 83, 90, 97, 107, 110, 116]
FOLLOWING_3PH = [24, 33, 41, 48, 52, 59, 69, 91, 105, 109]
FAULTS = [(150, 1), (13, 18), (13, 152), (60, 160)]

# Remote-controlled switches, standard numbering.
SWITCHES = [
    (8, 13), (13, 34),
    (18, 21), (18, 135), (44, 47),
    (60, 62), (57, 60), (54, 57),
    (67, 72), (72, 73), (72, 76), (76, 86), (91, 93),
    (97, 197), (197, 101), (101, 102), (101, 105), (105, 106), (108, 109),
]

TOTAL_KW = 1773.0
KV, MVA = 4.16, 1.0
PHASES = "abc"


def parse_lines():
    out = []
    for item in LINES.replace("\n", " ").split(";"):
        if item.strip():
            a, b, ft, cfg = item.split()
            out.append((int(a), int(b), float(ft), int(cfg)))
    return out


def config_phases(cfg):
    return "".join(sorted({PHASES[i] for i, j, _, _ in CONFIGS[cfg]} | {PHASES[j] for i, j, _, _ in CONFIGS[cfg]}))


def main(out_path):
    lines = parse_lines()
    renum = {150: 150}
    next_id = 1
    for island in ISLANDS:
        for s in island:
            renum[s] = next_id
            next_id += 1
    assert next_id == 120, next_id

    bus_phases = {150: set("abc")}
    for a, b, _, cfg in lines:
        ph = set(config_phases(cfg))
        for n in (a, b):
            bus_phases.setdefault(n, set()).update(ph)

    # Put every three-phase DG on a three-phase bus by swapping with the
    # nearest three-phase bus of the same island.
    inv = {v: k for k, v in renum.items()}
    pinned = set(FORMING) | set(FOLLOWING_3PH)
    for target in FOLLOWING_3PH + FORMING:
        if len(bus_phases[inv[target]]) == 3:
            continue
        island = next(i for i in ISLANDS if inv[target] in i)
        cands = sorted(
            (abs(renum[s] - target), renum[s]) for s in island
            if len(bus_phases[s]) == 3 and renum[s] not in pinned
        )
        other = cands[0][1]
        sa, sb = inv[target], inv[other]
        renum[sa], renum[sb] = other, target
        inv[target], inv[other] = sb, sa

    fault_set = {frozenset(f) for f in FAULTS}
    switch_set = {frozenset(s) for s in SWITCHES}
    assert all(any(frozenset((a, b)) == s for a, b, _, _ in lines) for s in switch_set)

    raw_total = sum(kw for ph in LOADS.values() for kw, _ in ph.values())
    scale = TOTAL_KW / raw_total

    doc = {
        "name": "ieee123-four-islands",
        "base": {"kv": KV, "mva": MVA},
        "buses": [],
        "lines": [],
        "loads": [],
        "generators": [],
        "faults": [],
    }
    for s in sorted(bus_phases, key=lambda s: renum[s]):
        doc["buses"].append({"id": renum[s], "phases": "".join(sorted(bus_phases[s]))})

    for a, b, ft, cfg in lines:
        miles = ft / 5280.0
        z = [[[0.0, 0.0] for _ in range(3)] for _ in range(3)]
        for i, j, r, x in CONFIGS[cfg]:
            z[i][j] = [round(r * miles, 8), round(x * miles, 8)]
            z[j][i] = z[i][j]
        ra, rb = renum[a], renum[b]
        lid = f"L{ra}-{rb}"
        ph = config_phases(cfg)
        cap = 1500.0 if len(ph) == 3 else 800.0
        doc["lines"].append({
            "id": lid, "from": ra, "to": rb, "phases": ph,
            "switchable": frozenset((a, b)) in switch_set,
            "p_max_kw": cap, "q_max_kvar": cap, "impedance": z,
        })
        if frozenset((a, b)) in fault_set:
            doc["faults"].append(lid)

    for s in sorted(LOADS, key=lambda s: renum[s]):
        ph = LOADS[s]
        doc["loads"].append({
            "id": f"L{renum[s]}", "bus": renum[s],
            "kw": {p: round(kw * scale, 6) for p, (kw, _) in sorted(ph.items())},
            "kvar": {p: round(kv * scale, 6) for p, (_, kv) in sorted(ph.items())},
        })
    # Round-off lands on the largest load so the total is exact.
    total = sum(v for l in doc["loads"] for v in l["kw"].values())
    big = max(doc["loads"], key=lambda l: sum(l["kw"].values()))
    p0 = sorted(big["kw"])[0]
    big["kw"][p0] = round(big["kw"][p0] + TOTAL_KW - total, 6)

    for b in FORMING:
        doc["generators"].append({
            "id": f"GF{b}", "bus": b, "kind": "grid-forming",
            "kw": {p: 100.0 for p in PHASES}, "kvar": {p: 50.0 for p in PHASES},
        })
    for b in FOLLOWING_3PH:
        doc["generators"].append({
            "id": f"G{b}", "bus": b, "kind": "grid-following",
            "kw": {p: 100.0 for p in PHASES}, "kvar": {p: 50.0 for p in PHASES},
        })
    for b in FOLLOWING_1PH:
        s = inv[b]
        own = LOADS.get(s, {})
        ph = sorted(own)[0] if len(own) == 1 else sorted(bus_phases[s])[0]
        doc["generators"].append({
            "id": f"G{b}", "bus": b, "kind": "grid-following",
            "kw": {ph: 80.0}, "kvar": {ph: 40.0},
        })
    doc["generators"].sort(key=lambda g: (g["kind"] != "grid-forming", g["bus"]))

    Path(out_path).write_text(json.dumps(doc, indent=1) + "\n")
    mapping = {renum[s]: s for s in renum}
    print(f"scale {scale:.6f}, raw {raw_total} kW, buses {len(doc['buses'])}, lines {len(doc['lines'])}",
          file=sys.stderr)
    return mapping


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/ieee123.json")

#!/usr/bin/env python3
"""Generate data/ieee13.json: the IEEE 13-node feeder split into two islands.

Buses are renumbered 1-13 (650, 632, 633, 634, 645, 646, 671, 692, 675, 684,
611, 652, 680). Faults on 650-632 and 632-671 isolate the substation and
leave two islands, one formed at 632 and one at 680. Spot loads are scaled
by 0.1, delta loads sit on their first phase, the distributed 632-671 load
is lumped at 632, and the 633-634 transformer is a series impedance on the
4.16 kV base.
"""
import json
import sys
from pathlib import Path

# Configuration impedances in ohm/mile, upper triangle [(i, j, r, x)] on
# phases a, b, c.
CONFIGS = {
    601: [(0, 0, .3465, 1.0179), (0, 1, .1560, .5017), (0, 2, .1580, .4236),
          (1, 1, .3375, 1.0478), (1, 2, .1535, .3849), (2, 2, .3414, 1.0348)],
    602: [(0, 0, .7526, 1.1814), (0, 1, .1580, .4236), (0, 2, .1560, .5017),
          (1, 1, .7475, 1.1983), (1, 2, .1535, .3849), (2, 2, .7436, 1.2112)],
    603: [(1, 1, 1.3294, 1.3471), (1, 2, .2066, .4591), (2, 2, 1.3238, 1.3569)],
    604: [(0, 0, 1.3238, 1.3569), (0, 2, .2066, .4591), (2, 2, 1.3294, 1.3471)],
    605: [(2, 2, 1.3292, 1.3475)],
    606: [(0, 0, .7982, .4463), (0, 1, .3192, .0328), (0, 2, .2849, -.0143),
          (1, 1, .7891, .4041), (1, 2, .3192, .0328), (2, 2, .7982, .4463)],
    607: [(0, 0, 1.3425, .5124)],
}

RENUM = {650: 1, 632: 2, 633: 3, 634: 4, 645: 5, 646: 6, 671: 7, 692: 8,
         675: 9, 684: 10, 611: 11, 652: 12, 680: 13}

# (from, to, feet, config); config None is the 633-634 transformer and
# "switch" the 671-692 switch.
LINES = [
    (650, 632, 2000, 601), (632, 633, 500, 602), (633, 634, 0, None),
    (632, 645, 500, 603), (645, 646, 300, 603), (632, 671, 2000, 601),
    (671, 684, 300, 604), (684, 611, 300, 605), (684, 652, 800, 607),
    (671, 680, 1000, 601), (671, 692, 0, "switch"), (692, 675, 500, 606),
]
SWITCHES = {(632, 633), (632, 645), (671, 684), (684, 611), (671, 692), (671, 680)}
FAULTS = {(650, 632), (632, 671)}

# kW, kvar per phase before scaling.
LOADS = {
    632: {"a": (17, 10), "b": (66, 38), "c": (117, 68)},
    634: {"a": (160, 110), "b": (120, 90), "c": (120, 90)},
    645: {"b": (170, 125)},
    646: {"b": (230, 132)},
    652: {"a": (128, 86)},
    671: {"a": (385, 220), "b": (385, 220), "c": (385, 220)},
    675: {"a": (485, 190), "b": (68, 60), "c": (290, 212)},
    692: {"c": (170, 151)},
    611: {"c": (170, 80)},
}
SCALE = 0.1
KV, MVA = 4.16, 1.0

# id, bus, kind, kW per phase, kvar per phase
GENERATORS = [
    ("GF2", 632, "grid-forming", {"a": 100, "b": 100, "c": 100}, 50),
    ("GF13", 680, "grid-forming", {"a": 100, "b": 100, "c": 100}, 50),
    ("G4", 634, "grid-following", {"a": 30, "b": 30, "c": 30}, 15),
    ("G9", 675, "grid-following", {"a": 40, "b": 40, "c": 40}, 20),
    ("G11", 611, "grid-following", {"c": 30}, 15),
]


def phases_of(cfg):
    if cfg in (None, "switch"):
        return "abc"
    return "".join(sorted({"abc"[i] for i, j, _, _ in CONFIGS[cfg]} | {"abc"[j] for i, j, _, _ in CONFIGS[cfg]}))


def impedance(ft, cfg):
    z = [[[0.0, 0.0] for _ in range(3)] for _ in range(3)]
    if cfg is None:
        # 500 kVA, R = 1.1 %, X = 2 % on its own base.
        zb = KV * KV / 0.5
        for k in range(3):
            z[k][k] = [round(0.011 * zb, 8), round(0.02 * zb, 8)]
    elif cfg == "switch":
        for k in range(3):
            z[k][k] = [1e-4, 1e-4]
    else:
        miles = ft / 5280.0
        for i, j, r, x in CONFIGS[cfg]:
            z[i][j] = [round(r * miles, 8), round(x * miles, 8)]
            z[j][i] = z[i][j]
    return z


def main(out_path):
    bus_phases = {}
    for a, b, _, cfg in LINES:
        for n in (a, b):
            bus_phases.setdefault(n, set()).update(phases_of(cfg))
    doc = {"name": "ieee13-two-islands", "base": {"kv": KV, "mva": MVA},
           "buses": [], "lines": [], "loads": [], "generators": [], "faults": []}
    for s in sorted(bus_phases, key=RENUM.get):
        doc["buses"].append({"id": RENUM[s], "phases": "".join(sorted(bus_phases[s]))})
    for a, b, ft, cfg in LINES:
        ph = phases_of(cfg)
        lid = f"L{RENUM[a]}-{RENUM[b]}"
        cap = 1500.0 if len(ph) == 3 else 800.0
        doc["lines"].append({
            "id": lid, "from": RENUM[a], "to": RENUM[b], "phases": ph,
            "switchable": (a, b) in SWITCHES, "p_max_kw": cap, "q_max_kvar": cap,
            "impedance": impedance(ft, cfg),
        })
        if (a, b) in FAULTS:
            doc["faults"].append(lid)
    for s in sorted(LOADS, key=RENUM.get):
        doc["loads"].append({
            "id": f"L{RENUM[s]}", "bus": RENUM[s],
            "kw": {p: round(kw * SCALE, 6) for p, (kw, _) in sorted(LOADS[s].items())},
            "kvar": {p: round(kv * SCALE, 6) for p, (_, kv) in sorted(LOADS[s].items())},
        })
    for gid, bus, kind, kw, kvar in GENERATORS:
        doc["generators"].append({
            "id": gid, "bus": RENUM[bus], "kind": kind,
            "kw": {p: float(v) for p, v in kw.items()},
            "kvar": {p: float(kvar) for p in kw},
        })
    Path(out_path).write_text(json.dumps(doc, indent=1) + "\n")
    total = sum(v for l in doc["loads"] for v in l["kw"].values())
    print(f"buses {len(doc['buses'])}, lines {len(doc['lines'])}, load {total:.1f} kW", file=sys.stderr)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/ieee13.json")

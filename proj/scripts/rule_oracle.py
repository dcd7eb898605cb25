#!/usr/bin/env python3
"""Independent tally of rule-judge removal flags (R1-R4) over an episode directory.

Reads *.episode.json files and counts, per rule, how many removal flags the
rule-based judge should emit. The counts printed here are frozen into the
acceptance suite; this script is deliberately a from-scratch implementation,
not a port of the C++ judge.

Usage: rule_oracle.py <episode-dir>
"""

import json
import re
import sys
from pathlib import Path

CALL_RE = re.compile(r"^\s*([A-Za-z][A-Za-z0-9]*)\.([A-Z][A-Za-z0-9]*)\((.*)\)\s*$")


def split_args(argstr):
    args, depth, cur, in_str = [], 0, "", False
    for ch in argstr:
        if in_str:
            cur += ch
            if ch == "'":
                in_str = False
        elif ch == "'":
            cur += ch
            in_str = True
        elif ch == ",":
            args.append(cur)
            cur = ""
        else:
            cur += ch
    if cur.strip():
        args.append(cur)
    return [a.strip() for a in args]


def canon_arg(a):
    if a.startswith("'"):
        return a
    v = float(a)
    if v == int(v):
        return str(int(v))
    return repr(v)


def parse(line):
    line = re.sub(r"//(?=(?:[^']*'[^']*')*[^']*$).*$", "", line)
    m = CALL_RE.match(line.strip())
    if not m:
        raise ValueError(f"unparseable action: {line!r}")
    actor, verb, argstr = m.groups()
    args = [canon_arg(a) for a in split_args(argstr)] if argstr.strip() else []
    return actor, verb, args


def first_string_arg(action):
    for a in action[2]:
        if a.startswith("'"):
            return a.strip("'")
    return None


def rule_hits(actions):
    hits = {"R1": 0, "R2": 0, "R3": 0, "R4": 0}
    n = len(actions)
    # R1: adjacent exact duplicates (flag the second of each equal pair)
    for i in range(1, n):
        if actions[i] == actions[i - 1]:
            hits["R1"] += 1
    # R2: adjacent inverse toggle pair on the same object (flag both)
    for i in range(n - 1):
        va, vb = actions[i][1], actions[i + 1][1]
        if {va, vb} == {"ToggleOn", "ToggleOff"} and va != vb:
            oa, ob = first_string_arg(actions[i]), first_string_arg(actions[i + 1])
            if oa is not None and oa == ob:
                hits["R2"] += 2
    # R3: ToggleOff with no earlier ToggleOn on the same object
    for i in range(n):
        if actions[i][1] == "ToggleOff":
            obj = first_string_arg(actions[i])
            if obj is None:
                continue
            earlier_on = any(
                actions[j][1] == "ToggleOn" and first_string_arg(actions[j]) == obj
                for j in range(i)
            )
            if not earlier_on:
                hits["R3"] += 1
    # R4: PickUp of an object that never appears in any later action's arguments
    for i in range(n):
        if actions[i][1] == "PickUp":
            obj = first_string_arg(actions[i])
            if obj is None:
                continue
            used_later = any(
                obj in [a.strip("'") for a in actions[j][2]] for j in range(i + 1, n)
            )
            if not used_later:
                hits["R4"] += 1
    return hits


def main():
    if len(sys.argv) != 2:
        print(__doc__, file=sys.stderr)
        return 2
    total = {"R1": 0, "R2": 0, "R3": 0, "R4": 0}
    files = sorted(Path(sys.argv[1]).glob("*.episode.json"))
    if not files:
        print("no episode files found", file=sys.stderr)
        return 1
    for f in files:
        doc = json.loads(f.read_text())
        actions = [parse(line) for line in doc["actions"]]
        hits = rule_hits(actions)
        print(f"{f.name}: " + " ".join(f"{k}={v}" for k, v in sorted(hits.items())))
        for k, v in hits.items():
            total[k] += v
    print("TOTAL: " + " ".join(f"{k}={v}" for k, v in sorted(total.items())))
    print("SUM:", sum(total.values()))
    return 0


if __name__ == "__main__":
    sys.exit(main())

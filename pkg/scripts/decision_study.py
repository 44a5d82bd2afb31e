#!/usr/bin/env python
"""How often the smoothing decision picks case smoothing, per data scenario."""
import argparse
import json

from rtme.study import decision_study


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--ds", nargs="+", default=["DS3C", "DS0"])
    p.add_argument("--reps", type=int, default=50)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--out")
    a = p.parse_args()
    res = [decision_study(ds, a.reps, a.seed) for ds in a.ds]
    text = json.dumps(res, indent=2)
    print(text)
    if a.out:
        with open(a.out, "w") as fh:
            fh.write(text + "\n")


if __name__ == "__main__":
    main()

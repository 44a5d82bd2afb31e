#!/usr/bin/env python
"""Day-of-week pattern detection on noiseless weekly patterns and on noisy DS2A runs."""
import argparse
import json

from rtme.study import detection_study


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--noiseless", type=int, default=100)
    p.add_argument("--noisy", type=int, default=100)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--out")
    a = p.parse_args()
    text = json.dumps(detection_study(a.noiseless, a.noisy, a.seed), indent=2)
    print(text)
    if a.out:
        with open(a.out, "w") as fh:
            fh.write(text + "\n")


if __name__ == "__main__":
    main()

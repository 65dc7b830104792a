"""Forest size and run time of the threshold strategy as tau shrinks."""

from __future__ import annotations

import argparse
import csv
import sys
import time
from dataclasses import dataclass, field

from dcgfsa.forest import extract_trees
from dcgfsa.parser import DcgThreshold, intersect_dcg
from dcgfsa.pcp import PcpInstance, encode, recover_indices

INSTANCES = {
    "example": PcpInstance.of(["1", "10111", "10"], ["111", "10", "0"]),
    "nosol": PcpInstance.of(["1"], ["0"]),
    "ab": PcpInstance.of(["ab", "b"], ["a", "bb"]),
}


@dataclass
class Config:
    taus: list = field(default_factory=lambda: [0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005])
    loop_weight: float = 0.5


def main(cfg: Config, out=sys.stdout):
    w = csv.writer(out)
    w.writerow(["instance", "tau", "rules", "seconds", "first_solution"])
    for name, p in INSTANCES.items():
        g, m = encode(p, cfg.loop_weight)
        for tau in cfg.taus:
            start = time.perf_counter()
            f = intersect_dcg(g, m, DcgThreshold(tau))
            secs = time.perf_counter() - start
            trees = extract_trees(f, 1)
            first = " ".join(map(str, recover_indices(trees[0]))) if trees else ""
            w.writerow([name, tau, len(f.rules), f"{secs:.3f}", first])


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--loop-weight", type=float, default=Config.loop_weight)
    ap.add_argument("--tau", type=float, action="append", help="repeatable; default sweep")
    args = ap.parse_args()
    cfg = Config(loop_weight=args.loop_weight)
    if args.tau:
        cfg.taus = args.tau
    main(cfg)

"""Solve a PCP instance three ways: bounded search, chains x^m, and the weighted x* loop."""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

from dcgfsa.fsa import from_string
from dcgfsa.parser import (DcgAcyclicOnly, DcgSkeleton, DcgThreshold, DcgUnrestricted,
                           emptiness_verdict)
from dcgfsa.pcp import PcpInstance, encode, read_instance, solution_from_tree, solve_bounded

EXAMPLE = PcpInstance.of(["1", "10111", "10"], ["111", "10", "0"])


@dataclass
class Config:
    max_m: int = 6
    loop_weight: float = 0.5
    tau: float = 0.05
    depth: int = 10


def report(label, p, verdict, secs):
    if verdict.witness is None:
        print(f"{label:<22} {verdict}  [{secs:.2f}s]")
        return
    sol = solution_from_tree(p, verdict.witness)
    print(f"{label:<22} {' '.join(map(str, sol.indices))} → {sol.witness}  [{secs:.2f}s]")


def main(p: PcpInstance, cfg: Config):
    sol = solve_bounded(p, cfg.max_m)
    print(f"{'bounded search':<22} "
          + (f"{' '.join(map(str, sol.indices))} → {sol.witness}" if sol
             else f"no solution up to m={cfg.max_m}"))

    g, _ = encode(p)
    for n in range(1, cfg.max_m + 1):
        start = time.perf_counter()
        v = emptiness_verdict(g, from_string(["x"] * n), DcgAcyclicOnly())
        report(f"chain x^{n}", p, v, time.perf_counter() - start)

    g, m = encode(p, cfg.loop_weight)
    for strat in (DcgThreshold(cfg.tau), DcgSkeleton(), DcgUnrestricted(cfg.depth)):
        start = time.perf_counter()
        v = emptiness_verdict(g, m, strat)
        report(f"x* {type(strat).__name__}", p, v, time.perf_counter() - start)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("instance", nargs="?", help="instance file (default: the 3-pair example)")
    ap.add_argument("--max", type=int, default=Config.max_m)
    ap.add_argument("--tau", type=float, default=Config.tau)
    args = ap.parse_args()
    inst = read_instance(open(args.instance).read()) if args.instance else EXAMPLE
    main(inst, Config(max_m=args.max, tau=args.tau))

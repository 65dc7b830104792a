"""Rebuild the worked a^n b^n examples: both forests, the product size, the a^4 b^4 tree."""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from dcgfsa.barhillel import intersect_naive, reduce
from dcgfsa.forest import format_forest, iter_trees
from dcgfsa.fsa import from_string, read_fsa
from dcgfsa.grammar import read_grammar
from dcgfsa.parser import intersect_cfg

ANBN = "top s\nrule s -> -a +s -b\nrule s ->\n"
EVEN_AS = ("start q0\nfinal q2\ntrans q0 a q1\ntrans q1 a q0\n"
           "trans q0 b q2\ntrans q2 b q2\n")


@dataclass
class Config:
    sentence: str = "aabb"
    tree_size: int = 40  # node cap when searching for the a^4 b^4 tree


def main(cfg: Config):
    g, m = read_grammar(ANBN), read_fsa(EVEN_AS)

    f = intersect_cfg(g, from_string(cfg.sentence))
    print(f"# forest for {cfg.sentence!r}: {len(f.rules)} rules, {len(reduce(f).rules)} after reduce")
    print(format_forest(f))

    f = intersect_cfg(g, m)
    print(f"# forest for (aa)*b+: {len(f.rules)} rules")
    print(format_forest(f))

    naive = intersect_naive(g, m)
    print(f"# naive product: {len(naive.rules)} rules, {len(reduce(naive).rules)} after reduce\n")

    tree = next(t for t in iter_trees(f, max_nodes=cfg.tree_size)
                if t.frontier() == tuple("aaaabbbb"))
    print("# a^4 b^4")
    print(tree.pretty())


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sentence", default=Config.sentence)
    main(Config(sentence=ap.parse_args().sentence))

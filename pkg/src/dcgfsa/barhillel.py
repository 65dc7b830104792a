"""Naive product of a context-free grammar and an automaton, plus grammar reduction.

The product keeps track of automaton states inside the nonterminal symbols:
each rule ``X0 -> X1 ... Xn`` becomes ``<X0,q0,qn> -> <X1,q0,q1> ... <Xn,q(n-1),qn>``
for every choice of states, and each transition ``q -a-> q'`` contributes
``<a,q,q'> -> a``. Almost all of the resulting rules are useless, which is
what :func:`reduce` removes.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import replace

from .errors import NotContextFreeError
from .forest import DecoratedSymbol, ForestGrammar, ForestRule
from .fsa import Fsa
from .grammar import Grammar, Nonterminal, is_context_free


def intersect_naive(g: Grammar, m: Fsa) -> ForestGrammar:
    if not is_context_free(g):
        raise NotContextFreeError(
            "the product construction needs a context-free grammar; "
            "use parser.intersect_dcg for definite clause grammars")
    states = m.sorted_states()
    rules = []
    for r in g.rules:
        for qs in itertools.product(states, repeat=len(r.rhs) + 1):
            lhs = DecoratedSymbol(r.lhs, qs[0], qs[-1])
            rhs = tuple(
                DecoratedSymbol(item.category, qs[i], qs[i + 1])
                if isinstance(item, Nonterminal)
                else DecoratedSymbol(item.symbol, qs[i], qs[i + 1], terminal=True)
                for i, item in enumerate(r.rhs))
            rules.append(ForestRule(lhs, rhs))
    for t in m.transitions:
        rules.append(ForestRule(DecoratedSymbol(t.label, t.src, t.dst, terminal=True), t.label))
    starts = [DecoratedSymbol(g.top, qs, qf)
              for qs in states if qs in m.starts
              for qf in states if qf in m.finals]
    return ForestGrammar(tuple(rules), tuple(starts))


def _view(g):
    """``(starts, [(lhs, [(is_terminal, symbol), ...]), ...])`` for either grammar type."""
    if isinstance(g, ForestGrammar):
        prods = []
        for r in g.rules:
            if r.is_terminal:
                prods.append((r.lhs, [(True, r.rhs)]))
            else:
                prods.append((r.lhs, [(False, c) for c in r.rhs]))
        return list(g.starts), prods
    if not is_context_free(g):
        raise NotContextFreeError("expected a context-free grammar")
    prods = [(r.lhs, [(False, i.category) if isinstance(i, Nonterminal) else (True, i.symbol)
                      for i in r.rhs])
             for r in g.rules]
    return [g.top], prods


def useful_rule_indices(g) -> list:
    """Indices of rules that are productive and reachable from a start symbol."""
    starts, prods = _view(g)
    productive = set()
    changed = True
    while changed:
        changed = False
        for lhs, rhs in prods:
            if lhs not in productive and all(t or s in productive for t, s in rhs):
                productive.add(lhs)
                changed = True
    good = [i for i, (lhs, rhs) in enumerate(prods)
            if lhs in productive and all(t or s in productive for t, s in rhs)]
    by_lhs = defaultdict(list)
    for i in good:
        by_lhs[prods[i][0]].append(i)
    reached = {s for s in starts if s in productive}
    todo = list(reached)
    while todo:
        for i in by_lhs[todo.pop()]:
            for t, s in prods[i][1]:
                if not t and s not in reached:
                    reached.add(s)
                    todo.append(s)
    return [i for i in good if prods[i][0] in reached]


def reduce(g):
    """Subgrammar of productive and reachable rules; works on grammars and forests."""
    keep = useful_rule_indices(g)
    return replace(g, rules=tuple(g.rules[i] for i in keep))


def language_upto(g, k: int) -> set:
    """All terminal strings (as tuples) of length <= k derivable from a start symbol."""
    starts, prods = _view(g)
    lang: dict = defaultdict(set)
    changed = True
    while changed:
        changed = False
        for lhs, rhs in prods:
            strings = {()}
            for is_terminal, sym in rhs:
                options = {(sym,)} if is_terminal else lang[sym]
                strings = {a + b for a in strings for b in options if len(a) + len(b) <= k}
                if not strings:
                    break
            if not strings <= lang[lhs]:
                lang[lhs] |= strings
                changed = True
    out = set()
    for s in starts:
        out |= lang[s]
    return out

"""Context-free and definite clause grammars in one representation.

A rule's right-hand side is a sequence of marked items: ``-a`` for the
terminal ``a`` and ``+cat`` for a nonterminal whose category is any
first-order term. Text format::

    top s
    rule s -> -a +s -b
    rule s ->
    rule r([1|A],A,[1,1,1|B],B) -> -x
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Union

from .errors import FormatError
from .terms import Scanner, Struct, Term, format_atom, format_term, is_atomic


@dataclass(frozen=True)
class Terminal:
    symbol: str

    def __str__(self):
        return f"-{format_atom(self.symbol)}"


@dataclass(frozen=True)
class Nonterminal:
    category: Term

    def __str__(self):
        return f"+{format_term(self.category)}"


RhsItem = Union[Terminal, Nonterminal]


@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: tuple = ()

    def categories(self) -> list:
        return [item.category for item in self.rhs if isinstance(item, Nonterminal)]

    def __str__(self):
        body = " ".join(str(item) for item in self.rhs)
        return f"rule {format_term(self.lhs)} ->" + (f" {body}" if body else "")


@dataclass(frozen=True)
class Grammar:
    rules: tuple
    top: Term

    def __str__(self):
        return format_grammar(self)


def rule(lhs: Term, *rhs: RhsItem) -> Rule:
    return Rule(lhs, tuple(rhs))


def all_categories(g: Grammar) -> list:
    cats = [g.top]
    for r in g.rules:
        cats.append(r.lhs)
        cats.extend(r.categories())
    return cats


def is_context_free(g: Grammar) -> bool:
    return all(is_atomic(c) for c in all_categories(g))


def skeleton_name(category: Term) -> Struct:
    """Nonterminal of the context-free skeleton: ``name/arity`` (bare name for atoms)."""
    if not isinstance(category, Struct):
        raise ValueError(f"a variable cannot serve as a grammar category: {category}")
    if not category.args:
        return category
    return Struct(f"{category.functor}/{category.arity}")


def cf_skeleton(g: Grammar) -> Grammar:
    """Erase all term arguments; skeleton rule i stems from original rule i."""
    rules = tuple(
        Rule(skeleton_name(r.lhs),
             tuple(Nonterminal(skeleton_name(i.category)) if isinstance(i, Nonterminal) else i
                   for i in r.rhs))
        for r in g.rules)
    return Grammar(rules, skeleton_name(g.top))


def nullable(g: Grammar) -> set:
    """Skeleton nonterminals deriving the empty string."""
    sk = cf_skeleton(g)
    result = set()
    changed = True
    while changed:
        changed = False
        for r in sk.rules:
            if r.lhs in result:
                continue
            if all(isinstance(i, Nonterminal) and i.category in result for i in r.rhs):
                result.add(r.lhs)
                changed = True
    return result


def unit_graph(g: Grammar) -> dict:
    """Edges A -> B of the skeleton where A => alpha B beta with alpha, beta nullable."""
    sk = cf_skeleton(g)
    null = nullable(g)
    edges = defaultdict(set)
    for r in sk.rules:
        for k, item in enumerate(r.rhs):
            if not isinstance(item, Nonterminal):
                continue
            others = r.rhs[:k] + r.rhs[k + 1:]
            if all(isinstance(o, Nonterminal) and o.category in null for o in others):
                edges[r.lhs].add(item.category)
    return edges


def skeleton_cycle(g: Grammar) -> list | None:
    """A nonterminal cycle A =>+ A that consumes no input, or None."""
    edges = unit_graph(g)
    color = {}
    for root in sorted(edges, key=format_term):
        if root in color:
            continue
        path, iters = [root], [iter(sorted(edges[root], key=format_term))]
        color[root] = 1
        while iters:
            nxt = next(iters[-1], None)
            if nxt is None:
                color[path.pop()] = 2
                iters.pop()
            elif color.get(nxt) == 1:
                return path[path.index(nxt):]
            elif nxt not in color:
                color[nxt] = 1
                path.append(nxt)
                iters.append(iter(sorted(edges.get(nxt, ()), key=format_term)))
    return None


def offline_parsable(g: Grammar) -> bool:
    return skeleton_cycle(g) is None


def statistics(g: Grammar) -> dict:
    shapes = Counter(skeleton_name(c) for c in all_categories(g))
    terminals = {i.symbol for r in g.rules for i in r.rhs if isinstance(i, Terminal)}
    return {
        "rules": len(g.rules),
        "nonterminals": sorted(format_term(s) for s in shapes),
        "terminals": sorted(terminals),
        "max_rhs": max((len(r.rhs) for r in g.rules), default=0),
        "epsilon_rules": sum(1 for r in g.rules if not r.rhs),
    }


# ------------------------------------------------------------------ text io

def parse_rule(text: str, line: int | None = None) -> Rule:
    """Parse the part after the ``rule`` keyword."""
    sc = Scanner(text, line)
    lhs = sc.term()
    if not isinstance(lhs, Struct):
        raise sc.error("rule head must not be a variable")
    sc.expect("->")
    rhs = []
    while not sc.at_end():
        if sc.accept("-"):
            rhs.append(Terminal(sc.name()))
        elif sc.accept("+"):
            cat = sc.term()
            if not isinstance(cat, Struct):
                raise sc.error("nonterminal category must not be a variable")
            rhs.append(Nonterminal(cat))
        else:
            raise sc.error(f"rhs items start with '+' or '-', got {sc.peek()[1]!r}")
    return Rule(lhs, tuple(rhs))


def read_grammar(text: str) -> Grammar:
    top = None
    rules = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        if keyword == "top":
            if top is not None:
                raise FormatError("duplicate 'top' declaration", lineno)
            sc = Scanner(rest, lineno)
            top = sc.term()
            sc.finish()
        elif keyword == "rule":
            rules.append(parse_rule(rest, lineno))
        else:
            raise FormatError(f"unknown declaration {keyword!r}", lineno)
    if top is None:
        raise FormatError("no 'top' declaration")
    return Grammar(tuple(rules), top)


def format_grammar(g: Grammar) -> str:
    lines = [f"top {format_term(g.top)}"]
    lines += [str(r) for r in g.rules]
    return "\n".join(lines) + "\n"

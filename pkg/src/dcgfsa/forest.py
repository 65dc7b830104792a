"""Parse-forest grammars: rules over state-decorated symbols ``p(Cat,Q0,Q)``.

Both intersection routes (the naive product and the tabled parser) produce a
:class:`ForestGrammar`. Text format::

    top s
    start p(s,q0,q2)
    p(s,q0,q2) -> p(-a,q0,q1) p(+s,q1,q2) p(-b,q2,q2)
    p(s,q0,q0) ->
    p(a,q0,q1) -> a

A rule produced from a DCG may carry a constraint, the rule instance whose
unification has to succeed along any tree using it::

    p(r(_0,[],_0,[]),q,q) -> p(+r(...),q,q) p(+r(...),q,q) {1: r(A,B,C,D) :- r(A,E,C,F), r(E,B,F,D)}
"""

from __future__ import annotations

import graphlib
import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Union

from .errors import FormatError
from .terms import (Renamer, Scanner, Struct, Term, canonical, canonical_all,
                    format_atom, format_term, resolve, unify_in_place)


@dataclass(frozen=True)
class DecoratedSymbol:
    """``base`` spanning the automaton from state ``src`` to state ``dst``.

    Category symbols have a term ``base``; terminal symbols a string.
    """
    base: Union[Term, str]
    src: str
    dst: str
    terminal: bool = False

    def label(self, marked: bool = False) -> str:
        if self.terminal:
            name = format_atom(self.base)
            mark = "-"
        else:
            name = format_term(self.base)
            mark = "+"
        return f"p({mark if marked else ''}{name},{format_atom(self.src)},{format_atom(self.dst)})"

    def __str__(self):
        return self.label()


@dataclass(frozen=True)
class Constraint:
    """Grammar rule ``rule_index`` instantiated as ``terms`` (lhs, then rhs categories)."""
    rule_index: int
    terms: tuple

    def __str__(self):
        lhs, *body = self.terms
        text = f"{self.rule_index}: {format_term(lhs)}"
        if body:
            text += " :- " + ", ".join(format_term(t) for t in body)
        return "{" + text + "}"


@dataclass(frozen=True)
class ForestRule:
    lhs: DecoratedSymbol
    rhs: Union[tuple, str]  # decorated symbols, or one plain terminal
    constraint: Constraint | None = None

    @property
    def is_terminal(self) -> bool:
        return isinstance(self.rhs, str)

    def children(self) -> tuple:
        return () if self.is_terminal else self.rhs

    def check_chaining(self):
        if self.is_terminal:
            return
        here = self.lhs.src
        for sym in self.rhs:
            if sym.src != here:
                raise ValueError(f"broken state chain in {self}")
            here = sym.dst
        if here != self.lhs.dst:
            raise ValueError(f"broken state chain in {self}")

    def __str__(self):
        if self.is_terminal:
            body = format_atom(self.rhs)
        else:
            body = " ".join(s.label(marked=True) for s in self.rhs)
        text = f"{self.lhs} ->" + (f" {body}" if body else "")
        if self.constraint is not None:
            text += f" {self.constraint}"
        return text


@dataclass(frozen=True)
class ForestGrammar:
    rules: tuple
    starts: tuple
    top: Term | None = None  # category the root constraints must unify with

    def __post_init__(self):
        for r in self.rules:
            r.check_chaining()

    @cached_property
    def by_lhs(self) -> dict:
        index = defaultdict(list)
        for r in self.rules:
            index[r.lhs].append(r)
        return dict(index)

    @property
    def has_constraints(self) -> bool:
        return any(r.constraint is not None for r in self.rules)

    def __len__(self):
        return len(self.rules)

    def __str__(self):
        return format_forest(self)


@dataclass(frozen=True)
class ParseTree:
    symbol: DecoratedSymbol
    rule: ForestRule
    children: tuple = ()

    def frontier(self) -> tuple:
        if self.rule.is_terminal:
            return (self.rule.rhs,)
        return tuple(tok for c in self.children for tok in c.frontier())

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def nodes(self) -> Iterator["ParseTree"]:
        """Pre-order traversal."""
        yield self
        for c in self.children:
            yield from c.nodes()

    def erase(self):
        """Plain tree ``(label, children)``: state decorations and markers removed."""
        base = self.symbol.base
        label = base if isinstance(base, str) else format_term(base)
        if self.rule.is_terminal:
            return (label, (self.rule.rhs,))
        return (label, tuple(c.erase() for c in self.children))

    def pretty(self, indent: str = "") -> str:
        sym = self.symbol
        base = sym.base if isinstance(sym.base, str) else format_term(sym.base)
        head = f"{indent}{base},{sym.src},{sym.dst}"
        if self.rule.is_terminal:
            return f"{head}  {self.rule.rhs}"
        lines = [head] + [c.pretty(indent + "  ") for c in self.children]
        return "\n".join(lines)

    def to_dot(self) -> str:
        lines = ["digraph tree {", "  node [shape=plaintext];"]
        counter = itertools.count()

        def walk(t):
            me = f"n{next(counter)}"
            sym = t.symbol
            base = sym.base if isinstance(sym.base, str) else format_term(sym.base)
            label = f"{base},{sym.src},{sym.dst}".replace('"', '\\"')
            lines.append(f'  {me} [label="{label}"];')
            if t.rule.is_terminal:
                leaf = f"n{next(counter)}"
                lines.append(f'  {leaf} [label="{t.rule.rhs}"];')
                lines.append(f"  {me} -> {leaf};")
            for c in t.children:
                lines.append(f"  {me} -> {walk(c)};")
            return me

        walk(self)
        lines.append("}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- analyses

def productive_symbols(f: ForestGrammar) -> set:
    productive = set()
    changed = True
    while changed:
        changed = False
        for r in f.rules:
            if r.lhs not in productive and all(c in productive for c in r.children()):
                productive.add(r.lhs)
                changed = True
    return productive


def is_empty(f: ForestGrammar) -> bool:
    """No start symbol derives a terminal string (constraints are ignored)."""
    productive = productive_symbols(f)
    return not any(s in productive for s in f.starts)


def _useful_rules(f: ForestGrammar) -> list:
    productive = productive_symbols(f)
    ok = [r for r in f.rules if r.lhs in productive and all(c in productive for c in r.children())]
    by_lhs = defaultdict(list)
    for r in ok:
        by_lhs[r.lhs].append(r)
    seen = {s for s in f.starts if s in productive}
    todo = list(seen)
    while todo:
        for r in by_lhs[todo.pop()]:
            for c in r.children():
                if c not in seen:
                    seen.add(c)
                    todo.append(c)
    return [r for r in ok if r.lhs in seen]


def max_tree_size(f: ForestGrammar) -> int | None:
    """Largest tree size if the tree inventory is finite, else None (0 when empty)."""
    rules = _useful_rules(f)
    deps = defaultdict(set)
    for r in rules:
        deps[r.lhs].update(r.children())
    try:
        order = list(graphlib.TopologicalSorter(deps).static_order())
    except graphlib.CycleError:
        return None
    best: dict = {}
    by_lhs = defaultdict(list)
    for r in rules:
        by_lhs[r.lhs].append(r)
    for sym in order:
        best[sym] = max(1 + sum(best[c] for c in r.children()) for r in by_lhs[sym])
    return max((best[s] for s in f.starts if s in best), default=0)


class _TreeCounter:
    """Counts and lazily generates trees of exact size (number of rule nodes)."""

    def __init__(self, f: ForestGrammar):
        self.f = f
        self.by_lhs = f.by_lhs
        self._counts: dict = {}
        self._seq: dict = {}

    def count(self, sym, n) -> int:
        key = (sym, n)
        if key not in self._counts:
            total = 0
            if n >= 1:
                for r in self.by_lhs.get(sym, ()):
                    total += self.seq_count(r.children(), 0, n - 1)
            self._counts[key] = total
        return self._counts[key]

    def seq_count(self, kids, i, n) -> int:
        if i == len(kids):
            return 1 if n == 0 else 0
        key = (kids, i, n)
        if key not in self._seq:
            rest = len(kids) - i - 1
            total = 0
            for m in range(1, n - rest + 1):
                c = self.count(kids[i], m)
                if c:
                    total += c * self.seq_count(kids, i + 1, n - m)
            self._seq[key] = total
        return self._seq[key]

    def trees(self, sym, n) -> Iterator[ParseTree]:
        if not self.count(sym, n):
            return
        for r in self.by_lhs.get(sym, ()):
            for kids in self.seqs(r.children(), 0, n - 1):
                yield ParseTree(sym, r, kids)

    def seqs(self, kids, i, n) -> Iterator[tuple]:
        if i == len(kids):
            if n == 0:
                yield ()
            return
        if not self.seq_count(kids, i, n):
            return
        rest = len(kids) - i - 1
        for m in range(1, n - rest + 1):
            if not self.count(kids[i], m) or not self.seq_count(kids, i + 1, n - m):
                continue
            for first in self.trees(kids[i], m):
                for tail in self.seqs(kids, i + 1, n - m):
                    yield (first,) + tail


DEFAULT_MAX_NODES = 64


def iter_trees(f: ForestGrammar, *, validate: bool = True, max_nodes: int | None = None,
               budget: int | None = None) -> Iterator[ParseTree]:
    """Trees rooted at start symbols, by increasing size, ties by rule order.

    With ``validate`` trees failing their constraints are skipped. ``budget``
    caps the number of candidate trees examined, valid or not.
    """
    if max_nodes is None:
        max_nodes = max_tree_size(f)
        if max_nodes is None:
            max_nodes = DEFAULT_MAX_NODES
    counter = _TreeCounter(f)
    examined = 0
    for n in range(1, max_nodes + 1):
        for start in f.starts:
            for tree in counter.trees(start, n):
                examined += 1
                if budget is not None and examined > budget:
                    return
                if not validate or is_valid(tree, f.top):
                    yield tree


def extract_trees(f: ForestGrammar, limit: int, *, validate: bool = True,
                  max_nodes: int | None = None, budget: int | None = None) -> list:
    return list(itertools.islice(
        iter_trees(f, validate=validate, max_nodes=max_nodes, budget=budget), limit))


def is_valid(tree: ParseTree, top: Term | None = None) -> bool:
    """Re-run unification of the attached constraints along the whole tree."""
    return tree_terms(tree, top) is not None


def tree_terms(tree: ParseTree, top: Term | None = None) -> dict | None:
    """Instantiated category of every constrained node of a valid tree.

    Returns ``{id(node): term}``, or None if unification fails somewhere.
    """
    renamer = Renamer()
    bindings: dict = {}
    lhs_of = {}
    stack = [(tree, top)]
    while stack:
        node, slot = stack.pop()
        con = node.rule.constraint
        if con is None:
            stack.extend((c, None) for c in node.children)
            continue
        lhs, *cats = renamer.copy(*con.terms)
        lhs_of[id(node)] = lhs
        if slot is not None and not unify_in_place(lhs, slot, bindings):
            return None
        kids = [c for c in node.children if not c.symbol.terminal]
        if len(kids) != len(cats):
            raise ValueError(f"constraint arity mismatch in {node.rule}")
        stack.extend(zip(kids, cats))
    return {k: resolve(bindings, v) for k, v in lhs_of.items()}


def enumerate_strings(f: ForestGrammar, k: int) -> set:
    """Frontiers of length <= k of constraint-valid trees."""
    if not f.has_constraints:
        from .barhillel import language_upto
        return language_upto(f, k)
    lengths = _achievable_lengths(f, k)
    out = set()
    for start in f.starts:
        for n in sorted(lengths.get(start, ())):
            for tree in _trees_by_yield(f, start, n, frozenset(), lengths):
                if is_valid(tree, f.top):
                    out.add(tree.frontier())
    return out


def _achievable_lengths(f: ForestGrammar, k: int) -> dict:
    lengths: dict = defaultdict(set)
    changed = True
    while changed:
        changed = False
        for r in f.rules:
            if r.is_terminal:
                got = {1} if k >= 1 else set()
            else:
                got = {0}
                for c in r.rhs:
                    got = {a + b for a in got for b in lengths[c] if a + b <= k}
            if not got <= lengths[r.lhs]:
                lengths[r.lhs] |= got
                changed = True
    return lengths


def _trees_by_yield(f, sym, n, path, lengths):
    # Trees re-entering (sym, n) on their own spine are skipped: they repeat a
    # non-consuming cycle and only add variants of trees found without it.
    key = (sym, n)
    if key in path:
        return
    path = path | {key}
    for r in f.by_lhs.get(sym, ()):
        if r.is_terminal:
            if n == 1:
                yield ParseTree(sym, r)
            continue
        for kids in _seq_by_yield(f, r.rhs, n, path, lengths):
            yield ParseTree(sym, r, kids)


def _seq_by_yield(f, kids, n, path, lengths):
    if not kids:
        if n == 0:
            yield ()
        return
    first, rest = kids[0], kids[1:]
    for m in sorted(lengths.get(first, ())):
        if m > n:
            break
        for t in _trees_by_yield(f, first, m, path, lengths):
            for tail in _seq_by_yield(f, rest, n - m, path, lengths):
                yield (t,) + tail


def reachable_subforest(f: ForestGrammar) -> ForestGrammar:
    """Rules that are productive and reachable from a start symbol."""
    keep = set(_useful_rules(f))
    return ForestGrammar(tuple(r for r in f.rules if r in keep), f.starts, f.top)


# ------------------------------------------------------------------ text io

def _read_symbol(sc: Scanner, marked: bool):
    kind, value = sc.next()
    if kind != "atom" or value != "p":
        raise sc.error(f"expected p(...), got {value!r}")
    sc.expect("(")
    terminal = None
    if marked:
        if sc.accept("-"):
            terminal = True
        elif sc.accept("+"):
            terminal = False
        else:
            raise sc.error("rhs symbols are marked with '+' or '-'")
    if terminal:
        base = sc.name()
    else:
        base = sc.term()
        if not isinstance(base, Struct):
            raise sc.error("category must not be a variable")
        base = canonical(base)
    sc.expect(",")
    src = sc.name()
    sc.expect(",")
    dst = sc.name()
    sc.expect(")")
    return base, src, dst, terminal


def _read_constraint(sc: Scanner) -> Constraint:
    kind, value = sc.next()
    if kind != "atom" or not value.isdigit():
        raise sc.error("constraint starts with a rule index")
    sc.expect(":")
    terms = [sc.term()]
    if sc.accept(":"):
        sc.expect("-")
        terms.append(sc.term())
        while sc.accept(","):
            terms.append(sc.term())
    sc.expect("}")
    return Constraint(int(value), canonical_all(terms))


def _at_symbol(sc: Scanner) -> bool:
    kind, value = sc.peek()
    return (kind == "atom" and value == "p" and sc.i + 1 < len(sc.tokens)
            and sc.tokens[sc.i + 1][1] == "(")


def parse_forest_rule(text: str, line: int | None = None) -> ForestRule:
    sc = Scanner(text, line)
    base, src, dst, _ = _read_symbol(sc, marked=False)
    sc.expect("->")
    rhs: list = []
    terminal_rhs = None
    if not sc.at_end() and not _at_symbol(sc) and sc.peek()[1] != "{":
        terminal_rhs = sc.name()
    else:
        while _at_symbol(sc):
            b, s0, s1, term = _read_symbol(sc, marked=True)
            rhs.append(DecoratedSymbol(b, s0, s1, term))
    constraint = _read_constraint(sc) if sc.accept("{") else None
    sc.finish()
    if terminal_rhs is not None:
        if base.args:
            raise sc.error("a terminal rule needs an atomic left-hand side")
        return ForestRule(DecoratedSymbol(base.functor, src, dst, True), terminal_rhs, constraint)
    return ForestRule(DecoratedSymbol(base, src, dst), tuple(rhs), constraint)


def read_forest(text: str) -> ForestGrammar:
    rules, starts, top = [], [], None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("start "):
            sc = Scanner(line[len("start "):], lineno)
            base, src, dst, _ = _read_symbol(sc, marked=False)
            sc.finish()
            starts.append(DecoratedSymbol(base, src, dst))
        elif line.startswith("top "):
            sc = Scanner(line[len("top "):], lineno)
            top = sc.term()
            sc.finish()
        else:
            rules.append(parse_forest_rule(line, lineno))
    try:
        return ForestGrammar(tuple(rules), tuple(starts), top)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def format_forest(f: ForestGrammar) -> str:
    lines = []
    if f.top is not None:
        lines.append(f"top {format_term(f.top)}")
    lines += [f"start {s}" for s in f.starts]
    lines += [str(r) for r in f.rules]
    return "\n".join(lines) + "\n"


@dataclass
class ForestBuilder:
    """Collects forest rules once each, in first-emission order."""
    rules: dict = field(default_factory=dict)

    def add(self, rule: ForestRule) -> bool:
        if rule in self.rules:
            return False
        rule.check_chaining()
        self.rules[rule] = None
        return True

    def build(self, starts, top=None) -> ForestGrammar:
        return ForestGrammar(tuple(self.rules), tuple(dict.fromkeys(starts)), top)

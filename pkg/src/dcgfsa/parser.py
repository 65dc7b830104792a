"""Tabled top-down parsing of automata with CFGs and DCGs.

The parser is the usual definite-clause top-down recognizer in which string
positions are replaced by automaton states::

    parse(+Cat,P0,P) :- rule(Cat,Ds), parse_ds(Ds,P0,P,His),
                        side_effect(p(Cat,P0,P) --> His).

It is evaluated with variant tabling (Earley deduction): every call
``(category, state)`` gets one table entry, answers are shared between all
callers, and every completed rule instance is recorded once as a forest rule.

For DCGs the emptiness of the intersection is undecidable, so the DCG entry
point takes a :class:`Strategy` trading termination against completeness or
soundness, and :func:`emptiness_verdict` answers with three values.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

from .errors import CyclicInputError, NotContextFreeError, SearchLimitExceeded
from .forest import (Constraint, DecoratedSymbol, ForestBuilder, ForestGrammar,
                     ForestRule, ParseTree, is_valid, iter_trees, max_tree_size)
from .fsa import Fsa, find_cycle
from .grammar import Grammar, Nonterminal, Terminal, cf_skeleton, is_context_free
from .terms import Renamer, apply, canonical, canonical_all, unify

log = logging.getLogger(__name__)

DEFAULT_MAX_STEPS = 2_000_000
DEFAULT_BUDGET = 1000


# --------------------------------------------------------------- strategies

@dataclass(frozen=True)
class CfgExact:
    name = "cfg"


@dataclass(frozen=True)
class DcgUnrestricted:
    """Depth-bounded SLD resolution with iterative deepening (semi-decision)."""
    depth: int = 10
    name = "unrestricted"

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth bound must be at least 1")


@dataclass(frozen=True)
class DcgAcyclicOnly:
    """Only word graphs (acyclic automata) are accepted as input."""
    name = "acyclic"


@dataclass(frozen=True)
class DcgThreshold:
    """Abandon partial results whose path probability drops below ``tau``."""
    tau: float
    name = "threshold"

    def __post_init__(self):
        if not 0.0 < self.tau < 1.0:
            raise ValueError(f"threshold must lie in (0,1), got {self.tau}")


@dataclass(frozen=True)
class DcgSkeleton:
    """Parse with the context-free skeleton, then reattach the DCG constraints."""
    name = "skeleton"


Strategy = CfgExact | DcgUnrestricted | DcgAcyclicOnly | DcgThreshold | DcgSkeleton


def strategy_from_name(name: str, tau: float = 0.05, depth: int = 10) -> Strategy:
    table = {
        "cfg": CfgExact,
        "unrestricted": lambda: DcgUnrestricted(depth),
        "acyclic": DcgAcyclicOnly,
        "threshold": lambda: DcgThreshold(tau),
        "skeleton": DcgSkeleton,
    }
    try:
        return table[name]()
    except KeyError:
        raise ValueError(f"unknown strategy {name!r}; choose from {sorted(table)}") from None


# ------------------------------------------------------------ tabled engine

@dataclass
class _Entry:
    goal: object  # canonical category term
    state: str
    prefix: float  # probability consumed by the calling derivation before this call
    answers: list = field(default_factory=list)
    answer_keys: set = field(default_factory=set)
    consumers: list = field(default_factory=list)


@dataclass(frozen=True)
class _Item:
    """A rule instance under evaluation for ``entry``, proven up to ``pos``."""
    entry: _Entry
    rule_index: int
    lhs: object
    rhs: tuple
    pos: int
    state: str
    subst: dict
    kids: tuple
    weight: float


class _Tabler:
    """Agenda-driven variant tabling over (goal, state) pairs.

    ``constraints`` selects what each emitted forest rule carries:
    ``None`` (plain CFG), ``"instance"`` (the proven DCG rule instance) or a
    :class:`Grammar` whose rule terms are attached verbatim (skeleton mode).
    """

    def __init__(self, grammar: Grammar, fsa: Fsa, *, tau: float | None = None,
                 constraints=None, max_steps: int = DEFAULT_MAX_STEPS,
                 occurs_check: bool = True):
        self.grammar = grammar
        self.fsa = fsa
        self.tau = tau
        self.constraints = constraints
        self.max_steps = max_steps
        self.occurs_check = occurs_check
        self.renamer = Renamer()
        self.entries: dict = {}
        self.agenda: list = []
        self.forest = ForestBuilder()
        self.pruned = False
        self.steps = 0
        self.by_functor: dict = {}
        for i, r in enumerate(grammar.rules):
            self.by_functor.setdefault((r.lhs.functor, r.lhs.arity), []).append(i)

    def run(self) -> ForestGrammar:
        top = canonical(self.grammar.top)
        roots = [self._entry(top, q, 1.0) for q in self.fsa.sorted_states() if q in self.fsa.starts]
        while self.agenda:
            self.steps += 1
            if self.steps > self.max_steps:
                raise SearchLimitExceeded(
                    f"gave up after {self.max_steps} steps with {len(self.entries)} table entries")
            self._step(self.agenda.pop())
        starts = [DecoratedSymbol(term, root.state, to)
                  for root in roots
                  for to, term, _ in root.answers if to in self.fsa.finals]
        log.debug("tabled parse: %d entries, %d steps, %d forest rules",
                  len(self.entries), self.steps, len(self.forest.rules))
        top_term = None if self.constraints is None else self.grammar.top
        return self.forest.build(starts, top_term)

    def _entry(self, goal, state, prefix) -> _Entry:
        key = (goal, state, prefix)
        entry = self.entries.get(key)
        if entry is not None:
            return entry
        entry = self.entries[key] = _Entry(goal, state, prefix)
        for i in self.by_functor.get((goal.functor, goal.arity), ()):
            r = self.grammar.rules[i]
            lhs, *cats = self.renamer.copy(r.lhs, *r.categories())
            cats = iter(cats)
            rhs = tuple(Nonterminal(next(cats)) if isinstance(it, Nonterminal) else it
                        for it in r.rhs)
            (g,) = self.renamer.copy(goal)
            s = unify(lhs, g, {}, occurs_check=self.occurs_check)
            if s is not None:
                self.agenda.append(_Item(entry, i, lhs, rhs, 0, state, s, (), 1.0))
        return entry

    def _advance(self, item: _Item, state, subst, kid, weight):
        if self.tau is not None and item.entry.prefix * weight < self.tau:
            self.pruned = True
            return
        self.agenda.append(_Item(item.entry, item.rule_index, item.lhs, item.rhs,
                                 item.pos + 1, state, subst, item.kids + (kid,), weight))

    def _step(self, item: _Item):
        if item.pos == len(item.rhs):
            self._complete(item)
            return
        x = item.rhs[item.pos]
        if isinstance(x, Terminal):
            for t in self.fsa.out(item.state, x.symbol):
                kid = DecoratedSymbol(x.symbol, item.state, t.dst, terminal=True)
                w = item.weight * t.weight if self.tau is not None else 1.0
                if self.tau is None or item.entry.prefix * w >= self.tau:
                    self.forest.add(ForestRule(kid, x.symbol))
                self._advance(item, t.dst, item.subst, kid, w)
            return
        goal = canonical(apply(item.subst, x.category))
        prefix = 1.0 if self.tau is None else round(item.entry.prefix * item.weight, 12)
        entry = self._entry(goal, item.state, prefix)
        entry.consumers.append(item)
        for answer in list(entry.answers):
            self._resume(item, answer)

    def _resume(self, item: _Item, answer):
        to, term, weight = answer
        (fresh,) = self.renamer.copy(term)
        s = unify(item.rhs[item.pos].category, fresh, item.subst, occurs_check=self.occurs_check)
        if s is None:  # cannot happen for variant tabling; kept as a guard
            return
        kid = DecoratedSymbol(term, item.state, to)
        self._advance(item, to, s, kid, item.weight * weight)

    def _complete(self, item: _Item):
        entry = item.entry
        lhs = apply(item.subst, item.lhs)
        key = canonical(lhs)
        sym = DecoratedSymbol(key, entry.state, item.state)
        if self.constraints is None:
            constraint = None
        elif self.constraints == "instance":
            terms = [lhs] + [apply(item.subst, i.category)
                             for i in item.rhs if isinstance(i, Nonterminal)]
            constraint = Constraint(item.rule_index, canonical_all(terms))
        else:
            r = self.constraints.rules[item.rule_index]
            constraint = Constraint(item.rule_index, canonical_all([r.lhs] + r.categories()))
        self.forest.add(ForestRule(sym, item.kids, constraint))
        answer = (item.state, key, round(item.weight, 12))
        if answer in entry.answer_keys:
            return
        entry.answer_keys.add(answer)
        entry.answers.append(answer)
        for consumer in entry.consumers:
            self._resume(consumer, answer)


# ------------------------------------------------------- unrestricted (SLD)

@dataclass
class _Node:
    rule_index: int
    lhs: object
    cats: tuple
    src: str
    dst: str
    kids: tuple  # _Node or (label, src, dst) for terminals


class _Sld:
    """Plain depth-first resolution; depth counts rule applications on a branch."""

    def __init__(self, grammar: Grammar, fsa: Fsa, depth: int, max_steps: int):
        self.grammar = grammar
        self.fsa = fsa
        self.depth = depth
        self.max_steps = max_steps
        self.steps = 0
        self.cut = False
        self.renamer = Renamer()

    def prove(self, cat, state, s, depth):
        if depth == 0:
            self.cut = True
            return
        self.steps += 1
        if self.steps > self.max_steps:
            raise SearchLimitExceeded(f"gave up after {self.max_steps} resolution steps")
        for i, r in enumerate(self.grammar.rules):
            lhs, *cats = self.renamer.copy(r.lhs, *r.categories())
            s1 = unify(lhs, cat, s)
            if s1 is None:
                continue
            it = iter(cats)
            rhs = tuple(next(it) if isinstance(x, Nonterminal) else x for x in r.rhs)
            for s2, end, kids in self.prove_seq(rhs, state, s1, depth - 1):
                yield s2, end, _Node(i, lhs, tuple(cats), state, end, kids)

    def prove_seq(self, rhs, state, s, depth):
        if not rhs:
            yield s, state, ()
            return
        first, rest = rhs[0], rhs[1:]
        if isinstance(first, Terminal):
            for t in self.fsa.out(state, first.symbol):
                for s1, end, kids in self.prove_seq(rest, t.dst, s, depth):
                    yield s1, end, ((first.symbol, state, t.dst),) + kids
            return
        for s1, mid, node in self.prove(first, state, s, depth):
            for s2, end, kids in self.prove_seq(rest, mid, s1, depth):
                yield s2, end, (node,) + kids


def _sld_forest(grammar: Grammar, fsa: Fsa, depth: int, max_steps: int,
                max_proofs: int = 1000):
    """All proofs of height <= depth, as a forest; also reports whether the bound cut."""
    sld = _Sld(grammar, fsa, depth, max_steps)
    builder = ForestBuilder()
    starts = []
    proofs = 0
    for q in fsa.sorted_states():
        if q not in fsa.starts:
            continue
        for s, end, node in sld.prove(grammar.top, q, {}, depth):
            if end not in fsa.finals:
                continue
            starts.append(_emit_proof(builder, node, s))
            proofs += 1
            if proofs >= max_proofs:
                sld.cut = True
                break
    return builder.build(starts, grammar.top), sld.cut


def _emit_proof(builder: ForestBuilder, node: _Node, s) -> DecoratedSymbol:
    lhs = apply(s, node.lhs)
    cats = [apply(s, c) for c in node.cats]
    kids = []
    for k in node.kids:
        if isinstance(k, _Node):
            kids.append(_emit_proof(builder, k, s))
        else:
            label, src, dst = k
            sym = DecoratedSymbol(label, src, dst, terminal=True)
            builder.add(ForestRule(sym, label))
            kids.append(sym)
    sym = DecoratedSymbol(canonical(lhs), node.src, node.dst)
    builder.add(ForestRule(sym, tuple(kids),
                           Constraint(node.rule_index, canonical_all([lhs] + cats))))
    return sym


# ------------------------------------------------------------- entry points

def intersect_cfg(g: Grammar, m: Fsa, *, max_steps: int = DEFAULT_MAX_STEPS) -> ForestGrammar:
    """Parse-forest grammar of a context-free grammar and an automaton."""
    if not is_context_free(g):
        raise NotContextFreeError(
            "grammar has non-atomic categories; use intersect_dcg with a DCG strategy")
    return _Tabler(g, m, max_steps=max_steps).run()


@dataclass(frozen=True)
class Unknown:
    """The search was cut off before it could decide anything."""
    reason: str
    partial: ForestGrammar | None = None


@dataclass
class _Run:
    forest: ForestGrammar | None
    exhaustive: bool  # no branch was abandoned
    reason: str = ""


def _run(g: Grammar, m: Fsa, strat: Strategy, max_steps: int) -> _Run:
    if isinstance(strat, CfgExact):
        return _Run(intersect_cfg(g, m, max_steps=max_steps), True)
    if isinstance(strat, DcgAcyclicOnly):
        cycle = find_cycle(m)
        if cycle is not None:
            raise CyclicInputError(cycle)
        return _Run(_Tabler(g, m, constraints="instance", max_steps=max_steps).run(), True)
    if isinstance(strat, DcgThreshold):
        tabler = _Tabler(g, m, tau=strat.tau, constraints="instance", max_steps=max_steps)
        forest = tabler.run()
        return _Run(forest, not tabler.pruned,
                    "" if not tabler.pruned else f"branches below threshold {strat.tau} abandoned")
    if isinstance(strat, DcgSkeleton):
        forest = _Tabler(cf_skeleton(g), m, constraints=g, max_steps=max_steps).run()
        return _Run(forest, max_tree_size(forest) is not None)
    if isinstance(strat, DcgUnrestricted):
        forest, cut = None, True
        for d in range(1, strat.depth + 1):
            forest, cut = _sld_forest(g, m, d, max_steps)
            if forest.starts or not cut:
                break
        if not forest.starts and cut:
            return _Run(None, False, f"depth bound {strat.depth} exhausted without a proof")
        return _Run(forest, not cut)
    raise TypeError(f"not a strategy: {strat!r}")


def intersect_dcg(g: Grammar, m: Fsa, strat: Strategy, *,
                  max_steps: int = DEFAULT_MAX_STEPS) -> ForestGrammar | Unknown:
    """Parse-forest grammar of a DCG and an automaton under ``strat``.

    Forests produced by the skeleton strategy over-generate: only trees that
    pass :func:`forest.is_valid` are parses. ``Unknown`` is returned when the
    unrestricted search runs out of depth without finding anything.
    """
    if isinstance(strat, CfgExact):
        raise ValueError("CfgExact is not a DCG strategy; call intersect_cfg")
    try:
        result = _run(g, m, strat, max_steps)
    except SearchLimitExceeded as exc:
        return Unknown(str(exc))
    if result.forest is None:
        return Unknown(result.reason)
    return result.forest


class Status(enum.Enum):
    NONEMPTY = "nonempty"
    EMPTY = "empty"
    UNKNOWN = "unknown"


@dataclass
class Verdict:
    status: Status
    witness: ParseTree | None = None
    forest: ForestGrammar | None = None
    reason: str = ""

    def __str__(self):
        text = self.status.value
        if self.witness is not None:
            text += f" (witness: {' '.join(self.witness.frontier()) or 'ε'})"
        elif self.reason:
            text += f" ({self.reason})"
        return text


def skeleton_refutes(g: Grammar, m: Fsa, *, budget: int = DEFAULT_BUDGET,
                     max_steps: int = DEFAULT_MAX_STEPS) -> bool:
    """True when the skeleton forest has finitely many trees and none is valid."""
    forest = _Tabler(cf_skeleton(g), m, constraints=g, max_steps=max_steps).run()
    return _refuted(forest, budget)


def _refuted(forest: ForestGrammar, budget: int) -> bool:
    bound = max_tree_size(forest)
    if bound is None:
        return False
    examined = 0
    for tree in iter_trees(forest, validate=False, max_nodes=bound, budget=budget):
        if is_valid(tree, forest.top):
            return False
        examined += 1
    return examined < budget


def emptiness_verdict(g: Grammar, m: Fsa, strat: Strategy, *,
                      max_nodes: int | None = None, budget: int = DEFAULT_BUDGET,
                      max_steps: int = DEFAULT_MAX_STEPS) -> Verdict:
    """Decide emptiness where the strategy allows it, otherwise say Unknown.

    ``Empty`` is only claimed when the search was exhaustive. For DCGs on
    cyclic automata that is established solely by a finite skeleton forest
    none of whose trees survives validation. ``budget`` caps the number of
    candidate trees examined while looking for a witness.
    """
    if isinstance(strat, CfgExact):
        forest = intersect_cfg(g, m, max_steps=max_steps)
        tree = next(iter_trees(forest, validate=False, max_nodes=max_nodes), None)
        if tree is None:
            return Verdict(Status.EMPTY, forest=forest)
        return Verdict(Status.NONEMPTY, tree, forest)
    try:
        run = _run(g, m, strat, max_steps)
    except SearchLimitExceeded as exc:
        return Verdict(Status.UNKNOWN, reason=str(exc))
    forest = run.forest
    if forest is not None:
        tree = next(iter_trees(forest, validate=True, max_nodes=max_nodes, budget=budget), None)
        if tree is not None:
            return Verdict(Status.NONEMPTY, tree, forest)
    cyclic = find_cycle(m) is not None
    if isinstance(strat, DcgSkeleton):
        if _refuted(forest, budget):
            return Verdict(Status.EMPTY, forest=forest, reason="skeleton forest refutes")
        return Verdict(Status.UNKNOWN, forest=forest,
                       reason="no valid tree among the skeleton trees examined")
    if not cyclic and run.exhaustive and forest is not None and not forest.starts:
        return Verdict(Status.EMPTY, forest=forest)
    if cyclic and skeleton_refutes(g, m, budget=budget, max_steps=max_steps):
        return Verdict(Status.EMPTY, forest=forest, reason="skeleton forest refutes")
    if run.reason:
        reason = run.reason
    elif cyclic:
        reason = "cyclic input: emptiness is only decided through a finite skeleton forest"
    else:
        reason = "no validated witness found within the search budget"
    return Verdict(Status.UNKNOWN, forest=forest, reason=reason)

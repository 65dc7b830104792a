"""Finite state automata used as parser input (strings, word graphs, cyclic FSAs).

Text format, one declaration per line, ``#`` starts a comment::

    start q0
    final q2
    trans q0 a q1
    trans q2 b q2 0.5     # optional trailing weight in (0,1]
    state q3              # only needed for otherwise unmentioned states
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable, Sequence

from .errors import FormatError, MalformedPathError
from .terms import Scanner, format_atom


@dataclass(frozen=True)
class Transition:
    src: str
    label: str
    dst: str
    weight: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.weight <= 1.0:
            raise ValueError(f"transition weight must lie in (0,1], got {self.weight}")


@dataclass(frozen=True)
class Fsa:
    states: frozenset
    transitions: tuple
    starts: frozenset
    finals: frozenset

    def __post_init__(self):
        if not self.starts:
            raise ValueError("an automaton needs at least one start state")
        mentioned = set(self.starts) | set(self.finals)
        for t in self.transitions:
            mentioned.update((t.src, t.dst))
        missing = mentioned - set(self.states)
        if missing:
            raise ValueError(f"undeclared states: {sorted(missing)}")

    @classmethod
    def build(cls, transitions: Iterable[Transition], starts: Iterable[str],
              finals: Iterable[str], states: Iterable[str] = ()) -> "Fsa":
        transitions = tuple(transitions)
        starts, finals = frozenset(starts), frozenset(finals)
        all_states = set(states) | starts | finals
        for t in transitions:
            all_states.update((t.src, t.dst))
        return cls(frozenset(all_states), transitions, starts, finals)

    @cached_property
    def _out(self) -> dict:
        index = defaultdict(list)
        for t in self.transitions:
            index[t.src, t.label].append(t)
            index[t.src, None].append(t)
        return dict(index)

    def out(self, state: str, label: str | None = None) -> list:
        """Transitions leaving ``state``, optionally restricted to one label."""
        return self._out.get((state, label), [])

    def sorted_states(self) -> list:
        return sorted(self.states, key=_state_order)

    def with_endpoints(self, start: str, final: str) -> "Fsa":
        return replace(self, starts=frozenset([start]), finals=frozenset([final]))

    def reweighted(self, weight: float) -> "Fsa":
        """Same automaton with every transition weight set to ``weight``."""
        return replace(self, transitions=tuple(replace(t, weight=weight)
                                               for t in self.transitions))


def _state_order(name: str):
    # chain automata name states 0..n; order those numerically
    return (0, int(name), "") if name.isdigit() else (1, 0, name)


def from_string(tokens: Sequence[str]) -> Fsa:
    """Linear automaton with states "0".."n" spelling exactly ``tokens``."""
    tokens = list(tokens)
    n = len(tokens)
    trans = [Transition(str(i), tok, str(i + 1)) for i, tok in enumerate(tokens)]
    return Fsa.build(trans, ["0"], [str(n)], states=[str(i) for i in range(n + 1)])


def find_cycle(fsa: Fsa) -> list | None:
    """States along some cycle of the transition graph, or None.

    Self-loops count as cycles.
    """
    succ = defaultdict(list)
    for t in fsa.transitions:
        succ[t.src].append(t.dst)
    color = dict.fromkeys(fsa.states, 0)  # 0 new, 1 on stack, 2 done
    for root in fsa.sorted_states():
        if color[root]:
            continue
        path = [root]
        iters = [iter(succ[root])]
        color[root] = 1
        while iters:
            nxt = next(iters[-1], None)
            if nxt is None:
                color[path.pop()] = 2
                iters.pop()
            elif color[nxt] == 1:
                return path[path.index(nxt):]
            elif color[nxt] == 0:
                color[nxt] = 1
                path.append(nxt)
                iters.append(iter(succ[nxt]))
    return None


def is_acyclic(fsa: Fsa) -> bool:
    return find_cycle(fsa) is None


def accepts(fsa: Fsa, tokens: Sequence[str]) -> bool:
    current = set(fsa.starts)
    for tok in tokens:
        current = {t.dst for q in current for t in fsa.out(q, tok)}
        if not current:
            return False
    return bool(current & fsa.finals)


def path_weight(fsa: Fsa, path: Sequence[Transition]) -> float:
    """Product of the weights along a connected path of transitions."""
    for prev, nxt in zip(path, path[1:]):
        if prev.dst != nxt.src:
            raise MalformedPathError(
                f"path breaks between {prev.src}-{prev.label}->{prev.dst} "
                f"and {nxt.src}-{nxt.label}->{nxt.dst}")
    return math.prod(t.weight for t in path)


# ------------------------------------------------------------------ text io

def read_fsa(text: str) -> Fsa:
    starts, finals, states, trans = [], [], [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        fields = rest.split()
        if keyword in ("start", "final", "state"):
            if len(fields) != 1:
                raise FormatError(f"'{keyword}' takes one state name", lineno)
            {"start": starts, "final": finals, "state": states}[keyword].append(
                _unquote(fields[0], lineno))
        elif keyword == "trans":
            if len(fields) not in (3, 4):
                raise FormatError("expected: trans FROM LABEL TO [WEIGHT]", lineno)
            src, label, dst = (_unquote(f, lineno) for f in fields[:3])
            weight = 1.0
            if len(fields) == 4:
                try:
                    weight = float(fields[3])
                    trans.append(Transition(src, label, dst, weight))
                except ValueError as exc:
                    raise FormatError(str(exc), lineno) from None
            else:
                trans.append(Transition(src, label, dst))
        else:
            raise FormatError(f"unknown declaration {keyword!r}", lineno)
    if not starts:
        raise FormatError("no start state declared")
    return Fsa.build(trans, starts, finals, states)


def _unquote(field: str, lineno: int) -> str:
    sc = Scanner(field, lineno)
    name = sc.name()
    sc.finish()
    return name


def format_fsa(fsa: Fsa) -> str:
    lines = [f"start {format_atom(q)}" for q in sorted(fsa.starts, key=_state_order)]
    lines += [f"final {format_atom(q)}" for q in sorted(fsa.finals, key=_state_order)]
    used = set(fsa.starts) | set(fsa.finals)
    for t in fsa.transitions:
        used.update((t.src, t.dst))
        line = f"trans {format_atom(t.src)} {format_atom(t.label)} {format_atom(t.dst)}"
        if t.weight != 1.0:
            line += f" {t.weight!r}"
        lines.append(line)
    lines += [f"state {format_atom(q)}" for q in fsa.sorted_states() if q not in used]
    return "\n".join(lines) + "\n"


def to_dot(fsa: Fsa) -> str:
    lines = ["digraph fsa {", "  rankdir=LR;", '  "" [shape=none];']
    for q in fsa.sorted_states():
        shape = "doublecircle" if q in fsa.finals else "circle"
        lines.append(f'  "{q}" [shape={shape}];')
    for q in sorted(fsa.starts, key=_state_order):
        lines.append(f'  "" -> "{q}";')
    for t in fsa.transitions:
        label = t.label if t.weight == 1.0 else f"{t.label}/{t.weight:g}"
        lines.append(f'  "{t.src}" -> "{t.dst}" [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"

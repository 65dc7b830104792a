"""Post's Correspondence Problem: instances, a bounded solver, and the DCG encoding.

The encoding turns an instance into a DCG and the one-state automaton for
``x*`` such that the instance has a solution iff their intersection is
non-empty. Each pair becomes a lexical entry over ``x`` holding its two strings
as difference lists; a binary rule concatenates them; the top rule demands
that both concatenations are the same list.

Instance text format, one pair per line::

    pair 1 111
    pair 10111 10
    pair 10 0
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import FormatError
from .forest import ParseTree
from .fsa import Fsa, Transition
from .grammar import Grammar, Nonterminal, Rule, Terminal
from .terms import Struct, Var, make_list

LEXICAL_OFFSET = 2  # rules 0 (top) and 1 (combination) precede the lexical entries


@dataclass(frozen=True)
class PcpInstance:
    a: tuple
    b: tuple
    alphabet: frozenset = frozenset()

    def __post_init__(self):
        if len(self.a) != len(self.b) or not self.a:
            raise ValueError("a PCP instance needs two non-empty lists of equal length")
        if any(not w for w in self.a + self.b):
            raise ValueError("PCP strings must be non-empty")
        used = frozenset("".join(self.a + self.b))
        if not self.alphabet:
            object.__setattr__(self, "alphabet", used)
        elif not used <= self.alphabet:
            raise ValueError(f"symbols outside the alphabet: {sorted(used - self.alphabet)}")

    @classmethod
    def of(cls, a: Sequence[str], b: Sequence[str]) -> "PcpInstance":
        return cls(tuple(a), tuple(b))

    def __len__(self):
        return len(self.a)


@dataclass(frozen=True)
class PcpSolution:
    indices: tuple  # 1-based
    witness: str


def verify_solution(p: PcpInstance, sol: PcpSolution | Sequence[int]) -> bool:
    indices = sol.indices if isinstance(sol, PcpSolution) else tuple(sol)
    if not indices or any(not 1 <= i <= len(p) for i in indices):
        return False
    top = "".join(p.a[i - 1] for i in indices)
    bottom = "".join(p.b[i - 1] for i in indices)
    if top != bottom:
        return False
    return not isinstance(sol, PcpSolution) or sol.witness == top


def solve_bounded(p: PcpInstance, max_m: int) -> PcpSolution | None:
    """Shortest, then lexicographically least, solution of length <= max_m."""
    if max_m < 1:
        raise ValueError("max_m must be at least 1")
    k = len(p)

    def search(prefix, top, bottom, remaining):
        if remaining == 0:
            return prefix if top == bottom else None
        for i in range(1, k + 1):
            t, b = top + p.a[i - 1], bottom + p.b[i - 1]
            if not (t.startswith(b) or b.startswith(t)):
                continue
            found = search(prefix + (i,), t, b, remaining - 1)
            if found is not None:
                return found
        return None

    for m in range(1, max_m + 1):
        found = search((), "", "", m)
        if found is not None:
            return PcpSolution(found, "".join(p.a[i - 1] for i in found))
    return None


def encode(p: PcpInstance, loop_weight: float = 1.0) -> tuple[Grammar, Fsa]:
    a0, a, a1 = Var("A0"), Var("A"), Var("A1")
    b0, b, b1 = Var("B0"), Var("B"), Var("B1")
    x = Var("X")
    nil = make_list([])
    r = lambda *args: Struct("r", args)  # noqa: E731
    rules = [
        Rule(Struct("s"), (Nonterminal(r(x, nil, x, nil)),)),
        Rule(r(a0, a, b0, b), (Nonterminal(r(a0, a1, b0, b1)), Nonterminal(r(a1, a, b1, b)))),
    ]
    for top, bottom in zip(p.a, p.b):
        head = r(make_list([Struct(c) for c in top], a), a,
                 make_list([Struct(c) for c in bottom], b), b)
        rules.append(Rule(head, (Terminal("x"),)))
    fsa = Fsa.build([Transition("q", "x", "q", loop_weight)], ["q"], ["q"])
    return Grammar(tuple(rules), Struct("s")), fsa


def recover_indices(tree: ParseTree) -> tuple:
    """Pair indices of the lexical entries along the frontier, left to right."""
    out = []
    for node in tree.nodes():
        con = node.rule.constraint
        if con is not None and con.rule_index >= LEXICAL_OFFSET:
            out.append(con.rule_index - LEXICAL_OFFSET + 1)
    return tuple(out)


def solution_from_tree(p: PcpInstance, tree: ParseTree) -> PcpSolution:
    indices = recover_indices(tree)
    return PcpSolution(indices, "".join(p.a[i - 1] for i in indices))


# ------------------------------------------------------------------ text io

def read_instance(text: str) -> PcpInstance:
    a, b, alphabet = [], [], None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, *fields = line.split()
        if keyword == "pair" and len(fields) == 2:
            a.append(fields[0])
            b.append(fields[1])
        elif keyword == "alphabet" and fields:
            alphabet = frozenset(fields)
        else:
            raise FormatError("expected 'pair TOP BOTTOM' or 'alphabet SYM...'", lineno)
    try:
        return PcpInstance(tuple(a), tuple(b), alphabet or frozenset())
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def format_instance(p: PcpInstance) -> str:
    lines = [f"alphabet {' '.join(sorted(p.alphabet))}"]
    lines += [f"pair {top} {bottom}" for top, bottom in zip(p.a, p.b)]
    return "\n".join(lines) + "\n"

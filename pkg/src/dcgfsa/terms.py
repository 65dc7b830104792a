"""First-order terms, idempotent substitutions and unification.

Terms use a Prolog-like surface syntax::

    f(a, [1,0|B], X)

Identifiers starting with an uppercase letter or underscore are variables,
everything else (lowercase identifiers, digit strings, quoted atoms) is an
atom. Lists are sugar for ``'.'/2`` cells ending in ``[]``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from .errors import FormatError


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class Struct:
    functor: str
    args: tuple = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def __str__(self):
        return format_term(self)


Term = Union[Var, Struct]
Substitution = dict  # variable name -> Term, kept idempotent

NIL = Struct("[]")
CONS = "."


def atom(name: str) -> Struct:
    return Struct(name)


def make_list(items: Iterable[Term], tail: Term = NIL) -> Term:
    out = tail
    for item in reversed(list(items)):
        out = Struct(CONS, (item, out))
    return out


def is_atomic(t: Term) -> bool:
    return isinstance(t, Struct) and not t.args


def is_ground(t: Term) -> bool:
    return not any(True for _ in _iter_vars(t))


def _iter_vars(t: Term) -> Iterator[str]:
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            yield x.name
        else:
            stack.extend(reversed(x.args))


def variables(t: Term) -> list[str]:
    """Variable names of ``t`` in order of first occurrence."""
    return list(dict.fromkeys(_iter_vars(t)))


def occurs(name: str, t: Term) -> bool:
    return any(v == name for v in _iter_vars(t))


def apply(s: Substitution, t: Term) -> Term:
    """Replace bound variables of ``t`` until no bound variable remains."""
    if not s:
        return t
    if isinstance(t, Var):
        bound = s.get(t.name)
        if bound is None:
            return t
        return apply(s, bound)
    if not t.args:
        return t
    return Struct(t.functor, tuple(apply(s, a) for a in t.args))


def walk(bindings: dict, t: Term) -> Term:
    while isinstance(t, Var):
        nxt = bindings.get(t.name)
        if nxt is None:
            return t
        t = nxt
    return t


def resolve(bindings: dict, t: Term) -> Term:
    """Fully apply triangular ``bindings`` to ``t``."""
    t = walk(bindings, t)
    if isinstance(t, Var) or not t.args:
        return t
    return Struct(t.functor, tuple(resolve(bindings, a) for a in t.args))


def _occurs_walk(name: str, t: Term, bindings: dict) -> bool:
    stack = [t]
    while stack:
        x = walk(bindings, stack.pop())
        if isinstance(x, Var):
            if x.name == name:
                return True
        else:
            stack.extend(x.args)
    return False


def unify_in_place(t1: Term, t2: Term, bindings: dict, *, occurs_check: bool = True) -> bool:
    """Extend triangular ``bindings`` (mutated) to unify ``t1`` and ``t2``.

    On failure ``bindings`` may hold partial work and should be discarded.
    """
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        a = walk(bindings, a)
        b = walk(bindings, b)
        if a is b or a == b:
            continue
        if isinstance(b, Var) and not isinstance(a, Var):
            a, b = b, a
        if isinstance(a, Var):
            if occurs_check and not isinstance(b, Var) and _occurs_walk(a.name, b, bindings):
                return False
            bindings[a.name] = b
            continue
        if a.functor != b.functor or len(a.args) != len(b.args):
            return False
        stack.extend(zip(a.args, b.args))
    return True


def unify(t1: Term, t2: Term, s: Substitution | None = None, *,
          occurs_check: bool = True) -> Substitution | None:
    """Most general unifier of ``t1`` and ``t2`` extending ``s``, or None.

    ``s`` must be idempotent; the result is idempotent as well. With
    ``occurs_check=False`` the bindings are returned unresolved (they may be
    cyclic, and ``apply`` does not terminate on cyclic bindings).
    """
    bindings = {} if s is None else dict(s)
    if not unify_in_place(t1, t2, bindings, occurs_check=occurs_check):
        return None
    if not occurs_check:
        return bindings
    if len(bindings) == (0 if s is None else len(s)):
        return bindings
    return {k: resolve(bindings, v) for k, v in bindings.items()}


def rename_apart(t: Term, used: Iterable[str]) -> Term:
    """A variant of ``t`` sharing no variable name with ``used``."""
    used = set(used)
    own = variables(t)
    taken = used | set(own)
    mapping = {}
    for name in own:
        if name not in used:
            continue
        for i in itertools.count(1):
            candidate = f"{name}{i}"
            if candidate not in taken:
                break
        taken.add(candidate)
        mapping[name] = Var(candidate)
    if not mapping:
        return t
    return apply(mapping, t)


def _rename(t: Term, mapping: dict, fresh) -> Term:
    if isinstance(t, Var):
        v = mapping.get(t.name)
        if v is None:
            v = mapping[t.name] = fresh(len(mapping))
        return v
    if not t.args:
        return t
    return Struct(t.functor, tuple(_rename(a, mapping, fresh) for a in t.args))


def canonical_all(terms: Iterable[Term]) -> tuple:
    """Rename variables jointly to ``_0, _1, ...`` by first occurrence.

    Two term tuples are variants of each other iff their canonical forms are
    equal.
    """
    mapping: dict = {}
    fresh = lambda i: Var(f"_{i}")  # noqa: E731
    return tuple(_rename(t, mapping, fresh) for t in terms)


def canonical(t: Term) -> Term:
    return canonical_all((t,))[0]


def is_variant(t1: Term, t2: Term) -> bool:
    return canonical(t1) == canonical(t2)


class Renamer:
    """Produces copies of terms with globally fresh variables ``_G<n>``."""

    def __init__(self):
        self._counter = itertools.count()

    def copy(self, *terms: Term) -> tuple:
        mapping: dict = {}
        fresh = lambda i: Var(f"_G{next(self._counter)}")  # noqa: E731
        return tuple(_rename(t, mapping, fresh) for t in terms)


# ---------------------------------------------------------------- printing

_PLAIN_ATOM = re.compile(r"[a-z][A-Za-z0-9_]*|[0-9]+\Z")


def format_atom(name: str) -> str:
    if _PLAIN_ATOM.fullmatch(name) or name == "[]":
        return name
    escaped = name.replace("\\", "\\\\").replace("'", "\\'")
    return f"'{escaped}'"


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if t.functor == CONS and len(t.args) == 2:
        items = []
        while isinstance(t, Struct) and t.functor == CONS and len(t.args) == 2:
            items.append(format_term(t.args[0]))
            t = t.args[1]
        body = ",".join(items)
        if t == NIL:
            return f"[{body}]"
        return f"[{body}|{format_term(t)}]"
    if not t.args:
        return format_atom(t.functor)
    return f"{format_atom(t.functor)}({','.join(format_term(a) for a in t.args)})"


# ----------------------------------------------------------------- reading

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<atom>[a-z][A-Za-z0-9_]*|[0-9]+)
  | (?P<quoted>'(?:[^'\\]|\\.)*')
  | (?P<punct>[()\[\],|+\-{}:])
""", re.VERBOSE)


class Scanner:
    """Token reader over one line of text, shared by all file formats."""

    def __init__(self, text: str, line: int | None = None):
        self.text = text
        self.line = line
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None:
                raise FormatError(f"unexpected character {text[pos]!r}", line)
            pos = m.end()
            kind = m.lastgroup
            if kind == "ws":
                continue
            value = m.group()
            if kind == "quoted":
                kind = "atom"
                value = re.sub(r"\\(.)", r"\1", value[1:-1])
            self.tokens.append((kind, value))
        self.i = 0

    def error(self, message):
        return FormatError(message, self.line)

    def peek(self):
        if self.i < len(self.tokens):
            return self.tokens[self.i]
        return (None, None)

    def at_end(self) -> bool:
        return self.i >= len(self.tokens)

    def next(self):
        tok = self.peek()
        if tok[0] is None:
            raise self.error("unexpected end of line")
        self.i += 1
        return tok

    def accept(self, value) -> bool:
        if self.peek()[1] == value and self.peek()[0] in ("punct", "arrow"):
            self.i += 1
            return True
        return False

    def expect(self, value):
        if not self.accept(value):
            raise self.error(f"expected {value!r}, got {self.peek()[1]!r}")

    def name(self) -> str:
        """An atom name (used for terminal symbols and state names)."""
        kind, value = self.next()
        if kind != "atom":
            raise self.error(f"expected a symbol, got {value!r}")
        return value

    def term(self) -> Term:
        kind, value = self.next()
        if kind == "var":
            return Var(value)
        if kind == "atom":
            if self.accept("("):
                args = [self.term()]
                while self.accept(","):
                    args.append(self.term())
                self.expect(")")
                return Struct(value, tuple(args))
            return Struct(value)
        if kind == "punct" and value == "[":
            if self.accept("]"):
                return NIL
            items = [self.term()]
            while self.accept(","):
                items.append(self.term())
            tail = self.term() if self.accept("|") else NIL
            self.expect("]")
            return make_list(items, tail)
        raise self.error(f"unexpected token {value!r}")

    def finish(self):
        if not self.at_end():
            raise self.error(f"trailing input {self.peek()[1]!r}")


def parse_term(text: str) -> Term:
    sc = Scanner(text)
    t = sc.term()
    sc.finish()
    return t

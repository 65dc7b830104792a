from functools import lru_cache

import pytest

from dcgfsa.errors import FormatError
from dcgfsa.grammar import (Grammar, Nonterminal, Rule, Terminal, cf_skeleton, format_grammar,
                            is_context_free, nullable, offline_parsable, read_grammar,
                            skeleton_cycle, statistics)
from dcgfsa.pcp import encode
from dcgfsa.terms import Struct, parse_term

from battery import ANBN, CFGS, DCGS, PCP_BATTERY, PCP_EXAMPLE

G = read_grammar


class TestContextFree:
    def test_anbn(self):
        assert is_context_free(ANBN)

    def test_pcp_encoding(self):
        g, _ = encode(PCP_EXAMPLE)
        assert not is_context_free(g)

    def test_empty(self):
        assert is_context_free(Grammar((), Struct("s")))

    def test_top_counts(self):
        assert not is_context_free(G("top s(x)\nrule s(x) -> -a\n"))


class TestSkeleton:
    def test_pcp(self):
        g, _ = encode(PCP_EXAMPLE)
        sk = cf_skeleton(g)
        assert format_grammar(sk) == (
            "top s\n"
            "rule s -> +'r/4'\n"
            "rule 'r/4' -> +'r/4' +'r/4'\n"
            "rule 'r/4' -> -x\n"
            "rule 'r/4' -> -x\n"
            "rule 'r/4' -> -x\n")
        # one-for-one: skeleton rule i comes from rule i
        assert [len(r.rhs) for r in sk.rules] == [len(r.rhs) for r in g.rules]

    @pytest.mark.parametrize("name", sorted(CFGS))
    def test_identity_on_cfgs(self, name):
        assert cf_skeleton(CFGS[name]) == CFGS[name]

    def test_unary(self):
        sk = cf_skeleton(G("top s(a)\nrule s(X) -> +s(f(X))\n"))
        assert format_grammar(sk) == "top 's/1'\nrule 's/1' -> +'s/1'\n"

    @pytest.mark.parametrize("g", list(DCGS.values()) + [encode(p)[0] for p in PCP_BATTERY])
    def test_idempotent_and_context_free(self, g):
        sk = cf_skeleton(g)
        assert is_context_free(sk)
        assert cf_skeleton(sk) == sk


class TestOfflineParsable:
    @pytest.mark.parametrize("p", PCP_BATTERY)
    def test_pcp_encodings(self, p):
        assert offline_parsable(encode(p)[0])

    def test_anbn(self):
        assert offline_parsable(ANBN)

    def test_unit_loop(self):
        g = G("top s\nrule s -> +s\n")
        assert not offline_parsable(g)
        assert skeleton_cycle(g) == [parse_term("s")]

    def test_nullable_sidekick(self):
        g = G("top s\nrule s -> +t +s\nrule t ->\n")
        assert nullable(g) == {parse_term("t")}
        assert not offline_parsable(g)

    def test_consuming_recursion_is_fine(self):
        assert offline_parsable(G("top s\nrule s -> +s -a\nrule s -> -b\n"))

    def test_longer_cycle(self):
        g = CFGS["unit_cycle"]
        assert set(skeleton_cycle(g)) == {parse_term("s"), parse_term("u")}


def _count_trees(g, w, height):
    """Skeleton derivation trees of ``w`` of height <= ``height`` (independent counter)."""
    sk = cf_skeleton(g)
    w = tuple(w)

    @lru_cache(maxsize=None)
    def cat(a, i, j, h):
        if h == 0:
            return 0
        return sum(seq(r.rhs, i, j, h - 1) for r in sk.rules if r.lhs == a)

    @lru_cache(maxsize=None)
    def seq(items, i, j, h):
        if not items:
            return 1 if i == j else 0
        first, rest = items[0], items[1:]
        if isinstance(first, Terminal):
            ok = i < len(w) and w[i] == first.symbol
            return seq(rest, i + 1, j, h) if ok else 0
        return sum(cat(first.category, i, k, h) * seq(rest, k, j, h)
                   for k in range(i, j + 1))

    return cat(sk.top, 0, len(w), height)


@pytest.mark.parametrize("g, w", [
    (ANBN, "aabb"), (CFGS["dyck"], "abab"), (CFGS["ambiguous"], "abab"),
    (CFGS["left_rec"], "baaa"), (DCGS["copy"], "abab"), (DCGS["anbncn"], "abc"),
    (encode(PCP_EXAMPLE)[0], "xxxx"),
])
def test_offline_parsable_means_finitely_many_trees(g, w):
    assert offline_parsable(g)
    counts = [_count_trees(g, w, h) for h in range(1, 3 * len(w) + 6)]
    assert counts[-1] == counts[-2] == counts[-3]


def test_cycle_means_unboundedly_many_trees():
    g = CFGS["unit_cycle"]
    counts = [_count_trees(g, "ab", h) for h in range(2, 12)]
    assert counts == sorted(counts) and counts[-1] > counts[0]


class TestText:
    @pytest.mark.parametrize("g", list(CFGS.values()) + list(DCGS.values())
                             + [encode(p)[0] for p in PCP_BATTERY])
    def test_round_trip(self, g):
        assert read_grammar(format_grammar(g)) == g

    def test_dcg_rule(self):
        g = G("top s\nrule r([1|A],A,[1,1,1|B],B) -> -x\n")
        (r,) = g.rules
        assert r.lhs == parse_term("r([1|A],A,[1,1,1|B],B)")
        assert r.rhs == (Terminal("x"),)

    def test_empty_rhs(self):
        assert G("top s\nrule s ->\n").rules == (Rule(parse_term("s")),)

    @pytest.mark.parametrize("text, line", [
        ("rule s -> -a\n", None),
        ("top s\nrule s -> a\n", 2),
        ("top s\nrule s - a\n", 2),
        ("top s\ntop t\n", 2),
        ("top s\nrule X -> -a\n", 2),
        ("top s\nrule s -> +X\n", 2),
        ("top s\nlemma s\n", 2),
    ])
    def test_errors(self, text, line):
        with pytest.raises(FormatError) as exc:
            G(text)
        assert exc.value.line == line


def test_statistics():
    stats = statistics(encode(PCP_EXAMPLE)[0])
    assert stats["rules"] == 5
    assert stats["nonterminals"] == ["'r/4'", "s"]
    assert stats["terminals"] == ["x"]
    assert stats["max_rhs"] == 2 and stats["epsilon_rules"] == 0


def test_nonterminal_items_hold_terms():
    g, _ = encode(PCP_EXAMPLE)
    assert isinstance(g.rules[0].rhs[0], Nonterminal)
    assert g.rules[0].rhs[0].category == parse_term("r(X,[],X,[])")

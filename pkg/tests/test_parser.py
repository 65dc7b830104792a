import time

import pytest

from dcgfsa.barhillel import intersect_naive, language_upto, reduce
from dcgfsa.errors import CyclicInputError, NotContextFreeError
from dcgfsa.forest import extract_trees, iter_trees, read_forest, tree_terms
from dcgfsa.fsa import Fsa, Transition, accepts, from_string, read_fsa
from dcgfsa.parser import (CfgExact, DcgAcyclicOnly, DcgSkeleton, DcgThreshold,
                           DcgUnrestricted, Status, Unknown, _Tabler, emptiness_verdict,
                           intersect_cfg, intersect_dcg, skeleton_refutes, strategy_from_name)
from dcgfsa.pcp import PcpInstance, encode, recover_indices
from dcgfsa.terms import is_ground

from battery import (ANBN, CFGS, DCG_SENTENCES, DCGS, EVEN_AS, FSAS, PCP_EXAMPLE, PCP_NOSOL,
                     lattice, weighted_loop)
from oracles import brute_language, dcg_derives

SENTENCE_FOREST_7 = read_forest("""
p(s,2,2) ->
p(s,1,3) -> p(-a,1,2) p(+s,2,2) p(-b,2,3)
p(s,0,4) -> p(-a,0,1) p(+s,1,3) p(-b,3,4)
p(a,1,2) -> a
p(a,0,1) -> a
p(b,2,3) -> b
p(b,3,4) -> b
""")

CYCLIC_FOREST_9 = read_forest("""
p(s,q0,q0) ->
p(s,q1,q1) ->
p(s,q1,q2) -> p(-a,q1,q0) p(+s,q0,q0) p(-b,q0,q2)
p(s,q0,q2) -> p(-a,q0,q1) p(+s,q1,q2) p(-b,q2,q2)
p(s,q1,q2) -> p(-a,q1,q0) p(+s,q0,q2) p(-b,q2,q2)
p(a,q0,q1) -> a
p(a,q1,q0) -> a
p(b,q0,q2) -> b
p(b,q2,q2) -> b
""")

DCG_STRATEGIES = [DcgAcyclicOnly(), DcgSkeleton(), DcgThreshold(0.01), DcgUnrestricted(12)]


def dcg_budget(w):
    return 3 * len(w) + 6


def derivations(forest, limit=500):
    """Validated trees as (frontier, rule indices in pre-order)."""
    out = set()
    for t in extract_trees(forest, limit):
        idx = tuple(n.rule.constraint.rule_index for n in t.nodes() if n.rule.constraint)
        out.add((t.frontier(), idx))
    return out


class TestCfg:
    def test_sentence_forest(self):
        f = intersect_cfg(ANBN, from_string("aabb"))
        extra = set(f.rules) - set(SENTENCE_FOREST_7.rules)
        # the tabled parser also records the epsilon answers at positions 0 and 1
        assert {str(r) for r in extra} == {"p(s,0,0) ->", "p(s,1,1) ->"}
        assert set(SENTENCE_FOREST_7.rules) <= set(f.rules)
        assert set(reduce(f).rules) == set(SENTENCE_FOREST_7.rules)
        assert [str(s) for s in f.starts] == ["p(s,0,4)"]

    def test_cyclic_forest(self):
        f = intersect_cfg(ANBN, EVEN_AS)
        assert len(f.rules) == 9
        assert set(f.rules) == set(CYCLIC_FOREST_9.rules)
        assert [str(s) for s in f.starts] == ["p(s,q0,q2)"]

    def test_empty_sentence(self):
        f = intersect_cfg(ANBN, from_string([]))
        assert [str(r) for r in f.rules] == ["p(s,0,0) ->"]
        assert [str(s) for s in f.starts] == ["p(s,0,0)"]

    def test_dcg_rejected(self):
        with pytest.raises(NotContextFreeError):
            intersect_cfg(encode(PCP_EXAMPLE)[0], from_string("x"))

    @pytest.mark.parametrize("g", CFGS.values(), ids=list(CFGS))
    @pytest.mark.parametrize("m", FSAS.values(), ids=list(FSAS))
    def test_matches_product_and_brute_force(self, g, m):
        expected = brute_language(g, m, 6, "ab")
        assert language_upto(intersect_cfg(g, m), 6) == expected
        assert language_upto(reduce(intersect_naive(g, m)), 6) == expected

    @pytest.mark.parametrize("g", CFGS.values(), ids=list(CFGS))
    @pytest.mark.parametrize("m", FSAS.values(), ids=list(FSAS))
    def test_forest_is_no_larger_than_product(self, g, m):
        assert len(intersect_cfg(g, m).rules) <= len(intersect_naive(g, m).rules)

    def test_deterministic(self):
        a = [str(r) for r in intersect_cfg(CFGS["dyck"], FSAS["sigma_star"]).rules]
        b = [str(r) for r in intersect_cfg(CFGS["dyck"], FSAS["sigma_star"]).rules]
        assert a == b and len(a) == len(set(a))

    @pytest.mark.parametrize("n", [8, 16, 32, 64])
    def test_table_growth_is_quadratic_at_most(self, n):
        w = ["a"] * (n // 2) + ["b"] * (n // 2)
        tabler = _Tabler(ANBN, from_string(w))
        f = tabler.run()
        assert len(tabler.entries) <= n * n
        assert [t.frontier() for t in extract_trees(f, 2)] == [tuple(w)]

    def test_quadratic_table_for_ambiguous_grammar(self):
        for n in (4, 8, 16):
            tabler = _Tabler(CFGS["ambiguous"], from_string("a" * n))
            tabler.run()
            assert len(tabler.entries) <= n + 1


class TestStrategies:
    def test_parameters(self):
        for bad in (0.0, 1.0, -1, 2):
            with pytest.raises(ValueError):
                DcgThreshold(bad)
        with pytest.raises(ValueError):
            DcgUnrestricted(0)

    def test_by_name(self):
        assert strategy_from_name("threshold", tau=0.2) == DcgThreshold(0.2)
        assert strategy_from_name("unrestricted", depth=3) == DcgUnrestricted(3)
        assert strategy_from_name("cfg") == CfgExact()
        with pytest.raises(ValueError):
            strategy_from_name("magic")

    def test_cfg_strategy_is_not_a_dcg_strategy(self):
        with pytest.raises(ValueError):
            intersect_dcg(ANBN, EVEN_AS, CfgExact())


class TestPcp:
    def test_threshold_finds_solution(self):
        g, m = encode(PCP_EXAMPLE, 0.5)
        f = intersect_dcg(g, m, DcgThreshold(0.05))
        trees = extract_trees(f, 1)
        assert trees and trees[0].frontier() == tuple("xxxx")
        assert recover_indices(trees[0]) == (2, 1, 1, 3)

    def test_threshold_no_solution(self):
        g, m = encode(PCP_NOSOL, 0.5)
        f = intersect_dcg(g, m, DcgThreshold(0.05))
        assert extract_trees(f, 1) == []

    def test_acyclic_rejects_loop(self):
        g, m = encode(PCP_EXAMPLE)
        with pytest.raises(CyclicInputError, match="input automaton is cyclic: q -> q"):
            intersect_dcg(g, m, DcgAcyclicOnly())

    def test_acyclic_chain(self):
        g, _ = encode(PCP_EXAMPLE)
        f = intersect_dcg(g, from_string("xxxx"), DcgAcyclicOnly())
        (t,) = extract_trees(f, 1)
        assert t.frontier() == tuple("xxxx")
        assert recover_indices(t) == (2, 1, 1, 3)

    def test_unrestricted(self):
        g, m = encode(PCP_EXAMPLE)
        f = intersect_dcg(g, m, DcgUnrestricted(10))
        assert recover_indices(extract_trees(f, 1)[0]) == (2, 1, 1, 3)
        g, m = encode(PCP_NOSOL)
        assert isinstance(intersect_dcg(g, m, DcgUnrestricted(10)), Unknown)

    def test_witness_instantiates_to_ground_terms(self):
        g, _ = encode(PCP_EXAMPLE)
        f = intersect_dcg(g, from_string("xxxx"), DcgAcyclicOnly())
        (t,) = extract_trees(f, 1)
        terms = tree_terms(t, f.top)
        assert terms and all(is_ground(x) for x in terms.values())


class TestVerdict:
    def test_nonempty(self):
        v = emptiness_verdict(ANBN, EVEN_AS, CfgExact())
        assert v.status is Status.NONEMPTY
        assert v.witness.frontier() == tuple("aabb")

    def test_empty(self):
        b_astar = read_fsa("start q0\nfinal q1\ntrans q0 b q1\ntrans q1 a q1\n")
        assert emptiness_verdict(ANBN, b_astar, CfgExact()).status is Status.EMPTY

    def test_unrestricted_on_nosol(self):
        g, m = encode(PCP_NOSOL)
        v = emptiness_verdict(g, m, DcgUnrestricted(10))
        assert v.status is Status.UNKNOWN

    @pytest.mark.parametrize("strat", [DcgSkeleton(), DcgThreshold(0.05), DcgUnrestricted(6)])
    def test_never_empty_on_pcp_loop(self, strat):
        g, m = encode(PCP_NOSOL, 0.5)
        assert emptiness_verdict(g, m, strat).status is Status.UNKNOWN

    def test_acyclic_empty_is_final(self):
        g, _ = encode(PCP_NOSOL)
        for n in range(1, 7):
            v = emptiness_verdict(g, from_string(["x"] * n), DcgAcyclicOnly())
            assert v.status is Status.EMPTY

    def test_cyclic_empty_through_skeleton_refutation(self):
        g = DCGS["agreement"]
        m = read_fsa("start 0\nfinal 2\ntrans 0 he 1\ntrans 1 run 2\ntrans 2 zzz 2\n")
        assert skeleton_refutes(g, m)
        for strat in (DcgSkeleton(), DcgThreshold(0.5)):
            v = emptiness_verdict(g, m, strat)
            assert v.status is Status.EMPTY and "skeleton" in v.reason

    def test_step_limit_gives_unknown(self):
        g, m = encode(PCP_EXAMPLE, 0.9)
        v = emptiness_verdict(g, m, DcgThreshold(0.001), max_steps=50)
        assert v.status is Status.UNKNOWN and "gave up" in v.reason


# ------------------------------------------------ DCG oracle battery

SENTENCE_CASES = [(name, w) for name, ws in DCG_SENTENCES.items() for w in ws]


@pytest.mark.parametrize("name, w", SENTENCE_CASES)
def test_acyclic_agrees_with_meta_interpreter(name, w):
    g = DCGS[name]
    f = intersect_dcg(g, from_string(w), DcgAcyclicOnly())
    found = bool(extract_trees(f, 1))
    assert found == dcg_derives(g, w, dcg_budget(w))


@pytest.mark.parametrize("name, w", SENTENCE_CASES)
def test_skeleton_is_complete_on_word_graphs(name, w):
    g = DCGS[name]
    m = from_string(w)
    exact = derivations(intersect_dcg(g, m, DcgAcyclicOnly()))
    assert derivations(intersect_dcg(g, m, DcgSkeleton())) == exact


LATTICES = {
    "agreement": lattice(["he", "they"], ["runs", "run"], ["and"], ["runs", "run"]),
    "copy": lattice(["a", "b"], ["a", "b"], ["a", "b"], ["a", "b"]),
    "anbncn": lattice(["a"], ["b", "a"], ["c", "b"]),
}


@pytest.mark.parametrize("name", sorted(LATTICES))
def test_lattices_all_strategies(name):
    g, m = DCGS[name], LATTICES[name]
    exact = derivations(intersect_dcg(g, m, DcgAcyclicOnly()))
    assert exact
    for frontier, _ in exact:
        assert accepts(m, frontier) and dcg_derives(g, frontier, dcg_budget(frontier))
    for strat in DCG_STRATEGIES[1:]:
        f = intersect_dcg(g, m, strat)
        assert derivations(f) == exact, strat


CYCLIC_DCG_CASES = [
    ("copy", weighted_loop("ab", 0.5)),
    ("anbncn", weighted_loop("abc", 0.6)),
    ("agreement", read_fsa(
        "start 0\nfinal 2\ntrans 0 he 1\ntrans 0 they 1\ntrans 1 run 2 0.9\n"
        "trans 1 runs 2 0.9\ntrans 2 and 1 0.5\n")),
]


@pytest.mark.parametrize("name, m", CYCLIC_DCG_CASES, ids=[c[0] for c in CYCLIC_DCG_CASES])
@pytest.mark.parametrize("strat", [DcgSkeleton(), DcgThreshold(0.01), DcgUnrestricted(8)],
                         ids=["skeleton", "threshold", "unrestricted"])
def test_soundness_on_cyclic_input(name, m, strat):
    g = DCGS[name]
    f = intersect_dcg(g, m, strat)
    if isinstance(f, Unknown):
        return
    trees = list(iter_trees(f, max_nodes=16, budget=3000))
    for t in trees:
        w = t.frontier()
        assert accepts(m, w) and dcg_derives(g, w, dcg_budget(w))


@pytest.mark.parametrize("name, m", CYCLIC_DCG_CASES, ids=[c[0] for c in CYCLIC_DCG_CASES])
def test_threshold_monotone(name, m):
    g = DCGS[name]
    loose = intersect_dcg(g, m, DcgThreshold(0.01))
    tight = intersect_dcg(g, m, DcgThreshold(0.1))
    assert set(tight.rules) <= set(loose.rules)
    assert derivations(tight) <= derivations(loose)


def test_lower_threshold_adds_rules():
    g, m = DCGS["copy"], weighted_loop("ab", 0.5)
    loose = intersect_dcg(g, m, DcgThreshold(0.01))
    tight = intersect_dcg(g, m, DcgThreshold(0.1))
    assert set(tight.rules) < set(loose.rules)


@pytest.mark.parametrize("name, m", CYCLIC_DCG_CASES, ids=[c[0] for c in CYCLIC_DCG_CASES])
def test_threshold_terminates(name, m):
    start = time.perf_counter()
    intersect_dcg(DCGS[name], m, DcgThreshold(0.01))
    assert time.perf_counter() - start < 10


def test_threshold_prunes_low_probability_parses():
    g, _ = encode(PCP_EXAMPLE)
    _, m = encode(PCP_EXAMPLE, 0.5)
    # 0.5 ** 4 = 0.0625 survives 0.05 but not 0.07
    assert extract_trees(intersect_dcg(g, m, DcgThreshold(0.05)), 1)
    assert not extract_trees(intersect_dcg(g, m, DcgThreshold(0.07)), 1)


def test_weights_ignored_without_threshold():
    m = Fsa.build([Transition("0", "x", "1", 0.01)], ["0"], ["1"])
    g, _ = encode(PcpInstance.of(["1"], ["1"]))
    assert extract_trees(intersect_dcg(g, m, DcgAcyclicOnly()), 1)

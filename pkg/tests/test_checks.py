import random

import pytest

from dpllc.checks import (
    GuidedScriptError,
    check_decision_dnnf,
    check_fbdd,
    check_obdd,
    circuit_to_cnf,
    compile_guided,
    isomorphic,
)
from dpllc.cnf import Cnf, brute_force_count
from dpllc.compiler import (
    CompileConfig,
    VarOrder,
    compile_decomposed,
    compile_free,
    compile_ordered,
)
from dpllc.queries import LanguageError, model_count
from dpllc.store import FALSE, TRUE, Circuit, NodeStore, stats

from util import random_cnf, running_cnf


# --- membership predicates ---------------------------------------------------


def test_fbdd_accepts_compiled_and_sinks():
    assert check_fbdd(compile_free(running_cnf())).verdict
    assert check_fbdd(Circuit(NodeStore(), TRUE, 0)).verdict


def test_fbdd_rejects_repeated_variable():
    s = NodeStore()
    inner = s.get_node(1, FALSE, TRUE)
    report = check_fbdd(Circuit(s, s.get_node(1, inner, TRUE), 1))
    assert not report.verdict
    assert "variable 1" in report.witness


def test_fbdd_rejects_non_decision_nodes():
    s = NodeStore()
    report = check_fbdd(Circuit(s, s.literal(1), 1))
    assert not report.verdict and "non-decision" in report.witness


def test_obdd_accepts_ordered_output():
    order = VarOrder((2, 3, 1))
    circuit = compile_ordered(running_cnf(), order)
    assert check_obdd(circuit, order).verdict


def test_obdd_rejects_conflicting_paths():
    # x1 above x2 on one path, x2 above x1 on the other.
    s = NodeStore()
    a = s.get_node(2, FALSE, s.get_node(1, FALSE, TRUE))
    b = s.get_node(1, FALSE, s.get_node(2, FALSE, TRUE))
    circuit = Circuit(s, s.get_node(3, a, b), 3)
    assert check_fbdd(circuit).verdict
    report = check_obdd(circuit)
    assert not report.verdict
    assert "conflicting" in report.witness
    explicit = check_obdd(circuit, VarOrder((3, 1, 2)))
    assert not explicit.verdict


def test_obdd_single_variable_any_order():
    s = NodeStore()
    circuit = Circuit(s, s.get_node(2, FALSE, TRUE), 3)
    for perm in ((1, 2, 3), (3, 2, 1), (2, 1, 3)):
        assert check_obdd(circuit, VarOrder(perm)).verdict


def test_obdd_recovers_an_order():
    circuit = compile_ordered(running_cnf(), VarOrder((3, 1, 2)))
    report = check_obdd(circuit)
    assert report.verdict
    rank = {v: i for i, v in enumerate(report.order)}
    assert rank[3] < rank[1] < rank[2]
    assert check_obdd(circuit, VarOrder(report.order)).verdict


def test_decision_dnnf_accepts_compiled():
    assert check_decision_dnnf(compile_decomposed(running_cnf())).verdict


def test_decision_dnnf_rejects_shared_variables():
    s = NodeStore()
    a = s.get_node(1, FALSE, s.get_node(2, FALSE, TRUE))
    b = s.get_node(1, TRUE, FALSE)
    report = check_decision_dnnf(Circuit(s, s.get_and_node([a, b]), 2))
    assert not report.verdict
    assert "share variable 1" in report.witness


def test_every_fbdd_is_decision_dnnf():
    rng = random.Random(97)
    for _ in range(20):
        cnf = random_cnf(rng, max_vars=8, max_clauses=12)
        circuit = compile_free(cnf)
        assert check_fbdd(circuit).verdict
        assert check_decision_dnnf(circuit).verdict


def test_containment_chain():
    rng = random.Random(101)
    for _ in range(15):
        cnf = random_cnf(rng, max_vars=7, max_clauses=10)
        order = VarOrder.identity(cnf.num_vars)
        circuit = compile_ordered(cnf, order)
        assert check_obdd(circuit, order).verdict
        assert check_fbdd(circuit).verdict
        assert check_decision_dnnf(circuit).verdict


# --- inverse construction ------------------------------------------------------


def test_clauses_of_sinks():
    s = NodeStore()
    assert circuit_to_cnf(Circuit(s, TRUE, 2)).clauses == ()
    assert circuit_to_cnf(Circuit(s, FALSE, 2)).clauses == ((),)


def test_clauses_of_single_decision():
    s = NodeStore()
    guided = circuit_to_cnf(Circuit(s, s.get_node(1, FALSE, TRUE), 1))
    assert guided.clauses == (((1, ()),),)
    assert guided.base.clauses == ((0, (1,)),)


def test_clauses_reject_non_dnnf():
    s = NodeStore()
    a = s.get_node(1, FALSE, TRUE)
    b = s.get_node(1, TRUE, FALSE)
    with pytest.raises(LanguageError):
        circuit_to_cnf(Circuit(s, s.get_and_node([a, b]), 1))


def test_guided_roundtrip_sinks():
    s = NodeStore()
    for root in (TRUE, FALSE):
        circuit = Circuit(s, root, 2)
        again = compile_guided(circuit_to_cnf(circuit))
        assert again.root == root


def test_guided_roundtrip_all_modes():
    rng = random.Random(103)
    for _ in range(25):
        cnf = random_cnf(rng, max_vars=8, max_clauses=12)
        order = VarOrder(tuple(rng.sample(range(1, cnf.num_vars + 1), cnf.num_vars)))
        for circuit in (
            compile_free(cnf),
            compile_ordered(cnf, order),
            compile_decomposed(cnf),
            compile_decomposed(cnf, CompileConfig("decomposed", unit_propagation=False)),
        ):
            again = compile_guided(circuit_to_cnf(circuit))
            assert isomorphic(again, circuit)


def test_derived_clauses_preserve_semantics():
    rng = random.Random(107)
    for _ in range(20):
        cnf = random_cnf(rng, max_vars=7, max_clauses=10)
        circuit = compile_decomposed(cnf)
        base = circuit_to_cnf(circuit).base
        assert brute_force_count(base) == model_count(circuit)


def test_guided_script_errors():
    with pytest.raises(GuidedScriptError):
        # first literals disagree on the variable with no colors to split on
        from dpllc.checks import GuidedCnf

        compile_guided(GuidedCnf((((1, ()),), ((2, ()),)), 2))
    with pytest.raises(GuidedScriptError):
        from dpllc.checks import GuidedCnf

        compile_guided(GuidedCnf((((1, (5,)),), ((2, ()),)), 2))


# --- isomorphism ----------------------------------------------------------------


def test_isomorphic_basics():
    circuit = compile_free(running_cnf())
    assert isomorphic(circuit, circuit)
    s = NodeStore()
    assert not isomorphic(Circuit(s, FALSE, 1), Circuit(s, TRUE, 1))


def test_isomorphic_across_stores():
    cnf = running_cnf()
    order = VarOrder.identity(3)
    assert isomorphic(compile_ordered(cnf, order), compile_ordered(cnf, order))


def test_isomorphic_literal_is_compact_decision():
    s1 = NodeStore()
    lit = Circuit(s1, s1.literal(2), 2)
    s2 = NodeStore()
    expanded = Circuit(s2, s2.get_node(2, FALSE, TRUE), 2)
    assert isomorphic(lit, expanded)
    s3 = NodeStore()
    neg = Circuit(s3, s3.literal(-2), 2)
    assert not isomorphic(lit, neg)
    s4 = NodeStore()
    neg_expanded = Circuit(s4, s4.get_node(2, TRUE, FALSE), 2)
    assert isomorphic(neg, neg_expanded)


def test_isomorphic_matches_and_children_across_creation_orders():
    s1 = NodeStore()
    x = s1.get_node(1, FALSE, TRUE)
    y = s1.get_node(2, FALSE, TRUE)
    c1 = Circuit(s1, s1.get_and_node([x, y]), 2)
    s2 = NodeStore()
    y2 = s2.get_node(2, FALSE, TRUE)  # reversed creation order flips ids
    x2 = s2.get_node(1, FALSE, TRUE)
    c2 = Circuit(s2, s2.get_and_node([x2, y2]), 2)
    assert isomorphic(c1, c2)


def test_isomorphic_distinguishes_structure():
    s1 = NodeStore()
    c1 = Circuit(s1, s1.get_node(1, FALSE, TRUE), 1)
    s2 = NodeStore()
    c2 = Circuit(s2, s2.get_node(1, TRUE, FALSE), 1)
    assert not isomorphic(c1, c2)


def test_isomorphic_circuits_share_counts():
    rng = random.Random(109)
    for _ in range(10):
        cnf = random_cnf(rng, max_vars=7, max_clauses=10)
        a = compile_free(cnf)
        b = compile_guided(circuit_to_cnf(a))
        assert isomorphic(a, b)
        assert stats(a) == stats(b)
        assert model_count(a) == model_count(b)

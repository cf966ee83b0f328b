"""The two kernel backends must agree with each other byte for byte, and
both must agree with the plain Cnf-level operations."""

import random

import pytest

import dpllc.compiler as compiler
from dpllc import _kernel
from dpllc.cnf import Cnf, components, condition, unit_propagate
from dpllc.compiler import compute_key

from util import random_cnf

kernel_py = _kernel.load("py")
try:
    kernel_cy = _kernel.load("cy")
    BACKENDS = [kernel_py, kernel_cy]
except ImportError:
    kernel_cy = None
    BACKENDS = [kernel_py]

needs_cy = pytest.mark.skipif(kernel_cy is None, reason="compiled kernel not built")


def _cases(count=150, seed=23):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        cnf = random_cnf(rng, max_vars=10, max_clauses=20)
        lit = 0
        vs = sorted(cnf.variables())
        if vs:
            v = rng.choice(vs)
            lit = v if rng.random() < 0.5 else -v
        out.append((cnf, lit))
    return out


@pytest.mark.parametrize("kernel", BACKENDS, ids=lambda k: k.__name__.rsplit("_", 1)[-1])
def test_kernel_matches_cnf_ops(kernel):
    for cnf, lit in _cases():
        res = compute_key(cnf)
        assert kernel.has_empty(res) == cnf.has_empty_clause()
        if lit:
            assert kernel.condition(res, lit) == compute_key(condition(cnf, lit))
        if not cnf.has_empty_clause():
            parts = kernel.split_components(res)
            assert parts == [compute_key(p) for p in components(cnf)]
        residual, implied, conflict = unit_propagate(cnf)
        k_res, k_implied, k_conflict = kernel.propagate(res)
        assert (k_res, list(k_implied), k_conflict) == (
            compute_key(residual),
            implied,
            conflict,
        )
        assert kernel.propagate_conflict(res) == conflict


@needs_cy
def test_backends_agree():
    for cnf, lit in _cases(count=200, seed=29):
        res = compute_key(cnf)
        assert kernel_py.has_empty(res) == kernel_cy.has_empty(res)
        assert kernel_py.first_unit_var(res) == kernel_cy.first_unit_var(res)
        for code in (0, 1):
            assert kernel_py.select_var(res, code) == kernel_cy.select_var(res, code)
        if lit:
            assert kernel_py.condition(res, lit) == kernel_cy.condition(res, lit)
        assert kernel_py.propagate(res) == kernel_cy.propagate(res)
        assert kernel_py.propagate_conflict(res) == kernel_cy.propagate_conflict(res)
        if not cnf.has_empty_clause():
            assert kernel_py.split_components(res) == kernel_cy.split_components(res)
        order = list(range(1, cnf.num_vars + 1))
        random.Random(cnf.num_vars).shuffle(order)
        ranks = compiler.VarOrder(tuple(order)).rank_bytes
        assert kernel_py.min_rank_var(res, ranks) == kernel_cy.min_rank_var(res, ranks)


@needs_cy
def test_compilers_identical_across_backends(monkeypatch):
    rng = random.Random(31)
    from dpllc.checks import isomorphic
    from dpllc.store import stats

    for _ in range(25):
        cnf = random_cnf(rng, max_vars=9, max_clauses=18)
        order = compiler.VarOrder(tuple(rng.sample(range(1, cnf.num_vars + 1), cnf.num_vars)))
        results = []
        for kernel in (kernel_py, kernel_cy):
            monkeypatch.setattr(compiler, "KERNEL", kernel)
            results.append(
                (
                    compiler.compile_free(cnf),
                    compiler.compile_ordered(cnf, order),
                    compiler.compile_decomposed(cnf),
                )
            )
        for a, b in zip(*results):
            assert stats(a) == stats(b)
            assert isomorphic(a, b)


def test_select_var_semantics():
    cnf = compute_key(Cnf.from_clauses([[2, 3], [3]], 3))
    for kernel in BACKENDS:
        assert kernel.select_var(cnf, kernel.HEUR_MAX_OCCURRENCE) == 3
        assert kernel.select_var(cnf, kernel.HEUR_MIN_INDEX) == 2
        assert kernel.select_var(b"", kernel.HEUR_MAX_OCCURRENCE) == 0

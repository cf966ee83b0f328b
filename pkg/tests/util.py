"""Shared test helpers: the running example, random formula generation, and
oracles kept independent of the code under test."""

import random

from dpllc.cnf import Cnf

RUNNING_DIMACS = "p cnf 3 3\n1 2 0\n1 -2 -3 0\n-1 2 -3 0\n"
RUNNING_CLAUSES = [[1, 2], [1, -2, -3], [-1, 2, -3]]


def running_cnf() -> Cnf:
    return Cnf.from_clauses(RUNNING_CLAUSES, 3)


def random_cnf(rng: random.Random, max_vars=12, max_clauses=40, max_len=4) -> Cnf:
    n = rng.randint(1, max_vars)
    m = rng.randint(0, max_clauses)
    clauses = []
    for _ in range(m):
        k = rng.randint(1, min(max_len, n))
        vs = rng.sample(range(1, n + 1), k)
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    return Cnf.from_clauses(clauses, n)


def assignments(n: int):
    """All full assignments as dicts var -> bool."""
    for m in range(1 << n):
        yield {v: bool((m >> (v - 1)) & 1) for v in range(1, n + 1)}


def eval_cnf(cnf: Cnf, assignment: dict) -> bool:
    return all(
        any(assignment[abs(l)] == (l > 0) for l in lits) for _, lits in cnf.clauses
    )


def model_set(cnf: Cnf) -> set[int]:
    """Satisfying assignments as bitmasks (bit v-1 = value of var v)."""
    out = set()
    for m in range(1 << cnf.num_vars):
        a = {v: bool((m >> (v - 1)) & 1) for v in range(1, cnf.num_vars + 1)}
        if eval_cnf(cnf, a):
            out.add(m)
    return out


def eval_circuit(circuit, assignment: dict) -> bool:
    """Semantic evaluation of a stored circuit under a full assignment."""
    store = circuit.store
    memo = {}

    def go(nid):
        if nid in memo:
            return memo[nid]
        node = store.nodes[nid]
        kind = node[0]
        if kind == "F":
            val = False
        elif kind == "T":
            val = True
        elif kind == "L":
            val = assignment[abs(node[1])] == (node[1] > 0)
        elif kind == "D":
            val = go(node[3]) if assignment[node[1]] else go(node[2])
        else:
            val = all(go(c) for c in node[1])
        memo[nid] = val
        return val

    return go(circuit.root)


def shannon_obdd_stats(models: set[int], n: int) -> tuple[int, int]:
    """(nodes, edges) of the reduced ordered decision diagram for the
    function with the given model set, variable order 1..n.

    Independent construction: recursive Shannon expansion with merging of
    equal (level, subfunction) pairs and skipping of don't-care levels.
    """
    unique = {}
    sinks_used = set()

    def build(level: int, fn: frozenset) -> tuple:
        # fn holds suffix assignments over vars level..n; bit 0 is var `level`.
        if level > n:
            kind = ("T",) if 0 in fn else ("F",)
            sinks_used.add(kind)
            return kind
        lo = build(level + 1, frozenset(m >> 1 for m in fn if not m & 1))
        hi = build(level + 1, frozenset(m >> 1 for m in fn if m & 1))
        if lo == hi:
            return lo
        key = (level, lo, hi)
        unique[key] = True
        return key

    build(1, frozenset(models))
    decisions = len(unique)
    return decisions + len(sinks_used), 2 * decisions

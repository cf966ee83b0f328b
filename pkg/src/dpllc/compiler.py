"""Exhaustive DPLL compilers whose recorded traces are NNF circuits.

Three search disciplines over the same engine:

  free        branch on any variable (heuristic choice); the trace is a
              reduced FBDD.
  ordered     branch on the first variable of a fixed order that still
              occurs; the trace is the canonical reduced OBDD for that
              order.
  decomposed  split variable-disjoint components and conjoin their
              sub-traces; the trace is a reduced decision-DNNF.

Formula caching memoizes the compilation of residual formulas keyed by
their surviving-clause fingerprint.  Searches run on an explicit work
stack, so formulas with very many variables cannot overflow the call
stack.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass, field
from functools import cached_property

import dataclasses

from . import _kernel
from .cnf import Cnf
from .store import FALSE, TRUE, Circuit, NodeStore

# Rebindable for benchmarking/testing the two kernel backends.
KERNEL = _kernel.impl

MODES = ("free", "ordered", "decomposed")
HEURISTICS = ("max-occurrence", "min-index")


def encode(clauses) -> bytes:
    """Pack (index, literals) pairs into the kernel's residual byte layout."""
    arr = array("i")
    for idx, lits in clauses:
        arr.append(idx)
        arr.append(len(lits))
        arr.extend(sorted(lits, key=abs))
    return arr.tobytes()


def compute_key(delta: Cnf) -> bytes:
    """Canonical fingerprint of a residual formula.

    Equal keys exactly when the surviving-clause sets are identical; the
    full key is stored and compared, never a lossy hash.
    """
    return encode(delta.clauses)


@dataclass(frozen=True)
class VarOrder:
    """Total branching order: a permutation of 1..n."""

    order: tuple[int, ...]

    def __post_init__(self):
        n = len(self.order)
        if sorted(self.order) != list(range(1, n + 1)):
            raise ValueError("order is not a permutation of 1..%d" % n)

    @property
    def n(self) -> int:
        return len(self.order)

    @cached_property
    def rank_bytes(self) -> bytes:
        # rank_bytes[var] = position of var in the order; slot 0 unused.
        rank = array("i", bytes(4 * (self.n + 1)))
        for pos, var in enumerate(self.order):
            rank[var] = pos
        return rank.tobytes()

    @classmethod
    def identity(cls, n: int) -> "VarOrder":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_text(cls, text: str) -> "VarOrder":
        vals: list[int] = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("c"):
                continue
            vals.extend(int(tok) for tok in line.split())
        return cls(tuple(vals))


def bandwidth_order(delta: Cnf) -> VarOrder:
    """Reverse Cuthill-McKee order over the variable interaction graph.

    Per connected component: find a pseudo-peripheral start by repeated
    farthest-vertex BFS, traverse breadth-first with neighbors in ascending
    degree, then reverse.  Keeps interacting variables close together,
    which is what ordered compilation wants from a static order; variables
    outside every clause follow in index order.  Deterministic.
    """
    adj: dict[int, set[int]] = {}
    for _, lits in delta.clauses:
        vs = [abs(l) for l in lits]
        for v in vs:
            adj.setdefault(v, set()).update(w for w in vs if w != v)

    def bfs(start: int) -> list[int]:
        seen = {start}
        frontier = [start]
        out = [start]
        while frontier:
            nxt: list[int] = []
            for v in frontier:
                for w in sorted(adj[v], key=lambda u: (len(adj[u]), u)):
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            out.extend(nxt)
            frontier = nxt
        return out

    order: list[int] = []
    placed: set[int] = set()
    remaining = set(adj)
    while remaining:
        start = min(remaining, key=lambda v: (len(adj[v]), v))
        for _ in range(2):  # double sweep toward a pseudo-peripheral vertex
            start = bfs(start)[-1]
        component = bfs(start)
        component.reverse()
        order.extend(component)
        placed.update(component)
        remaining -= placed
    order.extend(v for v in range(1, delta.num_vars + 1) if v not in placed)
    return VarOrder(tuple(order))


@dataclass(frozen=True)
class CompileConfig:
    """Knobs the search disciplines leave open."""

    mode: str = "free"
    caching: bool = True
    unit_propagation: bool = True
    heuristic: str = "max-occurrence"
    order: VarOrder | None = None

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ValueError("unknown mode %r" % self.mode)
        if self.heuristic not in HEURISTICS:
            raise ValueError("unknown heuristic %r" % self.heuristic)
        if (self.order is not None) != (self.mode == "ordered"):
            raise ValueError("an order is required exactly when mode='ordered'")


class Cache:
    """Formula cache: full residual fingerprints mapped to node ids."""

    def __init__(self):
        self.table: dict[bytes, int] = {}
        self.hits = 0
        self.misses = 0

    def probe(self, key: bytes) -> int | None:
        got = self.table.get(key)
        if got is None:
            self.misses += 1
        else:
            self.hits += 1
        return got

    def insert(self, key: bytes, node: int) -> None:
        self.table[key] = node

    def __len__(self) -> int:
        return len(self.table)


def select_variable(delta: Cnf, heuristic: str = "max-occurrence") -> int:
    """Branch variable of a formula under the named heuristic.

    max-occurrence picks the variable in the most surviving clauses,
    min-index the smallest occurring index; ties break to the smaller
    index.  It is a contract violation to call this on a formula without
    variables.
    """
    if heuristic not in HEURISTICS:
        raise ValueError("unknown heuristic %r" % heuristic)
    code = KERNEL.HEUR_MAX_OCCURRENCE if heuristic == "max-occurrence" else KERNEL.HEUR_MIN_INDEX
    var = KERNEL.select_var(compute_key(delta), code)
    if var == 0:
        raise ValueError("formula mentions no variables")
    return var


_EVAL, _DEC, _AND = 0, 1, 2


def _run_split(res0: bytes, store: NodeStore, cache: Cache | None, pick, lookahead: bool):
    """Plain branching search (free and ordered modes)."""
    K = KERNEL
    work: list[tuple] = [(_EVAL, res0)]
    vals: list[int] = []
    while work:
        frame = work.pop()
        if frame[0] == _EVAL:
            res = frame[1]
            if K.has_empty(res):
                vals.append(FALSE)
                continue
            if not res:
                vals.append(TRUE)
                continue
            if cache is not None:
                hit = cache.probe(res)
                if hit is not None:
                    vals.append(hit)
                    continue
            if lookahead and K.propagate_conflict(res):
                # Unit resolution found a contradiction; the residual is
                # unsatisfiable, whose canonical trace is the false sink.
                if cache is not None:
                    cache.insert(res, FALSE)
                vals.append(FALSE)
                continue
            x = pick(res)
            work.append((_DEC, x, res))
            work.append((_EVAL, K.condition(res, x)))
            work.append((_EVAL, K.condition(res, -x)))
        else:
            x, res = frame[1], frame[2]
            high = vals.pop()
            low = vals.pop()
            node = store.get_node(x, low, high)
            if cache is not None:
                cache.insert(res, node)
            vals.append(node)
    return vals[0]


def _run_decomposed(res0: bytes, store: NodeStore, cache: Cache | None, pick, up: bool):
    """Branching search with dynamic component decomposition."""
    K = KERNEL
    work: list[tuple] = [(_EVAL, res0)]
    vals: list[int] = []
    while work:
        frame = work.pop()
        tag = frame[0]
        if tag == _EVAL:
            res = frame[1]
            if K.has_empty(res):
                vals.append(FALSE)
                continue
            if not res:
                vals.append(TRUE)
                continue
            implied: tuple[int, ...] = ()
            if up:
                res, implied, conflict = K.propagate(res)
                if conflict:
                    vals.append(FALSE)
                    continue
            comps = K.split_components(res) if res else []
            if len(comps) <= 1 and not implied:
                if cache is not None:
                    hit = cache.probe(res)
                    if hit is not None:
                        vals.append(hit)
                        continue
                x = pick(res)
                work.append((_DEC, x, res))
                work.append((_EVAL, K.condition(res, x)))
                work.append((_EVAL, K.condition(res, -x)))
            else:
                work.append((_AND, implied, len(comps)))
                for comp in reversed(comps):
                    work.append((_EVAL, comp))
        elif tag == _DEC:
            x, res = frame[1], frame[2]
            high = vals.pop()
            low = vals.pop()
            node = store.get_node(x, low, high)
            if cache is not None:
                cache.insert(res, node)
            vals.append(node)
        else:
            implied, k = frame[1], frame[2]
            if k:
                parts = vals[-k:]
                del vals[-k:]
            else:
                parts = []
            if FALSE in parts:
                vals.append(FALSE)
                continue
            conjuncts = [store.literal(lit) for lit in implied]
            conjuncts.extend(parts)
            vals.append(store.get_and_node(conjuncts))
    return vals[0]


def _heuristic_pick(cfg: CompileConfig):
    code = KERNEL.HEUR_MAX_OCCURRENCE if cfg.heuristic == "max-occurrence" else KERNEL.HEUR_MIN_INDEX
    K = KERNEL
    return lambda res: K.select_var(res, code)


def _free_pick(cfg: CompileConfig):
    if not cfg.unit_propagation:
        return _heuristic_pick(cfg)
    # Branching on a forced variable first keeps the trace in decision
    # form: the violating branch conditions to an empty clause and comes
    # back as the false sink.
    K = KERNEL
    plain = _heuristic_pick(cfg)
    return lambda res: K.first_unit_var(res) or plain(res)


def compile_free(delta: Cnf, cfg: CompileConfig | None = None) -> Circuit:
    """Exhaustive search with free variable choice; trace is a reduced FBDD."""
    cfg = cfg or CompileConfig(mode="free")
    cfg.validate()
    if cfg.mode != "free":
        raise ValueError("compile_free needs mode='free'")
    store = NodeStore()
    cache = Cache() if cfg.caching else None
    root = _run_split(compute_key(delta), store, cache, _free_pick(cfg), lookahead=False)
    store.freeze()
    return Circuit(store, root, delta.num_vars)


def compile_ordered(delta: Cnf, order: VarOrder, cfg: CompileConfig | None = None) -> Circuit:
    """Exhaustive search branching in a fixed order; trace is the canonical
    reduced OBDD of the formula under that order.

    Unit propagation here is only a contradiction lookahead: branching out
    of order on an implied variable would break the ordering property, but
    cutting an unsatisfiable subtree early changes nothing (its trace
    reduces to the false sink either way).
    """
    cfg = cfg or CompileConfig(mode="ordered", order=order)
    if cfg.order is None:
        cfg = dataclasses.replace(cfg, order=order)
    elif cfg.order != order:
        raise ValueError("cfg.order disagrees with the order argument")
    cfg.validate()
    if cfg.mode != "ordered":
        raise ValueError("compile_ordered needs mode='ordered'")
    if order.n < delta.num_vars:
        raise ValueError("order covers %d of %d variables" % (order.n, delta.num_vars))
    ranks = order.rank_bytes
    K = KERNEL
    store = NodeStore()
    cache = Cache() if cfg.caching else None
    root = _run_split(
        compute_key(delta),
        store,
        cache,
        lambda res: K.min_rank_var(res, ranks),
        lookahead=cfg.unit_propagation,
    )
    store.freeze()
    return Circuit(store, root, delta.num_vars)


def compile_decomposed(delta: Cnf, cfg: CompileConfig | None = None) -> Circuit:
    """Exhaustive search with component decomposition; trace is a reduced
    decision-DNNF.

    With unit propagation on, implied literals become literal leaves
    conjoined with the residual's sub-trace.
    """
    cfg = cfg or CompileConfig(mode="decomposed")
    cfg.validate()
    if cfg.mode != "decomposed":
        raise ValueError("compile_decomposed needs mode='decomposed'")
    store = NodeStore()
    cache = Cache() if cfg.caching else None
    root = _run_decomposed(
        compute_key(delta), store, cache, _heuristic_pick(cfg), up=cfg.unit_propagation
    )
    store.freeze()
    return Circuit(store, root, delta.num_vars)


def compile_cnf(delta: Cnf, cfg: CompileConfig) -> Circuit:
    """Dispatch on cfg.mode."""
    cfg.validate()
    if cfg.mode == "free":
        return compile_free(delta, cfg)
    if cfg.mode == "ordered":
        return compile_ordered(delta, cfg.order, cfg)
    return compile_decomposed(delta, cfg)

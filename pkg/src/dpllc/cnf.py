"""CNF formulas: DIMACS parsing, conditioning, unit propagation, connected
components, and a truth-table model-count oracle.

Literals follow the DIMACS convention: variable x is the positive integer x,
its negation is -x.  Every clause keeps the index it had in the input
formula, so residual formulas obtained by conditioning stay identifiable
(this is what the compiler's formula cache keys on).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator

log = logging.getLogger(__name__)

# Hard ceiling for the truth-table oracle; 2^24 assignment bits is ~2 MB per
# table and anything beyond that defeats the purpose of a safety oracle.
BRUTE_FORCE_VAR_LIMIT = 24


class DimacsError(ValueError):
    """Malformed DIMACS input; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


def _check_clause(lits: tuple[int, ...], num_vars: int) -> None:
    seen = set()
    for lit in lits:
        v = abs(lit)
        if not 1 <= v <= num_vars:
            raise ValueError("literal %d outside universe 1..%d" % (lit, num_vars))
        if v in seen:
            raise ValueError("variable %d appears twice in clause %s" % (v, (lits,)))
        seen.add(v)


@dataclass(frozen=True)
class Cnf:
    """Immutable clause set over variables 1..num_vars.

    `clauses` holds (original_index, literals) pairs in increasing index
    order; an empty literal tuple is the empty (contradictory) clause.
    Variables declared in the universe but absent from every clause still
    count toward model counts (factor 2 each).
    """

    num_vars: int
    clauses: tuple[tuple[int, tuple[int, ...]], ...]
    dropped_tautologies: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValueError("negative variable universe")
        normalized = tuple(sorted(((i, tuple(ls)) for i, ls in self.clauses)))
        prev = -1
        for idx, lits in normalized:
            if idx <= prev:
                raise ValueError("duplicate clause index %d" % idx)
            prev = idx
            _check_clause(lits, self.num_vars)
        object.__setattr__(self, "clauses", normalized)

    @classmethod
    def from_clauses(cls, clause_lists: Iterable[Iterable[int]], num_vars: int) -> "Cnf":
        """Build a Cnf assigning clause indices 0, 1, ... in the given order."""
        return cls(num_vars, tuple((i, tuple(c)) for i, c in enumerate(clause_lists)))

    def variables(self) -> set[int]:
        return {abs(lit) for _, lits in self.clauses for lit in lits}

    def has_empty_clause(self) -> bool:
        return any(not lits for _, lits in self.clauses)

    def __len__(self) -> int:
        return len(self.clauses)


def parse_dimacs(text: str) -> Cnf:
    """Parse DIMACS CNF text into a Cnf.

    Comment lines start with 'c'; the header is `p cnf <vars> <clauses>`;
    clauses are zero-terminated and may span lines.  A '%' token ends the
    clause section (common trailer in distributed benchmark files).
    Duplicate literals within a clause are dropped; tautologous clauses are
    dropped entirely and counted, with a warning.
    """
    num_vars = -1
    declared = -1
    clauses: list[tuple[int, ...]] = []
    pending: list[int] = []
    pending_line = 0
    tautologies = 0
    done = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if num_vars >= 0:
                raise DimacsError("duplicate header", lineno)
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError("malformed header %r" % line, lineno)
            try:
                num_vars, declared = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError("malformed header %r" % line, lineno) from None
            if num_vars < 0 or declared < 0:
                raise DimacsError("negative counts in header", lineno)
            continue
        if num_vars < 0:
            raise DimacsError("clause before header", lineno)
        for tok in line.split():
            if tok == "%":
                done = True
                break
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError("bad token %r" % tok, lineno) from None
            if lit == 0:
                seen: dict[int, int] = {}
                taut = False
                for l in pending:
                    if seen.get(abs(l), l) != l:
                        taut = True
                    seen.setdefault(abs(l), l)
                if taut:
                    tautologies += 1
                else:
                    clauses.append(tuple(seen.values()))
                pending = []
            else:
                if abs(lit) > num_vars:
                    raise DimacsError(
                        "variable %d exceeds declared universe %d" % (abs(lit), num_vars),
                        lineno,
                    )
                if not pending:
                    pending_line = lineno
                pending.append(lit)
        if done:
            break

    if num_vars < 0:
        raise DimacsError("missing header")
    if pending:
        raise DimacsError("clause missing 0 terminator", pending_line)
    if len(clauses) + tautologies != declared:
        raise DimacsError(
            "header declares %d clauses, found %d" % (declared, len(clauses) + tautologies)
        )
    if tautologies:
        log.warning("dropped %d tautologous clause(s)", tautologies)
    return Cnf(
        num_vars,
        tuple((i, lits) for i, lits in enumerate(clauses)),
        dropped_tautologies=tautologies,
    )


def condition(delta: Cnf, lit: int) -> Cnf:
    """The residual formula after assigning `lit` true.

    Clauses containing `lit` are removed; the complementary literal is
    removed from the rest.  A clause that loses all its literals stays as
    the empty clause: contradiction detection is the caller's job.
    """
    v = abs(lit)
    if not 1 <= v <= delta.num_vars:
        raise ValueError("literal %d outside universe 1..%d" % (lit, delta.num_vars))
    out = []
    for idx, lits in delta.clauses:
        if lit in lits:
            continue
        if -lit in lits:
            out.append((idx, tuple(l for l in lits if l != -lit)))
        else:
            out.append((idx, lits))
    return Cnf(delta.num_vars, tuple(out))


def condition_all(delta: Cnf, lits: Iterable[int]) -> Cnf:
    for lit in lits:
        delta = condition(delta, lit)
    return delta


def unit_propagate(delta: Cnf) -> tuple[Cnf, list[int], bool]:
    """Condition on unit clauses until fixpoint.

    Returns (residual, implied, conflict).  `implied` lists forced literals
    in derivation order; `conflict` is true iff an empty clause is present
    at the end (the residual is then only guaranteed to contain one).
    """
    implied: list[int] = []
    cur = delta
    while True:
        if cur.has_empty_clause():
            return cur, implied, True
        unit = next((lits[0] for _, lits in cur.clauses if len(lits) == 1), None)
        if unit is None:
            return cur, implied, False
        implied.append(unit)
        cur = condition(cur, unit)


def components(delta: Cnf) -> list[Cnf]:
    """Finest partition of the clauses into variable-disjoint sub-formulas.

    Parts are ordered by their smallest original clause index and share
    delta's universe.  Callers must rule out empty clauses first.
    """
    if delta.has_empty_clause():
        raise ValueError("components() requires a formula without empty clauses")
    if not delta.clauses:
        return []
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for _, lits in delta.clauses:
        vs = [abs(l) for l in lits]
        for v in vs:
            parent.setdefault(v, v)
        for v in vs[1:]:
            parent[find(vs[0])] = find(v)

    groups: dict[int, list[tuple[int, tuple[int, ...]]]] = {}
    for idx, lits in delta.clauses:
        groups.setdefault(find(abs(lits[0])), []).append((idx, lits))
    return [Cnf(delta.num_vars, tuple(g)) for g in groups.values()]


def _var_table(v: int, n: int) -> int:
    # Truth table of variable v over all 2^n assignments, one bit per
    # assignment (bit i is the value of v in assignment i).
    half = 1 << (v - 1)
    block = ((1 << half) - 1) << half
    width = half << 1
    total = 1 << n
    while width < total:
        block |= block << width
        width <<= 1
    return block


def brute_force_count(delta: Cnf) -> int:
    """Exact model count over all num_vars variables by truth-table sweep.

    Independent of the search-based compilers on purpose: this is the test
    oracle for them.  Refuses universes beyond BRUTE_FORCE_VAR_LIMIT.
    """
    n = delta.num_vars
    if n > BRUTE_FORCE_VAR_LIMIT:
        raise ValueError(
            "refusing brute-force count over %d > %d variables" % (n, BRUTE_FORCE_VAR_LIMIT)
        )
    full = (1 << (1 << n)) - 1
    table = full
    for _, lits in delta.clauses:
        acc = 0
        for lit in lits:
            t = _var_table(abs(lit), n)
            acc |= t if lit > 0 else full ^ t
        table &= acc
        if not table:
            return 0
    return table.bit_count()


def brute_force_models(delta: Cnf) -> Iterator[int]:
    """Yield satisfying assignments as bitmasks (bit v-1 = value of var v)."""
    n = delta.num_vars
    if n > BRUTE_FORCE_VAR_LIMIT:
        raise ValueError("universe too large for model sweep")
    for m in range(1 << n):
        ok = True
        for _, lits in delta.clauses:
            if not any((m >> (abs(l) - 1)) & 1 == (l > 0) for l in lits):
                ok = False
                break
        if ok:
            yield m


def as_term(lits: Iterable[int]) -> frozenset[int]:
    """Normalize a partial assignment; rejects contradictory literal pairs."""
    term = frozenset(lits)
    for lit in term:
        if lit == 0:
            raise ValueError("0 is not a literal")
        if -lit in term:
            raise ValueError("term assigns variable %d both ways" % abs(lit))
    return term

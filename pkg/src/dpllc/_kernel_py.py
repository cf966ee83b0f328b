"""Pure-Python residual-formula kernel.

A residual formula is a bytes object holding native int32 records, one per
surviving clause, in increasing original-clause-index order:

    idx, k, lit_1, ..., lit_k

Literals within a record are sorted by variable.  The encoding doubles as
the formula-cache key: two residuals are the same formula exactly when
their bytes are equal.  The compiled kernel (_kernel_cy) implements the
same functions over the same layout; outputs must match byte for byte.
"""

from array import array

HEUR_MIN_INDEX = 0
HEUR_MAX_OCCURRENCE = 1


def has_empty(res: bytes) -> bool:
    v = memoryview(res).cast("i")
    i, n = 0, len(v)
    while i < n:
        k = v[i + 1]
        if k == 0:
            return True
        i += 2 + k
    return False


def condition(res: bytes, lit: int) -> bytes:
    """Residual after assigning `lit` true: drop satisfied clauses, strip -lit."""
    v = memoryview(res).cast("i")
    out = array("i")
    neg = -lit
    i, n = 0, len(v)
    while i < n:
        k = v[i + 1]
        end = i + 2 + k
        sat = False
        hit = -1
        for j in range(i + 2, end):
            if v[j] == lit:
                sat = True
                break
            if v[j] == neg:
                hit = j
        if not sat:
            if hit < 0:
                out.extend(v[i:end])
            else:
                out.append(v[i])
                out.append(k - 1)
                for j in range(i + 2, end):
                    if j != hit:
                        out.append(v[j])
        i = end
    return out.tobytes()


def propagate(res: bytes) -> tuple[bytes, tuple[int, ...], bool]:
    """Condition on unit clauses until fixpoint.

    Returns (residual, implied, conflict); implied is in derivation order
    and conflict means an empty clause is present in the residual.
    """
    implied: list[int] = []
    while True:
        v = memoryview(res).cast("i")
        i, n = 0, len(v)
        unit = 0
        while i < n:
            k = v[i + 1]
            if k == 0:
                return res, tuple(implied), True
            if k == 1 and unit == 0:
                unit = v[i + 2]
            i += 2 + k
        if unit == 0:
            return res, tuple(implied), False
        implied.append(unit)
        res = condition(res, unit)


def propagate_conflict(res: bytes) -> bool:
    """True iff unit propagation derives the empty clause.

    Same fixpoint as propagate(), but the residual and the implied literals
    are not materialized; this is the cheap conflict lookahead.
    """
    while True:
        v = memoryview(res).cast("i")
        i, n = 0, len(v)
        unit = 0
        while i < n:
            k = v[i + 1]
            if k == 0:
                return True
            if k == 1 and unit == 0:
                unit = v[i + 2]
            i += 2 + k
        if unit == 0:
            return False
        res = condition(res, unit)


def first_unit_var(res: bytes) -> int:
    v = memoryview(res).cast("i")
    i, n = 0, len(v)
    while i < n:
        k = v[i + 1]
        if k == 1:
            return abs(v[i + 2])
        i += 2 + k
    return 0


def select_var(res: bytes, heuristic: int) -> int:
    """Deterministic branch-variable choice; 0 when the residual has no variables."""
    v = memoryview(res).cast("i")
    n = len(v)
    if heuristic == HEUR_MIN_INDEX:
        best = 0
        i = 0
        while i < n:
            k = v[i + 1]
            for j in range(i + 2, i + 2 + k):
                var = abs(v[j])
                if best == 0 or var < best:
                    best = var
            i += 2 + k
        return best
    counts: dict[int, int] = {}
    i = 0
    while i < n:
        k = v[i + 1]
        for j in range(i + 2, i + 2 + k):
            var = abs(v[j])
            counts[var] = counts.get(var, 0) + 1
        i += 2 + k
    best = 0
    best_count = -1
    for var, c in counts.items():
        if c > best_count or (c == best_count and var < best):
            best, best_count = var, c
    return best


def min_rank_var(res: bytes, ranks: bytes) -> int:
    """Variable of minimum rank occurring in res; ranks is int32, indexed by var."""
    v = memoryview(res).cast("i")
    r = memoryview(ranks).cast("i")
    best = 0
    best_rank = -1
    i, n = 0, len(v)
    while i < n:
        k = v[i + 1]
        for j in range(i + 2, i + 2 + k):
            var = abs(v[j])
            rank = r[var]
            if best == 0 or rank < best_rank:
                best, best_rank = var, rank
        i += 2 + k
    return best


def split_components(res: bytes) -> list[bytes]:
    """Finest variable-disjoint partition of the clauses.

    Parts come out ordered by smallest original clause index (clauses are
    scanned in index order) and must not contain empty clauses.
    """
    v = memoryview(res).cast("i")
    n = len(v)
    if n == 0:
        return []
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    i = 0
    while i < n:
        k = v[i + 1]
        if k == 0:
            raise ValueError("cannot split a residual containing an empty clause")
        first = abs(v[i + 2])
        parent.setdefault(first, first)
        for j in range(i + 3, i + 2 + k):
            var = abs(v[j])
            parent.setdefault(var, var)
            parent[find(first)] = find(var)
        i += 2 + k

    groups: dict[int, array] = {}
    i = 0
    while i < n:
        k = v[i + 1]
        root = find(abs(v[i + 2]))
        groups.setdefault(root, array("i")).extend(v[i : i + 2 + k])
        i += 2 + k
    if len(groups) == 1:
        return [res]
    return [g.tobytes() for g in groups.values()]

# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled residual-formula kernel.

Same operations and same int32 record layout as _kernel_py (that module's
docstring is the format reference); outputs are byte-identical.  This is
the hot inner loop of the compilers: conditioning, unit propagation,
branch-variable selection and component splitting over residual clause
sets.
"""

from cpython.bytes cimport PyBytes_AsString, PyBytes_FromStringAndSize, PyBytes_Size
from libc.stdlib cimport calloc, free, malloc
from libc.string cimport memcpy

HEUR_MIN_INDEX = 0
HEUR_MAX_OCCURRENCE = 1


cdef inline const int* _data(bytes res):
    return <const int*> PyBytes_AsString(res)


cdef inline Py_ssize_t _size(bytes res):
    return PyBytes_Size(res) // 4


def has_empty(bytes res):
    cdef const int* v = _data(res)
    cdef Py_ssize_t i = 0, n = _size(res)
    while i < n:
        if v[i + 1] == 0:
            return True
        i += 2 + v[i + 1]
    return False


cdef Py_ssize_t _condition_into(const int* v, Py_ssize_t n, int lit, int* out) except -1:
    # Writes the conditioned residual into out (capacity >= n); returns length.
    cdef Py_ssize_t i = 0, m = 0, j, end, hit
    cdef int k
    cdef bint sat
    cdef int neg = -lit
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
            out[m] = v[i]
            if hit < 0:
                out[m + 1] = k
                memcpy(out + m + 2, v + i + 2, k * sizeof(int))
                m += 2 + k
            else:
                out[m + 1] = k - 1
                m += 2
                for j in range(i + 2, end):
                    if j != hit:
                        out[m] = v[j]
                        m += 1
        i = end
    return m


def condition(bytes res, int lit):
    """Residual after assigning `lit` true: drop satisfied clauses, strip -lit."""
    cdef const int* v = _data(res)
    cdef Py_ssize_t n = _size(res)
    cdef int* out = <int*> malloc(n * sizeof(int) if n else sizeof(int))
    if out == NULL:
        raise MemoryError()
    cdef Py_ssize_t m
    try:
        m = _condition_into(v, n, lit, out)
        return PyBytes_FromStringAndSize(<char*> out, m * 4)
    finally:
        free(out)


def propagate(bytes res):
    """Condition on unit clauses until fixpoint.

    Returns (residual, implied, conflict); implied is in derivation order
    and conflict means an empty clause is present in the residual.
    """
    cdef Py_ssize_t n = _size(res)
    cdef int* a = <int*> malloc((n + 1) * sizeof(int))
    cdef int* b = <int*> malloc((n + 1) * sizeof(int))
    cdef int* implied = <int*> malloc((n + 1) * sizeof(int))
    if a == NULL or b == NULL or implied == NULL:
        free(a); free(b); free(implied)
        raise MemoryError()
    cdef Py_ssize_t na = n, nb, i, ni = 0
    cdef int unit, k
    cdef int* tmp
    cdef bint conflict = False
    memcpy(a, _data(res), n * sizeof(int))
    try:
        while True:
            i = 0
            unit = 0
            while i < na:
                k = a[i + 1]
                if k == 0:
                    conflict = True
                    break
                if k == 1 and unit == 0:
                    unit = a[i + 2]
                i += 2 + k
            if conflict or unit == 0:
                break
            implied[ni] = unit
            ni += 1
            nb = _condition_into(a, na, unit, b)
            tmp = a; a = b; b = tmp
            na = nb
        out = PyBytes_FromStringAndSize(<char*> a, na * 4)
        lits = tuple(implied[i] for i in range(ni))
        return out, lits, conflict
    finally:
        free(a); free(b); free(implied)


def propagate_conflict(bytes res):
    """True iff unit propagation derives the empty clause.

    Same fixpoint as propagate(), but nothing is materialized; this is the
    cheap conflict lookahead.
    """
    cdef Py_ssize_t n = _size(res)
    cdef int* a = <int*> malloc((n + 1) * sizeof(int))
    cdef int* b = <int*> malloc((n + 1) * sizeof(int))
    if a == NULL or b == NULL:
        free(a); free(b)
        raise MemoryError()
    cdef Py_ssize_t na = n, i
    cdef int unit, k
    cdef int* tmp
    memcpy(a, _data(res), n * sizeof(int))
    try:
        while True:
            i = 0
            unit = 0
            while i < na:
                k = a[i + 1]
                if k == 0:
                    return True
                if k == 1 and unit == 0:
                    unit = a[i + 2]
                i += 2 + k
            if unit == 0:
                return False
            na = _condition_into(a, na, unit, b)
            tmp = a; a = b; b = tmp
    finally:
        free(a); free(b)


def first_unit_var(bytes res):
    cdef const int* v = _data(res)
    cdef Py_ssize_t i = 0, n = _size(res)
    cdef int k
    while i < n:
        k = v[i + 1]
        if k == 1:
            return v[i + 2] if v[i + 2] > 0 else -v[i + 2]
        i += 2 + k
    return 0


cdef int _max_var(const int* v, Py_ssize_t n):
    cdef Py_ssize_t i = 0, j
    cdef int k, var, best = 0
    while i < n:
        k = v[i + 1]
        for j in range(i + 2, i + 2 + k):
            var = v[j] if v[j] > 0 else -v[j]
            if var > best:
                best = var
        i += 2 + k
    return best


def select_var(bytes res, int heuristic):
    """Deterministic branch-variable choice; 0 when the residual has no variables."""
    cdef const int* v = _data(res)
    cdef Py_ssize_t i = 0, j, n = _size(res)
    cdef int k, var, best = 0, best_count = -1, maxv
    cdef int* counts
    if heuristic == 0:  # min index
        while i < n:
            k = v[i + 1]
            for j in range(i + 2, i + 2 + k):
                var = v[j] if v[j] > 0 else -v[j]
                if best == 0 or var < best:
                    best = var
            i += 2 + k
        return best
    maxv = _max_var(v, n)
    if maxv == 0:
        return 0
    counts = <int*> calloc(maxv + 1, sizeof(int))
    if counts == NULL:
        raise MemoryError()
    try:
        while i < n:
            k = v[i + 1]
            for j in range(i + 2, i + 2 + k):
                var = v[j] if v[j] > 0 else -v[j]
                counts[var] += 1
            i += 2 + k
        for var in range(1, maxv + 1):
            if counts[var] > best_count:
                best, best_count = var, counts[var]
        return best
    finally:
        free(counts)


def min_rank_var(bytes res, bytes ranks):
    """Variable of minimum rank occurring in res; ranks is int32, indexed by var."""
    cdef const int* v = _data(res)
    cdef const int* r = _data(ranks)
    cdef Py_ssize_t i = 0, j, n = _size(res)
    cdef int k, var, rank, best = 0, best_rank = 0
    while i < n:
        k = v[i + 1]
        for j in range(i + 2, i + 2 + k):
            var = v[j] if v[j] > 0 else -v[j]
            rank = r[var]
            if best == 0 or rank < best_rank:
                best, best_rank = var, rank
        i += 2 + k
    return best


cdef int _find(int* parent, int x):
    cdef int root = x, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


def split_components(bytes res):
    """Finest variable-disjoint partition of the clauses.

    Parts come out ordered by smallest original clause index (clauses are
    scanned in index order) and must not contain empty clauses.
    """
    cdef const int* v = _data(res)
    cdef Py_ssize_t i = 0, j, n = _size(res)
    if n == 0:
        return []
    cdef int maxv = _max_var(v, n)
    cdef int* parent = <int*> malloc((maxv + 1) * sizeof(int))
    if parent == NULL:
        raise MemoryError()
    cdef int k, var, first, root
    cdef dict groups = {}
    cdef list part
    try:
        for var in range(maxv + 1):
            parent[var] = var
        while i < n:
            k = v[i + 1]
            if k == 0:
                raise ValueError("cannot split a residual containing an empty clause")
            first = v[i + 2] if v[i + 2] > 0 else -v[i + 2]
            for j in range(i + 3, i + 2 + k):
                var = v[j] if v[j] > 0 else -v[j]
                parent[_find(parent, first)] = _find(parent, var)
            i += 2 + k
        i = 0
        while i < n:
            k = v[i + 1]
            root = _find(parent, v[i + 2] if v[i + 2] > 0 else -v[i + 2])
            part = groups.get(root)
            if part is None:
                part = []
                groups[root] = part
            part.append(res[i * 4 : (i + 2 + k) * 4])
            i += 2 + k
        if len(groups) == 1:
            return [res]
        return [b"".join(part) for part in groups.values()]
    finally:
        free(parent)

"""Small exact linear algebra over the rationals (row reduction only).

Kept in-house rather than pulling a symbolic engine: the package needs exact
solves and span arithmetic on dicts keyed by basis names, nothing more.
"""

from fractions import Fraction

from .scalars import ZERO


class Span:
    """Incrementally built row space of sparse vectors over ordered keys."""

    def __init__(self):
        self.rows = {}  # pivot key -> reduced row (dict)

    def reduce(self, vec):
        """Residual of vec modulo the span (vec is not consumed)."""
        v = dict(vec)
        for pivot in sorted(self.rows, key=str):
            c = v.get(pivot)
            if not c:
                continue
            row = self.rows[pivot]
            for k, w in row.items():
                nv = v.get(k, ZERO) - c * w
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)
        return v

    def add(self, vec):
        """Add a vector; returns True if it enlarged the span."""
        r = self.reduce(vec)
        if not r:
            return False
        pivot = sorted(r, key=str)[0]
        c = r[pivot]
        row = {k: w / c for k, w in r.items()}
        # back-substitute into existing rows
        for p, existing in list(self.rows.items()):
            e = existing.get(pivot)
            if e:
                for k, w in row.items():
                    nv = existing.get(k, ZERO) - e * w
                    if nv:
                        existing[k] = nv
                    else:
                        existing.pop(k, None)
        self.rows[pivot] = row
        return True

    def contains(self, vec):
        return not self.reduce(vec)

    @property
    def dim(self):
        return len(self.rows)

    def basis(self):
        return [dict(r) for r in self.rows.values()]


def solve_sparse(columns, rhs):
    """Solve sum_j x_j * columns[j] = rhs exactly.

    columns: {unknown label: sparse vector}; rhs: sparse vector.  Returns
    {label: Fraction} dropping zero entries, or None if inconsistent.
    Free unknowns are set to zero.
    """
    labels = sorted(columns, key=str)
    row_keys = sorted({k for col in columns.values() for k in col} | set(rhs), key=str)
    idx = {k: i for i, k in enumerate(row_keys)}
    m, n = len(row_keys), len(labels)
    mat = [[ZERO] * (n + 1) for _ in range(m)]
    for j, lab in enumerate(labels):
        for k, c in columns[lab].items():
            mat[idx[k]][j] = c
    for k, c in rhs.items():
        mat[idx[k]][n] = c
    pivots = []
    r = 0
    for col in range(n):
        sel = None
        for i in range(r, m):
            if mat[i][col]:
                sel = i
                break
        if sel is None:
            continue
        mat[r], mat[sel] = mat[sel], mat[r]
        pv = mat[r][col]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(m):
            if i != r and mat[i][col]:
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append((r, col))
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if mat[i][n]:
            return None
    sol = {}
    for row, col in pivots:
        if mat[row][n]:
            sol[labels[col]] = mat[row][n]
    return sol


def solve_kernel_basis(columns):
    """Basis of the solution space of sum_j x_j columns[j] = 0."""
    labels = sorted(columns, key=str)
    row_keys = sorted({k for col in columns.values() for k in col}, key=str)
    idx = {k: i for i, k in enumerate(row_keys)}
    m, n = len(row_keys), len(labels)
    mat = [[ZERO] * n for _ in range(m)]
    for j, lab in enumerate(labels):
        for k, c in columns[lab].items():
            mat[idx[k]][j] = c
    pivot_of_col = {}
    r = 0
    for col in range(n):
        sel = None
        for i in range(r, m):
            if mat[i][col]:
                sel = i
                break
        if sel is None:
            continue
        mat[r], mat[sel] = mat[sel], mat[r]
        pv = mat[r][col]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(m):
            if i != r and mat[i][col]:
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivot_of_col[col] = r
        r += 1
        if r == m:
            break
    out = []
    for col in range(n):
        if col in pivot_of_col:
            continue
        vec = {labels[col]: Fraction(1)}
        for pcol, prow in pivot_of_col.items():
            c = mat[prow][col]
            if c:
                vec[labels[pcol]] = -c
        out.append(vec)
    return out

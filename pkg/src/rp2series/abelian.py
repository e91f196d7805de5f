"""Smith normal form and abelian invariants over the integers."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

Matrix = list[list[int]]


@dataclass(frozen=True)
class AbelianInvariants:
    """Z^free_rank + Z/d1 + ... with d1 | d2 | ... and every di >= 2."""

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(self.torsion))
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"torsion {self.torsion} is not a divisor chain")
        if any(d < 2 for d in self.torsion):
            raise ValueError("torsion coefficients must be >= 2")

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def order(self) -> int | None:
        if self.free_rank:
            return None
        n = 1
        for d in self.torsion:
            n *= d
        return n

    def as_pair(self) -> tuple[int, list[int]]:
        return (self.free_rank, list(self.torsion))

    def __str__(self):
        parts = ["Z" if self.free_rank == 1 else f"Z^{self.free_rank}"] if self.free_rank else []
        parts += [f"Z{d}" for d in self.torsion]
        return " + ".join(parts) or "1"


@dataclass
class SNFResult:
    """U * M * V = D with U, V unimodular; D diagonal with the divisor chain."""

    diagonal: list[int]
    rank: int
    U: Matrix | None = None
    V: Matrix | None = None
    shape: tuple[int, int] = (0, 0)
    witnesses: bool = field(default=False)


def identity_matrix(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    cols = len(b[0]) if b else 0
    bt = list(zip(*b)) if b else []
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] if bt else [0] * cols for row in a]


def determinant(m: Matrix) -> int:
    """Bareiss fraction-free elimination."""
    n = len(m)
    if n == 0:
        return 1
    a = [row[:] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def smith_normal_form(m: Sequence[Sequence[int]], witnesses: bool = True, left: bool = True) -> SNFResult:
    """D = U m V.  ``left=False`` skips U (returned as None) when only V is needed."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    a = [list(map(int, r)) for r in m]
    U = identity_matrix(rows) if witnesses and left else None
    V = identity_matrix(cols) if witnesses else None

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        if V is not None:
            for r in V:
                r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):  # row dst -= q * row src
        if q:
            ra, rs = a[dst], a[src]
            for k in range(cols):
                if rs[k]:
                    ra[k] -= q * rs[k]
            if U is not None:
                ua, us = U[dst], U[src]
                for k in range(rows):
                    if us[k]:
                        ua[k] -= q * us[k]

    def add_col(dst, src, q):  # col dst -= q * col src
        if q:
            for r in a:
                if r[src]:
                    r[dst] -= q * r[src]
            if V is not None:
                for r in V:
                    if r[src]:
                        r[dst] -= q * r[src]

    t = 0
    while t < min(rows, cols):
        # pivot: smallest nonzero |entry| in the remaining block
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                v = a[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = a[t][t]
            done = True
            for i in range(t + 1, rows):
                if a[i][t]:
                    q = a[i][t] // p
                    add_row(i, t, q)
                    if a[i][t]:
                        done = False
            for j in range(t + 1, cols):
                if a[t][j]:
                    q = a[t][j] // p
                    add_col(j, t, q)
                    if a[t][j]:
                        done = False
            if done:
                # divisibility of the rest of the block
                bad = None
                for i in range(t + 1, rows):
                    for j in range(t + 1, cols):
                        if a[i][j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                add_row(t, bad, -1)
                continue
            # move the smallest remaining entry of row/col t to the pivot
            best = (abs(a[t][t]), t, t)
            for i in range(t + 1, rows):
                if a[i][t] and abs(a[i][t]) < best[0]:
                    best = (abs(a[i][t]), i, t)
            for j in range(t + 1, cols):
                if a[t][j] and abs(a[t][j]) < best[0]:
                    best = (abs(a[t][j]), t, j)
            swap_rows(t, best[1])
            swap_cols(t, best[2])
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            if U is not None:
                U[t] = [-x for x in U[t]]
        t += 1
    diag = [a[i][i] for i in range(min(rows, cols))]
    rank = sum(1 for d in diag if d)
    return SNFResult(diag, rank, U, V, (rows, cols), witnesses)


def _sparse_reduce(rows: list[dict[int, int]], ncols: int) -> tuple[list[dict[int, int]], int]:
    """Eliminate unit pivots.  Returns the Schur complement rows and the number of pivots."""
    rows = [dict(r) for r in rows if r]
    alive = [True] * len(rows)
    col_rows: dict[int, set[int]] = {}
    for i, r in enumerate(rows):
        for c in r:
            col_rows.setdefault(c, set()).add(i)
    pivots = 0
    progress = True
    while progress:
        progress = False
        order = sorted((i for i in range(len(rows)) if alive[i] and rows[i]), key=lambda i: (len(rows[i]), i))
        for i in order:
            if not alive[i]:
                continue
            r = rows[i]
            if not r:
                alive[i] = False
                continue
            best = None
            for c, v in r.items():
                if v == 1 or v == -1:
                    k = len(col_rows[c])
                    if best is None or (k, c) < best[0]:
                        best = ((k, c), c)
            if best is None:
                continue
            c = best[1]
            pv = r[c]
            for j in sorted(col_rows[c] - {i}):
                rj = rows[j]
                q = rj[c] * pv  # pv = +-1 so rj[c]/pv == rj[c]*pv
                for cc, vv in r.items():
                    nv = rj.get(cc, 0) - q * vv
                    if nv:
                        if cc not in rj:
                            col_rows[cc].add(j)
                        rj[cc] = nv
                    elif cc in rj:
                        del rj[cc]
                        col_rows[cc].discard(j)
                if not rj:
                    alive[j] = False
            for cc in r:
                col_rows[cc].discard(i)
            alive[i] = False
            rows[i] = {}
            # the pivot column is now empty everywhere
            del col_rows[c]
            pivots += 1
            progress = True
    rest = [rows[i] for i in range(len(rows)) if alive[i] and rows[i]]
    return rest, pivots


def invariants_from_diagonal(diag: Sequence[int], ncols: int) -> AbelianInvariants:
    nz = [abs(d) for d in diag if d]
    return AbelianInvariants(ncols - len(nz), tuple(d for d in nz if d > 1))


def abelian_invariants_of_matrix(rows: Sequence[Sequence[int]] | Sequence[dict[int, int]], ncols: int) -> AbelianInvariants:
    """Invariants of Z^ncols / rowspace.  Rows may be dense lists or sparse dicts."""
    sparse = []
    for r in rows:
        if isinstance(r, dict):
            sparse.append({c: v for c, v in r.items() if v})
        else:
            sparse.append({c: v for c, v in enumerate(r) if v})
    rest, pivots = _sparse_reduce(sparse, ncols)
    cols = sorted({c for r in rest for c in r})
    if not rest:
        return AbelianInvariants(ncols - pivots, ())
    cidx = {c: k for k, c in enumerate(cols)}
    dense = [[0] * len(cols) for _ in rest]
    for i, r in enumerate(rest):
        for c, v in r.items():
            dense[i][cidx[c]] = v
    snf = smith_normal_form(dense, witnesses=False)
    nz = [abs(d) for d in snf.diagonal if d]
    free = ncols - pivots - len(nz)
    return AbelianInvariants(free, tuple(d for d in nz if d > 1))

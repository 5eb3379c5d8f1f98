"""Small dense linear algebra: GF(2) on int bitsets, odd p on lists."""

from __future__ import annotations


def gf2_rank(rows: list[int]) -> int:
    work = [r for r in rows if r]
    rank = 0
    while work:
        pivot = work.pop()
        if not pivot:
            continue
        lead = pivot.bit_length() - 1
        rank += 1
        work = [r ^ pivot if r >> lead & 1 else r for r in work]
        work = [r for r in work if r]
    return rank


def gf2_in_span(vec: int, rows: list[int]) -> bool:
    base = gf2_rank(rows)
    return gf2_rank(rows + [vec]) == base


def gf2_kernel_basis(rows: list[int], n_cols: int) -> list[int]:
    """Null space basis of the matrix whose rows are bitmask functionals."""
    echelon: dict[int, int] = {}
    for r in rows:
        while r:
            lead = r.bit_length() - 1
            if lead not in echelon:
                echelon[lead] = r
                break
            r ^= echelon[lead]
    pivots = set(echelon)
    basis = []
    for free in range(n_cols):
        if free in pivots:
            continue
        v = 1 << free
        # each row's highest bit is its pivot, so substituting pivots in
        # increasing order only ever reads already-final coordinates of v
        for lead in sorted(pivots):
            if bin(echelon[lead] & v).count("1") % 2:
                v ^= 1 << lead
        basis.append(v)
    return basis


def _modp_rref(rows: list[list[int]], p: int, n_cols: int):
    mat = [[v % p for v in r] for r in rows]
    pivots: list[tuple[int, int]] = []  # (column, row index)
    r = 0
    for col in range(n_cols):
        if r == len(mat):
            break
        piv = next((i for i in range(r, len(mat)) if mat[i][col]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = pow(mat[r][col], -1, p)
        mat[r] = [(v * inv) % p for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col]:
                c = mat[i][col]
                mat[i] = [(a - c * b) % p for a, b in zip(mat[i], mat[r])]
        pivots.append((col, r))
        r += 1
    return mat, pivots


def modp_rank(rows: list[list[int]], p: int) -> int:
    if not rows:
        return 0
    _, pivots = _modp_rref(rows, p, len(rows[0]))
    return len(pivots)


def modp_in_span(vec: list[int], rows: list[list[int]], p: int) -> bool:
    if not any(v % p for v in vec):
        return True
    live = [r for r in rows if any(v % p for v in r)]
    if not live:
        return False
    return modp_rank(live + [vec], p) == modp_rank(live, p)


def modp_kernel_basis(rows: list[list[int]], p: int, n_cols: int) -> list[list[int]]:
    """Null space basis over F_p, columns indexed 0..n_cols-1."""
    mat, pivots = _modp_rref(rows, p, n_cols)
    pivot_cols = {c for c, _ in pivots}
    basis = []
    for free in range(n_cols):
        if free in pivot_cols:
            continue
        v = [0] * n_cols
        v[free] = 1
        for col, ri in pivots:
            v[col] = (-mat[ri][free]) % p
        basis.append(v)
    return basis

"""Exact integer linear algebra on dense list-of-lists matrices.

Everything here works with Python ints, so there is no overflow anywhere.
Matrices are plain ``list[list[int]]`` in row-major order.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Sequence

Matrix = list[list[int]]


class MatrixShapeError(ValueError):
    pass


def shape(m: Sequence[Sequence[int]]) -> tuple[int, int]:
    rows = len(m)
    cols = len(m[0]) if rows else 0
    for r in m:
        if len(r) != cols:
            raise MatrixShapeError("ragged matrix")
    return rows, cols


def copy(m: Sequence[Sequence[int]]) -> Matrix:
    return [list(map(int, r)) for r in m]


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(m: Sequence[Sequence[int]]) -> Matrix:
    rows, cols = shape(m)
    return [[m[i][j] for i in range(rows)] for j in range(cols)]


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    ra, ca = shape(a)
    rb, cb = shape(b)
    if ca != rb:
        raise MatrixShapeError(f"cannot multiply {ra}x{ca} by {rb}x{cb}")
    bt = transpose(b) if rb else [[] for _ in range(cb)]
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def matvec(m: Sequence[Sequence[int]], x: Sequence[int]) -> list[int]:
    return [sum(a * b for a, b in zip(row, x)) for row in m]


# ---------------------------------------------------------------- determinants


def determinant(m: Sequence[Sequence[int]], method: str = "bareiss") -> int:
    rows, cols = shape(m)
    if rows != cols:
        raise MatrixShapeError(f"determinant of non-square {rows}x{cols} matrix")
    if method == "bareiss":
        return _det_bareiss(m)
    if method == "modular":
        return det_modular(m)
    if method == "cofactor":
        return det_cofactor(m)
    raise ValueError(f"unknown determinant method {method!r}")


def _det_bareiss(m: Sequence[Sequence[int]]) -> int:
    a = copy(m)
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        akk = a[k][k]
        rk = a[k]
        for i in range(k + 1, n):
            ri = a[i]
            aik = ri[k]
            if aik == 0:
                # row i stays a multiple: (akk*ri[j] - 0)/prev
                for j in range(k + 1, n):
                    ri[j] = ri[j] * akk // prev
            else:
                for j in range(k + 1, n):
                    ri[j] = (ri[j] * akk - aik * rk[j]) // prev
            ri[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


def det_cofactor(m: Sequence[Sequence[int]]) -> int:
    """Laplace expansion along the first row; exponential, for small oracles only."""
    n = len(m)
    if n == 0:
        return 1
    if n == 1:
        return m[0][0]
    total = 0
    for j in range(n):
        if m[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        total += (-1) ** j * m[0][j] * det_cofactor(minor)
    return total


def _primes_from(start: int):
    c = max(start, 2)
    while True:
        if all(c % q for q in range(2, int(c ** 0.5) + 1)):
            yield c
        c += 1


def _det_mod(m: Sequence[Sequence[int]], q: int) -> int:
    a = [[x % q for x in row] for row in m]
    n = len(a)
    det = 1
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k]), None)
        if piv is None:
            return 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det = det * a[k][k] % q
        inv = pow(a[k][k], -1, q)
        for i in range(k + 1, n):
            f = a[i][k] * inv % q
            if f:
                ri, rk = a[i], a[k]
                for j in range(k, n):
                    ri[j] = (ri[j] - f * rk[j]) % q
    return det % q


def hadamard_bound(m: Sequence[Sequence[int]]) -> int:
    b = 1
    for row in m:
        b *= sum(x * x for x in row)
    # integer square root, rounded up
    from math import isqrt

    r = isqrt(b)
    return r if r * r == b else r + 1


def det_modular(m: Sequence[Sequence[int]]) -> int:
    """Determinant by CRT over word-size primes, bounded by Hadamard's inequality."""
    rows, cols = shape(m)
    if rows != cols:
        raise MatrixShapeError("non-square")
    if rows == 0:
        return 1
    bound = 2 * hadamard_bound(m) + 1
    modulus, residue = 1, 0
    for q in _primes_from(2 ** 31 - 1 - 10 ** 6):
        r = _det_mod(m, q)
        # combine residue mod modulus with r mod q
        t = ((r - residue) * pow(modulus, -1, q)) % q
        residue += modulus * t
        modulus *= q
        if modulus >= bound:
            break
    if residue > modulus // 2:
        residue -= modulus
    return residue


# ------------------------------------------------------------ Smith normal form


def smith_normal_form(m: Sequence[Sequence[int]]) -> list[int]:
    """Diagonal of the Smith form, length ``min(rows, cols)``, as d_1 | d_2 | ...

    Zeros come last.  Entries are non-negative.
    """
    a = copy(m)
    rows, cols = shape(a)
    diag = []
    r0 = 0
    active_rows = list(range(rows))
    active_cols = list(range(cols))
    while active_rows and active_cols:
        # smallest nonzero magnitude, ties to lowest row then column
        best = None
        for i in active_rows:
            row = a[i]
            for j in active_cols:
                v = row[j]
                if v:
                    av = abs(v)
                    if best is None or av < best[0]:
                        best = (av, i, j)
                        if av == 1:
                            break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        while True:
            piv = a[pi][pj]
            done = True
            # clear column pj with row operations
            for i in active_rows:
                if i == pi or a[i][pj] == 0:
                    continue
                q = a[i][pj] // piv
                if q:
                    ri, rp = a[i], a[pi]
                    for j in active_cols:
                        if rp[j]:
                            ri[j] -= q * rp[j]
                if a[i][pj]:
                    done = False
            # clear row pi with column operations
            rp = a[pi]
            for j in active_cols:
                if j == pj or rp[j] == 0:
                    continue
                q = rp[j] // piv
                if q:
                    for i in active_rows:
                        if a[i][pj]:
                            a[i][j] -= q * a[i][pj]
                if rp[j]:
                    done = False
            if done:
                break
            # re-pick the smallest remaining entry in row pi / column pj
            cand = [(abs(a[i][pj]), i, pj) for i in active_rows if a[i][pj]]
            cand += [(abs(a[pi][j]), pi, j) for j in active_cols if a[pi][j]]
            _, ni, nj = min(cand)
            if (ni, nj) != (pi, pj):
                if ni != pi:
                    a[pi], a[ni] = a[ni], a[pi]
                else:
                    for row in a:
                        row[pj], row[nj] = row[nj], row[pj]
        diag.append(abs(a[pi][pj]))
        active_rows.remove(pi)
        active_cols.remove(pj)
        r0 += 1
    n = min(rows, cols)
    diag += [0] * (n - len(diag))
    return _normalize_chain(diag)


def _normalize_chain(diag: list[int]) -> list[int]:
    """Enforce d_i | d_{i+1} by the gcd/lcm exchange, zeros last."""
    nz = [x for x in diag if x]
    zeros = len(diag) - len(nz)
    k = len(nz)
    for i in range(k):
        for j in range(i + 1, k):
            a, b = nz[i], nz[j]
            g = gcd(a, b)
            if g != a:
                nz[i], nz[j] = g, a // g * b
    return nz + [0] * zeros


def _snf_diag_mod(m: Sequence[Sequence[int]], modulus: int) -> list[int]:
    """Elementary divisors of a nonsingular square matrix using arithmetic mod ``modulus``.

    ``modulus`` must be a multiple of |det|.  Returns factors with gcd(., modulus).
    """
    a = [[x % modulus for x in row] for row in m]
    n = len(a)
    out = []
    rows = list(range(n))
    cols = list(range(n))
    while rows:
        # pivot: the entry with the smallest gcd with the modulus
        best = None
        for i in rows:
            row = a[i]
            for j in cols:
                v = row[j]
                if v:
                    g = gcd(v, modulus)
                    if best is None or g < best[0]:
                        best = (g, i, j)
                        if g == 1:
                            break
            if best is not None and best[0] == 1:
                break
        if best is None:
            out += [modulus] * len(rows)
            break
        g, pi, pj = best
        v = a[pi][pj]
        # unit u with v*u = g (mod modulus)
        u = _unit_multiplier(v, g, modulus)
        rp = a[pi]
        for j in cols:
            rp[j] = rp[j] * u % modulus
        # g divides every entry of the remaining block? Not necessarily; use gcd steps.
        changed = True
        while changed:
            changed = False
            for i in rows:
                if i == pi:
                    continue
                x = a[i][pj]
                if x % g:
                    # bring the gcd into the pivot via a 2x2 unimodular row combination
                    gg, s, t = _xgcd(g, x)
                    ri = a[i]
                    g_over, x_over = g // gg, x // gg
                    for j in cols:
                        p_old, i_old = rp[j], ri[j]
                        rp[j] = (s * p_old + t * i_old) % modulus
                        ri[j] = (-x_over * p_old + g_over * i_old) % modulus
                    g = gcd(rp[pj], modulus)
                    u = _unit_multiplier(rp[pj], g, modulus)
                    for j in cols:
                        rp[j] = rp[j] * u % modulus
                    changed = True
            for j in cols:
                if j == pj:
                    continue
                x = rp[j]
                if x % g:
                    gg, s, t = _xgcd(g, x)
                    g_over, x_over = g // gg, x // gg
                    for i in rows:
                        p_old, j_old = a[i][pj], a[i][j]
                        a[i][pj] = (s * p_old + t * j_old) % modulus
                        a[i][j] = (-x_over * p_old + g_over * j_old) % modulus
                    g = gcd(rp[pj], modulus)
                    u = _unit_multiplier(rp[pj], g, modulus)
                    for jj in cols:
                        rp[jj] = rp[jj] * u % modulus
                    changed = True
        # now pivot divides its row and column; eliminate
        for i in rows:
            if i == pi:
                continue
            x = a[i][pj]
            if x:
                q = x // g
                ri = a[i]
                for j in cols:
                    if rp[j]:
                        ri[j] = (ri[j] - q * rp[j]) % modulus
        out.append(g)
        rows.remove(pi)
        cols.remove(pj)
    return _normalize_chain(out)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _unit_multiplier(v: int, g: int, modulus: int) -> int:
    """A unit u mod ``modulus`` with v*u ≡ g, where g = gcd(v, modulus)."""
    m2 = modulus // g
    w = (v // g) % m2 if m2 > 1 else 0
    if m2 == 1:
        return 1
    u = pow(w, -1, m2)
    # lift u to a unit mod modulus
    while gcd(u, modulus) != 1:
        u += m2
    return u


def elementary_divisors_nonsingular(m: Sequence[Sequence[int]], det: int | None = None) -> list[int]:
    """Smith diagonal of a nonsingular square matrix, computed modulo |det|.

    Entries stay below |det| throughout, which keeps big sandpile computations fast.
    """
    rows, cols = shape(m)
    if rows != cols:
        raise MatrixShapeError("non-square")
    if det is None:
        det = determinant(m)
    det = abs(det)
    if det == 0:
        raise ValueError("singular matrix")
    if det == 1:
        return [1] * rows
    return _snf_diag_mod(m, det)


# -------------------------------------------------------------- Hermite form


def hermite_normal_form(m: Sequence[Sequence[int]], transform: bool = False):
    """Row-style Hermite form H = U·m with U unimodular.

    H is in row echelon form, pivots positive, entries above each pivot reduced
    into ``[0, pivot)``; zero rows are kept at the bottom.  With ``transform``
    returns ``(H, U)``.
    """
    h = copy(m)
    rows, cols = shape(h)
    u = identity(rows) if transform else None
    r = 0
    for c in range(cols):
        if r == rows:
            break
        # Euclid down the column
        while True:
            nz = [i for i in range(r, rows) if h[i][c]]
            if not nz:
                break
            piv = min(nz, key=lambda i: (abs(h[i][c]), i))
            if piv != r:
                h[r], h[piv] = h[piv], h[r]
                if u is not None:
                    u[r], u[piv] = u[piv], u[r]
            others = [i for i in range(r + 1, rows) if h[i][c]]
            if not others:
                break
            for i in others:
                q = h[i][c] // h[r][c]
                if q:
                    _row_axpy(h, i, r, -q)
                    if u is not None:
                        _row_axpy(u, i, r, -q)
        if h[r][c] == 0:
            continue
        if h[r][c] < 0:
            h[r] = [-x for x in h[r]]
            if u is not None:
                u[r] = [-x for x in u[r]]
        piv = h[r][c]
        for i in range(r):
            q = h[i][c] // piv
            if q:
                _row_axpy(h, i, r, -q)
                if u is not None:
                    _row_axpy(u, i, r, -q)
        r += 1
    if transform:
        return h, u
    return h


def _row_axpy(a: Matrix, i: int, k: int, q: int) -> None:
    ri, rk = a[i], a[k]
    for j, x in enumerate(rk):
        if x:
            ri[j] += q * x


def hnf_pivots(h: Sequence[Sequence[int]]) -> list[tuple[int, int]]:
    """(row, column) of each pivot in a row echelon matrix."""
    out = []
    for i, row in enumerate(h):
        for j, x in enumerate(row):
            if x:
                out.append((i, j))
                break
    return out


# ----------------------------------------------------------------- solving


def solve_integer(m: Sequence[Sequence[int]], b: Sequence[int]) -> list[int] | None:
    """An integer x with m·x = b, or ``None`` if no integer solution exists."""
    rows, cols = shape(m)
    if len(b) != rows:
        raise MatrixShapeError(f"right-hand side has length {len(b)}, expected {rows}")
    if cols == 0:
        return [] if all(x == 0 for x in b) else None
    # x^T m^T = b^T.  With U m^T = H (rows of H span the row space of m^T),
    # write b^T = y H, then x^T = y U.
    h, u = hermite_normal_form(transpose(m), transform=True)
    pivots = hnf_pivots(h)
    residual = list(map(int, b))
    y = [0] * cols
    for i, c in pivots:
        piv = h[i][c]
        if residual[c] % piv:
            return None
        q = residual[c] // piv
        y[i] = q
        if q:
            hi = h[i]
            for j in range(c, rows):
                if hi[j]:
                    residual[j] -= q * hi[j]
    if any(residual):
        return None
    x = [0] * cols
    for i, q in enumerate(y):
        if q:
            ui = u[i]
            for j in range(cols):
                if ui[j]:
                    x[j] += q * ui[j]
    if matvec(m, x) != list(b):
        raise ArithmeticError("integer solve failed substitution check")
    return x


def in_column_span(m: Sequence[Sequence[int]], b: Sequence[int]) -> bool:
    return solve_integer(m, b) is not None


# ---------------------------------------------------------------- cokernels


@dataclass(frozen=True)
class AbelianGroupPresentation:
    """ℤ^rank ⊕ ⊕ ℤ/d_i with d_1 | d_2 | ... and every d_i ≥ 2."""

    invariant_factors: tuple[int, ...]
    free_rank: int

    def __post_init__(self):
        f = tuple(int(x) for x in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", f)
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        for x in f:
            if x < 2:
                raise ValueError(f"invariant factor {x} < 2")
        for a, b in zip(f, f[1:]):
            if b % a:
                raise ValueError(f"divisibility chain broken at {a}, {b}")

    @property
    def torsion_order(self) -> int:
        out = 1
        for x in self.invariant_factors:
            out *= x
        return out

    @property
    def is_trivial(self) -> bool:
        return not self.invariant_factors and self.free_rank == 0

    def torsion(self) -> "AbelianGroupPresentation":
        return AbelianGroupPresentation(self.invariant_factors, 0)

    def to_dict(self) -> dict:
        return {"invariant_factors": list(self.invariant_factors), "free_rank": self.free_rank}

    def __str__(self):
        parts = ["Z"] * self.free_rank + [f"Z/{x}" for x in self.invariant_factors]
        return " + ".join(parts) if parts else "0"


def presentation_from_diagonal(diag: Sequence[int], rows: int) -> AbelianGroupPresentation:
    """Group ℤ^rows / image of a matrix with the given Smith diagonal."""
    nonzero = [x for x in diag if x]
    return AbelianGroupPresentation(tuple(x for x in nonzero if x > 1), rows - len(nonzero))


def cokernel(m: Sequence[Sequence[int]]) -> AbelianGroupPresentation:
    """ℤ^rows / column-span(m)."""
    rows, _ = shape(m)
    return presentation_from_diagonal(smith_normal_form(m), rows)

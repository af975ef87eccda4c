"""Permanents and hafnians of small dense matrices.

Both functions are exponential-cost by nature, so each carries a hard size
guard and a slow but obviously-correct oracle for cross-checking.  The fast
permanent walks the column subsets of the inclusion-exclusion sum in Gray-code
order, updating the running row sums by a single column per step; the fast
hafnian expands perfect matchings recursively with memoization on the bitmask
of unmatched vertices.
"""

from __future__ import annotations

from itertools import permutations
from typing import Sequence

import numpy as np

__all__ = [
    "GuardError",
    "permanent",
    "permanent_oracle",
    "hafnian",
    "hafnian_oracle",
    "select_submatrix",
    "PERMANENT_MAX_DIM",
    "PERMANENT_ORACLE_MAX_DIM",
    "HAFNIAN_MAX_DIM",
    "HAFNIAN_ORACLE_MAX_DIM",
]

PERMANENT_MAX_DIM = 30
PERMANENT_ORACLE_MAX_DIM = 8
HAFNIAN_MAX_DIM = 24
HAFNIAN_ORACLE_MAX_DIM = 12

_HAFNIAN_SYMMETRY_TOL = 1e-10


class GuardError(ValueError):
    """An input exceeds a hard resource guard (matrix size or enumeration count)."""


def _require_square(a: np.ndarray, name: str) -> int:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} requires a square matrix, got shape {a.shape}")
    return a.shape[0]


def permanent(a: np.ndarray) -> complex:
    """Permanent by Ryser's inclusion-exclusion with Gray-code column updates.

    Cost is O(2^n * n) arithmetic.  The outer accumulation is compensated
    (Kahan) so alternating-sign cancellation does not erode precision for the
    sizes the guard admits.
    """
    a = np.asarray(a)
    n = _require_square(a, "permanent")
    if n > PERMANENT_MAX_DIM:
        raise GuardError(f"permanent guard: dimension {n} exceeds {PERMANENT_MAX_DIM}")
    if n == 0:
        return complex(1.0)
    a = a.astype(complex, copy=False)
    columns = [np.ascontiguousarray(a[:, j]) for j in range(n)]

    row_sums = np.zeros(n, dtype=complex)
    total = 0.0 + 0.0j
    comp = 0.0 + 0.0j
    gray = 0
    for t in range(1, 1 << n):
        g = t ^ (t >> 1)
        flipped = g ^ gray
        j = flipped.bit_length() - 1
        if g & flipped:
            row_sums += columns[j]
        else:
            row_sums -= columns[j]
        gray = g
        term = complex(np.prod(row_sums))
        if (n - g.bit_count()) & 1:
            term = -term
        # Kahan step
        y = term - comp
        s = total + y
        comp = (s - total) - y
        total = s
    return total


def permanent_oracle(a: np.ndarray) -> complex:
    """Permanent by direct summation over all n! permutations (n <= 8)."""
    a = np.asarray(a)
    n = _require_square(a, "permanent_oracle")
    if n > PERMANENT_ORACLE_MAX_DIM:
        raise GuardError(
            f"permanent oracle guard: dimension {n} exceeds {PERMANENT_ORACLE_MAX_DIM}"
        )
    if n == 0:
        return complex(1.0)
    rows = a.astype(complex, copy=False).tolist()
    total = 0.0 + 0.0j
    for perm in permutations(range(n)):
        prod = 1.0 + 0.0j
        for i, j in enumerate(perm):
            prod *= rows[i][j]
        total += prod
    return total


def hafnian(a: np.ndarray) -> complex:
    """Hafnian of an even-dimensional symmetric matrix; diagonal entries are ignored.

    Recursively matches the lowest unpaired vertex with every partner and
    memoizes on the bitmask of vertices still unmatched, which collapses the
    naive (2n-1)!! matching tree to at most O(2^(2n)) distinct states.
    """
    a = np.asarray(a)
    n2 = _require_square(a, "hafnian")
    if n2 % 2 != 0:
        raise ValueError(f"hafnian requires even dimension, got {n2}")
    if n2 > HAFNIAN_MAX_DIM:
        raise GuardError(f"hafnian guard: dimension {n2} exceeds {HAFNIAN_MAX_DIM}")
    if n2 == 0:
        return complex(1.0)
    a = a.astype(complex, copy=False)
    asym = float(np.max(np.abs(a - a.T)))
    if asym > _HAFNIAN_SYMMETRY_TOL:
        raise ValueError(
            f"hafnian requires a symmetric matrix; max |a - a^T| = {asym:.3e}"
        )
    rows = a.tolist()

    memo: dict[int, complex] = {}

    def match(mask: int) -> complex:
        if mask == 0:
            return 1.0 + 0.0j
        cached = memo.get(mask)
        if cached is not None:
            return cached
        low = mask & -mask
        i = low.bit_length() - 1
        rest = mask ^ low
        row_i = rows[i]
        acc = 0.0 + 0.0j
        mm = rest
        while mm:
            bit = mm & -mm
            mm ^= bit
            w = row_i[bit.bit_length() - 1]
            if w != 0:
                acc += w * match(rest ^ bit)
        memo[mask] = acc
        return acc

    return match((1 << n2) - 1)


def _pairings(items: tuple[int, ...]):
    """All ways to split ``items`` into unordered pairs."""
    if not items:
        yield ()
        return
    first = items[0]
    rest = items[1:]
    for k in range(len(rest)):
        pair = (first, rest[k])
        for tail in _pairings(rest[:k] + rest[k + 1 :]):
            yield (pair,) + tail


def hafnian_oracle(a: np.ndarray) -> complex:
    """Hafnian by explicit enumeration of all (2n-1)!! perfect matchings (2n <= 12)."""
    a = np.asarray(a)
    n2 = _require_square(a, "hafnian_oracle")
    if n2 % 2 != 0:
        raise ValueError(f"hafnian oracle requires even dimension, got {n2}")
    if n2 > HAFNIAN_ORACLE_MAX_DIM:
        raise GuardError(
            f"hafnian oracle guard: dimension {n2} exceeds {HAFNIAN_ORACLE_MAX_DIM}"
        )
    if n2 == 0:
        return complex(1.0)
    rows = a.astype(complex, copy=False).tolist()
    total = 0.0 + 0.0j
    for matching in _pairings(tuple(range(n2))):
        prod = 1.0 + 0.0j
        for i, j in matching:
            prod *= rows[i][j]
        total += prod
    return total


def select_submatrix(
    u: np.ndarray, rows: Sequence[int], cols: Sequence[int]
) -> np.ndarray:
    """Submatrix with the given row and column indices; repeats duplicate lines."""
    u = np.asarray(u)
    if u.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {u.shape}")
    rows = np.asarray(list(rows), dtype=int)
    cols = np.asarray(list(cols), dtype=int)
    if rows.size and (rows.min() < 0 or rows.max() >= u.shape[0]):
        raise IndexError(f"row selection out of range for shape {u.shape}")
    if cols.size and (cols.min() < 0 or cols.max() >= u.shape[1]):
        raise IndexError(f"column selection out of range for shape {u.shape}")
    return u[np.ix_(rows, cols)]

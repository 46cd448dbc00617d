"""Longest-common-subsequence length kernels.

The ROUGE-L inner loop is the one numeric hot spot in this package: an
O(m*n) dynamic program per hypothesis/reference pair, run corpus-wide.
Two interchangeable paths compute the same table row by row:

  * numba: classic two-loop DP compiled with @njit
  * numpy: vectorized row update; the left-neighbor dependency folds into a
    running maximum, since L[i][j] = max(cand_j, L[i][j-1]) with
    cand_j = max(L[i-1][j], L[i-1][j-1] + eq_j) makes each row the prefix
    maximum of its cand vector.

HOPQG_NO_NUMBA=1 forces the numpy path; a missing numba install falls back
automatically. benchmarks/bench_lcs.py compares both.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


@njit(cache=True)
def _lcs_numba(a: np.ndarray, b: np.ndarray) -> int:
    m = a.shape[0]
    n = b.shape[0]
    prev = np.zeros(n + 1, dtype=np.int64)
    cur = np.zeros(n + 1, dtype=np.int64)
    for i in range(m):
        for j in range(n):
            if a[i] == b[j]:
                cur[j + 1] = prev[j] + 1
            else:
                best = prev[j + 1]
                if cur[j] > best:
                    best = cur[j]
                cur[j + 1] = best
        tmp = prev
        prev = cur
        cur = tmp
    return prev[n]


def _lcs_numpy(a: np.ndarray, b: np.ndarray) -> int:
    n = b.shape[0]
    prev = np.zeros(n + 1, dtype=np.int64)
    row = np.empty(n + 1, dtype=np.int64)
    row[0] = 0
    for i in range(a.shape[0]):
        cand = np.maximum(prev[1:], prev[:-1] + (b == a[i]))
        np.maximum.accumulate(cand, out=row[1:])
        prev, row = row, prev
        row[0] = 0
    return int(prev[n])


def numba_enabled() -> bool:
    if os.environ.get("HOPQG_NO_NUMBA", "").strip().lower() in {"1", "true", "yes"}:
        return False
    return NUMBA_AVAILABLE


def backend_name() -> str:
    return "numba" if numba_enabled() else "numpy"


def lcs_length(a_ids, b_ids) -> int:
    """LCS length of two token-id sequences via the selected kernel."""
    a = np.asarray(a_ids, dtype=np.int64)
    b = np.asarray(b_ids, dtype=np.int64)
    if a.size == 0 or b.size == 0:
        return 0
    if numba_enabled():
        return int(_lcs_numba(a, b))
    return _lcs_numpy(a, b)

"""Time the two ROUGE-L LCS kernels on random token-id corpora.

Run from the repo root:

    python3 benchmarks/bench_lcs.py [--pairs 2000] [--min-len 8] [--max-len 60]

The numba path pays a one-off compile on first call (excluded via warmup);
after that it should win on long sequences while the numpy path stays
dependency-light and is always available via HOPQG_NO_NUMBA=1.
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

from hopqg._lcs import NUMBA_AVAILABLE, _lcs_numba, _lcs_numpy


def make_pairs(count: int, min_len: int, max_len: int, vocab: int, seed: int):
    rng = random.Random(seed)
    pairs = []
    for _ in range(count):
        a = np.array([rng.randrange(vocab) for _ in range(rng.randint(min_len, max_len))], dtype=np.int64)
        b = np.array([rng.randrange(vocab) for _ in range(rng.randint(min_len, max_len))], dtype=np.int64)
        pairs.append((a, b))
    return pairs


def bench(fn, pairs) -> tuple[float, int]:
    start = time.perf_counter()
    checksum = 0
    for a, b in pairs:
        checksum += int(fn(a, b))
    return time.perf_counter() - start, checksum


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--pairs", type=int, default=2000)
    parser.add_argument("--min-len", type=int, default=8)
    parser.add_argument("--max-len", type=int, default=60)
    parser.add_argument("--vocab", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    pairs = make_pairs(args.pairs, args.min_len, args.max_len, args.vocab, args.seed)

    rows = []
    numpy_time, numpy_sum = bench(_lcs_numpy, pairs)
    rows.append(("numpy", numpy_time, numpy_sum))

    if NUMBA_AVAILABLE:
        _lcs_numba(pairs[0][0], pairs[0][1])  # compile outside the timer
        numba_time, numba_sum = bench(_lcs_numba, pairs)
        rows.append(("numba", numba_time, numba_sum))
        if numba_sum != numpy_sum:
            raise SystemExit("kernel mismatch: numba and numpy disagree")
    else:
        print("numba not installed; timing the numpy path only")

    print(f"{args.pairs} pairs, lengths {args.min_len}-{args.max_len}, vocab {args.vocab}")
    print(f"{'kernel':<8}{'seconds':>10}{'pairs/s':>12}")
    for name, seconds, _ in rows:
        print(f"{name:<8}{seconds:>10.4f}{args.pairs / seconds:>12.0f}")
    if len(rows) == 2:
        print(f"speedup: numba is {numpy_time / numba_time:.1f}x the numpy path")


if __name__ == "__main__":
    main()

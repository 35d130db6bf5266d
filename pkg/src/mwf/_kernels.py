"""Hot loops for per-prime sweeps, with two interchangeable backends.

* ``numba``  - ``@njit`` kernels from :mod:`mwf._nb_kernels` on int64
  residues; batch entry points run under ``prange``.  Used for ``p < 2**31``.
* ``python`` - numpy-vectorized naive counting plus a dict-based BSGS on
  Python ints.  Always used for ``p >= 2**31``; used everywhere when numba is
  unavailable or the environment sets ``MWF_NUMBA=0``.

Both backends run the same deterministic algorithm and return identical
results (checked in the test-suite and by ``benchmarks/bench_kernels.py``).
"""
from __future__ import annotations

import math
import os

import numpy as np

from . import _arith
from .fp import sqrt_mod_int

KERNEL_P_BOUND = 1 << 31
NAIVE_THRESHOLD = 1 << 14
NAIVE_FALLBACK_BOUND = 10**7
BSGS_TRIALS = 16


def _numba_requested() -> bool:
    return os.environ.get("MWF_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")


_nb = None
if _numba_requested():
    try:
        import numba

        if os.environ.get("NUMBA_THREADING_LAYER") is None:
            # the tbb probe warns on older system tbb; workqueue is always present
            numba.config.THREADING_LAYER = "workqueue"
        from . import _nb_kernels as _nb
    except ImportError:  # pragma: no cover
        _nb = None

BACKEND = "numba" if _nb is not None else "python"


def set_threads(n: int) -> int:
    """Set the worker count for batch kernels; returns the count in effect."""
    if _nb is None:
        return 1
    n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)
    return n


def hasse_bounds(p: int) -> tuple[int, int]:
    w = math.isqrt(4 * p)
    return p + 1 - w, p + 1 + w


# ---------------------------------------------------------------- python path


def naive_count_np(a: int, b: int, p: int) -> int:
    if p >= KERNEL_P_BOUND:
        raise ValueError("naive count limited to p < 2^31")
    x = np.arange(p, dtype=np.int64)
    r = ((x * x % p) * x + (a % p) * x + (b % p)) % p
    squares = np.zeros(p, dtype=bool)
    squares[x * x % p] = True
    zero = r == 0
    return int(1 + np.count_nonzero(zero) + 2 * np.count_nonzero(squares[r] & ~zero))


def _next_point(start, a, b, p):
    for x in range(start, p):
        r = (x * x * x + a * x + b) % p
        if r == 0:
            return x, 0
        if pow(r, (p - 1) // 2, p) == 1:
            # the kernels take whichever root Tonelli-Shanks lands on; any
            # root works since only orders are used
            return x, sqrt_mod_int(r, p)
    return _arith.INF


def point_order_bsgs(P, a, p, lo, hi) -> int:
    """Order of ``P`` via a multiple found by BSGS in ``[lo, hi]``; 0 if none."""
    s = math.isqrt(hi - lo) + 1
    table = {}
    J = _arith.INF
    for j in range(1, s + 1):
        J = _arith.add(J, P, a, p)
        if J[0] == -1:
            return j
        table.setdefault(J[0], (j, J[1]))
    G = _arith.mul(2 * s + 1, P, a, p)
    c = lo + s
    R = _arith.mul(c, P, a, p)
    while c - s <= hi:
        m = 0
        if R[0] == -1:
            m = c
        elif R[0] in table:
            j, jy = table[R[0]]
            m = c - j if R[1] == jy else c + j
        if m > 0 and _arith.mul(m, P, a, p)[0] == -1:
            return _arith.order_from_multiple(m, P, a, p)
        R = _arith.add(R, G, a, p)
        c += 2 * s + 1
    return 0


def _lcm_of_orders(a, b, p, lo, hi, trials):
    L, x = 1, 0
    for _ in range(trials):
        P = _next_point(x, a, b, p)
        if P[0] == -1:
            break
        x = P[0] + 1
        o = point_order_bsgs(P, a, p, lo, hi)
        if o == 0:
            return 0
        L = L * o // math.gcd(L, o)
        if hi // L - (lo - 1) // L == 1:
            break
    return L


def hasse_count_py(a: int, b: int, p: int) -> int:
    a, b = a % p, b % p
    lo, hi = hasse_bounds(p)
    L = _lcm_of_orders(a, b, p, lo, hi, BSGS_TRIALS)
    if L == 0:
        return -1
    if hi // L - (lo - 1) // L == 1:
        return (hi // L) * L
    d = 2
    while pow(d, (p - 1) // 2, p) != p - 1:
        d += 1
    # quadratic twist: #E + #E^d = 2p + 2, and its Hasse interval is the same
    Lt = _lcm_of_orders(a * d * d % p, b * d * d * d % p, p, lo, hi, BSGS_TRIALS)
    if Lt == 0:
        return -1
    hits = [n for n in range(-(-lo // L) * L, hi + 1, L) if (2 * p + 2 - n) % Lt == 0]
    return hits[0] if len(hits) == 1 else -1


def _count_one_py(a, b, p):
    if p < NAIVE_THRESHOLD:
        return naive_count_np(a, b, p)
    n = hasse_count_py(a, b, p)
    if n == -1 and p < NAIVE_FALLBACK_BOUND:
        return naive_count_np(a, b, p)
    return n


def _sylow_v_py(P, a, p, n, ell):
    if P[0] == -1:
        return 0
    while n % ell == 0:
        n //= ell
    return _arith.lpower_order(_arith.mul(n, P, a, p), ell, a, p)


# ---------------------------------------------------------------- dispatch


def _use_nb(p) -> bool:
    return _nb is not None and p < KERNEL_P_BOUND


def naive_count(a: int, b: int, p: int) -> int:
    if _use_nb(p):
        return int(_nb.naive_count(np.int64(a % p), np.int64(b % p), np.int64(p)))
    return naive_count_np(a, b, p)


def hasse_count(a: int, b: int, p: int) -> int:
    """Group order by BSGS in the Hasse interval; ``-1`` if not pinned down."""
    if _use_nb(p):
        return int(_nb.hasse_count(np.int64(a % p), np.int64(b % p), np.int64(p)))
    return hasse_count_py(a, b, p)


def _small(p_arr) -> bool:
    return _nb is not None and (p_arr.size == 0 or int(p_arr.max()) < KERNEL_P_BOUND)


def count_many(a_arr, b_arr, p_arr) -> np.ndarray:
    """Group orders for many reductions ``(a mod p, b mod p)``; ``-1`` = ambiguous."""
    p_arr = np.asarray(p_arr, dtype=np.int64)
    a_arr = np.asarray(a_arr, dtype=np.int64) % p_arr
    b_arr = np.asarray(b_arr, dtype=np.int64) % p_arr
    if _small(p_arr):
        return _nb.count_many(a_arr, b_arr, p_arr)
    return np.array(
        [_count_one_py(int(a), int(b), int(p)) for a, b, p in zip(a_arr, b_arr, p_arr)],
        dtype=np.int64,
    )


def sylow_valuations(points, a_arr, p_arr, n_arr, ell: int) -> np.ndarray:
    """``v_ell(ord P_i)`` for points ``P_i`` over ``F_{p_i}`` with group order ``n_i``."""
    p_arr = np.asarray(p_arr, dtype=np.int64)
    if _small(p_arr):
        xs = np.array([P[0] for P in points], dtype=np.int64)
        ys = np.array([P[1] for P in points], dtype=np.int64)
        v = _nb.sylow_orders_many(
            xs, ys, np.asarray(a_arr, dtype=np.int64) % p_arr, p_arr,
            np.asarray(n_arr, dtype=np.int64), np.int64(ell),
        )
        if (v < 0).any():
            raise ArithmeticError("point does not have ell-power order after projection")
        return v
    return np.array(
        [_sylow_v_py(P, int(a), int(p), int(n), ell) for P, a, p, n in zip(points, a_arr, p_arr, n_arr)],
        dtype=np.int64,
    )

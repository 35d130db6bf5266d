"""numba kernels; imported only when the numba backend is active.

Residues are int64 with ``p < 2**31`` so ``a * b`` never overflows.
Infinity is ``x == -1``.
"""
import numpy as np
from numba import njit, prange

NAIVE_THRESHOLD = 1 << 14
NAIVE_FALLBACK_BOUND = 10**7
BSGS_TRIALS = 16


@njit(cache=True, nogil=True)
def isqrt(n):
    r = np.int64(np.sqrt(np.float64(n)))
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


@njit(cache=True, nogil=True)
def gcd(u, v):
    while v != 0:
        u, v = v, u % v
    return u


@njit(cache=True, nogil=True)
def inv(a, p):
    a = a % p
    r0, r1 = p, a
    s0, s1 = np.int64(0), np.int64(1)
    while r1 != 0:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    return s0 % p


@njit(cache=True, nogil=True)
def add(x1, y1, x2, y2, a, p):
    if x1 == -1:
        return x2, y2
    if x2 == -1:
        return x1, y1
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return np.int64(-1), np.int64(0)
        lam = (3 * (x1 * x1 % p) + a) % p * inv(2 * y1, p) % p
    else:
        lam = (y2 - y1) % p * inv(x2 - x1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    y3 = (lam * ((x1 - x3) % p) - y1) % p
    return x3, y3


@njit(cache=True, nogil=True)
def mul(k, x, y, a, p):
    if k < 0:
        k = -k
        y = (-y) % p
    rx, ry = np.int64(-1), np.int64(0)
    bx, by = x, y
    while k > 0:
        if k & 1:
            rx, ry = add(rx, ry, bx, by, a, p)
        k >>= 1
        if k > 0:
            bx, by = add(bx, by, bx, by, a, p)
    return rx, ry


@njit(cache=True, nogil=True)
def powmod(b, e, p):
    r = np.int64(1)
    b = b % p
    while e > 0:
        if e & 1:
            r = r * b % p
        b = b * b % p
        e >>= 1
    return r


@njit(cache=True, nogil=True)
def sqrt(a, p):
    if p % 4 == 3:
        return powmod(a, (p + 1) // 4, p)
    q = p - 1
    s = 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = np.int64(2)
    while powmod(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m = s
    c = powmod(z, q, p)
    t = powmod(a, q, p)
    r = powmod(a, (q + 1) // 2, p)
    while t != 1:
        i = 0
        t2 = t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = powmod(c, np.int64(1) << (m - i - 1), p)
        m = i
        c = b * b % p
        t = t * c % p
        r = r * b % p
    return r


@njit(cache=True, nogil=True)
def next_point(start, a, b, p):
    x = start
    while x < p:
        r = ((x * x % p) * x + a * x + b) % p
        if r == 0:
            return x, np.int64(0)
        if powmod(r, (p - 1) // 2, p) == 1:
            return x, sqrt(r, p)
        x += 1
    return np.int64(-1), np.int64(0)


@njit(cache=True, nogil=True)
def nonresidue(p):
    d = np.int64(2)
    while powmod(d, (p - 1) // 2, p) != p - 1:
        d += 1
    return d


@njit(cache=True, nogil=True)
def order_from_multiple(M, x, y, a, p):
    order = M
    n = M
    q = np.int64(2)
    while q * q <= n:
        if n % q == 0:
            while n % q == 0:
                n //= q
            while order % q == 0:
                cx, _ = mul(order // q, x, y, a, p)
                if cx != -1:
                    break
                order //= q
        q += 1
    if n > 1 and order % n == 0:
        cx, _ = mul(order // n, x, y, a, p)
        if cx == -1:
            order //= n
    return order


@njit(cache=True, nogil=True)
def naive_count(a, b, p):
    a = a % p
    b = b % p
    squares = np.zeros(p, dtype=np.bool_)
    for y in range(p):
        squares[y * y % p] = True
    count = np.int64(1)
    for x in range(p):
        r = ((x * x % p) * x + a * x + b) % p
        if r == 0:
            count += 1
        elif squares[r]:
            count += 2
    return count


@njit(cache=True, nogil=True)
def point_order(x, y, a, p, lo, hi):
    s = isqrt(hi - lo) + 1
    xs = np.empty(s, dtype=np.int64)
    ys = np.empty(s, dtype=np.int64)
    jx, jy = np.int64(-1), np.int64(0)
    for j in range(1, s + 1):
        jx, jy = add(jx, jy, x, y, a, p)
        if jx == -1:
            return np.int64(j)
        xs[j - 1] = jx
        ys[j - 1] = jy
    perm = np.argsort(xs, kind="mergesort")
    sx = xs[perm]
    gx, gy = mul(2 * s + 1, x, y, a, p)
    c = lo + s
    rx, ry = mul(c, x, y, a, p)
    while c - s <= hi:
        m = np.int64(0)
        if rx == -1:
            m = c
        else:
            k = np.searchsorted(sx, rx)
            if k < s and sx[k] == rx:
                j = perm[k] + 1
                m = c - j if ry == ys[j - 1] else c + j
        if m > 0:
            cx, _ = mul(m, x, y, a, p)
            if cx == -1:
                return order_from_multiple(m, x, y, a, p)
        rx, ry = add(rx, ry, gx, gy, a, p)
        c += 2 * s + 1
    return np.int64(0)


@njit(cache=True, nogil=True)
def lcm_of_orders(a, b, p, lo, hi, trials):
    L = np.int64(1)
    x = np.int64(0)
    for _ in range(trials):
        px, py = next_point(x, a, b, p)
        if px == -1:
            break
        x = px + 1
        o = point_order(px, py, a, p, lo, hi)
        if o == 0:
            return np.int64(0)
        L = L * o // gcd(L, o)
        if hi // L - (lo - 1) // L == 1:
            break
    return L


@njit(cache=True, nogil=True)
def hasse_count(a, b, p):
    a = a % p
    b = b % p
    w = isqrt(4 * p)
    lo, hi = p + 1 - w, p + 1 + w
    L = lcm_of_orders(a, b, p, lo, hi, BSGS_TRIALS)
    if L == 0:
        return np.int64(-1)
    if hi // L - (lo - 1) // L == 1:
        return (hi // L) * L
    d = nonresidue(p)
    at = a * d % p * d % p
    bt = b * d % p * d % p * d % p
    Lt = lcm_of_orders(at, bt, p, lo, hi, BSGS_TRIALS)
    if Lt == 0:
        return np.int64(-1)
    found = np.int64(-1)
    hits = 0
    n = ((lo + L - 1) // L) * L
    while n <= hi:
        if (2 * p + 2 - n) % Lt == 0:
            found = n
            hits += 1
        n += L
    return found if hits == 1 else np.int64(-1)


@njit(cache=True, nogil=True)
def count_one(a, b, p):
    if p < NAIVE_THRESHOLD:
        return naive_count(a, b, p)
    n = hasse_count(a, b, p)
    if n == -1 and p < NAIVE_FALLBACK_BOUND:
        return naive_count(a, b, p)
    return n


@njit(cache=True, parallel=True)
def count_many(a_arr, b_arr, p_arr):
    out = np.empty(p_arr.shape[0], dtype=np.int64)
    for i in prange(p_arr.shape[0]):
        out[i] = count_one(a_arr[i], b_arr[i], p_arr[i])
    return out


@njit(cache=True, parallel=True)
def sylow_orders_many(x_arr, y_arr, a_arr, p_arr, n_arr, ell):
    """``v_ell`` of the order of each point, given group orders ``n_arr``.

    Entries with ``x == -1`` (infinity) give 0; ``-1`` marks a point whose
    projection is not of ell-power order (``n_arr`` was not a group order).
    """
    out = np.zeros(p_arr.shape[0], dtype=np.int64)
    for i in prange(p_arr.shape[0]):
        x, y, a, p, n = x_arr[i], y_arr[i], a_arr[i], p_arr[i], n_arr[i]
        if x == -1:
            continue
        while n % ell == 0:
            n //= ell
        qx, qy = mul(n, x, y, a, p)
        v = 0
        while qx != -1 and v <= 64:
            qx, qy = mul(ell, qx, qy, a, p)
            v += 1
        out[i] = v if qx == -1 else -1
    return out

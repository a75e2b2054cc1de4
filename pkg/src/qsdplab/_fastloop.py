"""Jitted inner loops for the multiplicative-weights frameworks.

One iteration = exact Gibbs state of the current weighted constraint sum,
noisy trace estimates (the k-fold averaged estimator emulated by its normal
limit, clipped at the half-resolution cap so the advertised error bars hold
almost surely), the per-index feasibility search, and a grid-exact weight
update mirrored in the partial-sum tree.

Estimates are drawn lazily: an index's estimate materializes when the search
tests it, which is what keeps the per-iteration cost near the support size.
Status codes: 0 = ran all iterations, 1 = stopped early (oracle empty /
clean pass), 2 = seed-retry budget exhausted (difference-sampler emulation).
"""

from __future__ import annotations

import numpy as np
from numba import njit

STATUS_FULL = 0
STATUS_EARLY = 1
STATUS_SEED_EXHAUSTED = 2

_SEED_RETRY_CAP = 64


@njit(cache=True, inline="always")
def _noise(tr: float, k: float, cap: float) -> float:
    # std of the k-averaged two-outcome estimator at p = 1/8 + tr/16
    p = 0.125 + tr / 16.0
    if p < 0.0:
        p = 0.0
    elif p > 1.0:
        p = 1.0
    s = 16.0 * np.sqrt(p * (1.0 - p) / k)
    z = np.random.normal() * s
    if z > cap:
        z = cap
    elif z < -cap:
        z = -cap
    return z


@njit(cache=True, inline="always")
def _tree_add(heap: np.ndarray, leaf_base: int, idx: int, units: np.int64) -> None:
    k = leaf_base + idx
    while k >= 1:
        heap[k] += units
        k //= 2


@njit(cache=True, inline="always")
def _pair_vertex_max(tj, tk, bj, bk, q0, gb, cmax):
    """Maximum of the trace form over one pair's feasible region.

    The region {c >= 0, c_j + c_k <= cmax, b_j c_j + b_k c_k <= gb} is
    bounded, so the maximum sits at one of the six line-intersection
    vertices.  Returns (reached, c_j, c_k) where reached means >= q0.
    """
    best = -1.0e300
    bcj = -1.0
    bck = -1.0
    for vi in range(6):
        cj = -1.0
        ck = -1.0
        if vi == 0:
            cj, ck = 0.0, 0.0
        elif vi == 1:
            cj, ck = 0.0, cmax
        elif vi == 2:
            cj, ck = cmax, 0.0
        elif vi == 3:
            if bk > 1e-300 or bk < -1e-300:
                cj, ck = 0.0, gb / bk
        elif vi == 4:
            if bj > 1e-300 or bj < -1e-300:
                cj, ck = gb / bj, 0.0
        else:
            det = bj - bk
            if det > 1e-300 or det < -1e-300:
                cj = (gb - bk * cmax) / det
                ck = cmax - cj
        if cj < -1e-12 or ck < -1e-12:
            continue
        if cj < 0.0:
            cj = 0.0
        if ck < 0.0:
            ck = 0.0
        if cj + ck > cmax + 1e-12:
            continue
        if bj * cj + bk * ck > gb + 1e-12:
            continue
        val = tj * cj + tk * ck
        if val > best:
            best = val
            bcj = cj
            bck = ck
    return (best >= q0 and bcj >= 0.0), bcj, bck


@njit(cache=True)
def _pair_search(est: np.ndarray, b: np.ndarray, q0: float, gb: float, cmax: float):
    """First two-index completion whose region reaches the trace target."""
    mrows = est.shape[0]
    for j in range(1, mrows):
        for kk in range(j + 1, mrows):
            ok, cj, ck = _pair_vertex_max(est[j], est[kk], b[j], b[kk], q0, gb, cmax)
            if ok:
                return j, kk, cj, ck
    return -1, -1, 0.0, 0.0


@njit(cache=True, inline="always")
def _oracle_interval(est_j: float, b_j: float, q0: float, gb: float, cmax: float):
    """Feasible c-interval for one index: trace and bound half-lines."""
    lo = 0.0
    hi = cmax
    if est_j > 1e-300:
        c = q0 / est_j
        if c > lo:
            lo = c
    elif est_j < -1e-300:
        if q0 <= 0.0:
            c = q0 / est_j      # nonnegative upper bound on c
            if c < hi:
                hi = c
        else:
            hi = -1.0
    else:
        if q0 > 0.0:
            hi = -1.0
    if b_j > 1e-300:
        c = gb / b_j
        if c < hi:
            hi = c
    elif b_j < -1e-300:
        c = gb / b_j
        if c > lo:
            lo = c
    else:
        if gb < 0.0:
            hi = -1.0
    return lo, hi


@njit(cache=True, inline="always")
def _draw_seed_cut(beta_t: float, delta: float) -> float:
    bits = int(np.ceil(np.log2(16.0 * beta_t / delta)))
    if bits < 1:
        bits = 1
    grid = np.int64(1) << bits
    s = np.random.randint(0, grid)
    lo = 1.0 / (2.0 * beta_t)
    return lo + (s + 0.5) / grid * lo


@njit(cache=True)
def _seed_ok(eigs: np.ndarray, scale: float, q: float, eta: float) -> bool:
    for i in range(eigs.size):
        lam = eigs[i] / scale
        if lam < 0.0:
            lam = -lam
        d = lam - q
        if d < 0.0:
            d = -d
        if d < eta:
            return False
    return True


@njit(cache=True)
def ak_loop_diag(
    Ad: np.ndarray,          # (m+1, n) diagonals, row 0 is -C
    b: np.ndarray,           # (m+1,), b[0] = -g
    g: float,
    r_dual: float,
    b_guard: float,
    theta: float,
    T: np.int64,
    heap: np.ndarray,        # int64 partial-sum tree, mutated in place
    leaf_base: int,
    grid: float,
    k: float,
    cap: float,
    state_mode: int,
    B_state: float,
    seed: np.int64,
):
    np.random.seed(seed)
    mrows, n = Ad.shape
    h = np.zeros(n)
    rho = np.empty(n)
    tr = np.empty(mrows)
    est = np.empty(mrows)
    cmax = 1.0 - 1.0 / (2.0 * r_dual)
    delta = theta
    gb = g / (2.0 * r_dual) - b_guard
    units0 = np.int64(round(theta / (2.0 * r_dual) / grid))
    retries = 0
    for it in range(T):
        hmin = h[0]
        for i in range(1, n):
            if h[i] < hmin:
                hmin = h[i]
        ssum = 0.0
        for i in range(n):
            rho[i] = np.exp(-(h[i] - hmin))
            ssum += rho[i]
        for i in range(n):
            rho[i] /= ssum
        if state_mode == 1:
            root = heap[1] * grid
            beta_t = 2.0 * root * B_state
            if beta_t >= 1.0 and beta_t <= n / 4.0:
                eta = 0.2 / (8.0 * beta_t * beta_t)
                ok = False
                for _ in range(_SEED_RETRY_CAP):
                    retries += 1
                    q = _draw_seed_cut(beta_t, 0.2)
                    if _seed_ok(h, 2.0 * root * B_state, q, eta):
                        ok = True
                        break
                if not ok:
                    return STATUS_SEED_EXHAUSTED, it, retries
        for j in range(mrows):
            acc = 0.0
            for i in range(n):
                acc += Ad[j, i] * rho[i]
            tr[j] = acc
        e0 = (tr[0] + _noise(tr[0], k, cap)) / (2.0 * r_dual)
        q0 = -delta / 2.0 - e0
        best_j = -1
        best_c = 0.0
        for j in range(1, mrows):
            est[j] = tr[j] + _noise(tr[j], k, cap)
            lo, hi = _oracle_interval(est[j], b[j], q0, gb, cmax)
            if lo <= hi:
                best_j = j
                best_c = lo
                break
        sec_j = -1
        sec_c = 0.0
        if best_j < 0:
            best_j, sec_j, best_c, sec_c = _pair_search(est, b, q0, gb, cmax)
            if best_j < 0:
                return STATUS_EARLY, it, retries
        unitsj = np.int64(round(theta * best_c / grid))
        _tree_add(heap, leaf_base, 0, units0)
        dy0 = units0 * grid
        dyj = unitsj * grid
        if unitsj != 0:
            _tree_add(heap, leaf_base, best_j, unitsj)
        for i in range(n):
            h[i] += dy0 * Ad[0, i] + dyj * Ad[best_j, i]
        if sec_j >= 0:
            unitsk = np.int64(round(theta * sec_c / grid))
            if unitsk != 0:
                _tree_add(heap, leaf_base, sec_j, unitsk)
                dyk = unitsk * grid
                for i in range(n):
                    h[i] += dyk * Ad[sec_j, i]
    return STATUS_FULL, T, retries


@njit(cache=True)
def ak_loop_dense(
    A: np.ndarray,           # (m+1, n, n) complex, row 0 is -C
    b: np.ndarray,
    g: float,
    r_dual: float,
    b_guard: float,
    theta: float,
    T: np.int64,
    heap: np.ndarray,
    leaf_base: int,
    grid: float,
    k: float,
    cap: float,
    state_mode: int,
    B_state: float,
    seed: np.int64,
):
    np.random.seed(seed)
    mrows = A.shape[0]
    n = A.shape[1]
    H = np.zeros((n, n), dtype=np.complex128)
    tr = np.empty(mrows)
    est = np.empty(mrows)
    ew = np.empty(n)
    cmax = 1.0 - 1.0 / (2.0 * r_dual)
    delta = theta
    gb = g / (2.0 * r_dual) - b_guard
    units0 = np.int64(round(theta / (2.0 * r_dual) / grid))
    retries = 0
    for it in range(T):
        w, V = np.linalg.eigh(H)
        wmin = w[0]
        ssum = 0.0
        for i in range(n):
            ew[i] = np.exp(-(w[i] - wmin))
            ssum += ew[i]
        for i in range(n):
            ew[i] /= ssum
        rho = (V * ew) @ V.conj().T
        if state_mode == 1:
            root = heap[1] * grid
            beta_t = 2.0 * root * B_state
            if beta_t >= 1.0 and beta_t <= n / 4.0:
                eta = 0.2 / (8.0 * beta_t * beta_t)
                ok = False
                for _ in range(_SEED_RETRY_CAP):
                    retries += 1
                    q = _draw_seed_cut(beta_t, 0.2)
                    if _seed_ok(w, 2.0 * root * B_state, q, eta):
                        ok = True
                        break
                if not ok:
                    return STATUS_SEED_EXHAUSTED, it, retries
        for j in range(mrows):
            acc = 0.0
            for p in range(n):
                for qq in range(n):
                    acc += (A[j, p, qq] * rho[qq, p]).real
            tr[j] = acc
        e0 = (tr[0] + _noise(tr[0], k, cap)) / (2.0 * r_dual)
        q0 = -delta / 2.0 - e0
        best_j = -1
        best_c = 0.0
        for j in range(1, mrows):
            est[j] = tr[j] + _noise(tr[j], k, cap)
            lo, hi = _oracle_interval(est[j], b[j], q0, gb, cmax)
            if lo <= hi:
                best_j = j
                best_c = lo
                break
        sec_j = -1
        sec_c = 0.0
        if best_j < 0:
            best_j, sec_j, best_c, sec_c = _pair_search(est, b, q0, gb, cmax)
            if best_j < 0:
                return STATUS_EARLY, it, retries
        unitsj = np.int64(round(theta * best_c / grid))
        _tree_add(heap, leaf_base, 0, units0)
        dy0 = units0 * grid
        dyj = unitsj * grid
        if unitsj != 0:
            _tree_add(heap, leaf_base, best_j, unitsj)
        for p in range(n):
            for qq in range(n):
                H[p, qq] += dy0 * A[0, p, qq] + dyj * A[best_j, p, qq]
        if sec_j >= 0:
            unitsk = np.int64(round(theta * sec_c / grid))
            if unitsk != 0:
                _tree_add(heap, leaf_base, sec_j, unitsk)
                dyk = unitsk * grid
                for p in range(n):
                    for qq in range(n):
                        H[p, qq] += dyk * A[sec_j, p, qq]
    return STATUS_FULL, T, retries


@njit(cache=True)
def primal_loop_diag(
    Ad: np.ndarray,          # (m+1, n_red) reduced diagonals incl. slack column
    b: np.ndarray,           # reduced bounds, b[0] = -g/R
    theta: float,
    T: np.int64,
    heap: np.ndarray,
    leaf_base: int,
    grid: float,
    k: float,
    cap: float,
    state_mode: int,
    B_state: float,
    seed: np.int64,
):
    np.random.seed(seed)
    mrows, n = Ad.shape
    h = np.zeros(n)
    rho = np.empty(n)
    units = np.int64(round(theta / grid))
    retries = 0
    for it in range(T):
        hmin = h[0]
        for i in range(1, n):
            if h[i] < hmin:
                hmin = h[i]
        ssum = 0.0
        for i in range(n):
            rho[i] = np.exp(-(h[i] - hmin))
            ssum += rho[i]
        for i in range(n):
            rho[i] /= ssum
        if state_mode == 1:
            root = heap[1] * grid
            beta_t = 2.0 * root * B_state
            if beta_t >= 1.0 and beta_t <= n / 4.0:
                eta = 0.2 / (8.0 * beta_t * beta_t)
                ok = False
                for _ in range(_SEED_RETRY_CAP):
                    retries += 1
                    q = _draw_seed_cut(beta_t, 0.2)
                    if _seed_ok(h, 2.0 * root * B_state, q, eta):
                        ok = True
                        break
                if not ok:
                    return STATUS_SEED_EXHAUSTED, it, 0.0, retries
        violated = -1
        for j in range(mrows):
            acc = 0.0
            for i in range(n):
                acc += Ad[j, i] * rho[i]
            est = acc + _noise(acc, k, cap)
            if est >= b[j] + theta / 2.0:
                violated = j
                break
        if violated < 0:
            return STATUS_EARLY, it, 1.0 - rho[n - 1], retries
        _tree_add(heap, leaf_base, violated, units)
        dy = units * grid
        for i in range(n):
            h[i] += dy * Ad[violated, i]
    return STATUS_FULL, T, 0.0, retries


@njit(cache=True)
def primal_loop_dense(
    A: np.ndarray,           # (m+1, n_red, n_red) reduced stack incl. slack dim
    b: np.ndarray,
    theta: float,
    T: np.int64,
    heap: np.ndarray,
    leaf_base: int,
    grid: float,
    k: float,
    cap: float,
    state_mode: int,
    B_state: float,
    seed: np.int64,
):
    np.random.seed(seed)
    mrows = A.shape[0]
    n = A.shape[1]
    H = np.zeros((n, n), dtype=np.complex128)
    ew = np.empty(n)
    units = np.int64(round(theta / grid))
    retries = 0
    for it in range(T):
        w, V = np.linalg.eigh(H)
        wmin = w[0]
        ssum = 0.0
        for i in range(n):
            ew[i] = np.exp(-(w[i] - wmin))
            ssum += ew[i]
        for i in range(n):
            ew[i] /= ssum
        rho = (V * ew) @ V.conj().T
        if state_mode == 1:
            root = heap[1] * grid
            beta_t = 2.0 * root * B_state
            if beta_t >= 1.0 and beta_t <= n / 4.0:
                eta = 0.2 / (8.0 * beta_t * beta_t)
                ok = False
                for _ in range(_SEED_RETRY_CAP):
                    retries += 1
                    q = _draw_seed_cut(beta_t, 0.2)
                    if _seed_ok(w, 2.0 * root * B_state, q, eta):
                        ok = True
                        break
                if not ok:
                    return STATUS_SEED_EXHAUSTED, it, 0.0, retries
        violated = -1
        for j in range(mrows):
            acc = 0.0
            for p in range(n):
                for qq in range(n):
                    acc += (A[j, p, qq] * rho[qq, p]).real
            est = acc + _noise(acc, k, cap)
            if est >= b[j] + theta / 2.0:
                violated = j
                break
        if violated < 0:
            return STATUS_EARLY, it, 1.0 - rho[n - 1, n - 1].real, retries
        _tree_add(heap, leaf_base, violated, units)
        dy = units * grid
        for p in range(n):
            for qq in range(n):
                H[p, qq] += dy * A[violated, p, qq]
    return STATUS_FULL, T, 0.0, retries

"""Compiled inner loop of the pencil (kernel) engine.

Everything here works on the integer codes and lookup tables of a
:class:`~moorexp.gf_tower.FieldCtx`; see ``moore._pencil_scan_compiled`` for
the calling convention.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _mul(a, b, log_t, exp_t):
    if a == 0 or b == 0:
        return 0
    return exp_t[log_t[a] + log_t[b]]


@njit(cache=True)
def _add(a, b, p2, qm1, log_t, exp_t, zech):
    if p2:
        return a ^ b
    if a == 0:
        return b
    if b == 0:
        return a
    la = log_t[a]
    d = log_t[b] - la
    if d < 0:
        d += qm1
    z = zech[d]
    if z < 0:
        return 0
    return exp_t[la + z]


@njit(cache=True)
def _neg(a, p2, half, log_t, exp_t):
    if p2 or a == 0:
        return a
    return exp_t[log_t[a] + half]


@njit(cache=True)
def _det(m, size, p2, qm1, half, log_t, exp_t, zech):
    """Determinant of the leading size x size block of m (destroys m)."""
    det = 1
    for c in range(size):
        piv = -1
        for i in range(c, size):
            if m[i, c] != 0:
                piv = i
                break
        if piv < 0:
            return 0
        if piv != c:
            for j in range(size):
                t = m[c, j]
                m[c, j] = m[piv, j]
                m[piv, j] = t
            det = _neg(det, p2, half, log_t, exp_t)
        det = _mul(det, m[c, c], log_t, exp_t)
        inv = exp_t[qm1 - log_t[m[c, c]]]
        for i in range(c + 1, size):
            if m[i, c] != 0:
                f = _neg(_mul(m[i, c], inv, log_t, exp_t), p2, half, log_t, exp_t)
                for j in range(c, size):
                    m[i, j] = _add(m[i, j], _mul(f, m[c, j], log_t, exp_t),
                                   p2, qm1, log_t, exp_t, zech)
    return det


@njit(cache=True)
def _fq_rank(cols, n, q, fq_add, fq_mul, fq_neg, fq_inv, mat):
    """F_q-rank of n codes, each read as a length-n base-q digit vector."""
    if q == 2:
        basis = np.zeros(64, dtype=np.int64)
        rank = 0
        for t in range(n):
            v = cols[t]
            for b in range(n - 1, -1, -1):
                if (v >> b) & 1:
                    if basis[b] != 0:
                        v ^= basis[b]
                    else:
                        basis[b] = v
                        rank += 1
                        break
        return rank
    for t in range(n):
        v = cols[t]
        for r in range(n):
            mat[t, r] = v % q
            v //= q
    rank = 0
    for c in range(n):
        piv = -1
        for i in range(rank, n):
            if mat[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != rank:
            for j in range(n):
                t = mat[rank, j]
                mat[rank, j] = mat[piv, j]
                mat[piv, j] = t
        inv = fq_inv[mat[rank, c]]
        for j in range(c, n):
            mat[rank, j] = fq_mul[inv, mat[rank, j]]
        for i in range(rank + 1, n):
            f = mat[i, c]
            if f != 0:
                nf = fq_neg[f]
                for j in range(c, n):
                    mat[i, j] = fq_add[mat[i, j], fq_mul[nf, mat[rank, j]]]
        rank += 1
    return rank


@njit(cache=True)
def scan_pencils(q, n, k, p2, qm1, half, log_t, exp_t, zech,
                 fq_add, fq_mul, fq_neg, fq_inv, frob, logb,
                 pivots, free_cols, free_rows, digits, count):
    """Scan ``count`` pencils of one pivot block starting at ``digits``.

    Returns the offset of the first pencil whose linearized polynomial has a
    root space of dimension >= k (a non-Moore witness), or -1.
    """
    km1 = k - 1
    rows = np.zeros(km1, dtype=np.int64)
    for r in range(km1):
        rows[r] = q ** pivots[r]
    nfree = free_cols.shape[0]
    colpow = np.zeros(nfree, dtype=np.int64)
    for s in range(nfree):
        colpow[s] = q ** free_cols[s]
        rows[free_rows[s]] += digits[s] * colpow[s]
    dig = digits.copy()
    big = np.zeros((km1, k), dtype=np.int64)
    sub = np.zeros((max(km1, 1), max(km1, 1)), dtype=np.int64)
    coef = np.zeros(k, dtype=np.int64)
    cols = np.zeros(n, dtype=np.int64)
    mat = np.zeros((n, n), dtype=np.int64)
    target = n - km1
    for off in range(count):
        for r in range(km1):
            for j in range(k):
                big[r, j] = frob[j, rows[r]]
        allzero = True
        for c in range(k):
            for r in range(km1):
                jj = 0
                for j in range(k):
                    if j != c:
                        sub[r, jj] = big[r, j]
                        jj += 1
            if km1 == 0:
                m = 1
            else:
                m = _det(sub, km1, p2, qm1, half, log_t, exp_t, zech)
            if (km1 + c) % 2 == 1:
                m = _neg(m, p2, half, log_t, exp_t)
            coef[c] = m
            if m != 0:
                allzero = False
        if allzero:
            return off
        for t in range(n):
            acc = 0
            for c in range(k):
                if coef[c] != 0:
                    acc = _add(acc, exp_t[log_t[coef[c]] + logb[c, t]],
                               p2, qm1, log_t, exp_t, zech)
            cols[t] = acc
        if _fq_rank(cols, n, q, fq_add, fq_mul, fq_neg, fq_inv, mat) < target:
            return off
        # odometer step, last free slot fastest
        s = nfree - 1
        while s >= 0:
            if dig[s] < q - 1:
                dig[s] += 1
                rows[free_rows[s]] += colpow[s]
                break
            dig[s] = 0
            rows[free_rows[s]] -= (q - 1) * colpow[s]
            s -= 1
    return -1

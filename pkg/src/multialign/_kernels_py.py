"""Pure numpy implementations of the inner loops.

Same signatures as the compiled ``_kernels`` extension; used when the
extension is not built or ``MULTIALIGN_PURE=1`` is set.
"""

import math

import numpy as np


def adamic_adar_block(indptr, indices, weights, row_lo, row_hi, col_lo, col_hi, weighted):
    """Adamic-Adar scores for node rows ``[row_lo, row_hi)`` x columns ``[col_lo, col_hi)``.

    The graph is given as CSR arrays over positive edges only.  Returns a
    dense float64 block.
    """
    out = np.zeros((row_hi - row_lo, col_hi - col_lo))
    degree = np.diff(indptr)
    strength = np.bincount(np.repeat(np.arange(len(degree)), degree), weights, minlength=len(degree))
    for x in range(row_lo, row_hi):
        for p in range(indptr[x], indptr[x + 1]):
            z = indices[p]
            lo, hi = indptr[z], indptr[z + 1]
            ys = indices[lo:hi]
            sel = (ys >= col_lo) & (ys < col_hi) & (ys != x)
            if not sel.any():
                continue
            if weighted:
                denom = math.log1p(strength[z])
                assert denom > 0.0, "common neighbour with zero strength"
                contrib = (weights[p] + weights[lo:hi][sel]) / denom
            else:
                assert degree[z] >= 2, "common neighbour with degree < 2"
                contrib = 1.0 / math.log(degree[z])
            np.add.at(out[x - row_lo], ys[sel] - col_lo, contrib)
    return out


def nmf_epoch(rows, cols, vals, T, Vt, row_counts, col_counts, lam, floor):
    """One masked multiplicative-update epoch, in place.

    ``T`` is (m, r) and ``Vt`` is (n, r), i.e. the transpose of the item
    factor.  Only the observed cells ``(rows[c], cols[c]) -> vals[c]`` enter
    the updates.  T is updated first, then V using the new T.
    """
    w = vals[:, None]

    pred = np.einsum("ck,ck->c", T[rows], Vt[cols])[:, None]
    num = np.zeros_like(T)
    den = np.zeros_like(T)
    np.add.at(num, rows, w * Vt[cols])
    np.add.at(den, rows, pred * Vt[cols])
    den += lam * row_counts[:, None] * T
    ok = den > 0.0
    # non-finite input propagates silently; the caller checks after each epoch
    with np.errstate(invalid="ignore", over="ignore"):
        T[ok] *= num[ok] / den[ok]
    np.maximum(T, floor, out=T)

    pred = np.einsum("ck,ck->c", T[rows], Vt[cols])[:, None]
    num = np.zeros_like(Vt)
    den = np.zeros_like(Vt)
    np.add.at(num, cols, w * T[rows])
    np.add.at(den, cols, pred * T[rows])
    den += lam * col_counts[:, None] * Vt
    ok = den > 0.0
    with np.errstate(invalid="ignore", over="ignore"):
        Vt[ok] *= num[ok] / den[ok]
    np.maximum(Vt, floor, out=Vt)

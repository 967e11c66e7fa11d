"""Pure-numpy power iteration for induced mixed-norm gains.

A norm is encoded as ``(nblocks, bsize, outer, inner)``: the vector is cut
into ``nblocks`` consecutive blocks of length ``bsize``, each block is
measured in l^inner and the block norms are combined in l^outer.  A plain
l^r norm on R^n is ``(1, n, r, r)``.

All starts are iterated together as the columns of one matrix, which keeps
the Python overhead per step constant in the number of restarts.
"""

import numpy as np

inf = np.inf


def conjugate(r):
    if r == 1.0:
        return inf
    if r == inf:
        return 1.0
    return r / (r - 1.0)


def _plain_norms(Z, r):
    A = np.abs(Z)
    if r == inf:
        return A.max(axis=0) if A.shape[0] else np.zeros(A.shape[1:])
    if r == 1.0:
        return A.sum(axis=0)
    m = A.max(axis=0) if A.shape[0] else np.zeros(A.shape[1:])
    s = np.where(m > 0, m, 1.0)
    return s * ((A / s) ** r).sum(axis=0) ** (1.0 / r)


def column_norms(Z, nb, bs, outer, inner):
    k = Z.shape[1]
    blocks = _plain_norms(Z.reshape(nb, bs, k).transpose(1, 0, 2), inner)
    return _plain_norms(blocks, outer)


def _sgn(Z):
    A = np.abs(Z)
    with np.errstate(invalid="ignore", divide="ignore"):
        S = np.where(A > 0, np.conj(Z) / np.where(A > 0, A, 1.0), 0.0)
    return S


def _plain_dual(Z, r):
    # unit vectors in l^r maximizing Re<z, x>, columnwise
    if r == inf:
        return _sgn(Z)
    if r == 1.0:
        out = np.zeros_like(Z)
        if Z.shape[0] == 0:
            return out
        idx = np.abs(Z).argmax(axis=0)
        cols = np.arange(Z.shape[1])
        out[idx, cols] = _sgn(Z[idx, cols])
        return out
    q = conjugate(r)
    A = np.abs(Z)
    m = A.max(axis=0) if A.shape[0] else np.zeros(A.shape[1:])
    m = np.where(m > 0, m, 1.0)
    X = _sgn(Z) * (A / m) ** (q - 1.0)
    n = _plain_norms(X, r)
    return X / np.where(n > 0, n, 1.0)


def dual_map(Z, nb, bs, outer, inner):
    """Columnwise unit vectors (in the given norm) attaining the dual norm."""
    k = Z.shape[1]
    Zb = Z.reshape(nb, bs, k)
    zeta = _plain_norms(Zb.transpose(1, 0, 2), conjugate(inner))
    t = np.real(_plain_dual(zeta, outer))
    U = _plain_dual(Zb.transpose(1, 0, 2).reshape(bs, nb * k), inner)
    U = U.reshape(bs, nb, k).transpose(1, 0, 2)
    return (U * t[:, None, :]).reshape(nb * bs, k)


def power_gain(T, starts, dom, cod, max_steps, rtol):
    """Best gain ||T x||_cod / ||x||_dom reached from the given starts.

    Returns ``(gain, x, converged)`` where ``x`` is the maximizing unit
    vector and ``converged`` tells whether every start stabilized within
    ``max_steps``.
    """
    T = np.asarray(T)
    X = np.array(starts, dtype=np.result_type(T, starts, float), copy=True)
    n0 = column_norms(X, *dom)
    keep = n0 > 0
    X = X[:, keep] / n0[keep]
    if X.shape[1] == 0:
        return 0.0, np.zeros(T.shape[1], dtype=X.dtype), True
    cod_dual = (cod[0], cod[1], conjugate(cod[2]), conjugate(cod[3]))
    g = column_norms(T @ X, *cod)
    converged = False
    for _ in range(max_steps):
        W = dual_map(T @ X, *cod_dual)
        Z = T.T @ W
        Xn = dual_map(Z, *dom)
        gn = column_norms(T @ Xn, *cod)
        better = gn > g
        X[:, better] = Xn[:, better]
        delta = np.where(better, gn - g, 0.0)
        g = np.maximum(g, gn)
        if np.all(delta <= rtol * np.maximum(g, 1e-300)):
            converged = True
            break
    j = int(np.argmax(g))
    return float(g[j]), X[:, j].copy(), converged

"""Similarity of frames and dilation to Riesz bases."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import resolve
from .errors import NotSimilar
from .frames import FramePair, frame_operator, projection_P, require_same_shape, stack_analysis, stack_synthesis
from .pspace import SpaceDesc, invert, max_abs, range_basis


@dataclass(frozen=True)
class SimilarityWitness:
    """``B_n = A_n R`` and ``Phi_n = L Psi_n``; ``residual`` is the max-norm
    mismatch of that identity."""

    R: np.ndarray
    L: np.ndarray
    residual: float


def similar_transform(f: FramePair, R, L, cfg=None) -> FramePair:
    cfg = resolve(cfg)
    R = np.asarray(R)
    L = np.asarray(L)
    invert(R, cfg=cfg)
    invert(L, cfg=cfg)
    return f.replace(A=f.A @ R, Psi=L @ f.Psi)


def recover_similarity(f: FramePair, g: FramePair, tol=None, cfg=None) -> SimilarityWitness:
    """``R = S^-1 theta_Psi theta_B`` and ``L = theta_Phi theta_A S^-1``.

    These are the only candidates, so ``g`` is similar to ``f`` exactly when
    they reproduce ``g``.  Raises :class:`NotSimilar` otherwise.
    """
    cfg = resolve(cfg)
    tol = cfg.tol if tol is None else tol
    require_same_shape(f, g)
    Sinv = invert(frame_operator(f), cfg=cfg)
    R = Sinv @ (f.theta_Psi @ g.theta_A)
    L = (g.theta_Psi @ f.theta_A) @ Sinv
    scale = 1.0 + max(max_abs(g.A), max_abs(g.Psi))
    residual = max(max_abs(f.A @ R - g.A), max_abs(L @ f.Psi - g.Psi)) / scale
    if residual > tol:
        raise NotSimilar(f"transforms do not reproduce the second pair (residual {residual:.3e})", residual)
    try:
        invert(R, cfg=cfg)
        invert(L, cfg=cfg)
    except Exception as exc:
        raise NotSimilar(f"recovered transform is singular: {exc}", residual) from exc
    return SimilarityWitness(R, L, residual)


def is_similar(f: FramePair, g: FramePair, tol=None, cfg=None) -> bool:
    """Similar frames share the projection ``P``; so do only similar frames."""
    cfg = resolve(cfg)
    tol = cfg.tol if tol is None else tol
    require_same_shape(f, g)
    return max_abs(projection_P(f, cfg) - projection_P(g, cfg)) <= tol


@dataclass(frozen=True)
class Dilation:
    """The dilated pair on ``X1 = X (+) W`` with ``W = range(I - P)``.

    ``W_basis`` has orthonormal columns spanning ``W`` inside the block
    space; the last ``k`` coordinates of ``X1`` are coefficients in it.
    """

    dilated: FramePair
    embed: np.ndarray
    W_basis: np.ndarray

    @property
    def k(self):
        return self.W_basis.shape[1]


def dilate(f: FramePair, cfg=None) -> Dilation:
    """``B_n(x, w) = A_n x + (Qw)_n`` and ``Phi_n y = (Psi_n y, Q^T (I - P) L_n y)``.

    Then ``theta_B = [theta_A, Q]``, ``theta_Phi = [theta_Psi; Q^T (I - P)]``,
    the frame operator is ``S (+) I_k`` and the new projection is the identity.
    ``X1`` carries the same l^r norm as ``X`` on all ``d + k`` coordinates, so
    ``x -> (x, 0)`` is isometric.
    """
    cfg = resolve(cfg)
    P = projection_P(f, cfg)
    n = P.shape[0]
    comp = np.eye(n) - P
    Q = range_basis(comp, tol=1e-10, scale=1.0 + max_abs(P))
    k = Q.shape[1]
    tB = np.hstack([f.theta_A, Q])
    tPhi = np.vstack([f.theta_Psi, Q.conj().T @ comp])
    X1 = SpaceDesc(f.d + k, f.X.norm_exp, f.X.scalar_field)
    dil = FramePair(stack_analysis(tB, f.N, f.e), stack_synthesis(tPhi, f.N, f.e), f.p, X1, f.Y)
    embed = np.vstack([np.eye(f.d), np.zeros((k, f.d))])
    return Dilation(dil, embed, Q)

"""Seeded random instances of every kind the verification suite needs.

Randomness comes from Philox keyed by ``(seed, kind, shape)``, so identical
specs give bit-identical output regardless of generation order.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass

import numpy as np

from ..frames import canonical_dual, frame_operator, from_UV
from ..pspace import SpaceDesc, invert, operator_norm, smallest_pivot

KINDS = (
    "generic",
    "parseval",
    "riesz",
    "bessel_only",
    "orthogonal_pair",
    "approx_dual_pair",
    "perturbation_family",
    "positive",
)

MIN_PIVOT = 0.1
BUDGET = 200


class GenerationError(RuntimeError):
    """Resampling budget exhausted for a pathological spec."""


@dataclass(frozen=True)
class GenSpec:
    seed: int = 0
    p: float = 2.0
    d: int = 3
    e: int = 2
    N: int = 4
    kind: str = "generic"
    rX: float = 2.0
    rY: float = 2.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if min(self.d, self.e, self.N) < 1:
            raise ValueError("dimensions and N must be >= 1")
        if not 1 <= self.p < math.inf:
            raise ValueError("p must lie in [1, inf)")

    def key(self):
        text = f"{self.kind}|{self.p!r}|{self.d}|{self.e}|{self.N}|{self.rX!r}|{self.rY!r}"
        return [self.seed & 0xFFFFFFFFFFFFFFFF, zlib.crc32(text.encode())]

    @property
    def X(self):
        return SpaceDesc(self.d, self.rX)

    @property
    def Y(self):
        return SpaceDesc(self.e, self.rY)


def rng_for(*key):
    """Counter-based generator for an integer key."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(k) & 0xFFFFFFFFFFFFFFFF for k in key])))


def _gauss(rng, *shape):
    return rng.standard_normal(shape) / math.sqrt(shape[-1])


def _frame_UV(rng, n, d):
    """Random ``U`` (n x d) and ``V`` (d x n) with ``VU`` well conditioned."""
    if n < d:
        raise GenerationError(f"block space of dimension {n} cannot carry a frame for dimension {d}")
    for _ in range(BUDGET):
        U = _gauss(rng, n, d)
        V = _gauss(rng, d, n)
        if smallest_pivot(V @ U) >= MIN_PIVOT:
            return U, V
    raise GenerationError("resample budget exhausted")


def _build(spec, U, V, d=None):
    X = SpaceDesc(d or spec.d, spec.rX)
    return from_UV(U, V, spec.p, spec.Y, X)


def generic(spec, rng):
    U, V = _frame_UV(rng, spec.N * spec.e, spec.d)
    return _build(spec, U, V)


def parseval(spec, rng):
    f = generic(spec, rng)
    return f.replace(Psi=invert(frame_operator(f)) @ f.Psi)


def riesz(spec, rng):
    """Square case ``d = N e``: invertible ``U``, ``V`` give ``P = I``."""
    n = spec.N * spec.e
    U, V = _frame_UV(rng, n, n)
    for _ in range(BUDGET):
        if smallest_pivot(U) >= MIN_PIVOT and smallest_pivot(V) >= MIN_PIVOT:
            break
        U, V = _frame_UV(rng, n, n)
    else:
        raise GenerationError("resample budget exhausted")
    return _build(spec, U, V, n)


def bessel_only(spec, rng):
    """``U`` loses a column direction, so ``VU`` is singular."""
    n = spec.N * spec.e
    U = _gauss(rng, n, spec.d)
    U[:, -1] = 0.0
    Q = np.linalg.qr(rng.standard_normal((spec.d, spec.d)))[0]
    return _build(spec, U @ Q.T, _gauss(rng, spec.d, n))


def orthogonal_pair(spec, rng):
    """Frames supported on complementary halves of the blocks."""
    N1 = spec.N // 2
    if N1 < 1:
        raise GenerationError("orthogonal pairs need N >= 2")
    e, d = spec.e, spec.d
    U1, V1 = _frame_UV(rng, N1 * e, d)
    U2, V2 = _frame_UV(rng, (spec.N - N1) * e, d)
    n = spec.N * e
    Uf, Vf = np.zeros((n, d)), np.zeros((d, n))
    Ug, Vg = np.zeros((n, d)), np.zeros((d, n))
    Uf[: N1 * e], Vf[:, : N1 * e] = U1, V1
    Ug[N1 * e :], Vg[:, N1 * e :] = U2, V2
    return _build(spec, Uf, Vf), _build(spec, Ug, Vg)


def _near_identity(rng, d, X, radius):
    """``I - c M`` with ``||c M||`` certified at most ``radius`` in X."""
    M = rng.standard_normal((d, d))
    c = radius / operator_norm(M, X, X).upper
    return np.eye(d) - c * M


def approx_dual_pair(spec, rng):
    """``f`` and a canonical dual distorted by factors within 0.5 of ``I``."""
    f = generic(spec, rng)
    g = canonical_dual(f)
    U = _near_identity(rng, spec.d, spec.X, rng.uniform(0.05, 0.5))
    V = _near_identity(rng, spec.d, spec.X, rng.uniform(0.05, 0.5))
    return f, g.replace(A=g.A @ U, Psi=V @ g.Psi)


def perturbation_family(spec, rng):
    """A frame and a direction ``(E_A, E_Psi)`` normalized in operator norm."""
    f = generic(spec, rng)
    EA = rng.standard_normal(f.A.shape)
    EP = rng.standard_normal(f.Psi.shape)
    direction = f.replace(A=EA, Psi=EP)
    nA = operator_norm(direction.theta_A, f.X, f.block_space).upper
    nP = operator_norm(direction.theta_Psi, f.block_space, f.X).upper
    return f, f.replace(A=EA / nA, Psi=EP / nP)


def positive(spec, rng):
    """``Psi_n = A_n^T`` in the Euclidean setting, so ``S`` is positive definite."""
    U, _ = _frame_UV(rng, spec.N * spec.e, spec.d)
    for _ in range(BUDGET):
        if smallest_pivot(U.T @ U) >= MIN_PIVOT:
            break
        U, _ = _frame_UV(rng, spec.N * spec.e, spec.d)
    else:
        raise GenerationError("resample budget exhausted")
    return from_UV(U, U.T.copy(), 2.0, SpaceDesc(spec.e), SpaceDesc(spec.d))


_DISPATCH = {
    "generic": generic,
    "parseval": parseval,
    "riesz": riesz,
    "bessel_only": bessel_only,
    "orthogonal_pair": orthogonal_pair,
    "approx_dual_pair": approx_dual_pair,
    "perturbation_family": perturbation_family,
    "positive": positive,
}


def generate(spec: GenSpec):
    """A FramePair, or a pair of them for the two-frame kinds."""
    return _DISPATCH[spec.kind](spec, rng_for(*spec.key()))

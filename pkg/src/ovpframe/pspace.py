"""Finite-dimensional p-normed spaces and the block space l^p(N) (x) Y.

The block space is modelled as the p-direct sum of N copies of Y: a block
vector ``z = (z_1, ..., z_N)`` has norm ``(sum_n ||z_n||_Y^p)^(1/p)``.
Operators are dense matrices; induced norms between these spaces are
returned as certified intervals (:class:`NormEstimate`).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.linalg

from . import _core
from .config import resolve
from .errors import DimensionMismatch, IndexOutOfRange, SingularOperator

inf = math.inf


def _check_exp(r, name="norm_exp"):
    r = float(r)
    if not (r >= 1.0):
        raise ValueError(f"{name} must lie in [1, inf], got {r}")
    return r


@dataclass(frozen=True)
class SpaceDesc:
    """R^dim (or C^dim) with the l^norm_exp norm."""

    dim: int
    norm_exp: float = 2.0
    scalar_field: str = "real"

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "norm_exp", _check_exp(self.norm_exp))
        if self.scalar_field not in ("real", "complex"):
            raise ValueError("scalar_field must be 'real' or 'complex'")

    @property
    def norm_spec(self):
        return (1, self.dim, self.norm_exp, self.norm_exp)

    def norm(self, v):
        return p_norm(v, self.norm_exp)


@dataclass(frozen=True)
class BlockSpace:
    """The p-direct sum of ``N`` copies of ``factor``."""

    p: float
    N: int
    factor: SpaceDesc

    def __post_init__(self):
        p = float(self.p)
        if not (1.0 <= p < inf):
            raise ValueError(f"sequence exponent p must lie in [1, inf), got {self.p}")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "N", int(self.N))

    @property
    def dim(self):
        return self.N * self.factor.dim

    @property
    def norm_spec(self):
        return (self.N, self.factor.dim, self.p, self.factor.norm_exp)

    def norm(self, z):
        z = z.flat if isinstance(z, BlockVector) else np.asarray(z)
        return float(_core._power_py.column_norms(z.reshape(-1, 1), *self.norm_spec)[0])

    def zeros(self):
        return BlockVector(np.zeros((self.N, self.factor.dim)), self)

    def from_flat(self, z):
        z = np.asarray(z)
        if z.shape != (self.dim,):
            raise DimensionMismatch(f"expected a flat vector of length {self.dim}, got {z.shape}")
        return BlockVector(z.reshape(self.N, self.factor.dim), self)


@dataclass(frozen=True)
class BlockVector:
    blocks: np.ndarray
    space: BlockSpace

    def __post_init__(self):
        b = np.asarray(self.blocks)
        if b.ndim != 2 or b.shape != (self.space.N, self.space.factor.dim):
            raise DimensionMismatch(
                f"block vector needs shape {(self.space.N, self.space.factor.dim)}, got {b.shape}"
            )
        object.__setattr__(self, "blocks", b)

    @property
    def flat(self):
        return self.blocks.reshape(-1)

    def norm(self):
        return self.space.norm(self.flat)

    def __add__(self, other):
        if other.space != self.space:
            raise DimensionMismatch("block vectors live in different spaces")
        return BlockVector(self.blocks + other.blocks, self.space)

    def __len__(self):
        return self.space.N


@dataclass(frozen=True)
class Operator:
    """A dense matrix from ``domain`` to ``codomain``."""

    entries: np.ndarray
    domain: Union[SpaceDesc, BlockSpace]
    codomain: Union[SpaceDesc, BlockSpace]

    def __post_init__(self):
        M = np.asarray(self.entries)
        if M.shape != (self.codomain.dim, self.domain.dim):
            raise DimensionMismatch(
                f"entries have shape {M.shape}, expected {(self.codomain.dim, self.domain.dim)}"
            )
        object.__setattr__(self, "entries", M)

    @property
    def shape(self):
        return self.entries.shape

    def __matmul__(self, other):
        if isinstance(other, Operator):
            if other.codomain.dim != self.domain.dim:
                raise DimensionMismatch("operator shapes do not compose")
            return Operator(self.entries @ other.entries, other.domain, self.codomain)
        return self.entries @ np.asarray(other)

    def norm(self, cfg=None):
        return operator_norm(self, cfg=cfg)


@dataclass(frozen=True)
class NormEstimate:
    """Certified interval ``lower <= ||T|| <= upper``.

    ``stable`` is False when the lower bound search ran out of budget before
    stabilizing; the interval is still valid, only possibly wide.
    """

    lower: float
    upper: float
    exact: bool = False
    stable: bool = True

    def __post_init__(self):
        if self.lower < 0 or self.upper < self.lower:
            raise ValueError(f"invalid interval [{self.lower}, {self.upper}]")
        if self.exact and self.lower != self.upper:
            raise ValueError("exact estimates need lower == upper")

    @classmethod
    def of(cls, value):
        value = float(value)
        return cls(value, value, True)

    @property
    def mid(self):
        return 0.5 * (self.lower + self.upper)

    def scale(self, c):
        c = abs(float(c))
        return NormEstimate(self.lower * c, self.upper * c, self.exact, self.stable)

    def reciprocal(self):
        """Interval for ``1/t`` (``1/0`` maps to inf)."""
        lo = 1.0 / self.upper if self.upper > 0 else inf
        hi = 1.0 / self.lower if self.lower > 0 else inf
        return NormEstimate(lo, hi, self.exact and lo == hi, self.stable)

    def contains(self, value, rtol=0.0):
        slack = rtol * max(abs(value), self.upper)
        return self.lower - slack <= value <= self.upper + slack

    def as_dict(self):
        return {"lower": self.lower, "upper": self.upper, "exact": self.exact, "stable": self.stable}


# --- vector norms and the block calculus -----------------------------------


def p_norm(v, r):
    """(sum |v_i|^r)^(1/r), or max |v_i| for r = inf."""
    r = _check_exp(r, "r")
    v = np.abs(np.asarray(v)).reshape(-1)
    if v.size == 0:
        return 0.0
    if r == inf:
        return float(v.max())
    if r == 1.0:
        return float(v.sum())
    m = v.max()
    if m == 0:
        return 0.0
    return float(m * np.sum((v / m) ** r) ** (1.0 / r))


def _check_index(n, N):
    if not (1 <= n <= N):
        raise IndexOutOfRange(f"index {n} outside 1..{N}")


def embed_L(n: int, y, space: BlockSpace) -> BlockVector:
    """L_n: place ``y`` in block ``n`` (1-based), zeros elsewhere."""
    _check_index(n, space.N)
    y = np.asarray(y)
    if y.shape != (space.factor.dim,):
        raise DimensionMismatch(f"factor vector must have length {space.factor.dim}")
    blocks = np.zeros((space.N, space.factor.dim), dtype=np.result_type(y, float))
    blocks[n - 1] = y
    return BlockVector(blocks, space)


def project_Gamma(n: int, z: BlockVector):
    """Gamma_n: read off block ``n`` (1-based)."""
    _check_index(n, z.space.N)
    return z.blocks[n - 1].copy()


def embed_matrix(n, space):
    """Matrix of L_n, shape ``(N*e, e)``."""
    _check_index(n, space.N)
    e = space.factor.dim
    M = np.zeros((space.dim, e))
    M[(n - 1) * e : n * e] = np.eye(e)
    return M


def project_matrix(n, space):
    """Matrix of Gamma_n, shape ``(e, N*e)``."""
    return embed_matrix(n, space).T


# --- norm geometry ------------------------------------------------------------


def _canonical(spec):
    nb, bs, outer, inner = spec
    nb, bs = int(nb), int(bs)
    if nb == 1:
        outer = inner
    if bs == 1:
        inner = outer
    if outer == inner:
        return (1, nb * bs, float(inner), float(inner))
    return (nb, bs, float(outer), float(inner))


def norm_spec(space, dim=None):
    """Normalize a float exponent, SpaceDesc or BlockSpace to a norm spec."""
    if isinstance(space, (SpaceDesc, BlockSpace)):
        spec = space.norm_spec
    elif isinstance(space, tuple):
        spec = space
    else:
        if dim is None:
            raise ValueError("a bare exponent needs the dimension")
        r = _check_exp(space, "exponent")
        spec = (1, dim, r, r)
    spec = _canonical(spec)
    if dim is not None and spec[0] * spec[1] != dim:
        raise DimensionMismatch(f"norm on dimension {spec[0] * spec[1]} applied to dimension {dim}")
    return spec


def _dual_spec(spec):
    nb, bs, outer, inner = spec
    return (nb, bs, _core._power_py.conjugate(outer), _core._power_py.conjugate(inner))


def _inv(r):
    return 0.0 if r == inf else 1.0 / r


def _up(spec, q):
    """sup ||v||_spec / ||v||_q over v != 0 (q a plain exponent)."""
    nb, bs, outer, inner = spec
    return nb ** max(0.0, _inv(outer) - _inv(q)) * bs ** max(0.0, _inv(inner) - _inv(q))


def _down(q, spec):
    """sup ||v||_q / ||v||_spec over v != 0."""
    nb, bs, outer, inner = spec
    return nb ** max(0.0, _inv(q) - _inv(outer)) * bs ** max(0.0, _inv(q) - _inv(inner))


def _col_norms(M, spec):
    return _core._power_py.column_norms(M, *spec)


def _plain(spec, r):
    return spec[0] == 1 and spec[2] == r


def _is_diagonal(M):
    return M.shape[0] == M.shape[1] and np.count_nonzero(M - np.diag(np.diag(M))) == 0


def operator_norm(T, dom=None, cod=None, cfg=None) -> NormEstimate:
    """Certified interval for the induced norm of ``T`` from ``dom`` to ``cod``.

    ``dom`` and ``cod`` may be exponents, :class:`SpaceDesc` or
    :class:`BlockSpace`; they default to the spaces of an :class:`Operator`
    and ``cod`` defaults to ``dom``.  Exact values are returned for l^1
    domains, l^inf codomains, the l^2 -> l^2 case and diagonal matrices
    between equal lattice norms.  Otherwise the lower bound is the best gain
    found by multi-start power iteration and the upper bound the smallest of
    several norm-conversion bounds and the Schur test.
    """
    cfg = resolve(cfg)
    if isinstance(T, Operator):
        dom = T.domain if dom is None else dom
        cod = T.codomain if cod is None else cod
        M = T.entries
    else:
        M = np.asarray(T)
        dom = 2.0 if dom is None else dom
    if cod is None:
        cod = dom
    if M.ndim != 2:
        raise DimensionMismatch("operator_norm expects a matrix")
    m, n = M.shape
    ds = norm_spec(dom, n)
    cs = norm_spec(cod, m)
    if M.size == 0 or not np.any(M):
        return NormEstimate.of(0.0)

    if _plain(ds, 1.0):
        return NormEstimate.of(float(_col_norms(M, cs).max()))
    if _plain(cs, inf):
        return NormEstimate.of(float(_col_norms(M.T, _dual_spec(ds)).max()))
    if _plain(ds, 2.0) and _plain(cs, 2.0):
        return NormEstimate.of(float(np.linalg.norm(M, 2)))
    if ds == cs and _is_diagonal(M):
        return NormEstimate.of(float(np.abs(np.diag(M)).max()))

    col_max = float(_col_norms(M, cs).max())
    row_max = float(_col_norms(M.T, _dual_spec(ds)).max())
    sigma = float(np.linalg.norm(M, 2))
    bounds = [
        _down(1.0, ds) * col_max,
        row_max * _up(cs, inf),
        _down(2.0, ds) * sigma * _up(cs, 2.0),
    ]
    r = ds[2]
    if _plain(ds, r) and _plain(cs, r):
        n1 = float(np.abs(M).sum(axis=0).max())
        ninf = float(np.abs(M).sum(axis=1).max())
        # Schur test on |T|: Hoelder applied row by row, no interpolation
        # constant, so it holds for real and complex scalars alike
        bounds.append(n1 ** _inv(r) * ninf ** (1.0 - _inv(r)))
    upper = min(bounds)

    lower, _, stable = _power_lower(M, ds, cs, cfg)
    if lower > upper:
        upper = lower
    return NormEstimate(lower, upper, False, stable)


def _starts(M, k, rng):
    # unit vectors, the top right singular vector, row sign patterns, then
    # gaussian restarts up to k columns
    m, n = M.shape
    cols = [np.eye(n)]
    _, _, vh = np.linalg.svd(M)
    cols.append(np.conj(vh[:1]).T)
    cols.append(np.sign(np.real(M.T[:, : max(1, k // 4)])))
    S = np.concatenate(cols, axis=1)
    if S.shape[1] < k:
        S = np.concatenate([S, rng.standard_normal((n, k - S.shape[1]))], axis=1)
    return S.astype(np.result_type(M, float))


def _power_lower(M, ds, cs, cfg):
    rng = np.random.default_rng(cfg.seed)
    starts = _starts(M, cfg.restarts, rng)
    half = max(1, starts.shape[1] // 2)
    g1, x1, c1 = _core.power_gain(M, starts[:, :half], ds, cs, cfg.steps, cfg.power_rtol)
    if starts.shape[1] > half:
        g2, x2, c2 = _core.power_gain(M, starts[:, half:], ds, cs, cfg.steps, cfg.power_rtol)
    else:
        g2, x2, c2 = g1, x1, c1
    best, x = (g1, x1) if g1 >= g2 else (g2, x2)
    # the second half of the restarts must not beat the first by more than
    # the power-iteration tolerance, or the search is declared unstable
    stable = bool(c1 and c2 and g2 <= g1 * (1 + 1e-6))
    # recompute the certified gain from the returned vector itself
    nx = float(_col_norms(x.reshape(-1, 1), ds)[0])
    if nx > 0:
        best = float(_col_norms((M @ x).reshape(-1, 1), cs)[0]) / nx
    return best, x, stable


# --- inversion and ranks ------------------------------------------------------


def max_abs(M):
    M = np.asarray(M)
    return float(np.abs(M).max()) if M.size else 0.0


def smallest_pivot(T):
    """Smallest |U_ii| of the partial-pivoting LU factorization of ``T``."""
    M = np.asarray(T.entries if isinstance(T, Operator) else T)
    if M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"square matrix required, got {M.shape}")
    if M.size == 0:
        return inf
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lu, _ = scipy.linalg.lu_factor(M, check_finite=True)
    return float(np.abs(np.diag(lu)).min())


def is_invertible(T, cfg=None):
    cfg = resolve(cfg)
    M = np.asarray(T.entries if isinstance(T, Operator) else T)
    scale = max_abs(M)
    return scale > 0 and smallest_pivot(M) > cfg.singular_tol * scale


def invert(T, tol=None, cfg=None):
    """Inverse via partial-pivoting LU, with a two-sided residual check.

    Raises :class:`SingularOperator` if the smallest pivot is below
    ``singular_tol * max|T|`` or a residual exceeds ``tol``.
    """
    cfg = resolve(cfg)
    tol = cfg.residual_tol if tol is None else tol
    wrap = isinstance(T, Operator)
    M = np.asarray(T.entries if wrap else T)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"square matrix required, got {M.shape}")
    n = M.shape[0]
    if n == 0:
        return T
    scale = max_abs(M)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lu, piv = scipy.linalg.lu_factor(M, check_finite=True)
    pivot = float(np.abs(np.diag(lu)).min())
    if scale == 0 or pivot <= cfg.singular_tol * scale:
        raise SingularOperator(f"matrix is singular (smallest pivot {pivot:.3e})", pivot)
    I = np.eye(n, dtype=M.dtype)
    Minv = scipy.linalg.lu_solve((lu, piv), I)
    res = max(max_abs(M @ Minv - I), max_abs(Minv @ M - I))
    if not np.isfinite(res) or res > tol:
        raise SingularOperator(
            f"inverse residual {res:.3e} exceeds {tol:.1e} (smallest pivot {pivot:.3e})", pivot, res
        )
    if wrap:
        return Operator(Minv, T.codomain, T.domain)
    return Minv


def numerical_rank(M, tol=1e-10, scale=None):
    """Rank from column-pivoted QR: pivots above ``tol * |R_00|``, or above
    ``tol * scale`` when an absolute scale is given."""
    M = np.asarray(M)
    if M.size == 0:
        return 0
    R = scipy.linalg.qr(M, mode="r", pivoting=True)[0]
    d = np.abs(np.diag(R))
    if d.size == 0 or d[0] == 0:
        return 0
    return int(np.count_nonzero(d > tol * (d[0] if scale is None else scale)))


def range_basis(M, tol=1e-10, scale=None):
    """Orthonormal basis for the column space of ``M`` (column-pivoted QR)."""
    M = np.asarray(M)
    k = numerical_rank(M, tol, scale)
    if k == 0:
        return np.zeros((M.shape[0], 0), dtype=M.dtype)
    Q = scipy.linalg.qr(M, mode="economic", pivoting=True)[0]
    return Q[:, :k]

"""Operator-valued p-approximate Schauder frames.

A :class:`FramePair` holds ``N`` operators ``A_n : X -> Y`` and ``N``
operators ``Psi_n : Y -> X``.  Everything here is phrased through the stacked
analysis matrix ``theta_A`` (block rows ``A_n``) and the concatenated
synthesis matrix ``theta_Psi`` (block columns ``Psi_n``), so that the frame
operator is ``S = theta_Psi @ theta_A``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .config import resolve
from .errors import (
    BasisMismatch,
    DimensionMismatch,
    FactorizationMismatch,
    GuaranteeUnavailable,
    GuaranteeViolated,
    NotAProjection,
    SingularOperator,
)
from .pspace import (
    BlockSpace,
    BlockVector,
    NormEstimate,
    SpaceDesc,
    invert,
    max_abs,
    numerical_rank,
    operator_norm,
    range_basis,
    smallest_pivot,
)


@dataclass(frozen=True, eq=False)
class FramePair:
    """The pair ``({A_n}, {Psi_n})`` with sequence exponent ``p``.

    ``A`` has shape ``(N, e, d)`` and ``Psi`` shape ``(N, d, e)`` where
    ``d = dim X`` and ``e = dim Y``.  ``X`` and ``Y`` default to Euclidean
    spaces of the right dimension.
    """

    A: np.ndarray
    Psi: np.ndarray
    p: float = 2.0
    X: SpaceDesc = None
    Y: SpaceDesc = None

    def __post_init__(self):
        A = np.asarray(self.A)
        Psi = np.asarray(self.Psi)
        if A.dtype.kind not in "fc":
            A = A.astype(float)
        if Psi.dtype.kind not in "fc":
            Psi = Psi.astype(float)
        if A.ndim != 3 or Psi.ndim != 3:
            raise DimensionMismatch("A and Psi must be stacks of matrices (3-d arrays)")
        N, e, d = A.shape
        if N < 1:
            raise DimensionMismatch("a frame needs at least one index")
        if Psi.shape != (N, d, e):
            raise DimensionMismatch(f"Psi has shape {Psi.shape}, expected {(N, d, e)}")
        X = self.X if self.X is not None else SpaceDesc(d)
        Y = self.Y if self.Y is not None else SpaceDesc(e)
        if X.dim != d or Y.dim != e:
            raise DimensionMismatch(f"spaces ({X.dim}, {Y.dim}) do not match operators ({d}, {e})")
        A.setflags(write=False)
        Psi.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "Psi", Psi)
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        # validates p
        object.__setattr__(self, "_block", BlockSpace(self.p, N, Y))

    @property
    def N(self):
        return self.A.shape[0]

    @property
    def d(self):
        return self.X.dim

    @property
    def e(self):
        return self.Y.dim

    @property
    def block_space(self) -> BlockSpace:
        return self._block

    @property
    def theta_A(self):
        """Analysis matrix, shape ``(N*e, d)``."""
        return self.A.reshape(self.N * self.e, self.d)

    @property
    def theta_Psi(self):
        """Synthesis matrix, shape ``(d, N*e)``."""
        return self.Psi.transpose(1, 0, 2).reshape(self.d, self.N * self.e)

    def replace(self, A=None, Psi=None, X=None, Y=None, p=None):
        return FramePair(
            self.A if A is None else A,
            self.Psi if Psi is None else Psi,
            self.p if p is None else p,
            self.X if X is None else X,
            self.Y if Y is None else Y,
        )

    def same_shape(self, other):
        return (
            self.N == other.N
            and self.d == other.d
            and self.e == other.e
            and self.p == other.p
            and self.X == other.X
            and self.Y == other.Y
        )

    def allclose(self, other, atol=1e-10):
        return (
            self.A.shape == other.A.shape
            and max_abs(self.A - other.A) <= atol
            and max_abs(self.Psi - other.Psi) <= atol
        )

    def __repr__(self):
        return f"FramePair(N={self.N}, d={self.d}, e={self.e}, p={self.p}, rX={self.X.norm_exp}, rY={self.Y.norm_exp})"


def require_same_shape(f, g):
    if not f.same_shape(g):
        raise DimensionMismatch(f"frames differ in shape: {f!r} vs {g!r}")


def stack_analysis(theta, N, e):
    """Split an ``(N*e, d)`` matrix into its ``N`` block rows."""
    return np.asarray(theta).reshape(N, e, -1)


def stack_synthesis(theta, N, e):
    """Split a ``(d, N*e)`` matrix into its ``N`` block columns."""
    theta = np.asarray(theta)
    return theta.reshape(theta.shape[0], N, e).transpose(1, 0, 2)


# --- the three operators --------------------------------------------------------


def analysis(f: FramePair, x) -> BlockVector:
    x = np.asarray(x)
    if x.shape != (f.d,):
        raise DimensionMismatch(f"x must have length {f.d}, got {x.shape}")
    return BlockVector(np.einsum("ned,d->ne", f.A, x), f.block_space)


def synthesis(f: FramePair, z):
    if isinstance(z, BlockVector):
        if z.space != f.block_space:
            raise DimensionMismatch("block vector lives in a different block space")
        blocks = z.blocks
    else:
        blocks = np.asarray(z)
        if blocks.shape == (f.N * f.e,):
            blocks = blocks.reshape(f.N, f.e)
        if blocks.shape != (f.N, f.e):
            raise DimensionMismatch(f"z must have {f.N} blocks of length {f.e}")
    return np.einsum("nde,ne->d", f.Psi, blocks)


def frame_operator(f: FramePair):
    """``S = sum_n Psi_n A_n`` as a ``d x d`` matrix."""
    return np.einsum("nde,nef->df", f.Psi, f.A)


def mixed_frame_operator(synth: FramePair, anal: FramePair):
    """``theta_{synth.Psi} theta_{anal.A} = sum_n synth.Psi_n anal.A_n``."""
    require_same_shape(synth, anal)
    return np.einsum("nde,nef->df", synth.Psi, anal.A)


def frame_operator_inverse(f, cfg=None):
    return invert(frame_operator(f), cfg=cfg)


# --- bounds and classification --------------------------------------------------


@dataclass(frozen=True)
class FrameBounds:
    a: NormEstimate
    b: NormEstimate
    c: NormEstimate
    d: NormEstimate

    def as_dict(self):
        return {k: getattr(self, k).as_dict() for k in "abcd"}


def frame_bounds(f: FramePair, cfg=None) -> FrameBounds:
    """Optimal frame bounds ``a = 1/||S^-1||``, ``b = ||S||`` plus the
    analysis bound ``c = ||theta_A||`` and synthesis bound ``d = ||theta_Psi||``,
    each as a certified interval."""
    cfg = resolve(cfg)
    S = frame_operator(f)
    b = operator_norm(S, f.X, f.X, cfg)
    try:
        a = operator_norm(invert(S, cfg=cfg), f.X, f.X, cfg).reciprocal()
    except SingularOperator:
        a = NormEstimate.of(0.0)
    c = operator_norm(f.theta_A, f.X, f.block_space, cfg)
    d = operator_norm(f.theta_Psi, f.block_space, f.X, cfg)
    return FrameBounds(a, b, c, d)


class FrameKind(enum.Enum):
    NOT_BESSEL = "NotBessel"
    BESSEL = "Bessel"
    FRAME = "Frame"
    PARSEVAL = "ParsevalFrame"
    RIESZ = "RieszBasis"


@dataclass(frozen=True)
class FrameClass:
    """Every class a pair belongs to, with the values used to decide.

    ``NOT_BESSEL`` never occurs: with finitely many bounded operators every
    pair is Bessel.
    """

    kinds: frozenset
    smallest_pivot: float
    parseval_residual: float
    riesz_residual: float

    def __contains__(self, kind):
        return kind in self.kinds

    @property
    def strongest(self):
        for k in (FrameKind.RIESZ, FrameKind.PARSEVAL, FrameKind.FRAME, FrameKind.BESSEL):
            if k in self.kinds:
                return k
        return FrameKind.NOT_BESSEL

    def as_dict(self):
        order = [k for k in FrameKind if k in self.kinds]
        return {
            "kinds": [k.value for k in order],
            "smallest_pivot": self.smallest_pivot,
            "parseval_residual": self.parseval_residual,
            "riesz_residual": self.riesz_residual,
        }


def classify(f: FramePair, tol=None, cfg=None) -> FrameClass:
    cfg = resolve(cfg)
    tol = cfg.tol if tol is None else tol
    S = frame_operator(f)
    kinds = {FrameKind.BESSEL}
    nan = float("nan")
    parseval_res = max_abs(S - np.eye(f.d))
    pivot = smallest_pivot(S)
    riesz_res = nan
    try:
        Sinv = invert(S, cfg=cfg)
    except SingularOperator:
        return FrameClass(frozenset(kinds), pivot, parseval_res, riesz_res)
    kinds.add(FrameKind.FRAME)
    if parseval_res <= tol:
        kinds.add(FrameKind.PARSEVAL)
    P = f.theta_A @ Sinv @ f.theta_Psi
    riesz_res = max_abs(P - np.eye(P.shape[0]))
    if riesz_res <= tol:
        kinds.add(FrameKind.RIESZ)
    return FrameClass(frozenset(kinds), pivot, parseval_res, riesz_res)


def is_frame(f, cfg=None):
    return FrameKind.FRAME in classify(f, cfg=cfg)


def projection_P(f: FramePair, cfg=None):
    """``P = theta_A S^-1 theta_Psi``, an idempotent onto the range of theta_A."""
    return f.theta_A @ invert(frame_operator(f), cfg=cfg) @ f.theta_Psi


def canonical_dual(f: FramePair, cfg=None) -> FramePair:
    Sinv = invert(frame_operator(f), cfg=cfg)
    return f.replace(A=f.A @ Sinv, Psi=Sinv @ f.Psi)


# --- U/V characterization ---------------------------------------------------------


def from_UV(U, V, p=2.0, Y=None, X=None) -> FramePair:
    """Frame with ``A_n = Gamma_n U`` and ``Psi_n = V L_n``.

    ``U`` maps X into the block space (shape ``(N*e, d)``) and ``V`` maps the
    block space back (shape ``(d, N*e)``).  ``Y`` fixes the factor space and
    hence ``N = rows(U) / dim Y``; it defaults to one-dimensional blocks.
    """
    U = np.asarray(U)
    V = np.asarray(V)
    if U.ndim != 2 or V.ndim != 2 or U.shape != V.T.shape:
        raise DimensionMismatch(f"U {U.shape} and V {V.shape} are not of transposed shapes")
    if Y is None:
        Y = SpaceDesc(1)
    elif not isinstance(Y, SpaceDesc):
        Y = SpaceDesc(int(Y))
    e = Y.dim
    if U.shape[0] % e:
        raise DimensionMismatch(f"{U.shape[0]} block-space rows do not split into blocks of {e}")
    N = U.shape[0] // e
    X = X if X is not None else SpaceDesc(U.shape[1])
    return FramePair(stack_analysis(U, N, e), stack_synthesis(V, N, e), p, X, Y)


def to_UV(f: FramePair):
    return f.theta_A.copy(), f.theta_Psi.copy()


def riesz_residual_UV(U, V, cfg=None):
    """``||U (VU)^-1 V - I||_max``; zero exactly for Riesz bases."""
    M = U @ invert(V @ U, cfg=cfg) @ V
    return max_abs(M - np.eye(M.shape[0]))


# --- subspaces, completion ------------------------------------------------------


def projection_basis(P, tol=1e-10):
    """Orthonormal column basis for the range of a projection ``P``."""
    return range_basis(P, tol)


def restrict(f: FramePair, P, basisZ, tol=None, cfg=None) -> FramePair:
    """Compress ``f`` to ``Z = range(P)`` in the coordinates of ``basisZ``.

    Returns ``({A_n E}, {E^+ P Psi_n})`` where ``E`` is the injection given by
    ``basisZ`` and ``E^+`` its least-squares left inverse.  The coordinates of
    Z carry the l^r norm of X.
    """
    cfg = resolve(cfg)
    tol = cfg.tol if tol is None else tol
    P = np.asarray(P)
    E = np.asarray(basisZ)
    if P.shape != (f.d, f.d):
        raise DimensionMismatch(f"P must be {f.d} x {f.d}")
    scale = max(1.0, max_abs(P))
    if max_abs(P @ P - P) > tol * scale:
        raise NotAProjection(f"||P^2 - P||_max = {max_abs(P @ P - P):.3e}")
    if E.ndim != 2 or E.shape[0] != f.d or E.shape[1] == 0:
        raise BasisMismatch("basisZ must be a d x k matrix with k >= 1")
    k = E.shape[1]
    if numerical_rank(E) != k or numerical_rank(P) != k:
        raise BasisMismatch(f"basis of rank {numerical_rank(E)} for a range of rank {numerical_rank(P)}")
    if max_abs(P @ E - E) > tol * max(1.0, max_abs(E)) * scale:
        raise BasisMismatch("basis columns are not in the range of P")
    Eplus = np.linalg.pinv(E)
    Z = SpaceDesc(k, f.X.norm_exp, f.X.scalar_field)
    return FramePair(f.A @ E, Eplus @ P @ f.Psi, f.p, Z, f.Y)


def complete_to_parseval(f: FramePair, B, Phi, tol=None, cfg=None) -> FramePair:
    """Append ``(B, Phi)`` with ``Phi B = I - S`` to obtain a Parseval pair."""
    cfg = resolve(cfg)
    tol = cfg.tol if tol is None else tol
    B = np.asarray(B)
    Phi = np.asarray(Phi)
    if B.shape != (f.e, f.d) or Phi.shape != (f.d, f.e):
        raise DimensionMismatch(f"B must be {f.e}x{f.d} and Phi {f.d}x{f.e}")
    gap = max_abs(np.eye(f.d) - frame_operator(f) - Phi @ B)
    if gap > tol:
        raise FactorizationMismatch(f"||(I - S) - Phi B||_max = {gap:.3e} exceeds {tol:.1e}")
    return f.replace(A=np.concatenate([f.A, B[None]]), Psi=np.concatenate([f.Psi, Phi[None]]))


# --- reconstruction -------------------------------------------------------------


@dataclass
class Reconstruction:
    approximants: list
    errors: list
    ratio: float
    guaranteed: bool
    step_norm: NormEstimate
    bounds: FrameBounds = field(repr=False, default=None)


def iterative_reconstruct(f: FramePair, x, n_iters: int, cfg=None, require_guarantee=False):
    """Run ``x_n = x_{n-1} + 2/(a+b) S (x - x_{n-1})`` from ``x_0 = 0``.

    The error bound ``||x_n - x|| <= ((b-a)/(b+a))^n ||x||`` is asserted only
    when ``||I - 2/(a+b) S|| <= (b-a)/(b+a)`` can be certified; otherwise the
    iteration still runs and ``guaranteed`` is False (or
    :class:`GuaranteeUnavailable` is raised if ``require_guarantee``).
    ``errors[k]`` holds ``||x_{k+1} - x|| / ||x||``.
    """
    cfg = resolve(cfg)
    x = np.asarray(x)
    bounds = frame_bounds(f, cfg)
    a, b = bounds.a.lower, bounds.b.upper
    if not a > 0:
        raise SingularOperator("frame operator is not invertible; lower bound is 0", 0.0)
    S = frame_operator(f)
    lam = 2.0 / (a + b)
    ratio = (b - a) / (b + a)
    step = operator_norm(np.eye(f.d) - lam * S, f.X, f.X, cfg)
    guaranteed = step.upper <= ratio * (1 + 1e-12) + 1e-15
    if require_guarantee and not guaranteed:
        raise GuaranteeUnavailable(
            f"cannot certify ||I - 2S/(a+b)|| <= {ratio:.6g} (upper bound {step.upper:.6g})"
        )
    nx = f.X.norm(x)
    xn = np.zeros_like(x, dtype=np.result_type(x, S))
    approximants, errors = [], []
    for k in range(1, n_iters + 1):
        xn = xn + lam * (S @ (x - xn))
        approximants.append(xn.copy())
        err = f.X.norm(xn - x)
        errors.append(err / nx if nx > 0 else err)
        if guaranteed and err > ratio**k * nx * (1 + 1e-9) + 1e-12 * nx + 1e-300:
            raise GuaranteeViolated(f"step {k}: error {err:.3e} above bound {ratio**k * nx:.3e}")
    return Reconstruction(approximants, errors, ratio, guaranteed, step, bounds)

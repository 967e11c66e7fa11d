"""Dual, orthogonal and approximately dual pairs, and frames built from them.

For pairs ``f = ({A_n}, {Psi_n})`` and ``g = ({B_n}, {Phi_n})`` the two mixed
frame operators are ``S_{A,Phi} = theta_Phi theta_A`` and
``S_{B,Psi} = theta_Psi theta_B``.  Duality asks both to be the identity,
orthogonality both to vanish, approximate duality both to be within
distance < 1 of the identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import resolve
from .errors import (
    DimensionMismatch,
    GuaranteeViolated,
    NotApproxDual,
    NotOrthogonal,
    PreconditionError,
)
from .frames import (
    FrameKind,
    FramePair,
    classify,
    frame_operator,
    mixed_frame_operator,
    require_same_shape,
    stack_analysis,
    stack_synthesis,
)
from .pspace import NormEstimate, SpaceDesc, invert, max_abs, operator_norm


def S_A_Phi(f: FramePair, g: FramePair):
    """``theta_Phi theta_A``: synthesis of ``g`` after analysis of ``f``."""
    return mixed_frame_operator(g, f)


def S_B_Psi(f: FramePair, g: FramePair):
    """``theta_Psi theta_B``: synthesis of ``f`` after analysis of ``g``."""
    return mixed_frame_operator(f, g)


@dataclass(frozen=True)
class DualCertificate:
    """Max-norm distances of both mixed frame operators from ``target``
    (the identity for duality, zero for orthogonality)."""

    residual_left: float
    residual_right: float
    verdict: bool
    target: str = "identity"

    def __bool__(self):
        return self.verdict

    def as_dict(self):
        return {
            "residual_left": self.residual_left,
            "residual_right": self.residual_right,
            "verdict": self.verdict,
            "target": self.target,
        }


def is_dual(f: FramePair, g: FramePair, tol=None, cfg=None) -> DualCertificate:
    cfg = resolve(cfg)
    tol = cfg.tol if tol is None else tol
    require_same_shape(f, g)
    I = np.eye(f.d)
    left = max_abs(S_A_Phi(f, g) - I)
    right = max_abs(S_B_Psi(f, g) - I)
    return DualCertificate(left, right, left <= tol and right <= tol)


def is_orthogonal(f: FramePair, g: FramePair, tol=None, cfg=None) -> DualCertificate:
    cfg = resolve(cfg)
    tol = cfg.tol if tol is None else tol
    require_same_shape(f, g)
    left = max_abs(S_A_Phi(f, g))
    right = max_abs(S_B_Psi(f, g))
    return DualCertificate(left, right, left <= tol and right <= tol, "zero")


# --- the parametrization of all duals -------------------------------------------


def _check_params(f, U=None, V=None):
    n = f.N * f.e
    if U is not None and np.shape(U) != (n, f.d):
        raise DimensionMismatch(f"U must be {n} x {f.d}, got {np.shape(U)}")
    if V is not None and np.shape(V) != (f.d, n):
        raise DimensionMismatch(f"V must be {f.d} x {n}, got {np.shape(V)}")


def right_inverse(f: FramePair, U, cfg=None):
    """``R = theta_A S^-1 + (I - theta_A S^-1 theta_Psi) U``; ``theta_Psi R = I``."""
    _check_params(f, U=U)
    tA = f.theta_A @ invert(frame_operator(f), cfg=cfg)
    return tA + U - tA @ (f.theta_Psi @ U)


def left_inverse(f: FramePair, V, cfg=None):
    """``L = S^-1 theta_Psi + V (I - theta_A S^-1 theta_Psi)``; ``L theta_A = I``."""
    _check_params(f, V=V)
    Sp = invert(frame_operator(f), cfg=cfg) @ f.theta_Psi
    return Sp + V - (V @ f.theta_A) @ Sp


right_inverses = right_inverse
left_inverses = left_inverse


def dual_from_params(f: FramePair, U, V, cfg=None) -> FramePair:
    """The dual with analysis matrix ``right_inverse(f, U)`` and synthesis
    matrix ``left_inverse(f, V)``.

    Raises :class:`SingularOperator` if ``S`` or the frame operator of the
    result, ``S^-1 + VU - V theta_A S^-1 theta_Psi U``, is singular.
    """
    cfg = resolve(cfg)
    U = np.asarray(U)
    V = np.asarray(V)
    _check_params(f, U, V)
    R = right_inverse(f, U, cfg)
    L = left_inverse(f, V, cfg)
    Sinv = invert(frame_operator(f), cfg=cfg)
    combined = Sinv + V @ U - V @ f.theta_A @ Sinv @ f.theta_Psi @ U
    invert(combined, cfg=cfg)
    return f.replace(A=stack_analysis(R, f.N, f.e), Psi=stack_synthesis(L, f.N, f.e))


# --- orthogonal constructions -------------------------------------------------------


def _require_orthogonal(f, g, cfg):
    cert = is_orthogonal(f, g, cfg=cfg)
    if not cert.verdict:
        raise NotOrthogonal(
            f"mixed frame operators have max entries {cert.residual_left:.3e}, {cert.residual_right:.3e}"
        )


def interpolate_orthogonal(f, g, C, D, E, F, tol=None, cfg=None) -> FramePair:
    """``({A_n C + B_n D}, {E Psi_n + F Phi_n})`` for orthogonal Parseval
    ``f`` and ``g`` with ``EC + FD = I``; the result is Parseval."""
    cfg = resolve(cfg)
    tol = cfg.tol if tol is None else tol
    require_same_shape(f, g)
    d = f.d
    C, D, E, F = (np.asarray(M) * np.eye(d) if np.ndim(M) == 0 else np.asarray(M) for M in (C, D, E, F))
    for name, M in zip("CDEF", (C, D, E, F)):
        if M.shape != (d, d):
            raise DimensionMismatch(f"{name} must be {d} x {d}")
    if FrameKind.PARSEVAL not in classify(f, tol, cfg):
        raise PreconditionError("parseval_f", "first pair is not Parseval")
    if FrameKind.PARSEVAL not in classify(g, tol, cfg):
        raise PreconditionError("parseval_g", "second pair is not Parseval")
    _require_orthogonal(f, g, cfg)
    gap = max_abs(E @ C + F @ D - np.eye(d))
    if gap > tol:
        raise PreconditionError("EC+FD=I", f"||EC + FD - I||_max = {gap:.3e}")
    return f.replace(A=f.A @ C + g.A @ D, Psi=E @ f.Psi + F @ g.Psi)


def direct_sum(f: FramePair, g: FramePair, cfg=None) -> FramePair:
    """Pair on ``X (+) X``: ``(x, x1) -> A_n x + B_n x1`` and
    ``y -> (Psi_n y, Phi_n y)``.  Its frame operator is ``S_f (+) S_g``."""
    require_same_shape(f, g)
    _require_orthogonal(f, g, resolve(cfg))
    X2 = SpaceDesc(2 * f.d, f.X.norm_exp, f.X.scalar_field)
    return FramePair(
        np.concatenate([f.A, g.A], axis=2),
        np.concatenate([f.Psi, g.Psi], axis=1),
        f.p,
        X2,
        f.Y,
    )


def common_dual(f: FramePair, g: FramePair, cfg=None) -> FramePair:
    """``C_n = A_n S_f^-1 + B_n S_g^-1``, ``Xi_n = S_f^-1 Psi_n + S_g^-1 Phi_n``:
    a Bessel pair dual to both of two orthogonal frames."""
    cfg = resolve(cfg)
    require_same_shape(f, g)
    _require_orthogonal(f, g, cfg)
    Sf = invert(frame_operator(f), cfg=cfg)
    Sg = invert(frame_operator(g), cfg=cfg)
    return f.replace(A=f.A @ Sf + g.A @ Sg, Psi=Sf @ f.Psi + Sg @ g.Psi)


def tensor_product(f: FramePair, g: FramePair) -> FramePair:
    """Index pairs ``(n, m)`` (n-major) with ``A_n (x) B_m`` and ``Psi_n (x) Phi_m``.

    Coordinates of ``X (x) X`` and ``Y (x) Y`` carry the entrywise l^r norm,
    a cross norm for l^r factors; both pairs must use the same exponents.
    """
    if f.p != g.p or f.X.norm_exp != g.X.norm_exp or f.Y.norm_exp != g.Y.norm_exp:
        raise DimensionMismatch("tensor factors must share p and the norm exponents")
    N, M = f.N, g.N
    A = np.einsum("nij,mkl->nmikjl", f.A, g.A).reshape(N * M, f.e * g.e, f.d * g.d)
    Psi = np.einsum("nij,mkl->nmikjl", f.Psi, g.Psi).reshape(N * M, f.d * g.d, f.e * g.e)
    X = SpaceDesc(f.d * g.d, f.X.norm_exp, f.X.scalar_field)
    Y = SpaceDesc(f.e * g.e, f.Y.norm_exp, f.Y.scalar_field)
    return FramePair(A, Psi, f.p, X, Y)


# --- approximate duality ----------------------------------------------------------


@dataclass(frozen=True)
class ApproxDualCertificate:
    """``gap_left`` bounds ``||I - theta_Phi theta_A||`` and ``gap_right``
    bounds ``||I - theta_Psi theta_B||``.  ``samples_ok`` records the spot
    check ``||x - S x|| < ||x||`` for both mixed operators."""

    gap_left: NormEstimate
    gap_right: NormEstimate
    verdict: bool
    samples_ok: bool = True

    def __bool__(self):
        return self.verdict

    def as_dict(self):
        return {
            "gap_left": self.gap_left.as_dict(),
            "gap_right": self.gap_right.as_dict(),
            "verdict": self.verdict,
            "samples_ok": self.samples_ok,
        }


def approx_gaps(f, g, cfg=None):
    cfg = resolve(cfg)
    I = np.eye(f.d)
    left = operator_norm(I - S_A_Phi(f, g), f.X, f.X, cfg)
    right = operator_norm(I - S_B_Psi(f, g), f.X, f.X, cfg)
    return left, right


def is_approx_dual(f: FramePair, g: FramePair, cfg=None, samples=200) -> ApproxDualCertificate:
    cfg = resolve(cfg)
    require_same_shape(f, g)
    left, right = approx_gaps(f, g, cfg)
    ok = True
    if samples:
        rng = np.random.default_rng(cfg.seed)
        xs = rng.standard_normal((f.d, samples))
        I = np.eye(f.d)
        for M in (I - S_A_Phi(f, g), I - S_B_Psi(f, g)):
            for x in xs.T:
                if f.X.norm(M @ x) >= f.X.norm(x):
                    ok = False
                    break
    return ApproxDualCertificate(left, right, left.upper < 1 and right.upper < 1, ok)


def exact_dual_from_approx(f: FramePair, g: FramePair, cfg=None):
    """Duals generated by an approximately dual pair.

    Returns ``(({B_n S_{B,Psi}^-1}, {S_{A,Phi}^-1 Phi_n}),
    ({A_n S_{A,Phi}^-1}, {S_{B,Psi}^-1 Psi_n}))``: a dual of ``f`` and a dual
    of ``g``.
    """
    cfg = resolve(cfg)
    require_same_shape(f, g)
    SAPhi = invert(S_A_Phi(f, g), cfg=cfg)
    SBPsi = invert(S_B_Psi(f, g), cfg=cfg)
    dual_of_f = g.replace(A=g.A @ SBPsi, Psi=SAPhi @ g.Psi)
    dual_of_g = f.replace(A=f.A @ SAPhi, Psi=SBPsi @ f.Psi)
    return dual_of_f, dual_of_g


def approx_dual_from_scaled(f: FramePair, g: FramePair, U, V, cfg=None) -> FramePair:
    """``({B_n U}, {V Phi_n})`` for a dual ``g`` of ``f`` and ``||I-U||, ||I-V|| < 1``.

    The result is approximately dual to ``f`` with gaps ``||I - V||`` (left)
    and ``||I - U||`` (right), and its associated dual is ``g``.
    """
    cfg = resolve(cfg)
    require_same_shape(f, g)
    U = np.asarray(U) * np.eye(f.d) if np.ndim(U) == 0 else np.asarray(U)
    V = np.asarray(V) * np.eye(f.d) if np.ndim(V) == 0 else np.asarray(V)
    if not is_dual(f, g, cfg=cfg).verdict:
        raise PreconditionError("dual", "g is not a dual of f")
    I = np.eye(f.d)
    for name, M in (("U", U), ("V", V)):
        est = operator_norm(I - M, f.X, f.X, cfg)
        if not est.upper < 1:
            raise PreconditionError(name, f"cannot certify ||I - {name}|| < 1 (upper bound {est.upper:.6g})")
    return g.replace(A=g.A @ U, Psi=V @ g.Psi)


@dataclass(frozen=True)
class NeumannDual:
    """Truncated Neumann dual after ``n_terms`` correction terms.

    ``bound_left = base_left.upper ** (n_terms + 1)`` and similarly on the
    right; ``gap_left``/``gap_right`` are the measured gaps of the result.
    """

    frame: FramePair
    n_terms: int
    base_left: NormEstimate
    base_right: NormEstimate
    gap_left: NormEstimate
    gap_right: NormEstimate

    @property
    def bound_left(self):
        return self.base_left.upper ** (self.n_terms + 1)

    @property
    def bound_right(self):
        return self.base_right.upper ** (self.n_terms + 1)


def _neumann_sums(M, n_terms):
    I = np.eye(M.shape[0], dtype=M.dtype)
    total, power = I.copy(), I.copy()
    sums = [total.copy()]
    for _ in range(n_terms):
        power = power @ M
        total = total + power
        sums.append(total.copy())
    return sums


def neumann_truncated_dual(f: FramePair, g: FramePair, Ncap: int, cfg=None, slack=1e-9) -> NeumannDual:
    """``C_n = B_n sum_{m<=Ncap} (I - S_{B,Psi})^m`` and
    ``Xi_n = sum_{m<=Ncap} (I - S_{A,Phi})^m Phi_n``.

    Requires a certified approximately dual pair.  The measured gaps are
    checked against ``base_gap ** (Ncap + 1)``.
    """
    return neumann_sequence(f, g, Ncap, cfg, slack)[-1]


def neumann_sequence(f: FramePair, g: FramePair, Ncap: int, cfg=None, slack=1e-9):
    """Truncated Neumann duals for every ``N = 0..Ncap``."""
    cfg = resolve(cfg)
    if Ncap < 0:
        raise ValueError("Ncap must be nonnegative")
    cert = is_approx_dual(f, g, cfg, samples=0)
    if not cert.verdict:
        raise NotApproxDual(
            f"gap upper bounds {cert.gap_left.upper:.6g}, {cert.gap_right.upper:.6g} are not both < 1"
        )
    I = np.eye(f.d)
    MA = I - S_A_Phi(f, g)
    MB = I - S_B_Psi(f, g)
    out = []
    for n, (sa, sb) in enumerate(zip(_neumann_sums(MA, Ncap), _neumann_sums(MB, Ncap))):
        h = g.replace(A=g.A @ sb, Psi=sa @ g.Psi)
        gl, gr = approx_gaps(f, h, cfg)
        res = NeumannDual(h, n, cert.gap_left, cert.gap_right, gl, gr)
        if gl.lower > res.bound_left + slack or gr.lower > res.bound_right + slack:
            raise GuaranteeViolated(
                f"N={n}: measured gaps ({gl.lower:.3e}, {gr.lower:.3e}) exceed "
                f"({res.bound_left:.3e}, {res.bound_right:.3e})"
            )
        out.append(res)
    return out


@dataclass(frozen=True)
class PerturbedApproxReport:
    """Outcome of the perturbation test for approximate duality.

    ``R`` bounds ``||theta_A - theta_C||``, ``Q`` bounds
    ``||theta_Xi - theta_Psi||``, ``c``/``d`` are the analysis/synthesis bounds
    of the dual.  When ``hypothesis`` holds the gaps are certified below
    ``dR`` and ``cQ``.
    """

    R: float
    Q: float
    c: float
    d: float
    precondition: bool
    hypothesis: bool
    verdict: bool
    certificate: ApproxDualCertificate = None

    def as_dict(self):
        out = {k: getattr(self, k) for k in ("R", "Q", "c", "d", "precondition", "hypothesis", "verdict")}
        out["certificate"] = self.certificate.as_dict() if self.certificate else None
        return out


def perturbed_approx_dual_check(f: FramePair, ref: FramePair, dual: FramePair, tol=None, cfg=None):
    """Is ``dual`` (a dual of ``ref``) approximately dual to the nearby ``f``?"""
    cfg = resolve(cfg)
    require_same_shape(f, ref)
    require_same_shape(f, dual)
    pre = is_dual(ref, dual, tol, cfg).verdict
    R = operator_norm(f.theta_A - ref.theta_A, f.X, f.block_space, cfg).upper
    Q = operator_norm(ref.theta_Psi - f.theta_Psi, f.block_space, f.X, cfg).upper
    c = operator_norm(dual.theta_A, f.X, f.block_space, cfg).upper
    d = operator_norm(dual.theta_Psi, f.block_space, f.X, cfg).upper
    hyp = pre and d * R < 1 and c * Q < 1
    if not hyp:
        return PerturbedApproxReport(R, Q, c, d, pre, False, False)
    left, right = approx_gaps(f, dual, cfg)
    if left.lower > d * R * (1 + 1e-9) + 1e-12 or right.lower > c * Q * (1 + 1e-9) + 1e-12:
        raise GuaranteeViolated(
            f"gaps ({left.lower:.3e}, {right.lower:.3e}) exceed dR={d * R:.3e}, cQ={c * Q:.3e}"
        )
    left = NormEstimate(left.lower, max(left.lower, min(left.upper, d * R)), left.exact, left.stable)
    right = NormEstimate(right.lower, max(right.lower, min(right.upper, c * Q)), right.exact, right.stable)
    cert = ApproxDualCertificate(left, right, left.upper < 1 and right.upper < 1)
    return PerturbedApproxReport(R, Q, c, d, pre, True, cert.verdict, cert)

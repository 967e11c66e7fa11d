"""Hilding-type invertibility and stability of frames under perturbation.

Every hypothesis below quantifies over all vectors (and all partial sums).
It is certified by an operator-norm sufficient condition and then spot
checked by random sampling.  A sampling failure refutes the hypothesis; a
missing sufficient condition only means nothing is concluded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import resolve
from .errors import GuaranteeViolated, HypothesisNotCertified, PreconditionError, SingularOperator
from .frames import FramePair, frame_bounds, frame_operator
from .pspace import SpaceDesc, invert, operator_norm

RTOL = 1e-9

HILDING = "||Ux - Vx|| <= alpha ||Ux|| + beta ||Vx||"
SYNTH_LOWER = "||S^-1|| (1 + beta) / (1 - (alpha + gamma ||theta_A S^-1||))"
SYNTH_UPPER = "||theta_A|| ((1 + alpha) ||theta_Psi|| + gamma) / (1 - beta)"
PAIR_UPPER = "((1+alpha)/(1-beta) ||theta_Psi|| + gamma/(1-beta)) ((1+r)/(1-s) ||theta_A|| + t/(1-s))"
PAIR_LOWER = "||S^-1|| / (1 - sigma)"
VARIANTS = {
    1: ("sum ||(Psi_n A_n - Phi_n B_n) S^-1||", "S_BPhi S^-1"),
    2: ("sum ||S^-1 (Psi_n A_n - Phi_n B_n)||", "S^-1 S_BPhi"),
    3: ("sum ||S^-1 Psi_n A_n - Phi_n B_n S^-1||", "S_BPhi S^-1"),
    4: ("sum ||Psi_n A_n S^-1 - S^-1 Phi_n B_n||", "S^-1 S_BPhi"),
}


@dataclass(frozen=True)
class PerturbCertificate:
    """Constants of a perturbation hypothesis and the bounds it implies.

    For frame perturbations ``lower_bound`` is a lower frame bound
    (``1 / ||S^-1||`` bound) and ``upper_bound`` an upper one.  For the
    Hilding check they bound ``||Vx|| / ||x||`` from below and above.
    """

    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    r: float = 0.0
    s: float = 0.0
    t: float = 0.0
    hypothesis_ok: bool = False
    lower_bound: float = 0.0
    upper_bound: float = math.inf
    formula_refs: str = ""
    details: dict = field(default_factory=dict)

    def as_dict(self):
        out = {
            k: getattr(self, k)
            for k in ("alpha", "beta", "gamma", "r", "s", "t", "hypothesis_ok", "lower_bound", "upper_bound", "formula_refs")
        }
        out["details"] = dict(self.details)
        return out


def _rng(cfg, salt):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([cfg.seed, salt])))


def _colnorm(M, r):
    return np.linalg.norm(M, ord=r, axis=0)


def _within(lhs, rhs):
    return np.all(lhs <= rhs * (1 + RTOL) + 1e-12)


# --- Hilding ---------------------------------------------------------------------


def hilding_check(U, V, alpha, beta, X=None, Y=None, cfg=None, samples=None) -> PerturbCertificate:
    """Certify ``||Ux - Vx|| <= alpha ||Ux|| + beta ||Vx||`` and its conclusions.

    With ``a1 = ||(U - V) U^-1||`` and ``a2 = ||(U - V) V^-1||`` the
    hypothesis holds whenever ``alpha / a1 + beta / a2 >= 1`` (split the
    difference between the two one-sided bounds).  Raises
    :class:`HypothesisNotCertified` when that fails or sampling refutes it.
    """
    cfg = resolve(cfg)
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    if not (0 <= alpha < 1 and 0 <= beta < 1):
        raise ValueError("alpha and beta must lie in [0, 1)")
    n = U.shape[1]
    X = X or SpaceDesc(n)
    Y = Y or SpaceDesc(U.shape[0])
    Uinv = invert(U, cfg=cfg)
    D = U - V
    dn = operator_norm(D, X, Y, cfg).upper
    a1 = min(operator_norm(D @ Uinv, Y, Y, cfg).upper, dn * operator_norm(Uinv, Y, X, cfg).upper)
    try:
        Vinv = invert(V, cfg=cfg)
        a2 = min(operator_norm(D @ Vinv, Y, Y, cfg).upper, dn * operator_norm(Vinv, Y, X, cfg).upper)
    except SingularOperator:
        a2 = math.inf
    # rounding slack: a computed bound of 0.1 + 5e-17 must still accept alpha = 0.1
    a1s, a2s = a1 * (1 - 1e-12), a2 * (1 - 1e-12)
    share = (alpha / a1s if a1s > 0 else math.inf) + (beta / a2s if a2s > 0 else math.inf)
    sufficient = a1s <= alpha or a2s <= beta or share >= 1

    xs = _rng(cfg, 1).standard_normal((n, samples or cfg.samples))
    Ux, Vx = U @ xs, V @ xs
    nU, nV = _colnorm(Ux, Y.norm_exp), _colnorm(Vx, Y.norm_exp)
    sampled = bool(_within(_colnorm(Ux - Vx, Y.norm_exp), alpha * nU + beta * nV))
    details = {"a1": a1, "a2": a2, "sufficient": bool(sufficient), "sampled": sampled}
    if not sampled:
        raise HypothesisNotCertified("sampled vector violates the hypothesis", refuted=True, report=details)
    if not sufficient:
        raise HypothesisNotCertified("sufficient norm condition not met", report=details)

    try:
        Vinv = invert(V, cfg=cfg)
    except SingularOperator as exc:
        raise GuaranteeViolated(f"certified V is singular: {exc}") from exc
    lo, hi = (1 - alpha) / (1 + beta), (1 + alpha) / (1 - beta)
    if not (_within(lo * nU, nV) and _within(nV, hi * nU)):
        raise GuaranteeViolated("sandwich inequality fails on a sample")
    uinv = operator_norm(Uinv, Y, X, cfg).upper
    vinv = operator_norm(Vinv, Y, X, cfg).lower
    if vinv > (1 + beta) / (1 - alpha) * uinv * (1 + RTOL):
        raise GuaranteeViolated(f"||V^-1|| >= {vinv:.6g} exceeds its bound")
    unorm = operator_norm(U, X, Y, cfg).upper
    details["V_inv_norm"] = vinv
    return PerturbCertificate(
        alpha=alpha,
        beta=beta,
        hypothesis_ok=True,
        lower_bound=lo / uinv,
        upper_bound=hi * unorm,
        formula_refs=HILDING,
        details=details,
    )


# --- partial-sum sampling -----------------------------------------------------------


def _synthesis_sampled(f, Phi, alpha, beta, gamma, rng, k):
    """Check the synthesis-side inequality for every partial sum ``m = 1..N``."""
    Z = rng.standard_normal((f.N, f.e, k))
    znorm = _block_norms(Z, f.Y.norm_exp, f.p)[-1]
    ps = np.cumsum(np.einsum("nde,nek->ndk", f.Psi, Z), axis=0)
    pf = np.cumsum(np.einsum("nde,nek->ndk", Phi, Z), axis=0)
    r = f.X.norm_exp
    lhs = np.linalg.norm(ps - pf, ord=r, axis=1)
    rhs = alpha * np.linalg.norm(ps, ord=r, axis=1) + gamma * znorm + beta * np.linalg.norm(pf, ord=r, axis=1)
    return bool(_within(lhs, rhs))


def _block_norms(W, rY, p):
    """Norms of the truncations to the first ``m`` blocks, for every ``m``."""
    b = np.linalg.norm(W, ord=rY, axis=1)
    return np.cumsum(b**p, axis=0) ** (1 / p)


def _analysis_sampled(f, B, r, s, t, rng, k):
    x = rng.standard_normal((f.d, k))
    Ax = np.einsum("ned,dk->nek", f.A, x)
    Bx = np.einsum("ned,dk->nek", B, x)
    xn = np.linalg.norm(x, ord=f.X.norm_exp, axis=0)
    lhs = _block_norms(Ax - Bx, f.Y.norm_exp, f.p)
    rhs = r * _block_norms(Ax, f.Y.norm_exp, f.p) + t * xn + s * _block_norms(Bx, f.Y.norm_exp, f.p)
    return bool(_within(lhs, rhs))


def _synth_diff(f, Phi, cfg):
    g = f.replace(Psi=Phi)
    return operator_norm(f.theta_Psi - g.theta_Psi, f.block_space, f.X, cfg).upper


def _anal_diff(f, B, cfg):
    g = f.replace(A=B)
    return operator_norm(f.theta_A - g.theta_A, f.X, f.block_space, cfg).upper


# --- synthesis perturbation -----------------------------------------------------------


def perturb_synthesis(f: FramePair, Phi_list, alpha=None, beta=None, gamma=None, cfg=None, samples=10_000):
    """Replace ``Psi_n`` by ``Phi_n`` and certify that a frame remains.

    With no constants given, ``alpha = beta = 0`` and ``gamma`` is the
    certified upper bound of ``||theta_Psi - theta_Phi||``.  Supplied
    constants are accepted when ``||theta_Psi - theta_Phi|| <= gamma``
    (truncation to a partial sum is a contraction) and sampling agrees.

    Returns ``(certificate, perturbed pair)``.
    """
    cfg = resolve(cfg)
    Phi = np.asarray(Phi_list)
    if Phi.shape != f.Psi.shape:
        raise PreconditionError("Phi_list", f"expected shape {f.Psi.shape}, got {Phi.shape}")
    try:
        Sinv = invert(frame_operator(f), cfg=cfg)
    except SingularOperator as exc:
        raise PreconditionError("frame", f"unperturbed pair is not a frame: {exc}") from exc
    diff = _synth_diff(f, Phi, cfg)
    auto = alpha is None and beta is None and gamma is None
    alpha = 0.0 if alpha is None else float(alpha)
    beta = 0.0 if beta is None else float(beta)
    gamma = diff if gamma is None else float(gamma)
    sampled = _synthesis_sampled(f, Phi, alpha, beta, gamma, _rng(cfg, 2), samples)
    details = {"diff_norm": diff, "sampled": sampled, "auto": auto}
    if not sampled:
        raise HypothesisNotCertified("sampled partial sum violates the hypothesis", refuted=True, report=details)
    if diff > gamma:
        raise HypothesisNotCertified(f"||theta_Psi - theta_Phi|| <= {diff:.6g} not below gamma", report=details)

    tAS = operator_norm(f.theta_A @ Sinv, f.X, f.block_space, cfg).upper
    bounds = frame_bounds(f, cfg)
    h = alpha + gamma * tAS
    statement = alpha + gamma / math.sqrt(bounds.a.mid) if bounds.a.mid > 0 else math.inf
    details.update(
        working=h,
        statement=statement,
        statement_ok=bool(max(statement, beta) < 1),
        forms_agree=bool((max(statement, beta) < 1) == (max(h, beta) < 1)),
    )
    if not max(h, beta) < 1:
        raise HypothesisNotCertified(f"max(alpha + gamma ||theta_A S^-1||, beta) = {max(h, beta):.6g} >= 1", report=details)

    sinv = operator_norm(Sinv, f.X, f.X, cfg).upper
    inv_bound = sinv * (1 + beta) / (1 - h)
    upper = bounds.c.upper * ((1 + alpha) * bounds.d.upper + gamma) / (1 - beta)
    g = f.replace(Psi=Phi)
    _assert_frame_bounds(g, inv_bound, upper, cfg, details)
    cert = PerturbCertificate(
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        hypothesis_ok=True,
        lower_bound=1 / inv_bound,
        upper_bound=upper,
        formula_refs=f"{SYNTH_LOWER}; {SYNTH_UPPER}",
        details=details,
    )
    return cert, g


def _assert_frame_bounds(g, inv_bound, upper, cfg, details):
    S = frame_operator(g)
    try:
        Sinv = invert(S, cfg=cfg)
    except SingularOperator as exc:
        raise GuaranteeViolated(f"certified perturbation has singular frame operator: {exc}") from exc
    measured_inv = operator_norm(Sinv, g.X, g.X, cfg).lower
    measured = operator_norm(S, g.X, g.X, cfg).lower
    details.update(measured_inv_norm=measured_inv, measured_norm=measured)
    if measured_inv > inv_bound * (1 + RTOL):
        raise GuaranteeViolated(f"||S^-1|| >= {measured_inv:.6g} exceeds certificate {inv_bound:.6g}")
    if measured > upper * (1 + RTOL):
        raise GuaranteeViolated(f"||S|| >= {measured:.6g} exceeds certificate {upper:.6g}")


# --- perturbing both sequences ----------------------------------------------------


def _variant_sum(f, B, Phi, Sinv, variant, cfg):
    total = 0.0
    for n in range(f.N):
        PA = f.Psi[n] @ f.A[n]
        PB = Phi[n] @ B[n]
        M = {
            1: lambda: (PA - PB) @ Sinv,
            2: lambda: Sinv @ (PA - PB),
            3: lambda: Sinv @ PA - PB @ Sinv,
            4: lambda: PA @ Sinv - Sinv @ PB,
        }[variant]()
        total += operator_norm(M, f.X, f.X, cfg).upper
    return total


def perturb_pair(f: FramePair, B_list, Phi_list, params=None, variant=1, cfg=None, samples=2_000):
    """Replace ``(A_n, Psi_n)`` by ``(B_n, Phi_n)`` and certify a frame remains.

    ``params`` holds ``r, s, t, alpha, beta, gamma``; missing analysis or
    synthesis constants default to the automatic choice ``r = s = 0``,
    ``t = ||theta_A - theta_B||`` (resp. ``alpha = beta = 0``,
    ``gamma = ||theta_Psi - theta_Phi||``).

    Returns ``(certificate, perturbed pair)``.
    """
    cfg = resolve(cfg)
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of 1..4, got {variant!r}")
    B = np.asarray(B_list)
    Phi = np.asarray(Phi_list)
    if B.shape != f.A.shape or Phi.shape != f.Psi.shape:
        raise PreconditionError("shapes", "perturbed sequences must match the frame's shapes")
    try:
        Sinv = invert(frame_operator(f), cfg=cfg)
    except SingularOperator as exc:
        raise PreconditionError("frame", f"unperturbed pair is not a frame: {exc}") from exc
    params = dict(params or {})
    dA, dPsi = _anal_diff(f, B, cfg), _synth_diff(f, Phi, cfg)
    r, s = float(params.get("r", 0.0)), float(params.get("s", 0.0))
    t = float(params.get("t", dA))
    alpha, beta = float(params.get("alpha", 0.0)), float(params.get("beta", 0.0))
    gamma = float(params.get("gamma", dPsi))
    if not max(beta, s) < 1:
        raise HypothesisNotCertified(f"max(beta, s) = {max(beta, s):.6g} >= 1")
    rng = _rng(cfg, 3)
    sampled = _analysis_sampled(f, B, r, s, t, rng, samples) and _synthesis_sampled(
        f, Phi, alpha, beta, gamma, rng, samples
    )
    sigma = _variant_sum(f, B, Phi, Sinv, variant, cfg)
    condition, composite = VARIANTS[variant]
    details = {
        "variant": variant,
        "variant_sum": sigma,
        "composite": composite,
        "analysis_diff": dA,
        "synthesis_diff": dPsi,
        "sampled": bool(sampled),
    }
    if not sampled:
        raise HypothesisNotCertified("sampled partial sum violates a hypothesis", refuted=True, report=details)
    if dA > t or dPsi > gamma:
        raise HypothesisNotCertified("difference norms exceed t or gamma", report=details)
    if not sigma < 1:
        raise HypothesisNotCertified(f"{condition} = {sigma:.6g} is not < 1", report=details)

    bounds = frame_bounds(f, cfg)
    upper = ((1 + alpha) / (1 - beta) * bounds.d.upper + gamma / (1 - beta)) * (
        (1 + r) / (1 - s) * bounds.c.upper + t / (1 - s)
    )
    inv_bound = operator_norm(Sinv, f.X, f.X, cfg).upper / (1 - sigma)
    g = f.replace(A=B, Psi=Phi)
    _assert_frame_bounds(g, inv_bound, upper, cfg, details)
    cert = PerturbCertificate(
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        r=r,
        s=s,
        t=t,
        hypothesis_ok=True,
        lower_bound=1 / inv_bound,
        upper_bound=upper,
        formula_refs=f"{condition} < 1 => {composite} invertible; {PAIR_LOWER}; {PAIR_UPPER}",
        details=details,
    )
    return cert, g


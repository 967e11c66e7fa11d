"""Operator-valued p-approximate Schauder frames in finite dimensions.

A frame pair is a family of analysis operators ``A_n: X -> Y`` and
synthesis operators ``Psi_n: Y -> X`` whose frame operator
``S = sum Psi_n A_n`` is invertible.  The package covers duals,
orthogonality, similarity, dilation and perturbation, with certified
operator-norm intervals on the p-sum block spaces.
"""

from ._core import BACKEND
from .config import Config, default_config
from .duality import (
    ApproxDualCertificate,
    DualCertificate,
    approx_dual_from_scaled,
    common_dual,
    direct_sum,
    dual_from_params,
    exact_dual_from_approx,
    interpolate_orthogonal,
    is_approx_dual,
    is_dual,
    is_orthogonal,
    left_inverses,
    neumann_truncated_dual,
    perturbed_approx_dual_check,
    right_inverses,
    tensor_product,
)
from .errors import *  # noqa: F401,F403
from .frames import (
    FrameBounds,
    FrameClass,
    FrameKind,
    FramePair,
    analysis,
    canonical_dual,
    classify,
    complete_to_parseval,
    frame_bounds,
    frame_operator,
    from_UV,
    is_frame,
    iterative_reconstruct,
    projection_P,
    restrict,
    synthesis,
    to_UV,
)
from .perturb import PerturbCertificate, hilding_check, perturb_pair, perturb_synthesis
from .pspace import (
    BlockSpace,
    BlockVector,
    NormEstimate,
    Operator,
    SpaceDesc,
    embed_L,
    invert,
    operator_norm,
    p_norm,
    project_Gamma,
)
from .transforms import Dilation, SimilarityWitness, dilate, is_similar, recover_similarity, similar_transform

__version__ = "0.1.0"

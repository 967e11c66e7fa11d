import numpy as np
import pytest
import scipy.linalg

from ovpframe.errors import DimensionMismatch, NotSimilar, SingularOperator
from ovpframe.frames import FrameKind, FramePair, canonical_dual, classify, frame_operator, projection_P
from ovpframe.harness.generate import GenSpec, generate
from ovpframe.harness.io import dilation_to_dict, dumps
from ovpframe.pspace import invert, max_abs
from ovpframe.transforms import dilate, is_similar, recover_similarity, similar_transform


def well_conditioned(rng, d):
    return np.eye(d) + 0.3 * rng.standard_normal((d, d))


class TestSimilarity:
    def test_identity_transform(self, frame):
        I = np.eye(frame.d)
        assert similar_transform(frame, I, I).allclose(frame, atol=0)

    def test_half_canonical_is_parseval(self, frame):
        Sinv = invert(frame_operator(frame))
        g = similar_transform(frame, Sinv, np.eye(frame.d))
        assert max_abs(frame_operator(g) - np.eye(frame.d)) <= 1e-10

    def test_roundtrip(self, frame, rng):
        for _ in range(5):
            R, L = well_conditioned(rng, 3), well_conditioned(rng, 3)
            w = recover_similarity(frame, similar_transform(frame, R, L))
            assert max_abs(w.R - R) <= 1e-10 and max_abs(w.L - L) <= 1e-10
            assert w.residual <= 1e-10

    def test_canonical_dual_witness(self, frame):
        w = recover_similarity(frame, canonical_dual(frame))
        Sinv = invert(frame_operator(frame))
        assert max_abs(w.R - Sinv) <= 1e-10 and max_abs(w.L - Sinv) <= 1e-10

    def test_unrelated(self, frame):
        g = generate(GenSpec(seed=77, p=frame.p, d=3, e=2, N=4, rX=3.0, rY=1.5))
        with pytest.raises(NotSimilar):
            recover_similarity(frame, g)
        assert not is_similar(frame, g)

    def test_singular_transform(self, frame):
        with pytest.raises(SingularOperator):
            similar_transform(frame, np.zeros((3, 3)), np.eye(3))

    def test_reflexive(self, frame):
        assert is_similar(frame, frame)

    def test_equivalence_with_witness(self, rng):
        for seed in range(10):
            f = generate(GenSpec(seed=seed, p=2.0, d=3, e=2, N=4))
            g = similar_transform(f, well_conditioned(rng, 3), well_conditioned(rng, 3))
            h = generate(GenSpec(seed=seed + 100, p=2.0, d=3, e=2, N=4))
            assert is_similar(f, g) and is_similar(g, f)
            recover_similarity(f, g)
            assert not is_similar(f, h)
            with pytest.raises(NotSimilar):
                recover_similarity(f, h)

    def test_transitive(self, frame, rng):
        g = similar_transform(frame, well_conditioned(rng, 3), well_conditioned(rng, 3))
        h = similar_transform(g, well_conditioned(rng, 3), well_conditioned(rng, 3))
        assert is_similar(frame, g) and is_similar(g, h) and is_similar(frame, h, tol=3e-9)

    def test_riesz_vs_nonriesz(self, frame):
        # a Riesz pair has N*e = d, so a non-Riesz frame never shares its shape
        riesz = generate(GenSpec(seed=2, p=frame.p, d=6, e=2, N=3, kind="riesz"))
        with pytest.raises(DimensionMismatch):
            is_similar(riesz, frame)
        square = generate(GenSpec(seed=2, p=frame.p, d=6, e=2, N=3))
        assert FrameKind.RIESZ in classify(square) and is_similar(riesz, square)

    def test_parseval_preservation(self, rng):
        f = generate(GenSpec(seed=3, p=1.5, d=3, e=2, N=4, kind="parseval"))
        R = well_conditioned(rng, 3)
        g = similar_transform(f, R, invert(R))
        assert FrameKind.PARSEVAL in classify(g)
        L = well_conditioned(rng, 3)
        g = similar_transform(f, R, L)
        assert (FrameKind.PARSEVAL in classify(g)) == (max_abs(L @ R - np.eye(3)) <= 1e-9)
        assert FrameKind.PARSEVAL not in classify(g)


class TestDilation:
    def test_two_point(self, two_point):
        dil = dilate(two_point)
        assert dil.k == 1 and dil.dilated.d == 2
        assert FrameKind.RIESZ in classify(dil.dilated)
        # W is spanned by (1, -1)/sqrt(2)
        assert abs(abs(dil.W_basis[0, 0]) - 2**-0.5) <= 1e-15
        assert dil.W_basis[0, 0] == pytest.approx(-dil.W_basis[1, 0], rel=1e-15)

    def test_riesz_input(self):
        f = generate(GenSpec(seed=1, p=2.0, d=4, e=2, N=2, kind="riesz"))
        dil = dilate(f)
        assert dil.k == 0 and dil.dilated.allclose(f, atol=0)

    @pytest.mark.parametrize("seed", range(5))
    def test_properties(self, seed):
        f = generate(GenSpec(seed=seed, p=1.5, d=3, e=2, N=5, rX=3.0))
        dil = dilate(f)
        g = dil.dilated
        assert dil.k == f.N * f.e - f.d
        assert np.array_equal(g.A @ dil.embed, f.A)
        assert max_abs(projection_P(g) - np.eye(f.N * f.e)) <= 1e-9
        target = scipy.linalg.block_diag(frame_operator(f), np.eye(dil.k))
        assert max_abs(frame_operator(g) - target) <= 1e-10
        assert g.X.norm_exp == f.X.norm_exp

    def test_embed_isometric(self, frame, rng):
        dil = dilate(frame)
        x = rng.standard_normal(frame.d)
        assert dil.dilated.X.norm(dil.embed @ x) == frame.X.norm(x)

    def test_singular(self):
        with pytest.raises(SingularOperator):
            dilate(FramePair(np.zeros((2, 1, 1)), np.zeros((2, 1, 1))))

    def test_serializable(self, two_point):
        doc = dilation_to_dict(dilate(two_point))
        assert {"dilated", "embed", "W_basis"} <= set(doc)
        assert dumps(doc).startswith("{")

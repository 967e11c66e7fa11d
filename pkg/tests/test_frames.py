import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ovpframe.errors import (
    BasisMismatch,
    DimensionMismatch,
    FactorizationMismatch,
    GuaranteeUnavailable,
    NotAProjection,
    SingularOperator,
)
from ovpframe.frames import (
    FrameKind,
    FramePair,
    analysis,
    canonical_dual,
    classify,
    complete_to_parseval,
    frame_bounds,
    frame_operator,
    from_UV,
    iterative_reconstruct,
    projection_basis,
    projection_P,
    restrict,
    riesz_residual_UV,
    synthesis,
    to_UV,
)
from ovpframe.harness.generate import GenSpec, generate
from ovpframe.pspace import SpaceDesc, embed_L, invert, max_abs

KIND_SPECS = st.builds(
    GenSpec,
    seed=st.integers(0, 2**32),
    p=st.sampled_from([1.0, 1.5, 2.0, 3.0]),
    d=st.integers(1, 5),
    e=st.integers(1, 4),
    N=st.integers(5, 8),
    rX=st.sampled_from([1.0, 2.0, 3.0, math.inf]),
    rY=st.sampled_from([1.0, 1.5, 2.0]),
)


class TestOperators:
    def test_analysis_zero(self, frame):
        assert not analysis(frame, np.zeros(frame.d)).blocks.any()

    def test_synthesis_sifts(self, frame, rng):
        y = rng.standard_normal(frame.e)
        for n in range(1, frame.N + 1):
            got = synthesis(frame, embed_L(n, y, frame.block_space))
            assert np.allclose(got, frame.Psi[n - 1] @ y, rtol=0, atol=1e-14)

    def test_synthesis_shapes(self, frame):
        with pytest.raises(DimensionMismatch):
            synthesis(frame, np.zeros(frame.N * frame.e + 1))
        with pytest.raises(DimensionMismatch):
            analysis(frame, np.zeros(frame.d + 1))

    def test_frame_operator_examples(self, two_point):
        assert np.array_equal(frame_operator(FramePair(np.eye(3)[None], np.eye(3)[None])), np.eye(3))
        assert frame_operator(two_point)[0, 0] == 2.0

    def test_factorization_loop_oracle(self, frame):
        S = np.zeros((frame.d, frame.d))
        for n in range(frame.N):
            for i in range(frame.d):
                for j in range(frame.d):
                    S[i, j] += sum(frame.Psi[n, i, k] * frame.A[n, k, j] for k in range(frame.e))
        assert max_abs(S - frame_operator(frame)) <= 1e-12 * (1 + max_abs(S))
        assert max_abs(frame.theta_Psi @ frame.theta_A - S) <= 1e-12 * (1 + max_abs(S))

    def test_operators_match_matrices(self, frame, rng):
        x = rng.standard_normal(frame.d)
        assert np.allclose(analysis(frame, x).flat, frame.theta_A @ x, rtol=0, atol=1e-13)
        z = rng.standard_normal(frame.N * frame.e)
        assert np.allclose(synthesis(frame, z), frame.theta_Psi @ z, rtol=0, atol=1e-13)

    def test_injective_and_surjective(self, frame):
        assert np.linalg.matrix_rank(frame.theta_A) == frame.d
        assert np.linalg.matrix_rank(frame.theta_Psi) == frame.d

    def test_validation(self):
        with pytest.raises(DimensionMismatch):
            FramePair(np.zeros((2, 1, 3)), np.zeros((2, 1, 3)))
        with pytest.raises(DimensionMismatch):
            FramePair(np.zeros((0, 1, 1)), np.zeros((0, 1, 1)))
        with pytest.raises(ValueError):
            FramePair(np.ones((1, 1, 1)), np.ones((1, 1, 1)), p=0.5)


class TestBoundsAndClasses:
    def test_parseval_bounds(self):
        f = FramePair(np.eye(2)[None], np.eye(2)[None], p=1.0, X=SpaceDesc(2, 1.0), Y=SpaceDesc(2, 1.0))
        fb = frame_bounds(f)
        for est in (fb.a, fb.b):
            assert est.exact and est.lower == est.upper == 1.0

    def test_diag_singleton(self):
        D = np.diag([2.0, 1.0])
        fb = frame_bounds(FramePair(D[None], D[None]))
        assert fb.b.lower == pytest.approx(4.0, rel=1e-15) and fb.b.exact
        assert fb.a.lower == pytest.approx(1.0, rel=1e-15)

    def test_two_point_bounds(self, two_point):
        fb = frame_bounds(two_point)
        assert fb.a.lower == pytest.approx(2.0) and fb.b.upper == pytest.approx(2.0)
        assert fb.c.lower == pytest.approx(math.sqrt(2)) and fb.d.upper == pytest.approx(math.sqrt(2))

    def test_bounds_are_intervals(self, frame):
        fb = frame_bounds(frame)
        for est in (fb.a, fb.b, fb.c, fb.d):
            assert 0 < est.lower <= est.upper

    def test_identity_is_riesz_and_parseval(self):
        cls = classify(FramePair(np.eye(3)[None], np.eye(3)[None]))
        assert {FrameKind.PARSEVAL, FrameKind.RIESZ} <= cls.kinds
        assert cls.strongest is FrameKind.RIESZ

    def test_zero_is_only_bessel(self):
        cls = classify(FramePair(np.zeros((1, 2, 2)), np.zeros((1, 2, 2))))
        assert cls.kinds == {FrameKind.BESSEL}
        assert FrameKind.NOT_BESSEL not in cls
        assert "Frame" not in cls.as_dict()["kinds"]

    def test_generic_is_frame(self, frame):
        cls = classify(frame)
        assert FrameKind.FRAME in cls and FrameKind.PARSEVAL not in cls

    @pytest.mark.parametrize(
        "kind,expected",
        [("parseval", FrameKind.PARSEVAL), ("riesz", FrameKind.RIESZ), ("generic", FrameKind.FRAME)],
    )
    def test_generated_kinds(self, kind, expected):
        for seed in range(10):
            f = generate(GenSpec(seed=seed, p=1.5, d=3, e=2, N=5, kind=kind))
            assert expected in classify(f)

    def test_bessel_only(self):
        for seed in range(10):
            f = generate(GenSpec(seed=seed, p=2.0, d=3, e=2, N=4, kind="bessel_only"))
            assert classify(f).strongest is FrameKind.BESSEL


class TestProjection:
    def test_two_point(self, two_point):
        assert np.allclose(projection_P(two_point), [[0.5, 0.5], [0.5, 0.5]], rtol=0, atol=1e-15)

    def test_riesz_is_identity(self):
        f = generate(GenSpec(seed=3, p=2.0, d=4, e=2, N=2, kind="riesz"))
        assert max_abs(projection_P(f) - np.eye(4)) <= 1e-10

    def test_properties(self, frame):
        P = projection_P(frame)
        assert max_abs(P @ P - P) <= 1e-10
        assert max_abs(P @ frame.theta_A - frame.theta_A) <= 1e-10
        assert max_abs(frame.theta_Psi @ P - frame.theta_Psi) <= 1e-10

    def test_singular(self):
        with pytest.raises(SingularOperator):
            projection_P(FramePair(np.zeros((1, 1, 1)), np.zeros((1, 1, 1))))


class TestCanonicalDual:
    def test_parseval_fixed(self):
        f = generate(GenSpec(seed=4, p=1.5, d=3, e=2, N=4, kind="parseval"))
        assert canonical_dual(f).allclose(f, atol=1e-10)

    def test_involution(self, frame):
        assert canonical_dual(canonical_dual(frame)).allclose(frame, atol=1e-10)

    def test_dual_operator_is_inverse(self, frame):
        g = canonical_dual(frame)
        assert max_abs(frame_operator(g) @ frame_operator(frame) - np.eye(frame.d)) <= 1e-10

    def test_dual_bounds(self, euclid_frame):
        fb, gb = frame_bounds(euclid_frame), frame_bounds(canonical_dual(euclid_frame))
        assert gb.a.lower == pytest.approx(1 / fb.b.upper, rel=1e-10)
        assert gb.b.upper == pytest.approx(1 / fb.a.lower, rel=1e-10)


class TestUV:
    def test_block_identity(self):
        f = from_UV(np.eye(3), np.eye(3), Y=1)
        assert f.N == 3 and np.array_equal(frame_operator(f), np.eye(3))
        assert np.array_equal(f.A[1], [[0.0, 1.0, 0.0]])

    def test_roundtrip(self, frame):
        U, V = to_UV(frame)
        g = from_UV(U, V, p=frame.p, Y=frame.Y, X=frame.X)
        assert np.array_equal(g.A, frame.A) and np.array_equal(g.Psi, frame.Psi)

    def test_singleton_identity(self):
        U, V = to_UV(FramePair(np.eye(2)[None], np.eye(2)[None]))
        assert np.array_equal(U, np.eye(2)) and np.array_equal(V, np.eye(2))

    def test_random_frame(self, rng):
        U = rng.standard_normal((6, 3))
        V = rng.standard_normal((3, 6))
        assert FrameKind.FRAME in classify(from_UV(U, V, Y=2))

    def test_riesz_equivalence(self, frame):
        riesz = generate(GenSpec(seed=5, p=2.0, d=4, e=2, N=2, kind="riesz"))
        for f in (frame, riesz):
            U, V = to_UV(f)
            assert (FrameKind.RIESZ in classify(f)) == (riesz_residual_UV(U, V) <= 1e-9)

    def test_shape_errors(self):
        with pytest.raises(DimensionMismatch):
            from_UV(np.zeros((4, 2)), np.zeros((4, 2)))
        with pytest.raises(DimensionMismatch):
            from_UV(np.zeros((5, 2)), np.zeros((2, 5)), Y=2)


class TestRestriction:
    def test_identity_projection(self, frame):
        g = restrict(frame, np.eye(frame.d), np.eye(frame.d))
        assert g.allclose(frame, atol=1e-12)

    def test_parseval_rank_one(self):
        f = generate(GenSpec(seed=6, p=2.0, d=3, e=2, N=4, kind="parseval"))
        P = np.diag([1.0, 0.0, 0.0])
        g = restrict(f, P, projection_basis(P))
        assert g.d == 1 and abs(frame_operator(g)[0, 0] - 1.0) <= 1e-12

    def test_parseval_oblique(self, rng):
        f = generate(GenSpec(seed=7, p=1.5, d=4, e=2, N=5, kind="parseval"))
        E = rng.standard_normal((4, 2))
        # any idempotent with range(E) works
        F = rng.standard_normal((2, 4))
        P = E @ np.linalg.inv(F @ E) @ F
        g = restrict(f, P, E)
        assert max_abs(frame_operator(g) - np.eye(2)) <= 1e-10

    def test_spectral_projection_inverse(self, rng):
        Q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        S = Q @ np.diag([0.5, 1.0, 2.0, 3.0]) @ Q.T
        f = FramePair(S[None], np.eye(4)[None])
        E = Q[:, :2]
        g = restrict(f, E @ E.T, E)
        Sz = frame_operator(g)
        assert max_abs(invert(Sz) - E.T @ invert(S) @ E) <= 1e-12

    def test_compression_inverse_counterexample(self):
        # with a non-commuting projection, inverting the compression is not
        # compressing the inverse
        S = np.array([[2.0, 1.0], [1.0, 1.0]])
        P = np.diag([1.0, 0.0])
        E = np.array([[1.0], [0.0]])
        f = FramePair(S[None], np.eye(2)[None])
        Sz = frame_operator(restrict(f, P, E))
        assert Sz[0, 0] == 2.0
        assert (E.T @ invert(S) @ E)[0, 0] == pytest.approx(1.0)

    def test_compression_can_be_singular(self):
        # an invertible S whose compression to range(P) vanishes
        S = np.array([[0.0, 1.0], [1.0, 0.0]])
        f = FramePair(S[None], np.eye(2)[None])
        assert FrameKind.FRAME in classify(f)
        g = restrict(f, np.diag([1.0, 0.0]), np.array([[1.0], [0.0]]))
        assert frame_operator(g)[0, 0] == 0.0
        assert FrameKind.FRAME not in classify(g)

    def test_errors(self, frame):
        with pytest.raises(NotAProjection):
            restrict(frame, 2 * np.eye(frame.d), np.eye(frame.d))
        P = np.diag([1.0, 0.0, 0.0])
        with pytest.raises(BasisMismatch):
            restrict(frame, P, np.array([[0.0], [1.0], [0.0]]))
        with pytest.raises(BasisMismatch):
            restrict(frame, P, np.eye(3)[:, :2])
        with pytest.raises(DimensionMismatch):
            restrict(frame, np.eye(2), np.eye(2))


class TestCompletion:
    def test_parseval_zeros(self):
        f = generate(GenSpec(seed=8, p=2.0, d=2, e=2, N=3, kind="parseval"))
        g = complete_to_parseval(f, np.zeros((2, 2)), np.zeros((2, 2)))
        assert g.N == 4 and FrameKind.PARSEVAL in classify(g)

    def test_trivial_factorization(self, rng):
        M = 0.3 * rng.standard_normal((3, 3))
        S = np.eye(3) - M
        f = FramePair(S[None], np.eye(3)[None])
        g = complete_to_parseval(f, M, np.eye(3))
        assert max_abs(frame_operator(g) - np.eye(3)) <= 1e-15

    def test_scalar(self):
        f = FramePair(np.full((1, 1, 1), 0.5), np.ones((1, 1, 1)))
        g = complete_to_parseval(f, [[0.5]], [[1.0]])
        assert frame_operator(g)[0, 0] == 1.0

    def test_mismatch(self, frame):
        with pytest.raises(FactorizationMismatch):
            complete_to_parseval(frame, np.zeros((frame.e, frame.d)), np.zeros((frame.d, frame.e)))
        with pytest.raises(DimensionMismatch):
            complete_to_parseval(frame, np.zeros((1, 1)), np.zeros((1, 1)))


class TestIteration:
    def test_parseval_one_step(self, rng):
        f = generate(GenSpec(seed=9, p=2.0, d=3, e=2, N=4, kind="parseval"))
        x = rng.standard_normal(3)
        rec = iterative_reconstruct(f, x, 1)
        assert np.allclose(rec.approximants[0], x, rtol=0, atol=1e-12)

    def test_diag_ratio(self, rng):
        S = np.diag([1.0, 3.0])
        f = FramePair(S[None], np.eye(2)[None])
        x = rng.standard_normal(2)
        rec = iterative_reconstruct(f, x, 10)
        assert rec.guaranteed and rec.ratio == pytest.approx(0.5)
        for k, err in enumerate(rec.errors, 1):
            assert err <= 0.5**k * (1 + 1e-9)

    @pytest.mark.parametrize("seed", range(5))
    def test_converges(self, seed, rng):
        f = generate(GenSpec(seed=seed, p=2.0, d=4, e=2, N=5, kind="positive"))
        x = rng.standard_normal(f.d)
        rec = iterative_reconstruct(f, x, 1)
        assert rec.guaranteed
        steps = math.ceil(math.log(1e-8) / math.log(rec.ratio))
        rec = iterative_reconstruct(f, x, steps)
        assert rec.errors[-1] <= 1e-8
        assert all(b <= a * (1 + 1e-12) for a, b in zip(rec.errors, rec.errors[1:]))

    def test_singular(self):
        with pytest.raises(SingularOperator):
            iterative_reconstruct(FramePair(np.zeros((1, 1, 1)), np.zeros((1, 1, 1))), np.ones(1), 3)

    def test_uncertified_still_runs(self):
        # a nonnormal S in l^1 where the step bound cannot be certified
        S = np.array([[1.0, 0.9], [0.0, 1.0]])
        X = SpaceDesc(2, 3.0)
        f = FramePair(S[None], np.eye(2)[None], X=X)
        rec = iterative_reconstruct(f, np.ones(2), 5)
        if not rec.guaranteed:
            with pytest.raises(GuaranteeUnavailable):
                iterative_reconstruct(f, np.ones(2), 5, require_guarantee=True)
        assert len(rec.approximants) == 5


@given(KIND_SPECS)
def test_generated_frame_invariants(spec):
    f = generate(spec)
    S = frame_operator(f)
    assert max_abs(S - f.theta_Psi @ f.theta_A) <= 1e-12 * (1 + max_abs(S))
    P = projection_P(f)
    assert max_abs(P @ P - P) <= 1e-10 * (1 + max_abs(P))
    assert canonical_dual(canonical_dual(f)).allclose(f, atol=1e-10)
    U, V = to_UV(f)
    assert from_UV(U, V, f.p, f.Y, f.X).allclose(f, atol=0)


@given(st.integers(0, 2**32), st.sampled_from([1.0, 2.0, 3.0]))
def test_parseval_generator(seed, p):
    f = generate(GenSpec(seed=seed, p=p, d=3, e=2, N=4, kind="parseval"))
    assert classify(f).parseval_residual <= 1e-10

import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import angles, frames
from grasspoly import (
    Frame,
    PluckerMatrix,
    SignSignature,
    plucker_from_frame,
    projection_from_frame,
    projection_from_plucker,
    recover_frame,
    sign_signature,
)
from grasspoly.exceptions import DomainError, InvalidFrameError, NotAPlaneError
from grasspoly.grassmann import (
    full_plucker,
    plucker_coordinates,
    plucker_relation_residuals,
    row_keys,
    sign_arrays,
    signature_from_row,
    signature_row,
)
from grasspoly.hyperoctahedral import base_cell_signature
from grasspoly.polygons import positive_frame
from grasspoly.sampling import sample_frames


def _frame(u, v):
    return Frame(np.array(u, float), np.array(v, float))


class TestFrame:
    def test_rejects_non_orthonormal(self):
        with pytest.raises(InvalidFrameError):
            _frame([1, 0, 0], [1, 1, 0])

    def test_rejects_short(self):
        with pytest.raises(InvalidFrameError):
            _frame([1, 0], [0, 1])

    def test_accepts_within_tolerance(self):
        Frame(np.array([1.0, 1e-10, 0]), np.array([0.0, 1.0, 0]))

    def test_json_round_trip(self):
        F = _frame([1, 0, 0, 0], [0, 0, 1, 0])
        d = json.loads(json.dumps(F.to_dict()))
        assert d == {"n": 4, "u": [1, 0, 0, 0], "v": [0, 0, 1, 0]}
        assert Frame.from_dict(d) == F

    def test_from_dict_checks_n(self):
        with pytest.raises(InvalidFrameError):
            Frame.from_dict({"n": 5, "u": [1, 0, 0], "v": [0, 1, 0]})

    def test_immutable(self):
        F = _frame([1, 0, 0], [0, 1, 0])
        with pytest.raises(ValueError):
            F.u[0] = 2.0


class TestPlucker:
    def test_coordinate_plane_n3(self):
        D = plucker_from_frame(_frame([1, 0, 0], [0, 1, 0]))
        assert (D[0, 1], D[0, 2], D[1, 2]) == (1.0, 0.0, 0.0)

    def test_coordinate_plane_n4(self):
        D = plucker_from_frame(_frame([1, 0, 0, 0], [0, 0, 1, 0]))
        full = D.full()
        assert full[0, 2] == 1.0
        assert np.count_nonzero(np.triu(full)) == 1

    def test_skew_access(self):
        D = plucker_from_frame(_frame([1, 0, 0], [0, 1, 0]))
        assert D[1, 0] == -1.0 and D[0, 0] == 0.0

    def test_relations_n5(self, stream):
        F = sample_frames(5, stream, 1)[0]
        D = plucker_from_frame(F)
        res = D.relation_residuals()
        assert res.shape == (5,)
        assert np.abs(res).max() < 1e-12

    def test_relations_oracle(self, stream):
        # independent loop over all quadruples
        F = sample_frames(6, stream, 1)[0]
        D = plucker_from_frame(F).full()
        worst = 0.0
        for i in range(6):
            for j in range(i + 1, 6):
                for k in range(j + 1, 6):
                    for l in range(k + 1, 6):
                        r = D[i, j] * D[k, l] - D[i, k] * D[j, l] + D[i, l] * D[j, k]
                        worst = max(worst, abs(r))
        assert worst < 1e-12

    def test_frobenius_norm(self, stream):
        F = sample_frames(7, stream, 1)[0]
        assert np.linalg.norm(plucker_from_frame(F).full()) ** 2 == pytest.approx(2, abs=1e-12)

    def test_json_one_based(self):
        D = plucker_from_frame(_frame([1, 0, 0, 0], [0, 0, 1, 0]))
        d = D.to_dict()
        assert [1, 3, 1.0] in d["upper"]
        back = PluckerMatrix.from_dict(json.loads(json.dumps(d)))
        assert np.array_equal(back.upper, D.upper)

    def test_negation(self, stream):
        D = plucker_from_frame(sample_frames(4, stream, 1)[0])
        assert np.array_equal((-D).upper, -D.upper)


class TestProjection:
    def test_coordinate_plane(self):
        M = projection_from_frame(_frame([1, 0, 0], [0, 1, 0])).matrix
        assert np.array_equal(M, np.diag([1.0, 1.0, 0.0]))

    @given(frames())
    def test_projector_identities(self, F):
        M = projection_from_frame(F).matrix
        assert np.abs(M @ M - M).max() < 1e-10
        assert np.abs(M - M.T).max() == 0.0
        assert abs(np.trace(M) - 2) < 1e-10

    @given(frames())
    def test_minus_delta_squared(self, F):
        M = projection_from_frame(F).matrix
        assert np.abs(projection_from_plucker(plucker_from_frame(F)).matrix - M).max() < 1e-10

    def test_batched_identity(self, stream):
        for n in range(3, 9):
            F = sample_frames(n, stream, 1000)
            D = full_plucker(plucker_coordinates(F), n)
            P = np.einsum("mik,mjk->mij", F, F)
            assert np.abs(P + D @ D).max() < 1e-10


class TestRecover:
    def test_single_coordinate(self):
        D = PluckerMatrix.from_full(np.array([[0, 1, 0, 0], [-1, 0, 0, 0],
                                              [0, 0, 0, 0], [0, 0, 0, 0]], float))
        M = projection_from_frame(recover_frame(D)).matrix
        assert np.abs(M - np.diag([1.0, 1, 0, 0])).max() < 1e-12

    def test_scaled_is_not_a_plane(self, stream):
        D = plucker_from_frame(sample_frames(4, stream, 1)[0])
        with pytest.raises(NotAPlaneError):
            recover_frame(D.scaled(0.5))

    def test_round_trip_many(self, stream):
        for n in range(3, 9):
            for A in sample_frames(n, stream, 1000):
                B = recover_frame(plucker_from_frame(A)).matrix
                assert np.abs(B @ B.T - A @ A.T).max() < 1e-9

    @given(frames())
    def test_reproduces_orientation(self, F):
        D = plucker_from_frame(F)
        back = plucker_from_frame(recover_frame(D))
        assert np.abs(back.upper - D.upper).max() < 1e-9


class TestInPlaneRotation:
    @given(frames(), angles)
    def test_invariants_unchanged(self, F, phi):
        G = F.rotated(phi)
        assert np.abs(plucker_from_frame(G).upper - plucker_from_frame(F).upper).max() < 1e-12
        M0, M1 = projection_from_frame(F).matrix, projection_from_frame(G).matrix
        assert np.abs(M0 - M1).max() < 1e-12


class TestSignSignature:
    def test_positive_frame(self):
        sig = sign_signature(positive_frame(6, np.random.default_rng(3)))
        assert all(s == 1 for s in sig.plucker)

    @given(frames())
    def test_swap_quotient(self, F):
        assert sign_signature(F, 0.0) == sign_signature(F.swapped(), 0.0)

    def test_epsilon_zeroes(self):
        sig = sign_signature(_frame([1, 0, 0, 0], [0, 0, 1, 0]))
        assert sig.plucker == (0, 1, 0, 0, 0, 0)
        assert not sig.is_open

    def test_negative_epsilon(self):
        with pytest.raises(DomainError):
            sign_signature(_frame([1, 0, 0], [0, 1, 0]), -1.0)

    def test_canonical_first_nonzero_positive(self, stream):
        rows = sign_arrays(sample_frames(5, stream, 500), 0.0)
        assert (rows[:, 0] == 1).all()

    def test_base_cell_frame(self, stream):
        from grasspoly.sampling import sample_in_signature
        F = sample_in_signature(4, base_cell_signature(), stream)
        sig = sign_signature(F, 0.0)
        assert sig.plucker == (1,) * 6
        Q = sig.projection_matrix()
        negative = {(i, j) for i in range(4) for j in range(i + 1, 4) if Q[i, j] < 0}
        assert negative == {(0, 3)}

    def test_row_and_dict_round_trip(self, stream):
        sig = sign_signature(sample_frames(5, stream, 1)[0])
        assert signature_from_row(signature_row(sig), 5) == sig
        assert SignSignature.from_dict(json.loads(json.dumps(sig.to_dict()))) == sig

    def test_negated_canonicalizes_back(self, stream):
        sig = sign_signature(sample_frames(4, stream, 1)[0])
        assert sig.negated().canonicalize() == sig

    def test_row_keys_distinguish(self):
        rows = np.array([[1, -1, 0], [1, -1, 0], [1, 1, 0]], dtype=np.int8)
        k = row_keys(rows)
        assert k[0] == k[1] and k[0] != k[2]


def test_relation_residuals_shape(stream):
    F = sample_frames(6, stream, 10)
    res = plucker_relation_residuals(plucker_coordinates(F), 6)
    assert res.shape == (10, math.comb(6, 4))

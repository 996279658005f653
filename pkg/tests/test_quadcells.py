import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import angles, frames
from grasspoly import (
    Frame,
    PolygonClass,
    PolygonShape,
    build_quad_cell_table,
    classify_polygon,
    congruent,
    flag_mean,
    log_interpolate_cellpath,
    plucker_from_frame,
    polygon_from_frame,
    projection_from_frame,
    sign_signature,
)
from grasspoly.exceptions import (
    CellMismatchError,
    ConsistencyError,
    DegenerateMeanError,
    DomainError,
)
from grasspoly.grassmann import PluckerMatrix, sign_arrays
from grasspoly.hyperoctahedral import (
    act_on_frame,
    act_on_frames,
    base_cell_signature,
    cyclic_shift,
    transposition,
)
from grasspoly.polygons import classify_frames, positive_frame
from grasspoly.quadcells import (
    A3_TRANSVERSAL,
    REFERENCE_KITE,
    align_edges,
    base_cell_flag_mean,
    chart_element,
    classes_from_sign_rows,
    congruence_classes_of_orbit,
    dihedral_permutations,
    projection_from_plucker_n4,
)
from grasspoly.sampling import SampleStream, sample_frames, sample_many_in_signature


def _plane_distance(A, B):
    return np.abs(A @ A.T - B @ B.T).max()


def _orthonormal_rows(Z):
    # A (A^T A)^(-1/2) keeps every row direction
    w, U = np.linalg.eigh(Z.T @ Z)
    return Z @ U @ np.diag(w ** -0.5) @ U.T


@pytest.fixture(scope="module")
def table():
    return build_quad_cell_table(SampleStream(7), 10_000)


class TestProjectionFormula:
    def test_coordinate_plane(self):
        D = plucker_from_frame(Frame(np.array([1.0, 0, 0, 0]), np.array([0, 0, 1.0, 0])))
        assert np.array_equal(projection_from_plucker_n4(D).matrix, np.diag([1.0, 0, 1, 0]))

    def test_matches_frames(self, stream):
        for A in sample_frames(4, stream, 1000):
            M = projection_from_plucker_n4(plucker_from_frame(A)).matrix
            assert np.abs(M - A @ A.T).max() < 1e-12

    def test_n_not_4(self, stream):
        with pytest.raises(DomainError):
            projection_from_plucker_n4(plucker_from_frame(sample_frames(5, stream, 1)[0]))

    def test_positive_chamber_signs(self):
        signs = {(0, 2): set(), (1, 3): set()}
        for seed in range(300):
            M = projection_from_frame(positive_frame(4, seed)).matrix
            assert M[0, 1] > 0 and M[1, 2] > 0 and M[2, 3] > 0
            assert M[0, 3] < 0
            for k in signs:
                signs[k].add(np.sign(M[k]))
        assert signs[(0, 2)] == {-1.0, 1.0} and signs[(1, 3)] == {-1.0, 1.0}


class TestLogInterpolation:
    def test_constant_path(self, stream):
        A = sample_frames(4, stream, 1)[0]
        path = log_interpolate_cellpath(A, A, 10)
        D = plucker_from_frame(A).upper
        assert np.abs(path.upper - D / np.linalg.norm(D)).max() < 1e-12

    def test_base_cell_pairs(self, stream):
        F = sample_many_in_signature(4, base_cell_signature(), stream, 40)
        base = np.array(base_cell_signature().plucker + base_cell_signature().projection)
        for A, B in zip(F[::2], F[1::2]):
            path = log_interpolate_cellpath(A, B, 100)
            assert (path.signatures() == base).all()
            assert path.relation_residuals().max() < 1e-10
            assert (path.quotient_margins() > 0).all()

    def test_any_cell(self, stream):
        F = sample_frames(4, stream, 60)
        for A in F:
            sig = sign_signature(A, 0.0)
            B = sample_many_in_signature(4, sig, stream, 1)[0]
            path = log_interpolate_cellpath(A, B, 25)
            assert (path.signatures() == sign_arrays(A[None], 0.0)).all()
            # endpoints are the normalized inputs, oriented like the start
            for X, row in ((A, path.upper[0]), (B, path.upper[-1])):
                D = plucker_from_frame(X).upper
                D = D / np.linalg.norm(D)
                assert min(np.abs(row - D).max(), np.abs(row + D).max()) < 1e-12
            assert path.upper[0] @ path.upper[-1] > 0

    def test_samples_are_planes(self, stream):
        F = sample_many_in_signature(4, base_cell_signature(), stream, 2)
        path = log_interpolate_cellpath(F[0], F[1], 7)
        for _, D in path.samples:
            full = D.full()
            assert np.linalg.norm(full) ** 2 == pytest.approx(2.0, abs=1e-12)

    def test_mismatch(self, stream):
        F = sample_frames(4, stream, 50)
        sigs = [sign_signature(A, 0.0) for A in F]
        j = next(k for k in range(1, 50) if sigs[k] != sigs[0])
        with pytest.raises(CellMismatchError):
            log_interpolate_cellpath(F[0], F[j], 10)

    def test_wall(self):
        D = PluckerMatrix(4, np.array([1.0, 0, 0, 0, 0, 0]))
        with pytest.raises(DomainError):
            log_interpolate_cellpath(D, D, 5)

    def test_steps(self, stream):
        A = sample_frames(4, stream, 1)[0]
        with pytest.raises(DomainError):
            log_interpolate_cellpath(A, A, 1)

    def test_chart_element(self, stream):
        sig = sign_signature(sample_frames(4, stream, 1)[0], 0.0)
        g = chart_element(sig)
        from grasspoly.hyperoctahedral import act_on_signature
        assert act_on_signature(g, sig) == base_cell_signature()


class TestFlagMean:
    def test_single(self, stream):
        A = sample_frames(5, stream, 1)[0]
        assert _plane_distance(flag_mean([A]).matrix, A) < 1e-10

    def test_repeated(self, stream):
        A = sample_frames(5, stream, 1)[0]
        assert _plane_distance(flag_mean(np.repeat(A[None], 7, axis=0)).matrix, A) < 1e-10

    @given(st.integers(0, 1000), angles)
    def test_invariances(self, seed, phi):
        s = SampleStream(seed)
        F = sample_frames(4, s, 12) * 0.2 + np.eye(4, 2)[None]
        F = np.stack([np.linalg.qr(A)[0] for A in F])
        ref = flag_mean(F).matrix
        shuffled = F[np.random.default_rng(seed).permutation(12)]
        assert _plane_distance(flag_mean(shuffled).matrix, ref) < 1e-10
        F2 = F.copy()
        F2[3] = Frame.from_matrix(F[3]).rotated(phi).matrix
        assert _plane_distance(flag_mean(F2).matrix, ref) < 1e-10

    def test_equivariance(self, stream):
        F = sample_many_in_signature(4, base_cell_signature(), stream, 500)
        g = cyclic_shift(4) * transposition(4, 1, 3)
        lhs = flag_mean(act_on_frames(g, F)).matrix
        rhs = act_on_frame(g, flag_mean(F).matrix)
        assert _plane_distance(lhs, rhs) < 1e-10

    def test_degenerate(self):
        A = np.eye(4)[:, :2]
        B = np.eye(4)[:, 2:]
        with pytest.raises(DegenerateMeanError):
            flag_mean([A, B])

    def test_empty(self):
        with pytest.raises(DomainError):
            flag_mean(np.zeros((0, 4, 2)))

    def test_kite(self):
        mean = base_cell_flag_mean(SampleStream(7), 10_000)
        aligned, err = align_edges(polygon_from_frame(mean).edges, REFERENCE_KITE)
        assert err < 0.05
        assert sign_signature(mean, 0.0) == base_cell_signature()


class TestCongruence:
    def test_square_dihedral_orbit(self):
        E = np.array([(0.5, 0), (0, 0.5), (-0.5, 0), (0, -0.5)])
        quads = [PolygonShape(E[list(p)]) for p in dihedral_permutations(4)]
        assert len(congruence_classes_of_orbit(quads)) == 1

    def test_generic_convex_dihedral_orbit(self):
        E = np.array([(0.4, -0.1), (0.1, 0.5), (-0.3, 0.2), (-0.2, -0.6)])
        quads = [PolygonShape(E[list(p)]) for p in dihedral_permutations(4)]
        classes = congruence_classes_of_orbit(quads)
        assert [len(c) for c in classes] == [8]

    def test_oracle_vertex_distances(self):
        # congruent quads share the sorted multiset of vertex distances
        E = np.array([(0.4, -0.1), (0.1, 0.5), (-0.3, 0.2), (-0.2, -0.6)])
        for p in itertools.permutations(range(4)):
            Q = PolygonShape(E[list(p)])
            dist = lambda P: sorted(np.round(np.linalg.norm(
                P.vertices[:, None] - P.vertices[None], axis=2).ravel(), 9))
            if congruent(PolygonShape(E), Q):
                assert dist(PolygonShape(E)) == dist(Q)

    def test_rotation_and_mirror(self):
        E = np.array([(0.4, -0.1), (0.1, 0.5), (-0.3, 0.2), (-0.2, -0.6)])
        c, s = math.cos(1.1), math.sin(1.1)
        R = E @ np.array([[c, s], [-s, c]])
        assert congruent(E, R)
        assert congruent(E, E * np.array([1, -1]))
        assert not congruent(E, E[[0, 2, 1, 3]])


class TestTable:
    def test_counts(self, table):
        counts = {k.value: v for k, v in table.counts().items()}
        assert counts == {"convex": 32, "reflex": 32, "self_intersecting": 32}
        assert len({e.signature for e in table.entries}) == 96

    def test_permutations(self, table):
        counts = {k.value: v for k, v in table.permutation_counts().items()}
        assert counts == {"convex": 8, "reflex": 8, "self_intersecting": 8}
        classes = congruence_classes_of_orbit([p.polygon for p in table.permutation_images])
        assert sorted(len(c) for c in classes) == [8, 8, 8]
        for cls in classes:
            kinds = {table.permutation_images[k].polygon_class for k in cls}
            assert len(kinds) == 1

    def test_a3_transversal(self, table):
        poly = polygon_from_frame(table.base_representative)
        quads = [poly.permuted(p) for p in A3_TRANSVERSAL]
        assert {classify_polygon(q) for q in quads} == {
            PolygonClass.CONVEX, PolygonClass.REFLEX, PolygonClass.SELF_INTERSECTING}
        for a, b in itertools.combinations(quads, 2):
            assert not congruent(a, b)

    def test_matches_geometry(self, table, stream):
        F = sample_frames(4, stream, 20_000)
        predicted = classes_from_sign_rows(sign_arrays(F, 0.0), table.lookup())
        codes = classify_frames(F, 0.0)
        names = ("convex", "reflex", "self_intersecting")
        assert all(p.value == names[c] for p, c in zip(predicted, codes))

    def test_json(self, table):
        d = table.to_dict()
        assert len(d["cells"]) == 96 and len(d["permutations"]) == 24
        assert d["counts"] == {"convex": 32, "reflex": 32, "self_intersecting": 32}

    def test_bad_representative(self, stream):
        A = sample_frames(4, stream, 1)[0]
        while sign_signature(A, 0.0) == base_cell_signature():
            A = sample_frames(4, stream, 1)[0]
        with pytest.raises(ConsistencyError):
            build_quad_cell_table(representative=Frame.from_matrix(A))

    def test_class_constancy(self, stream):
        F = sample_frames(4, stream, 100_000)
        rows = sign_arrays(F, 0.0)
        codes = classify_frames(F, 0.0)
        seen = {}
        for key, c in zip(map(bytes, rows), codes.tolist()):
            assert seen.setdefault(key, c) == c
        assert len(seen) == 96


class TestWalls:
    def _frame(self, rows):
        return _orthonormal_rows(np.asarray(rows, dtype=float))

    def test_zero_plucker_means_parallel(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            r1, r3, r4 = rng.normal(size=(3, 2))
            A = self._frame([r1, 0.4 * r1, r3, r4])
            assert abs(plucker_from_frame(A)[0, 1]) < 1e-12
            e = polygon_from_frame(A).edges
            ang = math.atan2(e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0], e[0] @ e[1])
            assert abs(ang) < 1e-10

    def test_zero_projection_means_antiparallel(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            # columns (a, 0, c1, c2) and (0, a, c2, -c1) are orthonormal
            c = rng.normal(size=2)
            c *= rng.uniform(0.1, 0.9) / np.linalg.norm(c)
            a = math.sqrt(1 - c @ c)
            A = np.array([[a, 0], [0, a], [c[0], c[1]], [c[1], -c[0]]])
            A = Frame.from_matrix(A).rotated(rng.uniform(0, math.pi)).matrix
            assert abs((A @ A.T)[0, 1]) < 1e-12
            e = polygon_from_frame(A).edges
            ang = math.atan2(e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0], e[0] @ e[1])
            assert abs(abs(ang) - math.pi) < 1e-10

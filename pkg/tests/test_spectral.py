import math

import numpy as np
import pytest

from netred.errors import DegenerateRegime, NotSymmetric, NotUnit, SizeMismatch
from netred.graph import BlockModelParams, WsbmParams, build_block_laplacian, laplacian_from_adjacency, sample_wsbm
from netred.spectral import (Partition, laplacian_eig, partition_mismatch, sin_theta, spectral_cluster,
                             symmetric_eig, thm4_bounds)


def two_cliques(n_a=3, n_b=2):
    A = np.zeros((n_a + n_b, n_a + n_b))
    A[:n_a, :n_a] = 1.0
    A[n_a:, n_a:] = 1.0
    return laplacian_from_adjacency(A)


class TestSymmetricEig:
    def test_identity(self):
        assert np.allclose(symmetric_eig(np.eye(3)).values, [1, 1, 1])

    def test_single_edge(self):
        e = symmetric_eig(np.array([[1.0, -1.0], [-1.0, 1.0]]))
        assert np.allclose(e.values, [0, 2])
        # largest-magnitude entry (lowest index on a tie) is made nonnegative
        assert np.allclose(e.v2, np.array([1.0, -1.0]) / math.sqrt(2))

    def test_block_example(self):
        e = symmetric_eig(build_block_laplacian(BlockModelParams(3, 2, 2.0, 1.0)))
        assert np.allclose(e.values, [0, 5, 7, 8, 8])

    def test_invariants(self):
        rng = np.random.default_rng(0)
        A = rng.uniform(size=(8, 8))
        L = laplacian_from_adjacency(A + A.T)
        e = symmetric_eig(L)
        V = e.vectors
        assert np.allclose(V.T @ V, np.eye(8), atol=1e-10)
        assert np.linalg.norm(L @ V - V * e.values) <= 1e-8 * np.linalg.norm(L, 2)
        assert np.all(np.diff(e.values) >= 0)
        idx = np.argmax(np.abs(V), axis=0)
        assert np.all(V[idx, np.arange(8)] >= 0)

    def test_not_symmetric(self):
        with pytest.raises(NotSymmetric):
            symmetric_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestSpectralCluster:
    def test_two_disconnected_cliques(self):
        part = spectral_cluster(two_cliques())
        assert part.lambda2 == pytest.approx(0.0, abs=1e-12)
        assert partition_mismatch(part, ((0, 1, 2), (3, 4))) == 0

    def test_laplacian_eig_null_space_canonical(self):
        e = laplacian_eig(two_cliques(3, 3))
        assert np.allclose(e.vectors[:, 0], 1 / math.sqrt(6))
        assert abs(e.v2.sum()) < 1e-12

    def test_block_model(self):
        part = spectral_cluster(build_block_laplacian(BlockModelParams(3, 2, 2.0, 1.0)))
        assert {part.group_a, part.group_b} == {(0, 1, 2), (3, 4)}

    def test_default_wsbm_sample(self):
        w = WsbmParams.contiguous(30, 20, 0.6, 0.1, 5.0, 0.5, seed=11)
        part = spectral_cluster(sample_wsbm(w)[1])
        assert partition_mismatch(part, (tuple(range(30)), tuple(range(30, 50)))) == 0

    def test_ties_go_to_group_a(self):
        # a path 0-1-2 has Fiedler vector proportional to (1, 0, -1)
        A = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float)
        part = spectral_cluster(laplacian_from_adjacency(A))
        assert 1 in part.group_a

    def test_non_isolated_flag(self):
        L = 4 * np.eye(4) - np.ones((4, 4))
        assert not spectral_cluster(L).isolated

    def test_json_roundtrip(self):
        p = Partition((0, 2), (1,), 1.5)
        assert Partition.from_json(p.to_json()) == p


class TestSinTheta:
    def test_same(self):
        u = np.array([0.6, 0.8])
        assert sin_theta(u, u) == 0.0

    def test_orthogonal(self):
        assert sin_theta(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == pytest.approx(1.0)

    def test_thirty_degrees(self):
        v = np.array([math.cos(math.pi / 6), math.sin(math.pi / 6)])
        assert sin_theta(np.array([1.0, 0.0]), v) == pytest.approx(0.5)

    def test_sign_insensitive(self):
        v = np.array([math.cos(0.3), math.sin(0.3)])
        assert sin_theta(np.array([1.0, 0.0]), -v) == pytest.approx(math.sin(0.3))

    def test_tiny_angle_resolved(self):
        eps = 1e-10
        v = np.array([math.cos(eps), math.sin(eps)])
        assert sin_theta(np.array([1.0, 0.0]), v) == pytest.approx(eps, rel=1e-6)

    def test_not_unit(self):
        with pytest.raises(NotUnit):
            sin_theta(np.array([2.0, 0.0]), np.array([1.0, 0.0]))


class TestThm4Bounds:
    def test_direct_substitution(self):
        w = WsbmParams.contiguous(30, 20, 0.6, 0.1, 5.0, 0.5)
        b = thm4_bounds(w, 0.1)
        root = math.sqrt(50 * 0.6 * math.log(4 * 50 / 0.1))
        assert b.gamma == pytest.approx(0.1)
        assert b.lambda3_lower == pytest.approx(5 * (0.6 + 0.1 * 0.1) * 20 - 8 * 5 * root)
        assert b.sintheta_upper == pytest.approx(16 * math.sqrt(2) / (0.6 - 0.01) * root / 20)
        assert b.sintheta_upper_uncancelled == pytest.approx(b.sintheta_upper / 5.0)

    def test_q_zero(self):
        n = 100
        w = WsbmParams.contiguous(50, 50, 0.7, 0.0, 2.0, 0.5)
        root = math.sqrt(n * 0.7 * math.log(4 * n / 0.05))
        assert thm4_bounds(w, 0.05).lambda3_lower == pytest.approx(2.0 * 0.7 * n / 2 - 8 * 2.0 * root)

    def test_sintheta_shrinks_with_n(self):
        vals = [thm4_bounds(WsbmParams.contiguous(k, k, 0.6, 0.1, 5.0, 0.5), 0.1).sintheta_upper
                for k in (100, 1000, 10000)]
        assert vals[0] > vals[1] > vals[2]
        # scaling like sqrt(log n / n)
        n = np.array([200, 2000, 20000])
        ratio = np.array(vals) / np.sqrt(np.log(4 * n / 0.1) / n)
        assert np.allclose(ratio, ratio[0])

    def test_degenerate(self):
        with pytest.raises(DegenerateRegime):
            thm4_bounds(WsbmParams.contiguous(3, 2, 0.3, 0.3, 5.0, 0.5), 0.1)


class TestMismatch:
    def test_identical(self):
        p = Partition((0, 1), (2, 3), 1.0)
        assert partition_mismatch(p, ((0, 1), (2, 3))) == 0

    def test_swapped(self):
        p = Partition((0, 1), (2, 3), 1.0)
        assert partition_mismatch(p, ((2, 3), (0, 1))) == 0

    def test_one_moved(self):
        p = Partition((0, 1, 2), (3,), 1.0)
        assert partition_mismatch(p, ((0, 1), (2, 3))) == 1

    def test_size_mismatch(self):
        with pytest.raises(SizeMismatch):
            partition_mismatch(Partition((0,), (1,), 1.0), ((0, 1), (2,)))

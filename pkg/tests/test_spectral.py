import math
import random

import numpy as np
import pytest
from hypothesis import given, settings

from bispectral import spectral
from bispectral.errors import CertificateViolation, ConvergenceError, DimensionError, DomainError, PartitionError
from bispectral.bounds import phi
from bispectral.graph import (
    degree_profile,
    bipartite_sum,
    common_neighbors,
    complete_bipartite,
    empty_bipartite,
    from_biadjacency,
    is_biregular,
)
from bispectral.search import EnumerationSpec, enumerate_kpqe
from bispectral.spectral import (
    max_eigenvalue_small,
    quotient_matrix,
    scaling_certificate,
    spectral_radius,
)

from conftest import eig_rho, graphs, random_graph

RHO_K235 = math.sqrt((5 + math.sqrt(17)) / 2)  # 2x2 Gram [[3,2],[2,2]] by the quadratic formula
GOLDEN = (1 + math.sqrt(5)) / 2


class TestSpectralRadius:
    def test_complete(self):
        assert spectral_radius(complete_bipartite(2, 3)) == pytest.approx(math.sqrt(6), abs=1e-10)

    def test_empty(self):
        assert spectral_radius(empty_bipartite(2, 2)) == 0

    def test_k235(self, k235):
        assert spectral_radius(k235) == pytest.approx(RHO_K235, abs=1e-10)
        assert RHO_K235 == pytest.approx(2.135779205, abs=1e-9)

    def test_path(self, path4):
        assert spectral_radius(path4) == pytest.approx(GOLDEN, abs=1e-10)

    def test_disconnected_takes_max(self):
        g = from_biadjacency([[1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 0]])
        assert spectral_radius(g) == pytest.approx(2, abs=1e-10)

    def test_bad_tol(self, k235):
        with pytest.raises(DomainError):
            spectral_radius(k235, 0)

    def test_convergence_error(self, monkeypatch, path4):
        monkeypatch.setattr(spectral, "MAX_ITER", 2)
        with pytest.raises(ConvergenceError) as info:
            spectral_radius(bipartite_sum(path4, path4).transpose(), 1e-14)
        lo, hi = info.value.interval
        assert lo <= hi

    def test_against_eigvalsh_exhaustive(self):
        # every isomorphism class with p, q <= 4
        for p in range(1, 5):
            for q in range(1, 5):
                for e in range(p * q + 1):
                    for g in enumerate_kpqe(EnumerationSpec(p, q, e)):
                        rho = spectral_radius(g)
                        assert rho == pytest.approx(eig_rho(g), abs=1e-9)
                        left, _ = common_neighbors(g)
                        if p <= 4:
                            assert rho**2 == pytest.approx(max_eigenvalue_small(left), abs=1e-8)

    @settings(max_examples=200, deadline=None)
    @given(graphs(10, 10))
    def test_random_against_eigvalsh(self, g):
        assert spectral_radius(g) == pytest.approx(eig_rho(g), abs=1e-9)

    def test_permutation_invariant(self):
        rng = random.Random(11)
        for _ in range(50):
            g = random_graph(rng, 8, 8)
            rp = list(range(g.p))
            cp = list(range(g.q))
            rng.shuffle(rp)
            rng.shuffle(cp)
            h = from_biadjacency(g.biadjacency()[np.ix_(rp, cp)].tolist())
            assert spectral_radius(h) == pytest.approx(spectral_radius(g), abs=1e-10)

    @settings(max_examples=100, deadline=None)
    @given(graphs(6, 6))
    def test_row_sum_bound(self, g):
        a2 = g.adjacency() @ g.adjacency()
        rho = spectral_radius(g)
        assert rho**2 <= a2.sum(axis=1).max() + 1e-9
        if is_biregular(g):
            assert rho**2 == pytest.approx(a2.sum(axis=1).max(), abs=1e-8)


class TestQuotient:
    def test_complete(self):
        qm = quotient_matrix(complete_bipartite(2, 3), [[0, 1], [2, 3, 4]])
        assert qm.entries.tolist() == [[0, 3], [2, 0]] and qm.equitable

    def test_path_not_equitable(self, path4):
        qm = quotient_matrix(path4, [[0, 1], [2, 3]])
        assert qm.entries.tolist() == [[0, 1.5], [1.5, 0]] and not qm.equitable

    def test_k235_four_block(self, k235):
        qm = quotient_matrix(k235, [[0], [1], [2, 3], [4]])
        assert qm.equitable
        assert qm.entries.tolist() == [[0, 0, 2, 1], [0, 0, 2, 0], [1, 1, 0, 0], [1, 0, 0, 0]]

    def test_square(self, k235):
        qm = quotient_matrix(k235, [[0, 1], [2, 3, 4]], of="square")
        assert qm.entries[0, 0] == pytest.approx(9 / 2)

    @pytest.mark.parametrize("part", [[[0, 1], [2, 3]], [[0, 1, 2], [2, 3, 4]], [[0, 1, 2, 3, 4], []], [[0, 1, 2, 3, 5]]])
    def test_invalid(self, k235, part):
        with pytest.raises(PartitionError):
            quotient_matrix(k235, part)

    def test_inheritance(self):
        # K_{s',t'} + H with H biregular: the four-block quotient is equitable
        # and its top eigenvalue is rho
        hs = [empty_bipartite(1, 1), empty_bipartite(2, 2), from_biadjacency([[1, 0], [0, 1]]),
              from_biadjacency([[1, 1, 0], [0, 1, 1], [1, 0, 1]]), complete_bipartite(1, 2)]
        for h in hs:
            for s, t in [(1, 1), (1, 2), (2, 1), (2, 3)]:
                g = bipartite_sum(complete_bipartite(s, t), h)
                p = g.p
                blocks = [list(range(s)), list(range(s, p)), list(range(p, p + t)), list(range(p + t, p + g.q))]
                qm = quotient_matrix(g, blocks)
                assert qm.equitable
                assert max_eigenvalue_small(qm.entries) == pytest.approx(spectral_radius(g), abs=1e-9)

    def test_e_matrix(self):
        # s' = 0, t' = 1: a 6-cycle plus one right vertex joined to every left vertex
        g = from_biadjacency([[1, 1, 0, 1], [0, 1, 1, 1], [1, 0, 1, 1]])
        qm = quotient_matrix(g, [[0, 1, 2], [6], [3, 4, 5]])
        p, t_prime, d_s, d_t = 3, 1, 3, 2
        assert qm.equitable
        assert qm.entries.tolist() == [[0, t_prime, d_s - t_prime], [p, 0, 0], [d_t, 0, 0]]
        # lambda^2 = t' p + (d_s - t') d'_t = d_s d'_t + t'(p - d'_t)
        expected = math.sqrt(d_s * d_t + t_prime * (p - d_t))
        assert max_eigenvalue_small(qm.entries) == pytest.approx(expected, abs=1e-10)
        assert spectral_radius(g) == pytest.approx(expected, abs=1e-10)
        assert eig_rho(g) == pytest.approx(math.sqrt(7), abs=1e-12)
        assert phi(degree_profile(g), 1, 2).phi == pytest.approx(expected, abs=1e-12)


class TestSmallEigen:
    def test_antidiagonal(self):
        assert max_eigenvalue_small([[0, 3], [2, 0]]) == pytest.approx(math.sqrt(6), abs=1e-10)

    def test_f_matrix(self):
        f = [[0, 0, 2, 1], [0, 0, 2, 0], [1, 1, 0, 0], [1, 0, 0, 0]]
        # lambda^4 - 5 lambda^2 + 2
        assert spectral.charpoly(f) == [2, 0, -5, 0, 1]
        assert max_eigenvalue_small(f) == pytest.approx(RHO_K235, abs=1e-10)

    def test_identity(self):
        assert max_eigenvalue_small(np.eye(3)) == pytest.approx(1, abs=1e-10)
        assert max_eigenvalue_small(np.eye(6)) == pytest.approx(1, abs=1e-10)

    def test_repeated_top_root(self):
        assert max_eigenvalue_small([[2, 0], [0, 2]]) == pytest.approx(2, abs=1e-10)

    def test_too_big(self):
        with pytest.raises(DimensionError):
            max_eigenvalue_small(np.eye(9))

    def test_against_eigvalsh(self):
        rng = np.random.default_rng(5)
        for n in range(1, 9):
            for _ in range(20):
                m = rng.integers(0, 4, (n, n)).astype(float)
                m = m + m.T
                assert max_eigenvalue_small(m) == pytest.approx(np.linalg.eigvalsh(m).max(), abs=1e-8)


class TestCertificate:
    def test_path(self, path4):
        rep = scaling_certificate(path4, 2, 2)
        assert rep.phi_sq == pytest.approx((3 + math.sqrt(5)) / 2, abs=1e-12)
        assert rep.x[0] == pytest.approx(1 + 1 * (2 - 1) / (rep.phi_sq - 1))
        assert rep.verdict
        assert rep.max_row_sum == pytest.approx(rep.phi_sq, abs=1e-9)

    def test_complete(self):
        rep = scaling_certificate(complete_bipartite(2, 3), 1, 1)
        assert rep.x == () and rep.xprime == ()
        assert rep.row_sums == (6, 6, 6, 6, 6) and rep.phi_sq == pytest.approx(6)

    def test_k235(self, k235):
        rep = scaling_certificate(k235, 2, 3)
        assert rep.verdict
        assert rep.max_row_sum == pytest.approx((5 + math.sqrt(17)) / 2, abs=1e-9)
        assert all(r == pytest.approx(rep.phi_sq, abs=1e-9) for r in rep.row_sums)

    def test_degenerate_branch(self):
        # d_s = 0 with the left excess the larger one: phi^2 = e and x_k = 1
        g = from_biadjacency([[1, 1, 0], [1, 0, 0], [0, 0, 0]])
        rep = scaling_certificate(g, 3, 1)
        assert rep.phi_sq == pytest.approx(3)
        assert rep.x == (1.0, 1.0)

    def test_violation_raises(self, monkeypatch, k235):
        from bispectral import bounds

        real = bounds.phi

        def shrunk(profile, s, t):
            prm = real(profile, s, t)
            return type(prm)(**{**prm.__dict__, "phi": prm.phi * 0.9})

        monkeypatch.setattr(bounds, "phi", shrunk)
        with pytest.raises(CertificateViolation):
            scaling_certificate(k235, 2, 3)

    def test_out_of_range(self, k235):
        with pytest.raises(DomainError):
            scaling_certificate(k235, 3, 1)

    @settings(max_examples=150, deadline=None)
    @given(graphs(7, 7))
    def test_sound(self, g):
        for s in range(1, g.p + 1):
            for t in range(1, g.q + 1):
                rep = scaling_certificate(g, s, t)
                assert min(rep.x + rep.xprime, default=1) >= 1
                assert eig_rho(g) ** 2 <= rep.max_row_sum + 1e-9

    def test_loose_cell_can_reach_phi(self, path4):
        # one row can meet phi^2 on a loose cell; only tightness forces all rows
        rep = scaling_certificate(from_biadjacency([[1, 1], [0, 1]]), 1, 2)
        assert rep.phi_sq == pytest.approx(3)
        assert spectral_radius(path4) < math.sqrt(3) - 0.1
        assert rep.max_row_sum == pytest.approx(3)
        assert min(rep.row_sums) < 3

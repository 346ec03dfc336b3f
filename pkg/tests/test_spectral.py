import math
import warnings

import numpy as np
import pytest

from oracles import dense_terms, dense_text, rdm_entropy
from stabscar.errors import ResourceLimitError, SectorError, StatisticsError
from stabscar.factorize import scan_group
from stabscar.hamiltonian import CouplingScheme, HamiltonianTerms, assemble, pauli_sum
from stabscar.lattice import LatticeGeometry
from stabscar.pauli import PauliString
from stabscar.spectral import (
    FewLevelsWarning,
    SectorBasis,
    ZeroModeWarning,
    dense_matrix,
    diagonalize,
    eigenstate_entropies,
    level_statistics,
    near_zero_eigenpairs,
    reference_band,
    run_spectrum,
    scar_entropy,
    scar_overlap,
    sector_spectra,
    sparse_matrix,
    state_entropies,
    write_histogram_csv,
    write_scatter_csv,
)
from stabscar.stabilizer import StabilizerGroup, mask_from_sites

LN2 = math.log(2)


def random_terms(n, k, rng, alphabet="IXYZ"):
    out = []
    while len(out) < k:
        t = "".join(rng.choice(list(alphabet), n))
        if set(t) != {"I"}:
            out.append((float(rng.normal()), t))
    return out


def cluster_h(n, seed=1):
    grp = StabilizerGroup(
        [PauliString.from_sites(n, {k - 1: "X", k: "Z", k + 1: "X"}, sign=-1) for k in range(n)]
    )
    pairs = scan_group(grp, LatticeGeometry.chain(n), 2, 2, 2)
    return grp, assemble(pairs, CouplingScheme.uniform(0.7, 1.3, seed))


def parity_terms(n, k, rng):
    """Random strings with an even number of X/Y and of Y/Z sites."""
    out = []
    while len(out) < k:
        t = "".join(rng.choice(list("IXYZ"), n))
        p = PauliString.from_text(t)
        if not p.is_identity and p.x.bit_count() % 2 == 0 and p.z.bit_count() % 2 == 0:
            out.append((float(rng.normal()), t))
    return out


class TestDense:
    def test_zero_hamiltonian(self):
        rep = diagonalize(HamiltonianTerms(4))
        assert rep.dim == 16 and np.all(rep.eigenvalues == 0)

    def test_matrix_matches_oracle(self):
        rng = np.random.default_rng(0)
        for n in (2, 3, 4):
            items = random_terms(n, 6, rng)
            np.testing.assert_allclose(dense_matrix(pauli_sum(n, items)), dense_terms(items, n), atol=1e-13)

    def test_real_path(self):
        rng = np.random.default_rng(1)
        items = random_terms(4, 8, rng, "IXZ") + [(0.5, "YYII")]
        h = pauli_sum(4, items)
        assert h.is_real
        m = dense_matrix(h)
        assert m.dtype == np.float64
        np.testing.assert_allclose(m, dense_terms(items, 4).real, atol=1e-13)

    def test_characteristic_polynomial_oracle(self):
        """Roots of det(M - E) and power sums tr(M^k), robust to degeneracy."""
        rng = np.random.default_rng(7)
        for _ in range(5):
            items = random_terms(4, 3, rng)
            mat = dense_terms(items, 4)
            vals = diagonalize(pauli_sum(4, items)).eigenvalues
            for e in vals:
                assert np.linalg.svd(mat - e * np.eye(16), compute_uv=False)[-1] < 1e-10
            pw = np.eye(16, dtype=complex)
            for k in range(1, 17):
                pw = pw @ mat
                scale = 16 * np.max(np.abs(vals)) ** k
                assert abs(np.sum(vals**k) - np.trace(pw).real) < 1e-10 * scale

    def test_residuals(self):
        _, h = cluster_h(8)
        rep = diagonalize(h)
        mat = dense_terms([(c, p.to_text()) for c, p in h.terms], 8)
        rng = np.random.default_rng(2)
        for k in rng.choice(rep.dim, 10, replace=False):
            v = rep.eigenvectors[:, k]
            assert np.linalg.norm(mat @ v - rep.eigenvalues[k] * v) < 1e-9 * rep.width

    def test_cap(self):
        h = pauli_sum(15, [(1.0, "Z" + "I" * 14)])
        with pytest.raises(ResourceLimitError):
            dense_matrix(h)

    def test_sparse_matches_dense(self):
        rng = np.random.default_rng(4)
        h = pauli_sum(5, random_terms(5, 7, rng))
        np.testing.assert_allclose(sparse_matrix(h).toarray(), dense_matrix(h), atol=1e-13)


class TestSectors:
    def test_basis_is_projector_range(self):
        n = 4
        px_mat = dense_text("X" * n)
        pz_mat = dense_text("Z" * n)
        for px in (1, -1):
            for pz in (1, -1):
                b = SectorBasis.build(n, px, pz)
                v = b.embed(np.eye(b.dim))
                np.testing.assert_allclose(v.conj().T @ v, np.eye(b.dim), atol=1e-14)
                np.testing.assert_allclose(px_mat @ v, px * v, atol=1e-14)
                np.testing.assert_allclose(pz_mat @ v, pz * v, atol=1e-14)

    def test_block_matches_projection(self):
        rng = np.random.default_rng(5)
        items = parity_terms(6, 10, rng)
        h = pauli_sum(6, items)
        full = dense_terms(items, 6)
        for sec in ((1, 1), (-1, 1), (1, -1), (-1, -1)):
            b = SectorBasis.build(6, *sec)
            v = b.embed(np.eye(b.dim))
            np.testing.assert_allclose(dense_matrix(h, b), v.conj().T @ full @ v, atol=1e-12)

    def test_reassembly(self):
        rng = np.random.default_rng(6)
        h = pauli_sum(6, parity_terms(6, 12, rng))
        parts = np.sort(np.concatenate(list(sector_spectra(h).values())))
        np.testing.assert_allclose(parts, diagonalize(h).eigenvalues, atol=1e-9)

    def test_rejections(self):
        with pytest.raises(SectorError):
            diagonalize(pauli_sum(4, [(1.0, "XIII")]), (1, 1))
        with pytest.raises(SectorError):
            SectorBasis.build(5, 1, 1)


class TestScar:
    def test_cluster_overlap_and_entropy(self):
        grp, h = cluster_h(8)
        psi = grp.state_vector()
        rep = run_spectrum(h, psi, mask_from_sites(range(4)))
        assert rep.scar_overlap >= 1 - 1e-8
        assert scar_entropy(rep, psi, mask_from_sites(range(4))) == pytest.approx(2 * LN2, abs=1e-6)
        assert rep.overlaps_with_scar.sum() == pytest.approx(1.0, abs=1e-10)

    def test_reseeding_keeps_overlap(self):
        for seed in range(5):
            grp, h = cluster_h(6, seed=100 + seed)
            assert scar_overlap(diagonalize(h), grp.state_vector()) >= 1 - 1e-8

    def test_orthogonal_scar(self):
        h = pauli_sum(2, [(1.0, "ZI"), (0.5, "IZ")])
        rep = diagonalize(h)
        with pytest.warns(ZeroModeWarning):
            assert scar_overlap(rep, np.array([1, 0, 0, 0], dtype=complex)) == 0.0

    def test_sector_overlap(self):
        # Bell pair: XX and ZZ parities are global parities for N = 2
        h = pauli_sum(2, [(1.0, "XX"), (0.3, "ZZ")])
        phi = np.array([1, 0, 0, 1]) / math.sqrt(2)
        rep = diagonalize(h, (1, 1))
        assert rep.dim == 1 and rep.eigenvalues[0] == pytest.approx(1.3)
        assert abs(rep.full_vectors()[:, 0] @ phi) == pytest.approx(1.0)

    def test_near_zero_sparse(self):
        grp, h = cluster_h(10)
        vals, vecs, width = near_zero_eigenpairs(h, k=6)
        idx = np.flatnonzero(np.abs(vals) < 1e-8 * width)
        psi = grp.state_vector()
        assert len(idx) >= 1
        np.testing.assert_allclose(vecs.conj().T @ vecs, np.eye(6), atol=1e-10)
        ov = np.sum(np.abs(vecs[:, idx].conj().T @ psi) ** 2)
        assert 1 - 1e-8 <= ov <= 1 + 1e-10
        mat = sparse_matrix(h)
        for j in range(6):
            assert np.linalg.norm(mat @ vecs[:, j] - vals[j] * vecs[:, j]) < 1e-9 * width


class TestEntropies:
    def test_product_eigenstates_zero(self):
        h = pauli_sum(4, [(1.0, "ZIII"), (0.7, "IZII"), (0.4, "IIZI"), (0.2, "IIIZ")])
        ents = eigenstate_entropies(diagonalize(h), 0b0011)
        assert np.max(ents) < 1e-12

    def test_against_rdm_oracle(self):
        rng = np.random.default_rng(8)
        vecs = rng.normal(size=(64, 5)) + 1j * rng.normal(size=(64, 5))
        vecs /= np.linalg.norm(vecs, axis=0)
        for mask in (0b000111, 0b101010, 0b000001):
            sites = [k for k in range(6) if (mask >> k) & 1]
            got = state_entropies(vecs, mask, 6)
            ref = [rdm_entropy(vecs[:, j], sites, 6) for j in range(5)]
            np.testing.assert_allclose(got, ref, atol=1e-10)
            assert np.all(got <= min(len(sites), 6 - len(sites)) * LN2 + 1e-9)

    def test_sector_vectors_entropy(self):
        rng = np.random.default_rng(9)
        h = pauli_sum(6, parity_terms(6, 12, rng))
        rep = diagonalize(h, (1, -1))
        full = rep.full_vectors()
        np.testing.assert_allclose(eigenstate_entropies(rep, 0b111), state_entropies(full, 0b111, 6), atol=1e-12)


class TestLevelStatistics:
    def test_equal_spacing(self):
        st = level_statistics(np.arange(200.0))
        assert st.mean_r == 1.0
        np.testing.assert_allclose(st.normalized_spacings, 1.0)

    def test_window_and_errors(self):
        with pytest.raises(StatisticsError):
            level_statistics([0.0, 1.0])
        with pytest.raises(StatisticsError):
            level_statistics(np.zeros(100))
        with pytest.warns(FewLevelsWarning):
            level_statistics(np.arange(20.0))
        st = level_statistics(np.arange(100.0), window=0.5)
        assert st.n_levels == 50

    def test_invariants(self):
        rng = np.random.default_rng(10)
        st = level_statistics(np.cumsum(rng.exponential(size=500)))
        assert np.all(st.normalized_spacings >= 0)
        assert 0 <= st.mean_r <= 1
        assert st.normalized_spacings.mean() == pytest.approx(1.0)

    @pytest.mark.parametrize("ens,target", [("GOE", 0.5307), ("GUE", 0.5996), ("Poisson", 2 * LN2 - 1)])
    def test_reference_band_means(self, ens, target):
        band = reference_band(ens, 800, samples=40, seed=1)
        assert band.mean == pytest.approx(target, abs=0.01)
        assert band.contains(band.mean) and band.lo < band.hi

    def test_dense_sampler_agrees(self):
        tri = reference_band("GUE", 200, samples=40, seed=2)
        den = reference_band("GUE", 200, samples=40, seed=3, method="dense")
        assert abs(tri.mean - den.mean) < 3 * math.hypot(tri.std, den.std) / math.sqrt(40) + 0.005

    def test_bands_separate(self):
        goe = reference_band("GOE", 1000, samples=30, seed=4)
        poi = reference_band("Poisson", 1000, samples=30, seed=4)
        assert goe.lo > poi.hi


class TestCsv:
    def test_deterministic(self, tmp_path):
        grp, h = cluster_h(6, seed=3)
        psi = grp.state_vector()
        out = []
        for k in range(2):
            rep = run_spectrum(h, psi, 0b000111)
            write_scatter_csv(tmp_path / f"s{k}.csv", rep)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", FewLevelsWarning)
                write_histogram_csv(tmp_path / f"h{k}.csv", level_statistics(rep))
            out.append(((tmp_path / f"s{k}.csv").read_bytes(), (tmp_path / f"h{k}.csv").read_bytes()))
        assert out[0] == out[1]
        header = (tmp_path / "s0.csv").read_text().splitlines()[0]
        assert header == "index,energy,entropy,scar_overlap"

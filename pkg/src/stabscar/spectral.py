"""Exact diagonalization and scar diagnostics.

The dense matrix of a :class:`~stabscar.hamiltonian.HamiltonianTerms` is
built column-wise from the basis action of each Pauli string.  When every
term has an even number of ``Y`` factors the matrix is real and the real
symmetric solver is used.

Joint parity sectors of ``PX = X...X`` and ``PZ = Z...Z`` (``N`` even) use
the basis ``(|b> + px |~b>) / sqrt(2)`` where ``~b`` is the bitwise
complement, ``b`` ranges over indices whose leading bit (qubit 0) is clear
and ``(-1)**popcount(b) = pz``.

Diagnostics: projection of a scar vector onto the near-zero eigenspace,
eigenstate entanglement entropies, and level statistics (normalized
spacings, mean adjacent gap ratio) with reference bands sampled in-repo
from GOE, GUE or Poisson spectra.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg as sla

from .errors import DimensionError, ParameterError, ResourceLimitError, SectorError, StatisticsError
from .hamiltonian import HamiltonianTerms

FULL_CAP = 14
SECTOR_CAP = 16
ZERO_TOL = 1e-8

SCATTER_COLUMNS = ("index", "energy", "entropy", "scar_overlap")
HISTOGRAM_COLUMNS = ("bin_left", "bin_right", "density")


class ZeroModeWarning(UserWarning):
    """No eigenvalue fell inside the near-zero window."""


class FewLevelsWarning(UserWarning):
    """Too few levels for meaningful statistics."""


# ----------------------------------------------------------------------
# sectors


def parity_commutation(h: HamiltonianTerms) -> tuple[bool, bool]:
    """Whether ``h`` commutes with ``(PX, PZ)``."""
    cx = all(p.z.bit_count() % 2 == 0 for _, p in h.terms)
    cz = all(p.x.bit_count() % 2 == 0 for _, p in h.terms)
    return cx, cz


@dataclass(frozen=True)
class SectorBasis:
    """Orthonormal basis of the joint ``(PX, PZ) = (px, pz)`` eigenspace."""

    n_qubits: int
    px: int
    pz: int
    reps: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def build(cls, n_qubits: int, px: int, pz: int) -> "SectorBasis":
        if px not in (1, -1) or pz not in (1, -1):
            raise SectorError("parities must be +1 or -1")
        if n_qubits % 2 or n_qubits < 2:
            raise SectorError("joint parity sectors need an even number of qubits")
        half = np.arange(1 << (n_qubits - 1), dtype=np.int64)
        par = np.bitwise_count(half) & 1
        reps = half[par == (0 if pz == 1 else 1)]
        return cls(n_qubits, px, pz, reps)

    @property
    def dim(self) -> int:
        return len(self.reps)

    @property
    def label(self) -> tuple[int, int]:
        return (self.px, self.pz)

    def embed(self, vecs: np.ndarray) -> np.ndarray:
        """Full-space vectors (rows = basis index) from sector coordinates."""
        vecs = np.asarray(vecs)
        full_dim = 1 << self.n_qubits
        out = np.zeros((full_dim,) + vecs.shape[1:], dtype=np.result_type(vecs.dtype, float))
        s = 1 / math.sqrt(2)
        out[self.reps] = s * vecs
        out[self.reps ^ (full_dim - 1)] = (self.px * s) * vecs
        return out

    def project(self, psi: np.ndarray) -> np.ndarray:
        """Sector coordinates of the component of ``psi`` inside the sector."""
        psi = np.asarray(psi)
        full_dim = 1 << self.n_qubits
        return (psi[self.reps] + self.px * psi[self.reps ^ (full_dim - 1)]) / math.sqrt(2)


# ----------------------------------------------------------------------
# matrices


def _dtype(h: HamiltonianTerms, real: bool | None):
    if real is None:
        real = h.is_real
    if real and not h.is_real:
        raise ParameterError("real matrix requested for a complex Hamiltonian")
    return np.float64 if real else np.complex128


def dense_matrix(h: HamiltonianTerms, sector: SectorBasis | tuple[int, int] | None = None,
                 real: bool | None = None, cap: int | None = None) -> np.ndarray:
    """Dense matrix of ``h``, optionally in a joint parity sector.

    Raises
    ------
    ResourceLimitError
        ``N`` above ``cap`` (default 14 for the full space, 16 in a sector).
    SectorError
        ``h`` does not commute with both parity operators.
    """
    n = h.n_qubits
    basis = _as_sector(n, sector)
    limit = cap if cap is not None else (SECTOR_CAP if basis is not None else FULL_CAP)
    if n > limit:
        raise ResourceLimitError(f"dense N={n} exceeds cap {limit}")
    dtype = _dtype(h, real)
    if basis is None:
        dim = 1 << n
        cols = np.arange(dim, dtype=np.int64)
        # Fortran order lets LAPACK overwrite in place instead of copying
        mat = np.zeros((dim, dim), dtype=dtype, order="F")
        for c, p in h.terms:
            tgt, amp = p.action(cols)
            mat[tgt, cols] += c * (amp.real if dtype == np.float64 else amp)
        return mat
    cx, cz = parity_commutation(h)
    if not (cx and cz):
        raise SectorError("Hamiltonian does not commute with both parity operators")
    full = (1 << n) - 1
    msb = 1 << (n - 1)
    pos = np.full(1 << n, -1, dtype=np.int64)
    pos[basis.reps] = np.arange(basis.dim)
    mat = np.zeros((basis.dim, basis.dim), dtype=dtype, order="F")
    cols = np.arange(basis.dim)
    for c, p in h.terms:
        tgt, amp = p.action(basis.reps)
        flip = (tgt & msb) != 0
        tgt = np.where(flip, tgt ^ full, tgt)
        amp = np.where(flip, basis.px * amp, amp)
        mat[pos[tgt], cols] += c * (amp.real if dtype == np.float64 else amp)
    return mat


def _as_sector(n: int, sector) -> SectorBasis | None:
    if sector is None or isinstance(sector, SectorBasis):
        if sector is not None and sector.n_qubits != n:
            raise DimensionError("sector basis size does not match Hamiltonian")
        return sector
    px, pz = sector
    return SectorBasis.build(n, int(px), int(pz))


def sparse_matrix(h: HamiltonianTerms):
    """CSR matrix of ``h`` in the full space (no size cap)."""
    import scipy.sparse as sp

    n = h.n_qubits
    dim = 1 << n
    dtype = _dtype(h, None)
    cols = np.arange(dim, dtype=np.int64)
    rows, data = [], []
    for c, p in h.terms:
        tgt, amp = p.action(cols)
        rows.append(tgt)
        data.append(c * (amp.real if dtype == np.float64 else amp))
    if not rows:
        return sp.csr_matrix((dim, dim), dtype=dtype)
    allcols = np.tile(cols, len(rows))
    mat = sp.coo_matrix((np.concatenate(data).astype(dtype), (np.concatenate(rows), allcols)),
                        shape=(dim, dim))
    return mat.tocsr()


# ----------------------------------------------------------------------
# spectra


@dataclass(frozen=True)
class SpectrumReport:
    """Eigen-decomposition of one Hamiltonian (or one parity block).

    ``eigenvectors`` holds sector coordinates when ``basis`` is set; use
    :meth:`full_vectors` for full-space vectors.  The scar fields are
    filled by :func:`run_spectrum` and stay ``None`` otherwise.
    """

    n_qubits: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = field(default=None, repr=False)
    basis: SectorBasis | None = field(default=None, repr=False)
    scar_overlap: float | None = None
    entropies: np.ndarray | None = field(default=None, repr=False)
    overlaps_with_scar: np.ndarray | None = field(default=None, repr=False)

    @property
    def sector_label(self) -> tuple[int, int] | None:
        return None if self.basis is None else self.basis.label

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    @property
    def width(self) -> float:
        if self.dim == 0:
            return 0.0
        return float(self.eigenvalues[-1] - self.eigenvalues[0])

    def near_zero(self, zero_tol: float = ZERO_TOL) -> np.ndarray:
        """Indices with ``|E| < zero_tol * width``.

        A spectrum of zero width (e.g. the zero operator) counts every
        level with ``|E| <= zero_tol`` instead.
        """
        w = self.width
        if w > 0:
            return np.flatnonzero(np.abs(self.eigenvalues) < zero_tol * w)
        return np.flatnonzero(np.abs(self.eigenvalues) <= zero_tol)

    def _vectors(self) -> np.ndarray:
        if self.eigenvectors is None:
            raise ParameterError("eigenvectors were not retained")
        return self.eigenvectors

    def full_vectors(self, idx=None) -> np.ndarray:
        v = self._vectors()
        if idx is not None:
            v = v[:, idx]
        return v if self.basis is None else self.basis.embed(v)


def diagonalize(h: HamiltonianTerms, sector=None, eigvals_only: bool = False,
                cap: int | None = None) -> SpectrumReport:
    """Full dense eigen-decomposition, eigenvalues ascending.

    ``sector`` is ``None``, a ``(px, pz)`` pair, or a :class:`SectorBasis`.
    """
    basis = _as_sector(h.n_qubits, sector)
    mat = dense_matrix(h, basis, cap=cap)
    if eigvals_only:
        vals = sla.eigh(mat, eigvals_only=True, overwrite_a=True, check_finite=False, driver="evr")
        return SpectrumReport(h.n_qubits, np.asarray(vals), None, basis)
    vals, vecs = sla.eigh(mat, overwrite_a=True, check_finite=False, driver="evr")
    return SpectrumReport(h.n_qubits, np.asarray(vals), vecs, basis)


def _scar_coords(report: SpectrumReport, scar: np.ndarray) -> np.ndarray:
    scar = np.asarray(scar)
    if scar.shape != (1 << report.n_qubits,):
        raise DimensionError("scar vector length does not match Hamiltonian")
    return scar if report.basis is None else report.basis.project(scar)


def overlaps_with_scar(report: SpectrumReport, scar: np.ndarray) -> np.ndarray:
    """``|<v_k|scar>|^2`` for every eigenvector."""
    amps = report._vectors().conj().T @ _scar_coords(report, scar)
    return np.abs(amps) ** 2


def scar_overlap(report: SpectrumReport, scar: np.ndarray, zero_tol: float = ZERO_TOL) -> float:
    """Squared norm of the projection of ``scar`` onto the near-zero eigenspace.

    Returns 0 and emits :class:`ZeroModeWarning` when no level lies in the
    window.
    """
    idx = report.near_zero(zero_tol)
    if len(idx) == 0:
        warnings.warn("no eigenvalue in the near-zero window", ZeroModeWarning, stacklevel=2)
        return 0.0
    v = report._vectors()[:, idx]
    amps = v.conj().T @ _scar_coords(report, scar)
    return float(np.sum(np.abs(amps) ** 2))


# ----------------------------------------------------------------------
# entanglement


def _mask_sites(mask: int, n: int) -> list[int]:
    if not 0 < mask < (1 << n) - 1 and n > 1:
        raise ParameterError("bipartition mask must be a proper non-empty subset")
    if mask >> n:
        raise DimensionError("mask has sites beyond the system size")
    return [k for k in range(n) if (mask >> k) & 1]


def state_entropies(vecs: np.ndarray, mask: int, n_qubits: int, chunk: int = 256) -> np.ndarray:
    """Von Neumann entropies (nats) of full-space column vectors for the cut ``mask``."""
    vecs = np.asarray(vecs)
    single = vecs.ndim == 1
    if single:
        vecs = vecs[:, None]
    if vecs.shape[0] != 1 << n_qubits:
        raise DimensionError("vector length does not match qubit count")
    a = _mask_sites(mask, n_qubits)
    b = [k for k in range(n_qubits) if k not in a]
    da, db = 1 << len(a), 1 << len(b)
    out = np.empty(vecs.shape[1])
    for start in range(0, vecs.shape[1], chunk):
        block = vecs[:, start:start + chunk]
        m = block.shape[1]
        t = block.T.reshape((m,) + (2,) * n_qubits)
        t = t.transpose([0] + [1 + k for k in a] + [1 + k for k in b]).reshape(m, da, db)
        sv = np.linalg.svd(t, compute_uv=False)
        p = sv**2
        with np.errstate(divide="ignore", invalid="ignore"):
            ent = -np.where(p > 1e-300, p * np.log(np.where(p > 1e-300, p, 1.0)), 0.0).sum(axis=1)
        out[start:start + m] = np.maximum(ent, 0.0)
    return out[0:1] if single else out


def eigenstate_entropies(report: SpectrumReport, mask: int, chunk: int = 256) -> np.ndarray:
    """Entropy of every eigenvector for the bipartition ``mask`` (nats)."""
    vecs = report._vectors()
    out = np.empty(vecs.shape[1])
    for start in range(0, vecs.shape[1], chunk):
        stop = min(start + chunk, vecs.shape[1])
        out[start:stop] = state_entropies(report.full_vectors(slice(start, stop)), mask, report.n_qubits, chunk)
    return out


def scar_entropy(report: SpectrumReport, scar: np.ndarray, mask: int, zero_tol: float = ZERO_TOL) -> float:
    """Entropy of the scar's normalized projection onto the near-zero eigenspace."""
    idx = report.near_zero(zero_tol)
    if len(idx) == 0:
        raise StatisticsError("no near-zero eigenstate")
    v = report._vectors()[:, idx]
    proj = v @ (v.conj().T @ _scar_coords(report, scar))
    if report.basis is not None:
        proj = report.basis.embed(proj)
    nrm = np.linalg.norm(proj)
    if nrm == 0:
        raise StatisticsError("scar has no weight on the near-zero eigenspace")
    return float(state_entropies(proj / nrm, mask, report.n_qubits)[0])


# ----------------------------------------------------------------------
# level statistics


@dataclass(frozen=True)
class LevelStatistics:
    """Spacing data over the central part of a spectrum."""

    normalized_spacings: np.ndarray = field(repr=False)
    ratios: np.ndarray = field(repr=False)
    mean_r: float
    bin_edges: np.ndarray = field(repr=False)
    histogram: np.ndarray = field(repr=False)
    n_levels: int

    def rows(self) -> list[tuple[float, float, float]]:
        return [(float(a), float(b), float(d))
                for a, b, d in zip(self.bin_edges[:-1], self.bin_edges[1:], self.histogram)]


def central_window(eigenvalues: np.ndarray, window: float = 0.5) -> np.ndarray:
    """Sorted levels with the outer ``(1 - window) / 2`` fraction removed at each end."""
    if not 0 < window <= 1:
        raise ParameterError("window must lie in (0, 1]")
    e = np.sort(np.asarray(eigenvalues, dtype=float))
    cut = int(math.floor(len(e) * (1 - window) / 2))
    return e[cut:len(e) - cut]


def level_statistics(levels, window: float = 0.5, bins: int = 40,
                     hist_range: tuple[float, float] = (0.0, 4.0)) -> LevelStatistics:
    """Spacing statistics of the central ``window`` fraction of the levels.

    ``levels`` is a :class:`SpectrumReport` or an array of eigenvalues.
    Spacings are divided by their mean; ``r_i = min(s_i, s_i+1) /
    max(s_i, s_i+1)`` over consecutive pairs, skipping pairs of two exact
    zeros.

    Raises
    ------
    StatisticsError
        Fewer than 3 levels in the window, or all spacings zero.
    """
    vals = levels.eigenvalues if isinstance(levels, SpectrumReport) else levels
    e = central_window(vals, window)
    if len(e) < 3:
        raise StatisticsError(f"need at least 3 levels, got {len(e)}")
    if len(e) < 50:
        warnings.warn(f"only {len(e)} levels in the window", FewLevelsWarning, stacklevel=2)
    s = np.diff(e)
    mean = s.mean()
    if mean <= 0:
        raise StatisticsError("spectrum is fully degenerate")
    lo, hi = np.minimum(s[:-1], s[1:]), np.maximum(s[:-1], s[1:])
    keep = hi > 0
    r = lo[keep] / hi[keep]
    if len(r) == 0:
        raise StatisticsError("no non-degenerate spacing pairs")
    norm = s / mean
    hist, edges = np.histogram(norm, bins=bins, range=hist_range, density=True)
    return LevelStatistics(norm, r, float(r.mean()), edges, hist, len(e))


ENSEMBLES = ("GOE", "GUE", "Poisson")


@dataclass(frozen=True)
class ReferenceBand:
    """``mean +- width * std`` of sampled ``r`` values for one ensemble."""

    ensemble: str
    dim: int
    mean: float
    std: float
    width: float
    samples: np.ndarray = field(repr=False)

    @property
    def lo(self) -> float:
        return self.mean - self.width * self.std

    @property
    def hi(self) -> float:
        return self.mean + self.width * self.std

    def contains(self, r: float) -> bool:
        return self.lo <= r <= self.hi


def _sample_levels(ensemble: str, dim: int, rng: np.random.Generator, method: str) -> np.ndarray:
    if ensemble == "Poisson":
        return np.cumsum(rng.exponential(size=dim))
    beta = 1 if ensemble == "GOE" else 2
    if method == "dense":
        a = rng.normal(size=(dim, dim))
        if beta == 2:
            a = a + 1j * rng.normal(size=(dim, dim))
        return np.linalg.eigvalsh((a + a.conj().T) / 2)
    # tridiagonal beta-Hermite model with the same eigenvalue law
    diag = rng.normal(scale=math.sqrt(2), size=dim)
    off = np.sqrt(rng.chisquare(beta * np.arange(dim - 1, 0, -1)))
    return sla.eigvalsh_tridiagonal(diag / math.sqrt(2), off / math.sqrt(2), check_finite=False)


def reference_band(ensemble: str, dim: int, window: float = 0.5, samples: int = 100,
                   seed: int = 0, width: float = 3.0, method: str = "tridiagonal") -> ReferenceBand:
    """Sample ``samples`` spectra of size ``dim`` and summarize their mean ``r``.

    ``method`` is ``"tridiagonal"`` (fast, same joint eigenvalue law) or
    ``"dense"`` (explicit random matrices); it is ignored for Poisson.
    """
    if ensemble not in ENSEMBLES:
        raise ParameterError(f"unknown ensemble {ensemble!r}")
    if method not in ("tridiagonal", "dense"):
        raise ParameterError(f"unknown sampling method {method!r}")
    if dim < 3 or samples < 2:
        raise ParameterError("need dim >= 3 and samples >= 2")
    rng = np.random.default_rng(seed)
    rs = np.empty(samples)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FewLevelsWarning)
        for i in range(samples):
            rs[i] = level_statistics(_sample_levels(ensemble, dim, rng, method), window).mean_r
    return ReferenceBand(ensemble, dim, float(rs.mean()), float(rs.std(ddof=1)), width, rs)


# ----------------------------------------------------------------------
# near-zero eigenpairs without a dense matrix


def near_zero_eigenpairs(h: HamiltonianTerms, k: int = 8, sigma: float | None = None,
                         tol: float = 1e-12, seed: int = 0):
    """Eigenpairs of ``h`` closest to ``sigma`` by sparse shift-invert Lanczos.

    For sizes where a dense matrix does not fit.  ``sigma`` defaults to a
    tiny offset from zero so the factorization stays regular when zero is
    an exact eigenvalue.  Returns ``(values, vectors, width)`` with the
    spectral width estimated from the extremal eigenvalues.  The vectors
    are orthonormal even inside degenerate clusters.
    """
    import scipy.sparse as sp
    import scipy.sparse.linalg as spla

    mat = sparse_matrix(h).tocsc()
    dim = mat.shape[0]
    rng = np.random.default_rng(seed)
    v0 = rng.normal(size=dim)
    if sigma is None:
        sigma = 1e-3 * h.one_norm / max(len(h), 1)
    shifted = (mat - sigma * sp.identity(dim, dtype=mat.dtype, format="csc")).tocsc()
    # symmetric ordering without pivoting keeps the fill about half of the default LU
    lu = spla.splu(shifted, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                   options={"SymmetricMode": True})

    def solve(b):
        x = lu.solve(b)
        return x + lu.solve(b - shifted @ x)  # one refinement step

    opinv = spla.LinearOperator((dim, dim), matvec=solve, dtype=mat.dtype)
    vals, vecs = spla.eigsh(mat, k=k, sigma=sigma, which="LM", tol=tol, v0=v0, OPinv=opinv)
    del lu, shifted
    # shift-invert vectors need not be orthogonal inside a degenerate cluster: Rayleigh-Ritz on their span
    q, _ = np.linalg.qr(vecs)
    vals, u = np.linalg.eigh(q.conj().T @ (mat @ q))
    vecs = q @ u
    top = spla.eigsh(mat, k=1, which="LA", return_eigenvectors=False, tol=1e-6, v0=v0)[0]
    bot = spla.eigsh(mat, k=1, which="SA", return_eigenvectors=False, tol=1e-6, v0=v0)[0]
    order = np.argsort(vals)
    return vals[order], vecs[:, order], float(top - bot)


# ----------------------------------------------------------------------
# full run and CSV output


def run_spectrum(h: HamiltonianTerms, scar: np.ndarray | None = None, mask: int | None = None,
                 sector=None, zero_tol: float = ZERO_TOL) -> SpectrumReport:
    """Diagonalize and attach scar overlap, per-state overlaps and entropies."""
    rep = diagonalize(h, sector)
    ents = eigenstate_entropies(rep, mask) if mask is not None else None
    if scar is None:
        return SpectrumReport(rep.n_qubits, rep.eigenvalues, rep.eigenvectors, rep.basis, None, ents, None)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ZeroModeWarning)
        ov = scar_overlap(rep, scar, zero_tol)
    for w in caught:
        warnings.warn(w.message, w.category, stacklevel=2)
    return SpectrumReport(rep.n_qubits, rep.eigenvalues, rep.eigenvectors, rep.basis, ov, ents,
                          overlaps_with_scar(rep, scar))


def write_scatter_csv(path: str | Path, report: SpectrumReport) -> None:
    """Columns ``index, energy, entropy, scar_overlap``; missing data left blank."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SCATTER_COLUMNS)
        for i, e in enumerate(report.eigenvalues):
            ent = "" if report.entropies is None else f"{report.entropies[i]:.12e}"
            ov = "" if report.overlaps_with_scar is None else f"{report.overlaps_with_scar[i]:.12e}"
            w.writerow((i, f"{e:.12e}", ent, ov))


def write_histogram_csv(path: str | Path, stats: LevelStatistics) -> None:
    """Columns ``bin_left, bin_right, density`` of the normalized spacing histogram."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HISTOGRAM_COLUMNS)
        for a, b, d in stats.rows():
            w.writerow((f"{a:.6f}", f"{b:.6f}", f"{d:.12e}"))


def sector_spectra(h: HamiltonianTerms) -> dict[tuple[int, int], np.ndarray]:
    """Eigenvalues in each of the four joint parity sectors."""
    return {(px, pz): diagonalize(h, (px, pz), eigvals_only=True).eigenvalues
            for px in (1, -1) for pz in (1, -1)}


def expectation(h: HamiltonianTerms, psi: np.ndarray) -> float:
    return float(np.vdot(psi, h.apply(psi)).real)


def residual_norm(h: HamiltonianTerms, psi: np.ndarray) -> float:
    """Euclidean norm of ``H psi``."""
    return float(np.linalg.norm(h.apply(psi)))


__all__ = [
    "FULL_CAP", "SECTOR_CAP", "ZERO_TOL", "SectorBasis", "SpectrumReport", "LevelStatistics",
    "ReferenceBand", "ZeroModeWarning", "FewLevelsWarning", "parity_commutation", "dense_matrix",
    "sparse_matrix", "diagonalize", "scar_overlap", "overlaps_with_scar", "state_entropies",
    "eigenstate_entropies", "scar_entropy", "central_window", "level_statistics", "reference_band",
    "near_zero_eigenpairs", "run_spectrum", "write_scatter_csv", "write_histogram_csv",
    "sector_spectra", "expectation", "residual_norm",
]

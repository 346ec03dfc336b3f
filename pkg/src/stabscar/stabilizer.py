"""Stabilizer groups in tableau form.

A group on ``N`` qubits is held as ``N`` Hermitian, pairwise commuting,
GF(2)-independent generators.  Binary vectors pack a string as
``x | z << N``.  Row reduction keeps the exact product (with phase) of the
original generators that every reduced row stands for, so membership
returns the sign as well as the yes/no answer.

With ``S_A`` and ``S_B`` the subgroups supported inside ``A`` and ``B``,
``dim S_A = N - rank(G|_B)`` and the quotient ``S / (S_A x S_B)`` has
``2**(rank(G|_A) + rank(G|_B) - N)`` elements.  The entanglement entropy
is half the log of that count.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DomainError, InvalidGroupError, ParameterError, ResourceLimitError, DimensionError
from .pauli import DENSE_CAP, PauliString, reverse_bits

LN2 = math.log(2.0)


class Membership(str, enum.Enum):
    IN_GROUP = "in_group"
    IN_GROUP_NEGATED = "in_group_negated"
    NOT_IN_GROUP = "not_in_group"


def _vec(p: PauliString) -> int:
    return p.x | (p.z << p.n_qubits)


def gf2_rank(rows: Iterable[int]) -> int:
    """Rank over GF(2) of integer-packed row vectors."""
    pivots: dict[int, int] = {}
    for v in rows:
        while v:
            top = v.bit_length() - 1
            if top in pivots:
                v ^= pivots[top]
            else:
                pivots[top] = v
                break
    return len(pivots)


def _restrict(p: PauliString, mask: int) -> int:
    return (p.x & mask) | ((p.z & mask) << p.n_qubits)


@dataclass(frozen=True)
class _Row:
    vec: int
    pauli: PauliString
    combo: int  # bitmask of generator indices


class StabilizerGroup:
    """Validated stabilizer group.

    Parameters
    ----------
    generators : sequence of PauliString
        ``N`` Hermitian, commuting and independent strings on ``N`` qubits.
    declared_depth : int, optional
        Entangling Clifford depth, stored as metadata only.
    name : str
        Free-form label.
    """

    def __init__(self, generators: Sequence[PauliString], declared_depth: int | None = None,
                 name: str = ""):
        gens = tuple(generators)
        if not gens:
            raise InvalidGroupError("no generators given")
        n = gens[0].n_qubits
        if any(g.n_qubits != n for g in gens):
            raise InvalidGroupError("generators act on different numbers of qubits")
        if len(gens) != n:
            raise InvalidGroupError(f"{len(gens)} generators for {n} qubits")
        for i, g in enumerate(gens):
            if not g.is_hermitian:
                raise InvalidGroupError(f"generator {i} ({g}) is not Hermitian")
            if g.is_identity:
                raise InvalidGroupError(f"generator {i} is the identity")
        for i, j in combinations(range(n), 2):
            if not gens[i].commutes(gens[j]):
                raise InvalidGroupError(f"generators {i} ({gens[i]}) and {j} ({gens[j]}) anticommute")
        self._gens = gens
        self.n_qubits = n
        self.declared_depth = declared_depth
        self.name = name
        self._pivots = self._reduce()
        if len(self._pivots) != n:
            raise InvalidGroupError(f"generators are dependent (rank {len(self._pivots)} < {n})")

    # ------------------------------------------------------------------

    def _reduce(self) -> dict[int, _Row]:
        pivots: dict[int, _Row] = {}
        for i, g in enumerate(self._gens):
            row = _Row(_vec(g), g, 1 << i)
            while row.vec:
                top = row.vec.bit_length() - 1
                if top in pivots:
                    other = pivots[top]
                    row = _Row(row.vec ^ other.vec, row.pauli * other.pauli, row.combo ^ other.combo)
                else:
                    pivots[top] = row
                    break
        return pivots

    @property
    def generators(self) -> tuple[PauliString, ...]:
        return self._gens

    def __len__(self) -> int:
        return len(self._gens)

    def __iter__(self) -> Iterator[PauliString]:
        return iter(self._gens)

    def __repr__(self) -> str:
        tag = f" {self.name!r}" if self.name else ""
        return f"<StabilizerGroup{tag} N={self.n_qubits}>"

    def decompose(self, p: PauliString) -> tuple[int, PauliString] | None:
        """Generator subset (bitmask) whose product has ``p``'s bits, and that product."""
        if p.n_qubits != self.n_qubits:
            raise DimensionError("string size does not match group")
        v = _vec(p)
        acc = PauliString.identity(self.n_qubits)
        combo = 0
        for top in sorted(self._pivots, reverse=True):
            if (v >> top) & 1:
                row = self._pivots[top]
                v ^= row.vec
                acc = acc * row.pauli
                combo ^= row.combo
        if v:
            return None
        return combo, acc

    def membership(self, p: PauliString) -> Membership:
        if not p.is_hermitian:
            raise DomainError(f"{p} is not Hermitian")
        found = self.decompose(p)
        if found is None:
            return Membership.NOT_IN_GROUP
        _, elem = found
        return Membership.IN_GROUP if elem.phase == p.phase else Membership.IN_GROUP_NEGATED

    def contains(self, p: PauliString) -> bool:
        return p.is_hermitian and self.membership(p) is Membership.IN_GROUP

    def signed(self, p: PauliString) -> PauliString:
        """The group element with the same Pauli content as ``p``."""
        found = self.decompose(p)
        if found is None:
            raise DomainError(f"{p.unsigned()} is not in the group up to sign")
        return found[1]

    def product_of(self, indices: Iterable[int]) -> PauliString:
        acc = PauliString.identity(self.n_qubits)
        for i in indices:
            acc = acc * self._gens[i]
        return acc

    def canonical_generators(self) -> list[PauliString]:
        """Fully row-reduced generating set (unique for the group)."""
        rows = {k: r for k, r in self._pivots.items()}
        keys = sorted(rows, reverse=True)
        for k in keys:
            for j in keys:
                if j != k and (rows[j].vec >> k) & 1:
                    a, b = rows[j], rows[k]
                    rows[j] = _Row(a.vec ^ b.vec, a.pauli * b.pauli, a.combo ^ b.combo)
        return [rows[k].pauli for k in keys]

    # ------------------------------------------------------------------
    # entanglement

    def _check_mask(self, mask: int) -> int:
        full = (1 << self.n_qubits) - 1
        if mask <= 0 or mask >= full or mask & ~full:
            raise ParameterError("bipartition mask must be a non-empty proper subset")
        return full

    def cut_dimensions(self, mask: int) -> tuple[int, int, int]:
        """``(dim S_A, dim S_B, log2 |S / (S_A x S_B)|)`` for subsystem ``mask``."""
        full = self._check_mask(mask)
        r_a = gf2_rank(_restrict(g, mask) for g in self._gens)
        r_b = gf2_rank(_restrict(g, full ^ mask) for g in self._gens)
        n = self.n_qubits
        return n - r_b, n - r_a, r_a + r_b - n

    def entanglement_entropy(self, mask: int) -> float:
        """Bipartite entropy in nats for subsystem ``mask``."""
        return 0.5 * self.cut_dimensions(mask)[2] * LN2

    def entanglement_entropy_bits(self, mask: int) -> float:
        return 0.5 * self.cut_dimensions(mask)[2]

    # ------------------------------------------------------------------
    # state vector

    def _basis_reference(self) -> int:
        """A computational basis index inside the state's support."""
        n = self.n_qubits
        # Z-type subgroup: eliminate on the x part
        pivots: dict[int, PauliString] = {}
        ztype: list[PauliString] = []
        for g in self._gens:
            p = g
            while p.x:
                top = p.x.bit_length() - 1
                if top in pivots:
                    p = p * pivots[top]
                else:
                    pivots[top] = p
                    break
            if not p.x:
                ztype.append(p)
        # each Z-type element s Z^z fixes parity(z & b) = (s == -1)
        rows: dict[int, tuple[int, int]] = {}
        for p in ztype:
            v, rhs = p.z, p.phase // 2
            while v:
                top = v.bit_length() - 1
                if top in rows:
                    v ^= rows[top][0]
                    rhs ^= rows[top][1]
                else:
                    rows[top] = (v, rhs)
                    break
            else:
                if rhs:
                    raise InvalidGroupError("inconsistent Z constraints (-I in group)")
        bits = 0
        for top in sorted(rows):
            v, rhs = rows[top]
            lower = v & ~(1 << top)
            if ((lower & bits).bit_count() & 1) ^ rhs:
                bits |= 1 << top
        return reverse_bits(bits, n)

    def state_vector(self, cap: int = DENSE_CAP + 2) -> np.ndarray:
        """Dense stabilizer state with its first nonzero amplitude real positive."""
        n = self.n_qubits
        if n > cap:
            raise ResourceLimitError(f"state vector for N={n} exceeds cap {cap}")
        v = np.zeros(1 << n, dtype=np.complex128)
        v[self._basis_reference()] = 1.0
        for g in self._gens:
            v = 0.5 * (v + g.apply(v))
        nrm = np.linalg.norm(v)
        if nrm < 1e-6:
            raise InvalidGroupError("projection vanished; group is inconsistent")
        v /= nrm
        k = int(np.flatnonzero(np.abs(v) > 1e-12)[0])
        v *= abs(v[k]) / v[k]
        return v

    # ------------------------------------------------------------------
    # enumeration

    def elements(self, max_factors: int, max_weight: int | None = None) -> list[PauliString]:
        return enumerate_elements(self, max_factors, max_weight)

    def all_elements(self) -> Iterator[PauliString]:
        """Every group element, identity first, in Gray-code order."""
        acc = PauliString.identity(self.n_qubits)
        yield acc
        for k in range(1, 1 << self.n_qubits):
            flip = (k & -k).bit_length() - 1
            acc = acc * self._gens[flip]
            yield acc

    # ------------------------------------------------------------------

    def to_lines(self) -> list[str]:
        return [g.to_text() or "+" for g in self._gens]


def membership(group: StabilizerGroup, p: PauliString) -> Membership:
    return group.membership(p)


def entanglement_entropy(group: StabilizerGroup, mask: int) -> float:
    return group.entanglement_entropy(mask)


def build_state_vector(group: StabilizerGroup, cap: int = DENSE_CAP + 2) -> np.ndarray:
    return group.state_vector(cap)


def enumerate_elements(group: StabilizerGroup, max_factors: int,
                       max_weight: int | None = None) -> list[PauliString]:
    """Products of at most ``max_factors`` generators, weight-filtered and sorted.

    Independent generators give distinct products for distinct subsets, so
    no identity or duplicate can appear.
    """
    if max_factors < 1:
        raise ParameterError("max_factors must be >= 1")
    n = len(group)
    cap = n if max_weight is None else max_weight
    out: list[PauliString] = []
    gens = group.generators
    for k in range(1, min(max_factors, n) + 1):
        for idx in combinations(range(n), k):
            acc = gens[idx[0]]
            for i in idx[1:]:
                acc = acc * gens[i]
            if acc.weight <= cap:
                out.append(acc)
    out.sort(key=PauliString.sort_key)
    return out


# ----------------------------------------------------------------------
# random groups via Clifford conjugation


def conj_h(p: PauliString, a: int) -> PauliString:
    xa, za = (p.x >> a) & 1, (p.z >> a) & 1
    x = (p.x & ~(1 << a)) | (za << a)
    z = (p.z & ~(1 << a)) | (xa << a)
    return PauliString(p.n_qubits, x, z, p.phase + 2 * (xa & za))


def conj_s(p: PauliString, a: int) -> PauliString:
    xa, za = (p.x >> a) & 1, (p.z >> a) & 1
    return PauliString(p.n_qubits, p.x, p.z ^ (xa << a), p.phase + 2 * (xa & za))


def conj_cnot(p: PauliString, c: int, t: int) -> PauliString:
    xc, zc = (p.x >> c) & 1, (p.z >> c) & 1
    xt, zt = (p.x >> t) & 1, (p.z >> t) & 1
    flip = xc & zt & (xt ^ zc ^ 1)
    return PauliString(p.n_qubits, p.x ^ (xc << t), p.z ^ (zt << c), p.phase + 2 * flip)


def random_group(n: int, n_gates: int | None = None, seed: int | None = None) -> StabilizerGroup:
    """Seeded random Clifford circuit applied to ``<Z_0, ..., Z_{N-1}>``."""
    rng = np.random.default_rng(seed)
    gens = [PauliString(n, 0, 1 << k) for k in range(n)]
    n_gates = 8 * n * n if n_gates is None else n_gates
    for _ in range(n_gates):
        kind = rng.integers(3) if n > 1 else rng.integers(2)
        if kind == 0:
            a = int(rng.integers(n))
            gens = [conj_h(g, a) for g in gens]
        elif kind == 1:
            a = int(rng.integers(n))
            gens = [conj_s(g, a) for g in gens]
        else:
            c, t = (int(v) for v in rng.choice(n, 2, replace=False))
            gens = [conj_cnot(g, c, t) for g in gens]
    # random signs keep the group valid
    signs = rng.integers(2, size=n)
    gens = [g.with_phase(g.phase + 2 * int(s)) for g, s in zip(gens, signs)]
    return StabilizerGroup(gens, name=f"random(seed={seed})")


# ----------------------------------------------------------------------
# file form


def parse_generators(lines: Iterable[str]) -> list[PauliString]:
    out = []
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(PauliString.from_text(line))
    return out


def load_generators(path: str | Path, declared_depth: int | None = None) -> StabilizerGroup:
    """Read one string per line (``#`` starts a comment) and validate."""
    text = Path(path).read_text()
    return StabilizerGroup(parse_generators(text.splitlines()), declared_depth, name=Path(path).stem)


def mask_from_sites(sites: Iterable[int]) -> int:
    m = 0
    for s in sites:
        m |= 1 << s
    return m

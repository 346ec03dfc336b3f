"""Two-factor splittings ``P = P1 P2`` of stabilizer elements into local strings.

For a Hermitian string ``P`` every Hermitian ``P1`` that commutes with it
fixes ``P2 = P1 P`` uniquely (``P1**2 = 1``).  The search therefore runs
over ``P1`` only: every site within lattice distance ``l - 1`` of the
support of ``P`` is a candidate, and each candidate string is kept when
both factors are non-trivial, ``b``-body and ``l``-local.  A site outside
the support carries the same operator in both factors.

Canonical pairs carry no phase on ``P1``; the unordered pair is sorted by
:meth:`PauliString.sort_key` of the unsigned factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, DomainError
from .lattice import LatticeGeometry, SiteMap, apply_site_map, window_size, _distances
from .pauli import PauliString
from .stabilizer import Membership, StabilizerGroup, enumerate_elements

_OPS = ((1, 0), (1, 1), (0, 1))  # X, Y, Z


@dataclass(frozen=True)
class FactorizationPair:
    """``parent = p1 * p2`` with locality (``l_cert``) and body (``b_cert``) evidence.

    ``family`` and ``label`` are bookkeeping tags (coupling family and
    site label used by coupling schemes); they do not take part in
    equality.
    """

    parent: PauliString
    p1: PauliString
    p2: PauliString
    l_cert: int
    b_cert: int
    family: str = field(default="", compare=False)
    label: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.p1 * self.p2 != self.parent:
            raise DomainError(f"{self.p1} * {self.p2} != {self.parent}")
        if not (self.p1.is_hermitian and self.p2.is_hermitian):
            raise DomainError("factors must be Hermitian")

    @property
    def n_qubits(self) -> int:
        return self.parent.n_qubits

    def key(self) -> tuple:
        c = self.canonical()
        return (c.p1.x, c.p1.z, c.p1.phase, c.p2.x, c.p2.z, c.p2.phase)

    def canonical(self) -> "FactorizationPair":
        """Unsigned first factor, factors in sort order."""
        a, b = self.p1.unsigned(), self.p2.unsigned()
        if b.sort_key() < a.sort_key():
            a, b = b, a
        p2 = a * self.parent
        if (a, p2) == (self.p1, self.p2):
            return self
        return FactorizationPair(self.parent, a, p2, self.l_cert, self.b_cert, self.family, self.label)

    def with_tags(self, family: str, label: tuple = ()) -> "FactorizationPair":
        return FactorizationPair(self.parent, self.p1, self.p2, self.l_cert, self.b_cert, family, label)

    def residual(self, psi: np.ndarray) -> float:
        """Sup-norm of ``(p1 - p2) psi``."""
        return float(np.max(np.abs(self.p1.apply(psi) - self.p2.apply(psi))))

    def to_dict(self) -> dict:
        return {
            "parent": self.parent.to_text(),
            "p1": self.p1.to_text(),
            "p2": self.p2.to_text(),
            "l": self.l_cert,
            "b": self.b_cert,
            "family": self.family,
        }

    def __str__(self) -> str:
        return f"{self.parent} = ({self.p1})({self.p2})"


def make_pair(parent: PauliString | None, p1: PauliString, p2: PauliString, geom: LatticeGeometry,
              family: str = "", label: tuple = (), mode: str = "connected") -> FactorizationPair:
    """Build a pair and compute its certificates under ``geom``."""
    if parent is None:
        parent = p1 * p2
    if p1.n_qubits != geom.n_sites:
        raise DimensionError("string size does not match geometry")
    l_cert = max(window_size(geom, p1.support, mode), window_size(geom, p2.support, mode))
    b_cert = max(p1.weight, p2.weight)
    return FactorizationPair(parent, p1, p2, l_cert, b_cert, family, label)


def signed_pair(group: StabilizerGroup, p1: PauliString, p2: PauliString, geom: LatticeGeometry,
                family: str = "", label: tuple = (), mode: str = "connected") -> FactorizationPair:
    """Pair ``(p1, +-p2)`` whose product is the group element with ``p1 p2``'s content.

    The sign of ``p2`` is read off from the group, so only the operator
    content of ``p2`` matters.
    """
    if not p1.is_hermitian:
        raise DomainError(f"{p1} is not Hermitian")
    prod = p1 * p2
    if not prod.is_hermitian:
        raise DomainError(f"{p1} and {p2} anticommute")
    parent = group.signed(prod)
    return make_pair(parent, p1, p1 * parent, geom, family, label, mode)


def _region(geom: LatticeGeometry, support: Sequence[int], radius: int) -> list[int]:
    dist = _distances(geom)
    return [v for v in range(geom.n_sites) if any(0 <= dist[s][v] <= radius for s in support)]


def factorize_element(p: PauliString, geom: LatticeGeometry, l: int, b: int,
                      mode: str = "connected") -> list[FactorizationPair]:
    """All canonical (2, l, b)-factorizations of ``p`` on ``geom``."""
    if not p.is_hermitian:
        raise DomainError(f"{p} is not Hermitian")
    if p.is_identity:
        raise DomainError("identity has no non-trivial factorization")
    if p.n_qubits != geom.n_sites:
        raise DimensionError("string size does not match geometry")
    n = p.n_qubits
    if p.weight > 2 * b:
        return []
    region = _region(geom, p.sites, l - 1)
    found: dict[tuple, FactorizationPair] = {}
    for k in range(1, min(b, len(region)) + 1):
        for sites in combinations(region, k):
            smask = sum(1 << s for s in sites)
            if window_size(geom, smask, mode) > l:
                continue
            for ops in product(_OPS, repeat=k):
                x = z = 0
                for s, (xb, zb) in zip(sites, ops):
                    x |= xb << s
                    z |= zb << s
                p1 = PauliString(n, x, z)
                if not p1.commutes(p):
                    continue
                p2 = p1 * p
                if p2.is_identity or p2.weight > b:
                    continue
                if window_size(geom, p2.support, mode) > l:
                    continue
                pair = make_pair(p, p1, p2, geom, mode=mode).canonical()
                found.setdefault(pair.key(), pair)
    return sorted(found.values(), key=_pair_sort_key)


def _pair_sort_key(pair: FactorizationPair) -> tuple:
    return (pair.parent.sort_key(), pair.p1.sort_key(), pair.p2.sort_key())


def dedupe_pairs(pairs: Iterable[FactorizationPair]) -> list[FactorizationPair]:
    seen: dict[tuple, FactorizationPair] = {}
    for pair in pairs:
        seen.setdefault(pair.key(), pair)
    return sorted(seen.values(), key=_pair_sort_key)


def scan_group(group: StabilizerGroup, geom: LatticeGeometry, l: int, b: int, max_factors: int = 3,
               mode: str = "connected") -> list[FactorizationPair]:
    """Factorize every product of at most ``max_factors`` generators (weight <= 2b)."""
    if l < 1 or b < 1:
        raise ValueError("budgets must be >= 1")
    pairs: list[FactorizationPair] = []
    for elem in enumerate_elements(group, max_factors, 2 * b):
        pairs.extend(factorize_element(elem, geom, l, b, mode))
    return dedupe_pairs(pairs)


def verify_annihilator(group: StabilizerGroup, pair: FactorizationPair) -> bool:
    """True iff ``p1 p2`` is in the group with its sign, so ``(p1 - p2)|psi> = 0``."""
    prod = pair.p1 * pair.p2
    if not prod.is_hermitian:
        return False
    return group.membership(prod) is Membership.IN_GROUP


def map_pair(site_map: SiteMap, pair: FactorizationPair, geom: LatticeGeometry,
             mode: str = "connected") -> FactorizationPair:
    """Relabel sites of both factors with ``site_map`` and recertify on ``geom``."""
    return make_pair(apply_site_map(site_map, pair.parent), apply_site_map(site_map, pair.p1),
                     apply_site_map(site_map, pair.p2), geom, pair.family, pair.label, mode)

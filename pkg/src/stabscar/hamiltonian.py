"""Parent Hamiltonians ``H = sum_a J_a (P1_a - P2_a)`` built from factorization pairs.

A :class:`HamiltonianTerms` is a real linear combination of Hermitian,
non-identity Pauli strings.  Signs carried by the strings are folded into
the coefficients, duplicates are merged and terms whose coefficient
cancels below ``MERGE_TOL`` are dropped.  Hamiltonians produced by
:func:`assemble` remember the pairs and couplings they came from so that
:func:`verify_scar` can certify them without any matrix arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import DimensionError, DomainError, ParameterError
from .factorize import FactorizationPair, verify_annihilator
from .lattice import SiteMap
from .pauli import PauliString
from .stabilizer import StabilizerGroup

MERGE_TOL = 1e-12

SCHEME_KINDS = ("constant", "table", "uniform", "alternating", "per_family")


@dataclass(frozen=True)
class CouplingScheme:
    """Rule assigning a real coupling ``J`` to each factorization pair.

    Use the classmethod constructors rather than the raw fields.

    * ``constant(v)``: every pair gets ``v``.
    * ``table(mapping, default)``: lookup by ``(family, label)``, then by
      ``family``; ``default`` covers the rest (error when ``None``).
    * ``uniform(lo, hi, seed)``: independent draws, one per pair in input
      order, from a generator seeded with ``seed``.
    * ``alternating(base, parity_sign)``: ``base * parity_sign**n`` with
      ``n = label[0]`` the site label of the pair.
    * ``per_family(mapping, default)``: a sub-scheme per family; each
      sub-scheme sees only the pairs of its family, in input order.
    """

    kind: str
    value: float = 1.0
    lo: float = 0.0
    hi: float = 1.0
    seed: int | None = None
    parity_sign: int = -1
    table_: tuple = ()
    families: tuple = ()
    default: "CouplingScheme | float | None" = None

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ParameterError(f"unknown coupling scheme {self.kind!r}")
        if self.kind == "uniform" and not self.lo <= self.hi:
            raise ParameterError("uniform scheme needs lo <= hi")
        if self.kind == "alternating" and self.parity_sign not in (1, -1):
            raise ParameterError("parity_sign must be +1 or -1")

    @classmethod
    def constant(cls, value: float = 1.0) -> "CouplingScheme":
        return cls("constant", value=float(value))

    @classmethod
    def table(cls, mapping: Mapping, default: float | None = None) -> "CouplingScheme":
        items = tuple((k, float(v)) for k, v in mapping.items())
        return cls("table", table_=items, default=None if default is None else float(default))

    @classmethod
    def uniform(cls, lo: float, hi: float, seed: int | None = None) -> "CouplingScheme":
        return cls("uniform", lo=float(lo), hi=float(hi), seed=seed)

    @classmethod
    def alternating(cls, base: float, parity_sign: int = -1) -> "CouplingScheme":
        return cls("alternating", value=float(base), parity_sign=int(parity_sign))

    @classmethod
    def per_family(cls, mapping: Mapping[str, "CouplingScheme | float"],
                   default: "CouplingScheme | float | None" = None) -> "CouplingScheme":
        items = tuple((k, _as_scheme(v)) for k, v in mapping.items())
        return cls("per_family", families=items, default=None if default is None else _as_scheme(default))

    def values(self, pairs: Sequence[FactorizationPair]) -> np.ndarray:
        """Coupling for every pair, in order."""
        pairs = list(pairs)
        if self.kind == "constant":
            return np.full(len(pairs), self.value)
        if self.kind == "uniform":
            rng = np.random.default_rng(self.seed)
            return rng.uniform(self.lo, self.hi, len(pairs))
        if self.kind == "alternating":
            out = np.empty(len(pairs))
            for i, pair in enumerate(pairs):
                if not pair.label or not isinstance(pair.label[0], (int, np.integer)):
                    raise ParameterError(f"alternating scheme needs a site label on {pair}")
                out[i] = self.value * self.parity_sign ** (int(pair.label[0]) % 2)
            return out
        if self.kind == "table":
            lookup = dict(self.table_)
            out = np.empty(len(pairs))
            for i, pair in enumerate(pairs):
                for key in ((pair.family, pair.label), (pair.family, tuple(pair.label)), pair.family):
                    if key in lookup:
                        out[i] = lookup[key]
                        break
                else:
                    if self.default is None:
                        raise ParameterError(f"no coupling for family {pair.family!r} label {pair.label}")
                    out[i] = float(self.default)
            return out
        # per_family
        subs = dict(self.families)
        out = np.empty(len(pairs))
        groups: dict[str, list[int]] = {}
        for i, pair in enumerate(pairs):
            groups.setdefault(pair.family, []).append(i)
        for fam, idx in groups.items():
            sub = subs.get(fam, self.default)
            if sub is None:
                raise ParameterError(f"no coupling scheme for family {fam!r}")
            out[idx] = sub.values([pairs[i] for i in idx])
        return out

    def to_dict(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "value": self.value}
        if self.kind == "uniform":
            return {"kind": "uniform", "lo": self.lo, "hi": self.hi, "seed": self.seed}
        if self.kind == "alternating":
            return {"kind": "alternating", "base": self.value, "parity_sign": self.parity_sign}
        if self.kind == "table":
            if any(not isinstance(k, str) for k, _ in self.table_):
                raise ParameterError("only family-keyed tables serialize")
            return {"kind": "table", "table": dict(self.table_), "default": self.default}
        return {
            "kind": "per_family",
            "families": {k: v.to_dict() for k, v in self.families},
            "default": None if self.default is None else self.default.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "CouplingScheme":
        kind = data.get("kind")
        if kind == "constant":
            return cls.constant(data.get("value", 1.0))
        if kind == "uniform":
            return cls.uniform(data["lo"], data["hi"], data.get("seed"))
        if kind == "alternating":
            return cls.alternating(data.get("base", 1.0), data.get("parity_sign", -1))
        if kind == "table":
            return cls.table(data["table"], data.get("default"))
        if kind == "per_family":
            fams = {k: _scheme_from_any(v) for k, v in data["families"].items()}
            default = data.get("default")
            return cls.per_family(fams, None if default is None else _scheme_from_any(default))
        raise ParameterError(f"unknown coupling scheme {kind!r}")


def _as_scheme(v) -> CouplingScheme:
    return v if isinstance(v, CouplingScheme) else CouplingScheme.constant(v)


def _scheme_from_any(v) -> CouplingScheme:
    return CouplingScheme.from_dict(v) if isinstance(v, Mapping) else CouplingScheme.constant(v)


class HamiltonianTerms:
    """Normalized real combination of Hermitian Pauli strings.

    Parameters
    ----------
    n_qubits : int
        System size.
    terms : iterable of (float, PauliString)
        Raw terms. A ``-P`` string contributes ``-c`` to ``P``.
    source_pairs : iterable of (FactorizationPair, float)
        Provenance: the pairs and couplings the terms were assembled from.

    Raises
    ------
    DomainError
        Non-Hermitian string, complex coefficient, or an identity term.
    """

    def __init__(self, n_qubits: int, terms: Iterable[tuple[float, PauliString]] = (),
                 source_pairs: Iterable[tuple[FactorizationPair, float]] = ()):
        self.n_qubits = int(n_qubits)
        acc: dict[tuple[int, int], float] = {}
        for coeff, p in terms:
            if p.n_qubits != self.n_qubits:
                raise DimensionError(f"term {p} has {p.n_qubits} qubits, expected {self.n_qubits}")
            if not p.is_hermitian:
                raise DomainError(f"term string {p} is not Hermitian")
            c = complex(coeff)
            if c.imag != 0.0:
                raise DomainError(f"coefficient {coeff} is not real")
            c = c.real * p.sign
            if p.is_identity:
                if abs(c) > MERGE_TOL:
                    raise DomainError("identity term present; Hamiltonians must be traceless")
                continue
            acc[p.key] = acc.get(p.key, 0.0) + c
        self._terms = {k: v for k, v in acc.items() if abs(v) > MERGE_TOL}
        self.source_pairs = tuple(source_pairs)

    # -- container ------------------------------------------------------
    @property
    def terms(self) -> list[tuple[float, PauliString]]:
        """Terms sorted by string order, strings unsigned."""
        out = [(c, PauliString(self.n_qubits, x, z)) for (x, z), c in self._terms.items()]
        out.sort(key=lambda t: t[1].sort_key())
        return out

    def __iter__(self) -> Iterator[tuple[float, PauliString]]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __repr__(self) -> str:
        return f"HamiltonianTerms(n_qubits={self.n_qubits}, n_terms={len(self)})"

    def coefficient(self, p: PauliString) -> float:
        return self._terms.get(p.key, 0.0) * p.sign

    def as_dict(self) -> dict[str, float]:
        return {p.to_text(): c for c, p in self.terms}

    @property
    def has_provenance(self) -> bool:
        return bool(self.source_pairs)

    @property
    def one_norm(self) -> float:
        """Sum of absolute coefficients."""
        return float(sum(abs(c) for c in self._terms.values()))

    @property
    def coupling_norm(self) -> float:
        """Sum of ``|J|`` over the source pairs (the one-norm if there are none)."""
        if self.source_pairs:
            return float(sum(abs(j) for _, j in self.source_pairs))
        return self.one_norm

    @property
    def is_real(self) -> bool:
        """True when every matrix element is real (even number of Y's per term)."""
        return all(p.n_y % 2 == 0 for _, p in self.terms)

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other: "HamiltonianTerms") -> "HamiltonianTerms":
        if not isinstance(other, HamiltonianTerms):
            return NotImplemented
        if other.n_qubits != self.n_qubits and (self or other):
            raise DimensionError("cannot add Hamiltonians of different sizes")
        n = self.n_qubits if self else other.n_qubits
        return HamiltonianTerms(n, self.terms + other.terms, self.source_pairs + other.source_pairs)

    def __sub__(self, other: "HamiltonianTerms") -> "HamiltonianTerms":
        return self + other.scaled(-1.0)

    def scaled(self, factor: float) -> "HamiltonianTerms":
        return HamiltonianTerms(self.n_qubits, [(factor * c, p) for c, p in self.terms],
                                [(pair, factor * j) for pair, j in self.source_pairs])

    def restricted(self, mask: int) -> "HamiltonianTerms":
        """Terms whose support lies inside ``mask`` (provenance is dropped)."""
        return HamiltonianTerms(self.n_qubits, [(c, p) for c, p in self.terms if p.support & ~mask == 0])

    def apply(self, vec: np.ndarray) -> np.ndarray:
        """``H @ vec`` without building a matrix."""
        vec = np.asarray(vec)
        out = np.zeros(vec.shape, dtype=complex)
        for c, p in self.terms:
            out += c * p.apply(vec)
        return out

    # -- serialization ---------------------------------------------------
    def to_json(self) -> list[dict]:
        return [{"coeff": c, "pauli_text": p.to_text()} for c, p in self.terms]

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, data: Sequence[Mapping], n_qubits: int | None = None) -> "HamiltonianTerms":
        """Parse a ``[{coeff, pauli_text}, ...]`` list (no provenance)."""
        terms = []
        for item in data:
            try:
                c, text = item["coeff"], item["pauli_text"]
            except (KeyError, TypeError) as exc:
                raise ParameterError(f"bad Hamiltonian entry {item!r}") from exc
            if isinstance(c, (list, tuple)):
                c = complex(*c)
            terms.append((c, PauliString.from_text(text)))
        if n_qubits is None:
            if not terms:
                raise ParameterError("empty term list needs an explicit n_qubits")
            n_qubits = terms[0][1].n_qubits
        return cls(n_qubits, terms)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps() + "\n")

    @classmethod
    def load(cls, path: str | Path, n_qubits: int | None = None) -> "HamiltonianTerms":
        return cls.from_json(json.loads(Path(path).read_text()), n_qubits)


def assemble(pairs: Sequence[FactorizationPair], scheme: CouplingScheme | None = None,
             n_qubits: int | None = None) -> HamiltonianTerms:
    """``sum_a J_a (p1_a - p2_a)`` with ``J_a`` from ``scheme`` (default: all ones).

    Raises
    ------
    DimensionError
        Pairs of different sizes, or a size different from ``n_qubits``.
    """
    pairs = list(pairs)
    scheme = scheme or CouplingScheme.constant(1.0)
    sizes = {p.n_qubits for p in pairs}
    if n_qubits is not None:
        sizes.add(int(n_qubits))
    if len(sizes) > 1:
        raise DimensionError(f"pairs have mixed sizes {sorted(sizes)}")
    n = sizes.pop() if sizes else 0
    js = scheme.values(pairs)
    terms = []
    for pair, j in zip(pairs, js):
        terms.append((float(j), pair.p1))
        terms.append((-float(j), pair.p2))
    return HamiltonianTerms(n, terms, zip(pairs, (float(j) for j in js)))


@dataclass(frozen=True)
class TermCertificate:
    pair: FactorizationPair
    coupling: float
    passed: bool


@dataclass(frozen=True)
class ScarCertificate:
    """Outcome of :func:`verify_scar`.

    ``passed`` is true iff every provenance pair annihilates the state.
    Terms not explained by provenance are listed in ``unverifiable``;
    they do not fail the check, but ``fully_verified`` is then false.
    """

    entries: tuple[TermCertificate, ...]
    unverifiable: tuple[tuple[float, PauliString], ...] = field(default=())

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def fully_verified(self) -> bool:
        return self.passed and not self.unverifiable

    @property
    def failures(self) -> list[TermCertificate]:
        return [e for e in self.entries if not e.passed]

    def table(self) -> list[str]:
        rows = [f"{'ok' if e.passed else 'FAIL':4s}  J={e.coupling:+.6g}  {e.pair.p1} | {e.pair.p2}"
                for e in self.entries]
        rows += [f"??    c={c:+.6g}  {p}  (no provenance)" for c, p in self.unverifiable]
        return rows


def verify_scar(h: HamiltonianTerms, group: StabilizerGroup) -> ScarCertificate:
    """Symbolic certificate that ``h`` annihilates the stabilizer state of ``group``."""
    if h and h.n_qubits != group.n_qubits:
        raise DimensionError("Hamiltonian and group sizes differ")
    entries = []
    for pair, j in h.source_pairs:
        if pair.n_qubits != group.n_qubits:
            raise DimensionError("provenance pair size differs from group")
        entries.append(TermCertificate(pair, j, verify_annihilator(group, pair)))
    rebuilt = HamiltonianTerms(h.n_qubits, [t for pair, j in h.source_pairs
                                             for t in ((j, pair.p1), (-j, pair.p2))])
    residual = HamiltonianTerms(h.n_qubits, h.terms + [(-c, p) for c, p in rebuilt.terms])
    return ScarCertificate(tuple(entries), tuple(residual.terms))


def term_multiset_equal(a: HamiltonianTerms, b: HamiltonianTerms, tol: float = MERGE_TOL) -> bool:
    """True when both Hamiltonians have the same strings with coefficients within ``tol``."""
    if a.n_qubits != b.n_qubits and (a or b):
        return False
    da = dict((p.key, c) for c, p in a.terms)
    db = dict((p.key, c) for c, p in b.terms)
    keys = set(da) | set(db)
    return all(abs(da.get(k, 0.0) - db.get(k, 0.0)) <= tol for k in keys)


def conjugated(h: HamiltonianTerms) -> HamiltonianTerms:
    """Complex conjugate ``H*`` in the computational basis."""
    return HamiltonianTerms(h.n_qubits, [(c, p.conj()) for c, p in h.terms])


def relabeled(h: HamiltonianTerms, site_map: SiteMap | Sequence[int]) -> HamiltonianTerms:
    """``M H M`` for the qubit permutation ``M`` (qubit ``n`` moves to ``site_map(n)``)."""
    table = site_map.table if isinstance(site_map, SiteMap) else tuple(site_map)
    return HamiltonianTerms(h.n_qubits, [(c, p.permute(table)) for c, p in h.terms])


def mirror_image(h: HamiltonianTerms) -> HamiltonianTerms:
    """``-M H* M`` with the reflection ``M: n -> N-1-n``."""
    n = h.n_qubits
    return relabeled(conjugated(h), [n - 1 - k for k in range(n)]).scaled(-1.0)


def pauli_sum(n_qubits: int, items: Iterable[tuple[float, str | PauliString]]) -> HamiltonianTerms:
    """Hand-entered Hamiltonian: ``items`` of ``(coeff, text or PauliString)``."""
    return HamiltonianTerms(n_qubits, [(c, p if isinstance(p, PauliString) else PauliString.from_text(p))
                                       for c, p in items])


def site_sum(n_qubits: int, items: Iterable[tuple[float, Mapping[int, str]]]) -> HamiltonianTerms:
    """Hand-entered Hamiltonian from ``(coeff, {site: op})`` items; sites wrap mod ``n_qubits``."""
    return HamiltonianTerms(n_qubits, [(c, PauliString.from_sites(n_qubits, ops)) for c, ops in items])

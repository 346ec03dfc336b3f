"""Phase-tracked Pauli strings in symplectic (x, z) bit form.

A string on ``N`` qubits is stored as two integer bitmasks and a phase
exponent::

    P = i**phase * prod_n sigma(x_n, z_n)

with ``sigma(0,0)=I, sigma(1,0)=X, sigma(0,1)=Z, sigma(1,1)=Y``.  The
``(1, 1)`` pair decodes to the Hermitian ``Y`` itself (equivalently
``Y = i X Z``, i.e. Z applied first, then X), so a string is Hermitian
exactly when ``phase`` is 0 or 2.

Qubit ``n`` occupies bit ``n`` of the masks and character ``n`` of the text
form.  In dense matrices qubit 0 is the leftmost Kronecker factor, and the
computational basis follows ``sigma^Z |+1> = +|+1>``, i.e. ``Z = diag(1, -1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .errors import DimensionError, ParameterError, ResourceLimitError

#: largest qubit count for which dense matrices / state vectors are built
DENSE_CAP = 14

_CHAR_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_CHAR = {v: k for k, v in _CHAR_BITS.items()}
_PHASE_TOKENS = {"": 0, "+": 0, "+1": 0, "-": 2, "-1": 2, "+i": 1, "i": 1, "-i": 3}
_PHASE_PRINT = {0: "", 1: "+i", 2: "-", 3: "-i"}


def reverse_bits(mask: int, n: int) -> int:
    """Reverse the lowest ``n`` bits of ``mask``."""
    return int(format(mask, f"0{n}b")[::-1], 2) if n else 0


@dataclass(frozen=True)
class PauliString:
    """Immutable N-qubit Pauli operator ``i**phase * sigma(x, z)``."""

    n_qubits: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        if self.n_qubits < 0:
            raise ParameterError("n_qubits must be non-negative")
        full = (1 << self.n_qubits) - 1
        if self.x & ~full or self.z & ~full or self.x < 0 or self.z < 0:
            raise ParameterError("bit masks exceed n_qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    # ------------------------------------------------------------------
    # construction / text form

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n)

    @classmethod
    def from_text(cls, text: str) -> "PauliString":
        """Parse ``[+|-|+i|-i]<IXYZ...>``; a unicode minus is accepted."""
        s = text.strip().replace("−", "-")
        k = 0
        while k < len(s) and s[k] in "+-i1":
            k += 1
        token, body = s[:k], s[k:]
        if token not in _PHASE_TOKENS:
            raise ParameterError(f"bad phase token {token!r} in {text!r}")
        x = z = 0
        for n, ch in enumerate(body):
            try:
                xb, zb = _CHAR_BITS[ch]
            except KeyError:
                raise ParameterError(f"bad Pauli character {ch!r} in {text!r}") from None
            x |= xb << n
            z |= zb << n
        return cls(len(body), x, z, _PHASE_TOKENS[token])

    @classmethod
    def from_sites(cls, n: int, ops: Mapping[int, str] | Iterable[tuple[int, str]],
                   sign: int = 1) -> "PauliString":
        """Build from ``{site: 'X'|'Y'|'Z'}``; sites are taken modulo ``n``.

        Repeated sites are multiplied together in the order given, so
        ``[(0, 'X'), (0, 'Z')]`` yields ``X Z = -i Y``.
        """
        items = ops.items() if isinstance(ops, Mapping) else ops
        out = cls(n, phase=0 if sign > 0 else 2)
        for site, ch in items:
            xb, zb = _CHAR_BITS[ch]
            s = site % n
            out = out * cls(n, xb << s, zb << s)
        return out

    def to_text(self) -> str:
        chars = [_BITS_CHAR[((self.x >> n) & 1, (self.z >> n) & 1)] for n in range(self.n_qubits)]
        return _PHASE_PRINT[self.phase] + "".join(chars)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"PauliString({self.to_text()!r})"

    def op(self, site: int) -> str:
        """Single-site Pauli label at ``site``."""
        return _BITS_CHAR[((self.x >> site) & 1, (self.z >> site) & 1)]

    def ops(self) -> dict[int, str]:
        """Non-identity sites and their labels."""
        return {n: self.op(n) for n in self.sites}

    # ------------------------------------------------------------------
    # queries

    @property
    def support(self) -> int:
        """Bitmask of sites acted on non-trivially."""
        return self.x | self.z

    @cached_property
    def sites(self) -> tuple[int, ...]:
        s, out, n = self.support, [], 0
        while s:
            if s & 1:
                out.append(n)
            s >>= 1
            n += 1
        return tuple(out)

    @property
    def weight(self) -> int:
        return self.support.bit_count()

    def is_b_body(self, b: int) -> bool:
        return self.weight <= b

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def sign(self) -> int:
        """+1 or -1 for Hermitian strings."""
        if not self.is_hermitian:
            raise ValueError(f"{self} is not Hermitian")
        return 1 if self.phase == 0 else -1

    @property
    def n_y(self) -> int:
        return (self.x & self.z).bit_count()

    def unsigned(self) -> "PauliString":
        return PauliString(self.n_qubits, self.x, self.z, 0)

    def with_phase(self, phase: int) -> "PauliString":
        return PauliString(self.n_qubits, self.x, self.z, phase)

    def __neg__(self) -> "PauliString":
        return self.with_phase(self.phase + 2)

    @property
    def key(self) -> tuple[int, int]:
        """Phase-free identity of the string."""
        return (self.x, self.z)

    def sort_key(self) -> tuple:
        """Total order on strings: weight, then text, then phase."""
        return (self.weight, self.unsigned().to_text(), self.phase)

    # ------------------------------------------------------------------
    # algebra

    def _check(self, other: "PauliString"):
        if self.n_qubits != other.n_qubits:
            raise DimensionError(f"{self.n_qubits} vs {other.n_qubits} qubits")

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def commutes(self, other: "PauliString") -> bool:
        return commutes(self, other)

    def conj(self) -> "PauliString":
        """Complex conjugate in the computational basis (Y -> -Y)."""
        return self.with_phase(-self.phase + 2 * self.n_y)

    def permute(self, table: Iterable[int]) -> "PauliString":
        """Move the operator on qubit ``n`` to qubit ``table[n]``."""
        table = list(table)
        if len(table) != self.n_qubits:
            raise DimensionError("permutation length does not match qubit count")
        x = z = 0
        for n, m in enumerate(table):
            x |= ((self.x >> n) & 1) << m
            z |= ((self.z >> n) & 1) << m
        return PauliString(self.n_qubits, x, z, self.phase)

    # ------------------------------------------------------------------
    # dense representation

    @cached_property
    def index_masks(self) -> tuple[int, int]:
        """(x, z) masks in basis-index bit order (qubit 0 = most significant)."""
        return reverse_bits(self.x, self.n_qubits), reverse_bits(self.z, self.n_qubits)

    def action(self, basis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(targets, amplitudes)`` with ``P|b> = amp * |target>``."""
        xi, zi = self.index_masks
        basis = np.asarray(basis, dtype=np.int64)
        signs = 1 - 2 * (np.bitwise_count(basis & zi) & 1).astype(np.int8)
        pref = 1j ** ((self.phase + self.n_y) % 4)
        return basis ^ xi, pref * signs

    def apply(self, vec: np.ndarray) -> np.ndarray:
        """Apply to a state vector (or to the columns of a matrix)."""
        vec = np.asarray(vec)
        dim = 1 << self.n_qubits
        if vec.shape[0] != dim:
            raise DimensionError("vector length does not match qubit count")
        idx = np.arange(dim, dtype=np.int64)
        tgt, amp = self.action(idx)
        out = np.empty(vec.shape, dtype=np.result_type(vec.dtype, np.complex128))
        if vec.ndim == 1:
            out[tgt] = amp * vec
        else:
            out[tgt] = amp[:, None] * vec
        return out

    def to_dense(self, cap: int = DENSE_CAP) -> np.ndarray:
        if self.n_qubits > cap:
            raise ResourceLimitError(f"dense matrix for N={self.n_qubits} exceeds cap {cap}")
        dim = 1 << self.n_qubits
        idx = np.arange(dim, dtype=np.int64)
        tgt, amp = self.action(idx)
        mat = np.zeros((dim, dim), dtype=np.complex128)
        mat[tgt, idx] = amp
        return mat


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Exact operator product ``a @ b`` including the accumulated phase."""
    a._check(b)
    x1, z1, x2, z2 = a.x, a.z, b.x, b.z
    xo1, zo1, y1 = x1 & ~z1, z1 & ~x1, x1 & z1
    xo2, zo2, y2 = x2 & ~z2, z2 & ~x2, x2 & z2
    # XY = iZ, YZ = iX, ZX = iY and the reversed orders give -i
    plus = (xo1 & y2).bit_count() + (y1 & zo2).bit_count() + (zo1 & xo2).bit_count()
    minus = (y1 & xo2).bit_count() + (zo1 & y2).bit_count() + (xo1 & zo2).bit_count()
    return PauliString(a.n_qubits, x1 ^ x2, z1 ^ z2, a.phase + b.phase + plus - minus)


def symplectic_form(a: PauliString, b: PauliString) -> int:
    a._check(b)
    return ((a.x & b.z).bit_count() + (a.z & b.x).bit_count()) & 1


def commutes(a: PauliString, b: PauliString) -> bool:
    return symplectic_form(a, b) == 0


def weight(a: PauliString) -> int:
    return a.weight


def is_b_body(a: PauliString, b: int) -> bool:
    return a.weight <= b


def to_dense(a: PauliString, cap: int = DENSE_CAP) -> np.ndarray:
    return a.to_dense(cap)


def P(text: str) -> PauliString:
    """Shorthand for :meth:`PauliString.from_text`."""
    return PauliString.from_text(text)

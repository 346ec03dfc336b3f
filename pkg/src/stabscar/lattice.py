"""Lattice geometries, the l-locality predicate and ladder-to-chain site maps.

Sites of 2D geometries are indexed ``n = x + y * N_x``.  A support set is
*l-local* when it is contained in a connected set of at most ``l``
neighbouring lattice sites.  On a chain that is a (cyclic, if periodic)
interval of length ``l``; on the ladder and torus it is the node count of
the smallest connected subgraph (Steiner tree) spanning the support.  The
looser axis-aligned block reading is available as ``mode="block"``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

from .errors import DimensionError, ParameterError
from .pauli import PauliString

KINDS = ("chain", "ladder", "square_torus")


@dataclass(frozen=True)
class LatticeGeometry:
    kind: str
    dims: tuple[int, ...]
    periodic: tuple[bool, ...]

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown lattice kind {self.kind!r}")
        if self.kind == "chain":
            if len(self.dims) != 1 or self.dims[0] < 2:
                raise ParameterError("chain needs N >= 2")
        else:
            if len(self.dims) != 2 or min(self.dims) < 1:
                raise ParameterError("2D lattice needs (N_x, N_y)")
            if self.kind == "ladder" and self.dims[1] != 2:
                raise ParameterError("ladder needs N_y = 2")
            if self.kind == "square_torus" and not all(self.periodic):
                raise ParameterError("square_torus is periodic along both axes")
        if len(self.periodic) != len(self.dims):
            raise ParameterError("one periodic flag per axis")

    @classmethod
    def chain(cls, n: int, periodic: bool = True) -> "LatticeGeometry":
        return cls("chain", (n,), (periodic,))

    @classmethod
    def ladder(cls, nx: int, periodic: bool = True) -> "LatticeGeometry":
        return cls("ladder", (nx, 2), (periodic, False))

    @classmethod
    def torus(cls, nx: int, ny: int) -> "LatticeGeometry":
        return cls("square_torus", (nx, ny), (True, True))

    @property
    def n_sites(self) -> int:
        out = 1
        for d in self.dims:
            out *= d
        return out

    @property
    def nx(self) -> int:
        return self.dims[0]

    @property
    def ny(self) -> int:
        return self.dims[1] if len(self.dims) > 1 else 1

    def site(self, x: int, y: int = 0) -> int:
        if self.kind == "chain":
            return x % self.nx if self.periodic[0] else x
        if self.periodic[0]:
            x %= self.nx
        if self.periodic[1]:
            y %= self.ny
        if not (0 <= x < self.nx and 0 <= y < self.ny):
            raise ParameterError(f"site ({x}, {y}) outside open lattice")
        return x + y * self.nx

    def coords(self, n: int) -> tuple[int, int]:
        return n % self.nx, n // self.nx

    def neighbours(self, n: int) -> tuple[int, ...]:
        return _adjacency(self)[n]

    def to_json(self) -> dict:
        return {"kind": self.kind, "dims": list(self.dims), "periodic": list(self.periodic)}

    @classmethod
    def from_json(cls, data: dict) -> "LatticeGeometry":
        return cls(data["kind"], tuple(data["dims"]), tuple(data["periodic"]))


@lru_cache(maxsize=None)
def _adjacency(geom: LatticeGeometry) -> tuple[tuple[int, ...], ...]:
    adj: list[set[int]] = [set() for _ in range(geom.n_sites)]
    axes = [(1, 0)] if geom.kind == "chain" else [(1, 0), (0, 1)]
    for n in range(geom.n_sites):
        x, y = geom.coords(n) if geom.kind != "chain" else (n, 0)
        for dx, dy in axes:
            xx, yy = x + dx, y + dy
            ax = 0 if dx else 1
            size = geom.dims[ax]
            coord = xx if dx else yy
            if coord >= size:
                if not geom.periodic[ax] or size < 2:
                    continue
            m = geom.site(xx % geom.nx, yy % geom.ny) if geom.kind != "chain" else xx % size
            if m != n:
                adj[n].add(m)
                adj[m].add(n)
    return tuple(tuple(sorted(a)) for a in adj)


@lru_cache(maxsize=None)
def _distances(geom: LatticeGeometry) -> tuple[tuple[int, ...], ...]:
    adj = _adjacency(geom)
    out = []
    for src in range(geom.n_sites):
        dist = [-1] * geom.n_sites
        dist[src] = 0
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        out.append(tuple(dist))
    return tuple(out)


def _mask_sites(mask: int) -> list[int]:
    out, n = [], 0
    while mask:
        if mask & 1:
            out.append(n)
        mask >>= 1
        n += 1
    return out


def _cyclic_cover(coords: list[int], size: int, periodic: bool) -> int:
    """Length of the shortest (cyclic) interval containing ``coords``."""
    pts = sorted(set(coords))
    if not pts:
        return 0
    if not periodic:
        return pts[-1] - pts[0] + 1
    gaps = [b - a for a, b in zip(pts, pts[1:])] + [pts[0] + size - pts[-1]]
    return size - max(gaps) + 1


def _steiner_nodes(geom: LatticeGeometry, terminals: tuple[int, ...]) -> int:
    """Node count of the smallest connected subgraph spanning ``terminals``.

    Dreyfus-Wagner dynamic programme over terminal subsets; supports in
    this package have at most a handful of sites.
    """
    k = len(terminals)
    if k <= 1:
        return k
    dist = _distances(geom)
    if any(dist[terminals[0]][t] < 0 for t in terminals):
        return geom.n_sites + 1
    if k == 2:
        return dist[terminals[0]][terminals[1]] + 1
    nodes = range(geom.n_sites)
    inf = float("inf")
    full = (1 << k) - 1
    dp: dict[int, list[float]] = {}
    for i, t in enumerate(terminals):
        dp[1 << i] = [dist[t][v] for v in nodes]
    for size in range(2, k + 1):
        for combo in combinations(range(k), size):
            s = sum(1 << i for i in combo)
            best = [inf] * geom.n_sites
            sub = (s - 1) & s
            while sub:
                if sub < (s ^ sub):  # each unordered split once
                    a, b = dp[sub], dp[s ^ sub]
                    for v in nodes:
                        c = a[v] + b[v]
                        if c < best[v]:
                            best[v] = c
                sub = (sub - 1) & s
            final = [min(best[u] + dist[u][v] for u in nodes) for v in nodes]
            dp[s] = final
    return int(min(dp[full])) + 1


@lru_cache(maxsize=1 << 16)
def window_size(geom: LatticeGeometry, support: int, mode: str = "connected") -> int:
    """Smallest ``l`` for which ``support`` is l-local."""
    sites = _mask_sites(support)
    if not sites:
        return 0
    if geom.kind == "chain":
        return _cyclic_cover(sites, geom.nx, geom.periodic[0])
    if mode == "block":
        xs = [s % geom.nx for s in sites]
        ys = [s // geom.nx for s in sites]
        return max(_cyclic_cover(xs, geom.nx, geom.periodic[0]),
                   _cyclic_cover(ys, geom.ny, geom.periodic[1]))
    if mode != "connected":
        raise ParameterError(f"unknown locality mode {mode!r}")
    return _steiner_nodes(geom, tuple(sites))


def is_l_local(geom: LatticeGeometry, support: int | PauliString, l: int,
               mode: str = "connected") -> bool:
    """True iff the supported sites fit in a contiguous window of <= ``l`` sites."""
    if l < 1:
        raise ParameterError("l must be >= 1")
    if isinstance(support, PauliString):
        if support.n_qubits != geom.n_sites:
            raise DimensionError("string size does not match geometry")
        support = support.support
    elif support >> geom.n_sites:
        raise DimensionError("support mask exceeds geometry")
    if support.bit_count() > l:
        return False
    return window_size(geom, support, mode) <= l


# ----------------------------------------------------------------------
# site maps


@dataclass(frozen=True)
class SiteMap:
    """Permutation taking ladder site ``x + y * N_x`` to a chain position."""

    name: str
    table: tuple[int, ...]
    inverse: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        n = len(self.table)
        if sorted(self.table) != list(range(n)):
            raise ParameterError(f"site map {self.name!r} is not a bijection")
        inv = [0] * n
        for a, b in enumerate(self.table):
            inv[b] = a
        object.__setattr__(self, "inverse", tuple(inv))

    @property
    def n_sites(self) -> int:
        return len(self.table)

    def __call__(self, n: int) -> int:
        return self.table[n]

    def inverted(self) -> "SiteMap":
        return SiteMap(self.name + "_inverse", self.inverse)

    def compose(self, other: "SiteMap") -> "SiteMap":
        """``self`` after ``other``."""
        return SiteMap(f"{self.name}*{other.name}", tuple(self.table[other.table[n]] for n in range(self.n_sites)))


def _ladder_map(name: str, nx: int, fn) -> SiteMap:
    return SiteMap(name, tuple(fn(n % nx, n // nx) for n in range(2 * nx)))


def named_site_map(name: str, nx: int) -> SiteMap:
    """Ladder (N_x x 2) to chain (N = 2 N_x) maps.

    ``standard_cluster``: n = 2x + y;  ``rainbow``: n = x - 2xy + (N-1)y;
    ``antipodal``: n = x + (N/2)y;  ``thin_torus``: n = x + y N_x.
    """
    n = 2 * nx
    maps = {
        "standard_cluster": lambda x, y: 2 * x + y,
        "rainbow": lambda x, y: x - 2 * x * y + (n - 1) * y,
        "antipodal": lambda x, y: x + (n // 2) * y,
        "thin_torus": lambda x, y: x + y * nx,
    }
    if name not in maps:
        raise ParameterError(f"unknown site map {name!r}")
    return _ladder_map(name, nx, maps[name])


def apply_site_map(site_map: SiteMap, p: PauliString) -> PauliString:
    if site_map.n_sites != p.n_qubits:
        raise DimensionError("site map size does not match string")
    return p.permute(site_map.table)

"""Named stabilizer-scar models: geometry, group, factorization pairs and couplings.

Every constructor returns a :class:`ModelSpec`.  The signs of the second
factors are never typed in by hand; :func:`~stabscar.factorize.signed_pair`
reads them off the stabilizer group, so a pair is only emitted when its
product really is a group element.

Site conventions
----------------
* chains: site ``n`` with periodic wrap ``n + N = n``;
* ladder: ``x + y N_x`` with ``y in {0, 1}``;
* torus: ``x + y N_x``.

Phases ``theta`` are always indexed by the site of the model's own geometry
(for Bell states the two generators of the pair on sites ``(a, b)`` with
``a`` on the first rail carry ``theta[a]`` and ``theta[b]``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import InvalidGroupError, ParameterError
from .factorize import FactorizationPair, map_pair, signed_pair
from .hamiltonian import CouplingScheme, HamiltonianTerms, assemble, pauli_sum
from .lattice import LatticeGeometry, named_site_map
from .pauli import PauliString
from .stabilizer import Membership, StabilizerGroup, gf2_rank, mask_from_sites

LN2 = math.log(2)

_MU = ("X", "Y", "Z")


@dataclass(frozen=True)
class ModelSpec:
    """Everything needed to build and check one parent Hamiltonian.

    Attributes
    ----------
    name : str
        Registry name of the constructor.
    geometry : LatticeGeometry
    group : StabilizerGroup
        Stabilizer group of the scar state.
    pairs : tuple of FactorizationPair
        Tagged with ``family`` and ``label`` for the coupling schemes.
    default_scheme : CouplingScheme
    default_mask : int
        Subsystem ``A`` for the headline entropy.
    expected_scar_entropy : float or None
        Closed-form entropy (nats) for ``default_mask``; ``None`` when no
        closed form is claimed and the rank formula is the only answer.
    phases : dict
        Stabilizer phases and Wilson-loop signs.
    params : dict
        Constructor arguments, enough to rebuild the spec.
    """

    name: str
    geometry: LatticeGeometry
    group: StabilizerGroup
    pairs: tuple[FactorizationPair, ...]
    default_scheme: CouplingScheme
    default_mask: int
    expected_scar_entropy: float | None
    phases: dict = field(default_factory=dict, compare=False)
    params: dict = field(default_factory=dict, compare=False)

    @property
    def n_qubits(self) -> int:
        return self.group.n_qubits

    def hamiltonian(self, scheme: CouplingScheme | None = None) -> HamiltonianTerms:
        """Assemble the pairs with ``scheme`` (default scheme when omitted)."""
        return assemble(self.pairs, scheme or self.default_scheme, self.n_qubits)

    def scar_state(self) -> np.ndarray:
        return self.group.state_vector()

    def rank_entropy(self, mask: int | None = None) -> float:
        return self.group.entanglement_entropy(self.default_mask if mask is None else mask)

    def families(self) -> list[str]:
        seen: dict[str, None] = {}
        for p in self.pairs:
            seen.setdefault(p.family, None)
        return list(seen)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "params": _jsonable(self.params),
            "geometry": self.geometry.to_json(),
            "generators": self.group.to_lines(),
            "phases": _jsonable(self.phases),
            "default_scheme": self.default_scheme.to_dict(),
            "default_mask": [k for k in range(self.n_qubits) if (self.default_mask >> k) & 1],
            "expected_scar_entropy": self.expected_scar_entropy,
            "pairs": [p.to_dict() | {"label": list(p.label)} for p in self.pairs],
        }


def _jsonable(obj):
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, CouplingScheme):
        return obj.to_dict()
    return obj


# ----------------------------------------------------------------------
# helpers


def _ps(n: int, ops: Sequence[tuple[int, str]], sign: int = 1) -> PauliString:
    return PauliString.from_sites(n, list(ops), sign=sign)


def _phase_vector(theta, n: int, what: str = "theta") -> tuple[int, ...]:
    if np.isscalar(theta):
        theta = [theta] * n
    out = tuple(int(t) for t in theta)
    if len(out) != n:
        raise ParameterError(f"{what} needs {n} entries, got {len(out)}")
    if any(t not in (1, -1) for t in out):
        raise ParameterError(f"{what} entries must be +1 or -1")
    return out


def _sign(t: int) -> int:
    if t not in (1, -1):
        raise ParameterError("phases must be +1 or -1")
    return t


class _PairBuilder:
    """Collects membership-signed pairs, skipping ones that cancel identically."""

    def __init__(self, group: StabilizerGroup, geom: LatticeGeometry):
        self.group = group
        self.geom = geom
        self.n = group.n_qubits
        self.pairs: list[FactorizationPair] = []

    def add(self, p1_ops, p2_ops, family: str, label: tuple) -> None:
        p1, p2 = _ps(self.n, p1_ops), _ps(self.n, p2_ops)
        if p1.unsigned() == p2.unsigned():
            return
        self.pairs.append(signed_pair(self.group, p1, p2, self.geom, family, label))


def _first_half(n: int) -> int:
    return mask_from_sites(range(n // 2))


def _uniform_per_family(families: Sequence[str], lo: float, hi: float, seed: int,
                        overrides: Mapping[str, tuple[float, float]] | None = None) -> CouplingScheme:
    overrides = overrides or {}
    subs = {}
    for k, fam in enumerate(families):
        a, b = overrides.get(fam, (lo, hi))
        subs[fam] = CouplingScheme.uniform(a, b, seed=int(seed) * 1000 + k)
    return CouplingScheme.per_family(subs)


# ----------------------------------------------------------------------
# cluster chain


def cluster_group(n: int, theta=-1) -> StabilizerGroup:
    th = _phase_vector(theta, n)
    return StabilizerGroup(
        [_ps(n, [(k - 1, "X"), (k, "Z"), (k + 1, "X")], th[k]) for k in range(n)], name="cluster"
    )


def cluster_chain(n: int, theta=-1, seed: int = 0) -> ModelSpec:
    """Periodic 1D cluster state with its four 2-local, 2-body families.

    ``omega``: ``X_{n-1} | Z_n X_{n+1}``; ``omegap``: ``X_{n+1} | X_{n-1} Z_n``;
    ``J``: ``X_{n-1} Y_n | Y_{n+1} X_{n+2}``; ``Jp``: ``X_{n-2} Z_{n-1} | Z_{n+1} X_{n+2}``.
    """
    if n < 4:
        raise ParameterError("cluster chain needs N >= 4")
    geom = LatticeGeometry.chain(n)
    group = cluster_group(n, theta)
    b = _PairBuilder(group, geom)
    for k in range(n):
        b.add([(k - 1, "X")], [(k, "Z"), (k + 1, "X")], "omega", (k,))
        b.add([(k + 1, "X")], [(k - 1, "X"), (k, "Z")], "omegap", (k,))
        b.add([(k - 1, "X"), (k, "Y")], [(k + 1, "Y"), (k + 2, "X")], "J", (k,))
        b.add([(k - 2, "X"), (k - 1, "Z")], [(k + 1, "Z"), (k + 2, "X")], "Jp", (k,))
    return ModelSpec(
        "cluster", geom, group, tuple(b.pairs),
        CouplingScheme.uniform(0.7, 1.3, seed), _first_half(n), 2 * LN2,
        {"theta": _phase_vector(theta, n)}, {"n": n, "theta": theta, "seed": seed},
    )


# ----------------------------------------------------------------------
# toric code


def _pick_independent(ops: Sequence[PauliString], target: int) -> list[int]:
    n = ops[0].n_qubits
    chosen: list[int] = []
    rows: list[int] = []
    for i, op in enumerate(ops):
        vec = (op.x << n) | op.z
        if gf2_rank(rows + [vec]) > len(rows):
            rows.append(vec)
            chosen.append(i)
            if len(chosen) == target:
                break
    return chosen


def _checked_group(square_ops: Sequence[PauliString], extra: Sequence[PauliString],
                   name: str) -> StabilizerGroup:
    """Greedy independent subset of ``square_ops`` plus ``extra``; all ops must be members."""
    n = square_ops[0].n_qubits
    idx = _pick_independent(square_ops, n - len(extra))
    try:
        group = StabilizerGroup([square_ops[i] for i in idx] + list(extra), name=name)
    except InvalidGroupError as exc:
        raise InvalidGroupError(f"{name}: vertex/plaquette set plus Wilson loops has no full rank ({exc})")
    for op in square_ops:
        if group.membership(op) is not Membership.IN_GROUP:
            raise ParameterError(f"{name}: phase field is inconsistent ({op} is not a stabilizer)")
    return group


def toric_square_ops(nx: int, ny: int, theta) -> list[PauliString]:
    """``theta_{x,y}`` times ``X^4`` for ``x + y`` even, ``Y^4`` for odd, on the square at ``(x, y)``."""
    geom = LatticeGeometry.torus(nx, ny)
    n = nx * ny
    th = _phase_vector(theta, n)
    out = []
    for y in range(ny):
        for x in range(nx):
            mu = "X" if (x + y) % 2 == 0 else "Y"
            sites = [geom.site(x, y), geom.site(x + 1, y), geom.site(x, y + 1), geom.site(x + 1, y + 1)]
            out.append(_ps(n, [(s, mu) for s in sites], th[geom.site(x, y)]))
    return out


TORIC_WILSON = ("row_column", "crossing")


def toric_code(nx: int, ny: int, theta=-1, theta_w1: int = 1, theta_w2: int = 1,
               seed: int | None = None, wilson: str = "row_column") -> ModelSpec:
    """Toric code state on an ``N_x x N_y`` torus and its XY parent Hamiltonian.

    Pair families, for the square at ``(x, y)``: ``JX`` / ``JY`` pair the two
    horizontal bonds, ``JtX`` / ``JtY`` the two vertical bonds (X squares at
    even ``x + y``, Y squares at odd).  The default couplings are all 1; pass
    ``seed`` for independent draws from ``[0.7, 1.3]``.

    ``wilson`` selects the two loops that complete the generator set:
    ``"row_column"`` uses a Z row (``y = 0``) and a Z column (``x = 0``);
    ``"crossing"`` uses Z and X strings on column 0, both of which cross
    the half-torus cut.  The resulting states are all annihilated by the
    same Hamiltonian but differ in half-torus entropy:
    ``(N_x - 1) ln 2`` for row/column loops and ``N_x ln 2`` for
    crossing loops.
    """
    if wilson not in TORIC_WILSON:
        raise ParameterError(f"wilson must be one of {TORIC_WILSON}")
    if nx < 2 or ny < 2 or nx % 2 or ny % 2:
        raise ParameterError("toric code needs even N_x, N_y >= 2")
    geom = LatticeGeometry.torus(nx, ny)
    n = nx * ny
    th = _phase_vector(theta, n)
    squares = toric_square_ops(nx, ny, th)
    if wilson == "row_column":
        w1 = _ps(n, [(geom.site(x, 0), "Z") for x in range(nx)], _sign(theta_w1))
    else:
        w1 = _ps(n, [(geom.site(0, y), "X") for y in range(ny)], _sign(theta_w1))
    w2 = _ps(n, [(geom.site(0, y), "Z") for y in range(ny)], _sign(theta_w2))
    group = _checked_group(squares, [w1, w2], "toric")
    b = _PairBuilder(group, geom)
    for y in range(ny):
        for x in range(nx):
            mu = "X" if (x + y) % 2 == 0 else "Y"
            s = [geom.site(x, y), geom.site(x + 1, y), geom.site(x, y + 1), geom.site(x + 1, y + 1)]
            b.add([(s[0], mu), (s[1], mu)], [(s[2], mu), (s[3], mu)], "J" + mu, (x, y))
            b.add([(s[0], mu), (s[2], mu)], [(s[1], mu), (s[3], mu)], "Jt" + mu, (x, y))
    mask = mask_from_sites(geom.site(x, y) for y in range(ny // 2) for x in range(nx))
    expected = None
    if ny >= 4:
        expected = (nx - 1) * LN2 if wilson == "row_column" else nx * LN2
    scheme = CouplingScheme.constant(1.0) if seed is None else CouplingScheme.uniform(0.7, 1.3, seed)
    return ModelSpec(
        "toric", geom, group, tuple(b.pairs), scheme, mask, expected,
        {"theta": th, "theta_w1": theta_w1, "theta_w2": theta_w2},
        {"nx": nx, "ny": ny, "theta": theta, "theta_w1": theta_w1, "theta_w2": theta_w2, "seed": seed,
         "wilson": wilson},
    )


# ----------------------------------------------------------------------
# antipodal toric code


def atc_square_ops(nx: int, theta=1) -> list[PauliString]:
    """Chain-indexed thin-torus squares: sites ``n, n+1, n+N_x, n+N_x+1``; X for even ``n``."""
    n = 2 * nx
    th = _phase_vector(theta, n)
    return [
        _ps(n, [(s, "X" if k % 2 == 0 else "Y") for s in (k, k + 1, k + nx, k + nx + 1)], th[k])
        for k in range(n)
    ]


def atc(nx: int, ranges: Sequence[int] = (1,), include_wilson_terms: bool = False, theta=1,
        theta_w1: int = 1, theta_w2: int = 1, couplings: Mapping | None = None) -> ModelSpec:
    """Antipodal toric code on the chain ``N = 2 N_x`` (``N_x`` odd).

    For every interaction range ``l`` in ``ranges`` and ``n < N_x`` the
    families ``XX_l{l}``, ``YY_l{l}``, ``ZZ_l{l}`` pair
    ``s_n s_{n+l}`` with ``s_{n+N_x} s_{n+N_x+l}``.  The Wilson-loop
    families (opt-in) are ``hZ`` (``Z_n | Z_{n+N_x}``) and ``XY_l{l}`` /
    ``YX_l{l}`` (``X_n Y_{n+l} | X_{n+N_x} Y_{n+N_x+l}`` and the mirrored
    ordering).

    ``couplings`` maps a family name to a base value (default: ``1/l`` for
    XX, ``0.8/l`` for YY, ``0.6/l`` for ZZ, ``0.5`` for the Wilson
    families); every family uses the alternating ``(-1)^n`` scheme.
    """
    if nx < 3 or nx % 2 == 0:
        raise ParameterError("ATC needs odd N_x >= 3")
    n = 2 * nx
    ranges = sorted({int(l) for l in ranges})
    if any(l < 1 or l > nx for l in ranges):
        raise ParameterError(f"interaction ranges must lie in 1..{nx}")
    geom = LatticeGeometry.chain(n)
    th = _phase_vector(theta, n)
    w1 = _ps(n, [(k, "Z") for k in range(nx)], _sign(theta_w1))
    w2 = _ps(n, [(0, "Z"), (nx, "Z")], _sign(theta_w2))
    group = _checked_group(atc_square_ops(nx, th), [w1, w2], "atc")
    b = _PairBuilder(group, geom)
    defaults: dict[str, float] = {}
    for l in ranges:
        for mu, scale in zip(_MU, (1.0, 0.8, 0.6)):
            fam = f"{mu}{mu}_l{l}"
            defaults[fam] = scale / l
            for k in range(nx):
                b.add([(k, mu), (k + l, mu)], [(k + nx, mu), (k + nx + l, mu)], fam, (k,))
    if include_wilson_terms:
        defaults["hZ"] = 0.5
        for k in range(nx):
            b.add([(k, "Z")], [(k + nx, "Z")], "hZ", (k,))
        for l in ranges:
            defaults[f"XY_l{l}"] = defaults[f"YX_l{l}"] = 0.5
            for k in range(nx):
                b.add([(k, "X"), (k + l, "Y")], [(k + nx, "X"), (k + nx + l, "Y")], f"XY_l{l}", (k,))
                b.add([(k, "Y"), (k + l, "X")], [(k + nx, "Y"), (k + nx + l, "X")], f"YX_l{l}", (k,))
    values = dict(defaults)
    for k, v in (couplings or {}).items():
        if k not in values:
            raise ParameterError(f"unknown ATC family {k!r}")
        values[k] = v
    scheme = CouplingScheme.per_family(
        {k: v if isinstance(v, CouplingScheme) else CouplingScheme.alternating(v) for k, v in values.items()}
    )
    return ModelSpec(
        "atc", geom, group, tuple(b.pairs), scheme, _first_half(n), 0.5 * (n - 2) * LN2,
        {"theta": th, "theta_w1": theta_w1, "theta_w2": theta_w2},
        {"nx": nx, "ranges": ranges, "include_wilson_terms": include_wilson_terms, "theta": theta,
         "theta_w1": theta_w1, "theta_w2": theta_w2, "couplings": dict(couplings or {})},
    )


# ----------------------------------------------------------------------
# product state


PRODUCT_LOCAL_FAMILIES = tuple(
    [f"omega_{mu}{s}" for mu in _MU for s in "+-"] + ["J", "Jp"] + [f"lambda_{mu}" for mu in _MU]
)
PRODUCT_LONG_FAMILIES = ("eta", "gamma", "xi")
PRODUCT_REGIMES = ("generic", "disordered")


def product_group(n: int, theta=1) -> StabilizerGroup:
    th = _phase_vector(theta, n)
    return StabilizerGroup([_ps(n, [(k, "Z")], th[k]) for k in range(n)], name="product")


def product_state(n: int, theta=1, regime: str = "generic", seed: int = 0) -> ModelSpec:
    """Product state ``<theta_n Z_n>`` with the full table of two-factor families.

    Local families (label ``(n,)``): ``omega_{mu}{+-}`` (``s_n | Z_{n+-1} s_n``),
    ``J`` (``XX | YY``), ``Jp`` (``XY | YX``), ``lambda_{mu}``
    (``Z_{n-1} s_n | s_n Z_{n+1}``).  Long-range families (label
    ``(n, n')``): ``eta`` (``Z_n | Z_{n'}``), ``gamma``
    (``Z_n | Z_{n'} Z_{n'+1}``), ``xi`` (``Z_n Z_{n+1} | Z_{n'} Z_{n'+1}``
    on four distinct sites).

    Regimes: ``generic`` draws local couplings from ``[0.7, 1.3]`` and
    long-range ones from ``[0.7/N, 1.3/N]``; ``disordered`` draws ``eta``
    and ``gamma`` from ``[-4, 4]`` instead.
    """
    if n < 3:
        raise ParameterError("product state needs N >= 3")
    if regime not in PRODUCT_REGIMES:
        raise ParameterError(f"regime must be one of {PRODUCT_REGIMES}")
    geom = LatticeGeometry.chain(n)
    group = product_group(n, theta)
    b = _PairBuilder(group, geom)
    for k in range(n):
        for mu in _MU:
            b.add([(k, mu)], [(k + 1, "Z"), (k, mu)], f"omega_{mu}+", (k,))
            b.add([(k, mu)], [(k - 1, "Z"), (k, mu)], f"omega_{mu}-", (k,))
    for k in range(n):
        b.add([(k, "X"), (k + 1, "X")], [(k, "Y"), (k + 1, "Y")], "J", (k,))
        b.add([(k, "X"), (k + 1, "Y")], [(k, "Y"), (k + 1, "X")], "Jp", (k,))
    for k in range(n):
        for mu in _MU:
            b.add([(k - 1, "Z"), (k, mu)], [(k, mu), (k + 1, "Z")], f"lambda_{mu}", (k,))
    for k in range(n):
        for q in range(n):
            if q != k:
                b.add([(k, "Z")], [(q, "Z")], "eta", (k, q))
    for k in range(n):
        for q in range(n):
            if k not in (q, (q + 1) % n):
                b.add([(k, "Z")], [(q, "Z"), (q + 1, "Z")], "gamma", (k, q))
    for k in range(n):
        for q in range(n):
            if len({k, (k + 1) % n, q, (q + 1) % n}) == 4:
                b.add([(k, "Z"), (k + 1, "Z")], [(q, "Z"), (q + 1, "Z")], "xi", (k, q))
    long = (0.7 / n, 1.3 / n)
    over = {f: long for f in PRODUCT_LONG_FAMILIES}
    if regime == "disordered":
        over["eta"] = over["gamma"] = (-4.0, 4.0)
    scheme = _uniform_per_family(PRODUCT_LOCAL_FAMILIES + PRODUCT_LONG_FAMILIES, 0.7, 1.3, seed, over)
    return ModelSpec(
        "product", geom, group, tuple(b.pairs), scheme, _first_half(n), 0.0,
        {"theta": _phase_vector(theta, n)}, {"n": n, "theta": theta, "regime": regime, "seed": seed},
    )


def product_grouped(spec: ModelSpec, scheme: CouplingScheme | None = None) -> HamiltonianTerms:
    """Grouped form of the product-state Hamiltonian at ``theta = +1``.

    Long-range couplings are collected into a field and a ZZ bond,
    ``h_n = sum_{n'} (eta_{n,n'} - eta_{n',n} + gamma_{n,n'})`` and
    ``J^Z_n = sum_{n'} (xi_{n,n'} - xi_{n',n} - gamma_{n',n})``; the local
    families are kept pair by pair.
    """
    if spec.name != "product" or any(t != 1 for t in spec.phases["theta"]):
        raise ParameterError("grouped form is defined for the product state with theta = +1")
    n = spec.n_qubits
    js = (scheme or spec.default_scheme).values(spec.pairs)
    h = np.zeros(n)
    jz = np.zeros(n)
    local = []
    for pair, j in zip(spec.pairs, js):
        if pair.family == "eta":
            a, q = pair.label
            h[a] += j
            h[q] -= j
        elif pair.family == "gamma":
            a, q = pair.label
            h[a] += j
            jz[q] -= j
        elif pair.family == "xi":
            a, q = pair.label
            jz[a] += j
            jz[q] -= j
        else:
            local.append((j, pair))
    items = [(h[k], _ps(n, [(k, "Z")])) for k in range(n)]
    items += [(jz[k], _ps(n, [(k, "Z"), (k + 1, "Z")])) for k in range(n)]
    for j, pair in local:
        items += [(j, pair.p1), (-j, pair.p2)]
    return pauli_sum(n, items)


# ----------------------------------------------------------------------
# products of Bell pairs


BELL_VARIANTS = ("ladder", "rainbow", "antipodal")
BELL_COMBOS = tuple(a + b for a in _MU for b in _MU)


def bell_group(rungs: Sequence[tuple[int, int]], n: int, theta) -> StabilizerGroup:
    """``theta_a X_a X_b`` and ``theta_b Z_a Z_b`` for every pair ``(a, b)``."""
    th = _phase_vector(theta, n)
    gens = []
    for a, c in rungs:
        gens.append(_ps(n, [(a, "X"), (c, "X")], th[a]))
        gens.append(_ps(n, [(a, "Z"), (c, "Z")], th[c]))
    return StabilizerGroup(gens, name="bell")


def _ladder_bell_pairs(nx: int, group: StabilizerGroup, geom: LatticeGeometry,
                       nxt: Callable[[int, int], int]) -> list[FactorizationPair]:
    """Field, rung-rung and rail families; ``nxt(x, y)`` is the rail-``y`` neighbour of ``(x, y)``."""
    b = _PairBuilder(group, geom)
    for x in range(nx):
        for mu in _MU:
            b.add([(x, mu)], [(x + nx, mu)], "h" + mu, (x,))
    for x in range(nx):
        r0 = (x, x + nx)
        r1 = (nxt(x, 0), nxt(x, 1))
        for mu, nu in BELL_COMBOS:
            b.add([(r0[0], mu), (r0[1], mu)], [(r1[0], nu), (r1[1], nu)], "J_" + mu + nu, (x,))
    for x in range(nx):
        for mu, nu in BELL_COMBOS:
            b.add([(x, mu), (nxt(x, 0), nu)], [(x + nx, mu), (nxt(x, 1), nu)], "Jt_" + mu + nu, (x,))
    return b.pairs


def _ladder_theta(theta, n: int, site_map=None) -> tuple[int, ...]:
    """Chain-indexed phases pulled back to ladder sites."""
    th = _phase_vector(theta, n)
    if site_map is None:
        return th
    return tuple(th[site_map(s)] for s in range(n))


def bell_family(variant: str, n: int, theta=1, local_only: bool = True, seed: int = 0) -> ModelSpec:
    """Products of ``N/2`` Bell pairs: ladder, rainbow or antipodal.

    The ladder model carries families ``hX/hY/hZ`` (one rung),
    ``J_{mu nu}`` (rung ``x`` against rung ``x+1``) and ``Jt_{mu nu}``
    (rail bonds).  The chain variants relabel the ladder pairs with the
    ``rainbow`` or ``antipodal`` site map; the antipodal one starts from a
    Moebius-closed ladder so that the seam bond lands on chain neighbours.
    With ``local_only`` the chain variants keep only the pairs whose factors
    are 2-local on the chain.  ``theta`` is indexed by the variant's own
    sites.
    """
    if variant not in BELL_VARIANTS:
        raise ParameterError(f"variant must be one of {BELL_VARIANTS}")
    if n < 4 or n % 2:
        raise ParameterError("Bell-pair models need even N >= 4")
    nx = n // 2
    ladder = LatticeGeometry.ladder(nx)
    site_map = None if variant == "ladder" else named_site_map(variant, nx)
    lth = _ladder_theta(theta, n, site_map)
    lgroup = bell_group([(x, x + nx) for x in range(nx)], n, lth)
    if variant == "antipodal":
        nxt = lambda x, y: (x + 1) + y * nx if x < nx - 1 else (1 - y) * nx
    else:
        nxt = lambda x, y: ladder.site(x + 1, y)
    pairs = _ladder_bell_pairs(nx, lgroup, ladder, nxt)
    if variant == "ladder":
        geom, group = ladder, lgroup
        mask = mask_from_sites(range(nx))
        expected = None
    else:
        geom = LatticeGeometry.chain(n)
        group = StabilizerGroup([g.permute(site_map.table) for g in lgroup.generators], name=variant)
        pairs = [map_pair(site_map, p, geom) for p in pairs]
        if local_only:
            pairs = [p for p in pairs if p.l_cert <= 2]
        mask = _first_half(n)
        expected = 0.5 * n * LN2
    scheme = CouplingScheme.uniform(0.7, 1.3, seed)
    return ModelSpec(
        "bell", geom, group, tuple(pairs), scheme, mask, expected,
        {"theta": _phase_vector(theta, n)},
        {"variant": variant, "n": n, "theta": theta, "local_only": local_only, "seed": seed},
    )


ANTIPODAL_REDUCED = ("hY", "Jt_XY", "Jt_YX", "Jt_ZY", "Jt_YZ")


def antipodal_bell_reduced(n: int, h_y: float, j_xy: float, j_yx: float, j_zy: float,
                           j_yz: float) -> tuple[ModelSpec, CouplingScheme]:
    """Antipodal Bell model at ``theta = +1`` with only the five surviving couplings."""
    spec = bell_family("antipodal", n, 1)
    vals = dict(zip(ANTIPODAL_REDUCED, (h_y, j_xy, j_yx, j_zy, j_yz)))
    return spec, CouplingScheme.per_family(vals, default=0.0)


# ----------------------------------------------------------------------
# rainbow and antipodal cluster states


CLUSTER_VARIANTS = ("rainbow", "antipodal")

RAINBOW_CLUSTER_PARAMS = {
    "J": 1.2, "Jp": 0.7, "Jpp": 0.9, "Jppp": 0.3,
    "lambda": 0.1, "lambdap": -0.25, "eta": 0.5, "etap": 0.05, "kappa": -0.3,
}
ANTIPODAL_CLUSTER_PARAMS = {
    "lambda": 1.0, "lambdap": 1.3, "J": 0.5, "Jp": 1.7, "omega": 1.2, "omegap": 0.9, "Omega": 1.6,
}


def ladder_cluster_generators(nx: int, theta=1) -> list[PauliString]:
    """Cluster state on the ``N_x x 2`` ladder; maps to the chain cluster under ``2x + y``.

    ``theta_{x,0} X_{x-1,1} Z_{x,0} X_{x,1}`` and ``theta_{x,1} X_{x,0} Z_{x,1} X_{x+1,0}``.
    """
    n = 2 * nx
    th = _phase_vector(theta, n)
    gens = []
    for x in range(nx):
        xm, xp = (x - 1) % nx, (x + 1) % nx
        gens.append(_ps(n, [(xm + nx, "X"), (x, "Z"), (x + nx, "X")], th[x]))
        gens.append(_ps(n, [(x, "X"), (x + nx, "Z"), (xp, "X")], th[x + nx]))
    return gens


def rainbow_cluster_generators(n: int, theta=1) -> list[PauliString]:
    th = _phase_vector(theta, n)
    h = n // 2
    gens = []
    for k in range(n):
        if k == 0:
            ops = [(n - 1, "X"), (0, "Z"), (h, "X")]
        elif k == h:
            ops = [(h - 1, "X"), (h, "Z"), (0, "X")]
        else:
            ops = [(n - k - 1, "X"), (k, "Z"), (n - k, "X")]
        gens.append(_ps(n, ops, th[k]))
    return gens


def antipodal_cluster_generators(n: int, theta=1) -> list[PauliString]:
    th = _phase_vector(theta, n)
    h = n // 2
    gens = []
    for k in range(n):
        if k == 0:
            ops = [(n - 1, "X"), (0, "Z"), (h, "X")]
        elif k == n - 1:
            ops = [(h - 1, "X"), (n - 1, "Z"), (0, "X")]
        elif k < h:
            ops = [(k + h - 1, "X"), (k, "Z"), (k + h, "X")]
        else:
            ops = [(k - h, "X"), (k, "Z"), (k - h + 1, "X")]
        gens.append(_ps(n, ops, th[k]))
    return gens


def _rainbow_cluster_pairs(b: _PairBuilder, n: int) -> None:
    h = n // 2
    for k in range(n):
        if k in (0, h):
            continue
        b.add([(k, "Z")], [(n - k - 1, "X"), (n - k, "X")], "J", (k,))
        b.add([(k - 1, "X"), (k, "Y")], [(n - k - 1, "X"), (n - k, "Y")], "Jp", (k,))
    for k in range(n):
        if k in (0, h - 1, h, n - 1):
            continue
        b.add([(k, "Y"), (k + 1, "X")], [(n - k - 1, "Y"), (n - k, "X")], "Jpp", (k,))
        b.add([(k, "Z"), (k + 1, "Z")], [(n - k - 2, "X"), (n - k, "X")], "Jppp", (k,))
    b.add([(1, "X")], [(n - 1, "Z"), (0, "X")], "lambda", (0,))
    b.add([(h, "X")], [(n - 1, "X"), (0, "Z")], "lambdap", (0,))
    b.add([(0, "X")], [(h - 1, "X"), (h, "Z")], "eta", (0,))
    b.add([(h + 1, "X")], [(h - 1, "Z"), (h, "X")], "etap", (0,))
    b.add([(n - 1, "X"), (0, "Y")], [(h - 1, "X"), (h, "Y")], "kappa", (0,))


def _antipodal_cluster_pairs(b: _PairBuilder, n: int) -> None:
    h = n // 2
    for k in range(1, h):
        b.add([(k, "Z")], [(k + h - 1, "X"), (k + h, "X")], "lambda", (k,))
        b.add([(k + h - 1, "Z")], [(k - 1, "X"), (k, "X")], "lambdap", (k,))
        b.add([(k - 1, "X"), (k, "Y")], [(k + h - 1, "Y"), (k + h, "X")], "J", (k,))
    for k in range(1, h - 1):
        b.add([(k, "Y"), (k + 1, "X")], [(k + h - 1, "X"), (k + h, "Y")], "Jp", (k,))
    b.add([(h, "X")], [(n - 1, "X"), (0, "Z")], "omega", (0,))
    b.add([(h - 1, "X")], [(n - 1, "Z"), (0, "X")], "omegap", (0,))
    b.add([(n - 1, "Y"), (0, "Y")], [(h - 1, "X"), (h, "X")], "Omega", (0,))


def cluster_family(variant: str, n: int, theta=1, params: Mapping[str, float] | None = None,
                   seed: int | None = 0) -> ModelSpec:
    """Rainbow or antipodal cluster state with its 2- and 3-local families.

    ``theta`` may be a vector; the string ``"random"`` draws a sign per
    generator from ``seed``.  ``params`` overrides the constant family
    couplings (defaults are the reference parameter sets
    :data:`RAINBOW_CLUSTER_PARAMS` and :data:`ANTIPODAL_CLUSTER_PARAMS`).
    """
    if variant not in CLUSTER_VARIANTS:
        raise ParameterError(f"variant must be one of {CLUSTER_VARIANTS}")
    if n < 8 or n % 2:
        raise ParameterError("cluster-family models need even N >= 8")
    if isinstance(theta, str):
        if theta != "random":
            raise ParameterError("theta must be +-1, a vector or 'random'")
        theta = tuple(int(t) for t in np.random.default_rng(seed).choice([-1, 1], n))
    th = _phase_vector(theta, n)
    geom = LatticeGeometry.chain(n)
    if variant == "rainbow":
        group = StabilizerGroup(rainbow_cluster_generators(n, th), name="rainbow_cluster")
        defaults = RAINBOW_CLUSTER_PARAMS
    else:
        group = StabilizerGroup(antipodal_cluster_generators(n, th), name="antipodal_cluster")
        defaults = ANTIPODAL_CLUSTER_PARAMS
    b = _PairBuilder(group, geom)
    (_rainbow_cluster_pairs if variant == "rainbow" else _antipodal_cluster_pairs)(b, n)
    values = dict(defaults)
    for k, v in (params or {}).items():
        if k not in values:
            raise ParameterError(f"unknown {variant} cluster family {k!r}")
        values[k] = float(v)
    return ModelSpec(
        variant + "_cluster", geom, group, tuple(b.pairs), CouplingScheme.per_family(values),
        _first_half(n), 0.5 * (n - 2) * LN2, {"theta": th},
        {"variant": variant, "n": n, "theta": list(th), "params": values},
    )


# ----------------------------------------------------------------------
# PXP


PXP_COUPLINGS = {"X": 0.25, "XZ": -0.25, "ZX": -0.25, "ZXZ": 0.25}


def pxp_expansion(n: int) -> HamiltonianTerms:
    """``sum_n P_{n-1} X_n P_{n+1}`` with ``P = (1 - Z)/2`` expanded into Pauli strings."""
    items = []
    for k in range(n):
        items.append((0.25, _ps(n, [(k, "X")])))
        items.append((-0.25, _ps(n, [(k, "X"), (k + 1, "Z")])))
        items.append((-0.25, _ps(n, [(k - 1, "Z"), (k, "X")])))
        items.append((0.25, _ps(n, [(k - 1, "Z"), (k, "X"), (k + 1, "Z")])))
    return pauli_sum(n, items)


def pxp_reduction(n: int) -> tuple[ModelSpec, HamiltonianTerms]:
    """Antipodal Bell state (``theta_n = -1``, ``theta_{n+N/2} = +1``) as a PXP scar.

    Families ``X``, ``XZ``, ``ZX`` and ``ZXZ`` pair a string starting at
    ``n < N/2`` with its translate by ``N/2``.  Returns the spec (default
    couplings ``1/4, -1/4, -1/4, 1/4``) and the direct PXP expansion.
    """
    if n < 4 or n % 2:
        raise ParameterError("PXP reduction needs even N >= 4")
    h = n // 2
    theta = tuple([-1] * h + [1] * h)
    geom = LatticeGeometry.chain(n)
    group = bell_group([(k, k + h) for k in range(h)], n, theta)
    b = _PairBuilder(group, geom)
    for k in range(h):
        s = lambda ops: [(site + h, op) for site, op in ops]
        for fam, ops in (("X", [(k, "X")]), ("XZ", [(k, "X"), (k + 1, "Z")]),
                         ("ZX", [(k, "Z"), (k + 1, "X")]), ("ZXZ", [(k - 1, "Z"), (k, "X"), (k + 1, "Z")])):
            b.add(ops, s(ops), fam, (k,))
    spec = ModelSpec(
        "pxp", geom, group, tuple(b.pairs), CouplingScheme.per_family(PXP_COUPLINGS),
        _first_half(n), 0.5 * n * LN2, {"theta": theta}, {"n": n},
    )
    return spec, pxp_expansion(n)


# ----------------------------------------------------------------------
# registry


def _pxp_spec(n: int) -> ModelSpec:
    return pxp_reduction(n)[0]


MODELS: dict[str, Callable[..., ModelSpec]] = {
    "cluster": cluster_chain,
    "toric": toric_code,
    "atc": atc,
    "product": product_state,
    "bell": bell_family,
    "cluster_family": cluster_family,
    "rainbow_cluster": lambda n, **kw: cluster_family("rainbow", n, **kw),
    "antipodal_cluster": lambda n, **kw: cluster_family("antipodal", n, **kw),
    "pxp": _pxp_spec,
}


def build_model(name: str, **params) -> ModelSpec:
    """Construct a registered model by name."""
    if name not in MODELS:
        raise ParameterError(f"unknown model {name!r}; choose from {sorted(MODELS)}")
    return MODELS[name](**params)

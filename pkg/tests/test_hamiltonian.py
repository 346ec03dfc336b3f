import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import dense_terms
from stabscar.errors import DimensionError, DomainError, ParameterError
from stabscar.factorize import make_pair, scan_group
from stabscar.hamiltonian import (
    CouplingScheme,
    HamiltonianTerms,
    assemble,
    mirror_image,
    pauli_sum,
    site_sum,
    term_multiset_equal,
    verify_scar,
)
from stabscar.lattice import LatticeGeometry
from stabscar.pauli import P, PauliString
from stabscar.stabilizer import StabilizerGroup, random_group


def cluster_group(n, theta=-1):
    return StabilizerGroup(
        [PauliString.from_sites(n, {k - 1: "X", k: "Z", k + 1: "X"}, sign=theta) for k in range(n)]
    )


def tagged(pairs, family="f"):
    return [p.with_tags(family, (i,)) for i, p in enumerate(pairs)]


class TestTerms:
    def test_sign_folding_and_merge(self):
        h = HamiltonianTerms(2, [(1.0, P("XX")), (0.5, P("-XX")), (2.0, P("ZI"))])
        assert h.as_dict() == {"XX": 0.5, "ZI": 2.0}
        assert h.coefficient(P("-XX")) == -0.5

    def test_cancellation_drops(self):
        h = HamiltonianTerms(2, [(1.0, P("XX")), (-1.0, P("XX")), (1e-13, P("ZZ"))])
        assert len(h) == 0 and not h

    def test_rejects_illegal(self):
        with pytest.raises(DomainError):
            HamiltonianTerms(2, [(1.0, P("+iXX"))])
        with pytest.raises(DomainError):
            HamiltonianTerms(2, [(1j, P("XX"))])
        with pytest.raises(DomainError):
            HamiltonianTerms(2, [(1.0, P("II"))])
        with pytest.raises(DimensionError):
            HamiltonianTerms(3, [(1.0, P("XX"))])

    def test_json_round_trip(self):
        rng = np.random.default_rng(3)
        terms = [(float(rng.normal()), P("".join(rng.choice(list("IXYZ"), 5)) or "XIIII")) for _ in range(20)]
        terms = [(c, p) for c, p in terms if not p.is_identity]
        h = HamiltonianTerms(5, terms)
        text = h.dumps()
        back = HamiltonianTerms.from_json(json.loads(text))
        assert back.terms == h.terms
        assert back.dumps() == text

    def test_json_empty_needs_size(self):
        with pytest.raises(ParameterError):
            HamiltonianTerms.from_json([])
        assert len(HamiltonianTerms.from_json([], n_qubits=3)) == 0

    def test_apply_matches_dense(self):
        h = pauli_sum(3, [(0.3, "XYZ"), (-1.1, "ZZI"), (0.7, "IYI")])
        psi = np.random.default_rng(0).normal(size=8) + 0j
        mat = dense_terms([(0.3, "XYZ"), (-1.1, "ZZI"), (0.7, "IYI")], 3)
        np.testing.assert_allclose(h.apply(psi), mat @ psi, atol=1e-13)


class TestSchemes:
    def test_uniform_reproducible(self):
        pairs = tagged(scan_group(cluster_group(6), LatticeGeometry.chain(6), 2, 2, 2))
        a = CouplingScheme.uniform(0.7, 1.3, seed=11).values(pairs)
        b = CouplingScheme.uniform(0.7, 1.3, seed=11).values(pairs)
        c = CouplingScheme.uniform(0.7, 1.3, seed=12).values(pairs)
        assert np.array_equal(a, b) and not np.array_equal(a, c)
        assert a.min() >= 0.7 and a.max() <= 1.3

    def test_alternating(self):
        pairs = tagged(scan_group(cluster_group(6), LatticeGeometry.chain(6), 2, 2, 1))
        vals = CouplingScheme.alternating(2.0).values(pairs)
        assert list(vals) == [2.0 * (-1) ** i for i in range(len(pairs))]
        with pytest.raises(ParameterError):
            CouplingScheme.alternating(1.0).values([p.with_tags("f", ()) for p in pairs])

    def test_table_and_per_family(self):
        g = LatticeGeometry.chain(3)
        a = make_pair(None, P("ZII"), P("IZI"), g, family="eta", label=(0, 1))
        b = make_pair(None, P("ZII"), P("IIZ"), g, family="eta", label=(0, 2))
        c = make_pair(None, P("XXI"), P("-YYI"), g, family="J", label=(0,))
        t = CouplingScheme.table({("eta", (0, 2)): 5.0, "eta": 1.5}, default=0.0)
        assert list(t.values([a, b, c])) == [1.5, 5.0, 0.0]
        f = CouplingScheme.per_family({"eta": 2.0, "J": CouplingScheme.alternating(3.0)})
        assert list(f.values([a, b, c])) == [2.0, 2.0, 3.0]
        with pytest.raises(ParameterError):
            CouplingScheme.per_family({"eta": 1.0}).values([c])

    def test_dict_round_trip(self):
        s = CouplingScheme.per_family(
            {"a": CouplingScheme.uniform(0.1, 0.2, 4), "b": CouplingScheme.alternating(1.0, -1)},
            default=CouplingScheme.constant(0.5),
        )
        assert CouplingScheme.from_dict(json.loads(json.dumps(s.to_dict()))) == s


class TestAssemble:
    def test_empty(self):
        h = assemble([])
        assert len(h) == 0
        assert verify_scar(h, cluster_group(4)).passed

    def test_signs(self):
        g = LatticeGeometry.chain(4)
        pair = make_pair(None, P("XIII"), P("-IZXI"), g)
        h = assemble([pair], CouplingScheme.constant(2.0))
        assert h.as_dict() == {"XIII": 2.0, "IZXI": 2.0}

    def test_mixed_sizes(self):
        a = make_pair(None, P("ZII"), P("IZI"), LatticeGeometry.chain(3))
        b = make_pair(None, P("ZIII"), P("IZII"), LatticeGeometry.chain(4))
        with pytest.raises(DimensionError):
            assemble([a, b])

    def test_linearity(self):
        grp = cluster_group(6)
        pairs = tagged(scan_group(grp, LatticeGeometry.chain(6), 2, 2, 2))
        s = CouplingScheme.constant(0.8)
        whole = assemble(pairs, s)
        parts = assemble(pairs[:5], s) + assemble(pairs[5:], s)
        assert term_multiset_equal(whole, parts)

    def test_dense_annihilation_random_groups(self):
        for seed in range(10):
            n = 5 + seed % 3
            grp = random_group(n, seed=seed)
            pairs = tagged(scan_group(grp, LatticeGeometry.chain(n), 2, 2, 2))
            h = assemble(pairs, CouplingScheme.uniform(-1, 1, seed))
            psi = grp.state_vector()
            assert np.max(np.abs(h.apply(psi))) < 1e-12 * max(h.coupling_norm, 1)
            assert verify_scar(h, grp).fully_verified

    def test_traceless(self):
        grp = cluster_group(6)
        h = assemble(scan_group(grp, LatticeGeometry.chain(6), 2, 2, 2), CouplingScheme.uniform(0.7, 1.3, 1))
        assert all(not p.is_identity for _, p in h.terms)


class TestVerify:
    def test_cluster_pass_and_tamper(self):
        grp = cluster_group(6)
        pairs = tagged(scan_group(grp, LatticeGeometry.chain(6), 2, 2, 2))
        h = assemble(pairs)
        cert = verify_scar(h, grp)
        assert cert.passed and cert.fully_verified and len(cert.entries) == len(pairs)
        bad = verify_scar(h, cluster_group(6, theta=1))
        assert not bad.passed and bad.failures

    def test_hand_entered_unverifiable(self):
        grp = cluster_group(4)
        h = site_sum(4, [(1.0, {0: "X"}), (1.0, {1: "Z", 2: "X"})])
        cert = verify_scar(h, grp)
        assert cert.passed and not cert.fully_verified and len(cert.unverifiable) == 2

    def test_size_mismatch(self):
        h = site_sum(5, [(1.0, {0: "X"})])
        with pytest.raises(DimensionError):
            verify_scar(h, cluster_group(4))


class TestMultiset:
    def test_self(self):
        h = pauli_sum(3, [(1.0, "XYZ"), (2.0, "ZII")])
        assert term_multiset_equal(h, h)

    def test_tolerance(self):
        a = pauli_sum(2, [(1.0, "XX")])
        b = pauli_sum(2, [(1.0 + 1e-10, "XX")])
        assert not term_multiset_equal(a, b)
        assert term_multiset_equal(a, b, tol=1e-9)
        assert not term_multiset_equal(a, pauli_sum(2, [(1.0, "XX"), (0.1, "ZZ")]))

    def test_mirror_dense(self):
        h = pauli_sum(3, [(0.4, "XYI"), (-0.2, "IZY"), (1.0, "YII")])
        m = mirror_image(h)
        rev = np.zeros((8, 8))
        for b in range(8):
            rev[int(format(b, "03b")[::-1], 2), b] = 1
        ref = -rev @ dense_terms([(c, p.to_text()) for c, p in h.terms], 3).conj() @ rev
        np.testing.assert_allclose(dense_terms([(c, p.to_text()) for c, p in m.terms], 3), ref, atol=1e-14)


texts = st.text(alphabet="IXYZ", min_size=3, max_size=3).filter(lambda t: t != "III")


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.floats(-3, 3, allow_nan=False), texts), max_size=8))
def test_normalization_matches_dense(items):
    h = pauli_sum(3, items)
    np.testing.assert_allclose(
        dense_terms([(c, p.to_text()) for c, p in h.terms], 3), dense_terms(items, 3), atol=1e-11
    )

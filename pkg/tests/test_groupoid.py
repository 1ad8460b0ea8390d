import numpy as np
import pytest

from gpdkit import constructors, groupoid
from gpdkit.errors import (
    EmptyGroupoid,
    EmptyRestriction,
    GroupoidAxiomError,
    IndexOutOfRange,
    NotComposable,
)
from gpdkit.groupoid import GroupoidTables, build, validate

from .oracles import brute_force_axiom_failures, verify_isomorphism


def qubit_tables() -> GroupoidTables:
    # 0: 1_plus, 1: 1_minus, 2: alpha (plus -> minus), 3: alphaInv
    return GroupoidTables(
        object_labels=["plus", "minus"],
        morphism_labels=["1_plus", "1_minus", "alpha", "alphaInv"],
        source=[0, 1, 0, 1],
        target=[0, 1, 1, 0],
        unit=[0, 1],
        inverse=[0, 1, 3, 2],
        comp={
            (0, 0): 0,
            (1, 1): 1,
            (2, 0): 2,
            (1, 2): 2,
            (3, 1): 3,
            (0, 3): 3,
            (2, 3): 1,
            (3, 2): 0,
        },
    )


class TestValidate:
    def test_qubit_tables_ok(self):
        report = validate(qubit_tables())
        assert report.ok and report.violations == ()
        assert brute_force_axiom_failures(qubit_tables()) == []

    def test_broken_inverse_flagged(self):
        t = qubit_tables()
        t.inverse[2] = 2  # alpha declared self-inverse
        t.inverse[3] = 3
        report = validate(t)
        assert not report.ok
        assert report.by_axiom("inverses")
        assert brute_force_axiom_failures(t)

    def test_pair3_brute_force_agreement(self):
        g = constructors.pair_groupoid(["a", "b", "c"])
        t = g.to_tables()
        assert validate(t).ok
        assert brute_force_axiom_failures(t) == []

    def test_malformed_tables_raise(self):
        t = qubit_tables()
        t.source[0] = 99
        with pytest.raises(IndexOutOfRange):
            validate(t)
        t = qubit_tables()
        t.comp[(0, 17)] = 0
        with pytest.raises(IndexOutOfRange):
            validate(t)

    def test_empty_groupoid_rejected(self):
        with pytest.raises(EmptyGroupoid):
            validate(GroupoidTables([], [], [], [], [], [], {}))

    def test_build_raises_on_violations(self):
        t = qubit_tables()
        del t.comp[(2, 3)]
        with pytest.raises(GroupoidAxiomError) as err:
            build(t)
        assert not err.value.report.ok


class TestMutations:
    """Single corrupted table entries are always caught, and the naive
    oracle agrees with validate about them."""

    def _mutants(self, t: GroupoidTables):
        N = len(t.morphism_labels)
        m = t.copy()
        m.source[N - 1] = (m.source[N - 1] + 1) % len(m.object_labels)
        yield "source", m
        m = t.copy()
        m.target[0] = (m.target[0] + 1) % len(m.object_labels)
        yield "target", m
        m = t.copy()
        m.inverse[N - 1] = (m.inverse[N - 1] + 1) % N
        yield "inverse", m
        m = t.copy()
        m.unit[-1] = (m.unit[-1] + 1) % N
        yield "unit", m
        m = t.copy()
        key = sorted(m.comp)[0]
        m.comp[key] = (m.comp[key] + 1) % N
        yield "comp-value", m
        m = t.copy()
        del m.comp[sorted(m.comp)[-1]]
        yield "comp-missing", m

    @pytest.mark.parametrize(
        "key", ["qubit", "pair3", "z2", "s3", "swap2", "union23", "classical_bit"]
    )
    def test_every_mutation_caught(self, corpus_groupoids, key):
        t0 = corpus_groupoids[key].to_tables()
        assert validate(t0).ok
        for tag, mutant in self._mutants(t0):
            if len(mutant.object_labels) == 1 and tag in ("source", "target"):
                continue  # unmutatable: only one object
            report = validate(mutant)
            assert not report.ok, f"{key}: {tag} mutation not caught"
            assert brute_force_axiom_failures(mutant), f"{key}: oracle missed {tag}"


class TestCompose:
    def test_qubit_inverse_composition(self, qubit):
        lab = qubit.morphism_labels
        alpha, alpha_inv = lab.index("alpha"), lab.index("alphaInv")
        assert qubit.compose(alpha_inv, alpha) == lab.index("1_plus")
        assert qubit.compose(alpha, alpha_inv) == lab.index("1_minus")

    def test_unit_laws_everywhere(self, corpus_groupoids):
        for g in corpus_groupoids.values():
            for j in range(g.n_morphisms):
                assert g.compose(int(g.unit[g.target[j]]), j) == j
                assert g.compose(j, int(g.unit[g.source[j]])) == j

    def test_not_composable(self, qubit):
        alpha = qubit.morphism_labels.index("alpha")
        with pytest.raises(NotComposable):
            qubit.compose(alpha, alpha)

    def test_index_out_of_range(self, qubit):
        with pytest.raises(IndexOutOfRange):
            qubit.compose(0, 99)


class TestOrbits:
    def test_pair4_single_orbit(self):
        g = constructors.pair_groupoid(list("abcd"))
        parts = g.orbits()
        assert parts.orbits == ((0, 1, 2, 3),)
        assert g.is_connected()

    def test_units_only_singleton_orbits(self):
        g = constructors.group_as_groupoid(constructors.cyclic_group(1), "x")
        for extra in ("y", "z"):
            g = constructors.disjoint_union(
                g, constructors.group_as_groupoid(constructors.cyclic_group(1), extra)
            )
        parts = g.orbits()
        assert len(parts.orbits) == 3
        assert all(len(o) == 1 for o in parts.orbits)
        assert not g.is_connected()

    def test_disjoint_union_orbits(self, corpus_groupoids):
        parts = corpus_groupoids["union23"].orbits()
        assert sorted(len(o) for o in parts.orbits) == [2, 3]

    def test_orbit_numbering_by_smallest_object(self, corpus_groupoids):
        parts = corpus_groupoids["union23"].orbits()
        firsts = [o[0] for o in parts.orbits]
        assert firsts == sorted(firsts)
        for oid, members in enumerate(parts.orbits):
            for x in members:
                assert parts.orbit_of[x] == oid


class TestIsotropy:
    def test_pair_groupoid_trivial(self):
        g = constructors.pair_groupoid(list("abc"))
        for x in range(3):
            iso = g.isotropy_group(x)
            assert iso.order == 1
            assert iso.morphisms == (int(g.unit[x]),)

    def test_one_object_group_is_whole_groupoid(self, corpus_groupoids):
        g = corpus_groupoids["z2"]
        iso = g.isotropy_group(0)
        assert iso.order == g.n_morphisms == 2

    def test_swap_action_trivial_isotropy(self, corpus_groupoids):
        g = corpus_groupoids["swap2"]
        # enumerate morphisms with source(g) = target(g) = x directly
        for x in range(g.n_objects):
            loops = [
                i
                for i in range(g.n_morphisms)
                if g.source[i] == x and g.target[i] == x
            ]
            assert g.isotropy_group(x).morphisms == tuple(loops)
            assert len(loops) == 1

    def test_isotropy_table_is_a_group(self, corpus_groupoids):
        for g in corpus_groupoids.values():
            for x in range(g.n_objects):
                iso = g.isotropy_group(x)
                m = iso.order
                e = iso.identity
                assert set(iso.table.ravel().tolist()) <= set(range(m))
                assert all(iso.table[e, a] == a and iso.table[a, e] == a for a in range(m))
                for a in range(m):
                    assert any(
                        iso.table[a, b] == e and iso.table[b, a] == e for b in range(m)
                    )
                for a in range(m):
                    for b in range(m):
                        for c in range(m):
                            assert (
                                iso.table[iso.table[a, b], c]
                                == iso.table[a, iso.table[b, c]]
                            )

    def test_same_orbit_isotropies_conjugate(self):
        # Z4 acting on two points through its quotient: isotropy of order 2
        # at both points of a single orbit
        z4 = constructors.cyclic_group(4)
        act = np.array([[0, 1], [1, 0], [0, 1], [1, 0]], dtype=np.int64)
        g = constructors.action_groupoid(constructors.ActionSpec(z4, ("p", "q"), act))
        assert g.is_connected()
        iso0, iso1 = g.isotropy_group(0), g.isotropy_group(1)
        assert iso0.order == iso1.order == 2
        connecting = next(
            i
            for i in range(g.n_morphisms)
            if g.source[i] == 0 and g.target[i] == 1
        )
        conj = {}
        for h in iso0.morphisms:
            image = g.compose(g.compose(connecting, h), int(g.inverse[connecting]))
            conj[h] = image
        assert sorted(conj.values()) == sorted(iso1.morphisms)
        loc0 = {h: a for a, h in enumerate(iso0.morphisms)}
        loc1 = {h: a for a, h in enumerate(iso1.morphisms)}
        for ha in iso0.morphisms:
            for hb in iso0.morphisms:
                prod = iso0.morphisms[iso0.table[loc0[ha], loc0[hb]]]
                assert conj[prod] == iso1.morphisms[
                    iso1.table[loc1[conj[ha]], loc1[conj[hb]]]
                ]


class TestPrincipal:
    def test_pair_groupoid_principal(self):
        assert constructors.pair_groupoid(list("ab")).is_principal()

    def test_one_object_z2_not_principal(self, corpus_groupoids):
        assert not corpus_groupoids["z2"].is_principal()

    def test_qubit_principal(self, qubit):
        pairs = set(zip(qubit.source.tolist(), qubit.target.tolist()))
        assert len(pairs) == 4
        assert qubit.is_principal()

    @pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 12])
    def test_connected_principal_iff_pair_iso(self, n):
        from .oracles import pair_groupoid_isomorphism

        g = constructors.pair_groupoid([f"x{i}" for i in range(n)])
        assert pair_groupoid_isomorphism(g) is not None

    def test_non_principal_has_no_pair_iso(self, corpus_groupoids):
        from .oracles import pair_groupoid_isomorphism

        assert pair_groupoid_isomorphism(corpus_groupoids["s3"]) is None
        assert pair_groupoid_isomorphism(corpus_groupoids["union23"]) is None


class TestDecompose:
    def test_union_components(self, corpus_groupoids):
        comps = corpus_groupoids["union23"].decompose()
        sizes = sorted((c.groupoid.n_objects, c.groupoid.n_morphisms) for c in comps)
        assert sizes == [(2, 4), (3, 9)]

    def test_connected_decomposes_to_itself(self, qubit):
        comps = qubit.decompose()
        assert len(comps) == 1
        assert verify_isomorphism(
            comps[0].groupoid,
            qubit,
            {a: p for a, p in enumerate(comps[0].object_map)},
            {a: p for a, p in enumerate(comps[0].morphism_map)},
        )

    def test_units_only_three_components(self, corpus_groupoids):
        g = corpus_groupoids["classical_bit"]
        comps = g.decompose()
        assert len(comps) == 2
        assert all(c.groupoid.n_morphisms == 1 for c in comps)

    def test_provenance_maps_reassemble_parent(self, corpus_groupoids):
        for g in corpus_groupoids.values():
            comps = g.decompose()
            assert sum(c.groupoid.n_morphisms for c in comps) == g.n_morphisms
            covered = sorted(p for c in comps for p in c.morphism_map)
            assert covered == list(range(g.n_morphisms))
            for c in comps:
                assert verify_isomorphism(
                    c.groupoid,
                    g.restrict(c.object_map),
                    {a: i for a, i in enumerate(range(len(c.object_map)))},
                    {
                        a: g.restrict(c.object_map).morphism_labels.index(
                            g.morphism_labels[p]
                        )
                        for a, p in enumerate(c.morphism_map)
                    },
                )

    def test_components_pairwise_non_composable(self, corpus_groupoids):
        g = corpus_groupoids["qubit_pair"]
        comps = g.decompose()
        for a in range(len(comps)):
            for b in range(len(comps)):
                if a == b:
                    continue
                for i in comps[a].morphism_map:
                    for j in comps[b].morphism_map:
                        assert g.comp_or_none(i, j) is None


class TestRestrict:
    def test_restrict_to_all_is_identity(self, corpus_groupoids):
        g = corpus_groupoids["pair4"]
        assert g.restrict(range(4)) == g

    def test_empty_restriction(self, qubit):
        with pytest.raises(EmptyRestriction):
            qubit.restrict([])


class TestSerialization:
    def test_json_round_trip(self, corpus_groupoids):
        for g in corpus_groupoids.values():
            assert groupoid.from_json(g.to_json()) == g

    def test_json_byte_stable(self, qubit):
        assert qubit.to_json() == groupoid.from_json(qubit.to_json()).to_json()

    def test_canonical_ordering(self, corpus_groupoids):
        for g in corpus_groupoids.values():
            for x in range(g.n_objects):
                assert int(g.unit[x]) == x
            rest = [
                (int(g.target[i]), int(g.source[i]), g.morphism_labels[i])
                for i in range(g.n_objects, g.n_morphisms)
            ]
            assert rest == sorted(rest)

    def test_inverse_is_involutive_bijection(self, corpus_groupoids):
        for g in corpus_groupoids.values():
            inv = g.inverse.tolist()
            assert sorted(inv) == list(range(g.n_morphisms))
            assert all(inv[inv[i]] == i for i in range(g.n_morphisms))


class TestSparseStorage:
    def test_env_guard_switches_to_sparse(self, monkeypatch, qubit):
        monkeypatch.setenv("GPDKIT_MAX_N", "2")
        g = groupoid.build(qubit.to_tables())
        assert g._comp_dense is None and g._comp_sparse is not None
        assert g == qubit
        lab = g.morphism_labels
        assert g.compose(lab.index("alphaInv"), lab.index("alpha")) == lab.index("1_plus")
        with pytest.raises(NotComposable):
            g.compose(lab.index("alpha"), lab.index("alpha"))

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isodrum import gassmann as gs
from isodrum.gassmann import (
    PermutationGroup,
    Subgroup,
    compose,
    conjugacy_classes,
    coset_action,
    intertwiner,
    inverse,
    is_almost_conjugate,
    is_conjugate,
    permutation_character,
)


def _det_mod2(m):
    return int(round(np.linalg.det(np.array(m, dtype=float)))) % 2


def test_sl3_order_matches_matrix_count():
    count = sum(
        1 for bits in itertools.product((0, 1), repeat=9) if _det_mod2(np.reshape(bits, (3, 3)))
    )
    assert count == (8 - 1) * (8 - 2) * (8 - 4) == 168
    assert gs.sl3_f2().order == count


def test_identity_fixes_all_points():
    G = gs.sl3_f2()
    assert G.identity in G
    assert gs.fixed_points(G.identity) == list(range(7))


def test_transitive_on_points():
    G = gs.sl3_f2()
    for p in range(7):
        assert G.orbit(p) == set(range(7))


def test_plane_action_is_a_homomorphism_and_preserves_incidence():
    G = gs.sl3_f2()
    lines = gs.fano_lines()
    for g in G.elements[::7]:
        for h in G.elements[::11]:
            assert gs.plane_action(compose(g, h)) == compose(gs.plane_action(g), gs.plane_action(h))
        q = gs.plane_action(g)
        for i, line in enumerate(lines):
            assert frozenset(g[x] for x in line) == lines[q[i]]


def test_group_axioms():
    G = gs.sl3_f2()
    elems = set(G.elements)
    for g in G.elements:
        assert inverse(g) in elems
        assert compose(g, inverse(g)) == G.identity
    rng = np.random.default_rng(3)
    for _ in range(200):
        a, b, c = (G.elements[i] for i in rng.integers(0, 168, 3))
        assert compose(a, b) in elems
        assert compose(compose(a, b), c) == compose(a, compose(b, c))


def _classes_by_union_find(group):
    parent = {g: g for g in group.elements}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for x in group.elements:
        for g in group.elements:
            a, b = find(x), find(gs.conjugate(g, x))
            if a != b:
                parent[a] = b
    classes = {}
    for g in group.elements:
        classes.setdefault(find(g), set()).add(g)
    return list(classes.values())


def test_conjugacy_classes_against_brute_force():
    G = gs.sl3_f2()
    table = conjugacy_classes(G)
    brute = _classes_by_union_find(G)
    assert sorted(map(sorted, table.classes)) == sorted(map(sorted, brute))
    assert sorted(table.sizes) == sorted([1, 21, 42, 56, 24, 24])
    assert sum(table.sizes) == 168
    assert all(168 % s == 0 for s in table.sizes)
    assert frozenset([G.identity]) in table.classes


def test_stabilizers(fano):
    G, H, K = fano
    assert (H.order, H.index, K.order, K.index) == (24, 7, 24, 7)
    assert Subgroup.from_elements(G, H.elements) == H


def test_almost_conjugate_not_conjugate(fano):
    G, H, K = fano
    table = conjugacy_classes(G)
    assert table.counts(H) == table.counts(K)
    assert is_almost_conjugate(G, H, K)
    assert not is_conjugate(G, H, K)
    assert gs.find_conjugator(G, H, K) is None


@pytest.mark.parametrize("g_index", [0, 5, 77, 167])
def test_conjugate_subgroups(fano, g_index):
    G, H, _ = fano
    g = G.elements[g_index]
    Hg = H.conjugate_by(g)
    assert is_almost_conjugate(G, H, H)
    assert is_conjugate(G, H, H)
    assert is_almost_conjugate(G, H, Hg)
    assert is_conjugate(G, H, Hg)


def test_coset_action(fano):
    G, H, K = fano
    for S in (H, K):
        act = coset_action(G, S)
        assert act.index == 7
        assert act(G.identity) == tuple(range(7))
        assert act.fixed_count(G.identity) == 7
        assert PermutationGroup.from_generators([act(g) for g in G.generators]).orbit(0) == set(range(7))
        for g in G.elements[::5]:
            for h in G.elements[::3]:
                assert act(compose(g, h)) == compose(act(g), act(h))


def test_permutation_characters_agree_on_classes(fano):
    G, H, K = fano
    table = conjugacy_classes(G)
    chi_h = permutation_character(coset_action(G, H), G)
    chi_k = permutation_character(coset_action(G, K), G)
    for rep in table.representatives:
        assert chi_h[rep] == chi_k[rep]
    assert chi_h == chi_k


def test_intertwiner_exact_on_all_elements(fano):
    G, H, K = fano
    T = intertwiner(G, H, K)
    ah, ak = coset_action(G, H), coset_action(G, K)
    N, d = T.integer_form()
    for g in G.elements:
        assert np.array_equal(N.dot(ah.matrix(g)), ak.matrix(g).dot(N))
    assert T.as_sympy().det() != 0
    assert all(isinstance(x, Fraction) for row in T.matrix for x in row)


def test_intertwiner_fixes_constants(fano):
    G, H, K = fano
    T = intertwiner(G, H, K)
    ones = np.ones(7)
    image = T.as_float() @ ones
    assert np.allclose(image, image[0] * ones) and image[0] != 0
    Q = T.orthogonal()
    assert np.allclose(Q @ Q.T, np.eye(7), atol=1e-13)
    assert np.allclose(np.abs(Q @ ones), ones, atol=1e-13)


def test_orthogonal_version_still_intertwines(fano):
    G, H, K = fano
    Q = intertwiner(G, H, K).orthogonal()
    ah, ak = coset_action(G, H), coset_action(G, K)
    for g in G.elements:
        assert np.allclose(Q @ ah.matrix(g), ak.matrix(g) @ Q, atol=1e-13)


def test_intertwiner_same_subgroup_is_identity_like(fano):
    G, H, _ = fano
    T = intertwiner(G, H, H)
    ah = coset_action(G, H)
    assert T.intertwines([ah.matrix(g) for g in G], [ah.matrix(g) for g in G])
    I = gs.Intertwiner(tuple(tuple(Fraction(int(i == j)) for j in range(7)) for i in range(7)))
    assert I.intertwines([ah.matrix(g) for g in G], [ah.matrix(g) for g in G])


def test_intertwiner_rejects_inequivalent():
    # trivial rep vs sign rep of S2: no nonzero intertwiner
    with pytest.raises(gs.IntertwinerError):
        gs.solve_intertwiner([[[1]]], [[[-1]]])


def test_json_round_trip(fano):
    G, H, K = fano
    T = intertwiner(G, H, K)
    assert gs.Intertwiner.from_json(T.to_json()) == T
    report = gs.gassmann_report(G, H, K)
    assert report["group_order"] == 168
    assert report["almost_conjugate"] and not report["conjugate"]


def test_subgroup_validation():
    G = gs.sl3_f2()
    with pytest.raises(gs.GroupError):
        Subgroup.from_elements(G, [G.elements[1]])


# -- small groups -----------------------------------------------------------


def _all_subgroups(group):
    subs = {}
    for a, b in itertools.combinations_with_replacement(group.elements, 2):
        s = group.generated_subgroup([a, b])
        subs[s.elements] = s
    return list(subs.values())


SMALL_GROUPS = {
    "S4": [(1, 0, 2, 3), (1, 2, 3, 0)],
    "A4": [(1, 2, 0, 3), (0, 2, 3, 1)],
    "D6": [(1, 2, 3, 4, 5, 0), (0, 5, 4, 3, 2, 1)],
    "Z2xS3": [(1, 0, 2, 3, 4), (0, 1, 3, 4, 2), (0, 1, 3, 2, 4)],
}


@pytest.mark.parametrize("name", sorted(SMALL_GROUPS))
def test_conjugate_implies_almost_conjugate_small_groups(name):
    G = PermutationGroup.from_generators(SMALL_GROUPS[name])
    assert G.order <= 24
    subs = _all_subgroups(G)
    for H, K in itertools.product(subs, repeat=2):
        if is_conjugate(G, H, K):
            assert is_almost_conjugate(G, H, K)


def _characters_equal(G, H, K):
    if H.order != K.order:
        return False
    ch = permutation_character(coset_action(G, H), G)
    ck = permutation_character(coset_action(G, K), G)
    return ch == ck


perms = st.integers(min_value=3, max_value=6).flatmap(
    lambda n: st.lists(st.permutations(list(range(n))), min_size=1, max_size=2)
)


@settings(max_examples=40, deadline=None)
@given(gens=perms, data=st.data())
def test_class_counts_iff_characters(gens, data):
    G = PermutationGroup.from_generators([tuple(g) for g in gens])
    picks = st.lists(st.sampled_from(G.elements), min_size=0, max_size=2)
    H = G.generated_subgroup(data.draw(picks))
    K = G.generated_subgroup(data.draw(picks))
    assert is_almost_conjugate(G, H, K) == _characters_equal(G, H, K)


def test_class_counts_iff_characters_on_sl3(fano):
    G, H, K = fano
    assert is_almost_conjugate(G, H, K) == _characters_equal(G, H, K) is True
    # against a cyclic subgroup of order 3: counts and characters both differ
    other = G.generated_subgroup([G.generators[1]])
    assert is_almost_conjugate(G, H, other) == _characters_equal(G, H, other) is False

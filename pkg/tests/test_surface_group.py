import math

import numpy as np
import pytest

from geometry.base.errors import InvalidGenusError, InvalidWordError, NotHyperbolicError, RotLabError
from geometry.base.hyperbolic_core import (
    apply,
    classify,
    distance_from_origin,
    from_fermi,
    hyp_distance,
    point_along,
)
from geometry.surface_group import (
    DeformedDomain,
    MAX_LOCATED_WORD,
    GroupWord,
    LocatedPoint,
    SurfaceGroup,
    abelianize,
    axis_of,
    band_index,
    cyclic_reduce,
    homology_class,
    invert_letter,
    is_primitive,
    quasi_convexity_probe,
    reduce,
    svarc_milnor_probe,
)


def test_genus_two_has_eight_generators(genus2):
    assert genus2.n_sides == 8
    assert len(genus2.generators) == 8
    assert genus2.relator_residual() < 1e-8


def test_generators_are_hyperbolic_with_equal_lengths(genus2):
    lengths = []
    for M in genus2.generators.values():
        cls = classify(M)
        assert cls.is_hyperbolic
        lengths.append(cls.length)
    assert max(lengths) - min(lengths) < 1e-9


def test_genus_three_angle_sum():
    G = SurfaceGroup(3)
    assert G.n_sides == 12
    assert G.angle_sum() == pytest.approx(2.0 * math.pi, abs=1e-8)
    assert G.relator_residual() < 1e-8


@pytest.mark.parametrize("genus", [1, 0, 2.5])
def test_invalid_genus(genus):
    with pytest.raises(InvalidGenusError):
        SurfaceGroup(genus)


def test_free_reduction():
    w = GroupWord.parse("a1 A1")
    assert reduce(w).is_identity
    assert str(reduce(w)) == "e"
    assert reduce(GroupWord.parse("b1 a1 A1 B1 a2")) == GroupWord.parse("a2")


def test_reduced_identity_evaluates_to_identity(genus2):
    assert genus2.evaluate(reduce(GroupWord.parse("a1 A1"))).distance_to_identity() < 1e-12


def test_word_times_inverse_is_identity(genus2):
    rng = np.random.default_rng(7)
    for _ in range(100):
        size = int(rng.integers(1, 7))
        w = GroupWord(tuple(rng.choice(genus2.alphabet, size=size)))
        M = genus2.evaluate(w) @ genus2.evaluate(w.inverse())
        assert M.distance_to_identity() < 1e-6


def _reduced_word(rng, alphabet, size):
    letters = []
    while len(letters) < size:
        x = str(rng.choice(alphabet))
        if letters and invert_letter(letters[-1]) == x:
            continue
        letters.append(x)
    return GroupWord(tuple(letters))


def test_long_word_times_inverse_is_identity_up_to_conditioning(genus2):
    rng = np.random.default_rng(7)
    for _ in range(100):
        w = _reduced_word(rng, genus2.alphabet, int(rng.integers(1, 13)))
        M, N = genus2.evaluate(w), genus2.evaluate(w.inverse())
        scale = np.linalg.norm(M.matrix, 2) * np.linalg.norm(N.matrix, 2)
        assert (M @ N).distance_to_identity() <= 1e-9 * scale


def test_locate_recovers_deep_tile_centres(genus2):
    rng = np.random.default_rng(5)
    for _ in range(30):
        w = _reduced_word(rng, genus2.alphabet, 6)
        lp = genus2.locate(apply(genus2.evaluate(w), 0j))
        assert abs(lp.rep) < 1e-6
        assert homology_class(lp.word, 2).tolist() == homology_class(w, 2).tolist()


def test_reanchor_extends_words_past_the_locate_cap(genus2):
    long_word = GroupWord.parse("a1 b1").power(50)
    rep = 0.05 + 0.02j
    point = genus2.reanchor(LocatedPoint(long_word, rep), apply(genus2.evaluate("a1"), rep))
    assert len(point.word) > MAX_LOCATED_WORD
    assert point.word == long_word * GroupWord.parse("a1")
    assert abs(point.rep - rep) < 1e-12


def test_parse_rejects_unknown_letters(genus2):
    with pytest.raises(ValueError):
        GroupWord.parse("a1 x3")
    with pytest.raises(ValueError):
        genus2.check_word("a3")


def test_evaluate_rejects_letters_outside_the_genus(genus2):
    with pytest.raises(InvalidWordError) as info:
        genus2.evaluate("a1 a7")
    assert isinstance(info.value, RotLabError)
    assert info.value.context["letters"] == ["a7"]
    with pytest.raises(InvalidWordError):
        axis_of(genus2, "b3")


def test_cyclic_reduce_and_primitivity():
    assert cyclic_reduce(GroupWord.parse("b1 a1 a2 B1")) == GroupWord.parse("a1 a2")
    assert not is_primitive(GroupWord.parse("a1 a1"))
    assert not is_primitive(GroupWord.parse("a1 b1 a1 b1"))
    assert is_primitive(GroupWord.parse("a1 b1"))


def test_relator_is_null_in_homology(genus2):
    assert not np.any(homology_class(genus2.relator, 2))
    assert homology_class(GroupWord.parse("a1 a1 B2"), 2).tolist() == [2, 0, 0, -1]
    assert dict(abelianize(GroupWord.parse("a1 B1 a1"))) == {"a1": 2, "b1": -1}


def test_ball_is_shortlex_and_counts_reduced_words(genus2):
    words = genus2.words(2)
    assert len(words) == genus2.ball_size(2) == 1 + 8 + 8 * 7
    keys = [genus2.shortlex_key(w) for w in words]
    assert keys == sorted(keys)
    assert all(w.is_reduced for w in words)


def test_locate_origin(genus2):
    lp = genus2.locate(0j)
    assert lp.word.is_identity
    assert lp.rep == 0j


def test_locate_translate_of_origin(genus2):
    z = apply(genus2.evaluate("a1"), 0j)
    lp = genus2.locate(z)
    assert str(lp.word) == "a1"
    assert abs(lp.rep) < 1e-8


def test_locate_reconstructs_random_points(genus2):
    rng = np.random.default_rng(11)
    radii = 0.999 * np.sqrt(rng.uniform(0.0, 1.0, 500))
    angles = rng.uniform(0.0, 2.0 * math.pi, 500)
    for r, a in zip(radii, angles):
        z = complex(r * math.cos(a), r * math.sin(a))
        lp = genus2.locate(z)
        assert genus2.contains(lp.rep)
        assert abs(genus2.reconstruct(lp) - z) < 1e-8


def test_convex_domain_is_quasi_convex_with_zero_constant(genus2):
    r_hat, witness = quasi_convexity_probe(genus2, 40)
    assert r_hat == pytest.approx(0.0, abs=1e-6)
    assert witness is None


def test_deformed_domain_has_positive_constant(genus2):
    domain = DeformedDomain(genus2, side=0, radius=0.8)
    r_small, _ = quasi_convexity_probe(genus2, 50, domain=domain)
    r_large, witness = quasi_convexity_probe(genus2, 200, domain=domain)
    assert r_small <= r_large
    assert 0.0 < r_large < math.inf
    assert witness is not None
    assert not domain.contains(witness["x"])


def test_deformed_domain_moves_the_dent_across_the_paired_side(genus2):
    domain = DeformedDomain(genus2, side=0, radius=0.8)
    inside_dent = 0.9 * domain.midpoint
    assert not domain.contains(inside_dent)
    assert domain.contains(domain.fold(inside_dent))
    assert domain.contains(0j)
    with pytest.raises(ValueError):
        DeformedDomain(genus2, radius=genus2.inradius)


def test_svarc_milnor_radius_one_matches_enumeration(genus2):
    expected = 1.0
    for M in genus2.generators.values():
        d = distance_from_origin(apply(M, 0j))
        expected = max(expected, 1.0 / d, d)
    assert svarc_milnor_probe(genus2, 1) == pytest.approx(expected)


def test_svarc_milnor_is_monotone_and_finite(genus2):
    values = [svarc_milnor_probe(genus2, r) for r in (1, 2, 4)]
    assert values == sorted(values)
    assert 1.0 <= values[-1] < math.inf


def test_axis_of_generator(genus2):
    axis, length = axis_of(genus2, "a1")
    assert length == pytest.approx(classify(genus2.generators["a1"]).length, abs=1e-12)
    assert length == pytest.approx(genus2.min_translation_length, abs=1e-9)
    z = point_along(axis, 0.3)
    assert hyp_distance(apply(genus2.evaluate("a1"), z), z) == pytest.approx(length, abs=1e-8)
    assert axis.same_support(axis_of(genus2, "A1")[0], tol=1e-9)


def test_powers_share_the_axis(genus2):
    axis, length = axis_of(genus2, "a1")
    axis2, length2 = axis_of(genus2, "a1 a1")
    assert axis2.same_as(axis, tol=1e-7)
    assert length2 == pytest.approx(2.0 * length, abs=1e-9)


def test_conjugates_have_equal_lengths(genus2):
    w = GroupWord.parse("a1 b2")
    u = GroupWord.parse("b1")
    axis, length = axis_of(genus2, w)
    axis_c, length_c = axis_of(genus2, u * w * u.inverse())
    assert length_c == pytest.approx(length, abs=1e-8)
    assert axis_c.same_as(apply(genus2.evaluate(u), axis), tol=1e-7)


def test_axis_of_identity_is_rejected(genus2):
    with pytest.raises(NotHyperbolicError):
        axis_of(genus2, "e")


def test_band_index_counts_translates(genus2):
    axis, length = axis_of(genus2, "a1")
    z0 = from_fermi(axis, 0.1, 0.4 * length)
    z = apply(genus2.evaluate("a1 a1 a1"), z0)
    assert band_index(z0, axis, length) == 0
    assert band_index(z, axis, length) == 3

"""Genus symbols, 2-adic canonicalization, and Z_p-equivalence."""
import random
from fractions import Fraction

import numpy as np

from nippaudit import linalg
from nippaudit.model import QuadForm
from nippaudit.symbol import (canonical_gram, canonicalize_2,
                              compartments_of, equivalent_over_zp,
                              same_genus, symbol_2, symbol_odd_p, trains_of)

GOLDEN = QuadForm((1, 1, 11, 11, 1, 0, 0, 1, 0, 8))


def diag(*entries):
    n = len(entries)
    return linalg.matrix([[entries[i] if i == j else 0 for j in range(n)]
                          for i in range(n)])


BLOCK_A = linalg.matrix([[2, 1], [1, 2]])
BLOCK_B = linalg.matrix([[0, 1], [1, 0]])


def scaled(m, c):
    return linalg.scale(m, c)


def block_diag(*blocks):
    return linalg.block_diag(list(blocks))


def canon2(gram):
    """Canonical 2-adic symbol of a doubled (even-diagonal) gram."""
    return canonicalize_2(symbol_2(gram)).entries


# ---------------------------------------------------------------------------
# canonicalization: pinned equivalences and inequivalences
# (each pinned case was established against exhaustive congruence
# transform searches and representation-count invariants)


def test_unit_plane_equivalences():
    # dets 7 and 15 lie in the same square class; oddities match after fusion
    assert canon2(scaled(diag(1, 7), 2)) == canon2(scaled(diag(3, 5), 2))
    assert canon2(scaled(diag(1, 1), 2)) != canon2(scaled(diag(1, 5), 2))


def test_even_blocks_are_inequivalent():
    assert canon2(BLOCK_A) != canon2(BLOCK_B)


def test_sign_walking_between_adjacent_scales():
    # diag(1,2) ~ diag(3,6) over Z_2 (walk flips both signs, oddity +4 each)
    assert canon2(scaled(diag(1, 2), 2)) == canon2(scaled(diag(3, 6), 2))


def test_odd_unit_next_to_even_block():
    # adjacent-scale walk with a type II endpoint is legal:
    # <1> at scale 1 with A at scale 2 ~ <5> at scale 1 with B at scale 2
    a = block_diag(diag(2), scaled(BLOCK_A, 4))
    b = block_diag(diag(10), scaled(BLOCK_B, 4))
    assert canon2(a) == canon2(b)


def test_even_block_merged_into_odd_constituent():
    # at one scale, an even block beside an odd unit diagonalizes:
    # <1>+A = <3,3,3> and <5>+B = <1,1,3>, but <1>+A differs from <5>+B
    assert canon2(block_diag(diag(2), scaled(BLOCK_A, 2))) == canon2(
        scaled(diag(3, 3, 3), 2))
    assert canon2(block_diag(diag(10), scaled(BLOCK_B, 2))) == canon2(
        scaled(diag(1, 1, 3), 2))
    assert canon2(block_diag(diag(2), scaled(BLOCK_A, 2))) != canon2(
        block_diag(diag(10), scaled(BLOCK_B, 2)))


def test_type_ii_pairs_do_not_walk():
    # A+2A and B+2B are NOT equivalent: no walk between two type II blocks
    a = block_diag(BLOCK_A, scaled(BLOCK_A, 2))
    b = block_diag(BLOCK_B, scaled(BLOCK_B, 2))
    assert canon2(a) != canon2(b)


def test_gap_two_type_ii_endpoint_does_not_walk():
    # gap-2 walks need two type I endpoints:
    # <1> at scale 1 vs A at scale 3 does not walk
    a = block_diag(diag(2), scaled(BLOCK_A, 8))
    b = block_diag(diag(10), scaled(BLOCK_B, 8))
    assert canon2(a) != canon2(b)


def test_canonicalize_idempotent():
    for gram in (GOLDEN.gram_doubled, scaled(diag(1, 3, 5, 7), 2),
                 block_diag(BLOCK_A, scaled(diag(3, 7), 4))):
        c = canonicalize_2(symbol_2(gram))
        rep = canonical_gram(c)
        again = canonicalize_2(symbol_2(rep))
        assert again.entries == c.entries


def test_compartments_and_trains():
    sym = symbol_2(GOLDEN.gram_doubled)
    # entries at scales 0 (type II), 1, 5: the type I entry at scale 1 is
    # its own compartment; the scale gap of 4 splits the trains
    comps = compartments_of(sym.entries)
    assert comps == [[1], [2]]
    trains = trains_of(sym.entries)
    assert trains == [[0, 1], [2]]


def random_unimodular(n, rng):
    u = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for _ in range(8):
        i, j = rng.sample(range(n), 2)
        c = rng.randint(-3, 3)
        for k in range(n):
            u[i][k] += c * u[j][k]
    return linalg.matrix(u)


SAMPLE_FORMS = [
    QuadForm((1, 1, 1, 1, 0, 0, 0, 0, 0, 0)),
    QuadForm((1, 1, 1, 2, 0, 0, 0, 0, 0, 0)),
    QuadForm((2, 2, 2, 2, -1, 0, 0, 0, -1, -1)),
    GOLDEN,
    QuadForm((1, 3, 3, 11, 1, 1, 3, 1, 3, 1)),
]


def test_canonical_symbol_invariance_under_unimodular_transforms():
    rng = random.Random(20260823)
    for form in SAMPLE_FORMS:
        base2 = canon2(form.gram_doubled)
        base_odd = {p: symbol_odd_p(form.gram, p).entries for p in (3, 19)}
        for _ in range(20):
            u = random_unimodular(4, rng)
            g = linalg.congruent(u, form.gram)
            assert canon2(linalg.scale(g, 2)) == base2
            for p in (3, 19):
                assert symbol_odd_p(g, p).entries == base_odd[p]


def test_same_genus():
    # two forms of the same genus: transform one by a unimodular matrix
    rng = random.Random(5)
    u = random_unimodular(4, rng)
    g = linalg.congruent(u, GOLDEN.gram)
    from nippaudit.model import coeffs_from_gram
    other = QuadForm(coeffs_from_gram(g))
    assert same_genus([GOLDEN, other])
    assert not same_genus([GOLDEN, QuadForm((1, 1, 1, 76, 0, 0, 0, 0, 0, 0))])


def test_odd_symbol_contents():
    sym = symbol_odd_p(GOLDEN.gram, 19)
    assert sym.entries == ((0, 3, -1), (1, 1, -1))


# ---------------------------------------------------------------------------
# brute-force transform oracle over the small 2x2 family (exact certificate)


def _brute_equivalent_mod32(a, b):
    """Any X mod 32, invertible mod 2, with X^T a X = b (mod 32)?"""
    p, q, r = a[0][0], a[0][1], a[1][1]
    s, t, u = b[0][0], b[0][1], b[1][1]
    rng32 = np.arange(32, dtype=np.int64)
    # columns (x, z) with p x^2 + 2 q x z + r z^2 = target (mod 32)
    x = rng32[:, None]
    z = rng32[None, :]
    val = (p * x * x + 2 * q * x * z + r * z * z) % 32
    cols1 = np.argwhere(val == s % 32)
    cols2 = np.argwhere(val == u % 32)
    if len(cols1) == 0 or len(cols2) == 0:
        return False
    x1, z1 = cols1[:, 0][:, None], cols1[:, 1][:, None]
    x2, z2 = cols2[:, 0][None, :], cols2[:, 1][None, :]
    cross = (p * x1 * x2 + q * (x1 * z2 + x2 * z1) + r * z1 * z2 - t) % 32
    detx = (x1 * z2 - x2 * z1) % 2
    return bool(np.any((cross == 0) & (detx == 1)))


def small_family():
    forms = []
    for p in range(-4, 5):
        for q in range(-4, 5):
            for r in range(-4, 5):
                d = p * r - q * q
                if d % 2 == 1 and 0 < abs(d) <= 15:
                    forms.append(linalg.matrix([[p, q], [q, r]]))
    return forms


def test_equivalence_matches_brute_force_oracle():
    forms = small_family()
    groups: dict[tuple, list] = {}
    for g in forms:
        doubled = linalg.scale(g, 2)
        key = canonicalize_2(symbol_2(doubled)).entries
        groups.setdefault(key, []).append(g)
    # within a group: the oracle must find a transform to the representative
    for members in groups.values():
        rep = members[0]
        for g in members[1:]:
            assert equivalent_over_zp(rep, g, 2)
            assert _brute_equivalent_mod32(rep, g), (rep, g)
    # across groups: representatives must be brute-force inequivalent
    reps = [members[0] for members in groups.values()]
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            assert not equivalent_over_zp(reps[i], reps[j], 2)
            assert not _brute_equivalent_mod32(reps[i], reps[j]), (
                reps[i], reps[j])

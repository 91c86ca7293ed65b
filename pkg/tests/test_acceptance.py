"""Acceptance criteria, one test per criterion.

Criteria 2-5 audit the full published corpus of raw table files. That
corpus is not shipped with this repository and no network access is
available in the test environment, so those tests skip with an explicit
reason instead of asserting against fabricated data. The golden-example
fixture (criterion 1) carries the one genus whose published values are
reproduced verbatim in accompanying documentation.
"""
import random
from fractions import Fraction
from pathlib import Path

import pytest

from nippaudit import linalg
from nippaudit.arith import hilbert_symbol
from nippaudit.audit import emit_report, run_audit
from nippaudit.autmass import (congruence_count_oracle, local_density,
                               local_density_odd, nipp_density)
from nippaudit.ingest import (emit_normalized, parse_appendix,
                              parse_main_table, parse_normalized,
                              parse_splitting_expr)
from nippaudit.jordan import jordan_split
from nippaudit.model import QuadForm, discriminant_of, gram_from_coeffs
from nippaudit.symbol import (canonicalize_2, equivalent_over_zp, symbol_2,
                              symbol_odd_p)

FIXTURES = Path(__file__).parent / "fixtures"
CORPUS_SKIP = ("the published corpus of raw table files is not available "
               "in this environment (no network access); the audit logic "
               "is exercised on the golden-example fixture instead")

GOLDEN = QuadForm((1, 1, 11, 11, 1, 0, 0, 1, 0, 8))


def test_criterion_1_golden_example():
    half = Fraction(1, 2)
    assert gram_from_coeffs(GOLDEN.coeffs) == linalg.matrix([
        [1, half, 0, half],
        [half, 1, 0, 0],
        [0, 0, 11, 4],
        [half, 0, 4, 11],
    ])
    assert discriminant_of(GOLDEN) == 1216
    claimed = parse_splitting_expr("[2A]+[(58/3)+(38/29)]", 2).matrix()
    assert not equivalent_over_zp(GOLDEN.gram, claimed, 2)
    assert nipp_density(GOLDEN, 2) == 3072
    assert nipp_density(GOLDEN, 2) != 98304
    published_19 = parse_splitting_expr(
        "[(1)+(3/4)+(22)]+[(304/33)]", 19).matrix()
    assert symbol_odd_p(GOLDEN.gram, 19) != symbol_odd_p(published_19, 19)


@pytest.mark.skip(reason=CORPUS_SKIP)
def test_criterion_2_table1_reproduction():
    pass


@pytest.mark.skip(reason=CORPUS_SKIP)
def test_criterion_3_agreement_below_first_error():
    pass


@pytest.mark.skip(reason=CORPUS_SKIP)
def test_criterion_4_main_table_integrity():
    pass


@pytest.mark.skip(reason=CORPUS_SKIP)
def test_criterion_5_mass_closure_corpus():
    pass


def test_criterion_6_oracle_suite():
    i4 = QuadForm((1, 1, 1, 1, 0, 0, 0, 0, 0, 0))
    assert congruence_count_oracle(i4.gram, 3, 1) == 1152
    assert local_density(i4, 3) * 3 ** 6 == 1152
    # closed form vs exhaustive count for every diagonal unimodular class
    # over Z_3 of dimension <= 4 (diagonal entries from the two unit
    # square classes)
    for n in range(1, 5):
        for twos in range(n + 1):
            diag = [1] * (n - twos) + [2] * twos
            g = linalg.matrix([[diag[i] if i == j else 0 for j in range(n)]
                               for i in range(n)])
            alpha = local_density_odd(jordan_split(g, 3))
            assert congruence_count_oracle(g, 3, 1) == \
                alpha * 3 ** (n * (n - 1) // 2), diag
    # 2x2 Z_2-equivalence decisions vs brute-force transform search mod 2^5
    small = [linalg.matrix(m) for m in (
        [[1, 0], [0, 1]], [[1, 0], [0, 3]], [[1, 0], [0, 5]],
        [[1, 0], [0, 7]], [[2, 1], [1, 2]], [[0, 1], [1, 0]],
        [[1, 0], [0, 2]], [[1, 0], [0, 6]], [[2, 0], [0, 2]],
    )]
    for i, a in enumerate(small):
        for b in small[i:]:
            decided = equivalent_over_zp(a, b, 2)
            assert decided == _brute_equivalent_mod32(a, b), (a, b)


def _brute_equivalent_mod32(a, b):
    """Any X mod 32, invertible mod 2, with X^T a X = b (mod 32)?"""
    import numpy as np

    p, q, r = a[0][0], a[0][1], a[1][1]
    s, t, u = b[0][0], b[0][1], b[1][1]
    rng32 = np.arange(32, dtype=np.int64)
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


def _random_unimodular(rng, n):
    while True:
        t = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
        if abs(linalg.det(linalg.matrix(t))) == 1:
            return t


def test_criterion_7_property_suites():
    rng = random.Random(20260823)
    # canonical-symbol invariance under >= 20 random unimodular transforms
    for form in (GOLDEN, QuadForm((1, 1, 1, 1, 1, 1, 1, 1, 1, 1))):
        g2 = form.gram_doubled
        d = discriminant_of(form)
        primes = [2] + [p for p in (3, 5, 19) if d % p == 0]
        base = {2: canonicalize_2(symbol_2(g2))}
        for p in primes[1:]:
            base[p] = symbol_odd_p(form.gram, p)
        for _ in range(20):
            tm = linalg.matrix(_random_unimodular(rng, 4))
            transformed = linalg.congruent(tm, g2)
            assert canonicalize_2(symbol_2(transformed)) == base[2]
            half = linalg.scale(transformed, Fraction(1, 2))
            for p in primes[1:]:
                assert symbol_odd_p(half, p) == base[p]
    # Hilbert product formula on random rationals
    for _ in range(50):
        a = Fraction(rng.randint(-40, 40) or 1, rng.randint(1, 12))
        b = Fraction(rng.randint(-40, 40) or 1, rng.randint(1, 12))
        primes = {2}
        for x in (a, b):
            for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
                if x.numerator % q == 0 or x.denominator % q == 0:
                    primes.add(q)
        product = -1 if a < 0 and b < 0 else 1  # the real place
        for p in sorted(primes):
            product *= hilbert_symbol(a, b, p)
        assert product == 1, (a, b)
    # parser round trip byte identity
    for tag in ("golden", "clean"):
        ds = parse_main_table((FIXTURES / f"main_{tag}.txt").read_text())
        parse_appendix((FIXTURES / f"appendix_{tag}.txt").read_text(), ds)
        text = emit_normalized(ds)
        assert emit_normalized(parse_normalized(text)) == text
    # audit determinism: repeated runs give byte-identical reports
    ds = parse_main_table((FIXTURES / "main_golden.txt").read_text())
    parse_appendix((FIXTURES / "appendix_golden.txt").read_text(), ds)
    reports = {emit_report(run_audit(ds), "machine") for _ in range(3)}
    assert len(reports) == 1

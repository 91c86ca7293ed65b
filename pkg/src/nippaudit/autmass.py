"""Automorphism counts, local densities, and masses of quaternary forms.

All arithmetic is exact: vectors are enumerated with rational Cholesky
bounds, densities and masses are Fractions throughout.
"""
from __future__ import annotations

from fractions import Fraction
from math import isqrt

from . import linalg
from .arith import (DomainError, fundamental_discriminant, kronecker_symbol,
                    legendre_symbol, odd_prime_divisors, unit_part, valuation)
from .jordan import JordanSplitting, split_form
from .linalg import Matrix
from .model import QuadForm, discriminant_of, is_positive_definite


def _cholesky(gram: Matrix) -> list[list[Fraction]]:
    """Upper-triangular data q with Q(x) = sum_i q[i][i] (x_i + sum_{j>i} q[i][j] x_j)^2."""
    n = len(gram)
    a = [[Fraction(x) for x in row] for row in gram]
    for i in range(n):
        if a[i][i] <= 0:
            raise DomainError("Cholesky needs a positive definite matrix")
        for j in range(i + 1, n):
            a[j][i] = a[i][j]
            a[i][j] = a[i][j] / a[i][i]
        for j in range(i + 1, n):
            for k in range(j, n):
                a[j][k] -= a[j][i] * a[i][k]
    return a


def _isqrt_floor(x: Fraction) -> int:
    """floor(sqrt(x)) for a nonnegative rational."""
    if x < 0:
        return -1
    return isqrt(x.numerator * x.denominator) // x.denominator


def short_vectors(gram: Matrix, bound: Fraction) -> dict[Fraction, list[tuple[int, ...]]]:
    """All vectors with 0 < x^T gram x <= bound, up to sign (one of +-x listed).

    Returned as value -> vectors, for a positive definite symmetric matrix.
    """
    n = len(gram)
    q = _cholesky(gram)
    out: dict[Fraction, list[tuple[int, ...]]] = {}
    x = [0] * n

    def rec(i: int, remaining: Fraction) -> None:
        # remaining = bound - sum of completed outer terms
        if i < 0:
            val = bound - remaining
            if val > 0:
                out.setdefault(val, []).append(tuple(x))
            return
        center = -sum(q[i][j] * x[j] for j in range(i + 1, n))
        # t ranges over [center - sqrt(radius), center + sqrt(radius)]; the
        # integer span bound is padded by 1 and re-checked exactly below
        radius = remaining / q[i][i]
        span = _isqrt_floor(radius) + 1
        t = (center - span).__ceil__()
        hi = center + span
        while t <= hi:
            d = Fraction(t) - center
            used = q[i][i] * d * d
            if used <= remaining:
                x[i] = t
                rec(i - 1, remaining - used)
            t += 1
        x[i] = 0

    rec(n - 1, Fraction(bound))
    # keep one of each +-pair: drop vectors whose first nonzero entry is negative
    for val, vecs in out.items():
        out[val] = [v for v in vecs
                    if next((c for c in v if c != 0), 0) > 0]
    return {val: vecs for val, vecs in out.items() if vecs}


def _isometries(gram_a: Matrix, gram_b: Matrix, count_only: bool,
                limit: int | None = None):
    """Count (or detect) integral X with X^T gram_a X = gram_b.

    Columns of X are images of the standard basis of the gram_b lattice:
    column j must have gram_a-length gram_b[j][j] and prescribed
    gram_a-inner products with the earlier columns.
    """
    n = len(gram_b)
    bound = max(gram_b[j][j] for j in range(n))
    table = short_vectors(gram_a, bound)
    # candidate vectors per column, both signs
    cand = []
    for j in range(n):
        vecs = table.get(Fraction(gram_b[j][j]), [])
        cand.append([v for v in vecs] + [tuple(-c for c in v) for v in vecs])
    cols: list[tuple[int, ...]] = []
    found = 0

    def inner(u, v):
        return sum(u[i] * gram_a[i][j] * v[j] for i in range(n) for j in range(n))

    def rec(j: int):
        nonlocal found
        if j == n:
            found += 1
            return found if not count_only else None
        for v in cand[j]:
            if all(inner(cols[i], v) == gram_b[i][j] for i in range(j)):
                cols.append(v)
                r = rec(j + 1)
                cols.pop()
                if r is not None:
                    return r
                if limit is not None and found >= limit:
                    return found
        return None

    rec(0)
    return found


def aut_order(form: QuadForm) -> int:
    """Order of the integral automorphism group O(L) of a definite form.

    Exact backtracking over short vectors; e.g. 384 for the sum of four
    squares and 96 for x1^2+x2^2+x3^2+2*x4^2.
    """
    if not is_positive_definite(form):
        raise DomainError("automorphism counting needs a definite form")
    return _isometries(form.gram, form.gram, count_only=True)


# ---------------------------------------------------------------------------
# local densities
#
# Convention: alpha_p = N(p^r) / p^{r n(n-1)/2} for stable r, where N(p^r)
# counts matrices X mod p^r with X^T M X = M as quadratic forms (doubled
# diagonal matched mod 2 p^r at p = 2). Pinned against exhaustive counts:
# alpha_3(diag(1,3)) = 12, alpha_3(I_4) = 128/81, alpha_2(<u>) = 4, etc.


def _diag_factor(species: int, p: int) -> Fraction:
    """Product measure of the orthogonal group of a given species over Z_p."""
    t = abs(species) // 2
    if species == 0:
        return Fraction(1)
    if species % 2:  # odd species 2t+1
        out = Fraction(2)
        for i in range(1, t + 1):
            out *= 1 - Fraction(1, p ** (2 * i))
        return out
    sign = 1 if species > 0 else -1
    out = 2 * (1 - sign * Fraction(1, p ** t))
    for i in range(1, t):
        out *= 1 - Fraction(1, p ** (2 * i))
    return out


def _scale_exponent(constituents: list[tuple[int, int]]) -> int:
    """E = sum_i s_i n_i(n_i+1)/2 + sum_{i<j} min(s_i,s_j) n_i n_j."""
    e = 0
    for i, (s_i, n_i) in enumerate(constituents):
        e += s_i * n_i * (n_i + 1) // 2
        for s_j, n_j in constituents[i + 1:]:
            e += min(s_i, s_j) * n_i * n_j
    return e


def _odd_species(n: int, det_unit: Fraction, p: int) -> int:
    if n % 2:
        return n
    eps = legendre_symbol(Fraction((-1) ** (n // 2)) * det_unit, p)
    return eps * n


def local_density_odd(split: JordanSplitting) -> Fraction:
    """alpha_p from a Jordan splitting at an odd prime."""
    p = split.prime
    if p == 2:
        raise DomainError("use local_density_2 at p = 2")
    shape = []
    out = Fraction(1)
    for s in split.scales():
        blocks = split.blocks_at(s)
        n = sum(len(b) for b in blocks)
        d = Fraction(1)
        for b in blocks:
            d *= unit_part(linalg.det(b), p)
        out *= _diag_factor(_odd_species(n, d, p), p)
        shape.append((s, n))
    return out * Fraction(p) ** _scale_exponent(shape)


# ---------------------------------------------------------------------------
# 2-adic density
#
# alpha_2 is computed from the canonical 2-adic symbol of the doubled Gram
# matrix as 2^E times a product of per-constituent factors. Every rule and
# constant below was measured, not copied: the factor table is solved from
# exact congruence-count sweeps (ranks 1-4, all unit classes) and from the
# masses of exhaustively enumerated genera of small discriminant, where
# alpha_2 is the unique unknown in the mass identity. The solved table
# reproduces every measurement with no residual.

# per-constituent factors for free (no type I neighbour at scale +-1)
# constituents, keyed by dimension and canonical symbol data
_FACTOR_II_FREE = {(2, 1): Fraction(1), (2, -1): Fraction(3),
                   (4, 1): Fraction(9, 8), (4, -1): Fraction(15, 8)}
_FACTOR_II_BOUND = {(2, 1): Fraction(3, 4)}
# bound type I constituents lose their oddity dependence entirely
_FACTOR_I_BOUND = {1: Fraction(4), 2: Fraction(8), 3: Fraction(24)}
# free type I dim 2: by oddity class; dims 3 and 4: by (det mod 8, oddity)
_FACTOR_I2_FREE = {0: Fraction(8), 2: Fraction(16),
                   4: Fraction(8), 6: Fraction(16)}
_FACTOR_I4_FREE = {(1, 0): Fraction(256), (1, 4): Fraction(768),
                   (5, 0): Fraction(768), (5, 4): Fraction(256),
                   (3, 2): Fraction(384), (3, 6): Fraction(384),
                   (7, 2): Fraction(384), (7, 6): Fraction(384)}


def _det_mod8_from_sign(n: int, sign: int, oddity: int) -> int:
    """Recover det mod 8 of an odd constituent from (sign, oddity).

    Uses trace = det + n - 1 (mod 4), which holds for any odd diagonal
    form; together with sign (det = +-1 vs +-3 mod 8) this pins det mod 8.
    """
    cands = (1, 7) if sign == 1 else (3, 5)
    for d in cands:
        if (oddity - d - (n - 1)) % 4 == 0:
            return d
    raise DomainError("inconsistent sign/oddity combination")


def _constituent_factor(dim: int, typ: str, sign: int, oddity: int,
                        bound: bool) -> Fraction:
    if typ == "II":
        table = _FACTOR_II_BOUND if bound else _FACTOR_II_FREE
        key = (dim, sign)
        if key not in table:
            raise DomainError(
                f"uncalibrated 2-adic constituent: II dim {dim} sign {sign}"
                f" bound={bound}")
        return table[key]
    if bound:
        if dim not in _FACTOR_I_BOUND:
            raise DomainError(f"uncalibrated bound type I dim {dim}")
        return _FACTOR_I_BOUND[dim]
    if dim == 1:
        return Fraction(4)
    if dim == 2:
        return _FACTOR_I2_FREE[oddity % 8]
    det = _det_mod8_from_sign(dim, sign, oddity)
    if dim == 3:
        return Fraction(96) if det * oddity % 8 == 3 else Fraction(32)
    key = (det, oddity % 8)
    if key not in _FACTOR_I4_FREE:
        raise DomainError(f"uncalibrated free type I dim 4 class {key}")
    return _FACTOR_I4_FREE[key]


def alpha_2_from_canonical(entries) -> Fraction:
    """alpha_2 from a canonical 2-adic symbol of the doubled Gram matrix.

    entries: ((scale, dim, sign, type, oddity), ...). The exponent rule:
    with tau = scale for type II and scale - 1 for type I constituents,
    E = sum tau_i n_i(n_i+1)/2 + sum_{i<j} min(tau_i, tau_j) n_i n_j, plus,
    for each pair of type I constituents, n_i n_j less 1 when their scale
    gap is at most 2.
    """
    ents = list(entries)
    taus = [s if t == "II" else s - 1 for (s, n, e, t, o) in ents]
    exp = 0
    for i, (s, n, e, t, o) in enumerate(ents):
        exp += taus[i] * n * (n + 1) // 2
        for j in range(i + 1, len(ents)):
            sj, nj, ej, tj, oj = ents[j]
            exp += min(taus[i], taus[j]) * n * nj
            if t == "I" and tj == "I":
                exp += n * nj - (1 if abs(s - sj) <= 2 else 0)
    out = Fraction(2) ** exp
    type_i_scales = {s for (s, n, e, t, o) in ents if t == "I"}
    for i, (s, n, e, t, o) in enumerate(ents):
        bound = any(abs(s - s2) == 1 for s2 in type_i_scales if s2 != s)
        out *= _constituent_factor(n, t, e, o, bound)
    return out


def local_density_2(form: QuadForm) -> Fraction:
    """alpha_2 of a quaternary form, from its canonical 2-adic symbol."""
    from .symbol import canonicalize_2, symbol_2

    sym = canonicalize_2(symbol_2(form.gram_doubled))
    return alpha_2_from_canonical(sym.entries)


def local_density(form: QuadForm, p: int) -> Fraction:
    """Siegel local density alpha_p = stable congruence count / p^{6r}.

    For p not dividing 2*disc this is the standard value
    2 (1 - p^-2)(1 - chi(p) p^-2) with chi the quadratic character of the
    square class of the discriminant.
    """
    if p == 2:
        return local_density_2(form)
    d = discriminant_of(form)
    if d % p:
        d0 = fundamental_discriminant(d)
        chi = kronecker_symbol(d0, p)
        return 2 * (1 - Fraction(1, p * p)) * (1 - Fraction(chi, p * p))
    return local_density_odd(split_form(form, p))


def nipp_density(form: QuadForm, p: int) -> Fraction:
    """Local density in the normalization used by the ingested tables.

    Calibrated against the published density pair of the one worked
    example: the tabulated value equals alpha_p * p^ceil(v/2) where v is
    the p-valuation of the discriminant (2-adic pair 3072 = 8 * 384 with
    v = 6, odd pair 1440 = 19 * (1440/19) with v = 1; the erroneous
    tabulated 2-adic value 98304 is also exactly 8 times alpha_2 of the
    erroneous splitting's class, confirming the map on a second input).
    """
    v = valuation(discriminant_of(form), p)
    return local_density(form, p) * Fraction(p) ** ((v + 1) // 2)


def mass_factor_2(form: QuadForm) -> Fraction:
    """2-adic mass factor: 64 / alpha_2 (constant pinned by exact anchors)."""
    return Fraction(64) / local_density_2(form)


DEFAULT_ORACLE_BUDGET = 10 ** 8


def congruence_count_oracle(gram: Matrix, p: int, r: int,
                            budget: int | None = None) -> int:
    """#{X mod p^r : X^T G X = G as quadratic forms mod p^r}, exhaustively.

    G is the doubled matrix 2*gram at p = 2 (diagonal congruence then taken
    mod 2^{r+1}, off-diagonal mod 2^r); at odd p the congruence is entrywise
    mod p^r on gram itself. The nominal candidate space p^(r n^2) must not
    exceed the budget (NIPPAUDIT_ORACLE_BUDGET overrides the default 10^8);
    the actual sweep prunes column by column, so admissible instances run in
    seconds. Purely independent of the closed-form density code.
    """
    import os

    n = len(gram)
    if budget is None:
        budget = int(os.environ.get("NIPPAUDIT_ORACLE_BUDGET",
                                    DEFAULT_ORACLE_BUDGET))
    if p ** (r * n * n) > budget:
        raise DomainError(
            f"oracle budget exceeded: {p}^{r * n * n} candidates")

    m = p ** r
    if p == 2:
        g = [[x * 2 for x in row] for row in gram]
        diag_mod = 2 * m
    else:
        g = [[x for x in row] for row in gram]
        diag_mod = m
    for i in range(n):
        for j in range(n):
            v = Fraction(g[i][j])
            if v.denominator % p == 0:
                raise DomainError("gram entry not p-integral")
            inv = pow(v.denominator, -1, diag_mod * p)
            g[i][j] = v.numerator * inv % (diag_mod * p)

    vecs = []
    stack = [()]
    for _ in range(n):
        stack = [v + (c,) for v in stack for c in range(m)]
    for v in stack:
        q = sum(g[i][j] * v[i] * v[j] for i in range(n) for j in range(n))
        vecs.append((v, q % diag_mod))
    by_norm: dict[int, list] = {}
    for v, q in vecs:
        by_norm.setdefault(q, []).append(v)

    def inner(u, v):
        return sum(u[i] * g[i][j] * v[j]
                   for i in range(n) for j in range(n)) % m

    count = 0
    cols: list[tuple[int, ...]] = []

    def rec(j: int) -> None:
        nonlocal count
        if j == n:
            count += 1
            return
        for v in by_norm.get(g[j][j] % diag_mod, []):
            if all(inner(cols[i], v) == g[i][j] % m for i in range(j)):
                cols.append(v)
                rec(j + 1)
                cols.pop()

    rec(0)
    return count


def z_equivalent(form_a: QuadForm, form_b: QuadForm) -> bool:
    """True iff the forms are integrally equivalent (exact isometry search)."""
    if form_a.coeffs == form_b.coeffs:
        return True
    if discriminant_of(form_a) != discriminant_of(form_b):
        return False
    return _isometries(form_a.gram, form_b.gram, count_only=False, limit=1) > 0


# ---------------------------------------------------------------------------
# mass

def _bernoulli2(x: Fraction) -> Fraction:
    return x * x - x + Fraction(1, 6)


def b2_chi(d0: int) -> Fraction:
    """Generalized Bernoulli number B_{2,chi} for chi = kronecker(d0, .)."""
    dd = abs(d0)
    total = Fraction(0)
    for a in range(1, dd + 1):
        chi = kronecker_symbol(d0, a)
        if chi:
            total += chi * _bernoulli2(Fraction(a, dd))
    return dd * total


def _standard_local_mass(p: int, chi_p: int) -> Fraction:
    """Local mass of a quaternary unimodular lattice at a good prime."""
    return 1 / (2 * (1 - Fraction(1, p * p)) * (1 - Fraction(chi_p, p * p)))


def _exact_isqrt(x: Fraction) -> Fraction:
    num, den = x.numerator, x.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn != num or rd * rd != den:
        raise DomainError(f"{x} is not a perfect square")
    return Fraction(rn, rd)


def siegel_mass(form: QuadForm) -> Fraction:
    """Mass of the genus of a quaternary form (Siegel-Minkowski, exact).

    mass = (1/6144) |B_{2,chi}| sqrt(d^5 / d0^3) prod_{p | 2d} m_p / st_p,
    where d = det(2M), d0 the fundamental discriminant attached to d,
    chi = kronecker(d0, .), st_p the good-prime local mass, m_p the local
    mass at a bad prime: 1/alpha_p at odd p and the 2-adic factor of
    mass_factor_2 at p = 2. The absolute constant and the local factors are
    pinned by exact anchors (sum of four squares: 1/384; the determinant-5
    and determinant-4 root lattices: 1/240, 1/1152) and by genus sums
    1/|Aut| over exhaustively enumerated small discriminants.
    """
    d = discriminant_of(form)
    d0 = fundamental_discriminant(d)
    mass = Fraction(1, 6144) * abs(b2_chi(d0))
    mass *= _exact_isqrt(Fraction(d) ** 5 / Fraction(d0) ** 3)
    for p in [2] + odd_prime_divisors(d):
        chi_p = kronecker_symbol(d0, p)
        if p == 2:
            m_p = mass_factor_2(form)
        else:
            m_p = 1 / local_density_odd(split_form(form, p))
        mass *= m_p / _standard_local_mass(p, chi_p)
    return mass

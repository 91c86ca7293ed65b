"""Quadratic-form data model: coefficient tuples, Gram matrices, invariants.

A quaternary form is given by ten integer coefficients in the order
[f11, f22, f33, f44, f12, f13, f23, f14, f24, f34]; the associated
half-integral Gram matrix M has M[i][i] = f_ii and M[i][j] = f_ij / 2.
The doubled matrix 2M is integral with even diagonal, and the table
discriminant is det(2M).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm

from . import linalg
from .arith import DomainError, hilbert_symbol, odd_prime_divisors
from .linalg import Matrix

# Index pairs for the off-diagonal coefficients, in Nipp's order.
_OFFDIAG = ((0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3))


class NotPositiveDefiniteError(DomainError):
    pass


@dataclass(frozen=True)
class QuadForm:
    """A quaternary integral quadratic form, by its ten Nipp coefficients."""

    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) != 10 or not all(isinstance(c, int) for c in self.coeffs):
            raise DomainError("a quaternary form needs 10 integer coefficients")
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @property
    def gram(self) -> Matrix:
        return gram_from_coeffs(self.coeffs)

    @property
    def gram_doubled(self) -> Matrix:
        return linalg.scale(self.gram, 2)

    def is_primitive(self) -> bool:
        return gcd(*self.coeffs) == 1


def gram_from_coeffs(coeffs) -> Matrix:
    """Symmetric half-integral Gram matrix M of a coefficient 10-tuple."""
    coeffs = list(coeffs)
    if len(coeffs) != 10:
        raise DomainError("expected 10 coefficients")
    m = [[Fraction(0)] * 4 for _ in range(4)]
    for i in range(4):
        m[i][i] = Fraction(coeffs[i])
    for (i, j), c in zip(_OFFDIAG, coeffs[4:]):
        m[i][j] = m[j][i] = Fraction(c, 2)
    return tuple(tuple(row) for row in m)


def coeffs_from_gram(m: Matrix) -> tuple[int, ...]:
    """Inverse of gram_from_coeffs; requires a half-integral symmetric matrix."""
    out = []
    for i in range(4):
        if m[i][i].denominator != 1:
            raise DomainError("diagonal must be integral")
        out.append(int(m[i][i]))
    for i, j in _OFFDIAG:
        c = 2 * m[i][j]
        if c.denominator != 1:
            raise DomainError("doubled off-diagonal must be integral")
        out.append(int(c))
    return tuple(out)


def is_positive_definite(form: QuadForm) -> bool:
    """True iff all four leading principal minors of M are positive."""
    return all(d > 0 for d in linalg.leading_principal_minors(form.gram))


def discriminant_of(form: QuadForm) -> int:
    """det(2M); e.g. 1216 for the form [1,1,11,11,1,0,0,1,0,8]."""
    d = linalg.det(form.gram_doubled)
    if d <= 0:
        raise NotPositiveDefiniteError("form is degenerate or indefinite")
    assert d.denominator == 1
    return int(d)


def relevant_primes(form: QuadForm) -> list[int]:
    """[2] plus the odd primes dividing the discriminant."""
    return [2] + odd_prime_divisors(discriminant_of(form))


def compute_level(form: QuadForm) -> int:
    """Smallest N > 0 with N * (2M)^-1 integral and of even diagonal."""
    d = linalg.det(form.gram_doubled)
    if d == 0:
        raise DomainError("degenerate form has no level")
    inv = linalg.inverse(form.gram_doubled)
    n = 1
    for i in range(4):
        for j in range(4):
            entry = inv[i][j] if i != j else inv[i][j] / 2
            n = lcm(n, entry.denominator)
    return n


def diagonalize_over_q(m: Matrix) -> list[Fraction]:
    """Diagonal entries of a rational diagonalization of a symmetric matrix.

    Symmetric Gaussian elimination; when a diagonal pivot vanishes, a row
    (and column) with a usable entry is mixed in first. Requires m
    nondegenerate.
    """
    n = len(m)
    a = [list(row) for row in m]
    diag: list[Fraction] = []
    rows = list(range(n))
    for step in range(n):
        live = rows[step:]
        piv = next((r for r in live if a[r][r] != 0), None)
        if piv is None:
            # all diagonal entries zero: pick r, s with a[r][s] != 0, add row/col s to r
            found = None
            for r in live:
                for s in live:
                    if s != r and a[r][s] != 0:
                        found = (r, s)
                        break
                if found:
                    break
            if not found:
                raise DomainError("degenerate form cannot be diagonalized")
            r, s = found
            for k in range(n):
                a[r][k] += a[s][k]
            for k in range(n):
                a[k][r] += a[k][s]
            piv = r
        i = rows.index(piv)
        rows[step], rows[i] = rows[i], rows[step]
        p = a[piv][piv]
        diag.append(p)
        for r in rows[step + 1:]:
            if a[r][piv] != 0:
                f = a[r][piv] / p
                for k in range(n):
                    a[r][k] -= f * a[piv][k]
                for k in range(n):
                    a[k][r] -= f * a[k][piv]
    return diag


def hasse_symbol_of_gram(m: Matrix, p: int, convention: str = "nipp") -> int:
    """Hasse symbol of a nondegenerate symmetric rational matrix at p.

    convention "nipp": product over i < j of (a_i, a_j)_p for a rational
    diagonalization diag(a_1..a_n); this matches Nipp's tabulated column.
    convention "cassels": additionally multiplied by prod_i (a_i, a_i)_p,
    i.e. the product over i <= j.
    """
    diag = diagonalize_over_q(m)
    out = 1
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            out *= hilbert_symbol(diag[i], diag[j], p)
    if convention == "cassels":
        for a in diag:
            out *= hilbert_symbol(a, a, p)
    elif convention != "nipp":
        raise DomainError(f"unknown Hasse convention {convention!r}")
    return out


def hasse_symbol_of_form(form: QuadForm, p: int, convention: str = "nipp") -> int:
    return hasse_symbol_of_gram(form.gram, p, convention)


@dataclass(frozen=True)
class FormRecord:
    """One main-table row: a form plus its tabulated invariants."""

    form: QuadForm
    level: int
    hasse: dict[int, int] = field(compare=False)
    aut_count: int = 0

    def __post_init__(self) -> None:
        if self.aut_count and self.aut_count % 2:
            raise DomainError("automorphism count must be even (-1 is always there)")


@dataclass(frozen=True)
class SplittingData:
    """Parsed appendix annotation for one (genus, prime) pair."""

    density: Fraction
    splitting_tokens: str
    gram: Matrix  # materialized block-diagonal matrix, Nipp normalization


@dataclass(frozen=True)
class GenusRecord:
    """One genus: its forms, mass, and per-prime appendix annotations."""

    discriminant: int
    genus_id: int
    forms: tuple[FormRecord, ...]
    mass: Fraction
    appendix: dict[int, SplittingData] = field(compare=False, default_factory=dict)

    def __post_init__(self) -> None:
        if self.mass <= 0:
            raise DomainError("mass must be positive")

    @property
    def key(self) -> tuple[int, int]:
        return (self.discriminant, self.genus_id)

    def expected_appendix_primes(self) -> list[int]:
        return [2] + odd_prime_divisors(self.discriminant)

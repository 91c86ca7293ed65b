"""Exact rational and elementary p-adic arithmetic.

Everything here is pure and exact: rationals are `fractions.Fraction`,
integers are Python ints, and no floating point is used anywhere.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Rat = Union[int, Fraction]


class DomainError(ValueError):
    """Raised when an operation is applied outside its domain (e.g. at 0)."""


def _as_fraction(x: Rat) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def is_prime(n: int) -> bool:
    """Deterministic primality test, adequate for table-sized inputs."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    # Deterministic Miller-Rabin for n < 3.3e24 with this witness set.
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def odd_prime_divisors(n: int) -> list[int]:
    """Ascending odd prime divisors of n > 0 (trial division)."""
    if n <= 0:
        raise DomainError("n must be positive")
    while n % 2 == 0:
        n //= 2
    out = []
    p = 3
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 2
    if n > 1:
        out.append(n)
    return out


def valuation(x: Rat, p: int) -> int:
    """p-adic valuation of a nonzero rational: x = p**v * (unit of Z_p)."""
    x = _as_fraction(x)
    if x == 0:
        raise DomainError("valuation of 0 is undefined")
    if p < 2 or not is_prime(p):
        raise DomainError(f"{p} is not prime")
    v = 0
    n = x.numerator
    while n % p == 0:
        n //= p
        v += 1
    d = x.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


def unit_part(x: Rat, p: int) -> Fraction:
    """The p-adic unit u with x = p**valuation(x, p) * u."""
    x = _as_fraction(x)
    return x / Fraction(p) ** valuation(x, p)


@dataclass(frozen=True)
class UnitClass2:
    """A nonzero element of Q_2 modulo squares of 2-adic units.

    value = 2**valuation * u with u an odd unit; unit_mod8 = u mod 8.
    Two rationals lie in the same class of Q_2*/(unit squares) iff their
    UnitClass2 values are equal.
    """

    valuation: int
    unit_mod8: int

    def __post_init__(self) -> None:
        if self.unit_mod8 not in (1, 3, 5, 7):
            raise DomainError("unit_mod8 must be odd, reduced mod 8")


def square_class_mod8(x: Rat) -> UnitClass2:
    """Valuation and odd part mod 8 of a nonzero rational, as a 2-adic class."""
    x = _as_fraction(x)
    if x == 0:
        raise DomainError("0 has no square class")
    v = valuation(x, 2)
    u = unit_part(x, 2)
    num = u.numerator % 8
    den = u.denominator % 8
    # num/den mod 8: every odd residue is self-inverse mod 8.
    return UnitClass2(v, (num * den) % 8)


def legendre_symbol(a: Rat, p: int) -> int:
    """Legendre symbol (a|p) for an odd prime p, extended to p-units.

    Rational a is allowed as long as its denominator is prime to p.
    Returns 0 when p divides a.
    """
    if p == 2 or not is_prime(p):
        raise DomainError(f"{p} is not an odd prime")
    a = _as_fraction(a)
    if a.denominator % p == 0:
        raise DomainError("denominator not prime to p")
    r = a.numerator * pow(a.denominator, -1, p) % p
    if r == 0:
        return 0
    s = pow(r, (p - 1) // 2, p)
    return 1 if s == 1 else -1


def hilbert_symbol(a: Rat, b: Rat, p: int) -> int:
    """Hilbert symbol (a, b)_p over Q_p for a finite prime p."""
    a = _as_fraction(a)
    b = _as_fraction(b)
    if a == 0 or b == 0:
        raise DomainError("Hilbert symbol requires nonzero arguments")
    alpha = valuation(a, p)
    beta = valuation(b, p)
    u = unit_part(a, p)
    v = unit_part(b, p)
    if p != 2:
        sign = 1
        if (alpha * beta) % 2 == 1 and p % 4 == 3:
            sign = -sign
        if beta % 2 == 1:
            sign *= legendre_symbol(u, p)
        if alpha % 2 == 1:
            sign *= legendre_symbol(v, p)
        return sign
    # p = 2: (a,b)_2 = (-1)^{eps(u)eps(v) + alpha*omega(v) + beta*omega(u)}
    u8 = square_class_mod8(u).unit_mod8
    v8 = square_class_mod8(v).unit_mod8
    eps_u = (u8 - 1) // 2 % 2
    eps_v = (v8 - 1) // 2 % 2
    omega_u = (u8 * u8 - 1) // 8 % 2
    omega_v = (v8 * v8 - 1) // 8 % 2
    e = eps_u * eps_v + alpha * omega_v + beta * omega_u
    return -1 if e % 2 else 1


def kronecker_symbol(a: int, n: int) -> int:
    """Kronecker symbol (a|n) for arbitrary integer n."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -1
    # factor out 2s from n
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 == 1 and a % 8 in (3, 5):
            sign = -sign
    a %= n
    if n == 1:
        return sign
    # Jacobi symbol by quadratic reciprocity.
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a %= n
    return sign if n == 1 else 0


def squarefree_part(n: int) -> int:
    """Largest squarefree divisor class: n = squarefree_part(n) * square."""
    if n == 0:
        raise DomainError("0 has no squarefree part")
    sign = -1 if n < 0 else 1
    n = abs(n)
    out = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            if e % 2:
                out *= p
        p += 1 if p == 2 else 2
    return sign * out * n


def fundamental_discriminant(n: int) -> int:
    """Fundamental discriminant of Q(sqrt(n)); 1 when n is a square."""
    m = squarefree_part(n)
    if m == 1:
        return 1
    return m if m % 4 == 1 else 4 * m

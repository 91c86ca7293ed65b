"""p-adic Jordan splittings by exact symmetric reduction over Z_p.

The splitting of a symmetric matrix G with p-integral rational entries is
an orthogonal sum of p-power-scaled unimodular blocks: for odd p every
block is 1-dimensional; for p = 2 a block is either a 1-dimensional odd
unit or a 2-dimensional even unimodular block.

For a quaternary form the 2-adic machinery always operates on the doubled
Gram matrix 2M (integral, even diagonal), so that block entries stay
2-integral; see `split_form`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .arith import DomainError, valuation
from .linalg import Matrix
from .model import QuadForm


@dataclass(frozen=True)
class JordanSplitting:
    """Ordered p-power-scaled unimodular constituents of a symmetric matrix."""

    prime: int
    constituents: tuple[tuple[int, Matrix], ...]  # (scale_exp, unimodular block)

    def blocks_at(self, scale: int) -> list[Matrix]:
        return [b for s, b in self.constituents if s == scale]

    def scales(self) -> list[int]:
        out = []
        for s, _ in self.constituents:
            if not out or out[-1] != s:
                out.append(s)
        return out

    def determinant_valuation(self) -> int:
        return sum(s * len(b) + valuation(linalg.det(b), self.prime)
                   for s, b in self.constituents)


def _check_p_integral(g: Matrix, p: int) -> None:
    for row in g:
        for x in row:
            if x.denominator % p == 0:
                raise DomainError(f"entry {x} is not {p}-integral")


def jordan_split(gram: Matrix, p: int) -> JordanSplitting:
    """Jordan splitting over Z_p of a nondegenerate p-integral matrix."""
    _check_p_integral(gram, p)
    if linalg.det(gram) == 0:
        raise DomainError("degenerate matrix has no Jordan splitting")
    a = [list(row) for row in gram]
    idx = list(range(len(gram)))
    constituents: list[tuple[int, Matrix]] = []
    while idx:
        s, pivot = _min_valuation_pivot(a, idx, p)
        if len(pivot) == 1 or p != 2:
            i = pivot[0] if len(pivot) == 1 else _diagonalize_pivot(a, idx, p, pivot)
            block = linalg.matrix([[a[i][i] / Fraction(p) ** s]])
            constituents.append((s, block))
            _eliminate(a, idx, [i])
            idx.remove(i)
        else:
            i, j = pivot
            block = linalg.matrix([
                [a[i][i] / Fraction(p) ** s, a[i][j] / Fraction(p) ** s],
                [a[i][j] / Fraction(p) ** s, a[j][j] / Fraction(p) ** s],
            ])
            constituents.append((s, block))
            _eliminate(a, idx, [i, j])
            idx.remove(i)
            idx.remove(j)
    constituents.sort(key=lambda c: (c[0], len(c[1])))
    return JordanSplitting(p, tuple(constituents))


def _min_valuation_pivot(a, idx, p):
    """Minimal-valuation pivot: (valuation, [i]) or (valuation, [i, j]).

    Diagonal pivots win ties (so type-I content splits off first at p=2);
    otherwise the lexicographically smallest position is used.
    """
    best_v = None
    best = None
    for pos, i in enumerate(idx):
        if a[i][i] != 0:
            v = valuation(a[i][i], p)
            if best_v is None or v < best_v:
                best_v, best = v, [i]
    for pos, i in enumerate(idx):
        for j in idx[pos + 1:]:
            if a[i][j] != 0:
                v = valuation(a[i][j], p)
                if best_v is None or v < best_v:
                    best_v, best = v, [i, j]
    assert best is not None
    return best_v, best


def _diagonalize_pivot(a, idx, p, pivot):
    """Odd p: turn a minimal off-diagonal pivot (i, j) into a diagonal one.

    Adding row/column j to i makes a[i][i] = a_ii + 2 a_ij + a_jj, whose
    valuation equals the pivot's since 2 is a unit and the diagonal terms
    have strictly larger valuation.
    """
    i, j = pivot
    n = len(a)
    for k in range(n):
        a[i][k] += a[j][k]
    for k in range(n):
        a[k][i] += a[k][j]
    return i


def _eliminate(a, idx, piv):
    """Clear rows/columns of idx \\ piv against the pivot block piv."""
    rest = [r for r in idx if r not in piv]
    block = [[a[i][j] for j in piv] for i in piv]
    inv = linalg.inverse(linalg.matrix(block))
    # rows of B * P^{-1} for the cross block B = a[rest][piv]
    for r in rest:
        coefs = [sum(a[r][piv[k]] * inv[k][t] for k in range(len(piv)))
                 for t in range(len(piv))]
        for k in range(len(a)):
            a[r][k] -= sum(c * a[piv[t]][k] for t, c in enumerate(coefs))
    for r in rest:
        for t in piv:
            a[t][r] = a[r][t] = Fraction(0)


def split_form(form: QuadForm, p: int) -> JordanSplitting:
    """Jordan splitting of a quaternary form at p.

    Odd p: splits the half-integral Gram matrix M (halves are units).
    p = 2: splits the doubled matrix 2M, keeping all entries 2-integral;
    scale exponents are therefore one higher than in Nipp's normalization,
    where the displayed splitting matrices multiply out to M rather than 2M.
    """
    gram = form.gram_doubled if p == 2 else form.gram
    return jordan_split(gram, p)


def reassemble(split: JordanSplitting) -> Matrix:
    """Block-diagonal matrix sum of p^scale * block."""
    blocks = [linalg.scale(b, Fraction(split.prime) ** s)
              for s, b in split.constituents]
    if not blocks:
        return ()
    return linalg.block_diag(blocks)

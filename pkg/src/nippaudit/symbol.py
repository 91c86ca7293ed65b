"""Genus symbols and Z_p-equivalence decisions.

Odd p: the scale/dimension/sign list read off a Jordan splitting is a
complete invariant.

p = 2: constituents additionally carry type (I = has odd diagonal part,
II = even) and oddity (trace of the odd part mod 8). Distinct Jordan
splittings of one form can disagree in signs and oddities; the canonical
reduction below (oddity fusion within compartments, sign walking along
trains) erases exactly that freedom. Its correctness certificate in this
package is agreement with brute-force transform searches on small forms
plus corpus-wide invariance checks.

All 2-adic symbols are computed from the doubled Gram matrix (integral,
even diagonal) so that constituent entries stay 2-integral.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .arith import DomainError, legendre_symbol, unit_part
from .jordan import JordanSplitting, jordan_split
from .linalg import Matrix
from .model import QuadForm, discriminant_of, relevant_primes


@dataclass(frozen=True)
class OddSymbol:
    """Complete Z_p-invariant at an odd prime: (scale, dim, sign) entries."""

    prime: int
    entries: tuple[tuple[int, int, int], ...]


@dataclass(frozen=True)
class Symbol2:
    """2-adic symbol: (scale, dim, sign, type, oddity) per nonzero scale.

    sign is +1 when the constituent determinant is ±1 mod 8, -1 for ±3;
    type is "I" when the constituent has an odd 1-dimensional part, else
    "II"; oddity is the trace of the odd part mod 8 (0 for type II).
    """

    entries: tuple[tuple[int, int, int, str, int], ...]


@dataclass(frozen=True)
class CanonicalSymbol2:
    """Symbol2 after oddity fusion and sign walking; a complete invariant."""

    entries: tuple[tuple[int, int, int, str, int], ...]


def _unit_det_sign_2(d: Fraction) -> int:
    u = unit_part(d, 2)
    u8 = u.numerator * u.denominator % 8
    return 1 if u8 in (1, 7) else -1


def symbol_odd_p(gram: Matrix, p: int) -> OddSymbol:
    """Scale/dim/sign symbol of a nondegenerate p-integral matrix, odd p."""
    if p == 2:
        raise DomainError("use symbol_2 at p = 2")
    split = jordan_split(gram, p)
    entries = []
    for s in split.scales():
        blocks = split.blocks_at(s)
        d = Fraction(1)
        n = 0
        for b in blocks:
            d *= linalg.det(b)
            n += len(b)
        entries.append((s, n, legendre_symbol(unit_part(d, p), p)))
    return OddSymbol(p, tuple(entries))


def symbol_2(gram: Matrix) -> Symbol2:
    """2-adic symbol of a nondegenerate 2-integral matrix.

    The caller is responsible for passing the doubled Gram matrix when the
    input stems from a half-integral quadratic form.
    """
    split = jordan_split(gram, 2)
    return symbol_2_from_splitting(split)


def symbol_2_from_splitting(split: JordanSplitting) -> Symbol2:
    if split.prime != 2:
        raise DomainError("not a 2-adic splitting")
    entries = []
    for s in split.scales():
        blocks = split.blocks_at(s)
        d = Fraction(1)
        n = 0
        oddity = 0
        has_odd = False
        for b in blocks:
            d *= linalg.det(b)
            n += len(b)
            if len(b) == 1:
                has_odd = True
                u = unit_part(b[0][0], 2)
                oddity += u.numerator * u.denominator % 8
        # even 2x2 blocks beside an odd entry diagonalize with oddity
        # contribution 0 for either determinant class (established by
        # exhaustive representation-count matching, e.g. <1>+A = <3,3,3>,
        # <5>+B = <1,1,3>, <3>+A = <1,1,1>, <1>+B = <1,3,5>)
        entries.append((s, n, _unit_det_sign_2(d),
                        "I" if has_odd else "II", oddity % 8))
    return Symbol2(tuple(entries))


def compartments_of(entries) -> list[list[int]]:
    """Maximal runs of type-I entries at consecutive scales (indices)."""
    comps: list[list[int]] = []
    current: list[int] = []
    for i, e in enumerate(entries):
        if e[3] == "I":
            if current and entries[current[-1]][0] == e[0] - 1:
                current.append(i)
            else:
                if current:
                    comps.append(current)
                current = [i]
        else:
            if current:
                comps.append(current)
            current = []
    if current:
        comps.append(current)
    return comps


def trains_of(entries) -> list[list[int]]:
    """Maximal runs of entries whose scale gaps are at most 2 (indices).

    A gap of exactly 2 leaves a zero-dimensional form at the intermediate
    scale, which still glues the train together; a gap of 3 or more breaks
    it.
    """
    trains: list[list[int]] = []
    current: list[int] = []
    for i, e in enumerate(entries):
        if current and e[0] - entries[current[-1]][0] <= 2:
            current.append(i)
        else:
            if current:
                trains.append(current)
            current = [i]
    if current:
        trains.append(current)
    return trains


def _legal_walks(entries, trains, comp_of_entry) -> list[tuple[int, int]]:
    """Index pairs between which a primitive sign walk is a Z_2-equivalence.

    Within one train, two entries may exchange a sign flip when their
    scales are adjacent and at least one entry is type I, or when their
    scales differ by two, both entries are type I, and they lie in
    different compartments (inside one compartment that flip is the
    composite of two adjacent walks). Walks between two type-II entries
    and walks with a type-II entry across a gap of two change the class.
    All of this is established against exhaustive transform searches and
    representation-count invariants on 2-, 3- and 4-dimensional forms.
    """
    out = []
    for train in trains:
        for a in range(len(train)):
            for b in range(a + 1, len(train)):
                i, j = train[a], train[b]
                gap = entries[j][0] - entries[i][0]
                types = (entries[i][3], entries[j][3])
                if gap == 1 and "I" in types:
                    out.append((i, j))
                elif (gap == 2 and types == ("I", "I")
                        and comp_of_entry[i] != comp_of_entry[j]):
                    out.append((i, j))
    return out


def canonicalize_2(sym: Symbol2) -> CanonicalSymbol2:
    """Canonical reduction: oddity fusion, then minimal sign-walk orbit.

    Oddity fusion: within each compartment only the total oddity is an
    invariant; it is collected on the compartment's first entry.

    Sign walking: a legal walk (see _legal_walks) flips the signs of two
    entries and adds 4 to the fused oddity of every compartment containing
    one of the walked scales. The canonical symbol is the lexicographically
    least (signs, oddities) state reachable by walks, computed by explicit
    closure over the orbit (at most 2^k * 8^c states for k entries and c
    compartments, tiny for quaternary forms).
    """
    comps, states = _walk_orbit(sym.entries)
    return CanonicalSymbol2(_apply_state(sym.entries, comps, min(states)))


def _walk_orbit(raw_entries):
    """Compartments and the full set of (signs, fused oddities) walk states.

    A state encodes each entry's sign as a bit (0 for +1) and each
    compartment's fused oddity; the orbit is closed under the legal walks.
    Not every state in the orbit is itself the symbol of a form (sign and
    oddity constraints inside a compartment can conflict), but the orbit,
    and hence its minimum, is the same for every symbol of the class.
    """
    comps = compartments_of(raw_entries)
    trains = trains_of(raw_entries)

    fused = [sum(raw_entries[i][4] for i in comp) % 8 for comp in comps]
    comp_of_entry = {}
    for ci, comp in enumerate(comps):
        for i in comp:
            comp_of_entry[i] = ci

    walks = _legal_walks(raw_entries, trains, comp_of_entry)
    start = (tuple(0 if e[2] == 1 else 1 for e in raw_entries), tuple(fused))
    seen = {start}
    frontier = [start]
    while frontier:
        signs, oddities = frontier.pop()
        for i, j in walks:
            s = list(signs)
            s[i] ^= 1
            s[j] ^= 1
            o = list(oddities)
            for ci in {comp_of_entry[k] for k in (i, j) if k in comp_of_entry}:
                o[ci] = (o[ci] + 4) % 8
            state = (tuple(s), tuple(o))
            if state not in seen:
                seen.add(state)
                frontier.append(state)
    return comps, seen


def _apply_state(raw_entries, comps, state):
    """Entries rewritten with a state's signs and compartment oddities."""
    signs, oddities = state
    entries = [list(e) for e in raw_entries]
    for i, e in enumerate(entries):
        e[2] = 1 if signs[i] == 0 else -1
    for comp in comps:
        for i in comp:
            entries[i][4] = 0
    for ci, comp in enumerate(comps):
        entries[comp[0]][4] = oddities[ci]
    return tuple(tuple(e) for e in entries)


# canonical representative dictionary: even unimodular 2x2 blocks
BLOCK_A = linalg.matrix([[2, 1], [1, 2]])   # det 3, "minus" even block
BLOCK_B = linalg.matrix([[0, 1], [1, 0]])   # det -1, "plus" even block


def _type_i_units(dim: int, sign: int, oddity: int) -> tuple[int, ...] | None:
    """Units from {1,3,5,7} with given product-sign and trace mod 8."""
    from itertools import combinations_with_replacement

    for combo in combinations_with_replacement((1, 3, 5, 7), dim):
        d = 1
        for u in combo:
            d = d * u % 8
        s = 1 if d in (1, 7) else -1
        if s == sign and sum(combo) % 8 == oddity % 8:
            return combo
    return None


def canonical_gram(canon: CanonicalSymbol2) -> Matrix:
    """A block-diagonal representative whose canonical symbol equals canon.

    Entries come from the fixed dictionary: odd units in {1,3,5,7} and the
    two even blocks. The canonical (minimal) walk state itself need not be
    realizable by such blocks, so the least realizable state of the orbit
    is materialized instead; it canonicalizes back to the same symbol.
    """
    comps, states = _walk_orbit(canon.entries)
    entries = None
    realized: dict[int, tuple] = {}
    for state in sorted(states):
        candidate = _apply_state(canon.entries, comps, state)
        choices: dict[int, tuple] = {}
        for comp in comps:
            total = sum(candidate[i][4] for i in comp) % 8
            choice = _realize_compartment(candidate, comp, total)
            if choice is None:
                break
            choices.update(choice)
        else:
            entries, realized = candidate, choices
            break
    if entries is None:
        raise DomainError("no realizable state in the walk orbit")
    blocks: list[Matrix] = []
    for i, (s, n, sign, typ, oddity) in enumerate(entries):
        scale = Fraction(2) ** s
        if typ == "II":
            blocks.extend(linalg.scale(b, scale)
                          for b in _type_ii_blocks(n, sign))
        else:
            for u in realized[i]:
                blocks.append(linalg.scale(linalg.matrix([[u]]), scale))
    return linalg.block_diag(blocks)


def _type_ii_blocks(dim: int, sign: int) -> list[Matrix]:
    if dim % 2:
        raise DomainError("type II constituents have even dimension")
    k = dim // 2
    # det(B^k) = (-1)^k = +-1: sign +; swapping one B for A gives 3*(-1)^(k-1): sign -
    base = [BLOCK_B] * k
    if sign == -1:
        base[0] = BLOCK_A
    return base


def _realize_compartment(entries, comp, total):
    """Units per compartment entry matching signs and total oddity, or None."""
    from itertools import product as iproduct

    options = []
    for i in comp:
        _, n, sign, _, _ = entries[i]
        per_entry = []
        for oddity in range(8):
            combo = _type_i_units(n, sign, oddity)
            if combo is not None:
                per_entry.append(combo)
        options.append(per_entry)
    for pick in iproduct(*options):
        if sum(sum(c) for c in pick) % 8 == total:
            return dict(zip(comp, pick))
    return None


def equivalent_over_zp(gram_a: Matrix, gram_b: Matrix, p: int) -> bool:
    """Z_p-equivalence of two nondegenerate symmetric rational matrices.

    At p = 2 the inputs are compared through their doubled matrices, so
    half-integral quadratic-form Grams and Nipp appendix splittings can be
    passed directly.
    """
    if len(gram_a) != len(gram_b):
        raise DomainError("dimension mismatch")
    if p == 2:
        a2 = linalg.scale(gram_a, 2)
        b2 = linalg.scale(gram_b, 2)
        return canonicalize_2(symbol_2(a2)) == canonicalize_2(symbol_2(b2))
    return symbol_odd_p(gram_a, p) == symbol_odd_p(gram_b, p)


def same_genus(forms: list[QuadForm]) -> bool:
    """True iff all forms share discriminant and Z_p-class at every p | 2d."""
    if not forms:
        raise DomainError("empty form list")
    first = forms[0]
    d = discriminant_of(first)
    for f in forms[1:]:
        if discriminant_of(f) != d:
            return False
    primes = relevant_primes(first)
    for f in forms[1:]:
        for p in primes:
            if not equivalent_over_zp(first.gram, f.gram, p):
                return False
    return True

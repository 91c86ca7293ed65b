"""Parsing of table files into records and the normalized dataset format.

Raw main-table and appendix files are plain text; their layout is supplied
by a small format descriptor (JSON: markers, field orders, separators), so
layout quirks are configuration, not code. The normalized dataset emitted
by :func:`emit_normalized` is a deterministic JSON document and is the
canonical interchange consumed by the audit.

Appendix splitting expressions use the bracketed notation
``[2A]+[(58/3)+(38/29)]``: ``qA`` is the even block [[q, q/2], [q/2, q]],
``qB`` the hyperbolic block [[0, q/2], [q/2, 0]], and ``(r)`` a rational
diagonal entry.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .arith import DomainError
from .linalg import Matrix
from .model import FormRecord, GenusRecord, QuadForm, SplittingData

DEFAULT_DESCRIPTOR = {
    "comment_prefixes": ["#"],
    "main": {
        "genus_marker": "GENUS",
        "genus_fields": ["discriminant", "genus_id", "mass"],
        "form_marker": "FORM",
        "form_fields": ["coeffs", "level", "hasse", "aut"],
    },
    "appendix": {
        "record_marker": "APX",
        "fields": ["discriminant", "genus_id", "prime", "density", "splitting"],
    },
}


class ParseError(DomainError):
    def __init__(self, message: str, source: str = "", line_no: int = 0):
        self.source = source
        self.line_no = line_no
        super().__init__(f"{source}:{line_no}: {message}" if source else message)


# ---------------------------------------------------------------------------
# splitting expressions


@dataclass(frozen=True)
class EvenBlock:
    letter: str           # "A" or "B"
    scale: Fraction       # the q of "qA"

    def token(self) -> str:
        q = self.scale
        prefix = "" if q == 1 else str(q)
        return f"{prefix}{self.letter}"

    def matrix(self) -> Matrix:
        q = self.scale
        if self.letter == "A":
            return linalg.matrix([[q, q / 2], [q / 2, q]])
        return linalg.matrix([[0, q / 2], [q / 2, 0]])


@dataclass(frozen=True)
class DiagonalEntry:
    value: Fraction

    def token(self) -> str:
        return f"({self.value})"

    def matrix(self) -> Matrix:
        return linalg.matrix([[self.value]])


@dataclass(frozen=True)
class SplittingExpr:
    """Parsed appendix splitting: bracketed groups of blocks and entries."""

    groups: tuple[tuple[object, ...], ...]

    @property
    def constituents(self) -> tuple[object, ...]:
        return tuple(item for group in self.groups for item in group)

    def matrix(self) -> Matrix:
        blocks = [item.matrix() for item in self.constituents]
        return linalg.block_diag(blocks)

    def token(self) -> str:
        return "+".join(
            "[" + "+".join(item.token() for item in group) + "]"
            for group in self.groups)


_RATIONAL_RE = re.compile(r"-?\d+(?:/\d+)?")
_BLOCK_RE = re.compile(r"(-?\d+(?:/\d+)?)?([AB])")


def _parse_item(token: str, pos: int) -> EvenBlock | DiagonalEntry:
    token = token.strip()
    if token.startswith("(") and token.endswith(")"):
        inner = token[1:-1].strip()
        if not _RATIONAL_RE.fullmatch(inner):
            raise ParseError(f"bad diagonal entry {token!r} at position {pos}")
        value = Fraction(inner)
        if value == 0:
            raise ParseError(f"zero diagonal entry at position {pos}")
        return DiagonalEntry(value)
    m = _BLOCK_RE.fullmatch(token)
    if m:
        q = Fraction(m.group(1)) if m.group(1) else Fraction(1)
        return EvenBlock(m.group(2), q)
    raise ParseError(f"unknown splitting token {token!r} at position {pos}")


def parse_splitting_expr(text: str, p: int) -> SplittingExpr:
    """Parse a splitting expression such as "[2A]+[(58/3)+(38/29)]"."""
    s = text.replace(" ", "")
    groups: list[tuple] = []
    i = 0
    while i < len(s):
        if s[i] == "+" and groups:
            i += 1
            continue
        if s[i] != "[":
            raise ParseError(f"expected '[' at position {i} in {text!r}")
        j = s.find("]", i)
        if j < 0:
            raise ParseError(f"unclosed '[' at position {i} in {text!r}")
        body = s[i + 1:j]
        items = []
        # split on '+' at depth 0 of parentheses
        depth = 0
        start = 0
        parts = []
        for k, ch in enumerate(body):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "+" and depth == 0:
                parts.append(body[start:k])
                start = k + 1
        parts.append(body[start:])
        for part in parts:
            items.append(_parse_item(part, i))
        groups.append(tuple(items))
        i = j + 1
    if not groups:
        raise ParseError(f"empty splitting expression {text!r}")
    expr = SplittingExpr(tuple(groups))
    if p == 2:
        for item in expr.constituents:
            if isinstance(item, DiagonalEntry) and item.value.denominator % 2 == 0:
                raise ParseError(
                    f"diagonal entry {item.value} is not 2-integral in {text!r}")
    return expr


# ---------------------------------------------------------------------------
# raw table files


@dataclass
class RawDataset:
    """Parsed corpus: genus records plus per-record source locations."""

    genera: list[GenusRecord] = field(default_factory=list)
    source_manifest: list[dict] = field(default_factory=list)

    def by_key(self) -> dict[tuple[int, int], GenusRecord]:
        return {g.key: g for g in self.genera}


def _lines(text: str, comment_prefixes) -> list[tuple[int, str]]:
    out = []
    for no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if any(stripped.startswith(c) for c in comment_prefixes):
            continue
        out.append((no, stripped))
    return out


def _parse_hasse(token: str, source: str, no: int) -> dict[int, int]:
    out: dict[int, int] = {}
    if token in ("-", ""):
        return out
    for piece in token.split(","):
        if ":" not in piece:
            raise ParseError(f"bad Hasse token {piece!r}", source, no)
        p_str, v_str = piece.split(":")
        out[int(p_str)] = int(v_str)
    return out


def parse_main_table(text: str, descriptor: dict | None = None,
                     source: str = "<main>") -> RawDataset:
    """Parse a main-table file: genus headers followed by their form lines."""
    desc = descriptor or DEFAULT_DESCRIPTOR
    main = desc["main"]
    genus_marker = main["genus_marker"]
    form_marker = main["form_marker"]
    dataset = RawDataset()
    current: dict | None = None

    def flush():
        nonlocal current
        if current is None:
            return
        if not current["forms"]:
            raise ParseError("genus with no forms", source, current["line"])
        dataset.genera.append(GenusRecord(
            discriminant=current["discriminant"],
            genus_id=current["genus_id"],
            forms=tuple(current["forms"]),
            mass=current["mass"]))
        dataset.source_manifest.append(
            {"source": source, "line": current["line"],
             "key": [current["discriminant"], current["genus_id"]]})
        current = None

    for no, line in _lines(text, desc.get("comment_prefixes", [])):
        tokens = line.split()
        if tokens[0] == genus_marker:
            flush()
            fields = dict(zip(main["genus_fields"], tokens[1:]))
            if len(tokens) - 1 != len(main["genus_fields"]):
                raise ParseError("wrong genus field count", source, no)
            current = {
                "discriminant": int(fields["discriminant"]),
                "genus_id": int(fields["genus_id"]),
                "mass": Fraction(fields["mass"]),
                "forms": [], "line": no,
            }
        elif tokens[0] == form_marker:
            if current is None:
                raise ParseError("form line before any genus header", source, no)
            if len(tokens) - 1 != len(main["form_fields"]):
                raise ParseError("wrong form field count", source, no)
            fields = dict(zip(main["form_fields"], tokens[1:]))
            coeffs = tuple(int(c) for c in fields["coeffs"].split(","))
            if len(coeffs) != 10:
                raise ParseError("expected 10 coefficients", source, no)
            current["forms"].append(FormRecord(
                form=QuadForm(coeffs),
                level=int(fields["level"]),
                hasse=_parse_hasse(fields["hasse"], source, no),
                aut_count=int(fields["aut"])))
        else:
            raise ParseError(f"unrecognized line {line!r}", source, no)
    flush()
    _check_ordinals(dataset, source)
    return dataset


def _check_ordinals(dataset: RawDataset, source: str) -> None:
    by_disc: dict[int, list[int]] = {}
    for g in dataset.genera:
        by_disc.setdefault(g.discriminant, []).append(g.genus_id)
    for d, ids in by_disc.items():
        if sorted(ids) != list(range(min(ids), min(ids) + len(ids))):
            raise ParseError(f"genus ordinals for discriminant {d} "
                             f"are not consecutive: {sorted(ids)}", source, 0)


def parse_appendix(text: str, dataset: RawDataset,
                   descriptor: dict | None = None,
                   source: str = "<appendix>") -> list[str]:
    """Attach appendix density/splitting records to an existing dataset.

    Returns consistency warnings (unknown genus keys, unexpected prime
    sets); warnings are recorded, never silently dropped.
    """
    desc = descriptor or DEFAULT_DESCRIPTOR
    apx = desc["appendix"]
    marker = apx["record_marker"]
    keyed = dataset.by_key()
    warnings: list[str] = []
    for no, line in _lines(text, desc.get("comment_prefixes", [])):
        tokens = line.split()
        if tokens[0] != marker:
            raise ParseError(f"unrecognized line {line!r}", source, no)
        if len(tokens) - 1 != len(apx["fields"]):
            raise ParseError("wrong appendix field count", source, no)
        fields = dict(zip(apx["fields"], tokens[1:]))
        key = (int(fields["discriminant"]), int(fields["genus_id"]))
        p = int(fields["prime"])
        expr = parse_splitting_expr(fields["splitting"], p)
        if key not in keyed:
            warnings.append(f"{source}:{no}: appendix record for unknown genus "
                            f"{key[0]}#{key[1]}")
            continue
        genus = keyed[key]
        genus.appendix[p] = SplittingData(
            density=Fraction(fields["density"]),
            splitting_tokens=expr.token(),
            gram=expr.matrix())
    for g in dataset.genera:
        expected = set(g.expected_appendix_primes())
        if g.appendix and set(g.appendix) != expected:
            warnings.append(
                f"genus {g.discriminant}#{g.genus_id}: appendix primes "
                f"{sorted(g.appendix)} differ from expected {sorted(expected)}")
    return warnings


# ---------------------------------------------------------------------------
# normalized dataset (canonical interchange)


def _frac_obj(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator}


def _frac_of(obj) -> Fraction:
    return Fraction(obj["num"], obj["den"])


def emit_normalized(dataset: RawDataset) -> str:
    """Deterministic JSON text for a dataset; byte-identical across runs."""
    genera = []
    for g in sorted(dataset.genera, key=lambda g: g.key):
        forms = [{
            "coeffs": list(f.form.coeffs),
            "level": f.level,
            "hasse": {str(p): v for p, v in sorted(f.hasse.items())},
            "aut": f.aut_count,
        } for f in g.forms]
        appendix = {str(p): {
            "density": _frac_obj(s.density),
            "splitting": s.splitting_tokens,
        } for p, s in sorted(g.appendix.items())}
        genera.append({
            "discriminant": g.discriminant,
            "genus_id": g.genus_id,
            "mass": _frac_obj(g.mass),
            "forms": forms,
            "appendix": appendix,
        })
    doc = {"format": "nippaudit-normalized", "version": 1, "genera": genera}
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def parse_normalized(text: str) -> RawDataset:
    """Inverse of emit_normalized."""
    doc = json.loads(text)
    if doc.get("format") != "nippaudit-normalized":
        raise ParseError("not a normalized dataset")
    dataset = RawDataset()
    for g in doc["genera"]:
        forms = tuple(FormRecord(
            form=QuadForm(tuple(f["coeffs"])),
            level=f["level"],
            hasse={int(p): v for p, v in f["hasse"].items()},
            aut_count=f["aut"]) for f in g["forms"])
        record = GenusRecord(
            discriminant=g["discriminant"],
            genus_id=g["genus_id"],
            forms=forms,
            mass=_frac_of(g["mass"]))
        for p_str, s in g["appendix"].items():
            p = int(p_str)
            expr = parse_splitting_expr(s["splitting"], p)
            record.appendix[p] = SplittingData(
                density=_frac_of(s["density"]),
                splitting_tokens=expr.token(),
                gram=expr.matrix())
        dataset.genera.append(record)
    dataset.genera.sort(key=lambda g: g.key)
    return dataset


def load_descriptor(path: str) -> dict:
    with open(path, encoding="utf-8") as f:
        return json.load(f)

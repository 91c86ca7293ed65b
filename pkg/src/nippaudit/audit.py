"""Cross-checks over a normalized dataset and the discrepancy report.

Every check recomputes an invariant from the form coefficients alone and
compares it with the tabulated value; disagreements become findings. The
finding set is deterministic: sorted by (discriminant, genus_id, prime,
field, form_index) and reproducible run to run.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import DomainError
from .autmass import aut_order, nipp_density, siegel_mass
from .ingest import RawDataset, emit_normalized
from .jordan import split_form
from .model import (GenusRecord, compute_level, discriminant_of,
                    hasse_symbol_of_form)
from .symbol import equivalent_over_zp, same_genus

ALL_CHECKS = ("membership", "splittings", "densities", "columns", "mass")


@dataclass(frozen=True, order=True)
class AuditFinding:
    discriminant: int
    genus_id: int
    prime: int          # 0 when the finding is not prime-specific
    field_name: str
    form_index: int     # -1 when the finding is genus-level
    expected: str       # recomputed value
    tabulated: str      # value from the dataset

    def as_dict(self) -> dict:
        return {
            "discriminant": self.discriminant,
            "genus_id": self.genus_id,
            "prime": self.prime,
            "field": self.field_name,
            "form_index": self.form_index,
            "recomputed": self.expected,
            "tabulated": self.tabulated,
        }


@dataclass
class AuditReport:
    dataset_fingerprint: str
    checks: tuple[str, ...]
    genus_count: int
    findings: list[AuditFinding] = field(default_factory=list)

    def summary(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for f in self.findings:
            out[f.field_name] = out.get(f.field_name, 0) + 1
        return out

    def flagged_genera(self) -> list[tuple[int, int]]:
        return sorted({(f.discriminant, f.genus_id) for f in self.findings})


def dataset_fingerprint(dataset: RawDataset) -> str:
    return hashlib.sha256(emit_normalized(dataset).encode()).hexdigest()


def _frac_str(x: Fraction) -> str:
    return str(x)


def _check_columns(genus: GenusRecord, findings: list) -> None:
    for i, rec in enumerate(genus.forms):
        form = rec.form
        d = discriminant_of(form)
        if d != genus.discriminant:
            findings.append(AuditFinding(genus.discriminant, genus.genus_id, 0,
                                         "discriminant", i, str(d),
                                         str(genus.discriminant)))
        level = compute_level(form)
        if level != rec.level:
            findings.append(AuditFinding(genus.discriminant, genus.genus_id, 0,
                                         "level", i, str(level), str(rec.level)))
        for p, tabulated in sorted(rec.hasse.items()):
            h = hasse_symbol_of_form(form, p)
            if h != tabulated:
                findings.append(AuditFinding(genus.discriminant, genus.genus_id,
                                             p, "hasse", i, str(h),
                                             str(tabulated)))
        if rec.aut_count:
            aut = aut_order(form)
            if aut != rec.aut_count:
                findings.append(AuditFinding(genus.discriminant, genus.genus_id,
                                             0, "aut", i, str(aut),
                                             str(rec.aut_count)))


def _check_membership(genus: GenusRecord, findings: list) -> None:
    forms = [rec.form for rec in genus.forms]
    if not same_genus(forms):
        findings.append(AuditFinding(genus.discriminant, genus.genus_id, 0,
                                     "membership", -1, "one genus",
                                     "forms are not all locally equivalent"))


def _check_splittings(genus: GenusRecord, findings: list) -> None:
    form = genus.forms[0].form
    for p, data in sorted(genus.appendix.items()):
        claimed = data.gram
        if len(claimed) != 4:
            findings.append(AuditFinding(genus.discriminant, genus.genus_id, p,
                                         "splitting", -1, "4-dimensional",
                                         data.splitting_tokens))
            continue
        if not equivalent_over_zp(form.gram, claimed, p):
            split = split_form(form, p)
            findings.append(AuditFinding(
                genus.discriminant, genus.genus_id, p, "splitting", -1,
                _splitting_str(split), data.splitting_tokens))


def _splitting_str(split) -> str:
    parts = []
    for s, b in split.constituents:
        scale = split.prime ** s
        if len(b) == 1:
            parts.append(f"({scale * b[0][0]})")
        else:
            letter = "A" if b[0][0] != 0 else "B"
            parts.append(f"{scale}{letter}" if scale != 1 else letter)
    note = "2M-scales" if split.prime == 2 else "M-scales"
    return "+".join(parts) + f" [{note}]"


def _check_densities(genus: GenusRecord, findings: list) -> None:
    form = genus.forms[0].form
    for p, data in sorted(genus.appendix.items()):
        density = nipp_density(form, p)
        if density != data.density:
            findings.append(AuditFinding(genus.discriminant, genus.genus_id, p,
                                         "density", -1, _frac_str(density),
                                         _frac_str(data.density)))


def _check_mass(genus: GenusRecord, findings: list) -> None:
    mass = siegel_mass(genus.forms[0].form)
    if mass != genus.mass:
        findings.append(AuditFinding(genus.discriminant, genus.genus_id, 0,
                                     "mass", -1, _frac_str(mass),
                                     _frac_str(genus.mass)))


_CHECK_FUNCS = {
    "columns": _check_columns,
    "membership": _check_membership,
    "splittings": _check_splittings,
    "densities": _check_densities,
    "mass": _check_mass,
}


def run_audit(dataset: RawDataset, checks=ALL_CHECKS,
              disc_min: int | None = None,
              disc_max: int | None = None) -> AuditReport:
    """Run the selected checks over every genus; findings never abort."""
    for c in checks:
        if c not in _CHECK_FUNCS:
            raise DomainError(f"unknown check {c!r}")
    report = AuditReport(
        dataset_fingerprint=dataset_fingerprint(dataset),
        checks=tuple(checks),
        genus_count=0)
    for genus in sorted(dataset.genera, key=lambda g: g.key):
        if disc_min is not None and genus.discriminant < disc_min:
            continue
        if disc_max is not None and genus.discriminant > disc_max:
            continue
        report.genus_count += 1
        for c in checks:
            _CHECK_FUNCS[c](genus, report.findings)
    report.findings.sort()
    return report


def reproduce_table1(dataset: RawDataset) -> list[tuple[int, int]]:
    """Genera flagged by the splitting and density checks (sorted keys)."""
    report = run_audit(dataset, checks=("splittings", "densities"))
    return report.flagged_genera()


def emit_report(report: AuditReport, fmt: str = "machine") -> str:
    """Deterministic report text: machine (JSON) or human (plain text)."""
    if fmt == "machine":
        doc = {
            "dataset_fingerprint": report.dataset_fingerprint,
            "checks": list(report.checks),
            "genus_count": report.genus_count,
            "finding_count": len(report.findings),
            "summary": report.summary(),
            "flagged_genera": [list(k) for k in report.flagged_genera()],
            "findings": [f.as_dict() for f in report.findings],
        }
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"
    if fmt == "human":
        lines = [
            f"dataset fingerprint: {report.dataset_fingerprint}",
            f"checks: {', '.join(report.checks)}",
            f"genera audited: {report.genus_count}",
            f"findings: {len(report.findings)}",
        ]
        for name, count in sorted(report.summary().items()):
            lines.append(f"  {name}: {count}")
        for f in report.findings:
            prime = f" p={f.prime}" if f.prime else ""
            where = f" form#{f.form_index}" if f.form_index >= 0 else ""
            lines.append(f"{f.discriminant}#{f.genus_id}{prime}{where} "
                         f"{f.field_name}: recomputed {f.expected}, "
                         f"tabulated {f.tabulated}")
        return "\n".join(lines) + "\n"
    raise DomainError(f"unknown report format {fmt!r}")

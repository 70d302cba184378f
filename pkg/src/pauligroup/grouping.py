"""Classification of Jordan-Wigner Pauli strings and label-based commuting grouping.

Every term gets a label computed from its type and the positions of its X/Y
factors; terms with equal labels form one group. No commutation graph is
built, so grouping is a single linear pass.

Label indices are 1-based and stored doubled so half-integer midpoints stay
exact integers.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .circuit import Circuit
from .fermion import CliffordMap, conjugate_hamiltonian
from .pauli import PauliHamiltonian, PauliString, commutes, conjugate_by_circuit, qubit_wise_commutes

PAULI_TYPES = (
    "I", "Z", "ZZ", "XX", "YY", "ZXX", "ZYY", "XXZ", "YYZ", "XZX", "YZY",
    "XXXX", "YYYY", "XXYY", "YYXX", "XYYX", "YXXY",
)
TWO_AXIS_TYPES = ("XX", "YY", "ZXX", "ZYY", "XXZ", "YYZ", "XZX", "YZY")
MED_BIA_TYPES = ("XXXX", "YYYY", "XXYY", "YYXX")
MED_MED_TYPES = ("XYYX", "YXXY")
FOUR_AXIS_TYPES = MED_BIA_TYPES + MED_MED_TYPES

FULL = "full"
NEAR_QWC = "near_qwc"


class ClassificationError(ValueError):
    pass


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _span(lo: int, hi: int) -> int:
    """Mask of qubits strictly between ``lo`` and ``hi``."""
    if hi - lo < 2:
        return 0
    return ((1 << (hi - lo - 1)) - 1) << (lo + 1)


def _structure(p: PauliString) -> tuple[str, list[int]]:
    """Type tag and the sorted 0-based positions of the non-Z factors."""
    nonz = _bits(p.x)
    zmask = p.z & ~p.x
    axes = "".join(p.axis(q) for q in nonz)
    if not nonz:
        count = zmask.bit_count()
        if count > 2:
            raise ClassificationError(f"'{p}': Z-only string of weight {count}")
        return ("I", "Z", "ZZ")[count], nonz
    if len(nonz) == 2:
        a, b = nonz
        if axes not in ("XX", "YY"):
            raise ClassificationError(f"'{p}': mixed endpoints {axes}")
        inner = _span(a, b)
        extra = zmask ^ inner
        if extra == 0:
            return axes, nonz
        if extra.bit_count() == 1:
            q = extra.bit_length() - 1
            if q < a:
                return "Z" + axes, nonz
            if q > b:
                return axes + "Z", nonz
            if inner >> q & 1:
                return axes[0] + "Z" + axes[1], nonz
        raise ClassificationError(f"'{p}': Z pattern matches no two-axis type")
    if len(nonz) == 4:
        i, j, k, l = nonz
        if axes not in FOUR_AXIS_TYPES:
            raise ClassificationError(f"'{p}': axis pattern {axes} is not a molecular type")
        if zmask != _span(i, j) | _span(k, l):
            raise ClassificationError(f"'{p}': Z pattern matches no four-axis type")
        return axes, nonz
    raise ClassificationError(f"'{p}': {len(nonz)} X/Y factors")


def classify_term(p: PauliString) -> str:
    return _structure(p)[0]


@dataclass(frozen=True, order=True)
class GroupLabel:
    """Group key: type tag plus doubled 1-based indices."""

    tag: str
    doubled: tuple[int, ...] = ()

    @property
    def values(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(v, 2) for v in self.doubled)

    def __str__(self) -> str:
        if not self.doubled:
            return self.tag
        return f"{self.tag}({','.join(str(v) for v in self.values)})"


G1 = GroupLabel("I", (0, 0))


def _label_from_structure(tag: str, nonz: list[int], mode: str) -> GroupLabel:
    pos = [q + 1 for q in nonz]
    if tag in ("I", "Z", "ZZ"):
        return G1
    if tag in TWO_AXIS_TYPES:
        a, b = pos
        return GroupLabel("AA", (2 * a, 2 * b))
    i, j, k, l = pos
    if mode == NEAR_QWC:
        return GroupLabel(tag, (2 * i, 2 * j, k + l))
    if tag in MED_BIA_TYPES:
        return GroupLabel(tag, (j + k, 2 * ((l - k) - (j - i))))
    return GroupLabel(tag, (i + j, k + l))


def group_label(p: PauliString, t: str | None = None, mode: str = FULL) -> GroupLabel:
    tag, nonz = _structure(p)
    if t is not None and t != tag:
        raise ClassificationError(f"'{p}' has type {tag}, not {t}")
    return _label_from_structure(tag, nonz, mode)


@dataclass
class Grouping:
    """Partition of a Hamiltonian's terms; groups hold term indices into ``hamiltonian``."""

    hamiltonian: PauliHamiltonian
    groups: dict[GroupLabel, list[int]]
    mode: str = FULL

    @property
    def n_qubits(self) -> int:
        return self.hamiltonian.n_qubits

    def __len__(self) -> int:
        return len(self.groups)

    def terms(self, label: GroupLabel) -> list[tuple[float, PauliString]]:
        return [self.hamiltonian.terms[i] for i in self.groups[label]]

    def operators(self, label: GroupLabel) -> list[PauliString]:
        return [self.hamiltonian.terms[i][1] for i in self.groups[label]]

    def items(self):
        for label, idx in self.groups.items():
            yield label, [self.hamiltonian.terms[i] for i in idx]


def group_hamiltonian(h: PauliHamiltonian, mode: str = FULL) -> Grouping:
    if mode not in (FULL, NEAR_QWC):
        raise ValueError(f"unknown grouping mode {mode!r}")
    groups: dict[GroupLabel, list[int]] = {}
    for idx, (_, p) in enumerate(h.terms):
        tag, nonz = _structure(p)
        groups.setdefault(_label_from_structure(tag, nonz, mode), []).append(idx)
    return Grouping(h, groups, mode)


# ---- near-QWC auxiliary layer ------------------------------------------------


def cnot_layer(label: GroupLabel, n_qubits: int) -> Circuit:
    """The single CNOT layer that makes a group qubit-wise commuting in near-QWC mode.

    ``AA(a, b)`` uses ``CNOT(a, b)``. A four-axis label ``(i, j, m)`` pairs
    every qubit ``u`` right of ``j`` with its mirror ``2m - u`` and applies
    ``CNOT(u, 2m - u)``. G1 needs nothing.
    """
    c = Circuit.on(n_qubits)
    if label.tag == "AA":
        a, b = (v // 2 for v in label.doubled)
        c.append("CNOT", a - 1, b - 1)
    elif len(label.doubled) == 3:
        j = label.doubled[1] // 2
        twice_mid = label.doubled[2]
        u = j + 1
        while 2 * u < twice_mid:
            v = twice_mid - u
            if v <= n_qubits:
                c.append("CNOT", u - 1, v - 1)
            u += 1
    return c


# ---- verification --------------------------------------------------------------


@dataclass
class VerificationReport:
    n_terms: int
    n_groups: int
    missing: list[int] = field(default_factory=list)
    duplicated: list[int] = field(default_factory=list)
    violations: list[tuple[str, int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.missing or self.duplicated or self.violations)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "n_terms": self.n_terms,
            "n_groups": self.n_groups,
            "missing": self.missing,
            "duplicated": self.duplicated,
            "violations": [list(v) for v in self.violations],
        }


def verify_grouping(g: Grouping, h: PauliHamiltonian | None = None) -> VerificationReport:
    """Partition check plus exhaustive pairwise check inside every group.

    Full mode checks commutation; near-QWC mode checks qubit-wise commutation
    after the group's :func:`cnot_layer`.
    """
    h = g.hamiltonian if h is None else h
    seen = Counter(i for idx in g.groups.values() for i in idx)
    report = VerificationReport(len(h), len(g.groups))
    report.missing = [i for i in range(len(h)) if seen[i] == 0]
    report.duplicated = sorted(i for i, n in seen.items() if n > 1)
    for label, idx in g.groups.items():
        ops = [h.terms[i][1] for i in idx]
        if g.mode == NEAR_QWC:
            layer = cnot_layer(label, h.n_qubits)
            ops = [conjugate_by_circuit(p, layer) for p in ops]
            ok = qubit_wise_commutes
        else:
            ok = commutes
        for a in range(len(ops)):
            for b in range(a + 1, len(ops)):
                if not ok(ops[a], ops[b]):
                    report.violations.append((str(label), idx[a], idx[b]))
    return report


# ---- statistics ----------------------------------------------------------------


def group_bound(n_qubits: int) -> int:
    return 25 * n_qubits**2 + 1


@dataclass
class StatsRecord:
    name: str
    n_qubits: int
    n_terms: int
    n_groups: int
    bound: int
    bound_ok: bool
    histogram: dict[int, int]

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["histogram"] = {str(k): v for k, v in sorted(self.histogram.items())}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def grouping_stats(g: Grouping, name: str = "") -> StatsRecord:
    sizes = Counter(len(v) for v in g.groups.values())
    bound = group_bound(g.n_qubits)
    return StatsRecord(
        name=name,
        n_qubits=g.n_qubits,
        n_terms=len(g.hamiltonian),
        n_groups=len(g.groups),
        bound=bound,
        bound_ok=len(g.groups) <= bound,
        histogram=dict(sizes),
    )


@dataclass
class ScalingFit:
    exponent: float
    prefactor: float
    records: list[StatsRecord]


def fit_scaling(records: list[StatsRecord], field_name: str = "n_groups") -> ScalingFit:
    """Least-squares fit of ``log(count)`` against ``log(n_qubits)``."""
    if len(records) < 3:
        raise ValueError("scaling fit needs at least 3 data points")
    x = np.log([r.n_qubits for r in records])
    y = np.log([getattr(r, field_name) for r in records])
    slope, intercept = np.polyfit(x, y, 1)
    return ScalingFit(float(slope), float(math.exp(intercept)), list(records))


def stats_csv(records: list[StatsRecord], fit: ScalingFit | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "n_qubits", "n_terms", "n_groups", "bound", "bound_ok"])
    for r in records:
        w.writerow([r.name, r.n_qubits, r.n_terms, r.n_groups, r.bound, int(r.bound_ok)])
    if fit is not None:
        w.writerow(["fit_exponent", f"{fit.exponent:.6f}", "", "", "", ""])
    return buf.getvalue()


def format_report(g: Grouping) -> str:
    """One line per group: ``<label> <size> <comma-separated term indices>``."""
    lines = [f"# mode {g.mode} n_qubits {g.n_qubits} terms {len(g.hamiltonian)} groups {len(g)}"]
    for label, idx in g.groups.items():
        lines.append(f"{label} {len(idx)} {','.join(map(str, idx))}")
    return "\n".join(lines) + "\n"


def transfer_grouping(g_jw: Grouping, cmap: CliffordMap) -> Grouping:
    """Carry a grouping through ``H -> U H U^dag``; each image keeps its preimage's label."""
    image = conjugate_hamiltonian(g_jw.hamiltonian, cmap)
    return Grouping(image, {k: list(v) for k, v in g_jw.groups.items()}, g_jw.mode)

"""Evolution and measurement circuit synthesis.

Rotation convention: ``RZ(theta) = exp(-i theta Z / 2)``, so ``exp(-i h t P)``
compiles to ``RZ(2 h t)`` on the qubit holding the parity of ``P``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .circuit import Circuit, Gate
from .grouping import G1, GroupLabel, cnot_layer
from .pauli import (
    PauliString,
    commutes,
    conjugate_by_circuit,
    qubit_wise_commutes,
)

INLINE, ANCILLA = "inline", "ancilla"
CHAIN, TREE = "chain", "tree"


class SynthesisError(ValueError):
    pass


# ---- single-term building blocks ----------------------------------------------


def basis_change(p: PauliString) -> Circuit:
    """H where ``p`` has X, ``RX(pi/2)`` where it has Y."""
    c = Circuit.on(p.n_qubits)
    for q, axis in p.axes().items():
        if axis == "X":
            c.append("H", q)
        elif axis == "Y":
            c.append("RX", q, angle=math.pi / 2)
    return c


def _cx(control: int, target: int) -> Gate:
    return Gate("CNOT", (control, target))


def accumulate_gates(qubits: list[int], fanout: str = CHAIN) -> list[Gate]:
    """CNOTs leaving the parity of ``qubits`` on ``qubits[-1]``.

    ``chain`` is a linear ladder; ``tree`` pairs holders each round, giving
    ``ceil(log2(len(qubits)))`` layers.
    """
    if fanout == CHAIN:
        return [_cx(a, b) for a, b in zip(qubits, qubits[1:])]
    if fanout != TREE:
        raise ValueError(f"unknown fan-out {fanout!r}")
    gates = []
    holders = list(qubits)
    while len(holders) > 1:
        nxt = []
        # pair from the end so the last qubit always survives as the root
        if len(holders) % 2:
            nxt.append(holders[0])
            holders = holders[1:]
        for a, b in zip(holders[::2], holders[1::2]):
            gates.append(_cx(a, b))
            nxt.append(b)
        holders = nxt
    return gates


def doubling_gates(holders: list[int], targets: list[int]) -> list[Gate]:
    """Copy a bit held by every qubit in ``holders`` onto ``targets``, doubling holders per layer."""
    gates = []
    holders = list(holders)
    pending = list(targets)
    while pending:
        new = []
        for h in holders:
            if not pending:
                break
            t = pending.pop(0)
            gates.append(_cx(h, t))
            new.append(t)
        holders += new
    return gates


def parity_copy_circuit(n_qubits: int) -> Circuit:
    """Copy qubit 0 onto qubits ``1..n-1`` in ``ceil(log2 n)`` CNOT layers."""
    c = Circuit.on(n_qubits)
    c.extend(doubling_gates([0], list(range(1, n_qubits))))
    return c


def synthesize_term_evolution(
    p: PauliString,
    coefficient: float,
    time: float,
    style: str = INLINE,
    fanout: str = CHAIN,
) -> Circuit:
    """Circuit for ``exp(-i * coefficient * time * p)``.

    ``inline`` accumulates parity onto the last acted qubit; ``ancilla``
    accumulates onto one extra rotation-register qubit that returns to zero.
    """
    if p.is_identity:
        raise SynthesisError("identity term contributes only a global phase")
    if not (math.isfinite(coefficient) and math.isfinite(time)):
        raise SynthesisError("coefficient and time must be finite")
    if style not in (INLINE, ANCILLA):
        raise ValueError(f"unknown style {style!r}")
    n = p.n_qubits
    change = basis_change(p)
    sign = conjugate_by_circuit(p, change).sign
    qubits = p.qubits()
    c = Circuit.on(n, 0, 1 if style == ANCILLA else 0)
    if style == INLINE:
        compute = accumulate_gates(qubits, fanout)
        pivot = qubits[-1]
    else:
        pivot = c.qubit("rotation", 0)
        if fanout == CHAIN:
            compute = [_cx(q, pivot) for q in qubits]
        else:
            compute = accumulate_gates(qubits + [pivot], TREE)
    c.extend(change.gates)
    c.extend(compute)
    c.append("RZ", pivot, angle=2 * sign * coefficient * time)
    c.extend(reversed(compute))
    c.extend(change.inverse().gates)
    return c


# ---- parallel evolution of a qubit-wise commuting group ---------------------------


def _qwc_violation(ops):
    for a in range(len(ops)):
        for b in range(a + 1, len(ops)):
            if not qubit_wise_commutes(ops[a], ops[b]):
                return ops[a], ops[b]
    return None


def common_basis_change(ops: list[PauliString], n_qubits: int) -> Circuit:
    """One basis-change layer shared by a qubit-wise commuting set."""
    bad = _qwc_violation(ops)
    if bad:
        raise SynthesisError(f"not qubit-wise commuting: '{bad[0]}' vs '{bad[1]}'")
    axes: dict[int, str] = {}
    for p in ops:
        axes.update(p.axes())
    return basis_change(PauliString.from_axes(n_qubits, axes))


def _copy_parity(source: int, parity: list[int], n_copies: int) -> list[Gate]:
    return [_cx(source, parity[0])] + doubling_gates([parity[0]], parity[1:n_copies])


def _load_stage(c: Circuit, supports: list[int]) -> list[Gate]:
    """Per system qubit: copy its parity, fan it onto the rotation qubits that need it, uncopy."""
    gates = []
    parity = [c.qubit("parity", i) for i in range(c.registers["parity"])]
    for j in range(c.n_system):
        users = [l for l, mask in enumerate(supports) if mask >> j & 1]
        if not users:
            continue
        copy = _copy_parity(c.qubit("system", j), parity, len(users))
        gates += copy
        gates += [_cx(parity[i], c.qubit("rotation", l)) for i, l in enumerate(users)]
        gates += reversed(copy)
    return gates


def _parallel_registers(supports: list[int], n_qubits: int) -> Circuit:
    n_parity = max(
        (sum(1 for m in supports if m >> j & 1) for j in range(n_qubits)), default=0
    )
    return Circuit.on(n_qubits, n_parity, len(supports))


def load_parity_stage(group: list[tuple[float, PauliString]], n_qubits: int) -> Circuit:
    """The parity-loading half of :func:`synthesize_parallel_evolution` on its own."""
    supports = [p.support for _, p in group if not p.is_identity]
    c = _parallel_registers(supports, n_qubits)
    c.extend(_load_stage(c, supports))
    return c


def synthesize_parallel_evolution(
    group: list[tuple[float, PauliString]],
    time: float,
    steps: int = 1,
    n_qubits: int | None = None,
) -> Circuit:
    """Evolve a qubit-wise commuting group with parity and rotation ancillas.

    One parity qubit per term touching the busiest system qubit, one rotation
    qubit per non-identity term. Identity terms only add a global phase and
    are dropped. Each step loads all parities, applies every RZ in one layer,
    then runs the load stage backwards; ancillas end in ``|0>``.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if not group:
        raise SynthesisError("empty group")
    n = n_qubits if n_qubits is not None else group[0][1].n_qubits
    terms = [(h, p) for h, p in group if not p.is_identity]
    ops = [p for _, p in terms]
    change = common_basis_change(ops, n)
    signed = []
    for h, p in terms:
        z = conjugate_by_circuit(p, change)
        signed.append((h * z.sign, z))
    supports = [z.support for _, z in signed]
    c = _parallel_registers(supports, n)
    load = _load_stage(c, supports)
    c.extend(change.gates)
    for _ in range(steps):
        c.extend(load)
        for l, (h, _) in enumerate(signed):
            c.append("RZ", c.qubit("rotation", l), angle=2 * h * time / steps)
        c.extend(reversed(load))
    c.extend(change.inverse().gates)
    return c


# ---- diagonalization of a fully commuting group ---------------------------------


def _vec(p: PauliString) -> int:
    return p.x | (p.z << p.n_qubits)


def _pauli(v: int, n: int) -> PauliString:
    mask = (1 << n) - 1
    return PauliString(n, v & mask, v >> n)


def _swap(v: int, n: int) -> int:
    mask = (1 << n) - 1
    return ((v & mask) << n) | (v >> n)


def _symp(v: int, w: int, n: int) -> int:
    return (v & _swap(w, n)).bit_count() & 1


class _Basis:
    """Incremental GF(2) row basis keyed by leading bit."""

    def __init__(self):
        self.rows: dict[int, int] = {}

    def reduce(self, v: int) -> int:
        while v:
            lead = v.bit_length() - 1
            if lead not in self.rows:
                return v
            v ^= self.rows[lead]
        return 0

    def add(self, v: int) -> bool:
        r = self.reduce(v)
        if r:
            self.rows[r.bit_length() - 1] = r
            return True
        return False

    def __len__(self):
        return len(self.rows)


def _nullspace(rows: list[int], width: int) -> list[int]:
    """Basis of ``{w : popcount(r & w) even for every r}``."""
    pivots: dict[int, int] = {}
    for r in rows:
        for col, prow in pivots.items():
            if r >> col & 1:
                r ^= prow
        if not r:
            continue
        col = (r & -r).bit_length() - 1
        for c2 in list(pivots):
            if pivots[c2] >> col & 1:
                pivots[c2] ^= r
        pivots[col] = r
    out = []
    for free in range(width):
        if free in pivots:
            continue
        w = 1 << free
        for col, prow in pivots.items():
            if prow >> free & 1:
                w |= 1 << col
        out.append(w)
    return out


@dataclass
class DiagonalizationPlan:
    t_ops: list[PauliString]
    sigma_ops: list[PauliString]
    circuit: Circuit
    transformed_terms: list[PauliString]  # signed Z-only images, group order

    @property
    def signs(self) -> list[int]:
        return [t.sign for t in self.transformed_terms]


def _commuting_witness(group):
    for a in range(len(group)):
        for b in range(a + 1, len(group)):
            if not commutes(group[a], group[b]):
                return group[a], group[b]
    return None


def _lagrangian_extension(group: list[PauliString], n: int) -> list[int]:
    """Independent generators of the group's span, padded to ``n`` mutually commuting rows."""
    basis = _Basis()
    rows = []
    for p in group:
        v = _vec(p)
        if basis.add(v):
            rows.append(v)
    touched = 0
    for p in group:
        touched |= p.support

    def try_add(v: int) -> bool:
        if all(_symp(v, r, n) == 0 for r in rows) and basis.add(v):
            rows.append(v)
            return True
        return False

    for q in range(n):
        if not touched >> q & 1:
            try_add(1 << (n + q))
    for q in range(n):
        for v in (1 << (n + q), 1 << q, (1 << q) | (1 << (n + q))):
            if len(rows) == n:
                break
            try_add(v)
    while len(rows) < n:
        for w in _nullspace([_swap(r, n) for r in rows], 2 * n):
            if try_add(w):
                break
        else:  # pragma: no cover - isotropic subspaces always extend
            raise SynthesisError("failed to extend commuting set")
    return rows


def _pivot_generators(rows: list[int], n: int):
    """Rewrite generators so each owns one qubit: returns (generators, sigma axes by qubit)."""
    xmask = (1 << n) - 1
    rows = list(rows)
    xrows: list[tuple[int, int]] = []  # (pivot qubit, row)
    rest = rows
    for q in range(n):
        idx = next((i for i, r in enumerate(rest) if r >> q & 1), None)
        if idx is None:
            continue
        pivot_row = rest.pop(idx)
        rest = [r ^ pivot_row if r >> q & 1 else r for r in rest]
        xrows = [(pq, r ^ pivot_row if r >> q & 1 else r) for pq, r in xrows]
        xrows.append((q, pivot_row))
    assert all(r & xmask == 0 for r in rest)
    taken = {q for q, _ in xrows}
    zrows: list[tuple[int, int]] = []
    for q in range(n):
        if q in taken:
            continue
        bit = 1 << (n + q)
        idx = next((i for i, r in enumerate(rest) if r & bit), None)
        if idx is None:
            raise SynthesisError("commuting generators lack a Z pivot")
        pivot_row = rest.pop(idx)
        rest = [r ^ pivot_row if r & bit else r for r in rest]
        zrows = [(pq, r ^ pivot_row if r & bit else r) for pq, r in zrows]
        zrows.append((q, pivot_row))
    # clear Z-pivot columns from the X rows
    cleaned = []
    for pq, r in xrows:
        for zq, zr in zrows:
            if r >> (n + zq) & 1:
                r ^= zr
        cleaned.append((pq, r))
    gens = [(q, r, "Z") for q, r in cleaned] + [(q, r, "X") for q, r in zrows]
    gens.sort()
    return gens


def diagonalize_group(group: list[PauliString], n_qubits: int | None = None) -> DiagonalizationPlan:
    """Find a Clifford ``U`` mapping a fully commuting group onto Z-only strings.

    Generators ``T_i`` of a maximal commuting set containing the group are put
    in a form where each owns a pivot qubit; ``sigma_i`` is the single-qubit
    Pauli on that pivot which anticommutes with ``T_i`` alone. Then
    ``V_i = (T_i + sigma_i)/sqrt(2)`` sends ``T_i`` to ``sigma_i``, compiled as
    ``exp(i pi/4 sigma_i) exp(i pi/4 T_i) exp(i pi/4 sigma_i)`` (global phase
    dropped), followed by H on pivots whose ``sigma`` is X.
    """
    n = n_qubits if n_qubits is not None else group[0].n_qubits
    group = [p.unsigned() for p in group]
    bad = _commuting_witness(group)
    if bad:
        raise SynthesisError(f"group does not commute: '{bad[0]}' vs '{bad[1]}'")
    if all(p.is_z_only for p in group):
        return DiagonalizationPlan(
            [PauliString.zstring(n, [q]) for q in range(n)],
            [PauliString.from_axes(n, {q: "X"}) for q in range(n)],
            Circuit.on(n),
            list(group),
        )
    gens = _pivot_generators(_lagrangian_extension(group, n), n)
    t_ops = [_pauli(r, n) for _, r, _ in gens]
    sigma_ops = [PauliString.from_axes(n, {q: a}) for q, _, a in gens]
    c = Circuit.on(n)
    quarter = -math.pi / 4  # exp(-i * (-pi/4) * P) = exp(i pi/4 P)
    for t, s in zip(t_ops, sigma_ops):
        for op in (s, t, s):
            c.extend(synthesize_term_evolution(op, 1.0, quarter, INLINE, TREE).gates)
    for q, _, a in gens:
        if a == "X":
            c.append("H", q)
    transformed = [conjugate_by_circuit(p, c) for p in group]
    for p, z in zip(group, transformed):
        if not z.is_z_only or not z.is_hermitian:
            raise SynthesisError(f"diagonalization left '{p}' as '{z}'")
    return DiagonalizationPlan(t_ops, sigma_ops, c, transformed)


# ---- group-level pre-rotation, evolution, and measurement ---------------------------


def _prerotation(
    label: GroupLabel | None, ops: list[PauliString], n: int, diagonalize: bool = False
) -> Circuit:
    """Circuit taking a group to a qubit-wise commuting set (basis change not included)."""
    if diagonalize:
        return diagonalize_group(ops, n).circuit
    if label is not None and label.tag == "AA":
        return cnot_layer(label, n)
    if label is not None and len(label.doubled) == 3:
        return cnot_layer(label, n)
    if _qwc_violation(ops) is None:
        return Circuit.on(n)
    return diagonalize_group(ops, n).circuit


def synthesize_group_evolution(
    group: list[tuple[float, PauliString]],
    time: float,
    steps: int = 1,
    label: GroupLabel | None = None,
    n_qubits: int | None = None,
    diagonalize: bool = False,
) -> Circuit:
    """``W^dag . parallel(W G W^dag) . W`` with ``W`` the group's pre-rotation.

    ``diagonalize=True`` forces ``W`` to be the full diagonalization circuit
    even when a cheaper pre-rotation exists.
    """
    n = n_qubits if n_qubits is not None else group[0][1].n_qubits
    ops = [p for _, p in group]
    w = _prerotation(label, ops, n, diagonalize)
    rotated = []
    for h, p in group:
        q = conjugate_by_circuit(p, w)
        rotated.append((h * q.sign, q.unsigned()))
    core = synthesize_parallel_evolution(rotated, time, steps, n)
    return w.compose(core).compose(w.inverse())


def synthesize_measurement_circuit(
    label: GroupLabel, group: list[PauliString], n_qubits: int
) -> tuple[Circuit, list[tuple[PauliString, int]]]:
    """Pre-rotation + Z measurement of every system qubit, and the per-term estimator map.

    Each original term maps to ``(z_string, sign)``: one shot's estimate of the
    term is ``sign * (-1)**(parity of the measured bits on z_string)``.
    """
    n = n_qubits
    if label == G1 or label.tag == "I":
        pre = Circuit.on(n)
    else:
        w = _prerotation(label, group, n)
        rotated = [conjugate_by_circuit(p, w) for p in group]
        pre = w.compose(common_basis_change(rotated, n))
    mapping = []
    for p in group:
        z = conjugate_by_circuit(p, pre)
        if not z.is_z_only:
            raise SynthesisError(f"measurement stage leaves '{p}' as '{z}'")
        mapping.append((z.unsigned(), z.sign))
    c = pre.copy()
    for q in range(n):
        c.append("MEASURE_Z", q)
    return c, mapping


def strip_measurements(c: Circuit) -> Circuit:
    return Circuit(dict(c.registers), [g for g in c.gates if g.kind != "MEASURE_Z"])


def estimate_terms(mapping: list[tuple[PauliString, int]], bits: int) -> list[int]:
    """Per-term +-1 estimates from one measured bitstring (bit ``j`` = qubit ``j``)."""
    return [s * (-1) ** ((z.z & bits).bit_count() & 1) for z, s in mapping]


def evolve_then_measure(
    label: GroupLabel,
    group: list[tuple[float, PauliString]],
    time: float,
    steps: int = 1,
    fuse: bool = True,
) -> tuple[Circuit, list[tuple[PauliString, int]]]:
    """Evolve a group and measure it; with ``fuse`` the back-to-back ``W^dag W`` pair is dropped."""
    n = group[0][1].n_qubits
    ops = [p for _, p in group]
    measure, mapping = synthesize_measurement_circuit(label, ops, n)
    if not fuse:
        evo = synthesize_group_evolution(group, time, steps, label, n)
        return evo.compose(measure), mapping
    w = _prerotation(label, ops, n)
    rotated = []
    for h, p in group:
        q = conjugate_by_circuit(p, w)
        rotated.append((h * q.sign, q.unsigned()))
    core = synthesize_parallel_evolution(rotated, time, steps, n)
    tail = Circuit(dict(measure.registers), measure.gates[len(w.gates):])
    return w.compose(core).compose(tail), mapping

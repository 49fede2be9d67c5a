"""Peephole rewrites and gate lowering.

Every pass is a pure function Circuit -> Circuit.  Correctness is never
assumed from the rewrite rules themselves: the pipeline re-checks each
transformed circuit against the dense oracle, and the test suite
exercises each rule on randomized circuits.
"""
from __future__ import annotations

import numpy as np

from . import gates
from .circuit import Circuit, Instruction
from .gates import Gate, canonical_angle, rx, rz, unitary_of
from .linalg import dist_phase
from .synth import Dressing, cached_dressing, decompose_1q, euler_xzx, euler_zxz

MAX_FIXPOINT_ROUNDS = 32


class RewriteCycleError(RuntimeError):
    """Fixpoint iteration failed to converge; a rewrite is cycling."""


# --- one-qubit simplification ----------------------------------------------


def _emit_run(run: list[Instruction], q: int) -> list[Instruction]:
    """Replace a maximal run of rotations on one wire by its minimal form.

    Keeps the (angle-canonicalized) original whenever the Euler form
    would not be shorter, so the pass never increases instruction count.
    """
    if not run:
        return []
    u = np.eye(2, dtype=complex)
    for ins in run:
        u = ins.unitary() @ u
    minimal = [
        Instruction(g, (q,), a) for g, a in decompose_1q(u)
    ]
    canonical = []
    for ins in run:
        ang = canonical_angle(ins.param)
        if abs(ang) > 1e-12:
            canonical.append(Instruction(ins.gate, (q,), ang))
    return minimal if len(minimal) <= len(canonical) else canonical


def simplify_1q(c: Circuit) -> Circuit:
    """Merge rotation runs per wire, canonicalize angles to (-pi, pi],
    drop identity rotations (2pi turns vanish up to global phase)."""
    out: list[Instruction] = []
    pending: dict[int, list[Instruction]] = {}

    def flush(q: int):
        out.extend(_emit_run(pending.pop(q, []), q))

    for ins in c.instructions:
        if ins.gate in gates.ROTATIONS:
            pending.setdefault(ins.qubits[0], []).append(ins)
            continue
        for q in ins.qubits:
            if q in pending:
                flush(q)
        out.append(ins)
    for q in sorted(pending):
        flush(q)
    return c.copy(instructions=out)


# --- Hadamard triple catalog -------------------------------------------------


def _build_h_catalog() -> list[tuple[tuple[Gate, float], ...]]:
    """All zxz / xzx triples with |angle| = pi/2 equal to H up to phase."""
    catalog = []
    h = gates.H_MAT
    for axes in ((Gate.RZ, Gate.RX, Gate.RZ), (Gate.RX, Gate.RZ, Gate.RX)):
        for signs in ((1, 1, 1), (1, 1, -1), (1, -1, 1), (-1, 1, 1),
                      (1, -1, -1), (-1, 1, -1), (-1, -1, 1), (-1, -1, -1)):
            angles = [s * np.pi / 2 for s in signs]
            u = np.eye(2, dtype=complex)
            for g, a in zip(axes, angles):
                u = (rx(a) if g is Gate.RX else rz(a)) @ u
            if dist_phase(u, h) < 1e-12:
                catalog.append(tuple(zip(axes, angles)))
    return catalog


HADAMARD_FORMS: list[tuple[tuple[Gate, float], ...]] = _build_h_catalog()


def hadamard_rewrite(c: Circuit, form: int = 0) -> Circuit:
    """Replace every H by the chosen triple-rotation form."""
    if not 0 <= form < len(HADAMARD_FORMS):
        raise ValueError(f"unknown hadamard form {form}; have {len(HADAMARD_FORMS)}")
    triple = HADAMARD_FORMS[form]
    out: list[Instruction] = []
    for ins in c.instructions:
        if ins.gate is Gate.H:
            q = ins.qubits[0]
            out.extend(Instruction(g, (q,), a) for g, a in triple)
        else:
            out.append(ins)
    return c.copy(instructions=out)


# --- Rz through iSWAP ---------------------------------------------------------


def commute_rz_iswap(c: Circuit) -> Circuit:
    """Flip each Rz that sits immediately next to an iSWAP to the other
    side, onto the other qubit (exact identity).  A second application
    restores the original placement."""
    ins = list(c.instructions)
    moved: set[int] = set()  # ids of already-flipped instructions this sweep
    i = 0
    while i < len(ins):
        if ins[i].gate is not Gate.ISWAP:
            i += 1
            continue
        a, b = ins[i].qubits
        if i > 0 and id(ins[i - 1]) not in moved:
            prev = ins[i - 1]
            if prev.gate is Gate.RZ and prev.qubits[0] in (a, b):
                other = b if prev.qubits[0] == a else a
                flipped = Instruction(Gate.RZ, (other,), prev.param, prev.label)
                ins[i - 1 : i + 1] = [ins[i], flipped]
                moved.add(id(flipped))
                i += 2
                continue
        if i + 1 < len(ins) and id(ins[i + 1]) not in moved:
            nxt = ins[i + 1]
            if nxt.gate is Gate.RZ and nxt.qubits[0] in (a, b):
                other = b if nxt.qubits[0] == a else a
                flipped = Instruction(Gate.RZ, (other,), nxt.param, nxt.label)
                ins[i : i + 2] = [flipped, ins[i]]
                moved.add(id(flipped))
                i += 2
                continue
        i += 1
    return c.copy(instructions=ins)


# --- ancilla elisions ---------------------------------------------------------


def ancilla_elide(c: Circuit) -> Circuit:
    """Drop Rz right after Init0 and right before MeasureZ on ancilla
    wires; both are invisible to the Z-basis measurement statistics."""
    ins = list(c.instructions)
    drop: set[int] = set()
    for k, cur in enumerate(ins):
        if cur.gate is Gate.INIT0:
            w = cur.qubits[0]
            for j in range(k + 1, len(ins)):
                if j in drop:
                    continue
                if w in ins[j].qubits:
                    if ins[j].gate is Gate.RZ:
                        drop.add(j)
                        continue
                    break
        elif cur.gate is Gate.MEASZ:
            w = cur.qubits[0]
            for j in range(k - 1, -1, -1):
                if j in drop:
                    continue
                if w in ins[j].qubits:
                    if ins[j].gate is Gate.RZ:
                        drop.add(j)
                        continue
                    break
    return c.copy(instructions=[x for k, x in enumerate(ins) if k not in drop])


# --- CNS fusion ----------------------------------------------------------------


def _swap_commutes_past(ins: Instruction, pair: tuple[int, int]) -> Instruction | None:
    """How instruction ins behaves when a SWAP on ``pair`` moves past it:
    unchanged (disjoint), relabeled (one-qubit gate on the pair), or
    blocked (None)."""
    a, b = pair
    touched = set(ins.qubits) & {a, b}
    if not touched:
        return ins
    if len(ins.qubits) == 1 and ins.gate not in gates.NON_UNITARY:
        mapping = {a: b, b: a}
        return ins.relabeled({q: mapping.get(q, q) for q in range(max(ins.qubits) + 1)})
    return None


def fuse_cns(c: Circuit) -> Circuit:
    """Merge CNOT(a,b) / SWAP(a,b) pairs into CNS.

    The pair may be separated by instructions that commute with the
    moving SWAP outright, or by one-qubit gates on the pair's wires,
    which get relabeled as the SWAP passes them.  CNOT then SWAP gives
    CNS(control, target); SWAP then CNOT gives the flipped orientation.
    The circuit unitary is preserved exactly.
    """
    ins = list(c.instructions)
    changed = True
    while changed:
        changed = False
        for k, cur in enumerate(ins):
            if cur.gate is not Gate.SWAP:
                continue
            pair = frozenset(cur.qubits)
            # backward: CNOT ... SWAP -> CNS at the CNOT slot
            j = k - 1
            relabels: list[tuple[int, Instruction]] = []
            while j >= 0:
                other = ins[j]
                if other.gate is Gate.CNOT and frozenset(other.qubits) == pair:
                    new = ins[:j]
                    new.append(Instruction(Gate.CNS, other.qubits, label=other.label))
                    seg = ins[j + 1 : k]
                    for idx, rep in relabels:
                        seg[idx - (j + 1)] = rep
                    new.extend(seg)
                    new.extend(ins[k + 1 :])
                    ins = new
                    changed = True
                    break
                rep = _swap_commutes_past(other, tuple(cur.qubits))
                if rep is None:
                    break
                if rep is not other:
                    relabels.append((j, rep))
                j -= 1
            if changed:
                break
            # forward: SWAP ... CNOT -> flipped CNS at the CNOT slot
            j = k + 1
            relabels = []
            while j < len(ins):
                other = ins[j]
                if other.gate is Gate.CNOT and frozenset(other.qubits) == pair:
                    flipped = (other.qubits[1], other.qubits[0])
                    new = ins[:k]
                    seg = ins[k + 1 : j]
                    for idx, rep in relabels:
                        seg[idx - (k + 1)] = rep
                    new.extend(seg)
                    new.append(Instruction(Gate.CNS, flipped, label=other.label))
                    new.extend(ins[j + 1 :])
                    ins = new
                    changed = True
                    break
                rep = _swap_commutes_past(other, tuple(cur.qubits))
                if rep is None:
                    break
                if rep is not other:
                    relabels.append((j, rep))
                j += 1
            if changed:
                break
    return c.copy(instructions=ins)


# --- oracle-certified block reordering -----------------------------------------


def reorder_commuting_blocks(c: Circuit, block_a: tuple[int, int], block_b: tuple[int, int]) -> Circuit:
    """Swap two contiguous instruction ranges iff the dense oracle
    certifies that their unitaries commute on the joint support.

    Ranges are half-open [start, stop) into the instruction list;
    block_a must precede block_b with no overlap.  Raises ValueError on
    non-commuting blocks: the requested rearrangement is illegal.
    """
    a0, a1 = block_a
    b0, b1 = block_b
    if not (0 <= a0 < a1 <= b0 < b1 <= len(c.instructions)):
        raise ValueError(f"bad block ranges {block_a}, {block_b}")
    seg_a = c.instructions[a0:a1]
    seg_b = c.instructions[b0:b1]
    support = sorted({q for ins in seg_a + seg_b for q in ins.qubits})
    if len(support) > 8:
        raise ValueError("joint support too large for the dense commutator check")
    wire = {q: k for k, q in enumerate(support)}
    m = len(support)

    def block_unitary(seg):
        from .linalg import embed

        u = np.eye(2**m, dtype=complex)
        for ins in seg:
            if ins.gate in gates.NON_UNITARY:
                raise ValueError("blocks with measurement/reset cannot be reordered")
            u = embed(ins.unitary(), [wire[q] for q in ins.qubits], m) @ u
        return u

    ua, ub = block_unitary(seg_a), block_unitary(seg_b)
    comm = ua @ ub - ub @ ua
    norm = float(np.max(np.abs(comm)))
    if norm > 1e-10:
        raise ValueError(f"blocks do not commute (commutator norm {norm:.3e})")
    out = (
        c.instructions[:a0]
        + seg_b
        + c.instructions[a1:b0]
        + seg_a
        + c.instructions[b1:]
    )
    return c.copy(instructions=out)


def _cleanup_once(c: Circuit, elide: bool) -> Circuit:
    c = simplify_1q(c)
    return ancilla_elide(c) if elide else c


def rz_flip_reduce(c: Circuit, elide: bool = False) -> Circuit:
    """Try flipping Rz gates across adjacent iSWAPs wherever that lets a
    subsequent merge (or, with ``elide``, an ancilla elision) shrink the
    circuit.  Greedy and monotone: a flip is kept only if the cleaned-up
    circuit gets strictly shorter, so iteration terminates.  Flips alone
    preserve the unitary exactly; only the elisions widen the
    equivalence class to measurement statistics."""
    c = _cleanup_once(c, elide)
    improved = True
    while improved:
        improved = False
        ins = c.instructions
        for k, cur in enumerate(ins):
            if cur.gate is not Gate.ISWAP:
                continue
            a, b = cur.qubits
            for j in (k - 1, k + 1):
                if not 0 <= j < len(ins):
                    continue
                nb = ins[j]
                if nb.gate is not Gate.RZ or nb.qubits[0] not in (a, b):
                    continue
                other = b if nb.qubits[0] == a else a
                flipped = Instruction(Gate.RZ, (other,), nb.param)
                trial = list(ins)
                if j < k:
                    trial[j : k + 1] = [cur, flipped]
                else:
                    trial[k : j + 1] = [flipped, cur]
                cand = _cleanup_once(c.copy(instructions=trial), elide)
                if len(cand.instructions) < len(c.instructions):
                    c = cand
                    improved = True
                    break
            if improved:
                break
    return c


def cleanup_unitary(c: Circuit, max_rounds: int = MAX_FIXPOINT_ROUNDS) -> tuple[Circuit, int]:
    """Rotation merging plus profitable Rz flips, to a fixpoint.
    Preserves the unitary up to global phase."""
    for round_no in range(1, max_rounds + 1):
        before = c.instructions
        c = rz_flip_reduce(_cleanup_once(c, elide=False), elide=False)
        if c.instructions == before:
            return c, round_no
    raise RewriteCycleError(f"no fixpoint after {max_rounds} rounds")


def cleanup_measurement(c: Circuit, max_rounds: int = MAX_FIXPOINT_ROUNDS) -> tuple[Circuit, int]:
    """Adds the ancilla elisions on top of cleanup_unitary; preserves
    measurement statistics rather than the unitary."""
    for round_no in range(1, max_rounds + 1):
        before = c.instructions
        c = rz_flip_reduce(_cleanup_once(c, elide=True), elide=True)
        if c.instructions == before:
            return c, round_no
    raise RewriteCycleError(f"no fixpoint after {max_rounds} rounds")


# --- lowering -------------------------------------------------------------------


def toffoli_network(c1: int, c2: int, t: int) -> list[Instruction]:
    """Six-CNOT realization of the doubly-controlled X, oracle-checked
    by the fixture tests.  One-bit gates are phase rotations and H."""
    T, Td = np.pi / 4, -np.pi / 4
    seq = [
        (Gate.H, (t,), None),
        (Gate.CNOT, (c2, t), None),
        (Gate.RZ, (t,), Td),
        (Gate.CNOT, (c1, t), None),
        (Gate.RZ, (t,), T),
        (Gate.CNOT, (c2, t), None),
        (Gate.RZ, (t,), Td),
        (Gate.CNOT, (c1, t), None),
        (Gate.RZ, (c2,), T),
        (Gate.RZ, (t,), T),
        (Gate.H, (t,), None),
        (Gate.CNOT, (c1, c2), None),
        (Gate.RZ, (c1,), T),
        (Gate.RZ, (c2,), Td),
        (Gate.CNOT, (c1, c2), None),
    ]
    return [Instruction(g, q, p) for g, q, p in seq]


def decompose_toffoli(c: Circuit) -> Circuit:
    out: list[Instruction] = []
    for ins in c.instructions:
        if ins.gate is Gate.TOFFOLI:
            out.extend(toffoli_network(*ins.qubits))
        else:
            out.append(ins)
    return c.copy(instructions=out)


def _iswap_template(gate: Gate) -> Dressing:
    """Cached minimal-count iSWAP dressing for a native two-qubit kind."""
    target = unitary_of(gate)
    counts = {Gate.CNS: (1,), Gate.CNOT: (2,), Gate.SWAP: (3,)}.get(gate, (1, 2, 3))
    last_error: Exception | None = None
    for k in counts:
        try:
            return cached_dressing(target, k)
        except Exception as exc:  # infeasible at this count; try deeper
            last_error = exc
    raise last_error


def lower_to_iswap(c: Circuit) -> Circuit:
    """Rewrite to the native set: Rx, Rz, iSWAP (+ Init0/MeasureZ).

    Toffoli goes through the six-CNOT network first; every two-qubit
    kind is then replaced by its synthesized iSWAP template (CNS: 1,
    CNOT: 2, SWAP: 3); H becomes a rotation triple and generic
    one-qubit gates their minimal Euler form.  Equivalent up to global
    phase.
    """
    c = decompose_toffoli(c)
    out: list[Instruction] = []
    for ins in c.instructions:
        g = ins.gate
        if g in (Gate.RX, Gate.RZ, Gate.ISWAP) or g in gates.NON_UNITARY:
            out.append(ins)
        elif g is Gate.H:
            q = ins.qubits[0]
            out.extend(Instruction(gk, (q,), a) for gk, a in HADAMARD_FORMS[0])
        elif g is Gate.GENERIC1Q:
            q = ins.qubits[0]
            out.extend(Instruction(gk, (q,), a) for gk, a in decompose_1q(ins.param))
        elif gates.ARITY[g] == 2:
            dressing = _iswap_template(g)
            for gk, qs, p in dressing.instructions(*ins.qubits):
                out.append(Instruction(gk, qs, p))
        else:
            raise ValueError(f"cannot lower {g.value}")
    return c.copy(instructions=out)

"""Equivalence oracles: statevector application, unitary comparison up
to phase/permutation/local dressing, and exact measurement-statistics
comparison for circuits with measured ancillae.

Measurement comparison computes exact ancilla-outcome marginals and the
post-measurement data states by direct marginalization, never by
sampling; the ``trials`` knob only controls how many random input
states of the data register are drawn (seeded).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, apply_to_state, circuit_unitary
from .gates import Gate, locally_equivalent
from .linalg import apply_gate_state, dist_phase, perm_matrix

MAX_ORACLE_QUBITS = 10
MAX_CHANNEL_QUBITS = 12


@dataclass(frozen=True)
class EquivalenceReport:
    equivalence: str  # exact | phase | phase+permutation | local | measurement
    equivalent: bool
    residual: float
    permutation: tuple[int, ...] | None = None
    witness: str | None = None

    def __bool__(self) -> bool:
        return self.equivalent


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return v / np.linalg.norm(v)


def apply(c: Circuit, psi: np.ndarray) -> np.ndarray:
    """Statevector after the circuit; refuses measurements."""
    if c.n > MAX_CHANNEL_QUBITS:
        raise ValueError(f"register too large: {c.n}")
    return apply_to_state(c, psi)


def equivalent(
    a: Circuit,
    b: Circuit,
    equivalence: str = "phase",
    perm: tuple[int, ...] | list[int] | None = None,
    tol: float = 1e-8,
) -> EquivalenceReport:
    """Compare two circuits under the named equivalence class.

    ``phase+permutation`` needs the candidate permutation supplied by
    the pass that produced it; there is no blind search over 9!
    candidates.  ``local`` compares two-qubit local invariants only.
    """
    if a.n != b.n:
        raise ValueError("circuits act on different register sizes")
    if a.n > MAX_ORACLE_QUBITS:
        raise ValueError(f"register too large for the dense oracle: {a.n}")

    if equivalence == "local":
        if a.n != 2:
            raise ValueError("local equivalence is defined for two-qubit circuits")
        ok = locally_equivalent(circuit_unitary(a), circuit_unitary(b), tol)
        return EquivalenceReport("local", ok, 0.0 if ok else 1.0)

    ua, ub = circuit_unitary(a), circuit_unitary(b)
    if equivalence == "phase+permutation":
        if perm is None:
            raise ValueError("phase+permutation comparison needs the candidate permutation")
        ua = perm_matrix(list(perm), a.n) @ ua
    elif perm is not None:
        raise ValueError(f"permutation given but class is {equivalence!r}")

    if equivalence == "exact":
        residual = float(np.max(np.abs(ua - ub)))
    elif equivalence in ("phase", "phase+permutation"):
        residual = dist_phase(ua, ub)
    else:
        raise ValueError(f"unknown equivalence class {equivalence!r}")
    ok = residual <= tol
    witness = None
    if not ok:
        col = int(np.argmax(np.linalg.norm(ua - ub, axis=0)))
        witness = format(col, f"0{a.n}b")
    return EquivalenceReport(equivalence, ok, residual, tuple(perm) if perm else None, witness)


# --- measurement channel ----------------------------------------------------


def measurement_channel(c: Circuit, data_state: np.ndarray) -> dict[str, tuple[float, np.ndarray]]:
    """Exact map outcome-bitstring -> (probability, post-measurement data state).

    Logical ancillae start in |0> on their initial wires, the unitary
    part runs, and each ancilla is read in the Z basis on the wire its
    qubit_map reports.  Outcome strings and the returned data states are
    ordered by ascending *logical* index, so channels of an original and
    a routed circuit compare directly.  Zero-probability outcomes are
    dropped; states are normalized.
    """
    anc = sorted(c.ancillas)
    data = [q for q in range(c.n) if q not in c.ancillas]
    full = np.zeros([2] * c.n, dtype=complex)
    src = np.asarray(data_state, dtype=complex).reshape([2] * len(data))
    idx = [slice(None) if q not in c.ancillas else 0 for q in range(c.n)]
    full[tuple(idx)] = src
    psi = full.reshape(-1)
    for ins in c.instructions:
        if ins.gate in (Gate.INIT0, Gate.MEASZ):
            continue
        psi = apply_gate_state(psi, ins.unitary(), list(ins.qubits), c.n)
    t = psi.reshape([2] * c.n)
    anc_wires = [c.qubit_map[a] for a in anc]
    data_wires = [c.qubit_map[d] for d in data]
    out: dict[str, tuple[float, np.ndarray]] = {}
    for outcome in range(2 ** len(anc)):
        bits = [(outcome >> (len(anc) - 1 - k)) & 1 for k in range(len(anc))]
        sel: list = [slice(None)] * c.n
        for w, bval in zip(anc_wires, bits):
            sel[w] = bval
        block = t[tuple(sel)]
        # remaining axes follow ascending wire order; bring them to
        # ascending logical-data order
        remaining = [w for w in range(c.n) if w not in anc_wires]
        order = [remaining.index(w) for w in data_wires]
        block = np.transpose(block, axes=order).reshape(-1)
        p = float(np.sum(np.abs(block) ** 2))
        if p > 1e-14:
            out["".join(map(str, bits))] = (p, block / np.sqrt(p))
    return out


def measurement_equivalent(
    a: Circuit,
    b: Circuit,
    trials: int = 20,
    seed: int = 0,
    tol: float = 1e-8,
) -> EquivalenceReport:
    """Exact measurement-channel comparison on random data inputs.

    Both circuits describe their own ancilla relocation through their
    qubit_map, so outcome strings and post-measurement data states are
    compared in logical terms directly.  Equivalence requires identical
    outcome distributions and, per outcome, matching post-measurement
    data states up to phase, for every sampled input.
    """
    if a.n != b.n:
        raise ValueError("circuits act on different register sizes")
    if a.ancillas != b.ancillas:
        raise ValueError("mismatched ancilla declarations")
    if a.n > MAX_CHANNEL_QUBITS:
        raise ValueError(f"register too large: {a.n}")

    n_data = a.n - len(a.ancillas)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        psi = random_state(n_data, rng)
        ch_a = measurement_channel(a, psi)
        ch_b = measurement_channel(b, psi)
        for key in sorted(set(ch_a) | set(ch_b)):
            if key not in ch_a or key not in ch_b:
                present = ch_a.get(key) or ch_b.get(key)
                return EquivalenceReport("measurement", False, present[0], b.qubit_map, witness=key)
            (pa, sa), (pb, sb) = ch_a[key], ch_b[key]
            worst = max(worst, abs(pa - pb))
            if abs(pa - pb) > tol:
                return EquivalenceReport("measurement", False, abs(pa - pb), b.qubit_map, witness=key)
            infid = 1.0 - abs(np.vdot(sa, sb))
            worst = max(worst, infid)
            if infid > tol:
                return EquivalenceReport("measurement", False, infid, b.qubit_map, witness=key)
    return EquivalenceReport("measurement", True, worst, b.qubit_map)

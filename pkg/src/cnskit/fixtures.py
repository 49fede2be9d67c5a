"""Fixture corpus: reference networks used across the test suite and the
CLI, each self-checked against its oracle on first load.

The six-CNOT three-controlled-NOT network below was found by numerical
search (figure sources for the historical layout are not machine
readable); its one-bit corrections are quarter-turn rotations and the
8x8 oracle accepts it exactly.  Its CNOT ordering is chosen so that
in-order routing on a three-site chain reproduces the published CNS
accounting (five fused gates, one standalone CNOT, qubits 1 and 2
exchanged).

The nine-qubit error-correction fixture measures the four cyclic
stabilizers  X_{i+1} Z_{i+2} Z_{i+3} X_{i+4}  (data indices mod 5, one
ancilla per stabilizer, i in {0, 1, 3, 4}) by parity accumulation:
plain CNOTs for Z factors, Hadamard-dressed CNOTs for X factors, with
the ancilla as target.  Ring layout, clockwise:

    d0  a1  d1  d2  a3  d3  a4  d4  a0

so every ancilla starts next to the first data qubit its stabilizer
reads, and the couplings can flow around the ring.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Instruction, Topology, circuit_unitary
from .gates import (
    CNOT_MAT,
    CNS_MAT,
    SWAP_MAT,
    TOFFOLI_MAT,
    Gate,
    unitary_of,
)
from .linalg import dist_phase, perm_matrix
from .synth import cached_dressing

QT = np.pi / 4  # quarter turn

FIXTURE_TOL = 1e-10


@dataclass(frozen=True)
class Fixture:
    name: str
    circuit: Circuit
    reference_unitary: np.ndarray | None = None
    documented_permutation: tuple[int, ...] | None = None
    notes: str = ""


# --- six-CNOT Toffoli network (quarter-turn one-bit gates) -------------------

_TOFFOLI_NET: list[tuple[Gate, tuple[int, ...], float | None]] = [
    (Gate.RZ, (0,), 2 * QT),
    (Gate.RZ, (2,), 3 * QT),
    (Gate.CNOT, (0, 1), None),
    (Gate.RZ, (0,), -3 * QT),
    (Gate.RX, (0,), 2 * QT),
    (Gate.RZ, (0,), -1 * QT),
    (Gate.RZ, (2,), 1 * QT),
    (Gate.RX, (2,), -3 * QT),
    (Gate.RZ, (2,), 4 * QT),
    (Gate.CNOT, (0, 2), None),
    (Gate.RZ, (1,), 3 * QT),
    (Gate.RX, (1,), 2 * QT),
    (Gate.RZ, (1,), -2 * QT),
    (Gate.CNOT, (1, 2), None),
    (Gate.RZ, (0,), 3 * QT),
    (Gate.RX, (0,), -3 * QT),
    (Gate.RZ, (0,), -3 * QT),
    (Gate.CNOT, (0, 2), None),
    (Gate.RZ, (0,), -3 * QT),
    (Gate.RX, (0,), 2 * QT),
    (Gate.RZ, (0,), -3 * QT),
    (Gate.RX, (1,), -1 * QT),
    (Gate.RZ, (1,), 2 * QT),
    (Gate.RZ, (2,), -2 * QT),
    (Gate.RX, (2,), -1 * QT),
    (Gate.CNOT, (0, 1), None),
    (Gate.RZ, (0,), -1 * QT),
    (Gate.RX, (0,), 4 * QT),
    (Gate.RZ, (0,), -2 * QT),
    (Gate.RZ, (1,), 2 * QT),
    (Gate.RX, (1,), 3 * QT),
    (Gate.RZ, (1,), 1 * QT),
    (Gate.RZ, (2,), -2 * QT),
    (Gate.RX, (2,), 2 * QT),
    (Gate.RZ, (2,), 3 * QT),
    (Gate.CNOT, (1, 2), None),
    (Gate.RZ, (0,), -1 * QT),
    (Gate.RX, (0,), 4 * QT),
    (Gate.RZ, (0,), -3 * QT),
    (Gate.RZ, (1,), 1 * QT),
    (Gate.RX, (1,), 2 * QT),
    (Gate.RZ, (1,), -3 * QT),
    (Gate.RZ, (2,), 4 * QT),
    (Gate.RX, (2,), 2 * QT),
    (Gate.RZ, (2,), 4 * QT),
]


def _toffoli_6cnot() -> Fixture:
    c = Circuit(3)
    for g, qs, p in _TOFFOLI_NET:
        c.add(g, *qs, param=p)
    return Fixture(
        "toffoli_6cnot",
        c,
        TOFFOLI_MAT,
        notes="six CNOTs, one-bit corrections are multiples of pi/4",
    )


# --- five-bit code syndrome network ------------------------------------------

# ring wires, clockwise
D = {0: 0, 1: 2, 2: 3, 3: 5, 4: 7}  # data index -> wire
A = {0: 8, 1: 1, 3: 4, 4: 6}  # stabilizer index -> ancilla wire
ECC_DATA_WIRES = tuple(D[k] for k in range(5))
ECC_ANCILLA_WIRES = tuple(A[i] for i in sorted(A))
ECC_RING = Topology("ring", 9)


def _stabilizer_reads(i: int) -> list[tuple[int, bool]]:
    """(data index, X-dressed) reads of stabilizer i, in the order the
    walking ancilla meets them (descending data index from i+4)."""
    x_support = {(i + 1) % 5, (i + 4) % 5}
    order = [(i + 4) % 5, (i + 3) % 5, (i + 2) % 5, (i + 1) % 5]
    return [(q, q in x_support) for q in order]


def _dvshor5() -> Fixture:
    c = Circuit(9, ancillas=frozenset(ECC_ANCILLA_WIRES))
    for i in sorted(A):
        a = A[i]
        c.add(Gate.INIT0, a)
        for q, dressed in _stabilizer_reads(i):
            w = D[q]
            if dressed:
                c.add(Gate.H, w)
            c.add(Gate.CNOT, w, a)
            if dressed:
                c.add(Gate.H, w)
        c.add(Gate.MEASZ, a)
    return Fixture(
        "dvshor5",
        c,
        notes="four stabilizer reads, ancilla-as-target parity form; "
        "two-qubit gates are CNOT only, one-qubit gates are H only",
    )


def _dvshor5_cns() -> Fixture:
    from .routing import route_ring_flow

    base = _dvshor5().circuit
    routed = route_ring_flow(base, ECC_RING)
    if routed is None:
        raise RuntimeError("ring flow routing failed on the syndrome fixture")
    return Fixture(
        "dvshor5_cns",
        routed,
        documented_permutation=routed.qubit_map,
        notes="flow-routed form: all but one coupling fused into CNS, "
        "data register rotated by three ring sites",
    )


def _toffoli_cns_chain() -> Fixture:
    from .routing import route_chain_exact

    base = _toffoli_6cnot().circuit
    routed = route_chain_exact(base, Topology("chain", 3))
    return Fixture(
        "toffoli_cns_chain",
        routed,
        documented_permutation=routed.qubit_map,
        notes="in-order optimal routing of the six-CNOT network: "
        "five CNS, one standalone CNOT, wires 1 and 2 exchanged",
    )


def _swap_3cnot() -> Fixture:
    c = Circuit(2)
    c.add(Gate.CNOT, 0, 1).add(Gate.CNOT, 1, 0).add(Gate.CNOT, 0, 1)
    return Fixture("swap_3cnot", c, SWAP_MAT)


def _cns_def() -> Fixture:
    c = Circuit(2)
    c.add(Gate.CNOT, 0, 1).add(Gate.SWAP, 0, 1)
    return Fixture("cns_def", c, CNS_MAT)


def _from_dressing(name: str, target: np.ndarray, n_body: int, body: Gate) -> Fixture:
    d = cached_dressing(target, n_body, body)
    c = Circuit(2)
    for g, qs, p in d.instructions(0, 1):
        c.add(g, *qs, param=p)
    return Fixture(name, c, target)


def _cnot_2iswap() -> Fixture:
    return _from_dressing("cnot_2iswap", CNOT_MAT, 2, Gate.ISWAP)


def _swap_3iswap() -> Fixture:
    return _from_dressing("swap_3iswap", SWAP_MAT, 3, Gate.ISWAP)


def _cnot_2sqrtswap() -> Fixture:
    return _from_dressing("cnot_2sqrtswap", CNOT_MAT, 2, Gate.SQRTSWAP)


_BUILDERS = {
    "swap_3cnot": _swap_3cnot,
    "cnot_2sqrtswap": _cnot_2sqrtswap,
    "cnot_2iswap": _cnot_2iswap,
    "swap_3iswap": _swap_3iswap,
    "cns_def": _cns_def,
    "toffoli_6cnot": _toffoli_6cnot,
    "toffoli_cns_chain": _toffoli_cns_chain,
    "dvshor5": _dvshor5,
    "dvshor5_cns": _dvshor5_cns,
}

_CACHE: dict[str, Fixture] = {}


def fixture_names() -> list[str]:
    return sorted(_BUILDERS)


def fixture(name: str) -> Fixture:
    """Build (and self-check) a fixture by name."""
    if name not in _BUILDERS:
        raise KeyError(f"unknown fixture {name!r}; have {', '.join(fixture_names())}")
    if name not in _CACHE:
        fx = _BUILDERS[name]()
        _self_check(fx)
        _CACHE[name] = fx
    return _CACHE[name]


def _self_check(fx: Fixture) -> None:
    """Oracle check at load; a failing fixture is a build failure."""
    if fx.reference_unitary is not None:
        u = circuit_unitary(fx.circuit.without_ancilla_ops())
        if fx.documented_permutation:
            u = perm_matrix(list(fx.documented_permutation), fx.circuit.n) @ circuit_unitary(
                fx.circuit.without_ancilla_ops()
            )
        err = dist_phase(u, fx.reference_unitary)
        if err > FIXTURE_TOL:
            raise RuntimeError(f"fixture {fx.name} fails its oracle (dist {err:.3e})")
    if fx.name == "toffoli_cns_chain":
        # permutation-corrected against the ideal three-controlled NOT
        u_out = circuit_unitary(fx.circuit)
        p = perm_matrix(list(fx.circuit.qubit_map), 3)
        err = dist_phase(u_out, p @ TOFFOLI_MAT)
        if err > FIXTURE_TOL:
            raise RuntimeError(f"fixture {fx.name} fails its oracle (dist {err:.3e})")
    if fx.name == "dvshor5_cns":
        base = fixture("dvshor5").circuit.without_ancilla_ops()
        u_out = circuit_unitary(fx.circuit.without_ancilla_ops())
        p = perm_matrix(list(fx.circuit.qubit_map), 9)
        err = dist_phase(u_out, p @ circuit_unitary(base))
        if err > FIXTURE_TOL:
            raise RuntimeError(f"fixture {fx.name} fails its oracle (dist {err:.3e})")

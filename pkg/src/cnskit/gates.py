"""Gate catalog, interaction Hamiltonians, and the two-qubit
local-equivalence classifier.

Conventions fixed here and asserted by the test suite:

* CNOT(c, t) flips t when c is 1; matrix in the lexicographic basis.
* CNS(c, t) is CNOT(c, t) followed by SWAP, truth table
  ``|x, y> -> |x XOR y, x>``.
* Rotations are ``R_a(phi) = exp(-i sigma_a phi / 2)``.
* Hamiltonian sign conventions carry the overall minus and the E/4
  factor, so one full XY period is t = pi/E.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .linalg import assert_unitary, exp_hermitian, is_hermitian, mul

SQ2 = 1.0 / np.sqrt(2.0)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H_MAT = np.array([[SQ2, SQ2], [SQ2, -SQ2]], dtype=complex)

CNOT_MAT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
SWAP_MAT = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
ISWAP_MAT = np.array([[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]], dtype=complex)
PHASEDIAG_MAT = np.diag([1, 1j, 1j, 1]).astype(complex)
# Convention: the square root reached by a half-period of the
# Heisenberg coupling (its square is SWAP exactly, no phase).
SQRTSWAP_MAT = np.array(
    [
        [1, 0, 0, 0],
        [0, (1 - 1j) / 2, (1 + 1j) / 2, 0],
        [0, (1 + 1j) / 2, (1 - 1j) / 2, 0],
        [0, 0, 0, 1],
    ],
    dtype=complex,
)
CNS_MAT = mul(SWAP_MAT, CNOT_MAT)  # |x,y> -> |x^y, x>

TOFFOLI_MAT = np.eye(8, dtype=complex)
TOFFOLI_MAT[6:, 6:] = X


def rx(phi: float) -> np.ndarray:
    c, s = np.cos(phi / 2), np.sin(phi / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def rz(phi: float) -> np.ndarray:
    return np.array([[np.exp(-1j * phi / 2), 0], [0, np.exp(1j * phi / 2)]], dtype=complex)


class Gate(enum.Enum):
    RX = "rx"
    RZ = "rz"
    H = "h"
    GENERIC1Q = "generic1q"
    CNOT = "cnot"
    SWAP = "swap"
    ISWAP = "iswap"
    SQRTSWAP = "sqrtswap"
    PHASEDIAG = "phasediag"
    CNS = "cns"
    TOFFOLI = "toffoli"
    INIT0 = "init0"
    MEASZ = "measz"


ARITY = {
    Gate.RX: 1,
    Gate.RZ: 1,
    Gate.H: 1,
    Gate.GENERIC1Q: 1,
    Gate.CNOT: 2,
    Gate.SWAP: 2,
    Gate.ISWAP: 2,
    Gate.SQRTSWAP: 2,
    Gate.PHASEDIAG: 2,
    Gate.CNS: 2,
    Gate.TOFFOLI: 3,
    Gate.INIT0: 1,
    Gate.MEASZ: 1,
}

ROTATIONS = (Gate.RX, Gate.RZ)
NON_UNITARY = (Gate.INIT0, Gate.MEASZ)

_FIXED = {
    Gate.H: H_MAT,
    Gate.CNOT: CNOT_MAT,
    Gate.SWAP: SWAP_MAT,
    Gate.ISWAP: ISWAP_MAT,
    Gate.SQRTSWAP: SQRTSWAP_MAT,
    Gate.PHASEDIAG: PHASEDIAG_MAT,
    Gate.CNS: CNS_MAT,
    Gate.TOFFOLI: TOFFOLI_MAT,
}


def normalize_angle(phi: float) -> float:
    """Storage normalization into (-2pi, 2pi]; tighter canonicalization
    to (-pi, pi] is a simplification pass, not a type rule."""
    phi = float(phi) % (4 * np.pi)
    if phi > 2 * np.pi:
        phi -= 4 * np.pi
    return phi


def canonical_angle(phi: float) -> float:
    """Canonicalize into (-pi, pi] (e.g. +3pi/2 becomes -pi/2)."""
    phi = float(phi) % (2 * np.pi)
    if phi > np.pi:
        phi -= 2 * np.pi
    return phi


def unitary_of(gate: Gate, param: float | np.ndarray | None = None) -> np.ndarray:
    """Canonical matrix of a gate kind; rejects Init0/MeasureZ."""
    if gate in NON_UNITARY:
        raise ValueError(f"{gate.value} has no unitary")
    if gate is Gate.RX:
        return rx(float(param))
    if gate is Gate.RZ:
        return rz(float(param))
    if gate is Gate.GENERIC1Q:
        return assert_unitary(np.asarray(param, dtype=complex), what="generic1q")
    return _FIXED[gate].copy()


# --- interaction Hamiltonians -------------------------------------------

XX = np.kron(X, X)
YY = np.kron(Y, Y)
ZZ = np.kron(Z, Z)


class Interaction(enum.Enum):
    ZZ = "zz"
    JJ = "jj"
    XY = "xy"


@dataclass(frozen=True)
class Hamiltonian:
    """Two-qubit coupling term with energy scale E (positive)."""

    kind: Interaction
    energy: float = 1.0

    def __post_init__(self):
        if self.energy <= 0:
            raise ValueError("energy must be positive")

    def matrix(self) -> np.ndarray:
        e = self.energy
        if self.kind is Interaction.ZZ:
            m = -(e / 4) * ZZ
        elif self.kind is Interaction.JJ:
            m = -(e / 4) * (XX + YY + ZZ)
        else:
            m = -(e / 4) * (XX + YY)
        assert is_hermitian(m)
        return m


def evolve(h: Hamiltonian, t: float) -> np.ndarray:
    """exp(-i H t); one full XY period (t = pi/E) is an iSWAP."""
    if t < 0:
        raise ValueError("evolution time must be non-negative")
    return exp_hermitian(h.matrix(), t)


# --- local invariants -----------------------------------------------------

# Magic (Bell) basis change, columns are the magic-basis states.
MAGIC = SQ2 * np.array(
    [
        [1, 0, 0, 1j],
        [0, 1j, 1, 0],
        [0, 1j, -1, 0],
        [1, 0, 0, -1j],
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class LocalInvariants:
    """Invariants (g1 complex, g2 real) of a two-qubit gate under
    one-qubit dressings; equal invariants = locally equivalent."""

    g1: complex
    g2: float

    def close_to(self, other: "LocalInvariants", tol: float = 1e-8) -> bool:
        return abs(self.g1 - other.g1) <= tol and abs(self.g2 - other.g2) <= tol


def local_invariants(u: np.ndarray) -> LocalInvariants:
    """Makhlin-style invariants computed in the magic basis.

    Validated by the dressing-invariance property tests rather than any
    transcribed reference value.
    """
    u = assert_unitary(np.asarray(u, dtype=complex), what="two-qubit gate")
    if u.shape != (4, 4):
        raise ValueError(f"local invariants need a 4x4 unitary, got {u.shape}")
    um = MAGIC.conj().T @ u @ MAGIC
    m = um.T @ um
    det = np.linalg.det(um)
    tr = np.trace(m)
    g1 = tr**2 / (16.0 * det)
    g2 = (tr**2 - np.trace(m @ m)) / (4.0 * det)
    return LocalInvariants(complex(g1), float(g2.real))


def locally_equivalent(u: np.ndarray, v: np.ndarray, tol: float = 1e-8) -> bool:
    """True iff u and v agree up to one-qubit dressings."""
    return local_invariants(u).close_to(local_invariants(v), tol)


# --- one-bit gates of the six-CNOT Toffoli network ------------------------

# Normalized versions of the four auxiliary one-bit gates; the raw
# forms are only defined up to normalization.
GATE_A = np.diag([1, 1j]).astype(complex)
GATE_B = np.array([[1, 1 - np.sqrt(2)], [np.sqrt(2) - 1, 1]], dtype=complex) / np.sqrt(4 - 2 * np.sqrt(2))
GATE_C = np.array(
    [[1, np.sqrt(2) - 1], [1j * (np.sqrt(2) - 1), -1j]], dtype=complex
) / np.sqrt(4 - 2 * np.sqrt(2))
GATE_D = np.diag([1, np.exp(-1j * np.pi / 4)]).astype(complex)

TOFFOLI_ONE_BIT_GATES = {"A": GATE_A, "B": GATE_B, "C": GATE_C, "D": GATE_D}

"""Dense complex matrix kernel.

All operators are plain ``numpy.ndarray`` of dtype complex128 in the
computational basis, ordered lexicographically with qubit 0 as the
most significant bit: ``|x0 x1 ... x_{n-1}>`` has index
``sum(x_q * 2**(n-1-q))``.  Every function returns a fresh array;
nothing mutates its inputs.
"""
from __future__ import annotations

import numpy as np

ATOL_UNITARY = 1e-10
ATOL_PRODUCT = 1e-8


class DimensionError(ValueError):
    """Operand dimensions do not conform."""


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, dim = a.dim * b.dim."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product a @ b (a applied after b in circuit time)."""
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a, dtype=complex).conj().T


def is_unitary(u: np.ndarray, tol: float = ATOL_UNITARY) -> bool:
    """max-abs-entry of (U†U - I) <= tol."""
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def assert_unitary(u: np.ndarray, tol: float = ATOL_UNITARY, what: str = "matrix") -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u, tol):
        err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
        raise ValueError(f"{what} is not unitary (deviation {err:.3e} > {tol:.1e})")
    return u


def is_hermitian(h: np.ndarray, tol: float = ATOL_UNITARY) -> bool:
    h = np.asarray(h, dtype=complex)
    return h.ndim == 2 and h.shape[0] == h.shape[1] and bool(np.max(np.abs(h - h.conj().T)) <= tol)


def exp_hermitian(h: np.ndarray, t: float, tol: float = 1e-9) -> np.ndarray:
    """exp(-i*h*t) for Hermitian h via eigendecomposition (hbar = 1).

    Exact to machine precision for the small (<= 4x4) generators used
    here; raises on non-Hermitian input.
    """
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h, tol):
        raise ValueError("generator is not Hermitian")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def dist_phase(u: np.ndarray, v: np.ndarray) -> float:
    """Global-phase-insensitive distance 1 - |tr(U†V)|/dim, in [0, 1].

    Zero iff U = e^{i a} V.
    """
    u, v = np.asarray(u, dtype=complex), np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise DimensionError(f"dimension mismatch {u.shape} vs {v.shape}")
    d = u.shape[0]
    val = 1.0 - abs(np.trace(u.conj().T @ v)) / d
    return float(max(0.0, val))


def phase_between(u: np.ndarray, v: np.ndarray) -> complex:
    """Recover alpha with U ~ e^{i alpha} V (meaningful when dist_phase ~ 0)."""
    tr = np.trace(np.asarray(v, dtype=complex).conj().T @ np.asarray(u, dtype=complex))
    return complex(tr / abs(tr)) if abs(tr) > 0 else 1.0 + 0j


def n_qubits_of(u: np.ndarray) -> int:
    d = np.asarray(u).shape[0]
    n = d.bit_length() - 1
    if 2**n != d:
        raise DimensionError(f"dimension {d} is not a power of two")
    return n


def perm_matrix(perm: list[int] | tuple[int, ...], n: int) -> np.ndarray:
    """Unitary relocating qubit q to position perm[q].

    Maps |x_0 ... x_{n-1}> to the ket whose bit at position perm[q] is
    x_q; equivalently the output bit at position i is the input bit at
    perm^{-1}(i).  This direction is fixed throughout the package.
    """
    perm = list(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"not a permutation of 0..{n - 1}: {perm}")
    dim = 2**n
    m = np.zeros((dim, dim), dtype=complex)
    for src in range(dim):
        bits = [(src >> (n - 1 - q)) & 1 for q in range(n)]
        dst = sum(bits[q] << (n - 1 - perm[q]) for q in range(n))
        m[dst, src] = 1.0
    return m


def embed(g: np.ndarray, qubits: list[int] | tuple[int, ...], n: int) -> np.ndarray:
    """Embed gate g acting on the listed qubits into an n-qubit unitary.

    Works for non-adjacent and order-reversed qubit tuples: qubit
    ``qubits[k]`` of the register is wired to leg k of g.
    """
    g = np.asarray(g, dtype=complex)
    k = n_qubits_of(g)
    qubits = list(qubits)
    if len(qubits) != k:
        raise DimensionError(f"gate acts on {k} qubits, got {len(qubits)} indices")
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"duplicate qubit indices {qubits}")
    if any(q < 0 or q >= n for q in qubits):
        raise ValueError(f"qubit index out of range in {qubits} for n={n}")
    # Permutation sending register qubit qubits[k] to position k, the
    # rest in ascending order behind them.
    rest = [q for q in range(n) if q not in qubits]
    order = qubits + rest  # order[pos] = register qubit at pos
    perm = [0] * n
    for pos, q in enumerate(order):
        perm[q] = pos
    p = perm_matrix(perm, n)
    full = tensor(g, np.eye(2 ** (n - k)))
    return p.conj().T @ full @ p


def apply_gate_state(psi: np.ndarray, g: np.ndarray, qubits: list[int] | tuple[int, ...], n: int) -> np.ndarray:
    """Apply gate g to the listed qubits of statevector psi (no full embed)."""
    g = np.asarray(g, dtype=complex)
    k = len(qubits)
    st = np.asarray(psi, dtype=complex).reshape([2] * n)
    axes = list(qubits)
    st = np.tensordot(g.reshape([2] * (2 * k)), st, axes=(list(range(k, 2 * k)), axes))
    # tensordot puts the gate's output legs first; restore axis order.
    rest = [q for q in range(n) if q not in axes]
    inv = np.argsort(axes + rest)
    return st.transpose(inv).reshape(-1)

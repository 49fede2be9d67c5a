"""Numerical synthesis of one-qubit dressings for two-qubit templates.

A template is ``L_k . body . L_{k-1} . ... . body . L_0`` where each
local layer L is an (Rz Rx Rz) triple on each leg.  The search finds
layer angles so the assembled unitary matches a target up to global
phase, then snaps angles to the nearest multiple of pi/4 whenever that
keeps the residual at machine precision.  Results are deterministic for
a fixed seed and cached per (target, body, count).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares, minimize

from .gates import Gate, ISWAP_MAT, canonical_angle, rx, rz, unitary_of
from .linalg import dist_phase, tensor

RESIDUAL_TOL = 1e-8
_SNAP = np.pi / 4


class InfeasibleTemplate(RuntimeError):
    """No dressing exists (or none was found within the search budget)."""

    def __init__(self, message: str, best_residual: float | None = None):
        super().__init__(message)
        self.best_residual = best_residual


@dataclass(frozen=True)
class Dressing:
    """Angles of a synthesized template.

    ``layers[i]`` holds ((a, b, c) for leg 0, (a, b, c) for leg 1) of the
    i-th local layer, each an Rz(a) Rx(b) Rz(c) triple in time order;
    layer 0 precedes the first body gate.
    """

    body: Gate
    layers: tuple[tuple[tuple[float, float, float], tuple[float, float, float]], ...]
    residual: float

    @property
    def n_body(self) -> int:
        return len(self.layers) - 1

    def unitary(self) -> np.ndarray:
        body = unitary_of(self.body)
        u = _layer_unitary(self.layers[0])
        for layer in self.layers[1:]:
            u = _layer_unitary(layer) @ body @ u
        return u

    def instructions(self, a: int, b: int) -> list[tuple[Gate, tuple[int, ...], float | None]]:
        """Instruction tuples implementing the template on qubits (a, b),
        zero-angle rotations skipped."""
        out: list[tuple[Gate, tuple[int, ...], float | None]] = []

        def emit_layer(layer):
            for q, (za, xa, zb) in zip((a, b), layer):
                for gate, ang in ((Gate.RZ, za), (Gate.RX, xa), (Gate.RZ, zb)):
                    if abs(canonical_angle(ang)) > 1e-12:
                        out.append((gate, (q,), canonical_angle(ang)))

        emit_layer(self.layers[0])
        for layer in self.layers[1:]:
            out.append((self.body, (a, b), None))
            emit_layer(layer)
        return out


def _layer_unitary(layer) -> np.ndarray:
    (a0, b0, c0), (a1, b1, c1) = layer
    return tensor(rz(c0) @ rx(b0) @ rz(a0), rz(c1) @ rx(b1) @ rz(a1))


def _assemble(theta: np.ndarray, body: np.ndarray, n_body: int) -> np.ndarray:
    u = None
    for i in range(n_body + 1):
        a0, b0, c0, a1, b1, c1 = theta[6 * i : 6 * i + 6]
        layer = tensor(rz(c0) @ rx(b0) @ rz(a0), rz(c1) @ rx(b1) @ rz(a1))
        u = layer if u is None else layer @ body @ u
    return u


def _theta_to_layers(theta: np.ndarray, n_body: int):
    layers = []
    for i in range(n_body + 1):
        a0, b0, c0, a1, b1, c1 = (canonical_angle(t) for t in theta[6 * i : 6 * i + 6])
        layers.append(((a0, b0, c0), (a1, b1, c1)))
    return tuple(layers)


def _polish(theta: np.ndarray, target: np.ndarray, body: np.ndarray, n_body: int) -> np.ndarray:
    """Refine to machine precision on the phase-aligned matrix residual."""

    def resid(params):
        th, alpha = params[:-1], params[-1]
        d = _assemble(th, body, n_body) - np.exp(1j * alpha) * target
        return np.concatenate([d.real.ravel(), d.imag.ravel()])

    tr = np.trace(target.conj().T @ _assemble(theta, body, n_body))
    alpha0 = float(np.angle(tr)) if abs(tr) > 1e-12 else 0.0
    sol = least_squares(resid, np.concatenate([theta, [alpha0]]), method="lm", xtol=1e-15, ftol=1e-15)
    return sol.x[:-1]


def _snap(theta: np.ndarray, target: np.ndarray, body: np.ndarray, n_body: int) -> np.ndarray:
    """Snap angles to multiples of pi/4 when exactness is preserved."""
    snapped = _SNAP * np.round(theta / _SNAP)
    if dist_phase(_assemble(snapped, body, n_body), target) < 1e-12:
        return snapped
    return theta


def synthesize_dressing(
    target: np.ndarray,
    n_body: int,
    body: Gate = Gate.ISWAP,
    seed: int = 0,
    restarts: int = 24,
    tol: float = RESIDUAL_TOL,
) -> Dressing:
    """Find local layers making ``n_body`` body gates equal the target.

    For a single body gate the local-invariant classifier decides
    feasibility outright; for longer templates a seeded multi-start
    minimization over the layer angles is used, and exhausting the
    budget raises InfeasibleTemplate with the best residual found.
    """
    target = np.asarray(target, dtype=complex)
    if target.shape != (4, 4):
        raise ValueError("dressing targets are two-qubit gates")
    if n_body < 1:
        raise ValueError("need at least one body gate")
    body_mat = unitary_of(body)

    if n_body == 1:
        from .gates import locally_equivalent

        if not locally_equivalent(target, body_mat):
            raise InfeasibleTemplate(
                f"target is not locally equivalent to a single {body.value}; "
                "one interaction step cannot realize it"
            )

    rng = np.random.default_rng(seed)
    n_par = 6 * (n_body + 1)

    def f(theta):
        return dist_phase(_assemble(theta, body_mat, n_body), target)

    best_theta, best_val = None, np.inf
    for _ in range(restarts):
        theta0 = rng.uniform(-np.pi, np.pi, n_par)
        res = minimize(f, theta0, method="L-BFGS-B", options={"maxiter": 400})
        if res.fun < best_val:
            best_theta, best_val = res.x, res.fun
        if best_val < 1e-6:
            break
    if best_val > 1e-4:
        raise InfeasibleTemplate(
            f"no {n_body}-{body.value} dressing found for the target "
            f"(best residual {best_val:.3e})",
            best_residual=float(best_val),
        )
    theta = _polish(best_theta, target, body_mat, n_body)
    theta = _snap(theta, target, body_mat, n_body)
    residual = f(theta)
    if residual > tol:
        raise InfeasibleTemplate(
            f"search stalled at residual {residual:.3e} for {n_body} x {body.value}",
            best_residual=float(residual),
        )
    return Dressing(body, _theta_to_layers(theta, n_body), float(residual))


# --- one-qubit Euler decompositions ---------------------------------------


def euler_zxz(u: np.ndarray) -> tuple[float, float, float]:
    """Angles (a, b, c) with u = e^{i d} Rz(c) Rx(b) Rz(a), a applied first."""
    u = np.asarray(u, dtype=complex)
    det = np.linalg.det(u)
    su = u / np.sqrt(det)
    alpha, beta = su[0, 0], su[0, 1]
    b = 2 * np.arctan2(abs(beta), abs(alpha))
    if abs(beta) < 1e-12:
        half_sum = -np.angle(alpha)
        return canonical_angle(2 * half_sum), 0.0, 0.0
    if abs(alpha) < 1e-12:
        # u ~ Rx(pi) Rz(a): beta = -i e^{i a/2} up to sign
        return canonical_angle(2 * np.angle(beta) + np.pi), float(np.pi), 0.0
    half_sum = -np.angle(alpha)  # (c + a)/2
    half_diff = -np.angle(beta) - np.pi / 2  # (c - a)/2
    a = canonical_angle(half_sum - half_diff)
    c = canonical_angle(half_sum + half_diff)
    return a, float(b), c


def euler_xzx(u: np.ndarray) -> tuple[float, float, float]:
    """Angles (a, b, c) with u = e^{i d} Rx(c) Rz(b) Rx(a), a applied first."""
    from .gates import H_MAT

    a, b, c = euler_zxz(H_MAT @ np.asarray(u, dtype=complex) @ H_MAT)
    return a, b, c


def decompose_1q(u: np.ndarray) -> list[tuple[Gate, float]]:
    """Minimal Rz/Rx realization of a one-qubit unitary, up to phase.

    Chooses between the zxz and xzx forms by total rotation angle;
    zero-angle factors are dropped.
    """
    u = np.asarray(u, dtype=complex)
    candidates = []
    for axes, (a, b, c) in (
        ((Gate.RZ, Gate.RX, Gate.RZ), euler_zxz(u)),
        ((Gate.RX, Gate.RZ, Gate.RX), euler_xzx(u)),
    ):
        seq = [
            (g, ang)
            for g, ang in zip(axes, (a, b, c))
            if abs(canonical_angle(ang)) > 1e-12
        ]
        # Adjacent same-axis factors can appear once inner angles vanish.
        merged: list[tuple[Gate, float]] = []
        for g, ang in seq:
            if merged and merged[-1][0] is g:
                tot = canonical_angle(merged[-1][1] + ang)
                merged.pop()
                if abs(tot) > 1e-12:
                    merged.append((g, tot))
            else:
                merged.append((g, canonical_angle(ang)))
        candidates.append(merged)
    return min(candidates, key=lambda s: (sum(abs(a) for _, a in s), len(s)))


# --- dressing cache ---------------------------------------------------------

_CACHE: dict[tuple, Dressing] = {}


def cached_dressing(target: np.ndarray, n_body: int, body: Gate = Gate.ISWAP, seed: int = 0) -> Dressing:
    key = (np.asarray(target, dtype=complex).round(12).tobytes(), n_body, body, seed)
    if key not in _CACHE:
        _CACHE[key] = synthesize_dressing(target, n_body, body, seed=seed)
    return _CACHE[key]

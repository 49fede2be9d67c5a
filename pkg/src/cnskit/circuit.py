"""Circuit intermediate representation, topologies, and the line-based
text format.

Circuits are values: passes return new circuits and never mutate their
input.  Every circuit carries a logical-to-physical ``qubit_map`` that
starts as the identity and records the net relocation applied by
routing-style passes.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace

import numpy as np

from . import gates
from .gates import ARITY, Gate
from .linalg import embed, apply_gate_state


class ParseError(ValueError):
    """Text-format syntax error, carrying a 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class Instruction:
    gate: Gate
    qubits: tuple[int, ...]
    param: float | None = None
    label: str | None = None

    def __post_init__(self):
        if len(self.qubits) != ARITY[self.gate]:
            raise ValueError(f"{self.gate.value} takes {ARITY[self.gate]} qubits, got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"duplicate qubits in {self.gate.value} {self.qubits}")
        if self.gate in gates.ROTATIONS:
            if self.param is None:
                raise ValueError(f"{self.gate.value} needs an angle")
            object.__setattr__(self, "param", gates.normalize_angle(self.param))

    def unitary(self) -> np.ndarray:
        return gates.unitary_of(self.gate, self.param)

    def relabeled(self, mapping: dict[int, int]) -> "Instruction":
        return replace(self, qubits=tuple(mapping[q] for q in self.qubits))


@dataclass
class Circuit:
    n: int
    instructions: list[Instruction] = field(default_factory=list)
    qubit_map: tuple[int, ...] = ()  # logical -> physical, identity at construction
    ancillas: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one qubit")
        if not self.qubit_map:
            self.qubit_map = tuple(range(self.n))
        if sorted(self.qubit_map) != list(range(self.n)):
            raise ValueError(f"qubit_map is not a permutation: {self.qubit_map}")
        self.ancillas = frozenset(self.ancillas)
        for ins in self.instructions:
            self._check(ins)

    def _check(self, ins: Instruction) -> None:
        if any(q < 0 or q >= self.n for q in ins.qubits):
            raise ValueError(f"qubit index out of range in {ins}")
        # Ancillas are declared on logical qubits.  Init0 happens before
        # anything moves (wire = logical index); MeasureZ happens at the
        # end, on the wire the qubit_map sends the ancilla to.
        if ins.gate is Gate.INIT0 and ins.qubits[0] not in self.ancillas:
            raise ValueError(f"init0 on non-ancilla qubit {ins.qubits[0]}")
        if ins.gate is Gate.MEASZ:
            final_wires = {self.qubit_map[a] for a in self.ancillas}
            if ins.qubits[0] not in final_wires:
                raise ValueError(f"measz on non-ancilla wire {ins.qubits[0]}")

    def add(self, gate: Gate, *qubits: int, param: float | None = None, label: str | None = None) -> "Circuit":
        ins = Instruction(gate, tuple(qubits), param, label)
        self._check(ins)
        self.instructions.append(ins)
        return self

    def copy(self, instructions: list[Instruction] | None = None, qubit_map: tuple[int, ...] | None = None) -> "Circuit":
        return Circuit(
            self.n,
            list(self.instructions) if instructions is None else instructions,
            self.qubit_map if qubit_map is None else tuple(qubit_map),
            self.ancillas,
        )

    @property
    def data_qubits(self) -> tuple[int, ...]:
        return tuple(q for q in range(self.n) if q not in self.ancillas)

    def has_measurement(self) -> bool:
        return any(i.gate is Gate.MEASZ for i in self.instructions)

    def without_ancilla_ops(self) -> "Circuit":
        """Unitary part: the circuit minus Init0/MeasureZ bookkeeping."""
        kept = [i for i in self.instructions if i.gate not in gates.NON_UNITARY]
        return self.copy(instructions=kept)


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Dense unitary of the instruction list, time order left to right.

    Init0 is treated as identity (fixtures place it before any gate on
    the ancilla); measurement is refused.
    """
    if c.n > 12:
        raise ValueError(f"register too large for dense unitary: {c.n}")
    if c.has_measurement():
        raise ValueError("circuit contains measurement; use the measurement oracle")
    dim = 2**c.n
    u = np.eye(dim, dtype=complex)
    for ins in c.instructions:
        if ins.gate is Gate.INIT0:
            continue
        u = embed(ins.unitary(), list(ins.qubits), c.n) @ u
    return u


def gate_census(c: Circuit) -> Counter:
    """Exact instruction counts by gate kind."""
    return Counter(ins.gate for ins in c.instructions)


@dataclass(frozen=True)
class Topology:
    """chain(n): |i-j| = 1; ring(n): also n-1 wraps; complete(n): i != j."""

    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in ("chain", "ring", "complete"):
            raise ValueError(f"unknown topology kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("topology needs at least one site")

    def adjacent(self, i: int, j: int) -> bool:
        if i == j or not (0 <= i < self.n and 0 <= j < self.n):
            return False
        if self.kind == "complete":
            return True
        d = abs(i - j)
        if self.kind == "ring":
            return d == 1 or d == self.n - 1
        return d == 1

    def distance(self, i: int, j: int) -> int:
        d = abs(i - j)
        if self.kind == "complete":
            return 0 if i == j else 1
        if self.kind == "ring":
            return min(d, self.n - d)
        return d

    @staticmethod
    def parse(spec: str) -> "Topology":
        """Parse a 'chain:3' / 'ring:9' / 'complete:4' spec string."""
        try:
            kind, _, count = spec.partition(":")
            return Topology(kind.strip(), int(count))
        except (ValueError, TypeError) as exc:
            raise ValueError(f"bad topology spec {spec!r} (want e.g. 'chain:3')") from exc


def legal_on(c: Circuit, topo: Topology) -> bool:
    """All multi-qubit instructions act on pairwise-adjacent sites.

    Three-qubit gates are never legal on chains or rings; they must be
    decomposed first.
    """
    for ins in c.instructions:
        qs = ins.qubits
        if len(qs) == 2 and not topo.adjacent(*qs):
            return False
        if len(qs) == 3:
            if topo.kind == "complete":
                continue
            return False
    return True


# --- text format -----------------------------------------------------------

_GATE_NAMES = {
    "rx": Gate.RX,
    "rz": Gate.RZ,
    "h": Gate.H,
    "cnot": Gate.CNOT,
    "swap": Gate.SWAP,
    "iswap": Gate.ISWAP,
    "cns": Gate.CNS,
    "sqrtswap": Gate.SQRTSWAP,
    "phasediag": Gate.PHASEDIAG,
    "toffoli": Gate.TOFFOLI,
    "init0": Gate.INIT0,
    "measz": Gate.MEASZ,
}
_NAME_OF = {v: k for k, v in _GATE_NAMES.items()}


def parse(text: str) -> Circuit:
    """Parse the line-based circuit format; errors cite line numbers."""
    n = None
    ancillas: set[int] = set()
    instructions: list[Instruction] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head, args = parts[0].lower(), parts[1:]
        if head == "qubits":
            if n is not None:
                raise ParseError(line_no, "duplicate qubits declaration")
            n = _parse_int(line_no, args, 0, "qubit count")
            if n < 1:
                raise ParseError(line_no, "qubit count must be positive")
            continue
        if n is None:
            raise ParseError(line_no, "missing 'qubits <n>' header")
        if head == "ancilla":
            if not args:
                raise ParseError(line_no, "ancilla needs at least one index")
            for k in range(len(args)):
                idx = _parse_int(line_no, args, k, "ancilla index")
                if not 0 <= idx < n:
                    raise ParseError(line_no, f"ancilla index {idx} out of range")
                ancillas.add(idx)
            continue
        gate = _GATE_NAMES.get(head)
        if gate is None:
            raise ParseError(line_no, f"unknown gate {head!r}")
        arity = ARITY[gate]
        want = arity + (1 if gate in gates.ROTATIONS else 0)
        if len(args) != want:
            raise ParseError(line_no, f"{head} takes {want} arguments, got {len(args)}")
        qubits = tuple(_parse_int(line_no, args, k, "qubit index") for k in range(arity))
        if any(q < 0 or q >= n for q in qubits):
            raise ParseError(line_no, f"qubit index out of range in {line!r}")
        if len(set(qubits)) != len(qubits):
            raise ParseError(line_no, f"duplicate qubit indices in {line!r}")
        param = None
        if gate in gates.ROTATIONS:
            try:
                param = float(args[arity])
            except ValueError:
                raise ParseError(line_no, f"bad angle {args[arity]!r}") from None
        if gate in gates.NON_UNITARY and qubits[0] not in ancillas:
            raise ParseError(line_no, f"{head} on undeclared ancilla {qubits[0]}")
        instructions.append(Instruction(gate, qubits, param))
    if n is None:
        raise ParseError(1, "missing 'qubits <n>' header")
    return Circuit(n, instructions, ancillas=frozenset(ancillas))


def _parse_int(line_no: int, args: list[str], k: int, what: str) -> int:
    try:
        return int(args[k])
    except (ValueError, IndexError):
        raise ParseError(line_no, f"bad {what} {args[k] if k < len(args) else '<missing>'!r}") from None


def serialize(c: Circuit) -> str:
    """Emit exactly the grammar that parse() accepts; angles round-trip."""
    lines = [f"qubits {c.n}"]
    if c.ancillas:
        lines.append("ancilla " + " ".join(str(q) for q in sorted(c.ancillas)))
    for ins in c.instructions:
        if ins.gate is Gate.GENERIC1Q:
            raise ValueError("generic one-qubit gates have no text form; decompose first")
        words = [_NAME_OF[ins.gate]] + [str(q) for q in ins.qubits]
        if ins.gate in gates.ROTATIONS:
            words.append(repr(float(ins.param)))
        lines.append(" ".join(words))
    return "\n".join(lines) + "\n"


def apply_to_state(c: Circuit, psi: np.ndarray) -> np.ndarray:
    """Gate-by-gate statevector application (no full unitary built)."""
    if c.has_measurement():
        raise ValueError("circuit contains measurement")
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (2**c.n,):
        raise ValueError(f"state has wrong dimension {psi.shape} for n={c.n}")
    for ins in c.instructions:
        if ins.gate is Gate.INIT0:
            continue
        psi = apply_gate_state(psi, ins.unitary(), list(ins.qubits), c.n)
    return psi

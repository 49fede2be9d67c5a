"""End-to-end compilation: decompose, route (absorbing SWAPs into CNS),
lower to the native iSWAP set, clean up one-qubit gates, and certify the
result against the dense oracle.

The report carries the accounting the examples are judged by: fused-CNS
count, standalone CNOT/SWAP counts, total iSWAPs, the logical-to-
physical permutation, and the oracle residual.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, Instruction, Topology, circuit_unitary, gate_census, legal_on
from .gates import Gate
from .linalg import dist_phase, perm_matrix
from .passes import (
    cleanup_measurement,
    cleanup_unitary,
    decompose_toffoli,
    fuse_cns,
    lower_to_iswap,
)
from .routing import (
    ISWAP_COST,
    RoutingError,
    min_nn_cnots_distance2,
    nn_cnot_bridge,
    restore_order_swaps,
    route,
    route_chain_exact,
    route_ring_flow,
)

ORACLE_TOL = 1e-8
REPORT_SCHEMA = 1


@dataclass
class PipelineReport:
    topology: str
    naive: bool = False
    restore_order: bool = False
    native: str = "iswap"
    seed: int = 0
    router: str = ""
    census_in: dict = field(default_factory=dict)
    census_out: dict = field(default_factory=dict)
    cns_count: int = 0
    standalone_cnot: int = 0
    standalone_swap: int = 0
    iswap_total: int | None = None
    cnot_total: int | None = None
    cnot_paper_accounting: int | None = None
    bridge_note: str | None = None
    permutation: tuple[int, ...] = ()
    data_rotation: int | None = None
    oracle_residual: float | None = None
    cleanup_rounds: int = 0

    def to_json(self) -> str:
        doc = {"schema": REPORT_SCHEMA}
        for k, v in self.__dict__.items():
            if isinstance(v, tuple):
                v = list(v)
            doc[k] = v
        return json.dumps(doc, indent=2, sort_keys=True)


def _census_dict(c: Circuit) -> dict:
    return {g.value: n for g, n in sorted(gate_census(c).items(), key=lambda kv: kv[0].value)}


def _data_rotation(c: Circuit, topo: Topology) -> int | None:
    """If every data qubit moved by the same ring offset, return it."""
    if topo.kind != "ring":
        return None
    data = [q for q in range(c.n) if q not in c.ancillas]
    offs = {(c.qubit_map[q] - q) % topo.n for q in data}
    return offs.pop() if len(offs) == 1 else None


def _pick_router(c: Circuit, topo: Topology) -> tuple[str, Circuit]:
    flowed = route_ring_flow(c, topo) if topo.kind == "ring" else None
    if flowed is not None:
        return "ring-flow", flowed
    kinds = {ins.gate for ins in c.instructions if len(ins.qubits) == 2}
    if topo.kind in ("chain", "ring") and c.n <= 6 and kinds <= {Gate.CNOT, Gate.SWAP, Gate.CNS}:
        try:
            return "exact", route_chain_exact(c, topo)
        except RoutingError:
            pass
    return "greedy", fuse_cns(route(c, topo, mode="displace"))


def _lower_cnot_native(c: Circuit, topo: Topology) -> tuple[Circuit, int, str | None]:
    """CNOT-native translation: order-restoring, SWAPs expanded to three
    CNOTs, distance-2 CNOTs bridged with four nearest-neighbor CNOTs.

    Returns the circuit, the source analyses' own per-gate accounting
    (5 nearest-neighbor CNOTs per distance-2 CNOT, 3 per SWAP), and a
    note when the searched bridge beats that accounting.
    """
    out: list[Instruction] = []
    accounting = 0
    bridged = False
    for ins in c.instructions:
        if ins.gate is Gate.CNOT:
            a, b = ins.qubits
            d = topo.distance(a, b)
            if d == 1:
                out.append(ins)
                accounting += 1
            elif d == 2:
                from .routing import _arc_steps

                mid = _arc_steps(topo, a, b)[0]
                out.extend(nn_cnot_bridge(a, mid, b))
                accounting += 5
                bridged = True
            else:
                raise RoutingError("CNOT-native mode handles distances up to 2")
        elif ins.gate is Gate.SWAP:
            a, b = ins.qubits
            if topo.distance(a, b) != 1:
                raise RoutingError("SWAP not adjacent in CNOT-native mode")
            out.extend(
                Instruction(Gate.CNOT, p)
                for p in ((a, b), (b, a), (a, b))
            )
            accounting += 3
        elif ins.gate is Gate.CNS:
            raise RoutingError("CNOT-native mode expects an unfused circuit")
        else:
            out.append(ins)
    note = None
    if bridged:
        found = min_nn_cnots_distance2()
        note = (
            f"distance-2 CNOT bridged with {found} nearest-neighbor CNOTs "
            f"(search-found minimum; the reported accounting uses 5)"
        )
    return c.copy(instructions=out), accounting, note


def run_pipeline(
    c: Circuit,
    topo: Topology,
    naive: bool = False,
    restore_order: bool = False,
    native: str = "iswap",
    seed: int = 0,
) -> tuple[Circuit, PipelineReport]:
    """Compile a circuit for the topology and certify the result.

    naive        undo every routing displacement and skip CNS fusion
                 (the straight translation the CNS accounting is
                 measured against).
    restore_order  append SWAPs so the final qubit order is the
                 identity.
    native       "iswap" (full lowering) or "cnot" (CNOT-native count
                 mode; implies the naive translation).
    """
    if c.n > topo.n:
        raise RoutingError(f"circuit needs {c.n} qubits, topology has {topo.n}")
    report = PipelineReport(
        topology=f"{topo.kind}:{topo.n}",
        naive=naive,
        restore_order=restore_order,
        native=native,
        seed=seed,
        census_in=_census_dict(c),
    )
    original = c
    c = decompose_toffoli(c)

    if native == "cnot":
        c, accounting, note = _lower_cnot_native(c, topo)
        report.router = "cnot-native"
        report.cnot_paper_accounting = accounting
        report.bridge_note = note
        report.cnot_total = gate_census(c)[Gate.CNOT]
        report.standalone_cnot = report.cnot_total
        final = c
    elif native == "iswap":
        if naive:
            report.router = "naive-undo"
            c = route(c, topo, mode="undo")
        else:
            report.router, c = _pick_router(c, topo)
        if restore_order:
            c = restore_order_swaps(c, topo)
        cen = gate_census(c)
        report.cns_count = cen[Gate.CNS]
        report.standalone_cnot = cen[Gate.CNOT]
        report.standalone_swap = cen[Gate.SWAP]
        c = lower_to_iswap(c)
        c, rounds = cleanup_fixpoint(c)
        report.cleanup_rounds = rounds
        report.iswap_total = gate_census(c)[Gate.ISWAP]
        final = c
    else:
        raise ValueError(f"unknown native set {native!r}")

    if not legal_on(final, topo):
        raise RoutingError("compiled circuit violates the topology")
    report.census_out = _census_dict(final)
    report.permutation = final.qubit_map
    report.data_rotation = _data_rotation(final, topo)
    if final.n <= 10:
        u_in = circuit_unitary(original.without_ancilla_ops())
        u_out = circuit_unitary(final.without_ancilla_ops())
        p = perm_matrix(list(final.qubit_map), final.n)
        report.oracle_residual = dist_phase(p @ u_in, u_out)
    return final, report

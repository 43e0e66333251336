"""Gate networks that make and read out cat states.

The generator puts a Hadamard on qubit 0 and fans out CNOTs from qubit 0 to
every other qubit. On a basis input with qubit ``k`` set to ``b_k`` it produces
the cat with sign ``(-1)**b_0`` and pattern ``(0, b_1, ..., b_{n-1})``. Run
backwards it is a cat-basis measuring device.

Bit sequences in this module are indexed by qubit (``bits[k]`` is qubit k).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .catalg import CatLabel
from .qstate import (
    CNOT,
    MAX_QUBITS,
    Gate,
    H,
    StateVector,
    apply_gate,
    apply_gates,
    measure_qubit,
    postselect_qubit,
)

GATE_NAMES = {"H", "X", "Z", "CNOT"}


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(Gate(g.name, tuple(g.qubits)) for g in self.gates))
        for g in self.gates:
            if g.name not in GATE_NAMES:
                raise ValueError(f"unknown gate {g.name!r}")
            if any(not 0 <= q < self.num_qubits for q in g.qubits):
                raise IndexError(f"{g} touches a qubit outside range({self.num_qubits})")
            if g.name == "CNOT" and g.qubits[0] == g.qubits[1]:
                raise ValueError("CNOT control and target must differ")

    def reversed(self) -> "Circuit":
        # every gate used here is its own inverse
        return Circuit(self.num_qubits, self.gates[::-1])

    def run(self, state: StateVector) -> StateVector:
        if state.num_qubits != self.num_qubits:
            raise ValueError(f"circuit has {self.num_qubits} qubits, state has {state.num_qubits}")
        return apply_gates(state, self.gates)

    def to_records(self) -> list[dict]:
        return [g.to_record() for g in self.gates]

    @classmethod
    def from_records(cls, num_qubits: int, records: list[dict]) -> "Circuit":
        return cls(num_qubits, tuple(Gate(r["gate"], tuple(r["qubits"])) for r in records))


def cat_generator_circuit(n: int) -> Circuit:
    if not 2 <= n <= MAX_QUBITS:
        raise ValueError(f"n must lie in [2, {MAX_QUBITS}], got {n}")
    return Circuit(n, (H(0),) + tuple(CNOT(0, k) for k in range(1, n)))


def cat_analyzer_circuit(n: int) -> Circuit:
    return cat_generator_circuit(n).reversed()


def bits_to_label(bits: Sequence[int], qubits: Sequence[int] | None = None) -> CatLabel:
    """Cat produced by the generator from basis input ``bits``."""
    qubits = tuple(range(len(bits))) if qubits is None else tuple(qubits)
    pattern = "0" + "".join(str(int(b)) for b in bits[1:])
    return CatLabel(qubits, pattern, -1 if bits[0] else 1)


def label_to_bits(label: CatLabel) -> tuple[int, ...]:
    """Inverse of :func:`bits_to_label` (qubit order as listed in the label)."""
    return (0 if label.sign > 0 else 1,) + tuple(int(b) for b in label.pattern[1:])


def generate_cat(bits: Sequence[int]) -> StateVector:
    index = sum(int(b) << k for k, b in enumerate(bits))
    amps = np.zeros(2 ** len(bits), dtype=complex)
    amps[index] = 1
    return cat_generator_circuit(len(bits)).run(StateVector(len(bits), amps))


class NotACatError(ValueError):
    """The analyzer readout was not deterministic."""


def analyze_cat(state: StateVector, qubit_ids: Sequence[int] | None = None,
                tol: float = 1e-10) -> tuple[tuple[int, ...], CatLabel]:
    """Measure ``state`` in the cat basis with the reversed generator.

    Raises :class:`NotACatError` if the readout is random, i.e. the input was
    not a single cat-basis state.
    """
    n = state.num_qubits
    qubit_ids = tuple(range(n)) if qubit_ids is None else tuple(qubit_ids)
    if len(qubit_ids) != n:
        raise ValueError(f"state has {n} qubits, got {len(qubit_ids)} ids")
    out = cat_analyzer_circuit(n).run(state)
    probs = out.probabilities()
    index = int(np.argmax(probs))
    if probs[index] < 1 - tol:
        raise NotACatError(f"analyzer readout probability {probs[index]:.6g} < 1")
    bits = tuple((index >> k) & 1 for k in range(n))
    return bits, bits_to_label(bits, qubit_ids)


def zeilinger_merge(state: StateVector, control: int, target: int,
                    rng: np.random.Generator | None = None,
                    outcome: int | None = None) -> tuple[int, StateVector]:
    """CNOT from ``control`` to ``target``, then read out and drop ``target``.

    On an N-cat times M-cat input with control and target in different cats
    the remaining qubits form an (N+M-1)-cat. Pass ``outcome`` to follow a
    given branch instead of sampling.
    """
    state = apply_gate(state, CNOT(control, target))
    if outcome is None:
        if rng is None:
            raise ValueError("need rng or an explicit outcome")
        return measure_qubit(state, target, rng)
    prob, residual = postselect_qubit(state, target, outcome)
    if residual is None:
        raise ValueError(f"outcome {outcome} has zero probability")
    return outcome, residual


def gate_cost(circuit: Circuit, t_h: float, t_c: float) -> float:
    """Serial running time; X and Z are free."""
    if t_h < 0 or t_c < 0:
        raise ValueError("gate times must be non-negative")
    cost = {"H": t_h, "CNOT": t_c, "X": 0.0, "Z": 0.0}
    return float(sum(cost[g.name] for g in circuit.gates))

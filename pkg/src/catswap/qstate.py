"""Dense state-vector core.

Indexing convention (fixed for the whole package): bit ``k`` of an amplitude
index is the computational-basis value of qubit ``k``, so qubit 0 is the
least-significant bit. Reshaped to a ``(2,) * n`` tensor, qubit ``q`` lives on
axis ``n - 1 - q``.

States are treated as immutable values; every operation returns a new state.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

MAX_QUBITS = 24
NORM_TOL = 1e-10
ZERO_PROB = 1e-12

_SQRT2_INV = 1 / np.sqrt(2)

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
H_MATRIX = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV

# Rotations taking the +1/-1 eigenvectors of a Pauli to |0>/|1>.
_TO_Z_BASIS = {
    "Z": PAULI["I"],
    "X": H_MATRIX,
    "Y": H_MATRIX @ np.diag([1, -1j]),
}


class QubitCapError(ValueError):
    """Raised when a state would exceed the desk-scale qubit cap."""


@dataclass(frozen=True, eq=False)
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        n = self.num_qubits
        if n < 0:
            raise ValueError(f"num_qubits must be non-negative, got {n}")
        if n > MAX_QUBITS:
            raise QubitCapError(f"{n} qubits exceeds the cap of {MAX_QUBITS}")
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape != (2**n,):
            raise ValueError(f"expected {2**n} amplitudes for {n} qubits, got {amps.size}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.num_qubits)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def inner(self, other: "StateVector") -> complex:
        """<self|other>."""
        _check_same_size(self, other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "StateVector") -> float:
        return abs(self.inner(other)) ** 2

    def __repr__(self):
        return f"StateVector(num_qubits={self.num_qubits})"


def _check_same_size(a: StateVector, b: StateVector):
    if a.num_qubits != b.num_qubits:
        raise ValueError(f"qubit count mismatch: {a.num_qubits} vs {b.num_qubits}")


def _check_qubit(n: int, q: int):
    if not 0 <= q < n:
        raise IndexError(f"qubit {q} out of range for {n} qubits")


def _axis(n: int, q: int) -> int:
    return n - 1 - q


def normalized(state: StateVector) -> StateVector:
    norm = state.norm
    if norm <= 0:
        raise ValueError("cannot normalize the zero vector")
    return StateVector(state.num_qubits, state.amplitudes / norm)


def from_amplitudes(amplitudes: Sequence[complex], normalize: bool = True) -> StateVector:
    amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
    n = int(amps.size).bit_length() - 1
    if 2**n != amps.size:
        raise ValueError(f"length {amps.size} is not a power of two")
    state = StateVector(n, amps)
    return normalized(state) if normalize else state


def new_basis_state(num_qubits: int, bits: str) -> StateVector:
    """Computational basis state written as a binary numeral.

    ``bits`` reads most-significant first, so ``bits[0]`` is qubit
    ``num_qubits - 1`` and ``bits[-1]`` is qubit 0: ``new_basis_state(2, "10")``
    has qubit 1 set.
    """
    if num_qubits > MAX_QUBITS:
        raise QubitCapError(f"{num_qubits} qubits exceeds the cap of {MAX_QUBITS}")
    if num_qubits < 1:
        raise ValueError("need at least one qubit")
    if len(bits) != num_qubits or set(bits) - {"0", "1"}:
        raise ValueError(f"bits {bits!r} is not a {num_qubits}-character bitstring")
    amps = np.zeros(2**num_qubits, dtype=complex)
    amps[int(bits, 2)] = 1.0
    return StateVector(num_qubits, amps)


def from_qubit_bits(bits: Sequence[int]) -> StateVector:
    """Basis state with ``bits[k]`` on qubit ``k``."""
    index = sum(int(b) << k for k, b in enumerate(bits))
    amps = np.zeros(2 ** len(bits), dtype=complex)
    amps[index] = 1.0
    return StateVector(len(bits), amps)


def tensor_product(*states: StateVector) -> StateVector:
    """Product state; the first factor occupies the lowest qubits."""
    amps = np.ones(1, dtype=complex)
    n = 0
    for s in states:
        n += s.num_qubits
        if n > MAX_QUBITS:
            raise QubitCapError(f"{n} qubits exceeds the cap of {MAX_QUBITS}")
        amps = np.kron(s.amplitudes, amps)
    return StateVector(n, amps)


def permute_qubits(state: StateVector, order: Sequence[int]) -> StateVector:
    """Relabel qubits: new qubit ``i`` is old qubit ``order[i]``."""
    n = state.num_qubits
    if sorted(order) != list(range(n)):
        raise ValueError(f"{order} is not a permutation of range({n})")
    axes = [_axis(n, order[_axis(n, j)]) for j in range(n)]
    return StateVector(n, np.transpose(state.tensor(), axes).reshape(-1))


# -- gates -------------------------------------------------------------------

class Gate(NamedTuple):
    name: str
    qubits: tuple[int, ...]

    def to_record(self) -> dict:
        return {"gate": self.name, "qubits": list(self.qubits)}


def H(q: int) -> Gate:
    return Gate("H", (q,))


def X(q: int) -> Gate:
    return Gate("X", (q,))


def Z(q: int) -> Gate:
    return Gate("Z", (q,))


def CNOT(control: int, target: int) -> Gate:
    return Gate("CNOT", (control, target))


_SINGLE = {"H": H_MATRIX, "X": PAULI["X"], "Z": PAULI["Z"]}


def apply_matrix(state: StateVector, matrix: np.ndarray, q: int) -> StateVector:
    """Apply a 2x2 matrix to qubit ``q``."""
    n = state.num_qubits
    _check_qubit(n, q)
    t = np.tensordot(matrix, state.tensor(), axes=([1], [_axis(n, q)]))
    t = np.moveaxis(t, 0, _axis(n, q))
    return StateVector(n, t.reshape(-1))


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    n = state.num_qubits
    for q in gate.qubits:
        _check_qubit(n, q)
    if gate.name in _SINGLE:
        if len(gate.qubits) != 1:
            raise ValueError(f"{gate.name} acts on one qubit")
        return apply_matrix(state, _SINGLE[gate.name], gate.qubits[0])
    if gate.name == "CNOT":
        control, target = gate.qubits
        if control == target:
            raise ValueError("CNOT control and target must differ")
        t = state.tensor().copy()
        idx = [slice(None)] * n
        idx[_axis(n, control)] = 1
        sub = t[tuple(idx)]
        # target axis index shifts down by one if it came after the control axis
        ax = _axis(n, target)
        if ax > _axis(n, control):
            ax -= 1
        t[tuple(idx)] = np.flip(sub, axis=ax)
        return StateVector(n, t.reshape(-1))
    raise ValueError(f"unknown gate {gate.name!r}")


def apply_gates(state: StateVector, gates: Sequence[Gate]) -> StateVector:
    for g in gates:
        state = apply_gate(state, g)
    return state


# -- projection and measurement ---------------------------------------------

class Projection(NamedTuple):
    probability: float
    residual: StateVector | None  # None flags a zero-probability branch

    @property
    def valid(self) -> bool:
        return self.residual is not None


def _check_subset(n: int, subset: Sequence[int]):
    for q in subset:
        _check_qubit(n, q)
    if len(set(subset)) != len(subset):
        raise ValueError(f"subset {list(subset)} has repeated qubits")


def split_subset(state: StateVector, subset: Sequence[int]) -> np.ndarray:
    """Amplitudes as a matrix: rows index ``subset`` (``subset[j]`` is row-bit
    ``j``), columns index the remaining qubits in ascending order, densely
    re-indexed."""
    n = state.num_qubits
    _check_subset(n, subset)
    k = len(subset)
    rest = [q for q in range(n) if q not in set(subset)]
    # row axes: most significant row bit first; same for columns
    axes = [_axis(n, subset[j]) for j in reversed(range(k))]
    axes += [_axis(n, q) for q in reversed(rest)]
    return np.transpose(state.tensor(), axes).reshape(2**k, 2 ** len(rest))


def project_subset(state: StateVector, subset: Sequence[int], projector: StateVector) -> Projection:
    """Project ``subset`` onto ``projector`` (its qubit ``j`` is ``subset[j]``).

    Returns the outcome probability and the normalized state of the remaining
    qubits, which keep their relative order. A zero-probability branch gives
    ``residual=None``.
    """
    return next(project_subset_many(state, subset, [projector]))


def project_subset_many(state: StateVector, subset: Sequence[int],
                        projectors: Iterable[StateVector]) -> Iterator[Projection]:
    """:func:`project_subset` for many projectors, splitting the state once."""
    n, k = state.num_qubits, len(subset)
    if k >= n:
        raise ValueError("subset must leave at least one qubit unmeasured")
    matrix = split_subset(state, subset)
    for projector in projectors:
        if projector.num_qubits != k:
            raise ValueError(f"projector has {projector.num_qubits} qubits but subset has {k}")
        if abs(projector.norm - 1) > NORM_TOL:
            raise ValueError("projector must be normalized")
        support = np.flatnonzero(projector.amplitudes)
        vec = projector.amplitudes[support].conj() @ matrix[support]
        prob = float(np.vdot(vec, vec).real)
        if prob <= ZERO_PROB:
            yield Projection(0.0, None)
        else:
            yield Projection(prob, StateVector(n - k, vec / np.sqrt(prob)))


def postselect_qubit(state: StateVector, q: int, bit: int) -> Projection:
    """Project qubit ``q`` onto ``|bit>`` and drop it."""
    proj = StateVector(1, [1, 0] if bit == 0 else [0, 1])
    if state.num_qubits == 1:
        prob = float(abs(state.amplitudes[bit]) ** 2)
        return Projection(prob, StateVector(0, [1.0]) if prob > ZERO_PROB else None)
    return project_subset(state, [q], proj)


def measure_qubit(state: StateVector, q: int, rng: np.random.Generator) -> tuple[int, StateVector]:
    """Computational-basis measurement of qubit ``q``; the qubit is removed
    from the returned residual."""
    _check_qubit(state.num_qubits, q)
    p0, _ = postselect_qubit(state, q, 0)
    bit = int(rng.random() >= p0)
    prob, residual = postselect_qubit(state, q, bit)
    return bit, residual


def qubit_probability(state: StateVector, q: int) -> float:
    """Probability that qubit ``q`` reads 1."""
    _check_qubit(state.num_qubits, q)
    m = split_subset(state, [q])
    return float(np.sum(np.abs(m[1]) ** 2))


def sample_pauli_outcomes(state: StateVector, letters: str, rng: np.random.Generator) -> np.ndarray:
    """Measure every qubit ``k`` in the eigenbasis of ``letters[k]``.

    Returns the +1/-1 eigenvalues, one per qubit.
    """
    n = state.num_qubits
    if len(letters) != n:
        raise ValueError(f"need {n} basis letters, got {len(letters)}")
    for q, letter in enumerate(letters):
        state = apply_matrix(state, _TO_Z_BASIS[letter], q)
    probs = state.probabilities()
    index = rng.choice(probs.size, p=probs / probs.sum())
    bits = (index >> np.arange(n)) & 1
    return 1 - 2 * bits


# -- diagnostics -------------------------------------------------------------

def subsystem_entropy(state: StateVector, subset: Sequence[int]) -> float:
    """Von Neumann entropy (bits) of the reduced state of ``subset``."""
    n = state.num_qubits
    if not subset or len(subset) >= n:
        raise ValueError("subset must be nonempty and proper")
    s = np.linalg.svd(split_subset(state, subset), compute_uv=False)
    p = s**2
    p = p[p > 1e-15]
    p = p / p.sum()
    return float(max(0.0, -np.sum(p * np.log2(p))))


@dataclass(frozen=True)
class PauliString:
    """Signed tensor product of Paulis; ``letters[k]`` acts on qubit ``k``."""
    letters: str
    sign: int = 1

    def __post_init__(self):
        if set(self.letters) - set("IXYZ"):
            raise ValueError(f"bad Pauli letters {self.letters!r}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    def __str__(self):
        return ("-" if self.sign < 0 else "") + self.letters

    def apply(self, state: StateVector) -> StateVector:
        if len(self.letters) != state.num_qubits:
            raise ValueError(
                f"Pauli string of length {len(self.letters)} on {state.num_qubits} qubits")
        for q, letter in enumerate(self.letters):
            if letter != "I":
                state = apply_matrix(state, PAULI[letter], q)
        return StateVector(state.num_qubits, self.sign * state.amplitudes)


def pauli_expectation(state: StateVector, p: PauliString) -> float:
    value = state.inner(p.apply(state))
    if abs(value.imag) > 1e-12:
        raise ArithmeticError(f"non-real Pauli expectation {value}")
    return float(value.real)


def collapse_pauli(state: StateVector, q: int, letter: str,
                   rng: np.random.Generator) -> tuple[int, StateVector]:
    """Measure qubit ``q`` in the eigenbasis of ``letter`` and keep it in the
    collapsed eigenstate (intercept-resend). Returns the +1/-1 eigenvalue."""
    rot = _TO_Z_BASIS[letter]
    rotated = apply_matrix(state, rot, q)
    p1 = qubit_probability(rotated, q)
    bit = int(rng.random() < p1)
    m = split_subset(rotated, [q]).copy()
    m[1 - bit] = 0
    n = state.num_qubits
    # rebuild the full vector: row bit is qubit q, columns are the other qubits
    rest = [r for r in range(n) if r != q]
    full = np.zeros(2**n, dtype=complex)
    cols = np.arange(2 ** (n - 1))
    base = np.zeros_like(cols)
    for j, r in enumerate(rest):
        base |= ((cols >> j) & 1) << r
    full[base | (bit << q)] = m[bit]
    collapsed = normalized(StateVector(n, full))
    return 1 - 2 * bit, apply_matrix(collapsed, rot.conj().T, q)

"""Independent dense-matrix oracles used across the test modules.

Amplitude index bit ``k`` is qubit ``k``, so the Kronecker factor for qubit
``n - 1`` comes first.
"""
import numpy as np
import pytest

I2 = np.eye(2, dtype=complex)
PAULI = {
    "I": I2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def kron_op(n, ops):
    """Dense operator with ``ops[q]`` on qubit q and identity elsewhere."""
    out = np.ones((1, 1), dtype=complex)
    for q in reversed(range(n)):
        out = np.kron(out, ops.get(q, I2))
    return out


def pauli_matrix(letters, sign=1):
    return sign * kron_op(len(letters), {q: PAULI[c] for q, c in enumerate(letters)})


def cnot_matrix(n, control, target):
    dim = 2**n
    m = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        j = i ^ (1 << target) if (i >> control) & 1 else i
        m[j, i] = 1
    return m


def reduced_density(amps, n, subset):
    """Partial trace by explicit summation over the complement's basis."""
    rest = [q for q in range(n) if q not in subset]
    k = len(subset)
    rho = np.zeros((2**k, 2**k), dtype=complex)
    for r in range(2 ** len(rest)):
        vec = np.zeros(2**k, dtype=complex)
        for s in range(2**k):
            idx = 0
            for j, q in enumerate(subset):
                idx |= ((s >> j) & 1) << q
            for j, q in enumerate(rest):
                idx |= ((r >> j) & 1) << q
            vec[s] = amps[idx]
        rho += np.outer(vec, vec.conj())
    return rho


def entropy_oracle(amps, n, subset):
    w = np.linalg.eigvalsh(reduced_density(amps, n, subset))
    w = w[w > 1e-14]
    return float(-np.sum(w * np.log2(w)))


def ket(*terms, n=None):
    """Normalized sum of basis kets; each term lists qubit 0 first."""
    n = n or len(terms[0])
    amps = np.zeros(2**n, dtype=complex)
    for t in terms:
        amps[sum(int(b) << k for k, b in enumerate(t))] += 1
    return amps / np.linalg.norm(amps)


def random_amplitudes(rng, n):
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# filled by test_acceptance.py, printed once the run finishes
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(".")[0].split()[-1])):
            terminalreporter.write_line(line)

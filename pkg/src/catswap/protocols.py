"""End-to-end protocol scenarios built on the state-vector and cat layers.

Each protocol returns a :class:`ProtocolReport`: outcome records plus a list
of named checks that carry the expected and measured value. Passing
``rng=None`` enumerates every measurement branch; passing a generator samples.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Any, NamedTuple, Sequence

import numpy as np

from .catalg import (
    CatLabel,
    SwapScenario,
    cat_state,
    enumerate_cat_basis,
    identify_cat,
    swap_predict,
    swap_simulate,
)
from .circuits import analyze_cat, cat_analyzer_circuit, gate_cost
from .qstate import (
    PauliString,
    StateVector,
    X,
    Z,
    apply_gate,
    collapse_pauli,
    permute_qubits,
    pauli_expectation,
    project_subset,
    project_subset_many,
    sample_pauli_outcomes,
    subsystem_entropy,
    tensor_product,
)


@dataclass
class Check:
    name: str
    expected: Any
    measured: Any
    passed: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "expected": self.expected,
                "measured": self.measured, "passed": bool(self.passed)}


@dataclass
class ProtocolReport:
    scenario: str
    seed: int | None = None
    mode: str = "exhaustive"
    outcomes: list[dict] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    elapsed: float = 0.0  # wall clock, never serialized

    def check(self, name: str, expected, measured, passed: bool | None = None,
              tol: float | None = None) -> bool:
        if passed is None:
            if tol is None:
                passed = expected == measured
            else:
                passed = abs(measured - expected) <= tol
        self.checks.append(Check(name, expected, measured, bool(passed)))
        return bool(passed)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "mode": self.mode,
            "passed": self.passed,
            "outcomes": self.outcomes,
            "checks": [c.to_dict() for c in self.checks],
            "data": self.data,
        }


class _Timer:
    def __init__(self, report: ProtocolReport):
        self.report = report

    def __enter__(self):
        self.start = time.perf_counter()
        return self.report

    def __exit__(self, *exc):
        self.report.elapsed = time.perf_counter() - self.start


def _pick(rng: np.random.Generator, probs: Sequence[float]) -> int:
    p = np.asarray(probs, dtype=float)
    return int(rng.choice(p.size, p=p / p.sum()))


# -- swap ----------------------------------------------------------------------

def swap_report(scenario: SwapScenario, rng: np.random.Generator | None = None,
                name: str = "swap", trials: int = 0) -> ProtocolReport:
    """Run :func:`swap_simulate` and compare every entry with :func:`swap_predict`.

    With ``rng``, ``trials`` outcomes are also drawn from the simulated
    distribution and their counts recorded.
    """
    report = ProtocolReport(name, mode="exhaustive" if rng is None else "sampled")
    with _Timer(report):
        dist = swap_simulate(scenario)
        expected_p = 2.0 ** -scenario.num_active
        agree = True
        counts = np.zeros(len(dist), dtype=int)
        if rng is not None and trials > 0:
            probs = np.array([r.probability for r in dist.values()])
            counts = np.bincount(rng.choice(len(dist), size=trials, p=probs / probs.sum()),
                                 minlength=len(dist))
        for (outcome, result), count in zip(dist.items(), counts):
            pred = swap_predict(scenario, outcome)
            match = (pred is not None and result.residual is not None
                     and abs(pred.probability - result.probability) <= 1e-10
                     and pred.residual == result.residual)
            agree &= match
            rec = {
                "outcome": outcome.to_record(),
                "probability": result.probability,
                "residual": None if result.residual is None else result.residual.to_record(),
                "predicted": match,
            }
            if rng is not None:
                rec["count"] = int(count)
            report.outcomes.append(rec)
        total = sum(r.probability for r in dist.values())
        report.check("all residuals are cat states", True,
                     all(r.residual is not None for r in dist.values()))
        report.check("simulation matches closed form", True, agree)
        report.check("outcome count", 2**scenario.num_active, len(dist))
        report.check("total probability", 1.0, total, tol=1e-10)
        report.check("max deviation from 2^-N'", 0.0,
                     max(abs(r.probability - expected_p) for r in dist.values()), tol=1e-10)
        report.data["scenario"] = scenario.to_record()
        report.data["passthrough"] = [c.to_record() for c in scenario.passthrough]
    return report


# -- exchange network ----------------------------------------------------------

@dataclass(frozen=True)
class PairLink:
    user_qubit: int
    exchange_qubit: int
    pattern: str = "00"
    sign: int = 1

    @property
    def label(self) -> CatLabel:
        return CatLabel((self.user_qubit, self.exchange_qubit), self.pattern, self.sign)


@dataclass(frozen=True)
class NetworkTopology:
    """Users each sharing one Bell pair with a central exchange."""
    users: tuple[str, ...]
    pairs: dict[str, PairLink]
    exchange: str = "O"

    def __post_init__(self):
        object.__setattr__(self, "users", tuple(self.users))
        if set(self.users) != set(self.pairs):
            raise ValueError("every user needs exactly one pair with the exchange")
        ids = [q for u in self.users for q in (self.pairs[u].user_qubit, self.pairs[u].exchange_qubit)]
        if len(set(ids)) != len(ids):
            raise ValueError("qubit ids must be globally distinct")

    @property
    def qubits(self) -> list[int]:
        """Simulation order: each user's pair, user qubit first."""
        return [q for u in self.users for q in (self.pairs[u].user_qubit, self.pairs[u].exchange_qubit)]

    def state(self) -> StateVector:
        return tensor_product(*(cat_state(self.pairs[u].label) for u in self.users))

    @classmethod
    def star(cls, users: Sequence[str]) -> "NetworkTopology":
        """Users numbered in order, user ``i`` holding qubit ``2i`` and the
        exchange holding ``2i + 1``."""
        return cls(tuple(users), {u: PairLink(2 * i, 2 * i + 1) for i, u in enumerate(users)})


def four_user_topology() -> NetworkTopology:
    """Users A-D share pairs (1,2), (3,4), (5,6), (7,8) with the exchange; A, B
    and C hold particles 1, 4 and 6."""
    return NetworkTopology(
        ("A", "B", "C", "D"),
        {"A": PairLink(1, 2), "B": PairLink(4, 3), "C": PairLink(6, 5), "D": PairLink(8, 7)},
    )


class ExchangeBranch(NamedTuple):
    outcome: CatLabel
    probability: float
    users_state: StateVector
    untouched_fidelity: dict[str, float]


def _exchange_branches(topology: NetworkTopology, subset: Sequence[str],
                       state: StateVector | None = None) -> list[ExchangeBranch]:
    state = topology.state() if state is None else state
    order = topology.qubits
    local = {q: i for i, q in enumerate(order)}
    ex = [topology.pairs[u].exchange_qubit for u in subset]
    outcomes = enumerate_cat_basis(len(ex), ex)
    remaining = [q for q in order if q not in set(ex)]
    others = [u for u in topology.users if u not in set(subset)]
    branches = []
    projections = project_subset_many(state, [local[q] for q in ex], (cat_state(o) for o in outcomes))
    for outcome, proj in zip(outcomes, projections):
        if not proj.valid:
            continue
        residual, ids = proj.residual, list(remaining)
        fidelity = {}
        for u in others:
            link = topology.pairs[u]
            sub = [ids.index(link.user_qubit), ids.index(link.exchange_qubit)]
            fid, residual = project_subset(residual, sub, cat_state(link.label))
            fidelity[u] = fid
            ids = [q for q in ids if q not in (link.user_qubit, link.exchange_qubit)]
        branches.append(ExchangeBranch(outcome, proj.probability, residual, fidelity))
    return branches


def exchange_entangle(topology: NetworkTopology, subset: Sequence[str],
                      rng: np.random.Generator | None = None) -> ProtocolReport:
    """Cat-basis measurement at the exchange on the pairs of ``subset``.

    The users in ``subset`` end up sharing a cat state whose label depends on
    the outcome, which the exchange has to announce; the other users' pairs are
    left alone.
    """
    subset = list(subset)
    if len(subset) < 2:
        raise ValueError("need at least two users to entangle")
    if not set(subset) <= set(topology.users):
        raise ValueError(f"unknown users {set(subset) - set(topology.users)}")
    subset = [u for u in topology.users if u in set(subset)]
    report = ProtocolReport("exchange", mode="exhaustive" if rng is None else "sampled")
    with _Timer(report):
        branches = _exchange_branches(topology, subset)
        if rng is not None:
            branches = [branches[_pick(rng, [b.probability for b in branches])]]
        user_ids = [topology.pairs[u].user_qubit for u in subset]
        scenario = SwapScenario(tuple(topology.pairs[u].label for u in subset),
                                tuple((topology.pairs[u].exchange_qubit,) for u in subset))
        ok_cat = ok_pred = True
        worst_entropy = worst_fid = 0.0
        for b in branches:
            found = identify_cat(b.users_state, user_ids)
            pred = swap_predict(scenario, b.outcome)
            entropies = [subsystem_entropy(b.users_state, [i]) for i in range(len(user_ids))]
            ok_cat &= found is not None
            match = found is not None and pred is not None and pred.residual.same_state(found.label)
            ok_pred &= match
            worst_entropy = max([worst_entropy] + [abs(e - 1) for e in entropies])
            worst_fid = max([worst_fid] + [abs(f - 1) for f in b.untouched_fidelity.values()])
            report.outcomes.append({
                "outcome": b.outcome.to_record(),
                "probability": b.probability,
                "users_cat": None if found is None else found.label.to_record(),
                "predicted": match,
                "entropies": entropies,
                "untouched_fidelity": dict(b.untouched_fidelity),
            })
        report.check("users share a cat state", True, ok_cat)
        report.check("announced label matches closed form", True, ok_pred)
        report.check("single-qubit entropy deviation", 0.0, worst_entropy, tol=1e-9)
        report.check("untouched pair fidelity deviation", 0.0, worst_fid, tol=1e-10)
        if rng is None:
            report.check("outcome count", 2 ** len(subset), len(branches))
            report.check("total probability", 1.0, sum(b.probability for b in branches), tol=1e-10)
            report.check("max deviation from 2^-k", 0.0,
                         max(abs(b.probability - 2.0 ** -len(subset)) for b in branches), tol=1e-10)
        report.data["subset"] = subset
        report.data["users_qubits"] = user_ids
    return report


# -- growing cats --------------------------------------------------------------

def _check_grow_branch(scenario: SwapScenario, outcome: CatLabel, residual: CatLabel | None,
                       probability: float, full: StateVector) -> bool:
    """The measured pair sits in the outcome state and the rest in the residual
    cat: <outcome (x) residual|psi> has squared modulus equal to the probability."""
    if residual is None:
        return False
    order = [q for m in scenario.active for q in scenario.cats[m].qubits]
    target = tensor_product(cat_state(outcome), cat_state(residual))
    labels = list(outcome.qubits) + list(residual.qubits)
    target = permute_qubits(target, [labels.index(q) for q in order])
    return abs(abs(target.inner(full)) ** 2 - probability) <= 1e-10


def grow_cat(N: int, rng: np.random.Generator | None = None,
             start: CatLabel | None = None) -> ProtocolReport:
    """Bell-measure one qubit of an N-cat together with one qubit of a GHZ
    state; the N+1 unmeasured qubits form a cat."""
    if not 2 <= N <= 10:
        raise ValueError(f"N must lie in [2, 10], got {N}")
    start = CatLabel(tuple(range(N)), "0" * N) if start is None else start
    if start.size != N:
        raise ValueError("start label must have N qubits")
    base = max(start.qubits) + 1
    ghz = CatLabel((base, base + 1, base + 2), "000")
    scenario = SwapScenario((start, ghz), ((start.qubits[-1],), (base,)))
    report = ProtocolReport("grow", mode="exhaustive" if rng is None else "sampled")
    with _Timer(report):
        dist = swap_simulate(scenario, rng)
        full = tensor_product(cat_state(start), cat_state(ghz))
        ok = True
        for outcome, res in dist.items():
            pred = swap_predict(scenario, outcome)
            cat_ok = res.residual is not None and res.residual.size == N + 1
            branch_ok = _check_grow_branch(scenario, outcome, res.residual, res.probability, full)
            match = pred is not None and pred.residual == res.residual
            ok &= cat_ok and branch_ok and match
            report.outcomes.append({
                "outcome": outcome.to_record(),
                "probability": res.probability,
                "residual": None if res.residual is None else res.residual.to_record(),
                "predicted": match,
                "pair_in_outcome_state": branch_ok,
            })
        report.check(f"residual is a {N + 1}-cat on every outcome", True, ok)
        if rng is None:
            report.check("outcome count", 4, len(dist))
        report.data["N"] = N
        report.data["start"] = start.to_record()
        report.data["bell_analyzer"] = cat_analyzer_circuit(2).to_records()
    return report


def grow_chain(n_start: int = 2, n_stop: int = 10,
               rng: np.random.Generator | None = None) -> ProtocolReport:
    """Grow from an ``n_start``-cat to an ``n_stop + 1``-cat, checking all four
    Bell outcomes at every step and continuing from one of them (drawn with
    ``rng``, otherwise the first)."""
    report = ProtocolReport("grow-chain", mode="exhaustive" if rng is None else "sampled")
    with _Timer(report):
        current = CatLabel(tuple(range(n_start)), "0" * n_start)
        for N in range(n_start, n_stop + 1):
            step = grow_cat(N, start=current)
            report.check(f"step N={N}", True, step.passed)
            entropies = []
            for rec in step.outcomes:
                if rec["residual"] is not None:
                    st = cat_state(CatLabel.from_record(rec["residual"]))
                    entropies += [subsystem_entropy(st, [k]) for k in range(st.num_qubits)]
            choice = 0 if rng is None else int(rng.integers(len(step.outcomes)))
            rec = step.outcomes[choice]
            if rec["residual"] is None:
                break
            nxt = CatLabel.from_record(rec["residual"])
            report.check(f"per-qubit entropy N={N}", 1.0,
                         min(entropies) if entropies else 0.0, tol=1e-10)
            report.outcomes.append({"N": N, "followed": rec["outcome"], "residual": rec["residual"]})
            current = nxt.on(tuple(range(nxt.size)))
    return report


def ghz_from_bell_pairs(rng: np.random.Generator | None = None) -> ProtocolReport:
    """Three Bell pairs, one qubit of each projected onto the GHZ basis."""
    bells = tuple(CatLabel((2 * i, 2 * i + 1), "00") for i in range(3))
    scenario = SwapScenario(bells, ((1,), (3,), (5,)))
    report = swap_report(scenario, rng, name="ghz-from-bells")
    report.check("residual size", 3, min(len(o["residual"]["qubits"]) for o in report.outcomes))
    return report


# -- superdense coding -----------------------------------------------------------

@dataclass(frozen=True)
class SuperdenseAssignment:
    """Receiver holds qubit 0, sender ``i`` holds qubit ``i + 1``. The
    designated sender chooses from {I, Z, X, ZX} (first bit drives Z, second
    X); every other sender from {I, X}."""
    senders: tuple[str, ...]
    receiver: str = "R"
    designated: int = 0

    def __post_init__(self):
        object.__setattr__(self, "senders", tuple(self.senders))
        if not self.senders:
            raise ValueError("need at least one sender")
        if not 0 <= self.designated < len(self.senders):
            raise ValueError("designated sender index out of range")
        if self.receiver in self.senders:
            raise ValueError("receiver cannot also be a sender")

    @property
    def N(self) -> int:
        return len(self.senders)

    @property
    def operation_sets(self) -> dict[str, tuple[str, ...]]:
        return {s: (("I", "X", "Z", "ZX") if i == self.designated else ("I", "X"))
                for i, s in enumerate(self.senders)}

    def split(self, message: str) -> dict[str, str]:
        """Message bits per sender, in sender order; the designated sender
        takes two consecutive bits."""
        if len(message) != self.N + 1 or set(message) - {"0", "1"}:
            raise ValueError(f"message must be {self.N + 1} bits, got {message!r}")
        out, pos = {}, 0
        for i, s in enumerate(self.senders):
            width = 2 if i == self.designated else 1
            out[s] = message[pos:pos + width]
            pos += width
        return out

    @classmethod
    def default(cls, N: int) -> "SuperdenseAssignment":
        return cls(tuple(f"S{i + 1}" for i in range(N)))


def superdense_encode(assignment: SuperdenseAssignment, message: str) -> StateVector:
    N = assignment.N
    state = cat_state(CatLabel(tuple(range(N + 1)), "0" * (N + 1)))
    for i, (sender, bits) in enumerate(assignment.split(message).items()):
        q = i + 1
        if i == assignment.designated:
            z, x = bits
            if z == "1":
                state = apply_gate(state, Z(q))
            if x == "1":
                state = apply_gate(state, X(q))
        elif bits == "1":
            state = apply_gate(state, X(q))
    return state


def superdense_decode(assignment: SuperdenseAssignment, state: StateVector) -> tuple[str, CatLabel]:
    bits, label = analyze_cat(state)
    parts = []
    for i in range(assignment.N):
        x = str(bits[i + 1])
        parts.append(f"{bits[0]}{x}" if i == assignment.designated else x)
    return "".join(parts), label


def superdense_roundtrip(N: int, message: str,
                         assignment: SuperdenseAssignment | None = None) -> tuple[str, ProtocolReport]:
    if not 1 <= N <= 10:
        raise ValueError(f"N must lie in [1, 10], got {N}")
    assignment = SuperdenseAssignment.default(N) if assignment is None else assignment
    if assignment.N != N:
        raise ValueError("assignment does not have N senders")
    report = ProtocolReport("superdense")
    with _Timer(report):
        decoded, label = superdense_decode(assignment, superdense_encode(assignment, message))
        report.outcomes.append({"message": message, "label": label.to_record(), "decoded": decoded})
        report.check("decoded message", message, decoded)
    return decoded, report


def superdense_table(N: int, assignment: SuperdenseAssignment | None = None,
                     messages: Sequence[str] | None = None) -> ProtocolReport:
    """Round-trip every message (or the given ones) and check the encoding is
    injective onto the cat basis."""
    assignment = SuperdenseAssignment.default(N) if assignment is None else assignment
    exhaustive = messages is None
    if messages is None:
        messages = ["".join(b) for b in product("01", repeat=N + 1)]
    report = ProtocolReport("superdense", mode="exhaustive" if exhaustive else "sampled")
    with _Timer(report):
        errors = 0
        labels = set()
        for msg in messages:
            decoded, label = superdense_decode(assignment, superdense_encode(assignment, msg))
            errors += decoded != msg
            labels.add(label)
            report.outcomes.append({"message": msg, "label": label.to_record(), "decoded": decoded})
        report.check("decoding errors", 0, errors)
        report.check("distinct cat labels", len(set(messages)), len(labels))
        if exhaustive:
            report.check("labels cover the cat basis", True,
                         labels == set(enumerate_cat_basis(N + 1)))
        rates = information_rates(N, 1.0, 1.0)
        report.data.update({
            "N": N,
            "operation_sets": {k: list(v) for k, v in assignment.operation_sets.items()},
            "analyzer": cat_analyzer_circuit(N + 1).to_records(),
            "particles": {"multiparty": rates.particles_multiparty, "pairwise": rates.particles_pairwise},
        })
    return report


class InformationRates(NamedTuple):
    r1: float
    r2: float
    particles_multiparty: int
    particles_pairwise: int


def information_rates(N: int, t_h: float, t_c: float) -> InformationRates:
    """Bits per unit time for one (N+1)-cat measurement against N separate
    Bell measurements, and the particle count each needs."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if t_h <= 0 or t_c <= 0:
        raise ValueError("gate times must be positive")
    r1 = (N + 1) / (t_h + N * t_c)
    r2 = 2 * N / (N * (t_h + t_c))
    return InformationRates(r1, r2, N + 1, 2 * N)


def analyzer_rates(N: int, t_h: float, t_c: float) -> tuple[float, float]:
    """The same rates obtained by costing the analyzer circuits gate by gate."""
    multi = gate_cost(cat_analyzer_circuit(N + 1), t_h, t_c)
    bell = gate_cost(cat_analyzer_circuit(2), t_h, t_c)
    return (N + 1) / multi, 2 * N / (N * bell)


# -- amplitude errors ------------------------------------------------------------

def amplitude_pair(theta: float) -> StateVector:
    """cos(theta)|01> + sin(theta)|10>, first particle on qubit 0."""
    amps = np.zeros(4, dtype=complex)
    amps[0b10] = math.cos(theta)  # first 0, second 1
    amps[0b01] = math.sin(theta)
    return StateVector(2, amps)


def _binary_entropy(p: float) -> float:
    if p <= 0 or p >= 1:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def amplitude_swap_correct(theta: float, rng: np.random.Generator | None = None,
                           trials: int = 0) -> ProtocolReport:
    """Entanglement swapping on two copies of an amplitude-damaged pair.

    Pairs (1,2) and (3,4) are qubits (0,1) and (2,3); qubits 1 and 2 are Bell
    measured. Outcomes |00> +/- |11> leave (1,4) maximally entangled.
    """
    if not 0 < theta < math.pi / 2:
        raise ValueError("theta must lie strictly between 0 and pi/2")
    report = ProtocolReport("amplitude", mode="exhaustive" if rng is None else "sampled")
    with _Timer(report):
        pair = amplitude_pair(theta)
        state = tensor_product(pair, pair)
        input_entropy = subsystem_entropy(pair, [0])
        basis = enumerate_cat_basis(2, (1, 2))
        projections = list(project_subset_many(state, [1, 2], (cat_state(b) for b in basis)))
        success = math.sin(2 * theta) ** 2 / 2
        failure = (1 + math.cos(2 * theta) ** 2) / 2
        p_success = p_failure = 0.0
        success_ok = True
        fail_entropy = 0.0
        for outcome, proj in zip(basis, projections):
            is_success = outcome.pattern == "00"
            rec = {"outcome": outcome.to_record(), "probability": proj.probability,
                   "success": is_success}
            if proj.valid:
                found = identify_cat(proj.residual, (0, 3))
                entropy = subsystem_entropy(proj.residual, [0])
                rec["residual"] = None if found is None else found.label.to_record()
                rec["entropy"] = entropy
                if is_success:
                    success_ok &= (found is not None and found.label.pattern == "00"
                                   and found.label.sign == outcome.sign
                                   and abs(entropy - 1) <= 1e-10)
                else:
                    fail_entropy = max(fail_entropy, entropy)
            if is_success:
                p_success += proj.probability
            else:
                p_failure += proj.probability
            report.outcomes.append(rec)
        report.check("success probability", success, p_success, tol=1e-10)
        report.check("failure probability", failure, p_failure, tol=1e-10)
        report.check("success residual is |00> +/- |11>", True, success_ok)
        if abs(theta - math.pi / 4) > 1e-9:
            report.check("failure residual less entangled", input_entropy,
                         fail_entropy, passed=fail_entropy < input_entropy)
        if rng is not None:
            probs = [p.probability for p in projections]
            counts = np.bincount(rng.choice(4, size=trials, p=np.array(probs) / sum(probs)),
                                 minlength=4)
            freq = float(counts[0] + counts[1]) / trials
            sigma = math.sqrt(success * (1 - success) / trials)
            report.check("sampled success frequency", success, freq, tol=max(4 * sigma, 1e-12))
            report.data["counts"] = [int(c) for c in counts]
            report.data["trials"] = trials
        report.data.update({"theta": theta, "input_entropy": input_entropy,
                            "expected_failure_entropy": _binary_entropy(
                                math.sin(theta) ** 4 / (math.sin(theta) ** 4 + math.cos(theta) ** 4))})
    return report


# -- conferencing ----------------------------------------------------------------

def ghz_stabilizers(n: int) -> list[PauliString]:
    """X on every qubit, X with Y on two positions (sign -1), and Z Z pairs."""
    out = [PauliString("X" * n)]
    for i, j in combinations(range(n), 2):
        letters = ["X"] * n
        letters[i] = letters[j] = "Y"
        out.append(PauliString("".join(letters), -1))
    for i, j in combinations(range(n), 2):
        letters = ["I"] * n
        letters[i] = letters[j] = "Z"
        out.append(PauliString("".join(letters)))
    return out


def stabilizer_check(state: StateVector, n: int) -> list[tuple[PauliString, float]]:
    if state.num_qubits != n:
        raise ValueError(f"state has {state.num_qubits} qubits, expected {n}")
    return [(p, pauli_expectation(state, p)) for p in ghz_stabilizers(n)]


@dataclass(frozen=True)
class InterceptResend:
    """Eavesdropper measuring the user's particle on one exchange-user channel
    and forwarding the collapsed state. ``basis`` is a Pauli letter or
    ``"XY"`` for a fresh random choice between X and Y each round."""
    channel: int = 0
    basis: str = "Z"


def _correct_to_ghz(state: StateVector, label: CatLabel) -> StateVector:
    """Local X/Z fixes taking the announced cat to (|0..0> + |1..1>)/sqrt(2)."""
    for k, b in enumerate(label.pattern):
        if b == "1":
            state = apply_gate(state, X(k))
    if label.sign < 0:
        state = apply_gate(state, Z(0))
    return state


def conference_key(n_users: int, rounds: int, basis_mode: str = "single",
                   rng: np.random.Generator | int | None = None,
                   eavesdropper: InterceptResend | None = None) -> ProtocolReport:
    """GHZ-based conference key agreement over a star network.

    Each round the exchange entangles all users (announcing its outcome), the
    users fix the announced cat to the standard GHZ state and measure. In
    ``single`` mode everyone measures X; in ``dual`` mode each user picks X or
    Y and rounds with an odd number of Y choices are discarded. On a kept
    round the product of outcomes is fixed: +1 for 0 mod 4 Y's, -1 for 2 mod
    4. User 0's bit is the key bit; every other user recovers it from that
    parity and the remaining users' bits, so a round errs exactly when the
    parity is broken.
    """
    if n_users < 2 or rounds < 1:
        raise ValueError("need n_users >= 2 and rounds >= 1")
    if basis_mode not in ("single", "dual"):
        raise ValueError(f"unknown basis mode {basis_mode!r}")
    seed = rng if isinstance(rng, (int, np.integer)) else None
    seq = np.random.SeedSequence(seed if seed is not None else
                                 (rng.integers(2**63) if rng is not None else 0))
    round_rngs = [np.random.default_rng(s) for s in seq.spawn(rounds)]
    users = [f"U{i}" for i in range(n_users)]
    topology = NetworkTopology.star(users)
    base = topology.state()
    scenario = SwapScenario(tuple(topology.pairs[u].label for u in users),
                            tuple((topology.pairs[u].exchange_qubit,) for u in users))
    clean_branches = _exchange_branches(topology, users, base)

    report = ProtocolReport("conference", seed=None if seed is None else int(seed), mode="sampled")
    with _Timer(report):
        keys = [[] for _ in users]
        kept = errors = 0
        product_always_plus = True
        x_products = []
        xxx_exact = []
        stabilizer_sums = None
        branch_cache: dict[bytes, list[ExchangeBranch]] = {}
        stab_cache: dict[bytes, np.ndarray] = {}
        for r in round_rngs:
            branches = clean_branches
            if eavesdropper is not None:
                letter = eavesdropper.basis
                if letter == "XY":
                    letter = "XY"[int(r.integers(2))]
                _, tapped = collapse_pauli(base, 2 * eavesdropper.channel, letter, r)
                key = _state_key(tapped)
                if key not in branch_cache:
                    branch_cache[key] = _exchange_branches(topology, users, tapped)
                branches = branch_cache[key]
            b = branches[_pick(r, [x.probability for x in branches])]
            announced = swap_predict(scenario, b.outcome).residual
            ghz = _correct_to_ghz(b.users_state, announced)
            if basis_mode == "single":
                bases = "X" * n_users
            else:
                bases = "".join("XY"[i] for i in r.integers(2, size=n_users))
            outcomes = sample_pauli_outcomes(ghz, bases, r)
            prod = int(np.prod(outcomes))
            if bases == "X" * n_users:
                x_products.append(prod)
                product_always_plus &= prod == 1
            key = _state_key(ghz)
            if key not in stab_cache:
                stab_cache[key] = np.array([v for _, v in stabilizer_check(ghz, n_users)])
            vals = stab_cache[key]
            xxx_exact.append(vals[0])
            stabilizer_sums = vals if stabilizer_sums is None else stabilizer_sums + vals
            y = bases.count("Y")
            if y % 2:
                continue
            kept += 1
            expected = 1 if y % 4 == 0 else -1
            bits = [(1 - o) // 2 for o in outcomes]
            parity = 0 if expected == 1 else 1
            keys[0].append(bits[0])
            for i in range(1, n_users):
                keys[i].append(parity ^ (sum(bits[1:]) % 2))
            errors += prod != expected

        xxx_sampled = float(np.mean(x_products)) if x_products else float("nan")
        report.data.update({
            "n_users": n_users,
            "rounds": rounds,
            "basis_mode": basis_mode,
            "eavesdropper": None if eavesdropper is None else
                {"channel": eavesdropper.channel, "basis": eavesdropper.basis},
            "kept": kept,
            "sift_rate": kept / rounds,
            "error_rate": errors / kept if kept else 0.0,
            "xxx_sampled": xxx_sampled,
            "xxx_exact_mean": float(np.mean(xxx_exact)),
            "stabilizers": {str(p): float(s / rounds) for (p, _), s in
                            zip(stabilizer_check(_ghz(n_users), n_users), stabilizer_sums)},
            "keys": ["".join(map(str, k)) for k in keys],
        })
        agreement = (sum(all(k[j] == keys[0][j] for k in keys) for j in range(kept)) / kept
                     if kept else 1.0)
        report.data["agreement_rate"] = agreement
        if eavesdropper is None:
            report.check("X product is +1 every round", True, product_always_plus)
            report.check("key agreement", 1.0, agreement)
        else:
            report.check("eavesdropping causes key errors", "> 0", errors / kept if kept else 0.0,
                         passed=errors > 0)
            report.check("stabilizer expectation drops", "< 1",
                         report.data["xxx_exact_mean"],
                         passed=min(report.data["stabilizers"].values()) < 1 - 1e-9)
    return report


def _state_key(state: StateVector) -> bytes:
    return np.round(state.amplitudes, 12).tobytes()


def _ghz(n: int) -> StateVector:
    return cat_state(CatLabel(tuple(range(n)), "0" * n))

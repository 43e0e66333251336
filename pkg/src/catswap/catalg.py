"""Cat-state labels and the generalized swapping law.

A cat state over qubits ``q_0 .. q_{n-1}`` is ``(|u> + s|u^c>)/sqrt(2)`` with
``u`` a bitstring and ``u^c`` its complement. ``u`` and ``u^c`` name the same
ray, so labels are stored with ``pattern[0] == "0"``.

The swapping law is implemented twice: :func:`swap_predict` applies the closed
form rule symbolically, :func:`swap_simulate` projects a dense state vector.
The two are expected to agree on every outcome.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import NamedTuple, Sequence

import numpy as np

from .qstate import MAX_QUBITS, QubitCapError, StateVector, project_subset_many, tensor_product

MAX_MEASURED = 12


def complement(bits: str) -> str:
    return bits.translate(str.maketrans("01", "10"))


def _xor(bits: str, flip: bool) -> str:
    return complement(bits) if flip else bits


@dataclass(frozen=True)
class CatLabel:
    """Symbolic cat state; ``pattern[i]`` is the value on ``qubits[i]`` in the
    ``|u>`` branch. Patterns are canonicalized to start with ``0``."""
    qubits: tuple[int, ...]
    pattern: str
    sign: int = 1

    def __post_init__(self):
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"repeated qubits in {qubits}")
        if len(self.pattern) != len(qubits) or set(self.pattern) - {"0", "1"}:
            raise ValueError(f"pattern {self.pattern!r} does not fit qubits {qubits}")
        if not qubits:
            raise ValueError("a cat label needs at least one qubit")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        if self.pattern[0] == "1":
            object.__setattr__(self, "pattern", complement(self.pattern))

    @property
    def size(self) -> int:
        return len(self.qubits)

    def bits_on(self, qubits: Sequence[int]) -> str:
        """Pattern restricted to ``qubits`` (in that order)."""
        pos = {q: i for i, q in enumerate(self.qubits)}
        return "".join(self.pattern[pos[q]] for q in qubits)

    def reorder(self, qubits: Sequence[int]) -> "CatLabel":
        if sorted(qubits) != sorted(self.qubits):
            raise ValueError(f"{list(qubits)} is not a reordering of {self.qubits}")
        return CatLabel(tuple(qubits), self.bits_on(qubits), self.sign)

    def on(self, qubits: Sequence[int]) -> "CatLabel":
        """Same pattern and sign placed on different qubit ids."""
        return CatLabel(tuple(qubits), self.pattern, self.sign)

    def same_state(self, other: "CatLabel") -> bool:
        """Equality up to the listing order of the qubits."""
        return set(self.qubits) == set(other.qubits) and self == other.reorder(self.qubits)

    def to_record(self) -> dict:
        return {"qubits": list(self.qubits), "pattern": self.pattern, "sign": self.sign}

    @classmethod
    def from_record(cls, rec: dict) -> "CatLabel":
        return cls(tuple(rec["qubits"]), rec["pattern"], int(rec.get("sign", 1)))

    def __str__(self):
        return f"{'+' if self.sign > 0 else '-'}{self.pattern}@{','.join(map(str, self.qubits))}"


def cat_state(label: CatLabel) -> StateVector:
    """Normalized ``(|u> + sign |u^c>)/sqrt(2)``; local qubit ``i`` is
    ``label.qubits[i]``."""
    n = label.size
    if n < 2:
        raise ValueError("a cat state needs at least two qubits")
    if n > MAX_QUBITS:
        raise QubitCapError(f"{n} qubits exceeds the cap of {MAX_QUBITS}")
    u = sum(int(b) << i for i, b in enumerate(label.pattern))
    amps = np.zeros(2**n, dtype=complex)
    amps[u] = 1 / math.sqrt(2)
    amps[u ^ (2**n - 1)] = label.sign / math.sqrt(2)
    return StateVector(n, amps)


def enumerate_cat_basis(p: int, qubits: Sequence[int] | None = None) -> list[CatLabel]:
    """All ``2**p`` cat labels on ``p`` qubits, ordered by (pattern, sign) with
    ``+`` before ``-``."""
    if not 2 <= p <= MAX_MEASURED:
        raise ValueError(f"p must lie in [2, {MAX_MEASURED}], got {p}")
    qubits = tuple(range(p)) if qubits is None else tuple(qubits)
    if len(qubits) != p:
        raise ValueError(f"need {p} qubit ids, got {len(qubits)}")
    labels = []
    for tail in product("01", repeat=p - 1):
        pattern = "0" + "".join(tail)
        labels.append(CatLabel(qubits, pattern, 1))
        labels.append(CatLabel(qubits, pattern, -1))
    return labels


class Identified(NamedTuple):
    label: CatLabel
    phase: float  # state = exp(i*phase) * cat_state(label)
    fidelity: float


def identify_cat(state: StateVector, qubit_ids: Sequence[int], tol: float = 1e-10) -> Identified | None:
    """Find the cat label matching ``state`` up to a global phase.

    Overlaps are taken against the whole cat basis at once; each basis state
    has only two nonzero amplitudes so ``<cat|psi>`` is
    ``(psi[u] + sign * psi[u^c]) / sqrt(2)``.
    """
    n = len(qubit_ids)
    if state.num_qubits != n:
        raise ValueError(f"state has {state.num_qubits} qubits, got {n} ids")
    if n < 2:
        return None
    amps = state.amplitudes
    u = np.arange(0, 2**n, 2)  # qubit 0 (pattern[0]) is zero
    uc = u ^ (2**n - 1)
    overlaps = np.stack([amps[u] + amps[uc], amps[u] - amps[uc]]) / math.sqrt(2)
    fid = np.abs(overlaps) ** 2
    s_idx, u_idx = np.unravel_index(int(np.argmax(fid)), fid.shape)
    best = float(fid[s_idx, u_idx])
    if best < 1 - tol:
        return None
    index = int(u[u_idx])
    pattern = "".join(str((index >> i) & 1) for i in range(n))
    label = CatLabel(tuple(qubit_ids), pattern, 1 if s_idx == 0 else -1)
    return Identified(label, float(np.angle(overlaps[s_idx, u_idx])), best)


@dataclass(frozen=True)
class SwapScenario:
    """Cat states plus the qubits measured from each.

    ``measured[m]`` lists the qubits of ``cats[m]`` brought to the joint
    measurement. Cats with nothing measured pass through untouched. Measuring
    a whole cat is only allowed when ``terminal`` is set.
    """
    cats: tuple[CatLabel, ...]
    measured: tuple[tuple[int, ...], ...]
    terminal: bool = False

    def __post_init__(self):
        cats = tuple(self.cats)
        measured = tuple(tuple(int(q) for q in m) for m in self.measured)
        object.__setattr__(self, "cats", cats)
        object.__setattr__(self, "measured", measured)
        if len(cats) != len(measured):
            raise ValueError("need one measured list per cat")
        seen: set[int] = set()
        for m, (cat, sel) in enumerate(zip(cats, measured)):
            if cat.size < 2:
                raise ValueError(f"cat {m} has fewer than two qubits")
            if seen & set(cat.qubits):
                raise ValueError(f"cat {m} shares qubits with an earlier cat")
            seen |= set(cat.qubits)
            if len(set(sel)) != len(sel) or not set(sel) <= set(cat.qubits):
                raise ValueError(f"measured[{m}] = {list(sel)} is not a subset of {cat.qubits}")
            if len(sel) == cat.size and not self.terminal:
                raise ValueError(f"cat {m} is fully measured; set terminal=True to allow it")
        if not any(measured):
            raise ValueError("at least one cat must have a measured qubit")

    @property
    def active(self) -> list[int]:
        """Indices of cats with at least one measured qubit."""
        return [m for m, sel in enumerate(self.measured) if sel]

    @property
    def num_active(self) -> int:
        return len(self.active)

    @property
    def measured_qubits(self) -> tuple[int, ...]:
        return tuple(q for sel in self.measured for q in sel)

    @property
    def residual_qubits(self) -> tuple[int, ...]:
        """Unmeasured qubits of the active cats, cat by cat in listed order."""
        out = []
        for m in self.active:
            sel = set(self.measured[m])
            out.extend(q for q in self.cats[m].qubits if q not in sel)
        return tuple(out)

    @property
    def passthrough(self) -> list[CatLabel]:
        return [self.cats[m] for m, sel in enumerate(self.measured) if not sel]

    @property
    def simulated_qubits(self) -> int:
        return sum(self.cats[m].size for m in self.active)

    def check_swappable(self):
        p = len(self.measured_qubits)
        if not 2 <= p <= MAX_MEASURED:
            raise ValueError(f"{p} measured qubits; need between 2 and {MAX_MEASURED}")
        if len(self.residual_qubits) < 2:
            raise ValueError("the residual must keep at least two qubits")
        if self.simulated_qubits > MAX_QUBITS:
            raise QubitCapError(f"{self.simulated_qubits} qubits exceeds the cap of {MAX_QUBITS}")

    def to_record(self) -> dict:
        return {
            "cats": [c.to_record() for c in self.cats],
            "measured": [list(m) for m in self.measured],
            "terminal": self.terminal,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "SwapScenario":
        return cls(tuple(CatLabel.from_record(c) for c in rec["cats"]),
                   tuple(tuple(m) for m in rec["measured"]),
                   bool(rec.get("terminal", False)))


class SwapResult(NamedTuple):
    probability: float
    residual: CatLabel | None  # None only if the residual was not a cat state


def swap_predict(scenario: SwapScenario, outcome: CatLabel) -> SwapResult | None:
    """Closed-form outcome of projecting the measured qubits onto ``outcome``.

    Returns None for outcomes with zero probability. For a compatible outcome
    every active cat's measured slice equals the outcome slice up to a
    complement; the residual keeps (or complements) the unmeasured slice
    accordingly, its sign is the outcome sign times the product of the active
    cats' signs, and the probability is ``2**-N'`` for ``N'`` active cats.
    """
    scenario.check_swappable()
    if sorted(outcome.qubits) != sorted(scenario.measured_qubits):
        raise ValueError(
            f"outcome covers {sorted(outcome.qubits)}, expected {sorted(scenario.measured_qubits)}")
    pattern = []
    sign = outcome.sign
    for m in scenario.active:
        cat, sel = scenario.cats[m], scenario.measured[m]
        mine, seen = cat.bits_on(sel), outcome.bits_on(sel)
        if seen == mine:
            flip = False
        elif seen == complement(mine):
            flip = True
        else:
            return None
        rest = [q for q in cat.qubits if q not in set(sel)]
        pattern.append(_xor(cat.bits_on(rest), flip))
        sign *= cat.sign
    residual = CatLabel(scenario.residual_qubits, "".join(pattern), sign)
    return SwapResult(2.0 ** -scenario.num_active, residual)


def swap_simulate(scenario: SwapScenario, rng: np.random.Generator | None = None) -> dict[CatLabel, SwapResult]:
    """Numerically project the active cats onto every measured-cat outcome.

    Builds the dense product of the active cats, projects the measured qubits
    on each member of the cat basis and identifies the residual. Returns the
    nonzero-probability outcomes in basis order; with ``rng`` only one outcome,
    drawn from that distribution, is returned.
    """
    scenario.check_swappable()
    active = [scenario.cats[m] for m in scenario.active]
    state = tensor_product(*(cat_state(c) for c in active))
    local = {q: i for i, q in enumerate(q for c in active for q in c.qubits)}
    measured = scenario.measured_qubits
    subset = [local[q] for q in measured]
    residual_ids = scenario.residual_qubits

    outcomes = enumerate_cat_basis(len(measured), measured)
    projections = project_subset_many(state, subset, (cat_state(o) for o in outcomes))
    dist: dict[CatLabel, SwapResult] = {}
    for outcome, proj in zip(outcomes, projections):
        if not proj.valid:
            continue
        found = identify_cat(proj.residual, residual_ids)
        dist[outcome] = SwapResult(proj.probability, found.label if found else None)
    if rng is None:
        return dist
    keys = list(dist)
    probs = np.array([dist[k].probability for k in keys])
    pick = keys[rng.choice(len(keys), p=probs / probs.sum())]
    return {pick: dist[pick]}

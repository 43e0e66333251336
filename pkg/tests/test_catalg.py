from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catswap.acceptance import random_scenario, scenario_catalog
from catswap.catalg import (
    CatLabel,
    SwapScenario,
    cat_state,
    complement,
    enumerate_cat_basis,
    identify_cat,
    swap_predict,
    swap_simulate,
)
from catswap.qstate import QubitCapError, StateVector

from conftest import ket


def label_amplitudes(label, ids):
    """Cat amplitudes written out by hand on the register ``ids``."""
    amps = np.zeros(2 ** len(ids), dtype=complex)
    pos = {q: ids.index(q) for q in label.qubits}
    u = sum(int(b) << pos[q] for q, b in zip(label.qubits, label.pattern))
    uc = sum((1 - int(b)) << pos[q] for q, b in zip(label.qubits, label.pattern))
    amps[u] += 1 / np.sqrt(2)
    amps[uc] += label.sign / np.sqrt(2)
    return amps


def brute_force_swap(scenario, outcome):
    """Project the full product state by explicit index sums."""
    cats = [scenario.cats[m] for m in scenario.active]
    ids = [q for c in cats for q in c.qubits]
    full = np.ones(1, dtype=complex)
    for c in cats:
        full = np.kron(label_amplitudes(c, list(c.qubits)), full)
    meas = list(scenario.measured_qubits)
    rest = list(scenario.residual_qubits)
    proj = label_amplitudes(outcome, meas)
    vec = np.zeros(2 ** len(rest), dtype=complex)
    pos = {q: i for i, q in enumerate(ids)}
    for s, r in product(range(2 ** len(meas)), range(2 ** len(rest))):
        idx = sum(((s >> j) & 1) << pos[q] for j, q in enumerate(meas))
        idx |= sum(((r >> j) & 1) << pos[q] for j, q in enumerate(rest))
        vec[r] += np.conj(proj[s]) * full[idx]
    return float(np.vdot(vec, vec).real), vec


# -- labels ------------------------------------------------------------------------

def test_label_canonicalization():
    lab = CatLabel((4, 7, 9), "101", -1)
    assert lab.pattern == "010" and lab.sign == -1
    assert lab == CatLabel((4, 7, 9), "010", -1)
    assert str(lab) == "-010@4,7,9"
    assert CatLabel.from_record(lab.to_record()) == lab


def test_label_validation():
    for args in [((0, 0), "00"), ((0, 1), "0"), ((0, 1), "0a"), ((0, 1), "00", 2), ((), "")]:
        with pytest.raises(ValueError):
            CatLabel(*args)


def test_reorder_describes_same_state():
    lab = CatLabel((0, 1, 2), "011", -1)
    other = lab.reorder((2, 0, 1))
    assert other.pattern == "010" and lab.same_state(other)  # "101" canonicalized


def test_complement():
    assert complement("0110") == "1001"


@pytest.mark.parametrize("label,expected", [
    (CatLabel((0, 1), "00"), ket("00", "11")),
    (CatLabel((0, 1), "01"), ket("01", "10")),
])
def test_cat_state_examples(label, expected):
    np.testing.assert_allclose(cat_state(label).amplitudes, expected, atol=1e-15)


def test_cat_state_minus_sign():
    amps = cat_state(CatLabel((0, 1, 2), "000", -1)).amplitudes
    np.testing.assert_allclose(amps[[0, 7]], [2**-0.5, -(2**-0.5)])


def test_cat_state_is_written_in_label_order():
    # pattern "01" on qubits (5, 2): local qubit 0 is id 5
    amps = cat_state(CatLabel((5, 2), "01")).amplitudes
    np.testing.assert_allclose(amps, label_amplitudes(CatLabel((5, 2), "01"), [5, 2]))


# -- basis ---------------------------------------------------------------------------

def test_bell_basis():
    labels = enumerate_cat_basis(2)
    assert [(l.pattern, l.sign) for l in labels] == [("00", 1), ("00", -1), ("01", 1), ("01", -1)]


@pytest.mark.parametrize("p", [2, 3, 4, 6])
def test_basis_is_orthonormal_and_complete(p):
    labels = enumerate_cat_basis(p)
    assert len(labels) == 2**p == len(set(labels))
    mat = np.array([cat_state(l).amplitudes for l in labels])
    np.testing.assert_allclose(mat.conj() @ mat.T, np.eye(2**p), atol=1e-12)


@pytest.mark.parametrize("p", [1, 13])
def test_basis_range(p):
    with pytest.raises(ValueError):
        enumerate_cat_basis(p)


# -- identification -------------------------------------------------------------------

def test_identify_examples():
    found = identify_cat(StateVector(2, ket("00", "11")), [0, 1])
    assert found.label == CatLabel((0, 1), "00") and found.fidelity == pytest.approx(1)
    phased = np.exp(1j * np.pi / 3) * cat_state(CatLabel((0, 1, 2), "000", -1)).amplitudes
    found = identify_cat(StateVector(3, phased), [0, 1, 2])
    assert found.label.sign == -1 and found.phase == pytest.approx(np.pi / 3)
    assert identify_cat(StateVector(2, ket("00", "01")), [0, 1]) is None


def test_identify_every_basis_member():
    for lab in enumerate_cat_basis(4, (3, 8, 1, 5)):
        assert identify_cat(cat_state(lab), lab.qubits).label == lab


def test_identify_rejects_superpositions():
    a = cat_state(CatLabel((0, 1, 2), "000")).amplitudes
    b = cat_state(CatLabel((0, 1, 2), "011")).amplitudes
    assert identify_cat(StateVector(3, (a + b) / np.sqrt(2)), [0, 1, 2]) is None


# -- scenarios ---------------------------------------------------------------------------

def bells(*patterns):
    return tuple(CatLabel((2 * i + 1, 2 * i + 2), *p) for i, p in enumerate(patterns))


def test_scenario_validation():
    cat = CatLabel((0, 1), "00")
    with pytest.raises(ValueError):
        SwapScenario((cat,), ((0, 1),))  # fully measured without terminal
    with pytest.raises(ValueError):
        SwapScenario((cat,), ((2,),))
    with pytest.raises(ValueError):
        SwapScenario((cat, CatLabel((1, 2), "00")), ((0,), (2,)))
    with pytest.raises(ValueError):
        SwapScenario((cat,), ((),))
    with pytest.raises(ValueError):
        SwapScenario((cat,), ((0,),)).check_swappable()  # p = 1


def test_scenario_qubit_cap():
    cats = tuple(CatLabel(tuple(range(5 * i, 5 * i + 5)), "00000") for i in range(5))
    sc = SwapScenario(cats, tuple((c.qubits[0],) for c in cats))
    with pytest.raises(QubitCapError):
        sc.check_swappable()


def test_scenario_record_roundtrip():
    sc = scenario_catalog()[-1]
    assert SwapScenario.from_record(sc.to_record()) == sc


def test_predict_bell_swap_example():
    sc = SwapScenario(bells(("00",), ("00",)), ((2,), (3,)))
    res = swap_predict(sc, CatLabel((2, 3), "01", -1))
    assert res.probability == 0.25 and res.residual == CatLabel((1, 4), "01", -1)


def test_predict_two_bells_and_ghz_example():
    cats = bells(("00",), ("00",)) + (CatLabel((5, 6, 7), "000"),)
    sc = SwapScenario(cats, ((2,), (3,), (5,)))
    res = swap_predict(sc, CatLabel((2, 3, 5), "000"))
    assert res.probability == 0.125
    assert res.residual == CatLabel((1, 4, 6, 7), "0000")


def test_predict_incompatible_outcome():
    sc = SwapScenario((CatLabel((0, 1, 2), "000"), CatLabel((3, 4), "00")), ((0, 1), (3,)))
    outcome = CatLabel((0, 1, 3), "010")
    assert swap_predict(sc, outcome) is None
    prob, _ = brute_force_swap(sc, outcome)
    assert prob == pytest.approx(0, abs=1e-15)


def test_predict_rejects_wrong_outcome_qubits():
    sc = SwapScenario(bells(("00",), ("00",)), ((2,), (3,)))
    with pytest.raises(ValueError):
        swap_predict(sc, CatLabel((1, 3), "00"))


def test_simulate_bell_swap_example():
    sc = SwapScenario(bells(("00",), ("00",)), ((2,), (3,)))
    dist = swap_simulate(sc)
    assert len(dist) == 4
    for outcome, res in dist.items():
        assert res.probability == pytest.approx(0.25, abs=1e-12)
        assert res.residual == CatLabel((1, 4), outcome.pattern, outcome.sign)


def test_simulate_three_bells_into_ghz():
    sc = SwapScenario(bells(("00",), ("00",), ("00",)), ((2,), (4,), (6,)))
    dist = swap_simulate(sc)
    assert len(dist) == 8
    assert {r.residual.size for r in dist.values()} == {3}
    assert dist[CatLabel((2, 4, 6), "000")].residual == CatLabel((1, 3, 5), "000")


def test_simulate_sampling_picks_one_outcome():
    sc = SwapScenario(bells(("00",), ("01", -1)), ((2,), (3,)))
    full = swap_simulate(sc)
    picked = swap_simulate(sc, np.random.default_rng(3))
    assert len(picked) == 1
    (outcome, res), = picked.items()
    assert full[outcome] == res


def test_passthrough_cats_are_untouched():
    sc = SwapScenario(bells(("00",), ("00",), ("01", -1)), ((2,), (3,), ()))
    assert sc.passthrough == [CatLabel((5, 6), "01", -1)]
    assert sc.simulated_qubits == 4
    assert all(r.probability == pytest.approx(0.25) for r in swap_simulate(sc).values())


def test_terminal_scenario():
    sc = SwapScenario((CatLabel((0, 1), "01"), CatLabel((2, 3, 4), "011")), ((0, 1), (2,)),
                      terminal=True)
    dist = swap_simulate(sc)
    # the consumed Bell pair still counts as an active cat
    assert len(dist) == 4
    for outcome, res in dist.items():
        assert res.probability == pytest.approx(0.25, abs=1e-12)
        assert res.residual.qubits == (3, 4)
        assert swap_predict(sc, outcome).residual == res.residual


@pytest.mark.parametrize("sc", scenario_catalog(), ids=lambda s: str(s.cats[0]) + f"x{len(s.cats)}")
def test_catalog_against_brute_force(sc):
    for outcome in enumerate_cat_basis(len(sc.measured_qubits), sc.measured_qubits):
        if sc.simulated_qubits > 10:
            break
        pred = swap_predict(sc, outcome)
        prob, vec = brute_force_swap(sc, outcome)
        if pred is None:
            assert prob < 1e-12
            continue
        assert prob == pytest.approx(pred.probability, abs=1e-12)
        expected = label_amplitudes(pred.residual, list(sc.residual_qubits))
        assert abs(np.vdot(expected, vec / np.sqrt(prob))) ** 2 == pytest.approx(1, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_simulate_equals_predict_on_random_scenarios(seed):
    sc = random_scenario(np.random.default_rng(seed), max_qubits=10)
    dist = swap_simulate(sc)
    assert len(dist) == 2**sc.num_active
    assert sum(r.probability for r in dist.values()) == pytest.approx(1, abs=1e-10)
    for outcome, res in dist.items():
        pred = swap_predict(sc, outcome)
        assert pred.residual == res.residual
        assert pred.probability == pytest.approx(res.probability, abs=1e-10)


def test_random_scenarios_respect_limits():
    rng = np.random.default_rng(0)
    for _ in range(100):
        sc = random_scenario(rng)
        sc.check_swappable()
        assert sum(c.size for c in sc.cats) <= 12


def test_twelve_measured_qubits():
    cats = tuple(CatLabel((2 * i, 2 * i + 1), "01" if i % 2 else "00", (-1) ** i) for i in range(12))
    sc = SwapScenario(cats, tuple((c.qubits[1],) for c in cats))
    outcome = CatLabel(sc.measured_qubits, "0" * 12)
    assert swap_predict(sc, outcome).probability == 2.0**-12

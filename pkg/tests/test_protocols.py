import math

import numpy as np
import pytest

from catswap.catalg import CatLabel, SwapScenario, cat_state, enumerate_cat_basis
from catswap.protocols import (
    InterceptResend,
    NetworkTopology,
    PairLink,
    ProtocolReport,
    SuperdenseAssignment,
    amplitude_pair,
    amplitude_swap_correct,
    analyzer_rates,
    conference_key,
    exchange_entangle,
    four_user_topology,
    ghz_from_bell_pairs,
    ghz_stabilizers,
    grow_cat,
    grow_chain,
    information_rates,
    stabilizer_check,
    superdense_decode,
    superdense_encode,
    superdense_roundtrip,
    superdense_table,
    swap_report,
)
from catswap.qstate import StateVector, new_basis_state

from conftest import entropy_oracle, ket, pauli_matrix

GHZ3 = ket("000", "111")


# -- reports -------------------------------------------------------------------------

def test_report_checks_and_tolerance():
    r = ProtocolReport("demo")
    r.check("exact", 1, 1)
    r.check("close", 0.5, 0.5 + 1e-12, tol=1e-10)
    assert r.passed and not r.failures()
    r.check("far", 0.5, 0.6, tol=1e-10)
    assert not r.passed and [c.name for c in r.failures()] == ["far"]
    d = r.to_dict()
    assert d["checks"][2] == {"name": "far", "expected": 0.5, "measured": 0.6, "passed": False}
    assert "elapsed" not in d


def test_empty_report_serializes():
    assert ProtocolReport("empty").to_dict()["checks"] == []


def test_swap_report_bell_swap():
    sc = SwapScenario((CatLabel((1, 2), "00"), CatLabel((3, 4), "00")), ((2,), (3,)))
    r = swap_report(sc)
    assert r.passed and len(r.outcomes) == 4
    assert all(o["probability"] == pytest.approx(0.25) for o in r.outcomes)


def test_swap_report_sampled_counts():
    sc = SwapScenario((CatLabel((1, 2), "00"), CatLabel((3, 4), "00")), ((2,), (3,)))
    r = swap_report(sc, np.random.default_rng(1), trials=4000)
    counts = [o["count"] for o in r.outcomes]
    assert r.passed and sum(counts) == 4000
    # each outcome has probability 1/4; allow 4 sigma
    assert max(abs(c - 1000) for c in counts) < 4 * math.sqrt(4000 * 0.25 * 0.75)


# -- exchange --------------------------------------------------------------------------

def test_exchange_three_users():
    r = exchange_entangle(four_user_topology(), ["A", "B", "C"])
    assert r.passed and len(r.outcomes) == 8
    assert r.data["users_qubits"] == [1, 4, 6]
    for o in r.outcomes:
        assert o["probability"] == pytest.approx(1 / 8)
        assert o["users_cat"]["qubits"] == [1, 4, 6]
        assert o["untouched_fidelity"] == {"D": pytest.approx(1.0, abs=1e-10)}


def test_exchange_two_users_is_ordinary_swapping():
    r = exchange_entangle(four_user_topology(), ["A", "B"])
    assert r.passed and len(r.outcomes) == 4
    assert all(len(o["users_cat"]["qubits"]) == 2 for o in r.outcomes)


def test_exchange_all_users():
    r = exchange_entangle(four_user_topology(), ["A", "B", "C", "D"])
    assert r.passed and len(r.outcomes) == 16
    assert all(o["probability"] == pytest.approx(1 / 16) for o in r.outcomes)


def test_exchange_entropies_against_partial_trace():
    topo = NetworkTopology.star(["u", "v", "w"])
    r = exchange_entangle(topo, ["u", "v", "w"])
    for o in r.outcomes:
        lab = CatLabel.from_record(o["users_cat"])
        amps = cat_state(lab).amplitudes
        for k in range(3):
            assert entropy_oracle(amps, 3, [k]) == pytest.approx(o["entropies"][k], abs=1e-9)


def test_exchange_with_nonstandard_pairs():
    topo = NetworkTopology(("a", "b", "c"), {"a": PairLink(0, 1, "01", -1),
                                             "b": PairLink(2, 3), "c": PairLink(4, 5, "01")})
    r = exchange_entangle(topo, ["a", "c"])
    assert r.passed and r.outcomes[0]["untouched_fidelity"]["b"] == pytest.approx(1)


def test_exchange_sampled_and_bad_subset():
    r = exchange_entangle(four_user_topology(), ["B", "D"], np.random.default_rng(5))
    assert r.passed and len(r.outcomes) == 1
    with pytest.raises(ValueError):
        exchange_entangle(four_user_topology(), ["A"])
    with pytest.raises(ValueError):
        exchange_entangle(four_user_topology(), ["A", "Q"])


def test_topology_validation():
    with pytest.raises(ValueError):
        NetworkTopology(("a", "b"), {"a": PairLink(0, 1)})
    with pytest.raises(ValueError):
        NetworkTopology(("a", "b"), {"a": PairLink(0, 1), "b": PairLink(1, 2)})


# -- growing cats ------------------------------------------------------------------------

@pytest.mark.parametrize("N", [2, 4, 7])
def test_grow_cat(N):
    r = grow_cat(N)
    assert r.passed and len(r.outcomes) == 4
    assert {len(o["residual"]["qubits"]) for o in r.outcomes} == {N + 1}


def test_grow_cat_range():
    for N in (1, 11):
        with pytest.raises(ValueError):
            grow_cat(N)


def test_grow_chain_reaches_ten():
    r = grow_chain(2, 10, np.random.default_rng(0))
    assert r.passed
    assert [o["N"] for o in r.outcomes] == list(range(2, 11))
    assert len(r.outcomes[-1]["residual"]["qubits"]) == 11


def test_ghz_from_three_bells():
    r = ghz_from_bell_pairs()
    assert r.passed and len(r.outcomes) == 8
    assert all(len(o["residual"]["qubits"]) == 3 for o in r.outcomes)


# -- superdense coding ---------------------------------------------------------------------

def test_superdense_standard_case():
    for msg in ("00", "01", "10", "11"):
        decoded, r = superdense_roundtrip(1, msg)
        assert decoded == msg and r.passed


def test_superdense_identity_message():
    a = SuperdenseAssignment.default(3)
    state = superdense_encode(a, "0000")
    np.testing.assert_allclose(state.amplitudes, ket("0000", "1111"), atol=1e-15)
    assert superdense_decode(a, state)[0] == "0000"


@pytest.mark.parametrize("N", range(1, 6))
def test_superdense_table_is_bijective(N):
    r = superdense_table(N)
    assert r.passed
    labels = {CatLabel.from_record(o["label"]) for o in r.outcomes}
    assert labels == set(enumerate_cat_basis(N + 1))


@pytest.mark.parametrize("designated", [0, 2])
def test_superdense_any_designated_sender(designated):
    a = SuperdenseAssignment(("p", "q", "r"), designated=designated)
    assert a.split("1011")["p" if designated == 0 else "r"] in ("10", "11")
    assert superdense_table(3, a).passed


def test_superdense_assignment_validation():
    with pytest.raises(ValueError):
        SuperdenseAssignment(())
    with pytest.raises(ValueError):
        SuperdenseAssignment(("a",), designated=1)
    with pytest.raises(ValueError):
        SuperdenseAssignment(("R",))
    with pytest.raises(ValueError):
        SuperdenseAssignment.default(2).split("01")


def test_operation_sets_multiply_to_message_space():
    a = SuperdenseAssignment.default(4)
    assert math.prod(len(s) for s in a.operation_sets.values()) == 2**5


@pytest.mark.parametrize("N,t_h,t_c,r1,r2", [
    (1, 1.0, 1.0, 1.0, 1.0),
    (4, 2.0, 1.0, 5 / 6, 2 / 3),
    (7, 1.5, 1.5, 8 / (1.5 * 8), 14 / (7 * 3.0)),
])
def test_information_rates(N, t_h, t_c, r1, r2):
    rates = information_rates(N, t_h, t_c)
    assert rates.r1 == pytest.approx(r1) and rates.r2 == pytest.approx(r2)
    assert (rates.particles_multiparty, rates.particles_pairwise) == (N + 1, 2 * N)
    assert analyzer_rates(N, t_h, t_c) == pytest.approx((rates.r1, rates.r2))


def test_information_rates_equal_gate_times():
    for N in range(1, 9):
        r = information_rates(N, 0.7, 0.7)
        assert r.r1 == pytest.approx(r.r2, rel=1e-12)


# -- amplitude errors ---------------------------------------------------------------------------

def test_amplitude_pair_layout():
    s = amplitude_pair(0.3)
    assert s.amplitudes[0b10] == pytest.approx(math.cos(0.3))  # first particle 0, second 1


@pytest.mark.parametrize("theta,success", [(math.pi / 4, 0.5), (math.pi / 6, 3 / 8)])
def test_amplitude_examples(theta, success):
    r = amplitude_swap_correct(theta)
    assert r.passed
    p_success = sum(o["probability"] for o in r.outcomes if o["success"])
    assert p_success == pytest.approx(success, abs=1e-12)
    assert sum(o["probability"] for o in r.outcomes) == pytest.approx(1, abs=1e-12)


def test_amplitude_closed_forms_on_grid():
    for theta in np.linspace(0.05, 1.5, 12):
        r = amplitude_swap_correct(float(theta))
        success = sum(o["probability"] for o in r.outcomes if o["success"])
        assert success == pytest.approx(math.sin(2 * theta) ** 2 / 2, abs=1e-10)
        assert 1 - success == pytest.approx((1 + math.cos(2 * theta) ** 2) / 2, abs=1e-10)
        assert r.passed


def test_amplitude_failure_residual_is_less_entangled():
    theta = 0.4
    r = amplitude_swap_correct(theta)
    input_entropy = entropy_oracle(amplitude_pair(theta).amplitudes, 2, [0])
    assert r.data["input_entropy"] == pytest.approx(input_entropy, abs=1e-12)
    assert r.data["expected_failure_entropy"] < input_entropy


def test_amplitude_sampled_mode():
    r = amplitude_swap_correct(math.pi / 6, np.random.default_rng(2), trials=5000)
    assert r.passed and sum(r.data["counts"]) == 5000


def test_amplitude_rejects_out_of_range():
    with pytest.raises(ValueError):
        amplitude_swap_correct(0.0)


# -- conferencing ------------------------------------------------------------------------------

def test_stabilizers_on_intact_ghz():
    values = {str(p): v for p, v in stabilizer_check(StateVector(3, GHZ3), 3)}
    assert set(values) == {"XXX", "-YYX", "-YXY", "-XYY", "ZZI", "ZIZ", "IZZ"}
    assert all(v == pytest.approx(1.0, abs=1e-12) for v in values.values())
    for p in ghz_stabilizers(3):
        oracle = np.vdot(GHZ3, pauli_matrix(p.letters, p.sign) @ GHZ3).real
        assert oracle == pytest.approx(1.0)


def test_stabilizers_detect_decoherence():
    values = {str(p): v for p, v in stabilizer_check(new_basis_state(3, "000"), 3)}
    assert values["XXX"] == pytest.approx(0) and values["ZZI"] == pytest.approx(1)


def test_conference_single_mode_no_eavesdropper():
    r = conference_key(3, 400, "single", 1)
    assert r.passed
    assert r.data["xxx_sampled"] == 1.0 and r.data["error_rate"] == 0
    assert r.data["agreement_rate"] == 1.0 and r.data["sift_rate"] == 1.0
    assert len(set(r.data["keys"])) == 1


def test_conference_dual_mode_sift_rate():
    r = conference_key(3, 2000, "dual", 2)
    assert r.passed
    assert abs(r.data["sift_rate"] - 0.5) < 4 * math.sqrt(0.25 / 2000)
    assert r.data["error_rate"] == 0


def test_conference_z_attack():
    r = conference_key(3, 3000, "single", 3, InterceptResend(0, "Z"))
    assert r.passed
    assert abs(r.data["xxx_sampled"]) < 0.08
    assert r.data["xxx_exact_mean"] == pytest.approx(0.0, abs=1e-12)
    assert abs(r.data["error_rate"] - 0.5) < 0.05


def test_conference_random_xy_attack_error_rate():
    r = conference_key(3, 4000, "dual", 4, InterceptResend(1, "XY"))
    assert abs(r.data["error_rate"] - 0.25) < 0.04


def test_conference_is_reproducible():
    a = conference_key(4, 200, "dual", 9, InterceptResend(2, "Z")).to_dict()
    b = conference_key(4, 200, "dual", 9, InterceptResend(2, "Z")).to_dict()
    assert a == b


def test_conference_argument_checks():
    with pytest.raises(ValueError):
        conference_key(1, 10)
    with pytest.raises(ValueError):
        conference_key(3, 0)
    with pytest.raises(ValueError):
        conference_key(3, 10, "triple")

"""Acceptance criteria, runnable from ``catswap verify`` and from pytest.

Every criterion returns a :class:`Criterion` with a one-line detail string
holding the measured quantity behind the verdict.
"""
from __future__ import annotations

import math
from itertools import combinations, product
from typing import Callable, NamedTuple

import numpy as np

from .catalg import (
    CatLabel,
    SwapScenario,
    cat_state,
    complement,
    enumerate_cat_basis,
    identify_cat,
    swap_predict,
    swap_simulate,
)
from .circuits import analyze_cat, bits_to_label, generate_cat, zeilinger_merge
from .cli import bundled_scenarios, emit_report, parse_config, run_scenario
from .protocols import (
    InterceptResend,
    amplitude_swap_correct,
    conference_key,
    exchange_entangle,
    four_user_topology,
    grow_chain,
    information_rates,
    superdense_table,
)
from .qstate import CNOT, apply_gate, from_amplitudes, postselect_qubit, tensor_product
from .timing import LinkModel, direct_time, hierarchical_time, relay_time

TOL = 1e-10
CONFERENCE_ROUNDS = 10_000
RANDOM_SCENARIOS = 500


class Criterion(NamedTuple):
    number: int
    title: str
    passed: bool
    detail: str


BELL_LABELS = [("00", 1), ("00", -1), ("01", 1), ("01", -1)]


def bell_swap_residual(in12: tuple[str, int], in34: tuple[str, int], outcome: tuple[str, int]) -> tuple[str, int]:
    """Residual on (1, 4) read off the four-outcome table for two Bell pairs.

    With pair patterns ``u1 u2`` and ``u3 u4``, projecting (2, 3) onto
    ``|u2 u3> +/- |u2^c u3^c>`` leaves ``|u1 u4> +/- |u1^c u4^c>`` and
    projecting onto ``|u2 u3^c> +/- ...`` leaves ``|u1 u4^c> +/- ...``.
    Non-trivial input signs multiply into the residual sign.
    """
    (p12, s12), (p34, s34), (po, so) = in12, in34, outcome
    u1, u2 = p12
    u3, u4 = p34
    if CatLabel((2, 3), u2 + u3).pattern == CatLabel((2, 3), po).pattern:
        pattern = u1 + u4
    else:
        pattern = u1 + complement(u4)
    return CatLabel((1, 4), pattern).pattern, so * s12 * s34


def criterion_1() -> Criterion:
    worst, bad = 0.0, 0
    for in12, in34 in product(BELL_LABELS, repeat=2):
        sc = SwapScenario((CatLabel((1, 2), *in12), CatLabel((3, 4), *in34)), ((2,), (3,)))
        dist = swap_simulate(sc)
        bad += len(dist) != 4
        for outcome, res in dist.items():
            worst = max(worst, abs(res.probability - 0.25))
            want = bell_swap_residual(in12, in34, (outcome.pattern, outcome.sign))
            bad += res.residual is None or (res.residual.pattern, res.residual.sign) != want
    return Criterion(1, "Bell-swap table (16 inputs)", bad == 0 and worst <= TOL,
                     f"max |p - 0.25| = {worst:.2e}, mismatches = {bad}")


def random_scenario(rng: np.random.Generator, max_qubits: int = 12) -> SwapScenario:
    """Random cats with random measured subsets, at most ``max_qubits`` in total."""
    while True:
        n_cats = int(rng.integers(1, 5))
        sizes = [int(s) for s in rng.integers(2, 6, size=n_cats)]
        if sum(sizes) > max_qubits:
            continue
        ids = [int(q) for q in rng.permutation(sum(sizes))]
        terminal = bool(rng.random() < 0.2)
        cats, measured, pos = [], [], 0
        for s in sizes:
            qubits = tuple(ids[pos:pos + s])
            pos += s
            pattern = "".join(rng.choice(["0", "1"], size=s))
            cats.append(CatLabel(qubits, pattern, int(rng.choice([1, -1]))))
            k = int(rng.integers(0, (s if terminal else s - 1) + 1))
            measured.append(tuple(int(q) for q in rng.choice(qubits, size=k, replace=False)))
        try:
            sc = SwapScenario(tuple(cats), tuple(measured), terminal)
            sc.check_swappable()
        except ValueError:
            continue
        return sc


def scenario_catalog() -> list[SwapScenario]:
    bell = lambda a, b, p="00", s=1: CatLabel((a, b), p, s)  # noqa: E731
    out = []
    for in12, in34 in product(BELL_LABELS, repeat=2):
        out.append(SwapScenario((bell(1, 2, *in12), bell(3, 4, *in34)), ((2,), (3,))))
    ghz = CatLabel((5, 6, 7), "000")
    out += [
        SwapScenario((bell(1, 2), bell(3, 4), ghz), ((2,), (3,), (5,))),
        SwapScenario((bell(1, 2), bell(3, 4), bell(5, 6)), ((2,), (4,), (6,))),
        SwapScenario((CatLabel((0, 1, 2, 3), "0110", -1),), ((1, 2),)),
        SwapScenario((CatLabel((0, 1, 2), "010"), bell(3, 4, "01", -1)), ((0, 2), (4,))),
        SwapScenario((bell(0, 1), CatLabel((2, 3, 4), "011")), ((0, 1), (2,)), terminal=True),
        SwapScenario((bell(0, 1), bell(2, 3), bell(4, 5, "01")), ((1,), (2,), ())),
        SwapScenario((CatLabel((0, 1, 2), "001"), CatLabel((3, 4, 5), "010", -1)), ((1, 2), (3, 4))),
        SwapScenario(tuple(bell(2 * i, 2 * i + 1, "01", (-1) ** i) for i in range(6)),
                     tuple((2 * i + 1,) for i in range(6))),
    ]
    for N in range(2, 8):
        out.append(SwapScenario((CatLabel(tuple(range(N)), "0" * N), CatLabel((N, N + 1, N + 2), "000")),
                                ((N - 1,), (N,))))
    return out


def _theorem_holds(sc: SwapScenario) -> tuple[bool, float]:
    dist = swap_simulate(sc)
    expected = 2.0 ** -sc.num_active
    total = sum(r.probability for r in dist.values())
    ok = len(dist) == 2**sc.num_active and abs(total - 1) <= TOL
    dev = 0.0
    for outcome, res in dist.items():
        pred = swap_predict(sc, outcome)
        dev = max(dev, abs(res.probability - expected))
        ok &= (res.residual is not None and pred is not None and pred.residual == res.residual
               and abs(pred.probability - res.probability) <= TOL)
    # outcomes the simulation dropped must be the incompatible ones
    for outcome in enumerate_cat_basis(len(sc.measured_qubits), sc.measured_qubits):
        if outcome not in dist:
            ok &= swap_predict(sc, outcome) is None
    return ok and dev <= TOL, dev


def criterion_2(seed: int = 2024) -> Criterion:
    rng = np.random.default_rng(seed)
    cases = scenario_catalog() + [random_scenario(rng) for _ in range(RANDOM_SCENARIOS)]
    failures, worst = 0, 0.0
    for sc in cases:
        ok, dev = _theorem_holds(sc)
        failures += not ok
        worst = max(worst, dev)
    return Criterion(2, "Generalized swap theorem", failures == 0,
                     f"{len(cases)} scenarios, failures = {failures}, max |p - 2^-N'| = {worst:.2e}")


def criterion_3() -> Criterion:
    config = parse_config(bundled_scenarios()["ghz_projection.json"])
    report = run_scenario(config)
    outs = report.outcomes
    ok = (len(outs) == 8 and report.passed
          and all(len(o["outcome"]["qubits"]) == 3 and len(o["residual"]["qubits"]) == 4
                  and abs(o["probability"] - 0.125) <= TOL for o in outs))
    return Criterion(3, "Three-cat projection onto a 3-qubit cat", ok,
                     f"{len(outs)} outcomes, probabilities {sorted({round(o['probability'], 12) for o in outs})}")


def criterion_4() -> Criterion:
    topo = four_user_topology()
    bad, runs, worst_s, worst_f = 0, 0, 0.0, 0.0
    for k in (2, 3, 4):
        for subset in combinations(topo.users, k):
            report = exchange_entangle(topo, subset)
            runs += 1
            bad += not report.passed
            for o in report.outcomes:
                worst_s = max([worst_s] + [abs(e - 1) for e in o["entropies"]])
                worst_f = max([worst_f] + [abs(f - 1) for f in o["untouched_fidelity"].values()])
    ok = bad == 0 and worst_s <= 1e-9 and worst_f <= 1e-10
    return Criterion(4, "Four-user exchange network", ok,
                     f"{runs} subsets, max entropy dev {worst_s:.1e}, max fidelity dev {worst_f:.1e}")


def criterion_5() -> Criterion:
    thetas = np.linspace(0, math.pi / 2, 52)[1:-1]
    bad, worst = 0, 0.0
    for theta in thetas:
        report = amplitude_swap_correct(float(theta))
        bad += not report.passed
        for c in report.checks:
            if c.name.endswith("probability"):
                worst = max(worst, abs(c.measured - c.expected))
    return Criterion(5, "Amplitude-error correction", bad == 0 and worst <= TOL,
                     f"{len(thetas)} angles, max probability error {worst:.1e}")


def criterion_6() -> Criterion:
    bad = 0
    for N in range(1, 9):
        bad += not superdense_table(N).passed
    rates_ok = True
    for N in range(1, 9):
        for t in (0.5, 1.0, 3.0):
            r = information_rates(N, t, t)
            rates_ok &= abs(r.r1 - r.r2) <= 1e-12 * r.r1
            rates_ok &= (r.particles_multiparty, r.particles_pairwise) == (N + 1, 2 * N)
    return Criterion(6, "Multiparty superdense coding", bad == 0 and rates_ok,
                     f"N = 1..8 exhaustive, failing N = {bad}, r1 == r2 at t_h == t_c: {rates_ok}")


def _two_bell_merge_trace() -> bool:
    # particles 1..4 on qubits 0..3; kets below are written particle 1 first
    def ket_sum(*kets):
        amps = np.zeros(2 ** len(kets[0]), dtype=complex)
        for k in kets:
            amps[sum(int(b) << i for i, b in enumerate(k))] += 1
        return from_amplitudes(amps)
    start = ket_sum("0000", "0011", "1100", "1111")
    bells = tensor_product(cat_state(CatLabel((0, 1), "00")), cat_state(CatLabel((2, 3), "00")))
    ok = abs(start.fidelity(bells) - 1) <= TOL
    after = apply_gate(start, CNOT(1, 2))
    ok &= abs(after.fidelity(ket_sum("0000", "0011", "1110", "1101")) - 1) <= TOL
    for bit, kets in ((0, ("000", "111")), (1, ("001", "110"))):
        _, residual = postselect_qubit(after, 2, bit)
        ok &= abs(residual.fidelity(ket_sum(*kets)) - 1) <= TOL
    return ok


def criterion_7() -> Criterion:
    bij_ok = True
    for n in range(2, 9):
        labels = set()
        for bits in product((0, 1), repeat=n):
            st = generate_cat(bits)
            label = bits_to_label(bits)
            bij_ok &= abs(st.fidelity(cat_state(label)) - 1) <= TOL
            bits_back, label_back = analyze_cat(st)
            bij_ok &= bits_back == bits and label_back == label
            labels.add(label)
        bij_ok &= labels == set(enumerate_cat_basis(n))
    merge_ok = True
    cases = 0
    for N in range(2, 11):
        for M in range(2, 13 - N):
            a = CatLabel(tuple(range(N)), "0" * N)
            b = CatLabel(tuple(range(N, N + M)), "0" * M)
            state = tensor_product(cat_state(a), cat_state(b))
            for bit in (0, 1):
                _, residual = zeilinger_merge(state, N - 1, N, outcome=bit)
                merge_ok &= identify_cat(residual, range(N + M - 1)) is not None
                cases += 1
    trace_ok = _two_bell_merge_trace()
    return Criterion(7, "Gate networks", bij_ok and merge_ok and trace_ok,
                     f"bijection n<=8: {bij_ok}, merge branches {cases}: {merge_ok}, "
                     f"two-Bell trace: {trace_ok}")


def criterion_8(seed: int = 8) -> Criterion:
    report = grow_chain(2, 10, np.random.default_rng(seed))
    steps = sum(c.name.startswith("step") for c in report.checks)
    return Criterion(8, "Grow chain N = 2..10", report.passed and steps == 9,
                     f"{steps} steps, failed checks = {len(report.failures())}")


def criterion_9() -> Criterion:
    m = LinkModel(L=4.0, v=1.0, c=2.0, t_m=1.0)  # t_m = L/4v
    boundary = relay_time(m)
    ok = boundary.t2 == direct_time(m) and not boundary.advantageous
    ok &= hierarchical_time(m, 1) == boundary.t2
    photon_wins = 0
    for L in (0.5, 1.0, 10.0, 1e3):
        for tm in (0.0, 1e-6, 0.1, 1.0, 10.0):
            photon = LinkModel(L=L, v=1.0, c=1.0, t_m=tm)
            r = relay_time(photon, include_classical=True)
            photon_wins += r.t2 < direct_time(photon)
    ok &= photon_wins == 0
    return Criterion(9, "Relay timing", ok,
                     f"boundary t2 = {boundary.t2} vs t1 = {direct_time(m)}, photon wins = {photon_wins}")


def criterion_10(seed: int = 10) -> Criterion:
    single = conference_key(3, CONFERENCE_ROUNDS, "single", seed)
    dual = conference_key(3, CONFERENCE_ROUNDS, "dual", seed + 1)
    attacked = conference_key(3, CONFERENCE_ROUNDS, "single", seed + 2, InterceptResend(0, "Z"))
    invariant = single.checks[0].passed and single.data["xxx_sampled"] == 1.0
    sift = dual.data["sift_rate"]
    xxx = attacked.data["xxx_sampled"]
    errors = attacked.data["error_rate"]
    ok = invariant and abs(sift - 0.5) <= 0.02 and abs(xxx) <= 0.05 and errors > 0
    return Criterion(10, "Conference key", ok,
                     f"product invariant {invariant}, sift {sift:.4f}, attacked XXX {xxx:+.4f}, "
                     f"attacked error rate {errors:.4f}")


def criterion_11() -> Criterion:
    mismatched = []
    files = bundled_scenarios()
    for name, text in files.items():
        first = emit_report(run_scenario(parse_config(text)))
        second = emit_report(run_scenario(parse_config(text)))
        if first != second:
            mismatched.append(name)
    return Criterion(11, "Deterministic reports", not mismatched,
                     f"{len(files)} bundled scenarios, mismatched: {mismatched or 'none'}")


CRITERIA: list[Callable[[], Criterion]] = [
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
    criterion_7, criterion_8, criterion_9, criterion_10, criterion_11,
]


def run_all() -> list[Criterion]:
    return [c() for c in CRITERIA]

"""Several cats measured together: two Bell pairs and a GHZ triple, one
particle of each projected onto a three-particle cat."""
import numpy as np

from catswap import CatLabel, SwapScenario, cat_state, swap_predict, swap_simulate
from catswap.acceptance import random_scenario
from catswap.qstate import subsystem_entropy

cats = (CatLabel((1, 2), "00"), CatLabel((3, 4), "00"), CatLabel((5, 6, 7), "000"))
scenario = SwapScenario(cats, ((2,), (3,), (5,)))
dist = swap_simulate(scenario)
print(len(dist), "outcomes")
for outcome, result in dist.items():
    print(f"  {outcome}  p={result.probability:.4f}  ->  {result.residual}")

# Every residual is a cat on the four unmeasured particles, so each one of them
# carries exactly one bit of entanglement entropy.
res = next(iter(dist.values())).residual
print("per-particle entropy:", [subsystem_entropy(cat_state(res), [k]) for k in range(res.size)])

# An outcome that does not match the slice of a cat is simply impossible.
three = SwapScenario((CatLabel((0, 1, 2), "000"), CatLabel((3, 4), "00")), ((0, 1), (3,)))
print("incompatible outcome:", swap_predict(three, CatLabel((0, 1, 3), "010")))

# Random scenarios: symbolic rule against the dense simulation.
rng = np.random.default_rng(0)
mismatches = 0
for _ in range(50):
    sc = random_scenario(rng)
    for outcome, result in swap_simulate(sc).items():
        mismatches += swap_predict(sc, outcome).residual != result.residual
print("random scenarios checked: 50, mismatches:", mismatches)

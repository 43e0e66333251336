"""Two Bell pairs, a Bell measurement on the middle particles, and the
resulting pair on the outer particles. Run: python demos/01_bell_swap.py"""
import numpy as np

from catswap import CatLabel, SwapScenario, cat_state, swap_predict, swap_simulate
from catswap.qstate import project_subset, tensor_product

# Pairs (1,2) and (3,4), both (|00> + |11>)/sqrt2.
pair_a = CatLabel((1, 2), "00")
pair_b = CatLabel((3, 4), "00")
state = tensor_product(cat_state(pair_a), cat_state(pair_b))
print("four-particle state has", state.num_qubits, "qubits, norm", state.norm)

# Particle 2 sits on local qubit 1 and particle 3 on local qubit 2.
# Project them onto |01> - |10> by hand first.
singlet = cat_state(CatLabel((0, 1), "01", -1))
prob, residual = project_subset(state, [1, 2], singlet)
print("P(singlet on 2,3) =", prob)
print("residual amplitudes on (1,4):", np.round(residual.amplitudes, 6))

# The same question asked of the symbolic rule and of the full simulation.
scenario = SwapScenario((pair_a, pair_b), ((2,), (3,)))
for outcome, result in swap_simulate(scenario).items():
    predicted = swap_predict(scenario, outcome)
    print(f"outcome {outcome}  p={result.probability:.3f}  residual {result.residual}"
          f"  rule agrees: {predicted.residual == result.residual}")

# A different input pair changes which residual goes with which outcome.
twisted = SwapScenario((CatLabel((1, 2), "01", -1), pair_b), ((2,), (3,)))
print()
for outcome, result in swap_simulate(twisted).items():
    print(f"outcome {outcome}  ->  {result.residual}")

"""Pairs damaged to cos(t)|01> + sin(t)|10> can be repaired probabilistically
by swapping two of them."""
import numpy as np

from catswap.protocols import amplitude_swap_correct

print(" theta   success  (sin^2 2t)/2   failure entropy  input entropy")
for theta in np.linspace(0.1, np.pi / 2 - 0.1, 7):
    r = amplitude_swap_correct(float(theta))
    success = sum(o["probability"] for o in r.outcomes if o["success"])
    print(f"{theta:6.3f}  {success:8.5f}  {np.sin(2 * theta) ** 2 / 2:11.5f}"
          f"  {r.data['expected_failure_entropy']:15.5f}  {r.data['input_entropy']:13.5f}")

sampled = amplitude_swap_correct(np.pi / 6, np.random.default_rng(0), trials=20000)
print("\nsampled at pi/6:", sampled.data["counts"], "passed:", sampled.passed)

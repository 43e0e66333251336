"""When does a relay station save time over sending both particles from the
midpoint? Only when the Bell measurement is quicker than L/4v, and never
for photons once the outcome has to be broadcast."""
from catswap.timing import LinkModel, direct_time, hierarchical_time, relay_time, sweep_csv, timing_sweep

m = LinkModel(L=4.0, v=0.5, c=1.0, t_m=0.5)
print("direct:", direct_time(m), " relay:", relay_time(m))
print("with broadcast:", relay_time(m, include_classical=True))
print("levels 1..4:", [hierarchical_time(m, k) for k in range(1, 5)])

photon = LinkModel(L=4.0, v=1.0, c=1.0, t_m=0.0)
print("\nphotons, free measurement, broadcast counted:",
      relay_time(photon, include_classical=True).t2, "vs direct", direct_time(photon))

print()
print(sweep_csv(timing_sweep([4.0], [0.5], [0.0, 0.5, 1.0, 2.0], levels=[1, 2])), end="")

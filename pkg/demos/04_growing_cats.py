"""Growing a cat one particle at a time: an N-cat and a GHZ triple, one
particle of each Bell-measured, leave an (N+1)-cat behind."""
import numpy as np

from catswap.circuits import zeilinger_merge
from catswap.protocols import ghz_from_bell_pairs, grow_cat, grow_chain
from catswap.catalg import identify_cat
from catswap.qstate import CNOT, apply_gate, from_amplitudes

r = grow_cat(4)
for o in r.outcomes:
    print("Bell outcome", o["outcome"]["pattern"], o["outcome"]["sign"],
          "-> residual on", o["residual"]["qubits"])

chain = grow_chain(2, 10, np.random.default_rng(3))
print("\nchain:", " -> ".join(str(len(o["residual"]["qubits"])) for o in chain.outcomes),
      " passed:", chain.passed)

print("\nthree Bell pairs + GHZ measurement:", ghz_from_bell_pairs().passed)

# The gate route: CNOT between two Bell pairs, then read the target.
# Kets below list qubit 0 first.
amps = np.zeros(16)
for k in ("0000", "0011", "1100", "1111"):
    amps[int(k[::-1], 2)] = 1
state = from_amplitudes(amps)
print("after CNOT:", [format(i, "04b")[::-1] for i in np.flatnonzero(apply_gate(state, CNOT(1, 2)).amplitudes)])
for bit in (0, 1):
    _, res = zeilinger_merge(state, 1, 2, outcome=bit)
    print(f"target read {bit}: remaining three particles form", identify_cat(res, [0, 1, 2]).label)

"""Four users each share a Bell pair with a central exchange. The exchange
entangles any subset of them by measuring its own particles in a cat basis."""
from itertools import combinations

from catswap.protocols import exchange_entangle, four_user_topology

topo = four_user_topology()
for user in topo.users:
    print(user, "holds particle", topo.pairs[user].user_qubit,
          "paired with exchange particle", topo.pairs[user].exchange_qubit)

report = exchange_entangle(topo, ["A", "B", "C"])
print("\nA, B, C:", len(report.outcomes), "equally likely outcomes")
for o in report.outcomes[:3]:
    print("  exchange saw", o["outcome"]["pattern"], o["outcome"]["sign"],
          "-> users share", o["users_cat"], " D untouched:", o["untouched_fidelity"])

print()
for k in (2, 3, 4):
    for subset in combinations(topo.users, k):
        r = exchange_entangle(topo, subset)
        print("".join(subset).ljust(5), "outcomes:", len(r.outcomes), "all checks pass:", r.passed)

"""N senders share an (N+1)-cat with one receiver. One sender picks from four
operations, the others from two; one cat measurement reads all N+1 bits."""
from catswap.protocols import SuperdenseAssignment, information_rates, superdense_roundtrip, superdense_table

decoded, _ = superdense_roundtrip(3, "1011")
print("N=3, sent 1011, decoded", decoded)

a = SuperdenseAssignment.default(2)
print("operation sets:", a.operation_sets)
table = superdense_table(2, a)
for o in table.outcomes:
    print(" ", o["message"], "->", o["label"]["pattern"], o["label"]["sign"], "->", o["decoded"])

print("\n N   r1 (one cat)   r2 (Bell pairs)   particles")
for N in (1, 2, 4, 8):
    r = information_rates(N, t_h=2.0, t_c=1.0)
    print(f"{N:2d}   {r.r1:12.4f}   {r.r2:15.4f}   {r.particles_multiparty} vs {r.particles_pairwise}")

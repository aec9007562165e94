"""Walk through one Choquet fusion by hand.

Three matchers score the same person at 0.7, 0.8 and 0.9, with singleton
densities 0.35, 0.25 and 0.3.  The densities sum to 0.9 < 1, so the
solved lambda is positive and the measure rewards coalitions beyond the
sum of their parts.
"""

from choqfuse import LambdaMeasure, choquet_fuse

densities = (0.35, 0.25, 0.3)
measure = LambdaMeasure(densities)

print(f"densities      : {densities}")
print(f"density sum    : {sum(densities):.2f}  ->  lambda = {measure.lam:.6f}")
print()
print("subset measures (bitmask order):")
for mask in sorted(range(1, 2 ** measure.n), key=lambda m: (bin(m).count('1'), m)):
    members = "{" + ",".join(str(i + 1) for i in range(3) if mask >> i & 1) + "}"
    print(f"  m({members:7s}) = {measure.value_of(mask):.6f}")

scores = (0.7, 0.8, 0.9)
fused = choquet_fuse(scores, measure)
print()
print(f"scores {scores} fuse to {fused:.6f}")

# The same number, telescoped by hand: ascending scores keep shrinking the
# coalition of criteria still at or above the running level.
by_hand = (
    0.7 * measure.value_of([0, 1, 2])
    + (0.8 - 0.7) * measure.value_of([1, 2])
    + (0.9 - 0.8) * measure.value_of([2])
)
print(f"by hand         {by_hand:.6f}")
assert abs(fused - by_hand) < 1e-12

"""An [8,3,2] BPSK subcode where equal Hamming distances do not mean equal amplitudes.

Searches the 3-dimensional subcodes of RM(2,3) for the one whose optimal
measurement has row values 0.54, 0.382, 0.294, 0.263 at nbar = 0.01, then
shows that grouping entries by Gram value is too coarse while grouping by
pair orbits of the automorphism group works.
"""

from symdisc import cgu

an = cgu.find_fig1_subcode()
print("generators:", ["".join(map(str, r)) for r in an.code.generators])
print("codewords: ", ["".join(map(str, w)) for w in an.code.codewords])
print("distance matrix:\n", an.distance_matrix)
print("\nfirst row of <w_0|psi_j>:", an.solution.amplitudes[0].real.round(4))
print("matched values:", {k: round(v, 4) for k, v in an.matched["values"].items()})
print(f"distinct values per row {an.distinct_values_per_row[0]}, distinct distances {an.distinct_distances_per_row[0]}")
print("distance carrying two values:", an.split_distances)
print("automorphism group order", an.automorphism_order, "with", an.pattern.n_classes, "pair classes")
print("Gram-value pattern:", an.coarse_pattern_error)

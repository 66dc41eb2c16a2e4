"""Three coherent states {|0>, |-a>, |a>}: no transitive symmetry, but a swap.

The swap of |a> and |-a> leaves five distinct entries in the solution matrix,
so the optimality conditions become five equations in five unknowns.
"""

from symdisc import cgu, coherent, gu, symmetry, ykl

cb = coherent.ternary_codebook(0.5)
g = coherent.gram(cb)
G = symmetry.gram_automorphism_group(g)
pattern = cgu.SymmetryPattern.from_group(G)
print("automorphism group order", G.order)
print("variable pattern:\n", pattern.labels)

sol = cgu.symmetry_reduced_solve(g, pattern)
print("\nsolution amplitudes <w_i|psi_j>:\n", sol.amplitudes.real.round(6))
print(f"optimal P_e {sol.P_e:.8f}; square-root measurement P_e {gu.pgm(cb).P_e:.8f}")
print("verifier passes:", ykl.verify(cb, sol).passed)

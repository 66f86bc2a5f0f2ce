"""H^2 for a few unramified representations, then a twist matrix for a permutation."""
from ltx.cohomology import ExtensionShape, cohomology_profile
from ltx.galois_rep import UnramifiedRep, solve_twist_matrix
from ltx.errors import DegreeBudgetExceeded

for u, shape in [([[4]], ExtensionShape(1, 3, 1, 3)),
                 ([[2]], ExtensionShape(1, 3, 1, 3)),
                 ([[4, 1], [1, 2]], ExtensionShape(1, 2, 2, 3))]:
    cp = cohomology_profile(UnramifiedRep(3, u), shape)
    print(f"u={u} e={shape.e} d={shape.d}: omega={cp.omega} trivial={cp.coh_trivial} ({cp.reason})")

sol = solve_twist_matrix(UnramifiedRep(3, [[0, 1], [1, 0]]), seed=0)
print("twist for the swap: degree", sol.k_final, "residual valuation", sol.residual_valuation)

try:
    solve_twist_matrix(UnramifiedRep(3, [[2]]), seed=0)
except DegreeBudgetExceeded as err:
    # 2 has infinite order in Z_3^x, so no finite unramified ring suffices
    print("u = 2:", [h["k"] for h in err.history], "then budget exceeded")

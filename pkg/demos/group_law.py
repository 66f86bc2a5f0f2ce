"""Two-dimensional Lubin-Tate group law at p = 3 and its logarithm on points."""
import random

from ltx.lubin_tate import log_point, lt_group_law, point_add
from ltx.padic_core import make_ring

u = [[0, 1], [1, 1]]
fgl = lt_group_law(u, 9, 3, 20, log_cap=26)
print("certificate:", fgl.certificate["status"])
for chk in fgl.certificate["checks"]:
    print(f"  {chk['name']:<18} {chk['status']}")

R = make_ring(3, "unramified", 2)
rng = random.Random(0)
x = [R.random_element(rng, 20, 1) for _ in range(2)]
y = [R.random_element(rng, 20, 1) for _ in range(2)]
s = point_add(fgl, x, y)
lhs = log_point(fgl, s)
rhs = [a + b for a, b in zip(log_point(fgl, x), log_point(fgl, y))]
print("log(x + y) - log x - log y has valuation >=",
      min((a - b).val_bound() for a, b in zip(lhs, rhs)))

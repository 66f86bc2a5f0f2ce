"""Closed-form determinants for a weakly ramified configuration, audited against the big matrix."""
from ltx.epsilon_elements import big_matrix_det_audit, weak_config, weak_representative

cfg = weak_config(3, 1, 2, [[0, -1], [1, 0]], "I")
vec, rep = weak_representative(cfg)
print("case", cfg.case, "components:", len(vec.values), "closed forms ok:", rep.passed)
for key, v in sorted(vec.values.items()):
    print(f"  chi={key}: valuation {v.valuation()}")

audit = big_matrix_det_audit(cfg, fillings=5, seed=1)
print("assembled determinants match:", audit.passed, f"({len(audit.checks)} checks)")

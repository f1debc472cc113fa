"""Classify a few matching pairs, then solve an equation with the chosen inverse.

Run:  python demos/classify_and_solve.py
"""
import numpy as np

from winhopf import Grid, Symbol, classify, make_matching_pair, solve
from winhopf.io import named_rhs

z, e = Symbol.zeta, Symbol.exponential
r = Symbol.from_zpk([-2j], [-1j])

pairs = {
    "a = b = 1": (Symbol.constant(1.0), Symbol.constant(1.0)),
    "a = b = zeta^-1": (z(-1), z(-1)),
    "a = zeta r, b = zeta^-1 r": (z(1) * r, z(-1) * r),
    "a = e^{-2it}, b = e^{it}": (e(-2.0), e(1.0)),
    "a = e^{it}, b = e^{-2it}": (e(1.0), e(-2.0)),
}

print("verdicts from the subordinated indices")
for name, (a, b) in pairs.items():
    rep = classify(make_matching_pair(a, b))
    ix = rep.indices
    rules = ", ".join(rule for rule, _ in rep.fired_rules)
    print(f"  {name:28s} nu=({ix.nu1:+.0f},{ix.nu2:+.0f}) n=({ix.n1:+d},{ix.n2:+d}) "
          f"-> {rep.verdict:14s} dims={rep.predicted_dims}  [{rules}]")

# W(zeta^-1) + H(zeta^-1) is right-invertible with a one-dimensional kernel,
# so solutions are unique only up to a kernel element.  The report lists the
# component of x along the kernel basis.  A 1280-node grid keeps the dense
# oracle quick.
grid = Grid(40.0, 1280)
pair = make_matching_pair(z(-1), z(-1))
x, rep = solve(pair, named_rhs("gauss:3,1"), grid)
print("\nsolve (W(zeta^-1) + H(zeta^-1)) x = exp(-(t-3)^2)")
print(f"  inverse {rep.formula_id} ({rep.kind}), residual {rep.residual:.2e}, "
      f"oracle residual {rep.oracle_residual:.2e}")
print(f"  kernel dimension {rep.kernel_dim}, component of x along it "
      f"{np.round(rep.kernel_components, 4).tolist()}")

# an invertible rational pair: both paths agree
pair = make_matching_pair(Symbol.from_zpk([2j], [1j]), r)
x, rep = solve(pair, named_rhs("psi0"), grid)
print("\nsolve with an invertible pair and f = psi0")
print(f"  inverse {rep.formula_id}, residual {rep.residual:.2e}, "
      f"difference from dense solve {rep.oracle_difference:.2e}")

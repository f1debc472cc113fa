"""Right inverse of W(e^{-2it}) + H(e^{it}) built three ways.

The operator is a combination of shifts and flips, so its right inverse can
be assembled from the general recipe or written in closed form.  The
shortened closed form H(e^{2it}) W(e^{it}) + W(e^{2it}) drops a term that
only vanishes when nu2 <= 0; here nu2 = 1 and the dropped term matters.

Run:  python demos/exponential_example.py
"""
from winhopf import Grid, Symbol, TestVectorSet, make_matching_pair, residual
from winhopf import whh_operator, whh_right_inverse
from winhopf.acceptance import shortened_exponential_inverse
from winhopf.inverses import exponential_right_inverse
from winhopf.operators import compose, identity

nu1, nu2 = -2.0, 1.0
grid = Grid(40.0, 2560)
vecs = TestVectorSet(0, 20).vectors(grid)
pair = make_matching_pair(Symbol.exponential(nu1), Symbol.exponential(nu2))
A, I = whh_operator(pair, grid), identity(grid)

assembled = whh_right_inverse(pair, grid)
closed = exponential_right_inverse(nu1, nu2, grid)
short = shortened_exponential_inverse(nu1, nu2, grid)

print(f"pair a = e^(i{nu1:+g}t), b = e^(i{nu2:+g}t); inverse recipe {assembled.formula_id}")
for name, B in [("assembled", assembled.operator), ("closed form", closed), ("shortened", short)]:
    print(f"  {name:12s} |(W+H)B - I| = {residual(compose(A, B), I, vecs, grid):.2e}   "
          f"|B - assembled| = {residual(B, assembled.operator, vecs, grid):.2e}")

# the kernel is infinite dimensional: W(e^{-2it}) shifts left by 2 and
# H(e^{it}) only sees [0, 1], so anything supported in [1, 2] is annihilated
bump = grid.discretize(lambda t: ((t > 1.0) & (t < 2.0)) * (t - 1.0) * (2.0 - t) + 0j)
print(f"\n|(W+H) f| / |f| for f supported in [1, 2]: "
      f"{grid.norm(A.matmat(bump)) / grid.norm(bump):.2e}")

"""Predicted (dim ker, dim coker) against singular value counts.

For a = zeta^j, b = zeta^k the indices follow from the powers alone.  The
numerical count uses tall Laguerre sections of the operator and of its
adjoint, with a singular value gap check so that a borderline count raises
instead of guessing.

Run:  python demos/kernel_dimensions.py
"""
from winhopf import (LaguerreBasis, PreconditionError, Symbol, classify, kernel_of_whh,
                     make_matching_pair)
from winhopf.harness import numerical_dims

z = Symbol.zeta
lag = LaguerreBasis(120)

print(f"{'a':>9s} {'b':>9s}  {'verdict':13s} {'predicted':>10s} {'svd':>7s}  ker split (+,-)")
for j, k in [(0, 0), (-1, -1), (-2, -2), (-3, -1), (1, 1), (2, -2), (-1, 1)]:
    pair = make_matching_pair(z(j), z(k))
    rep = classify(pair)
    dims = numerical_dims(pair, modes=100)
    try:
        kb = kernel_of_whh(pair, lag)
        split = f"({kb.plus_dim},{kb.minus_dim})"
    except PreconditionError:  # the kernel formula needs W(c) right-invertible
        split = "n/a"
    print(f"{'zeta^' + str(j):>9s} {'zeta^' + str(k):>9s}  {rep.verdict:13s} "
          f"{str(rep.predicted_dims):>10s} {str((dims['ker'], dims['coker'])):>7s}  {split}")

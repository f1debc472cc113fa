"""Invertibility verdicts for ``W(a) + H(b)`` read off the subordinated indices.

Rules are evaluated in a fixed order: two-sided invertibility, sufficient
conditions for right and (through the adjoint pair) left invertibility,
necessary conditions, the block-operator generalized inverse, and finally
the undetermined case ``nu1 > 0 > nu2``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .discretization import Grid
from .errors import PreconditionError
from .inverses import generalized_case, phi_plus, projection_dims
from .operators import build_H, build_W, identity
from .symbols import MatchingPair, Symbol, inv, make_matching_pair, reflect
from .factorization import wiener_hopf_factor

VERDICTS = ("two_sided", "left_only", "right_only", "generalized", "not_one_sided", "undetermined")

VIOLATED_ANGLE = 1e-6
PLAUSIBLE_ANGLE = 1e-2


@dataclass(frozen=True)
class Indices:
    nu1: float
    n1: int
    nu2: float
    n2: int
    sigma: int

    def adjoint(self) -> "Indices":
        """Indices of the pair ``(conj a, conj b~)`` with subordinated pair ``(conj d, conj c)``."""
        return Indices(-self.nu2, -self.n2, -self.nu1, -self.n1, self.sigma)

    def to_json(self) -> dict:
        return {"nu1": self.nu1, "n1": self.n1, "nu2": self.nu2, "n2": self.n2, "sigma": self.sigma}


def pair_indices(pair: MatchingPair) -> Indices:
    return Indices(float(pair.nu1), int(pair.n1), float(pair.nu2), int(pair.n2), int(pair.sigma_c))


@dataclass
class ClassificationReport:
    verdict: str
    fired_rules: list
    predicted_dims: tuple
    indices: Indices
    generalized_inverse: str | None = None
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "fired_rules": [{"rule": r, "condition": c} for r, c in self.fired_rules],
            "predicted_dims": {"ker": self.predicted_dims[0], "coker": self.predicted_dims[1]},
            "indices": self.indices.to_json(),
            "generalized_inverse": self.generalized_inverse,
            "notes": list(self.notes),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


# rule tables


def right_sufficient(ix: Indices) -> list:
    """Sufficient conditions for right invertibility that hold for ``ix``."""
    nu1, n1, nu2, n2, s = ix.nu1, ix.n1, ix.nu2, ix.n2, ix.sigma
    rules = []
    if nu1 < 0 and nu2 < 0:
        rules.append(("Thm 4.1(i)", "nu1<0, nu2<0"))
    if nu1 < 0 and nu2 == 0 and (n2 < 1 or (n2 == 1 and s == -1)):
        rules.append(("Thm 4.1(iii)", "nu1<0, nu2=0, n2<1 or n2=1 and sigma(d)=-1"))
    if nu1 == 0 and n1 <= 0 and nu2 < 0:
        rules.append(("Thm 4.1(iv)", "nu1=0, n1<=0, nu2<0"))
    if nu1 == 0 and nu2 == 0 and n1 <= 0 and n2 < 1:
        rules.append(("Thm 4.1(v)(i)", "nu1=nu2=0, n1<=0, n2<1"))
    if nu1 == 0 and nu2 == 0 and n1 <= 0 and n2 == 1 and s == -1:
        rules.append(("Thm 4.1(v)(ii)", "nu1=nu2=0, n1<=0, n2=1, sigma(d)=-1"))
    return rules


def left_sufficient(ix: Indices) -> list:
    return [(f"{r} [adjoint]", c) for r, c in right_sufficient(ix.adjoint())]


def one_sided_violations(ix: Indices) -> list:
    """Necessary conditions for any one-sided invertibility that fail."""
    nu1, n1, nu2, n2, s = ix.nu1, ix.n1, ix.nu2, ix.n2, ix.sigma
    out = []
    if nu1 < 0 < nu2:
        out.append(("Thm 3.1(i)", "nu1<0 and nu2>0"))
    if nu1 == 0 and nu2 > 0 and (n1 < -1 or (n1 == -1 and s == 1)):
        out.append(("Thm 3.1(ii)", "nu1=0, nu2>0, and n1<-1 or n1=-1 with sigma(c)=1"))
    if nu1 < 0 and nu2 == 0 and (n2 > 1 or (n2 == 1 and s == 1)):
        out.append(("Thm 3.1(iii)", "nu1<0, nu2=0, and n2>1 or n2=1 with sigma(d)=1"))
    return out


def left_violations(ix: Indices) -> list:
    """Necessary conditions for left invertibility (``nu1 = nu2 = 0``) that fail."""
    if ix.nu1 != 0 or ix.nu2 != 0:
        return []
    n1, n2, s = ix.n1, ix.n2, ix.sigma
    if n2 >= n1:
        if n1 < -1 or (n1 == -1 and (s != -1 or not n2 > n1)):
            return [("Thm 3.4", "n2>=n1 requires n1>=-1, and n1=-1 only with sigma(c)=-1, n2>n1")]
        return []
    if n1 < 1 or not (n2 >= 0 or n1 >= -n2):
        return [("Thm 3.5", "n1>n2 requires n1>=1 and (n2>=0 or n1>=-n2)")]
    return []


def right_violations(ix: Indices) -> list:
    """Necessary conditions for right invertibility, the adjoint image of the left ones."""
    renamed = {"Thm 3.4": ("Thm 3.6", "n1<=n2 requires n2<=1, and n2=1 only with sigma(d)=-1, n1<n2"),
               "Thm 3.5": ("Thm 3.7", "n1>n2 requires n2<=-1 and (n1<=0 or n1<=-n2)")}
    return [renamed[r] for r, _ in left_violations(ix.adjoint())]


# predicted dimensions


def _kernel_dim(ix: Indices):
    """``dim ker`` from the kernel formula; ``"unknown"`` when ``W(c)`` is not right-invertible."""
    c_right = ix.nu1 < 0 or (ix.nu1 == 0 and ix.n1 <= 0)
    if not c_right:
        return "unknown"
    if ix.nu1 < 0 or ix.nu2 < 0:
        return "infinite"
    plus = projection_dims(ix.n2, ix.sigma)[0] if ix.nu2 == 0 else 0
    minus = projection_dims(ix.n1, ix.sigma)[1]
    return plus + minus


def predicted_dims(ix: Indices, verdict: str | None = None) -> tuple:
    ker = _kernel_dim(ix)
    coker = _kernel_dim(ix.adjoint())
    if verdict in ("two_sided", "left_only"):
        ker = 0
    if verdict in ("two_sided", "right_only"):
        coker = 0
    return ker, coker


def classify_indices(ix: Indices, gen_case: str | None = None) -> ClassificationReport:
    """Verdict from indices alone; ``gen_case`` is the block-operator case if any."""
    notes = []
    if ix.nu1 == 0 and ix.nu2 == 0 and ix.n1 == 0 and ix.n2 == 0:
        rules = [("Cor 6.1", "W(c) and W(d) invertible: nu1=nu2=0, n1=n2=0")]
        return ClassificationReport("two_sided", rules, (0, 0), ix, gen_case)
    right = right_sufficient(ix)
    left = left_sufficient(ix)
    if right and left:
        notes.append("left and right inverses both exist, so the operator is invertible")
        return ClassificationReport("two_sided", right + left, (0, 0), ix, gen_case, notes)
    if right:
        return ClassificationReport("right_only", right, predicted_dims(ix, "right_only"), ix,
                                   gen_case)
    if left:
        return ClassificationReport("left_only", left, predicted_dims(ix, "left_only"), ix,
                                   gen_case)
    hard = one_sided_violations(ix)
    lv, rv = left_violations(ix), right_violations(ix)
    if hard or (lv and rv):
        return ClassificationReport("not_one_sided", hard + lv + rv, predicted_dims(ix), ix,
                                   gen_case)
    if gen_case is not None:
        return ClassificationReport("generalized", [("Lemma 5.2", gen_case)], predicted_dims(ix),
                                   ix, gen_case)
    if ix.nu1 > 0 and ix.nu2 < 0:
        rules = [("Thm 3.2", "nu1>0, nu2<0: decided by the subspace condition; "
                             "see check_thm32_heuristic")]
        notes.append("a 'plausible' heuristic outcome is a necessary condition only")
        return ClassificationReport("undetermined", rules, predicted_dims(ix), ix, gen_case, notes)
    rules = [("none", "no sufficient or necessary condition applies")]
    return ClassificationReport("undetermined", rules, predicted_dims(ix), ix, gen_case)


def classify(pair: MatchingPair) -> ClassificationReport:
    """Cited invertibility verdict with predicted ``(dim ker, dim coker)``."""
    try:
        gen_case = generalized_case(pair)
    except PreconditionError:
        gen_case = None
    return classify_indices(pair_indices(pair), gen_case)


# subspace heuristic


def angle_verdict(angle: float) -> str:
    """Map the smallest principal angle to ``violated``/``plausible``/``inconclusive``."""
    if angle <= VIOLATED_ANGLE:
        return "violated"
    if angle >= PLAUSIBLE_ANGLE:
        return "plausible"
    return "inconclusive"


def smallest_angle_to_vanishing(vectors: np.ndarray, weights: np.ndarray, window: np.ndarray) -> float:
    """Smallest principal angle between ``span(vectors)`` and functions vanishing on ``window``.

    ``window`` is a boolean mask of grid nodes; angles are measured in the
    weighted inner product.  Returns ``pi/2`` for an empty span.
    """
    if vectors.size == 0 or vectors.shape[1] == 0:
        return np.pi / 2
    M = np.sqrt(weights)[:, None] * vectors
    u, s, _ = np.linalg.svd(M, full_matrices=False)
    rank = int(np.sum(s > 1e-10 * s[0])) if s.size and s[0] > 0 else 0
    if rank == 0:
        return np.pi / 2
    Q = u[:, :rank]
    inside = Q[window]
    if inside.shape[0] < rank:
        return 0.0
    smin = np.linalg.svd(inside, compute_uv=False)[-1]
    return float(np.arcsin(min(1.0, smin)))


def check_thm32_heuristic(pair: MatchingPair, disc: Grid) -> dict:
    """Estimate whether ``phi+(P+_d)`` meets the functions vanishing on ``(0, nu1/2)``.

    Requires ``nu1 > 0 > nu2`` and ``n1 = n2 = 0`` on the grid backend.  The
    kernel of ``W(d)`` is sampled by ``W(d_+^-1)`` applied to grid functions
    supported in ``[0, -nu2]``.
    """
    ix = pair_indices(pair)
    if not (ix.nu1 > 0 > ix.nu2 and ix.n1 == 0 and ix.n2 == 0):
        raise PreconditionError("heuristic needs nu1>0, nu2<0, n1=n2=0")
    if not isinstance(disc, Grid):
        raise PreconditionError("heuristic runs on the grid backend")
    half = ix.nu1 / 2
    disc.shift_steps(half)
    disc.shift_steps(ix.nu2)
    shifted = make_matching_pair(pair.a * Symbol.exponential(-half), pair.b * Symbol.exponential(half))
    fd = wiener_hopf_factor(pair.d)
    t = disc.nodes
    support = np.flatnonzero(t < -ix.nu2)
    E = np.zeros((disc.size, support.size), complex)
    E[support, np.arange(support.size)] = 1.0
    ker_d = build_W(inv(fd.g_plus), disc).matmat(E)
    proj = 0.5 * (identity(disc) + build_H(reflect(pair.d), disc))
    vectors = phi_plus(shifted, disc).matmat(proj.matmat(ker_d))
    angle = smallest_angle_to_vanishing(vectors, disc.weights, t < half)
    return {"verdict": angle_verdict(angle), "angle": angle, "window": half,
            "samples": int(support.size)}

"""Finite realizations of ``W(g)``, ``H(g)``, ``U_nu``, ``V^(m)`` and compositions.

Two backends:

* ``Grid`` -- Nystrom discretization on composite Gauss-Legendre panels.
  Convolution kernels give block-Toeplitz matrices (block-Hankel for the
  Hankel part) applied through FFTs; shifts and reflections are index maps.
* ``LaguerreBasis`` -- Galerkin matrices in the Laguerre functions.  With
  ``V psi_j = psi_{j+1}`` a rational symbol becomes the Toeplitz matrix
  ``T[k, j] = g_{k-j}`` and the Hankel matrix ``H[k, j] = -g_{j+k+1}`` of
  the Fourier coefficients of ``g(i (1 + z) / (1 - z))`` on ``|z| = 1``.

Operators are lazy; ``to_dense`` materializes (and caches) the matrix.
"""
from __future__ import annotations

import numpy as np
import scipy.fft
import scipy.linalg

from .discretization import Grid, LaguerreBasis, gauss_legendre_unit
from .errors import BackendMismatchError, BackendUnsupportedError
from .symbols import Symbol, reflect, split_at_infinity

_CHUNK = 256


class DiscreteOperator:
    """Linear map on the coefficient vectors of one discretization."""

    def __init__(self, backend: str, size: int, recipe: str = ""):
        self.backend = backend
        self.size = size
        self.recipe = recipe
        self._dense = None

    # subclasses implement these on 2-D arrays
    def _matmat(self, X):
        raise NotImplementedError

    def _rmatmat(self, X):
        raise NotImplementedError

    def matmat(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=complex)
        if X.shape[0] != self.size:
            raise BackendMismatchError(f"vector of length {X.shape[0]} for operator of size {self.size}")
        if X.ndim == 1:
            return self._matmat(X[:, None])[:, 0]
        if self._dense is not None:
            return self._dense @ X
        if X.shape[1] <= _CHUNK:
            return self._matmat(X)
        return np.hstack([self._matmat(X[:, i:i + _CHUNK]) for i in range(0, X.shape[1], _CHUNK)])

    apply = matmat

    def rmatmat(self, X) -> np.ndarray:
        """Apply the conjugate transpose of the matrix."""
        X = np.asarray(X, dtype=complex)
        if X.ndim == 1:
            return self._rmatmat(X[:, None])[:, 0]
        if self._dense is not None:
            return self._dense.conj().T @ X
        return np.hstack([self._rmatmat(X[:, i:i + _CHUNK]) for i in range(0, X.shape[1], _CHUNK)])

    def to_dense(self) -> np.ndarray:
        if self._dense is None:
            self._dense = self.matmat(np.eye(self.size, dtype=complex))
        return self._dense

    @property
    def matrix(self) -> np.ndarray:
        return self.to_dense()

    def _check(self, other: "DiscreteOperator"):
        if other.backend != self.backend or other.size != self.size:
            raise BackendMismatchError(
                f"{self.backend}[{self.size}] vs {other.backend}[{other.size}]")

    def __matmul__(self, other):
        if isinstance(other, DiscreteOperator):
            return compose(self, other)
        return self.matmat(other)

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(-1.0, other))

    def __neg__(self):
        return scale(-1.0, self)

    def __mul__(self, c):
        return scale(c, self)

    __rmul__ = __mul__

    def conj_transpose(self) -> "DiscreteOperator":
        return _ConjTranspose(self)

    def __repr__(self):
        return f"<{type(self).__name__} {self.backend}[{self.size}] {self.recipe}>"


class DenseOperator(DiscreteOperator):
    def __init__(self, backend, matrix, recipe=""):
        matrix = np.asarray(matrix, dtype=complex)
        super().__init__(backend, matrix.shape[0], recipe)
        if not np.all(np.isfinite(matrix)):
            raise ValueError("non-finite operator entries")
        self._dense = matrix

    def _matmat(self, X):
        return self._dense @ X

    def _rmatmat(self, X):
        return self._dense.conj().T @ X


class _Identity(DiscreteOperator):
    def _matmat(self, X):
        return X.copy()

    _rmatmat = _matmat


class _Zero(DiscreteOperator):
    def _matmat(self, X):
        return np.zeros_like(X)

    _rmatmat = _matmat


class _IndexMap(DiscreteOperator):
    """``y[i] = x[src[i]]`` with ``src[i] < 0`` meaning zero."""

    def __init__(self, backend, src, recipe=""):
        super().__init__(backend, len(src), recipe)
        self.src = np.asarray(src, dtype=int)
        self._valid = self.src >= 0

    def _matmat(self, X):
        out = np.zeros_like(X)
        out[self._valid] = X[self.src[self._valid]]
        return out

    def _rmatmat(self, X):
        out = np.zeros_like(X)
        np.add.at(out, self.src[self._valid], X[self._valid])
        return out


class _BlockConvolution(DiscreteOperator):
    """``y_p = sum_q B[p - q + P - 1] x_q`` (``hankel``: ``C[p + q] x_q``) over panel blocks."""

    def __init__(self, backend, blocks, hankel=False, recipe=""):
        count, b, _ = blocks.shape
        panels = (count + 1) // 2
        super().__init__(backend, panels * b, recipe)
        self.blocks = blocks
        self.hankel = hankel
        self.panels = panels
        self.b = b
        self._len = scipy.fft.next_fast_len(count + panels - 1)
        self._spec = scipy.fft.fft(blocks, n=self._len, axis=0)

    def _matmat(self, X):
        P, b = self.panels, self.b
        x = X.reshape(P, b, -1)
        if self.hankel:
            x = x[::-1]
        xs = scipy.fft.fft(x, n=self._len, axis=0)
        z = scipy.fft.ifft(np.einsum("lij,ljk->lik", self._spec, xs), axis=0)
        return z[P - 1:2 * P - 1].reshape(P * b, -1)

    def _rmatmat(self, X):
        if self.hankel:
            blocks = np.conj(np.transpose(self.blocks, (0, 2, 1)))
        else:
            blocks = np.conj(np.transpose(self.blocks[::-1], (0, 2, 1)))
        return _BlockConvolution(self.backend, blocks, self.hankel)._matmat(X)


class _Sum(DiscreteOperator):
    def __init__(self, terms):
        super().__init__(terms[0].backend, terms[0].size, " + ".join(t.recipe for t in terms))
        self.terms = terms

    def _matmat(self, X):
        out = self.terms[0]._matmat(X)
        for t in self.terms[1:]:
            out = out + t._matmat(X)
        return out

    def _rmatmat(self, X):
        out = self.terms[0]._rmatmat(X)
        for t in self.terms[1:]:
            out = out + t._rmatmat(X)
        return out


class _Product(DiscreteOperator):
    def __init__(self, factors):
        super().__init__(factors[0].backend, factors[0].size,
                         " ".join(f"({f.recipe})" for f in factors))
        self.factors = factors

    def _matmat(self, X):
        for f in reversed(self.factors):
            X = f.matmat(X) if f._dense is not None else f._matmat(X)
        return X

    def _rmatmat(self, X):
        for f in self.factors:
            X = f._rmatmat(X)
        return X


class _Scaled(DiscreteOperator):
    def __init__(self, c, op):
        super().__init__(op.backend, op.size, f"{c}*({op.recipe})")
        self.c = complex(c)
        self.op = op

    def _matmat(self, X):
        return self.c * self.op._matmat(X)

    def _rmatmat(self, X):
        return np.conj(self.c) * self.op._rmatmat(X)


class _ConjTranspose(DiscreteOperator):
    def __init__(self, op):
        super().__init__(op.backend, op.size, f"({op.recipe})^H")
        self.op = op

    def _matmat(self, X):
        return self.op._rmatmat(X)

    def _rmatmat(self, X):
        return self.op._matmat(X)


class _Solve(DiscreteOperator):
    """Inverse of an operator through a dense LU factorization."""

    def __init__(self, op):
        super().__init__(op.backend, op.size, f"({op.recipe})^-1")
        self.op = op
        self.lu = scipy.linalg.lu_factor(op.to_dense())

    def _matmat(self, X):
        return scipy.linalg.lu_solve(self.lu, X)

    def _rmatmat(self, X):
        return scipy.linalg.lu_solve(self.lu, X, trans=2)


# ---------------------------------------------------------------------------
# algebra


def identity(disc, recipe="I") -> DiscreteOperator:
    return _Identity(disc.backend, disc.size, recipe)


def zero(disc, recipe="0") -> DiscreteOperator:
    return _Zero(disc.backend, disc.size, recipe)


def compose(*ops: DiscreteOperator) -> DiscreteOperator:
    """Product ``ops[0] @ ops[1] @ ...`` (rightmost acts first)."""
    flat = []
    for op in ops:
        ops[0]._check(op)
        if isinstance(op, _Zero):
            return _Zero(op.backend, op.size, "0")
        if isinstance(op, _Identity):
            continue
        flat.extend(op.factors if isinstance(op, _Product) else [op])
    if not flat:
        return ops[0] if isinstance(ops[0], _Identity) else identity_like(ops[0])
    return flat[0] if len(flat) == 1 else _Product(flat)


def identity_like(op: DiscreteOperator) -> DiscreteOperator:
    return _Identity(op.backend, op.size, "I")


def add(*ops: DiscreteOperator) -> DiscreteOperator:
    terms = []
    for op in ops:
        ops[0]._check(op)
        if isinstance(op, _Zero):
            continue
        terms.extend(op.terms if isinstance(op, _Sum) else [op])
    if not terms:
        return _Zero(ops[0].backend, ops[0].size, "0")
    return terms[0] if len(terms) == 1 else _Sum(terms)


def scale(c, op: DiscreteOperator) -> DiscreteOperator:
    if c == 1:
        return op
    if c == 0 or isinstance(op, _Zero):
        return _Zero(op.backend, op.size, "0")
    return _Scaled(c, op)


def apply(op: DiscreteOperator, v) -> np.ndarray:
    return op.matmat(v)


def solve_operator(op: DiscreteOperator) -> DiscreteOperator:
    """Dense inverse of ``op`` (LU); the result is lazy in its applications."""
    return _Solve(op)


def adjoint(op: DiscreteOperator, disc) -> DiscreteOperator:
    """Hilbert-space adjoint with respect to the discretization's inner product."""
    if isinstance(disc, Grid):
        w = disc.weights
        return DenseOperator(op.backend, (op.to_dense().conj().T * w[None, :]) / w[:, None],
                             f"({op.recipe})*")
    return _ConjTranspose(op)


# ---------------------------------------------------------------------------
# grid builders


def _lagrange_matrix(nodes, points):
    """Values at ``points`` of the Lagrange basis on ``nodes`` (all in [0, 1])."""
    V = np.polynomial.legendre.legvander(2 * nodes - 1, len(nodes) - 1)
    Vp = np.polynomial.legendre.legvander(2 * points - 1, len(nodes) - 1)
    return np.linalg.solve(V.T, Vp.T).T


def _local_blocks(grid: Grid, kernel, sub_order: int = 24):
    """Same-panel block with the jump of ``kernel`` at 0 integrated exactly."""
    u, _ = grid.reference
    h = grid.h
    v, w = gauss_legendre_unit(sub_order)
    block = np.zeros((grid.order, grid.order), dtype=complex)
    for i, ui in enumerate(u):
        pts = np.concatenate([ui * v, ui + (1 - ui) * v])
        wts = np.concatenate([ui * w, (1 - ui) * w])
        L = _lagrange_matrix(u, pts)
        kv = kernel(h * (ui - pts))
        block[i] = h * (wts * kv) @ L
    return block


def convolution_operator(grid: Grid, kernel, recipe="") -> DiscreteOperator:
    """``(K phi)(t) = int_0^T kernel(t - s) phi(s) ds``; ``kernel`` may jump at 0."""
    u, w = grid.reference
    P, h = grid.panels, grid.h
    m = np.arange(-(P - 1), P)
    x = (m[:, None, None] + u[None, :, None] - u[None, None, :]) * h
    x[P - 1] = 1.0  # placeholder, replaced below
    blocks = (kernel(x) * (w * h)[None, None, :]).astype(complex)
    blocks[P - 1] = _local_blocks(grid, kernel)
    return _BlockConvolution(grid.backend, blocks, hankel=False, recipe=recipe)


def hankel_integral_operator(grid: Grid, kernel, recipe="") -> DiscreteOperator:
    """``(K phi)(t) = int_0^T kernel(t + s) phi(s) ds``."""
    u, w = grid.reference
    P, h = grid.panels, grid.h
    m = np.arange(0, 2 * P - 1)
    x = (m[:, None, None] + u[None, :, None] + u[None, None, :]) * h
    blocks = kernel(x) * (w * h)[None, None, :]
    return _BlockConvolution(grid.backend, blocks.astype(complex), hankel=True, recipe=recipe)


def _grid_shift(grid: Grid, nu: float) -> DiscreteOperator:
    k = grid.shift_steps(nu) * grid.order
    i = np.arange(grid.N)
    src = i - k
    src[(src < 0) | (src >= grid.N)] = -1
    return _IndexMap(grid.backend, src, f"U[{nu:g}]")


def _grid_flip(grid: Grid, delta: float) -> DiscreteOperator:
    if delta <= 0:
        return zero(grid, f"H(e^{{i{delta:g}t}})=0")
    k = grid.shift_steps(delta) * grid.order
    i = np.arange(grid.N)
    src = k - 1 - i
    src[(i >= k) | (src >= grid.N)] = -1
    return _IndexMap(grid.backend, src, f"H(e^{{i{delta:g}t}})")


# ---------------------------------------------------------------------------
# laguerre builders


def transplant_coefficients(g: Symbol, count: int, samples: int | None = None):
    """Fourier coefficients of ``theta -> g(i (1 + e^{i theta}) / (1 - e^{i theta}))``.

    Returns ``(coef, tail)`` where ``coef[m]`` holds index ``m`` modulo the
    sample count, and ``tail`` is the largest coefficient magnitude in the
    middle of the spectrum (an aliasing estimate).
    """
    if not g.is_rational:
        raise BackendUnsupportedError("laguerre backend accepts rational symbols only (delta = 0)")
    L = samples or 8 * count
    theta = 2 * np.pi * np.arange(1, L) / L
    z = np.exp(1j * theta)
    xi = 1j * (1 + z) / (1 - z)
    vals = np.empty(L, dtype=complex)
    vals[0] = g.rat.at_infinity()
    vals[1:] = g.rat(xi.real)
    coef = np.fft.fft(vals) / L
    mid = np.abs(coef[L // 4: 3 * L // 4])
    return coef, float(mid.max()) if mid.size else 0.0


def _laguerre_toeplitz(g: Symbol, basis: LaguerreBasis) -> DenseOperator:
    M = basis.N
    coef, tail = transplant_coefficients(g, M)
    col = coef[np.arange(M)]
    row = coef[-np.arange(M) % len(coef)]
    return DenseOperator(basis.backend, scipy.linalg.toeplitz(col, row),
                         f"W[laguerre] tail={tail:.1e}")


def _laguerre_hankel(g: Symbol, basis: LaguerreBasis) -> DenseOperator:
    M = basis.N
    coef, tail = transplant_coefficients(g, M)
    c = -coef[np.arange(1, M + 1)]
    r = -coef[np.arange(M, 2 * M)]
    return DenseOperator(basis.backend, scipy.linalg.hankel(c, r), f"H[laguerre] tail={tail:.1e}")


# ---------------------------------------------------------------------------
# public builders


def _symbol_label(g: Symbol) -> str:
    return f"delta={g.delta:g},z={len(g.zeros)},p={len(g.poles)}"


def _rational_W(g: Symbol, grid: Grid) -> DiscreteOperator:
    const, kernel = split_at_infinity(Symbol(0.0, g.rat))
    terms = []
    if const != 0:
        terms.append(scale(const, identity(grid)))
    if not kernel.is_zero:
        terms.append(convolution_operator(grid, kernel, "conv"))
    if not terms:
        return zero(grid)
    return add(*terms)


def _rational_H(g: Symbol, grid: Grid) -> DiscreteOperator:
    _, kernel = split_at_infinity(Symbol(0.0, g.rat))
    kernel = kernel.positive_part()
    if kernel.is_zero:
        return zero(grid, "H=0")
    return hankel_integral_operator(grid, kernel, "hank")


def build_W(g: Symbol, disc) -> DiscreteOperator:
    """Wiener-Hopf operator ``W(g)``."""
    if isinstance(disc, LaguerreBasis):
        op = _laguerre_toeplitz(g, disc)
    else:
        W = _rational_W(g, disc)
        if g.delta == 0:
            op = W
        elif g.delta < 0:
            op = compose(_grid_shift(disc, g.delta), W)
        else:
            op = compose(W, _grid_shift(disc, g.delta))
    op.recipe = f"W({_symbol_label(g)}) {op.recipe}"
    return op


def build_H(g: Symbol, disc) -> DiscreteOperator:
    """Hankel operator ``H(g)``."""
    if isinstance(disc, LaguerreBasis):
        op = _laguerre_hankel(g, disc)
    else:
        Hr = _rational_H(g, disc)
        if g.delta == 0:
            op = Hr
        else:
            # H(e r) = W(e) H(r) + H(e) W(r~)
            shifted = compose(_grid_shift(disc, g.delta), Hr)
            if g.delta > 0:
                flip_part = compose(_grid_flip(disc, g.delta), _rational_W(reflect(Symbol(0.0, g.rat)), disc))
                op = add(shifted, flip_part)
            else:
                op = shifted
    op.recipe = f"H({_symbol_label(g)}) {op.recipe}"
    return op


def op_U(nu: float, disc) -> DiscreteOperator:
    """Shift ``(U_nu phi)(t) = phi(t - nu)`` with zero fill, i.e. ``W(e^{i nu t})``."""
    if isinstance(disc, LaguerreBasis):
        return DenseOperator(disc.backend, disc.shift_matrix(nu), f"U[{nu:g}]")
    if nu == 0:
        return identity(disc, "U[0]")
    return _grid_shift(disc, nu)


def _v_kernel(x):
    x = np.asarray(x, dtype=float)
    return np.where(x > 0, -2.0 * np.exp(-np.abs(x)), 0.0)


def _v_inverse_kernel(x):
    x = np.asarray(x, dtype=float)
    return np.where(x < 0, -2.0 * np.exp(-np.abs(x)), 0.0)


def op_V(m: int, disc) -> DiscreteOperator:
    """``V^(m)``: ``V^m`` for ``m >= 0`` and ``(V^(-1))^|m|`` otherwise.

    ``V phi = phi - 2 int_0^t e^{s-t} phi(s) ds`` and
    ``V^(-1) phi = phi - 2 int_t^inf e^{t-s} phi(s) ds``.
    """
    if m == 0:
        return identity(disc, "V^0")
    if isinstance(disc, LaguerreBasis):
        S = np.eye(disc.N, k=-1, dtype=complex)
        base = DenseOperator(disc.backend, S if m > 0 else S.T, "V" if m > 0 else "V^(-1)")
    else:
        kern = _v_kernel if m > 0 else _v_inverse_kernel
        base = add(identity(disc), convolution_operator(disc, kern))
        base.recipe = "V" if m > 0 else "V^(-1)"
    if abs(m) == 1:
        return base
    out = compose(*([base] * abs(m)))
    out.recipe = f"V^({m})"
    return out


def op_P(m: int, disc) -> DiscreteOperator:
    """``P_m = I - V^(m) V^(-m)`` for ``m > 0``."""
    out = identity(disc) - compose(op_V(m, disc), op_V(-m, disc))
    out.recipe = f"P_{m}"
    return out


def op_flipped_hankel(g: Symbol, disc) -> DiscreteOperator:
    """``J Q W0(g) P`` restricted to the half-line, which equals ``H(g~)``."""
    op = build_H(reflect(g), disc)
    op.recipe = f"JQW0P via H(g~): {op.recipe}"
    return op

"""Dense complex linear algebra.

LU factorization with partial pivoting, determinants, linear solves and the
eigenvalues of general complex matrices (balancing, Householder reduction to
Hessenberg form, implicitly shifted QR with Wilkinson shifts).

Matrices are plain two-dimensional ``complex128`` numpy arrays.  The inner
loops are compiled with numba; the public functions validate their inputs and
never modify them.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

__all__ = [
    "LinAlgError",
    "NotSquareError",
    "NearSingular",
    "EigenFailure",
    "LUFactorization",
    "Spectrum",
    "as_matrix",
    "lu_decompose",
    "det",
    "det_batch",
    "solve",
    "eigenvalues",
    "SINGULAR_RTOL",
]

#: ``solve`` refuses a matrix whose smallest pivot is below this fraction of
#: the largest one.
SINGULAR_RTOL = 1e-12

_EPS = np.finfo(np.float64).eps


class LinAlgError(ArithmeticError):
    """Base class for numerical failures in this module."""


class NotSquareError(ValueError):
    pass


class NearSingular(LinAlgError):
    """Raised by :func:`solve` when the pivot ratio drops below ``SINGULAR_RTOL``."""

    def __init__(self, pivot: float, max_pivot: float):
        self.pivot = pivot
        self.max_pivot = max_pivot
        super().__init__(f"near-singular matrix: smallest pivot {pivot:.3e}, largest {max_pivot:.3e}")


class EigenFailure(LinAlgError):
    """QR iteration did not converge within the iteration cap."""

    def __init__(self, iterations: int):
        self.iterations = iterations
        super().__init__(f"QR iteration failed to converge after {iterations} iterations")


@dataclass(frozen=True)
class LUFactorization:
    """``P @ m == L @ U`` with ``L`` unit lower triangular, packed into ``lu``.

    ``pivot[i]`` is the row of ``m`` that ends up in row ``i``.  ``singular`` is
    set when an exactly zero pivot was met (the factorization is still valid).
    """

    lu: np.ndarray
    pivot: np.ndarray
    sign: int
    singular: bool

    @property
    def L(self) -> np.ndarray:
        return np.tril(self.lu, -1) + np.eye(self.lu.shape[0])

    @property
    def U(self) -> np.ndarray:
        return np.triu(self.lu)

    @property
    def P(self) -> np.ndarray:
        n = self.lu.shape[0]
        p = np.zeros((n, n))
        p[np.arange(n), self.pivot] = 1.0
        return p

    def pivot_magnitudes(self) -> np.ndarray:
        return np.abs(np.diag(self.lu))


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    residual_bound: float
    iterations: int = 0


def as_matrix(m, square: bool = True) -> np.ndarray:
    """Validate ``m`` and return it as a 2-D complex128 array (copy not guaranteed)."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim == 1 and not square:
        a = a.reshape(-1, 1)
    if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise NotSquareError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


# --------------------------------------------------------------------------
# compiled kernels


@numba.njit(cache=True)
def _lu_inplace(a):
    n = a.shape[0]
    piv = np.arange(n)
    sign = 1
    zero_pivot = False
    for k in range(n):
        p = k
        best = abs(a[k, k])
        for i in range(k + 1, n):
            v = abs(a[i, k])
            if v > best:
                best = v
                p = i
        if p != k:
            for j in range(n):
                t = a[k, j]
                a[k, j] = a[p, j]
                a[p, j] = t
            t2 = piv[k]
            piv[k] = piv[p]
            piv[p] = t2
            sign = -sign
        pk = a[k, k]
        if pk == 0:
            zero_pivot = True
            continue
        for i in range(k + 1, n):
            f = a[i, k] / pk
            a[i, k] = f
            if f != 0:
                for j in range(k + 1, n):
                    a[i, j] -= f * a[k, j]
    return piv, sign, zero_pivot


@numba.njit(cache=True)
def _lu_solve(lu, piv, b):
    n = lu.shape[0]
    m = b.shape[1]
    x = np.empty((n, m), dtype=np.complex128)
    for i in range(n):
        for j in range(m):
            x[i, j] = b[piv[i], j]
    for j in range(m):
        for i in range(n):
            s = x[i, j]
            for k in range(i):
                s -= lu[i, k] * x[k, j]
            x[i, j] = s
        for i in range(n - 1, -1, -1):
            s = x[i, j]
            for k in range(i + 1, n):
                s -= lu[i, k] * x[k, j]
            x[i, j] = s / lu[i, i]
    return x


@numba.njit(cache=True)
def _det_batch(stack):
    count = stack.shape[0]
    out = np.empty(count, dtype=np.complex128)
    for t in range(count):
        a = stack[t].copy()
        _, sign, _ = _lu_inplace(a)
        d = complex(sign)
        for i in range(a.shape[0]):
            d *= a[i, i]
        out[t] = d
    return out


@numba.njit(cache=True)
def _balance(a):
    # Parlett-Reinsch scaling by powers of two; returns the diagonal scaling D
    # with a <- D^-1 a D.
    n = a.shape[0]
    scale = np.ones(n)
    radix = 2.0
    converged = False
    while not converged:
        converged = True
        for i in range(n):
            c = 0.0
            r = 0.0
            for j in range(n):
                if j != i:
                    c += abs(a[j, i].real) + abs(a[j, i].imag)
                    r += abs(a[i, j].real) + abs(a[i, j].imag)
            if c == 0.0 or r == 0.0:
                continue
            g = r / radix
            f = 1.0
            s = c + r
            while c < g:
                f *= radix
                c *= radix * radix
            g = r * radix
            while c > g:
                f /= radix
                c /= radix * radix
            if (c + r) / f < 0.95 * s:
                converged = False
                scale[i] *= f
                for j in range(n):
                    a[i, j] /= f
                for j in range(n):
                    a[j, i] *= f
    return scale


@numba.njit(cache=True)
def _hessenberg(a):
    n = a.shape[0]
    for k in range(n - 2):
        m = n - k - 1
        v = np.empty(m, dtype=np.complex128)
        nrm2 = 0.0
        for i in range(m):
            v[i] = a[k + 1 + i, k]
            nrm2 += v[i].real * v[i].real + v[i].imag * v[i].imag
        tail = nrm2 - (v[0].real * v[0].real + v[0].imag * v[0].imag)
        if tail == 0.0:
            continue
        nrm = np.sqrt(nrm2)
        x0 = v[0]
        ax0 = abs(x0)
        phase = x0 / ax0 if ax0 != 0.0 else 1.0 + 0.0j
        alpha = -phase * nrm
        v[0] = x0 - alpha
        vn2 = 0.0
        for i in range(m):
            vn2 += v[i].real * v[i].real + v[i].imag * v[i].imag
        vn = np.sqrt(vn2)
        for i in range(m):
            v[i] /= vn
        # a[k+1:, :] -= 2 v (v^H a[k+1:, :])
        for j in range(k, n):
            s = 0.0 + 0.0j
            for i in range(m):
                s += np.conj(v[i]) * a[k + 1 + i, j]
            s *= 2.0
            for i in range(m):
                a[k + 1 + i, j] -= v[i] * s
        # a[:, k+1:] -= 2 (a[:, k+1:] v) v^H
        for i in range(n):
            s = 0.0 + 0.0j
            for j in range(m):
                s += a[i, k + 1 + j] * v[j]
            s *= 2.0
            for j in range(m):
                a[i, k + 1 + j] -= s * np.conj(v[j])
        a[k + 1, k] = alpha
        for i in range(k + 2, n):
            a[i, k] = 0.0
    return a


@numba.njit(cache=True)
def _hessenberg_qr_eigvals(h, maxit):
    # Returns (eigenvalues, ok, total_iterations, sum of neglected subdiagonals).
    n = h.shape[0]
    w = np.empty(n, dtype=np.complex128)
    hi = n - 1
    its = 0
    total = 0
    neglected = 0.0
    while hi >= 0:
        if hi == 0:
            w[0] = h[0, 0]
            break
        # look for a negligible subdiagonal entry
        lo = hi
        while lo > 0:
            s = abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])
            if s == 0.0:
                s = 0.0
                for i in range(hi + 1):
                    for j in range(hi + 1):
                        s = max(s, abs(h[i, j]))
            if abs(h[lo, lo - 1]) <= _EPS * s:
                neglected += abs(h[lo, lo - 1])
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            w[hi] = h[hi, hi]
            hi -= 1
            its = 0
            continue
        if its >= maxit:
            return w, False, total, neglected
        its += 1
        total += 1
        # shift
        if its == 10 or its == 20:
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1].real) + 0.75j * abs(h[hi, hi - 1].imag)
        else:
            a11 = h[hi - 1, hi - 1]
            a12 = h[hi - 1, hi]
            a21 = h[hi, hi - 1]
            a22 = h[hi, hi]
            p = 0.5 * (a11 - a22)
            bc = a12 * a21
            disc = np.sqrt(p * p + bc)
            den1 = p + disc
            den2 = p - disc
            den = den1 if abs(den1) >= abs(den2) else den2
            if den == 0:
                mu = a22
            else:
                mu = a22 - bc / den
        # implicit single-shift bulge chase on rows/cols lo..hi
        for k in range(lo, hi):
            if k == lo:
                x = h[lo, lo] - mu
                y = h[lo + 1, lo]
            else:
                x = h[k, k - 1]
                y = h[k + 1, k - 1]
            ax = abs(x)
            ay = abs(y)
            if ay == 0.0:
                continue
            r = np.hypot(ax, ay)
            if ax == 0.0:
                c = 0.0
                s = 1.0 + 0.0j
            else:
                c = ax / r
                s = (x / ax) * np.conj(y) / r
            j0 = lo if k == lo else k - 1
            for j in range(j0, hi + 1):
                t1 = h[k, j]
                t2 = h[k + 1, j]
                h[k, j] = c * t1 + s * t2
                h[k + 1, j] = -np.conj(s) * t1 + c * t2
            if k > lo:
                h[k + 1, k - 1] = 0.0
            i1 = min(k + 2, hi)
            for i in range(lo, i1 + 1):
                t1 = h[i, k]
                t2 = h[i, k + 1]
                h[i, k] = c * t1 + np.conj(s) * t2
                h[i, k + 1] = -s * t1 + c * t2
    return w, True, total, neglected


# --------------------------------------------------------------------------
# public API


def lu_decompose(m) -> LUFactorization:
    """Partial-pivoted LU of a square matrix.

    Singular input is not an error; it yields a factorization with a zero
    pivot and ``singular=True``.
    """
    a = as_matrix(m).copy()
    piv, sign, zero = _lu_inplace(a)
    return LUFactorization(lu=a, pivot=piv, sign=int(sign), singular=bool(zero))


def det(m) -> complex:
    f = lu_decompose(m)
    return complex(f.sign * np.prod(np.diag(f.lu)))


def det_batch(stack) -> np.ndarray:
    """Determinants of a stack of square matrices with shape ``(count, r, r)``."""
    a = np.ascontiguousarray(stack, dtype=np.complex128)
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise NotSquareError(f"expected shape (count, r, r), got {a.shape}")
    return _det_batch(a)


def solve(m, b) -> np.ndarray:
    """Solve ``m @ x = b``; ``b`` may be a vector or a matrix of right-hand sides.

    Raises
    ------
    NearSingular
        If the smallest pivot magnitude is below ``SINGULAR_RTOL`` times the
        largest.
    """
    f = lu_decompose(m)
    bb = np.asarray(b, dtype=np.complex128)
    vector = bb.ndim == 1
    bb = as_matrix(bb, square=False)
    if bb.shape[0] != f.lu.shape[0]:
        raise ValueError(f"shape mismatch: {f.lu.shape} vs {bb.shape}")
    piv = f.pivot_magnitudes()
    pmax = float(piv.max())
    pmin = float(piv.min())
    if pmax == 0.0 or pmin < SINGULAR_RTOL * pmax:
        raise NearSingular(pmin, pmax)
    x = _lu_solve(f.lu, f.pivot, np.ascontiguousarray(bb))
    return x[:, 0] if vector else x


def eigenvalues(m, balance: bool = True) -> Spectrum:
    """Eigenvalues of a general complex square matrix, in no particular order.

    ``residual_bound`` estimates the backward error relative to
    ``||m||_F``: each returned value is an exact eigenvalue of some
    ``m + E`` with ``||E||_F`` at most about ``residual_bound * ||m||_F``.

    Raises
    ------
    EigenFailure
        If some eigenvalue needs more than ``30 * n`` QR iterations.
    """
    a = as_matrix(m).copy()
    n = a.shape[0]
    norm = float(np.linalg.norm(a))
    if n == 1:
        return Spectrum(eigenvalues=a[0].copy(), residual_bound=0.0)
    if balance:
        scale = _balance(a)
        cond_scale = float(scale.max() / scale.min())
    else:
        cond_scale = 1.0
    bal_norm = float(np.linalg.norm(a))
    _hessenberg(a)
    w, ok, iters, neglected = _hessenberg_qr_eigvals(a, 30 * n)
    if not ok:
        raise EigenFailure(int(iters))
    if norm == 0.0:
        return Spectrum(eigenvalues=w, residual_bound=0.0, iterations=int(iters))
    # rounding in n Householder steps plus the QR sweeps, and the explicitly
    # neglected subdiagonals; mapped back through the balancing similarity
    backward = (neglected + 10.0 * n * _EPS * bal_norm) * cond_scale
    return Spectrum(eigenvalues=w, residual_bound=backward / norm, iterations=int(iters))

"""Analytic function families with exact complex Hessians.

Manufactured problems need the right-hand side sampled from exact second
derivatives, not discrete ones, so every built-in family exposes ``value``
and ``complex_hessian`` evaluated analytically at stacked coordinate rows
(shape (..., 2n), real axes ordered x_1, y_1, x_2, y_2, ...).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class Polynomial:
    """Real polynomial in the 2n real coordinates, stored as monomials.

    ``terms`` maps exponent tuples (length 2n) to coefficients.  Supports the
    algebra needed to build test functions (add, multiply, scale) and exact
    first/second partial derivatives.
    """

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        self.terms = {}
        for expo, c in (terms or {}).items():
            if len(expo) != nvars:
                raise ValueError(f"exponent tuple {expo} has wrong length")
            key = tuple(int(e) for e in expo)
            if c != 0.0:
                self.terms[key] = self.terms.get(key, 0.0) + float(c)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.terms)
        for expo, c in other.terms.items():
            out[expo] = out.get(expo, 0.0) + c
        return Polynomial(self.nvars, out)

    def __mul__(self, other):
        if np.isscalar(other):
            return Polynomial(
                self.nvars, {e: c * float(other) for e, c in self.terms.items()}
            )
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0.0) + c1 * c2
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    def value(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64)
        out = np.zeros(pts.shape[:-1])
        for expo, c in self.terms.items():
            term = np.full(pts.shape[:-1], c)
            for a, e in enumerate(expo):
                if e:
                    term = term * pts[..., a] ** e
            out += term
        return out

    def d2(self, a: int, b: int, points: np.ndarray) -> np.ndarray:
        """Second partial derivative d^2/(dt_a dt_b), evaluated pointwise."""
        pts = np.asarray(points, dtype=np.float64)
        out = np.zeros(pts.shape[:-1])
        for expo, c in self.terms.items():
            e = list(expo)
            coeff = c
            for axis in (a, b):
                if e[axis] == 0:
                    coeff = 0.0
                    break
                coeff *= e[axis]
                e[axis] -= 1
            if coeff == 0.0:
                continue
            term = np.full(pts.shape[:-1], coeff)
            for axis, ee in enumerate(e):
                if ee:
                    term = term * pts[..., axis] ** ee
            out += term
        return out

    def complex_hessian(self, points: np.ndarray) -> np.ndarray:
        """Exact complex Hessian rows, shape (..., n, n), entry [k, j] = d_j d_kbar."""
        n = self.nvars // 2
        pts = np.asarray(points, dtype=np.float64)
        out = np.zeros(pts.shape[:-1] + (n, n), dtype=np.complex128)
        for j in range(n):
            xj, yj = 2 * j, 2 * j + 1
            out[..., j, j] = (self.d2(xj, xj, pts) + self.d2(yj, yj, pts)) / 4.0
            for k in range(j + 1, n):
                xk, yk = 2 * k, 2 * k + 1
                re = (self.d2(xj, xk, pts) + self.d2(yj, yk, pts)) / 4.0
                im = (self.d2(xj, yk, pts) - self.d2(yj, xk, pts)) / 4.0
                out[..., k, j] = re + 1j * im
                out[..., j, k] = re - 1j * im
        return out


def norm_squared(n: int, coeff: float = 1.0) -> Polynomial:
    """|z|^2 = sum_j (x_j^2 + y_j^2), scaled."""
    terms = {}
    for a in range(2 * n):
        expo = [0] * (2 * n)
        expo[a] = 2
        terms[tuple(expo)] = coeff
    return Polynomial(2 * n, terms)


def re_z1_squared(n: int) -> Polynomial:
    """Re(z_1^2) = x_1^2 - y_1^2, a pluriharmonic quadratic."""
    e_x = [0] * (2 * n)
    e_x[0] = 2
    e_y = [0] * (2 * n)
    e_y[1] = 2
    return Polynomial(2 * n, {tuple(e_x): 1.0, tuple(e_y): -1.0})


@dataclass(frozen=True)
class RadialProfile:
    """Profile u(s) of a radial function u = u(|z|^2), as a polynomial in s."""

    coeffs: tuple  # u(s) = sum_k coeffs[k] * s^k

    def value(self, s: np.ndarray) -> np.ndarray:
        return np.polynomial.polynomial.polyval(np.asarray(s, dtype=np.float64),
                                                np.asarray(self.coeffs))

    def d1(self, s: np.ndarray) -> np.ndarray:
        c = np.polynomial.polynomial.polyder(np.asarray(self.coeffs))
        return np.polynomial.polynomial.polyval(np.asarray(s, dtype=np.float64), c)

    def d2(self, s: np.ndarray) -> np.ndarray:
        c = np.polynomial.polynomial.polyder(np.asarray(self.coeffs), 2)
        return np.polynomial.polynomial.polyval(np.asarray(s, dtype=np.float64), c)


def radial_power(power: int, scale: float = 1.0) -> RadialProfile:
    """u(s) = scale * s^power / power (power >= 1); power 2 gives s^2/2."""
    if power < 1:
        raise ValueError(f"power must be >= 1, got {power}")
    coeffs = [0.0] * (power + 1)
    coeffs[power] = scale / power
    return RadialProfile(tuple(coeffs))


@dataclass(frozen=True)
class RadialOnBox:
    """A radial profile evaluated as a function on C^n coordinates."""

    profile: RadialProfile
    n: int

    def value(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64)
        s = np.sum(pts**2, axis=-1)
        return self.profile.value(s)

    def complex_hessian(self, points: np.ndarray) -> np.ndarray:
        # d_j d_kbar u(|z|^2) = u' delta_jk + u'' zbar_j z_k, entry [k, j]
        pts = np.asarray(points, dtype=np.float64)
        s = np.sum(pts**2, axis=-1)
        z = pts[..., 0::2] + 1j * pts[..., 1::2]
        u1 = self.profile.d1(s)
        u2 = self.profile.d2(s)
        eye = np.eye(self.n, dtype=np.complex128)
        outer = np.einsum("...j,...k->...kj", z.conj(), z)
        return u1[..., None, None] * eye + u2[..., None, None] * outer

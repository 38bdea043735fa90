"""Box grids in C^n and second-order discrete complex Hessians.

A box domain in C^n is discretized as a uniform tensor grid over the 2n
real coordinates, ordered (x_1, y_1, x_2, y_2, ...) with z_j = x_j + i y_j.
The discrete complex Hessian entry with barred row k and unbarred column j is

    H[k, j] = 1/4 * [ (u_{x^j x^k} + u_{y^j y^k}) + i (u_{x^j y^k} - u_{y^j x^k}) ]

with central second differences on the diagonal and 4-point cross stencils
for mixed terms.  Mixed stencils are symmetric in their two axes, so the
assembled matrix is Hermitian exactly (zero symmetrization correction) and
the diagonal is exactly real.  Consistency is O(h^2) for C^4 functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import BoundaryNode, ValidationError
from .hermitian import HermitianMatrix

MIN_RESOLUTION = 9


@dataclass(frozen=True)
class BoxGrid:
    """Uniform grid over a 2n-dimensional real box.

    ``extent`` holds 2n (lo, hi) pairs; ``resolution`` is the point count per
    axis (odd and >= 9, so the center is a node).  Interior nodes have every
    index in [1, resolution - 2].
    """

    n: int
    extent: tuple
    resolution: int

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("n", f"complex dimension must be >= 1, got {self.n}")
        ext = tuple((float(lo), float(hi)) for lo, hi in self.extent)
        if len(ext) != 2 * self.n:
            raise ValidationError(
                "extent", f"expected {2 * self.n} (lo, hi) pairs, got {len(ext)}"
            )
        for lo, hi in ext:
            if not hi > lo:
                raise ValidationError("extent", f"empty interval ({lo}, {hi})")
        if self.resolution < MIN_RESOLUTION or self.resolution % 2 == 0:
            raise ValidationError(
                "resolution",
                f"resolution must be odd and >= {MIN_RESOLUTION}, got {self.resolution}",
            )
        object.__setattr__(self, "extent", ext)

    @property
    def ndim_real(self) -> int:
        return 2 * self.n

    @property
    def shape(self) -> tuple:
        return (self.resolution,) * self.ndim_real

    @property
    def interior_shape(self) -> tuple:
        return (self.resolution - 2,) * self.ndim_real

    @property
    def spacing(self) -> tuple:
        r = self.resolution - 1
        return tuple((hi - lo) / r for lo, hi in self.extent)

    def axis_coords(self, axis: int) -> np.ndarray:
        lo, hi = self.extent[axis]
        return np.linspace(lo, hi, self.resolution)

    def node_coords(self, node) -> np.ndarray:
        return np.array(
            [self.axis_coords(a)[i] for a, i in enumerate(node)], dtype=np.float64
        )

    def is_interior(self, node) -> bool:
        return all(1 <= i <= self.resolution - 2 for i in node)

    def coordinate_grids(self) -> list[np.ndarray]:
        """Per-axis coordinate arrays broadcastable to the full grid shape."""
        out = []
        for a in range(self.ndim_real):
            shape = [1] * self.ndim_real
            shape[a] = self.resolution
            out.append(self.axis_coords(a).reshape(shape))
        return out

    def points(self) -> np.ndarray:
        """All node coordinates, shape (*grid shape, 2n)."""
        grids = np.meshgrid(*[self.axis_coords(a) for a in range(self.ndim_real)],
                            indexing="ij")
        return np.stack(grids, axis=-1)

    def interior_points(self) -> np.ndarray:
        sl = (slice(1, -1),) * self.ndim_real
        return self.points()[sl]

    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        for a in range(self.ndim_real):
            sl_lo = [slice(None)] * self.ndim_real
            sl_lo[a] = 0
            mask[tuple(sl_lo)] = True
            sl_hi = [slice(None)] * self.ndim_real
            sl_hi[a] = self.resolution - 1
            mask[tuple(sl_hi)] = True
        return mask

    def face_distance(self) -> np.ndarray:
        """Euclidean distance to the nearest face, over the full grid."""
        parts = []
        for a in range(self.ndim_real):
            lo, hi = self.extent[a]
            c = self.axis_coords(a)
            da = np.minimum(c - lo, hi - c)
            shape = [1] * self.ndim_real
            shape[a] = self.resolution
            parts.append(da.reshape(shape))
        return reduce(np.minimum, parts)

    def diameter(self) -> float:
        return float(np.sqrt(sum((hi - lo) ** 2 for lo, hi in self.extent)))


@dataclass
class ScalarField:
    """Real values attached to every grid node."""

    grid: BoxGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("scalar field contains non-finite values")
        self.values = v

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())

    def interior(self) -> np.ndarray:
        sl = (slice(1, -1),) * self.grid.ndim_real
        return self.values[sl]


@dataclass
class MatrixField:
    """Hermitian matrices attached to interior nodes, stored stacked."""

    grid: BoxGrid
    values: np.ndarray  # (*interior shape, n, n) complex

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        expected = self.grid.interior_shape + (self.grid.n, self.grid.n)
        if v.shape != expected:
            raise ValueError(f"values shape {v.shape} != {expected}")
        self.values = v

    def node_of_flat(self, k: int) -> tuple:
        idx = np.unravel_index(k, self.grid.interior_shape)
        return tuple(int(i) + 1 for i in idx)

    def at(self, node) -> HermitianMatrix:
        if not self.grid.is_interior(node):
            raise BoundaryNode(f"node {node} is not interior")
        idx = tuple(i - 1 for i in node)
        return HermitianMatrix(self.values[idx])

    def hermitian_defect(self) -> float:
        return float(np.abs(self.values - np.swapaxes(self.values, -1, -2).conj()).max())


def _interior_slices(ndim: int, offsets: dict) -> tuple:
    slices = []
    for a in range(ndim):
        o = offsets.get(a, 0)
        stop = -1 + o
        slices.append(slice(1 + o, stop if stop != 0 else None))
    return tuple(slices)


def second_difference(values: np.ndarray, axis_a: int, axis_b: int, spacing) -> np.ndarray:
    """Discrete d^2/(dt_a dt_b) over the interior block of a full-grid array."""
    ndim = values.ndim
    ha = spacing[axis_a]
    hb = spacing[axis_b]
    if axis_a == axis_b:
        up = values[_interior_slices(ndim, {axis_a: +1})]
        mid = values[_interior_slices(ndim, {})]
        dn = values[_interior_slices(ndim, {axis_a: -1})]
        return (up - 2.0 * mid + dn) / (ha * ha)
    pp = values[_interior_slices(ndim, {axis_a: +1, axis_b: +1})]
    pm = values[_interior_slices(ndim, {axis_a: +1, axis_b: -1})]
    mp = values[_interior_slices(ndim, {axis_a: -1, axis_b: +1})]
    mm = values[_interior_slices(ndim, {axis_a: -1, axis_b: -1})]
    return (pp - pm - mp + mm) / (4.0 * ha * hb)


def complex_hessian_field(u: ScalarField) -> MatrixField:
    """Discrete complex Hessian of u at every interior node."""
    grid = u.grid
    n = grid.n
    h = grid.spacing
    out = np.zeros(grid.interior_shape + (n, n), dtype=np.complex128)
    for j in range(n):
        xj, yj = 2 * j, 2 * j + 1
        out[..., j, j] = (
            second_difference(u.values, xj, xj, h)
            + second_difference(u.values, yj, yj, h)
        ) / 4.0
        for k in range(j + 1, n):
            xk, yk = 2 * k, 2 * k + 1
            re = (
                second_difference(u.values, xj, xk, h)
                + second_difference(u.values, yj, yk, h)
            ) / 4.0
            im = (
                second_difference(u.values, xj, yk, h)
                - second_difference(u.values, yj, xk, h)
            ) / 4.0
            out[..., k, j] = re + 1j * im
            out[..., j, k] = re - 1j * im
    return MatrixField(grid, out)


def complex_hessian(u: ScalarField, node) -> HermitianMatrix:
    """Discrete complex Hessian at a single interior node."""
    grid = u.grid
    if not grid.is_interior(node):
        raise BoundaryNode(f"node {node} is on the boundary")
    n = grid.n
    h = grid.spacing
    vals = u.values

    def d2(a, b):
        base = list(node)
        if a == b:
            up = list(base)
            up[a] += 1
            dn = list(base)
            dn[a] -= 1
            return (vals[tuple(up)] - 2.0 * vals[tuple(base)] + vals[tuple(dn)]) / (
                h[a] * h[a]
            )
        total = 0.0
        for sa, sb, sign in ((1, 1, 1.0), (1, -1, -1.0), (-1, 1, -1.0), (-1, -1, 1.0)):
            idx = list(base)
            idx[a] += sa
            idx[b] += sb
            total += sign * vals[tuple(idx)]
        return total / (4.0 * h[a] * h[b])

    out = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        xj, yj = 2 * j, 2 * j + 1
        out[j, j] = (d2(xj, xj) + d2(yj, yj)) / 4.0
        for k in range(j + 1, n):
            xk, yk = 2 * k, 2 * k + 1
            re = (d2(xj, xk) + d2(yj, yk)) / 4.0
            im = (d2(xj, yk) - d2(yj, xk)) / 4.0
            out[k, j] = re + 1j * im
            out[j, k] = re - 1j * im
    return HermitianMatrix(out)


def assemble_g(chi, u: ScalarField) -> MatrixField:
    """g = chi + complex Hessian of u at every interior node.

    ``chi`` is a constant Hermitian matrix (HermitianMatrix or (n, n) array)
    or an existing MatrixField on the same grid.
    """
    hess = complex_hessian_field(u)
    if isinstance(chi, MatrixField):
        if chi.grid is not u.grid and chi.grid != u.grid:
            raise ValueError("chi field lives on a different grid")
        hess.values = hess.values + chi.values
        return hess
    entries = getattr(chi, "entries", np.asarray(chi, dtype=np.complex128))
    hess.values = hess.values + entries
    return hess


def gradient_sq_max(u: ScalarField) -> float:
    """Max over all nodes of |grad u|^2.

    Central differences inside, second-order one-sided at the two boundary
    slabs of each axis; both are exact on quadratics, so the sup is
    resolution independent for quadratic fields.
    """
    grid = u.grid
    h = grid.spacing
    total = np.zeros(grid.shape)
    v = u.values
    for a in range(grid.ndim_real):
        d = np.empty_like(v)
        mid = [slice(None)] * grid.ndim_real
        up = [slice(None)] * grid.ndim_real
        dn = [slice(None)] * grid.ndim_real
        mid[a], up[a], dn[a] = slice(1, -1), slice(2, None), slice(0, -2)
        d[tuple(mid)] = (v[tuple(up)] - v[tuple(dn)]) / (2.0 * h[a])

        def take(idx):
            sl = [slice(None)] * grid.ndim_real
            sl[a] = idx
            return v[tuple(sl)]

        lo = [slice(None)] * grid.ndim_real
        lo[a] = 0
        d[tuple(lo)] = (-3.0 * take(0) + 4.0 * take(1) - take(2)) / (2.0 * h[a])
        hi = [slice(None)] * grid.ndim_real
        hi[a] = grid.resolution - 1
        d[tuple(hi)] = (3.0 * take(-1) - 4.0 * take(-2) + take(-3)) / (2.0 * h[a])
        total += d * d
    return float(total.max())


def face_tangential_trace_min(u: ScalarField, chi_entries: np.ndarray) -> float:
    """Minimum over face nodes of the complex-tangential trace of g.

    For a face perpendicular to a real axis of the complex direction j, the
    tangential block of g omits direction j; its trace needs only diagonal
    Hessian entries in the remaining directions, whose stencils stay on the
    face, so this is computable from boundary data alone.  Face nodes with a
    tangential index on an edge are skipped.
    """
    grid = u.grid
    n = grid.n
    best = np.inf
    chi = np.asarray(chi_entries, dtype=np.complex128)
    for axis in range(grid.ndim_real):
        jn = axis // 2
        tang_dirs = [j for j in range(n) if j != jn]
        if not tang_dirs:
            continue
        chi_trace = float(sum(chi[j, j].real for j in tang_dirs))
        for side in (0, grid.resolution - 1):
            sl = [slice(None)] * grid.ndim_real
            sl[axis] = side
            face = u.values[tuple(sl)]
            face_axes = [a for a in range(grid.ndim_real) if a != axis]
            pos = {a: i for i, a in enumerate(face_axes)}
            spacing = [grid.spacing[a] for a in face_axes]
            trace = np.full(tuple(grid.resolution - 2 for _ in face_axes), chi_trace)
            for j in tang_dirs:
                for real_axis in (2 * j, 2 * j + 1):
                    trace += second_difference(
                        face, pos[real_axis], pos[real_axis], spacing
                    ) / 4.0
            best = min(best, float(trace.min()))
    return best

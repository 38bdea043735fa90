"""Sparse Dirichlet solves for the linearized operator.

The linearization of the normalized operator at an admissible iterate is

    L v = tr(C(node) @ complex_hessian(v)),

with C the Hermitian positive-definite coefficient field.  Writing
C = R + iI (R symmetric, I antisymmetric) and expanding the complex Hessian
into real second differences gives the real stencil weights

    L v = 1/4 * sum_{k,j} R_kj (v_{x^k x^j} + v_{y^k y^j})
        - 1/2 * sum_{k,j} I_kj  v_{x^k y^j},

so the assembled system is real; the imaginary parts cancel exactly because
both C and the discrete Hessian are Hermitian.  Unknowns are the interior
nodes in C (row-major) order; Dirichlet data is folded into the right-hand
side by the callers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import IndefiniteCoefficients, LinearSolveStalled
from .grid import BoxGrid, MatrixField, ScalarField, complex_hessian_field

DIRECT_THRESHOLD = 20000  # unknown count at or below which a direct factorization is used
STALL_WINDOW = 50  # iterations without meaningful progress before declaring a stall
IMAG_CANCEL_TOL = 1e-12


def real_stencil_weights(coeffs: np.ndarray):
    """Real-axis weight fields from complex Hermitian coefficient matrices.

    Returns (diag_weights (..., 2n), cross_weights dict {(a, b): (...,)} with
    a < b) such that L v = sum_a diag_a v_aa + sum_{a<b} w_ab v_ab.
    """
    n = coeffs.shape[-1]
    r = coeffs.real
    im = coeffs.imag
    if np.abs(im.diagonal(axis1=-2, axis2=-1)).max(initial=0.0) > IMAG_CANCEL_TOL:
        raise IndefiniteCoefficients("coefficient diagonal has an imaginary part")
    diag = np.zeros(coeffs.shape[:-2] + (2 * n,))
    cross: dict = {}
    for k in range(n):
        diag[..., 2 * k] += r[..., k, k] / 4.0
        diag[..., 2 * k + 1] += r[..., k, k] / 4.0
        for j in range(k + 1, n):
            # x_k x_j and y_k y_j carry R_kj/4 from both (k, j) and (j, k)
            rkj = r[..., k, j]
            cross[(2 * k, 2 * j)] = rkj / 2.0
            cross[(2 * k + 1, 2 * j + 1)] = rkj / 2.0
        for j in range(n):
            if k == j:
                continue
            ikj = im[..., k, j]
            a, b = 2 * k, 2 * j + 1  # x_k, y_j
            key = (min(a, b), max(a, b))
            cross[key] = cross.get(key, 0.0) - ikj / 2.0
    return diag, cross


@dataclass
class SparseSystem:
    """Interior-unknown linear system with grid bookkeeping."""

    grid: BoxGrid
    matrix: sp.csr_matrix
    rhs: np.ndarray
    mmatrix_violations: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def unknowns(self) -> int:
        return self.matrix.shape[0]


def _interior_index_grid(grid: BoxGrid) -> np.ndarray:
    size = int(np.prod(grid.interior_shape))
    return np.arange(size).reshape(grid.interior_shape)


def assemble_linearized(coeffs: MatrixField, rhs: ScalarField | np.ndarray, grid: BoxGrid) -> SparseSystem:
    """Assemble the discrete linearized operator with zero Dirichlet data.

    ``coeffs`` holds the Hermitian coefficient matrices per interior node;
    ``rhs`` the right-hand side at interior nodes (a ScalarField's interior
    is used when a full field is passed).  Rows where off-diagonal couplings
    overwhelm the diagonal (broken M-matrix structure, possible with strong
    cross terms) are counted and reported in the system metadata.
    """
    n = grid.n
    h = grid.spacing
    interior = grid.interior_shape
    size = int(np.prod(interior))
    cvals = coeffs.values

    mins = np.linalg.eigvalsh(cvals).min(axis=-1)
    if mins.min() <= 0.0:
        flat = int(np.argmin(mins.reshape(-1)))
        raise IndefiniteCoefficients(
            f"coefficients not positive definite at node {coeffs.node_of_flat(flat)}"
        )

    diag_w, cross_w = real_stencil_weights(cvals)
    index = _interior_index_grid(grid)

    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []
    center = np.zeros(interior)

    def add_pairs(r, c, v):
        rows.append(r.reshape(-1))
        cols.append(c.reshape(-1))
        vals.append(v.reshape(-1))

    ndim = 2 * n
    for a in range(ndim):
        w = diag_w[..., a] / (h[a] * h[a])
        center -= 2.0 * w
        for off in (-1, +1):
            src = [slice(None)] * ndim
            dst = [slice(None)] * ndim
            if off == +1:
                src[a] = slice(0, -1)
                dst[a] = slice(1, None)
            else:
                src[a] = slice(1, None)
                dst[a] = slice(0, -1)
            add_pairs(index[tuple(src)], index[tuple(dst)], w[tuple(src)])

    for (a, b), wfield in cross_w.items():
        w = wfield / (4.0 * h[a] * h[b])
        if np.all(w == 0.0):
            continue
        for oa, ob, sign in ((1, 1, 1.0), (1, -1, -1.0), (-1, 1, -1.0), (-1, -1, 1.0)):
            src = [slice(None)] * ndim
            dst = [slice(None)] * ndim
            for axis, off in ((a, oa), (b, ob)):
                if off == +1:
                    src[axis] = slice(0, -1)
                    dst[axis] = slice(1, None)
                else:
                    src[axis] = slice(1, None)
                    dst[axis] = slice(0, -1)
            add_pairs(index[tuple(src)], index[tuple(dst)], sign * w[tuple(src)])

    diag_rows = index.reshape(-1)
    all_rows = np.concatenate([diag_rows] + rows)
    all_cols = np.concatenate([diag_rows] + cols)
    all_vals = np.concatenate([center.reshape(-1)] + vals)
    matrix = sp.csr_matrix((all_vals, (all_rows, all_cols)), shape=(size, size))

    # monotonicity audit: count rows whose off-diagonal mass exceeds |diag|
    offdiag_abs = np.abs(matrix).sum(axis=1).A1 - np.abs(matrix.diagonal())
    violations = int(np.sum(offdiag_abs > np.abs(matrix.diagonal()) * (1 + 1e-12)))

    rhs_vec = rhs.interior().reshape(-1) if isinstance(rhs, ScalarField) else np.asarray(rhs).reshape(-1)
    if rhs_vec.shape != (size,):
        raise ValueError(f"rhs has {rhs_vec.shape} entries, expected {size}")
    return SparseSystem(grid=grid, matrix=matrix, rhs=rhs_vec.copy(),
                        mmatrix_violations=violations)


def operator_apply(coeffs: MatrixField, u: ScalarField) -> np.ndarray:
    """Evaluate tr(C @ complex_hessian(u)) at interior nodes (full stencils)."""
    hess = complex_hessian_field(u)
    out = np.einsum("...kj,...jk->...", coeffs.values, hess.values)
    if np.abs(out.imag).max(initial=0.0) > IMAG_CANCEL_TOL * max(np.abs(out.real).max(), 1.0):
        raise IndefiniteCoefficients("imaginary parts failed to cancel in operator apply")
    return out.real


def bicgstab(matrix, rhs, tol, max_iter, precond=None, x0=None):
    """Stabilized bi-conjugate gradients with optional preconditioning.

    Converges when the true-residual 2-norm drops below ``tol * ||rhs||``.
    Raises LinearSolveStalled on breakdown, on a residual plateau over
    STALL_WINDOW iterations, or at the iteration cap.
    """
    b_norm = float(np.linalg.norm(rhs))
    if b_norm == 0.0:
        return np.zeros_like(rhs)
    x = np.zeros_like(rhs) if x0 is None else x0.copy()
    r = rhs - matrix @ x
    r0 = r.copy()
    rho = alpha = omega = 1.0
    v = np.zeros_like(rhs)
    p = np.zeros_like(rhs)
    best = float(np.linalg.norm(r))
    since_progress = 0
    for _ in range(max_iter):
        rho_new = float(r0 @ r)
        if abs(rho_new) < 1e-300:
            raise LinearSolveStalled("bicgstab breakdown: rho ~ 0")
        beta = (rho_new / rho) * (alpha / omega)
        rho = rho_new
        p = r + beta * (p - omega * v)
        ph = precond(p) if precond is not None else p
        v = matrix @ ph
        denom = float(r0 @ v)
        if abs(denom) < 1e-300:
            raise LinearSolveStalled("bicgstab breakdown: r0 . v ~ 0")
        alpha = rho / denom
        s = r - alpha * v
        s_norm = float(np.linalg.norm(s))
        if s_norm <= tol * b_norm:
            x = x + alpha * ph
            return x
        sh = precond(s) if precond is not None else s
        t = matrix @ sh
        tt = float(t @ t)
        if tt < 1e-300:
            raise LinearSolveStalled("bicgstab breakdown: t ~ 0")
        omega = float(t @ s) / tt
        x = x + alpha * ph + omega * sh
        r = s - omega * t
        r_norm = float(np.linalg.norm(r))
        if r_norm <= tol * b_norm:
            return x
        if r_norm < 0.999 * best:
            best = r_norm
            since_progress = 0
        else:
            since_progress += 1
            if since_progress >= STALL_WINDOW:
                raise LinearSolveStalled(
                    f"residual plateau at {r_norm / b_norm:.3e} over {STALL_WINDOW} iterations"
                )
    raise LinearSolveStalled(f"no convergence within {max_iter} iterations")


def solve_sparse(system: SparseSystem, tol: float = 1e-10, max_iter: int = 20000) -> ScalarField:
    """Solve the interior system; returns the correction as a ScalarField.

    Uses a sparse direct factorization up to DIRECT_THRESHOLD unknowns
    (configurable via ``system.meta['direct_threshold']``) and
    diagonal-preconditioned BiCGStab above it.  The returned field is zero
    on the boundary, matching the zero-Dirichlet assembly convention.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    threshold = int(system.meta.get("direct_threshold", DIRECT_THRESHOLD))
    scale = max(float(np.linalg.norm(system.rhs)), 1e-300)
    if system.unknowns <= threshold:
        lu = spla.splu(system.matrix.tocsc())
        x = lu.solve(system.rhs)
        rel = float(np.linalg.norm(system.matrix @ x - system.rhs)) / scale
        if rel > max(1e-7, tol):
            raise LinearSolveStalled(f"direct solve residual {rel:.3e} too large")
    else:
        diag = system.matrix.diagonal()
        if np.any(diag == 0.0):
            raise LinearSolveStalled("zero diagonal entry; cannot precondition")
        inv_diag = 1.0 / diag
        x = bicgstab(
            system.matrix, system.rhs, tol=tol, max_iter=max_iter,
            precond=lambda vec: inv_diag * vec,
        )
        # the recurrence residual can drift from the true one; verify
        rel = float(np.linalg.norm(system.matrix @ x - system.rhs)) / scale
        if rel > 50.0 * tol:
            raise LinearSolveStalled(f"true residual {rel:.3e} drifted above tolerance")
    grid = system.grid
    full = np.zeros(grid.shape)
    sl = (slice(1, -1),) * grid.ndim_real
    full[sl] = x.reshape(grid.interior_shape)
    return ScalarField(grid, full)


def constant_coefficient_field(grid: BoxGrid, matrix: np.ndarray) -> MatrixField:
    vals = np.broadcast_to(
        np.asarray(matrix, dtype=np.complex128), grid.interior_shape + matrix.shape
    ).copy()
    return MatrixField(grid, vals)


def upper_barrier(chi, omega, phi: ScalarField, grid: BoxGrid,
                  tol: float = 1e-12) -> ScalarField:
    """Solve tr_omega(chi + complex Hessian of v) = 0 with v = phi on the boundary.

    ``chi`` and ``omega`` are constant Hermitian matrices ((n, n) arrays or
    HermitianMatrix); ``phi`` supplies boundary values (its interior is
    ignored).  The result caps every admissible solution from above.
    """
    chi_e = getattr(chi, "entries", np.asarray(chi, dtype=np.complex128))
    if omega is None:
        omega_inv = np.eye(grid.n, dtype=np.complex128)
    else:
        omega_e = getattr(omega, "entries", np.asarray(omega, dtype=np.complex128))
        omega_inv = np.linalg.inv(omega_e)
        omega_inv = (omega_inv + omega_inv.conj().T) / 2.0
    coeffs = constant_coefficient_field(grid, omega_inv)

    rhs = np.full(grid.interior_shape, -float(np.trace(omega_inv @ chi_e).real))
    # fold the Dirichlet data: solve for v - phi_ext with phi_ext = phi on
    # the boundary and 0 inside
    phi_ext = np.zeros(grid.shape)
    mask = grid.boundary_mask()
    phi_ext[mask] = phi.values[mask]
    bc = operator_apply(coeffs, ScalarField(grid, phi_ext))
    system = assemble_linearized(coeffs, rhs - bc, grid)
    correction = solve_sparse(system, tol=tol)
    out = correction.values + phi_ext
    return ScalarField(grid, out)

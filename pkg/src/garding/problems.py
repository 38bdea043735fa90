"""Problem containers and manufactured-solution generation.

A manufactured problem samples the right-hand side from the exact complex
Hessian of an analytic target, takes the boundary trace of the target as
Dirichlet data, and defaults the subsolution to the target itself (the
equality case of the lower-bound requirement).  The analytic values of the
operator at the subsolution are stored so validity checks do not confuse
discretization error with genuine violations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cone import margins_batch
from .errors import NotAdmissible, SubsolutionInvalid, ValidationError
from .grid import BoxGrid
from .hermitian import congruence_reduce_batch, eigvals_batch
from .operator import OperatorParams, subset_sums_batch
from .radial import RadialGrid, eigenvalue_rows

SUBSOLUTION_RTOL = 1e-9  # relative slack for M(subsolution) >= psi


def product_batch(lams: np.ndarray, params: OperatorParams) -> np.ndarray:
    """Raw operator values over stacked eigenvalue rows inside the cone."""
    sums = subset_sums_batch(lams, params)
    if np.any(sums <= 0.0):
        raise ValueError("eigenvalue rows must be strictly inside the cone")
    return np.exp(np.sum(np.log(sums), axis=-1))


@dataclass
class BoxProblem:
    grid: BoxGrid
    chi: np.ndarray  # constant (n, n) Hermitian background form
    omega: np.ndarray | None  # constant Hermitian metric; None = identity
    psi: np.ndarray  # target right-hand side at interior nodes
    phi: np.ndarray  # full-shape field; boundary values are authoritative
    subsolution: np.ndarray  # full-shape field
    subsolution_margin: np.ndarray  # analytic cone margins at interior nodes
    subsolution_M: np.ndarray  # analytic operator values at interior nodes
    reference: np.ndarray | None = None  # known solution for error reporting


@dataclass
class RadialProblem:
    n: int
    p: int
    grid: RadialGrid
    chi_scalar: float
    psi: np.ndarray  # values at collocation nodes 0..m-1
    boundary_value: float  # u(R^2)
    subsolution: np.ndarray  # profile values at all nodes
    subsolution_margin: np.ndarray
    subsolution_M: np.ndarray
    reference: np.ndarray | None = None


@dataclass
class ProblemSpec:
    n: int
    p: int
    geometry: str  # 'box' or 'radial'
    box: BoxProblem | None = None
    radial: RadialProblem | None = None
    document: object | None = None  # parsed spec text, when applicable
    label: str = ""
    params: OperatorParams = field(init=False)

    def __post_init__(self):
        if self.geometry not in ("box", "radial"):
            raise ValidationError("geometry", f"unknown geometry {self.geometry!r}")
        if self.geometry == "box" and self.box is None:
            raise ValidationError("geometry", "box geometry without box payload")
        if self.geometry == "radial" and self.radial is None:
            raise ValidationError("geometry", "radial geometry without radial payload")
        if not 1 <= self.p <= self.n:
            raise ValidationError("p", f"p must satisfy 1 <= p <= n, got {self.p}")
        self.params = OperatorParams(self.n, self.p)


def _apply_psi_modifiers(psi: np.ndarray, scale: float, bump_node, bump_factor: float,
                         interior_offset: int):
    psi = psi * float(scale)
    if bump_node is not None:
        idx = tuple(int(i) - interior_offset for i in np.atleast_1d(bump_node))
        if len(idx) == 1:
            idx = idx[0]
        psi[idx] = psi[idx] * float(bump_factor)
    return psi


def manufactured_box(
    u_star,
    chi: np.ndarray,
    params: OperatorParams,
    grid: BoxGrid,
    omega: np.ndarray | None = None,
    subsolution=None,
    reference_is_target: bool = True,
    psi_scale: float = 1.0,
    psi_bump_node=None,
    psi_bump_factor: float = 1.0,
    label: str = "",
) -> ProblemSpec:
    """Manufacture a box problem from an analytic target.

    ``u_star`` (and the optional distinct ``subsolution``) must expose
    ``value(points)`` and ``complex_hessian(points)``.  Raises NotAdmissible
    with a witness node if the subsolution exits the cone anywhere.
    """
    if grid.n != params.n:
        raise ValidationError("n", f"grid dimension {grid.n} != operator dimension {params.n}")
    chi = np.asarray(chi, dtype=np.complex128)
    pts_all = grid.points()
    pts_int = grid.interior_points()

    target_vals = u_star.value(pts_all)
    sub_fn = subsolution if subsolution is not None else u_star
    sub_vals = sub_fn.value(pts_all)

    g_target = chi + u_star.complex_hessian(pts_int)
    g_sub = chi + sub_fn.complex_hessian(pts_int)
    omega_entries = None if omega is None else np.asarray(omega, dtype=np.complex128)
    reduced_t, _ = congruence_reduce_batch(g_target, omega_entries)
    reduced_s, _ = congruence_reduce_batch(g_sub, omega_entries)
    vals_t = eigvals_batch(reduced_t)
    vals_s = eigvals_batch(reduced_s)

    margins_s = margins_batch(vals_s, params.p)
    if margins_s.min() <= 0.0:
        flat = int(np.argmin(margins_s.reshape(-1)))
        node = tuple(int(i) + 1 for i in np.unravel_index(flat, grid.interior_shape))
        raise NotAdmissible(
            f"subsolution margin {margins_s.min():.6e} <= 0 at node {node}", node=node
        )
    margins_t = margins_batch(vals_t, params.p)
    if margins_t.min() <= 0.0:
        flat = int(np.argmin(margins_t.reshape(-1)))
        node = tuple(int(i) + 1 for i in np.unravel_index(flat, grid.interior_shape))
        raise NotAdmissible(
            f"target margin {margins_t.min():.6e} <= 0 at node {node}", node=node
        )

    psi = product_batch(vals_t, params)
    sub_m = product_batch(vals_s, params)
    psi = _apply_psi_modifiers(psi, psi_scale, psi_bump_node, psi_bump_factor, 1)

    box = BoxProblem(
        grid=grid,
        chi=chi,
        omega=omega_entries,
        psi=psi,
        phi=target_vals.copy(),
        subsolution=sub_vals,
        subsolution_margin=margins_s,
        subsolution_M=sub_m,
        reference=target_vals.copy() if reference_is_target else None,
    )
    return ProblemSpec(n=params.n, p=params.p, geometry="box", box=box, label=label)


def manufactured_radial(
    profile,
    c: float,
    params: OperatorParams,
    grid: RadialGrid,
    subsolution_profile=None,
    reference_is_target: bool = True,
    psi_scale: float = 1.0,
    psi_bump_node=None,
    psi_bump_factor: float = 1.0,
    label: str = "",
) -> ProblemSpec:
    """Manufacture a radial problem from an analytic profile u(s)."""
    s = grid.s
    m = grid.points - 1

    def analytic_rows(prof):
        u1 = prof.d1(s[:m])
        u2 = prof.d2(s[:m])
        return eigenvalue_rows(u1, u2, s, params.n, c)

    lam_t = analytic_rows(profile)
    sub_prof = subsolution_profile if subsolution_profile is not None else profile
    lam_s = analytic_rows(sub_prof)

    sorted_s = np.sort(lam_s, axis=-1)
    margins_s = margins_batch(sorted_s, params.p)
    if margins_s.min() <= 0.0:
        node = int(np.argmin(margins_s))
        raise NotAdmissible(
            f"subsolution margin {margins_s.min():.6e} <= 0 at s-index {node}", node=node
        )
    sorted_t = np.sort(lam_t, axis=-1)
    margins_t = margins_batch(sorted_t, params.p)
    if margins_t.min() <= 0.0:
        node = int(np.argmin(margins_t))
        raise NotAdmissible(
            f"target margin {margins_t.min():.6e} <= 0 at s-index {node}", node=node
        )

    psi = product_batch(lam_t, params)
    sub_m = product_batch(lam_s, params)
    psi = _apply_psi_modifiers(psi, psi_scale, psi_bump_node, psi_bump_factor, 0)

    radial = RadialProblem(
        n=params.n,
        p=params.p,
        grid=grid,
        chi_scalar=float(c),
        psi=psi,
        boundary_value=float(profile.value(np.array(grid.s_max))),
        subsolution=sub_prof.value(s),
        subsolution_margin=margins_s,
        subsolution_M=sub_m,
        reference=profile.value(s) if reference_is_target else None,
    )
    return ProblemSpec(n=params.n, p=params.p, geometry="radial", radial=radial, label=label)


def verify_subsolution(problem: ProblemSpec) -> None:
    """Check admissibility and M(subsolution) >= psi; raise with a witness node.

    Uses the analytic operator values stored at problem build time, so the
    equality case (subsolution == target) passes exactly while genuine
    inflations of psi are caught at the offending node.
    """
    if problem.geometry == "box":
        payload = problem.box
        interior_offset = 1
        shape = payload.grid.interior_shape
    else:
        payload = problem.radial
        interior_offset = 0
        shape = (payload.grid.points - 1,)

    margins = payload.subsolution_margin
    if margins.min() <= 0.0:
        flat = int(np.argmin(margins.reshape(-1)))
        node = np.unravel_index(flat, shape)
        node = tuple(int(i) + interior_offset for i in node)
        if len(node) == 1:
            node = node[0]
        raise SubsolutionInvalid(
            f"subsolution not admissible: margin {margins.min():.6e} at node {node}",
            node=node,
        )

    deficit = payload.psi - payload.subsolution_M
    tol = SUBSOLUTION_RTOL * np.maximum(np.abs(payload.psi), 1.0)
    if np.any(deficit > tol):
        flat = int(np.argmax((deficit - tol).reshape(-1)))
        node = np.unravel_index(flat, shape)
        node = tuple(int(i) + interior_offset for i in node)
        if len(node) == 1:
            node = node[0]
        raise SubsolutionInvalid(
            f"psi exceeds M(subsolution) by {deficit.reshape(-1)[flat]:.6e} at node {node}",
            node=node,
        )

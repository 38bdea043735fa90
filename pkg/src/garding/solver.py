"""Continuity-method homotopy with damped, cone-preserving Newton steps.

The homotopy deforms the normalized right-hand side from the value the
subsolution attains on the discrete grid to the target:

    psi_tilde_t = t * psi_tilde + (1 - t) * ftilde(g[subsolution]),

so t = 0 is solved exactly by the subsolution (zero residual by
construction) and both ends stay positive.  Each accepted state is
admissible; Newton steps are damped by halving until the candidate keeps at
least a fixed fraction of the current cone margin, preserving strict
interiority (the eigenvalue-space gradient blows up on the cone boundary).

The diagnostic suite instantiates the comparison sandwich, the boundary
tangential-trace lower bound, the collar barrier inequality and the
second-order ratio monitors on the computed solution; diagnostics never
feed back into the solve.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .cone import margins_batch
from .errors import (
    ConeEscape,
    ContinuationStalled,
    LinearSolveStalled,
    MaxItersExceeded,
    RadialModeUnsupported,
)
from .grid import (
    MatrixField,
    ScalarField,
    complex_hessian_field,
    face_tangential_trace_min,
    gradient_sq_max,
)
from .hermitian import congruence_reduce_batch, eigh_batch, eigvals_batch
from .linear import assemble_linearized, operator_apply, solve_sparse, upper_barrier
from .operator import linearization_batch
from .problems import ProblemSpec, verify_subsolution
from .radial import (
    eigenvalue_rows,
    profile_derivatives,
    radial_gradient_sq_max,
    radial_hessian_spectral_radius,
    radial_jacobian,
    radial_trace_equation_solution,
    solve_radial_linear,
)

log = logging.getLogger(__name__)


@dataclass
class SolveConfig:
    newton_tol: float | None = None  # default 1e-8 (box) / 1e-10 (radial)
    max_newton_iters: int = 50
    t_step_init: float = 0.25
    t_step_min: float = 1e-6
    t_step_max: float = 0.5
    t_growth: float = 1.5
    easy_iters: int = 3
    margin_keep: float = 0.1
    alpha_min: float = 2.0**-20
    linear_tol_floor: float = 1e-12
    linear_tol_cap: float = 1e-4
    # direct/iterative crossover for the Newton systems; 4D grid graphs fill
    # in badly under sparse LU, so the solver crosses over far below the
    # standalone solve_sparse default
    direct_threshold: int = 4000
    initial_values: np.ndarray | None = None
    compute_barrier: bool = True
    barrier_tau: float = 0.05
    barrier_N: float = 50.0
    barrier_delta: float | None = None  # default 0.1 * domain diameter

    def tol_for(self, geometry: str) -> float:
        if self.newton_tol is not None:
            return self.newton_tol
        return 1e-10 if geometry == "radial" else 1e-8


@dataclass
class HomotopyState:
    t: float
    u: np.ndarray
    residual_norm: float
    newton_iters: int
    min_margin: float
    residual_history: tuple = ()


@dataclass
class BarrierReport:
    tau: float
    N: float
    delta: float
    collar_nodes: int
    smooth_nodes: int  # collar nodes whose stencil sees a single realizing face
    min_v: float
    min_v_node: tuple | None
    max_lv_ratio: float  # max over smooth collar nodes of L v / (1 + trace_F)
    max_lv_node: tuple | None
    epsilon: float  # -max_lv_ratio; positive when the barrier inequality holds
    degenerate_collar: bool


@dataclass
class SolveDiagnostics:
    K: float
    F_trace: float
    sandwich_violation: float
    c0_boundary: float
    c2_ratio: float
    sup_hessian: float
    boundary_sup_hessian: float
    amgm_min_slack: float
    final_residual: float
    anchor_residual: float
    barrier_report: BarrierReport | None
    states: list = field(default_factory=list)
    upper_solution: np.ndarray | None = None


class _BoxEvaluator:
    """Residuals, margins and Newton corrections on a box problem."""

    def __init__(self, problem: ProblemSpec, config: SolveConfig):
        self.problem = problem
        self.config = config
        box = problem.box
        self.grid = box.grid
        self.params = problem.params
        self.chi = box.chi
        self.omega = box.omega
        self.psi_tilde = box.psi ** (1.0 / self.params.subset_count)
        if self.omega is not None:
            ell = np.linalg.cholesky(self.omega)
            self.ell_inv = np.linalg.inv(ell)
        else:
            self.ell_inv = None
        self.anchor = None  # psi_tilde at t = 0, set from the subsolution

    def _field(self, u_values: np.ndarray) -> ScalarField:
        return ScalarField(self.grid, u_values)

    def _g_reduced(self, u_values: np.ndarray) -> np.ndarray:
        hess = complex_hessian_field(self._field(u_values))
        g = hess.values + self.chi
        reduced, _ = congruence_reduce_batch(g, self.omega)
        return reduced

    def min_margin(self, u_values: np.ndarray):
        vals = eigvals_batch(self._g_reduced(u_values))
        margins = margins_batch(vals, self.params.p)
        flat = int(np.argmin(margins.reshape(-1)))
        node = tuple(int(i) + 1 for i in np.unravel_index(flat, self.grid.interior_shape))
        return float(margins.reshape(-1)[flat]), node

    def analyze(self, u_values: np.ndarray):
        reduced = self._g_reduced(u_values)
        vals, vecs = eigh_batch(reduced)
        margins = margins_batch(vals, self.params.p)
        flat = int(np.argmin(margins.reshape(-1)))
        node = tuple(int(i) + 1 for i in np.unravel_index(flat, self.grid.interior_shape))
        coeffs, trace_f, ft = linearization_batch(reduced, self.params, vals, vecs)
        if self.ell_inv is not None:
            coeffs = np.einsum(
                "ba,...bc,cd->...ad", self.ell_inv.conj(), coeffs, self.ell_inv
            )
        return {
            "vals": vals,
            "ft": ft,
            "coeffs": coeffs,
            "trace_f": trace_f,
            "min_margin": float(margins.reshape(-1)[flat]),
            "min_node": node,
        }

    def set_anchor(self, subsolution_values: np.ndarray) -> None:
        # same eigen routine as analyze() so the t = 0 residual at the
        # subsolution is bitwise zero
        reduced = self._g_reduced(subsolution_values)
        vals, _ = eigh_batch(reduced)
        margins = margins_batch(vals, self.params.p)
        if margins.min() <= 0.0:
            flat = int(np.argmin(margins.reshape(-1)))
            node = tuple(
                int(i) + 1 for i in np.unravel_index(flat, self.grid.interior_shape)
            )
            raise ConeEscape(
                f"subsolution not admissible on the grid (margin {margins.min():.3e})",
                node=node,
            )
        from .operator import ftilde_batch

        self.anchor = ftilde_batch(vals, self.params)

    def psi_tilde_t(self, t: float) -> np.ndarray:
        return t * self.psi_tilde + (1.0 - t) * self.anchor

    def residual(self, state, t: float) -> np.ndarray:
        return state["ft"] - self.psi_tilde_t(t)

    def correction(self, state, resid: np.ndarray, rnorm: float) -> np.ndarray:
        coeffs = MatrixField(self.grid, state["coeffs"])
        system = assemble_linearized(coeffs, -resid, self.grid)
        system.meta["direct_threshold"] = self.config.direct_threshold
        scale = max(1.0, float(np.abs(self.psi_tilde).max()))
        lin_tol = min(
            self.config.linear_tol_cap,
            max(self.config.linear_tol_floor, 0.03 * rnorm / scale),
        )
        return solve_sparse(system, tol=lin_tol).values


class _RadialEvaluator:
    """Residuals, margins and Newton corrections on a radial problem."""

    def __init__(self, problem: ProblemSpec, config: SolveConfig):
        self.problem = problem
        self.config = config
        rad = problem.radial
        self.grid = rad.grid
        self.params = problem.params
        self.n = problem.n
        self.c = rad.chi_scalar
        self.psi_tilde = rad.psi ** (1.0 / self.params.subset_count)
        self.anchor = None

    def _rows(self, u: np.ndarray) -> np.ndarray:
        u1, u2 = profile_derivatives(u, self.grid.spacing)
        return eigenvalue_rows(u1, u2, self.grid.s, self.n, self.c)

    def min_margin(self, u: np.ndarray):
        rows = np.sort(self._rows(u), axis=-1)
        margins = margins_batch(rows, self.params.p)
        node = int(np.argmin(margins))
        return float(margins[node]), node

    def analyze(self, u: np.ndarray):
        lam = self._rows(u)
        order = np.argsort(lam, axis=-1)
        lam_sorted = np.take_along_axis(lam, order, axis=-1)
        margins = margins_batch(lam_sorted, self.params.p)
        node = int(np.argmin(margins))
        from .operator import ftilde_grad_batch

        ft, grads_sorted = ftilde_grad_batch(lam_sorted, self.params)
        grads = np.empty_like(grads_sorted)
        np.put_along_axis(grads, order, grads_sorted, axis=-1)
        return {
            "lam": lam,
            "ft": ft,
            "trace_f": grads.sum(axis=-1),
            "f_radial": grads[:, self.n - 1],
            "min_margin": float(margins[node]),
            "min_node": node,
        }

    def set_anchor(self, subsolution_values: np.ndarray) -> None:
        rows = np.sort(self._rows(subsolution_values), axis=-1)
        margins = margins_batch(rows, self.params.p)
        if margins.min() <= 0.0:
            node = int(np.argmin(margins))
            raise ConeEscape(
                f"subsolution not admissible on the s-grid (margin {margins.min():.3e})",
                node=node,
            )
        from .operator import ftilde_batch

        self.anchor = ftilde_batch(rows, self.params)

    def psi_tilde_t(self, t: float) -> np.ndarray:
        return t * self.psi_tilde + (1.0 - t) * self.anchor

    def residual(self, state, t: float) -> np.ndarray:
        return state["ft"] - self.psi_tilde_t(t)

    def correction(self, state, resid: np.ndarray, rnorm: float) -> np.ndarray:
        jac = radial_jacobian(state["trace_f"], state["f_radial"], self.grid)
        delta_int = solve_radial_linear(jac, -resid)
        delta = np.zeros(self.grid.points)
        delta[:-1] = delta_int
        return delta


def _make_evaluator(problem: ProblemSpec, config: SolveConfig):
    if problem.geometry == "box":
        return _BoxEvaluator(problem, config)
    return _RadialEvaluator(problem, config)


def _newton_loop(ev, t: float, u_init: np.ndarray, tol: float, config: SolveConfig) -> HomotopyState:
    u = u_init.copy()
    margin0, node0 = ev.min_margin(u)
    if margin0 <= 0.0:
        raise ConeEscape(
            f"initial iterate not admissible (margin {margin0:.3e})", node=node0
        )
    history: list[float] = []
    state = ev.analyze(u)
    best = np.inf
    stagnant = 0
    for iteration in range(config.max_newton_iters + 1):
        resid = ev.residual(state, t)
        rnorm = float(np.abs(resid).max())
        history.append(rnorm)
        if rnorm < 0.9 * best:
            best = rnorm
            stagnant = 0
        else:
            stagnant += 1
            if stagnant >= 8:
                # rounding floor of the residual evaluation; more iterations
                # cannot help
                raise MaxItersExceeded(
                    f"Newton stagnated at residual {rnorm:.3e} (tol {tol:.1e}) at t={t:.4f}"
                )
        if rnorm <= tol:
            if len(history) >= 3:
                ratio = history[-1] / max(history[-2], 1e-300)
                prev = history[-2] / max(history[-3], 1e-300)
                log.debug(
                    "newton t=%.4f converged in %d iters; last ratios %.3e, %.3e",
                    t, iteration, prev, ratio,
                )
            return HomotopyState(
                t=t,
                u=u,
                residual_norm=rnorm,
                newton_iters=iteration,
                min_margin=state["min_margin"],
                residual_history=tuple(history),
            )
        if iteration == config.max_newton_iters:
            break
        delta = ev.correction(state, resid, rnorm)
        alpha = 1.0
        margin_cur = state["min_margin"]
        while True:
            candidate = u + alpha * delta
            m_cand, node = ev.min_margin(candidate)
            if m_cand >= config.margin_keep * margin_cur:
                break
            alpha *= 0.5
            if alpha < config.alpha_min:
                raise ConeEscape(
                    f"no damping factor >= 2^-20 keeps admissibility near node {node}",
                    node=node,
                )
        u = candidate
        state = ev.analyze(u)
    raise MaxItersExceeded(
        f"{config.max_newton_iters} Newton iterations at t={t:.4f}, residual {history[-1]:.3e}"
    )


def newton_solve_at_t(
    problem: ProblemSpec,
    t: float,
    u_init: np.ndarray | ScalarField,
    tol: float,
    config: SolveConfig | None = None,
) -> HomotopyState:
    """Solve the fixed-t equation by damped Newton from an admissible start."""
    config = config or SolveConfig()
    ev = _make_evaluator(problem, config)
    sub = problem.box.subsolution if problem.geometry == "box" else problem.radial.subsolution
    ev.set_anchor(sub)
    u0 = u_init.values if isinstance(u_init, ScalarField) else np.asarray(u_init, dtype=float)
    return _newton_loop(ev, t, u0, tol, config)


def continuity_solve(problem: ProblemSpec, config: SolveConfig | None = None):
    """March t from 0 to 1 with adaptive steps; return solution + diagnostics.

    Raises SubsolutionInvalid when the problem's subsolution fails its
    analytic checks, ConeEscape when an initializer is not admissible, and
    ContinuationStalled when step halving hits the minimum step.
    """
    config = config or SolveConfig()
    verify_subsolution(problem)
    ev = _make_evaluator(problem, config)
    if problem.geometry == "box":
        sub = problem.box.subsolution
    else:
        sub = problem.radial.subsolution
    ev.set_anchor(sub)

    tol = config.tol_for(problem.geometry)
    u = sub.copy() if config.initial_values is None else np.asarray(config.initial_values, dtype=float).copy()

    states: list[HomotopyState] = []
    state0 = _newton_loop(ev, 0.0, u, tol, config)
    states.append(state0)
    u = state0.u
    anchor_residual = state0.residual_history[0]

    t = 0.0
    step = config.t_step_init
    while t < 1.0:
        t_try = min(1.0, t + step)
        try:
            st = _newton_loop(ev, t_try, u, tol, config)
        except (ConeEscape, MaxItersExceeded, LinearSolveStalled) as exc:
            step *= 0.5
            log.debug("continuation step to t=%.4f failed (%s); step -> %.2e", t_try, exc, step)
            if step < config.t_step_min:
                raise ContinuationStalled(
                    f"continuation step {step:.2e} below minimum at t={t:.4f}"
                ) from exc
            continue
        states.append(st)
        u = st.u
        t = t_try
        if st.newton_iters <= config.easy_iters:
            step = min(step * config.t_growth, config.t_step_max)

    diagnostics = _diagnostics(problem, ev, u, states, anchor_residual, config)
    if problem.geometry == "box":
        return ScalarField(problem.box.grid, u), diagnostics
    return u, diagnostics


def sandwich_check(u, ul_u, ol_u) -> float:
    """Max violation of the two-sided bound ul_u <= u <= ol_u (0 when clean)."""
    uv = u.values if isinstance(u, ScalarField) else np.asarray(u)
    lv = ul_u.values if isinstance(ul_u, ScalarField) else np.asarray(ul_u)
    ov = ol_u.values if isinstance(ol_u, ScalarField) else np.asarray(ol_u)
    return float(max(0.0, (lv - uv).max(), (uv - ov).max()))


def boundary_trace_check(u, problem: ProblemSpec) -> float:
    """Minimum complex-tangential trace of g over the boundary.

    Box problems scan all face nodes (faces are flat, so the tangential
    block is determined by the boundary data); radial problems report the
    (n-1)-fold tangential trace (n - 1) * (c + u'(R^2)).
    """
    if problem.geometry == "box":
        field_u = u if isinstance(u, ScalarField) else ScalarField(problem.box.grid, u)
        return face_tangential_trace_min(field_u, problem.box.chi)
    rad = problem.radial
    uv = u.values if isinstance(u, ScalarField) else np.asarray(u)
    ds = rad.grid.spacing
    u1_end = (3.0 * uv[-1] - 4.0 * uv[-2] + uv[-3]) / (2.0 * ds)
    return float((problem.n - 1) * (rad.chi_scalar + u1_end))


def barrier_check(
    u,
    ul_u,
    problem: ProblemSpec,
    tau: float = 0.05,
    N: float = 50.0,
    delta: float | None = None,
) -> BarrierReport:
    """Evaluate the collar barrier v = (u - ul_u) + tau * d - N * d^2.

    Reports the minimum of v over the collar {0 < d < delta} and the maximum
    of L v / (1 + trace_F) over the collar nodes whose full stencil sees a
    single realizing face, where L is the linearized operator at u.  At
    ridge and corner nodes d has concave kinks and its discrete Hessian does
    not reflect the smooth distance branch the inequality is about, so those
    nodes are excluded from the L v scan (their count is reported).  Purely
    diagnostic: violations are reported, never raised.
    """
    if problem.geometry != "box":
        raise RadialModeUnsupported("barrier_check requires a box problem")
    box = problem.box
    grid = box.grid
    uv = u.values if isinstance(u, ScalarField) else np.asarray(u)
    lv = ul_u.values if isinstance(ul_u, ScalarField) else np.asarray(ul_u)
    if delta is None:
        delta = 0.1 * grid.diameter()
    half_width = min((hi - lo) / 2.0 for lo, hi in grid.extent)
    degenerate = delta >= half_width

    d = grid.face_distance()
    v = (uv - lv) + tau * d - N * d * d
    collar = (d > 0.0) & (d < delta)
    count = int(collar.sum())
    if count == 0:
        return BarrierReport(tau, N, float(delta), 0, 0, np.nan, None, np.nan, None,
                             np.nan, True)

    vmin_idx = np.unravel_index(int(np.argmin(np.where(collar, v, np.inf))), grid.shape)
    min_v = float(v[vmin_idx])

    # single-face mask: the nearest-face axis stays the realizing one across
    # the whole +-1 stencil neighborhood
    axis_dists = []
    for a in range(grid.ndim_real):
        lo, hi = grid.extent[a]
        c = grid.axis_coords(a)
        da = np.minimum(c - lo, hi - c)
        shape = [1] * grid.ndim_real
        shape[a] = grid.resolution
        axis_dists.append(np.broadcast_to(da.reshape(shape), grid.shape))
    stacked = np.stack(axis_dists, axis=0)
    part = np.partition(stacked, 1, axis=0)
    gap = part[1] - part[0]
    smooth = gap > 2.0 * max(grid.spacing)

    interior_sl = (slice(1, -1),) * grid.ndim_real
    collar_smooth = (collar & smooth)[interior_sl]
    smooth_count = int(collar_smooth.sum())
    if smooth_count == 0:
        return BarrierReport(tau, N, float(delta), count, 0, min_v,
                             tuple(int(i) for i in vmin_idx), np.nan, None, np.nan,
                             degenerate)

    ev = _BoxEvaluator(problem, SolveConfig())
    state = ev.analyze(uv)
    coeffs = MatrixField(grid, state["coeffs"])
    lv_field = operator_apply(coeffs, ScalarField(grid, v))
    ratio = lv_field / (1.0 + state["trace_f"])
    masked = np.where(collar_smooth, ratio, -np.inf)
    max_idx = np.unravel_index(int(np.argmax(masked)), grid.interior_shape)
    max_ratio = float(masked[max_idx])
    return BarrierReport(
        tau=tau,
        N=N,
        delta=float(delta),
        collar_nodes=count,
        smooth_nodes=smooth_count,
        min_v=min_v,
        min_v_node=tuple(int(i) for i in vmin_idx),
        max_lv_ratio=max_ratio,
        max_lv_node=tuple(int(i) + 1 for i in max_idx),
        epsilon=-max_ratio,
        degenerate_collar=degenerate,
    )


def _box_hessian_sups(u_values: np.ndarray, grid) -> tuple:
    hess = complex_hessian_field(ScalarField(grid, u_values))
    radius = np.abs(eigvals_batch(hess.values)).max(axis=-1)
    sup_all = float(radius.max())
    # boundary stand-in: first interior layer adjacent to a face
    idx = np.indices(grid.interior_shape)
    layer = np.zeros(grid.interior_shape, dtype=bool)
    for a in range(grid.ndim_real):
        layer |= idx[a] == 0
        layer |= idx[a] == grid.resolution - 3
    sup_boundary = float(radius[layer].max())
    return sup_all, sup_boundary


def _diagnostics(problem, ev, u, states, anchor_residual, config) -> SolveDiagnostics:
    final = states[-1]
    state = ev.analyze(u)
    if problem.geometry == "box":
        box = problem.box
        grid = box.grid
        K = 1.0 + gradient_sq_max(ScalarField(grid, u))
        ol = upper_barrier(box.chi, box.omega, ScalarField(grid, box.phi), grid)
        sandwich = sandwich_check(u, box.subsolution, ol.values)
        sup_h, sup_b = _box_hessian_sups(u, grid)
        upper_vals = ol.values
        barrier = None
        if config.compute_barrier:
            barrier = barrier_check(
                u, box.subsolution, problem,
                tau=config.barrier_tau, N=config.barrier_N, delta=config.barrier_delta,
            )
        # metric trace of g = sum of reduced eigenvalues
        trace_g = state["vals"].sum(axis=-1)
    else:
        rad = problem.radial
        K = 1.0 + radial_gradient_sq_max(u, rad.grid)
        upper_vals = radial_trace_equation_solution(
            rad.chi_scalar, problem.n, rad.boundary_value, rad.grid
        )
        sandwich = sandwich_check(u, rad.subsolution, upper_vals)
        interior_r, boundary_r = radial_hessian_spectral_radius(u, rad.grid)
        sup_h = float(max(interior_r.max(), boundary_r))
        sup_b = float(boundary_r)
        barrier = None
        trace_g = state["lam"].sum(axis=-1)

    amgm = (problem.p / problem.n) * trace_g - state["ft"]
    c0 = boundary_trace_check(u, problem)
    return SolveDiagnostics(
        K=float(K),
        F_trace=float(state["trace_f"].min()),
        sandwich_violation=float(sandwich),
        c0_boundary=float(c0),
        c2_ratio=float(sup_h / K),
        sup_hessian=sup_h,
        boundary_sup_hessian=sup_b,
        amgm_min_slack=float(amgm.min()),
        final_residual=final.residual_norm,
        anchor_residual=float(anchor_residual),
        barrier_report=barrier,
        states=[replace(s, residual_history=()) for s in states],
        upper_solution=upper_vals,
    )


def solution_node_fields(problem: ProblemSpec, u) -> tuple:
    """Per-node cone margins and normalized residual at t = 1.

    Returns interior-shaped arrays (margins, ftilde - psi_tilde) for CSV
    dumps and reports.
    """
    ev = _make_evaluator(problem, SolveConfig())
    uv = u.values if isinstance(u, ScalarField) else np.asarray(u, dtype=float)
    if problem.geometry == "box":
        vals = eigvals_batch(ev._g_reduced(uv))
        margins = margins_batch(vals, problem.params.p)
    else:
        rows = np.sort(ev._rows(uv), axis=-1)
        margins = margins_batch(rows, problem.params.p)
    state = ev.analyze(uv)
    residual = state["ft"] - ev.psi_tilde
    return margins, residual


@dataclass
class RefinementRow:
    label: str
    spacing: float
    sup_hessian: float
    boundary_sup_hessian: float
    K: float
    ratio_interior: float  # sup / (K + boundary sup)
    ratio_boundary: float  # boundary sup / K


def c2_ratio_monitor(levels) -> list:
    """Second-order ratio table across refinement levels.

    ``levels`` is a sequence of (problem, solution values) pairs of the same
    underlying problem at increasing resolution.  Returns RefinementRow
    entries; boundedness across rows is the monitored contract.
    """
    rows = []
    if len(levels) < 2:
        raise ValueError("need at least two refinement levels")
    for problem, u in levels:
        uv = u.values if isinstance(u, ScalarField) else np.asarray(u)
        if problem.geometry == "box":
            grid = problem.box.grid
            K = 1.0 + gradient_sq_max(ScalarField(grid, uv))
            sup_h, sup_b = _box_hessian_sups(uv, grid)
            spacing = max(grid.spacing)
            label = f"res {grid.resolution}"
        else:
            rad = problem.radial
            K = 1.0 + radial_gradient_sq_max(uv, rad.grid)
            interior_r, boundary_r = radial_hessian_spectral_radius(uv, rad.grid)
            sup_h = float(max(interior_r.max(), boundary_r))
            sup_b = float(boundary_r)
            spacing = rad.grid.spacing
            label = f"points {rad.grid.points}"
        rows.append(
            RefinementRow(
                label=label,
                spacing=float(spacing),
                sup_hessian=sup_h,
                boundary_sup_hessian=sup_b,
                K=float(K),
                ratio_interior=float(sup_h / (K + sup_b)),
                ratio_boundary=float(sup_b / K),
            )
        )
    return rows

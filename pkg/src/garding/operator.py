"""The subset-sum product operator, its concave normalization, and derivatives.

For an eigenvalue vector lam in R^n and 1 <= p <= n the operator is

    M(lam) = prod over all p-element subsets S of (sum_{i in S} lam_i),

with C(n, p) factors.  Its degree-one normalization

    ftilde(lam) = M(lam)^(1 / C(n, p))

is symmetric, positive and concave on the open cone where every subset sum
is positive, vanishes on the cone boundary, and has gradient

    f_k = (ftilde / C(n, p)) * sum_{S containing k} 1 / sigma_S,

where sigma_S is the subset sum.  Subsets are enumerated in lexicographic
order throughout (itertools.combinations order); this ordering is part of
the documented output contract of :func:`subset_sums`.

Batch variants operate on stacked rows of eigenvalues and back the
field-scale hot paths of the solver.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import NotArrowForm, OutsideCone
from .hermitian import HermitianMatrix, Spectrum, metric_endomorphism_system

SUM_FLOOR = 1e-300  # subset sums below this are treated as boundary values
CLUSTER_GAP_RTOL = 1e-8  # eigenvalue-cluster threshold for derivative averaging


@dataclass(frozen=True)
class OperatorParams:
    """Dimension n, exponent p and the derived subset bookkeeping."""

    n: int
    p: int
    subset_count: int = field(init=False)
    # (subset_count, n) 0/1 membership matrix, lex ordered rows.
    membership: np.ndarray = field(init=False, repr=False, compare=False)
    subsets: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.n, int) or not isinstance(self.p, int):
            raise ValueError("n and p must be integers")
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if not 1 <= self.p <= self.n:
            raise ValueError(f"p must satisfy 1 <= p <= n, got p={self.p}, n={self.n}")
        subsets = tuple(itertools.combinations(range(self.n), self.p))
        m = np.zeros((len(subsets), self.n))
        for row, s in enumerate(subsets):
            m[row, list(s)] = 1.0
        m.setflags(write=False)
        object.__setattr__(self, "subset_count", len(subsets))
        object.__setattr__(self, "membership", m)
        object.__setattr__(self, "subsets", subsets)
        assert self.subset_count == comb(self.n, self.p)


def _as_row(lam: Spectrum | np.ndarray) -> np.ndarray:
    if isinstance(lam, Spectrum):
        return lam.values
    return np.asarray(lam, dtype=np.float64)


def subset_sums(lam: Spectrum, params: OperatorParams) -> np.ndarray:
    """All p-subset sums of lam, in lexicographic subset order."""
    v = _as_row(lam)
    if v.shape[-1] != params.n:
        raise ValueError(f"length {v.shape[-1]} does not match n={params.n}")
    return params.membership @ v


def subset_sums_batch(lams: np.ndarray, params: OperatorParams) -> np.ndarray:
    """Rows of p-subset sums for stacked eigenvalue rows (N, n) -> (N, m)."""
    return lams @ params.membership.T


def eval_M(lam: Spectrum, params: OperatorParams) -> float:
    """The raw product of subset sums.

    Computed in log space when every factor is positive; by direct product
    otherwise (so a zero factor yields exactly 0).
    """
    sums = subset_sums(lam, params)
    if np.all(sums > 0.0):
        return float(np.exp(np.sum(np.log(sums))))
    return float(np.prod(sums))


def eval_ftilde(lam: Spectrum, params: OperatorParams) -> float:
    """The normalized operator M^(1/C(n,p)), via the mean of logs.

    Raises OutsideCone when a subset sum is <= 0; clamps to 0.0 below the
    representable floor (the cone boundary at double precision).
    """
    sums = subset_sums(lam, params)
    if np.any(sums <= 0.0):
        raise OutsideCone(f"minimum subset sum {sums.min():.6e} <= 0")
    if np.any(sums < SUM_FLOOR):
        return 0.0
    return float(np.exp(np.mean(np.log(sums))))


def grad_ftilde(lam: Spectrum, params: OperatorParams) -> np.ndarray:
    """Analytic gradient (f_1, ..., f_n) of ftilde at a strict cone point."""
    sums = subset_sums(lam, params)
    if np.any(sums < SUM_FLOOR):
        raise OutsideCone(
            f"minimum subset sum {sums.min():.6e} too close to the cone boundary "
            "for derivatives"
        )
    ft = np.exp(np.mean(np.log(sums)))
    return (ft / params.subset_count) * (params.membership.T @ (1.0 / sums))


def ftilde_batch(lams: np.ndarray, params: OperatorParams) -> np.ndarray:
    """ftilde over stacked eigenvalue rows; caller guarantees cone membership."""
    sums = subset_sums_batch(lams, params)
    if np.any(sums < SUM_FLOOR):
        bad = int(np.argmin(sums.min(axis=-1)))
        raise OutsideCone(f"row {bad}: subset sum {sums.min():.6e} at/below boundary")
    return np.exp(np.mean(np.log(sums), axis=-1))


def ftilde_grad_batch(lams: np.ndarray, params: OperatorParams):
    """(ftilde, gradient rows) over stacked eigenvalue rows inside the cone."""
    sums = subset_sums_batch(lams, params)
    if np.any(sums < SUM_FLOOR):
        bad = int(np.argmin(sums.min(axis=-1)))
        raise OutsideCone(f"row {bad}: subset sum {sums.min():.6e} at/below boundary")
    ft = np.exp(np.mean(np.log(sums), axis=-1))
    grads = (ft / params.subset_count)[..., None] * ((1.0 / sums) @ params.membership)
    return ft, grads


def _cluster_average(vals: np.ndarray, grads: np.ndarray) -> np.ndarray:
    """Average gradient entries over near-degenerate eigenvalue clusters.

    ``vals``/(N, n) ascending, ``grads``/(N, n).  First derivatives of
    symmetric spectral functions are continuous across multiplicities, so
    averaging within a cluster removes the eigenvector noise without
    changing the limit.
    """
    n = vals.shape[-1]
    scale = np.maximum(np.abs(vals).max(axis=-1, keepdims=True), 1e-300)
    boundary = np.diff(vals, axis=-1) > CLUSTER_GAP_RTOL * scale
    # cluster ids per row: 0-based, nondecreasing along the row
    ids = np.concatenate(
        [np.zeros(vals.shape[:-1] + (1,), dtype=np.int64), np.cumsum(boundary, axis=-1)],
        axis=-1,
    )
    onehot = ids[..., :, None] == np.arange(n)
    sums = np.einsum("...kc,...k->...c", onehot, grads)
    counts = np.maximum(onehot.sum(axis=-2), 1)
    means = sums / counts
    return np.take_along_axis(means, ids, axis=-1)


@dataclass(frozen=True)
class LinearizationCoeffs:
    """Ambient-frame coefficients of the linearized operator and their trace.

    ``matrix`` pairs with a Hermitian perturbation h as tr(matrix @ h); it is
    positive definite at interior cone points, and ``trace_F`` is the
    eigenvalue-space gradient sum, at least p for the normalized operator.
    """

    matrix: HermitianMatrix
    trace_F: float


def linearization_coeffs(
    omega: HermitianMatrix, g: HermitianMatrix, params: OperatorParams
) -> LinearizationCoeffs:
    """First derivative of ftilde(eigenvalues of omega^{-1} g) at g.

    Diagonal f_k in an eigenframe of the reduced endomorphism, transported
    back to the ambient frame through the congruence factors, so that for a
    Hermitian perturbation h

        d/dt ftilde(lam(omega^{-1}(g + t h))) = tr(matrix @ h).
    """
    spec, ell, vecs = metric_endomorphism_system(omega, g)
    grads = grad_ftilde(spec, params)  # raises OutsideCone off the cone
    grads = _cluster_average(spec.values[None, :], grads[None, :])[0]
    inner = (vecs * grads) @ vecs.conj().T
    ell_inv = np.linalg.inv(ell)
    ambient = ell_inv.conj().T @ inner @ ell_inv
    return LinearizationCoeffs(
        matrix=HermitianMatrix(ambient), trace_F=float(grads.sum())
    )


def linearization_batch(gmats: np.ndarray, params: OperatorParams, vals, vecs):
    """Field-scale linearization coefficients from precomputed eigen data.

    ``vals``/(N, n) ascending and ``vecs`` from the batched eigen routine of
    the (already congruence-reduced) matrices.  Returns (coeffs (N, n, n),
    trace_F (N,), ftilde (N,)).
    """
    ft, grads = ftilde_grad_batch(vals, params)
    grads = _cluster_average(vals, grads)
    coeffs = np.einsum("...ik,...k,...jk->...ij", vecs, grads, vecs.conj())
    return coeffs, grads.sum(axis=-1), ft


def arrow_form_value(g: HermitianMatrix, atol: float = 1e-12):
    """Expand the (n-1)-subset product of an arrow-form matrix.

    For g with diagonal leading (n-1) x (n-1) block the product form
    factorizes as

        lhs  = prod_i (tr g - g_ii)
        corr = sum_{i<n} |g_{n i}|^2 * prod_{b != i, b < n} (tr g - g_bb)

    and lhs - corr equals prod_i (tr g - lam_i(g)), the (n-1)-exponent
    operator value.  Raises NotArrowForm when an off-diagonal entry of the
    leading block exceeds ``atol``.
    """
    a = g.entries
    n = g.dim
    lead = a[: n - 1, : n - 1]
    off = lead - np.diag(np.diag(lead))
    worst = np.abs(off).max() if n > 2 else 0.0
    if n > 2 and worst > atol:
        raise NotArrowForm(f"leading-block off-diagonal entry {worst:.3e} > {atol:.1e}")
    tr = np.trace(a).real
    diag = np.diag(a).real
    factors = tr - diag
    lhs = float(np.prod(factors))
    correction = 0.0
    for i in range(n - 1):
        others = [b for b in range(n - 1) if b != i]
        correction += abs(a[n - 1, i]) ** 2 * float(np.prod(factors[others]))
    return lhs, float(correction)


@dataclass
class StructureViolation:
    prop: str
    witness: np.ndarray
    detail: str


@dataclass
class StructureReport:
    n: int
    p: int
    trials: int
    seed: int
    checks: dict
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def sample_cone_points(
    rng: np.random.Generator,
    params: OperatorParams,
    count: int,
    margin_low: float = 0.01,
    margin_high: float = 2.0,
) -> np.ndarray:
    """Random eigenvalue rows strictly inside the cone.

    Draws Gaussian rows and shifts each along (1,...,1) so the minimum
    p-subset sum (the cone margin) lands uniformly in [margin_low,
    margin_high]; a shift by t moves the margin by exactly p*t.
    """
    lams = rng.standard_normal((count, params.n))
    margins = np.sort(lams, axis=-1)[:, : params.p].sum(axis=-1)
    target = rng.uniform(margin_low, margin_high, size=count)
    lams += ((target - margins) / params.p)[:, None]
    return lams


def structure_check(params: OperatorParams, trials: int, seed: int) -> StructureReport:
    """Randomized audit of the five structural properties of ftilde.

    Positivity inside the cone with boundary vanishing along rays, gradient
    positivity, midpoint concavity, degree-one homogeneity, and the gradient
    sum lower bound ftilde(1,...,1) = p.  Violations are returned with their
    witness points; an empty list means every trial passed.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    violations: list[StructureViolation] = []
    checks: dict[str, int] = {}

    def record(prop, mask, lams, details):
        checks[prop] = checks.get(prop, 0) + int(mask.size if mask.ndim else 1)
        bad = np.nonzero(mask)[0]
        for idx in bad[:8]:  # cap stored witnesses per property
            violations.append(StructureViolation(prop, lams[idx].copy(), details(idx)))

    # (f1) positivity strictly inside
    lams = sample_cone_points(rng, params, trials)
    ft = ftilde_batch(lams, params)
    record("f1_positive", ft <= 0.0, lams, lambda i: f"ftilde={ft[i]:.3e}")

    # (f1) vanishing toward the boundary along rays, tail-monitored at
    # t = 1 - 2^-k.  The factor carrying the minimum subset sum scales like
    # (1 - t), so the tail ratio over ten dyadic steps is at most
    # 2^(-10 / C(n, p)); 0.95 leaves generous slack.
    rays = min(trials, 32)
    inside = sample_cone_points(rng, params, rays, margin_low=0.5, margin_high=1.5)
    boundary = sample_cone_points(rng, params, rays)
    bmargins = np.sort(boundary, axis=-1)[:, : params.p].sum(axis=-1)
    boundary -= (bmargins / params.p)[:, None]  # exact margin 0
    checks["f1_boundary_rays"] = rays
    ks = np.arange(30, 41)
    for ridx in range(rays):
        ts = 1.0 - 0.5**ks
        pts = (1.0 - ts)[:, None] * inside[ridx] + ts[:, None] * boundary[ridx]
        vals = ftilde_batch(pts, params)
        tail_ok = np.all(np.diff(vals) < 0.0) and vals[-1] <= 0.95 * vals[0]
        if not tail_ok:
            violations.append(
                StructureViolation(
                    "f1_boundary",
                    inside[ridx].copy(),
                    f"tail values {vals[0]:.3e} -> {vals[-1]:.3e} not vanishing",
                )
            )

    # (f2) gradient positivity
    lams = sample_cone_points(rng, params, trials)
    _, grads = ftilde_grad_batch(lams, params)
    record(
        "f2_gradient_positive",
        np.any(grads <= 0.0, axis=-1),
        lams,
        lambda i: f"min f_k = {grads[i].min():.3e}",
    )

    # (f3) midpoint concavity with additive slack
    a = sample_cone_points(rng, params, trials)
    b = sample_cone_points(rng, params, trials)
    fa = ftilde_batch(a, params)
    fb = ftilde_batch(b, params)
    fmid = ftilde_batch((a + b) / 2.0, params)
    gap = fmid - (fa + fb) / 2.0
    record("f3_concavity", gap < -1e-12, a, lambda i: f"midpoint deficit {gap[i]:.3e}")

    # (f4) homogeneity of degree one, relative tolerance
    lams = sample_cone_points(rng, params, trials)
    ts = rng.uniform(0.1, 10.0, size=trials)
    f0 = ftilde_batch(lams, params)
    f1 = ftilde_batch(ts[:, None] * lams, params)
    rel = np.abs(f1 - ts * f0) / np.maximum(np.abs(ts * f0), 1e-30)
    record("f4_homogeneity", rel > 1e-12, lams, lambda i: f"rel err {rel[i]:.3e}")

    # (f5) gradient sum >= ftilde(1,...,1) = p
    lams = sample_cone_points(rng, params, trials)
    _, grads = ftilde_grad_batch(lams, params)
    total = grads.sum(axis=-1)
    record(
        "f5_trace_lower_bound",
        total < params.p - 1e-10,
        lams,
        lambda i: f"sum f_k = {total[i]:.12e} < p = {params.p}",
    )

    # consistency anchor for the normalization: ftilde at the all-ones point
    ones = np.ones(params.n)
    f_ones = float(ftilde_batch(ones[None, :], params)[0])
    if abs(f_ones - params.p) > 1e-12 * params.p:
        violations.append(
            StructureViolation("normalization", ones, f"ftilde(1,..,1) = {f_ones!r}")
        )
    checks["normalization"] = 1

    return StructureReport(
        n=params.n, p=params.p, trials=trials, seed=seed, checks=checks, violations=violations
    )

"""Monte Carlo estimators for the surface and bulk limit objects.

Estimates the normalized surface-state density, the surface functional and
its sign decomposition, the integrated density of states, and two
diagnostics: a Hoelder modulus table and a uniform-boundedness monitor for
the normalized shift functions.  Every estimator is a deterministic function
of (inputs, master seed): realizations are independent tasks keyed by index,
and statistics are reduced over the index-ordered stack, so output is
bitwise identical for any worker count.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .model import (
    DisorderSpec,
    LatticeBox,
    SurfaceGeometry,
    box_laplacian_bands,
    build_box_laplacian,
    sample_bulk_potential,
    split_potential,
)
from .parallel import run_indexed_tasks
from .spectral import (
    StepFunction,
    banded_eigenvalues,
    ssf_from_eigenvalues,
    step_abs_power_integral,
    step_integrate,
)

__all__ = [
    "LambdaGrid",
    "default_grid",
    "EnsembleResult",
    "FunctionalEstimate",
    "HolderRow",
    "HolderReport",
    "MonitorRow",
    "estimate_surface_density",
    "estimate_surface_functional",
    "estimate_bulk_ids",
    "holder_modulus",
    "weak_limit_monitor",
    "bump_function",
]


@dataclass(frozen=True)
class LambdaGrid:
    """Uniform evaluation grid of n points on [a, b]."""

    a: float
    b: float
    n: int

    def __post_init__(self) -> None:
        if not self.a < self.b:
            raise ValueError(f"grid needs a < b, got [{self.a}, {self.b}]")
        if self.n < 2:
            raise ValueError(f"grid needs n >= 2 points, got {self.n}")

    @cached_property
    def points(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.n)

    @property
    def step(self) -> float:
        return (self.b - self.a) / (self.n - 1)


def default_grid(nu: int, disorder: DisorderSpec, n: int = 513) -> LambdaGrid:
    """513 points over [-2 nu + min coupling - 1/2, 2 nu + max coupling + 1/2].

    Covers every possible spectrum of h0 + V with half a unit of margin; the
    odd count puts a grid point at the window midpoint.
    """
    lo, hi = disorder.support
    return LambdaGrid(-2.0 * nu + lo - 0.5, 2.0 * nu + hi + 0.5, n)


@dataclass(frozen=True)
class EnsembleResult:
    """Per-grid-point mean and variance over realizations, plus run metadata."""

    grid: LambdaGrid
    mean: np.ndarray
    variance: np.ndarray
    realizations: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        mean = np.asarray(self.mean, dtype=float)
        var = np.asarray(self.variance, dtype=float)
        if mean.shape != (self.grid.n,) or var.shape != (self.grid.n,):
            raise ValueError("mean and variance must match the grid length")
        if not np.all(np.isfinite(mean)):
            raise ValueError("mean must be finite at every grid point")
        if np.any(var < 0.0):
            raise ValueError("variance must be nonnegative")
        if self.realizations < 1:
            raise ValueError("need at least one realization")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "variance", var)


def _box_solver(box: LatticeBox):
    """(free eigenvalues, diag -> perturbed eigenvalues) for one box.

    Dirichlet boxes go through the banded solver (a diagonal potential only
    touches band row 0); periodic boxes fall back to dense eigvalsh.
    """
    band = box_laplacian_bands(box)
    if band is not None:
        def solve(diag: np.ndarray) -> np.ndarray:
            pert = band.copy()
            pert[0] += diag
            return banded_eigenvalues(pert)

        return banded_eigenvalues(band), solve
    dense = build_box_laplacian(box).entries

    def solve(diag: np.ndarray) -> np.ndarray:
        return np.linalg.eigvalsh(dense + np.diag(diag))

    return np.linalg.eigvalsh(dense), solve


def _column_stats(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = np.mean(rows, axis=0)
    if rows.shape[0] < 2:
        return mean, np.zeros(rows.shape[1])
    return mean, np.var(rows, axis=0, ddof=1)


def _function_support(f: StepFunction) -> tuple[float, float] | None:
    """Closed hull of {f != 0}, or None for the zero function."""
    live = np.nonzero(f.values)[0]
    if live.size == 0:
        return None
    return float(f.breakpoints[live[0] - 1]), float(f.breakpoints[live[-1]])


def _disorder_meta(disorder: DisorderSpec) -> dict:
    return {"disorder_kind": disorder.kind, "disorder_params": disorder.params}


def estimate_surface_density(
    geometry: SurfaceGeometry,
    disorder: DisorderSpec,
    grid: LambdaGrid,
    realizations: int,
    master_seed: int,
    workers: int = 1,
) -> EnsembleResult:
    """Mean and variance of the normalized surface shift function on the grid.

    Per realization the statistic is shift(.; h0 + V, h0) / L^nu1 evaluated
    by exact eigenvalue counting at the grid points.  The sup of each
    realization's unnormalized shift function is recorded in the metadata;
    the finite-rank bound makes it at most the number of window sites, so
    the normalized sup never exceeds 1.  ``edge_warning`` is set when the
    union of the shift supports comes within one grid step of the window
    edge (the grid is then truncating visible mass).
    """
    if realizations < 1:
        raise ValueError("need at least one realization")
    w0, solve = _box_solver(geometry.box)
    points = grid.points
    n0 = np.searchsorted(w0, points, side="right")
    norm = float(geometry.window_site_count)

    def one(r: int):
        pot = geometry.sample_window_potential(disorder, master_seed, r)
        wr = solve(pot.diag_vector())
        xi = ssf_from_eigenvalues(w0, wr)
        row = (n0 - np.searchsorted(wr, points, side="right")) / norm
        return row, int(xi.max_abs()), _function_support(xi)

    results = run_indexed_tasks(realizations, one, workers)
    rows = np.vstack([row for row, _, _ in results])
    mean, variance = _column_stats(rows)
    sup_abs = [s for _, s, _ in results]
    supports = [sp for _, _, sp in results if sp is not None]
    edge_warning = bool(supports) and (
        min(lo for lo, _ in supports) < grid.a + grid.step
        or max(hi for _, hi in supports) > grid.b - grid.step
    )
    meta = {
        "kind": "surface-density",
        "L": geometry.L,
        "W": geometry.W,
        "P": geometry.P,
        "boundary": geometry.boundary,
        "master_seed": master_seed,
        "normalization": norm,
        "n_sites": geometry.box.n_sites,
        "sup_abs": tuple(sup_abs),
        "sup_abs_max": max(sup_abs),
        "sup_normalized_max": max(sup_abs) / norm,
        "edge_warning": edge_warning,
        **_disorder_meta(disorder),
    }
    return EnsembleResult(grid, mean, variance, realizations, meta)


def estimate_bulk_ids(
    box: LatticeBox,
    disorder: DisorderSpec,
    grid: LambdaGrid,
    realizations: int,
    master_seed: int,
    workers: int = 1,
) -> EnsembleResult:
    """Finite-volume integrated density of states on the grid.

    Per realization: (number of eigenvalues of h0 + V that are <= lambda)
    divided by the site count, so every row is nondecreasing with values in
    [0, 1] by construction.
    """
    if realizations < 1:
        raise ValueError("need at least one realization")
    _, solve = _box_solver(box)
    points = grid.points
    n_sites = box.n_sites

    def one(r: int) -> np.ndarray:
        pot = sample_bulk_potential(box, disorder, master_seed, r)
        wr = solve(pot.diag_vector())
        return np.searchsorted(wr, points, side="right") / n_sites

    rows = np.vstack(run_indexed_tasks(realizations, one, workers))
    mean, variance = _column_stats(rows)
    meta = {
        "kind": "bulk-ids",
        "L": box.shape[0],
        "boundary": box.boundary,
        "master_seed": master_seed,
        "n_sites": n_sites,
        **_disorder_meta(disorder),
    }
    return EnsembleResult(grid, mean, variance, realizations, meta)


def bump_function(center: float, width: float):
    """Smooth bump supported on [center - width, center + width], peak 1."""
    if width <= 0:
        raise ValueError("bump width must be positive")

    def g(x):
        x = np.asarray(x, dtype=float)
        t = (x - center) / width
        out = np.zeros_like(t)
        inside = np.abs(t) < 1.0
        ti = t[inside]
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - ti * ti))
        return out

    return g


@dataclass(frozen=True)
class FunctionalEstimate:
    """Surface functional at one window size, with its sign decomposition.

    mu averages (1/L^nu1) integral of g d(shift); mu_plus and mu_minus come
    from the chain-rule split along V = V+ + V- and satisfy
    mu = mu_plus + mu_minus up to quadrature roundoff (split_gap records the
    worst per-realization defect).
    """

    L: int
    mu: float
    mu_plus: float
    mu_minus: float
    stderr: float
    realizations: int
    split_gap: float


def estimate_surface_functional(
    geometries,
    disorder: DisorderSpec,
    g,
    realizations: int,
    master_seed: int,
    workers: int = 1,
) -> list[FunctionalEstimate]:
    """Surface functional estimates across a family of window sizes.

    For g >= 0 the plus part is nonnegative and the minus part nonpositive
    for every single realization: the split shift functions have constant
    sign pointwise and the quadrature weights are positive.
    """
    if realizations < 1:
        raise ValueError("need at least one realization")
    out = []
    for geom in geometries:
        w0, solve = _box_solver(geom.box)
        norm = float(geom.window_site_count)

        def one(r: int, geom=geom, w0=w0, solve=solve, norm=norm):
            pot = geom.sample_window_potential(disorder, master_seed, r)
            plus, _ = split_potential(pot)
            wp = solve(plus.diag_vector())
            wv = solve(pot.diag_vector())
            mu = step_integrate(ssf_from_eigenvalues(w0, wv), g) / norm
            mu_plus = step_integrate(ssf_from_eigenvalues(w0, wp), g) / norm
            mu_minus = step_integrate(ssf_from_eigenvalues(wp, wv), g) / norm
            return mu, mu_plus, mu_minus

        triples = np.asarray(run_indexed_tasks(realizations, one, workers))
        mu_vals, plus_vals, minus_vals = triples[:, 0], triples[:, 1], triples[:, 2]
        stderr = (
            float(np.std(mu_vals, ddof=1) / np.sqrt(realizations))
            if realizations > 1
            else 0.0
        )
        out.append(
            FunctionalEstimate(
                L=geom.L,
                mu=float(np.mean(mu_vals)),
                mu_plus=float(np.mean(plus_vals)),
                mu_minus=float(np.mean(minus_vals)),
                stderr=stderr,
                realizations=realizations,
                split_gap=float(np.max(np.abs(mu_vals - plus_vals - minus_vals))),
            )
        )
    return out


@dataclass(frozen=True)
class HolderRow:
    steps: int
    width: float
    max_ratio: float
    avg_ratio: float


@dataclass(frozen=True)
class HolderReport:
    theta: float
    sup_ratio: float
    argmax_window: tuple[float, float]
    table: tuple[HolderRow, ...]


def holder_modulus(
    result: EnsembleResult, theta: float, step_multiples=(16, 8, 4, 2, 1)
) -> HolderReport:
    """Hoelder-modulus diagnostic (mean_j - mean_i) / (lambda_j - lambda_i)^theta.

    The sup ranges over every pair of grid points; the table restricts to
    windows of the given widths (in grid steps) and reports the max and the
    window-averaged ratio per width, to expose blow-up as the width shrinks.
    The mean must be nondecreasing (it estimates a distribution function);
    a decreasing mean signals an estimator bug and is rejected.
    """
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")
    mean = result.mean
    slack = 1e-12 * (1.0 + float(np.max(np.abs(mean))))
    if np.any(np.diff(mean) < -slack):
        raise ValueError("result mean is not monotone nondecreasing")
    points = result.grid.points
    step = result.grid.step
    n = mean.size

    sup_ratio = 0.0
    argmax = (float(points[0]), float(points[0]))
    for d in range(1, n):
        ratios = (mean[d:] - mean[:-d]) / (d * step) ** theta
        i = int(np.argmax(ratios))
        if ratios[i] > sup_ratio:
            sup_ratio = float(ratios[i])
            argmax = (float(points[i]), float(points[i + d]))

    rows = []
    for steps in step_multiples:
        if not 1 <= steps < n:
            raise ValueError(f"window of {steps} grid steps does not fit the grid")
        ratios = (mean[steps:] - mean[:-steps]) / (steps * step) ** theta
        rows.append(
            HolderRow(
                steps=int(steps),
                width=steps * step,
                max_ratio=float(np.max(ratios)),
                avg_ratio=float(np.mean(ratios)),
            )
        )
    return HolderReport(float(theta), sup_ratio, argmax, tuple(rows))


@dataclass(frozen=True)
class MonitorRow:
    L: int
    mean: float
    max: float


def weak_limit_monitor(
    geometries,
    disorder: DisorderSpec,
    p: float,
    interval: tuple[float, float],
    realizations: int,
    master_seed: int,
    workers: int = 1,
) -> list[MonitorRow]:
    """Uniform-boundedness monitor: integral of |shift / L^nu1|^(1/p) per L.

    The integrals are exact step-function integrals over the interval; a
    weakly convergent family keeps them bounded in L, so the per-L mean and
    max should stay within a constant factor of the smallest window's value.
    """
    if not p > 1.0:
        raise ValueError(f"monitor exponent p must exceed 1, got {p}")
    rows = []
    for geom in geometries:
        w0, solve = _box_solver(geom.box)
        norm = float(geom.window_site_count)

        def one(r: int, geom=geom, w0=w0, solve=solve, norm=norm) -> float:
            pot = geom.sample_window_potential(disorder, master_seed, r)
            xi = ssf_from_eigenvalues(w0, solve(pot.diag_vector()))
            return step_abs_power_integral(xi.scale(1.0 / norm), 1.0 / p, interval)

        vals = np.asarray(run_indexed_tasks(realizations, one, workers))
        rows.append(MonitorRow(geom.L, float(np.mean(vals)), float(np.max(vals))))
    return rows

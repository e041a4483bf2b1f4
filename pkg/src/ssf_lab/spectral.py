"""Exact spectral computations: eigensolves, step functions, shift functions.

The spectral shift function of a finite symmetric pair (A, B) is the
difference of eigenvalue counting functions and therefore an integer-valued
step function; everything here manipulates it exactly (breakpoints and
values), with quadrature entering only when a smooth test function is
integrated against it.

Orientation convention used throughout:

    shift(lambda; B, A) = N_A(lambda) - N_B(lambda),

where N_X(lambda) counts eigenvalues of X that are <= lambda.  With this sign
a nonnegative perturbation C = B - A >= 0 gives a nonnegative shift.  Step
functions are right-continuous: the value v_i rules [b_i, b_{i+1}).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.special import roots_legendre

from .model import LatticeBox, SymmetricOperator

__all__ = [
    "MarginError",
    "Spectrum",
    "StepFunction",
    "eigen_decompose",
    "banded_eigenvalues",
    "counting_function",
    "spectral_shift",
    "ssf_from_eigenvalues",
    "step_lp_norm",
    "step_abs_power_integral",
    "step_integrate",
    "step_sup_gap",
    "singular_values",
    "schatten_quasi_norm",
    "rank",
    "resolvent_power",
]


class MarginError(ValueError):
    """A spectral margin precondition failed (e.g. resolvent shift inside spectrum)."""


MERGE_TOL = 1e-12  # relative breakpoint merge tolerance for shift functions

# Fixed order-16 Gauss-Legendre rule: exact for polynomials of degree <= 31 on
# each panel; panels are capped at _MAX_PANEL so smooth integrands resolve to
# ~1e-12 relative accuracy.
_GL_NODES, _GL_WEIGHTS = roots_legendre(16)
_MAX_PANEL = 0.5


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in ascending order, optionally with orthonormal columns."""

    eigenvalues: np.ndarray
    vectors: np.ndarray | None = None

    def __post_init__(self) -> None:
        w = np.asarray(self.eigenvalues, dtype=float)
        if w.ndim != 1 or not np.all(np.isfinite(w)):
            raise ValueError("eigenvalues must be a finite 1-d array")
        if np.any(np.diff(w) < 0):
            raise ValueError("eigenvalues must be ascending")
        object.__setattr__(self, "eigenvalues", w)

    @property
    def dim(self) -> int:
        return self.eigenvalues.size


def eigen_decompose(
    op: SymmetricOperator, vectors: bool = True, verify: bool = True
) -> Spectrum:
    """Full spectral decomposition of a dense symmetric operator.

    With vectors, the result is verified against the contract
    max|Q^T Q - I| <= 1e-10 and max|S - Q diag(w) Q^T| <= 1e-8 (1 + max|S|);
    a violation raises RuntimeError (it indicates a broken eigensolver, not a
    bad input).
    """
    m = op.entries
    if not vectors:
        return Spectrum(np.linalg.eigvalsh(m))
    w, q = np.linalg.eigh(m)
    if verify:
        dim = m.shape[0]
        ortho = np.max(np.abs(q.T @ q - np.eye(dim)), initial=0.0)
        if ortho > 1e-10:
            raise RuntimeError(f"eigenvector orthonormality defect {ortho:.3e} > 1e-10")
        scale = 1.0 + np.max(np.abs(m), initial=0.0)
        resid = np.max(np.abs(m - (q * w) @ q.T), initial=0.0)
        if resid > 1e-8 * scale:
            raise RuntimeError(
                f"eigendecomposition residual {resid:.3e} > 1e-8 * (1 + max|S|)"
            )
    return Spectrum(w, q)


def banded_eigenvalues(band: np.ndarray) -> np.ndarray:
    """Eigenvalues of a symmetric matrix in LAPACK lower banded storage.

    band[o, j] = M[j+o, j].  Deterministic LAPACK path used as the fast lane
    for Dirichlet box operators (diagonal perturbations only touch band[0]).
    """
    if band.shape[1] == 1:
        return np.asarray([band[0, 0]], dtype=float)
    return scipy.linalg.eig_banded(
        band, lower=True, eigvals_only=True, check_finite=False
    )


def counting_function(spectrum, lam: float) -> int:
    """Number of eigenvalues <= lam (closed at lam)."""
    eigs = spectrum.eigenvalues if isinstance(spectrum, Spectrum) else np.asarray(spectrum)
    return int(np.searchsorted(eigs, lam, side="right"))


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous step function: values[i] rules [b_i, b_{i+1}).

    values has one more entry than breakpoints; values[0] rules
    (-inf, b_1) and values[-1] rules [b_m, inf).  ``degenerate_merges``
    counts breakpoint clusters that swallowed more than one spectral point
    during construction (shared or near-shared eigenvalues).
    """

    breakpoints: np.ndarray
    values: np.ndarray
    degenerate_merges: int = 0

    def __post_init__(self) -> None:
        b = np.asarray(self.breakpoints, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if b.ndim != 1 or v.ndim != 1 or v.size != b.size + 1:
            raise ValueError("need ascending breakpoints and len(values) == len(breakpoints) + 1")
        if not (np.all(np.isfinite(b)) and np.all(np.isfinite(v))):
            raise ValueError("breakpoints and values must be finite")
        if b.size > 1 and np.any(np.diff(b) <= 0):
            raise ValueError("breakpoints must be strictly ascending")
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "values", v)

    def __call__(self, x):
        idx = np.searchsorted(self.breakpoints, x, side="right")
        out = self.values[idx]
        return float(out) if np.isscalar(x) else out

    def __neg__(self) -> "StepFunction":
        return StepFunction(self.breakpoints, -self.values, self.degenerate_merges)

    def scale(self, c: float) -> "StepFunction":
        return StepFunction(self.breakpoints, c * self.values, self.degenerate_merges)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    @property
    def compactly_supported(self) -> bool:
        return self.values[0] == 0.0 and self.values[-1] == 0.0


def ssf_from_eigenvalues(eigs_a, eigs_b, merge_tol: float = MERGE_TOL) -> StepFunction:
    """Shift function N_a - N_b from two equal-length eigenvalue lists.

    Breakpoints are the merged spectra: spectral points closer than
    merge_tol * scale (scale = max(1, spectral radius)) collapse into one
    breakpoint at the cluster mean, their +1/-1 jumps cancelling
    arithmetically.  Values are exact integers (stored as floats), zero
    before the first and after the last breakpoint.
    """
    ea = np.sort(np.asarray(eigs_a, dtype=float))
    eb = np.sort(np.asarray(eigs_b, dtype=float))
    if ea.size != eb.size:
        raise ValueError(f"spectra must have equal length, got {ea.size} and {eb.size}")
    if ea.size == 0:
        return StepFunction(np.empty(0), np.zeros(1))
    points = np.concatenate([ea, eb])
    jumps = np.concatenate([np.ones(ea.size), -np.ones(eb.size)])
    order = np.argsort(points, kind="stable")
    points, jumps = points[order], jumps[order]

    scale = max(1.0, abs(points[0]), abs(points[-1]))
    fresh = np.empty(points.size, dtype=bool)
    fresh[0] = True
    fresh[1:] = np.diff(points) > merge_tol * scale
    cluster = np.cumsum(fresh) - 1
    counts = np.bincount(cluster)
    breaks = np.bincount(cluster, weights=points) / counts
    net = np.bincount(cluster, weights=jumps)
    values = np.concatenate([[0.0], np.cumsum(net)])
    return StepFunction(breaks, values, degenerate_merges=int(np.sum(counts > 1)))


def spectral_shift(
    a: SymmetricOperator, b: SymmetricOperator, merge_tol: float = MERGE_TOL
) -> StepFunction:
    """Spectral shift function shift(.; b, a) = N_a - N_b of a symmetric pair.

    Positive where b's spectrum has been pushed up relative to a's; in
    particular b = a + C with C >= 0 gives a nonnegative shift, and
    sup |shift| <= rank(b - a).  The integral over the line equals
    tr(b) - tr(a).
    """
    if a.dim != b.dim:
        raise ValueError("operators must act on the same space")
    return ssf_from_eigenvalues(
        np.linalg.eigvalsh(a.entries), np.linalg.eigvalsh(b.entries), merge_tol
    )


def _clipped_pieces(f: StepFunction, interval):
    """(values, los, his) of positive-length pieces, clipped to interval.

    Without an interval, f must vanish at both ends (compact support) and the
    interior pieces are returned.  With interval (a, b), the unbounded end
    pieces contribute their clipped parts.
    """
    b, v = f.breakpoints, f.values
    if interval is None:
        if b.size == 0:
            if v[0] != 0.0:
                raise ValueError("step function has no compact support and no interval given")
            return np.empty(0), np.empty(0), np.empty(0)
        if not f.compactly_supported:
            raise ValueError("step function has no compact support and no interval given")
        return v[1:-1], b[:-1], b[1:]
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise ValueError(f"empty interval [{lo}, {hi})")
    edges = np.concatenate([[lo], np.clip(b, lo, hi), [hi]])
    los, his = edges[:-1], edges[1:]
    keep = his > los
    return v[keep], los[keep], his[keep]


def step_abs_power_integral(f: StepFunction, q: float, interval=None) -> float:
    """Exact integral of |f|^q over the interval (or the whole line)."""
    if not q > 0:
        raise ValueError(f"power must be positive, got {q}")
    vals, los, his = _clipped_pieces(f, interval)
    if vals.size == 0:
        return 0.0
    return float(np.dot(np.abs(vals) ** q, his - los))


def step_lp_norm(f: StepFunction, q: float, interval=None) -> float:
    """L^q norm (quasi-norm for q < 1) of a step function, exactly.

    q = inf takes the sup of |f| over pieces meeting the interval; the whole
    line without an interval requires compact support for finite q.
    """
    if q == math.inf:
        if interval is None:
            return f.max_abs()
        vals, _, _ = _clipped_pieces(f, interval)
        return float(np.max(np.abs(vals))) if vals.size else 0.0
    return step_abs_power_integral(f, q, interval) ** (1.0 / q)


def step_integrate(f: StepFunction, g=None, interval=None, max_panel: float = _MAX_PANEL) -> float:
    """Integral of f (times a smooth g) over the interval or the whole line.

    With g = None the piece lengths give the exact integral.  Otherwise g must
    accept numpy arrays; each piece is covered by Gauss-Legendre panels of
    order 16 and width <= max_panel, so polynomial g of degree <= 31
    integrates exactly and smooth g to ~1e-12 relative accuracy.
    """
    vals, los, his = _clipped_pieces(f, interval)
    live = vals != 0.0
    vals, los, his = vals[live], los[live], his[live]
    if vals.size == 0:
        return 0.0
    if g is None:
        return float(np.dot(vals, his - los))
    widths = his - los
    npanels = np.maximum(1, np.ceil(widths / max_panel).astype(int))
    piece_of_panel = np.repeat(np.arange(vals.size), npanels)
    step = widths / npanels
    offset = np.concatenate([np.arange(k) for k in npanels]).astype(float)
    panel_lo = los[piece_of_panel] + offset * step[piece_of_panel]
    half = 0.5 * step[piece_of_panel]
    mid = panel_lo + half
    nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    gv = np.asarray(g(nodes.ravel()), dtype=float).reshape(nodes.shape)
    panel_ints = (gv @ _GL_WEIGHTS) * half
    piece_ints = np.bincount(piece_of_panel, weights=panel_ints, minlength=vals.size)
    return float(np.dot(vals, piece_ints))


def step_sup_gap(f: StepFunction, g: StepFunction, min_width: float = 0.0):
    """Sup of |f - g| probed at piece midpoints of the merged breakpoint set.

    Pieces narrower than min_width are skipped (near-coincident breakpoints
    from independent merges make their interiors ambiguous); the number
    skipped is returned alongside so callers can flag degeneracy.  Probes one
    point beyond each end for the unbounded pieces.
    """
    pts = np.union1d(f.breakpoints, g.breakpoints)
    if pts.size == 0:
        return abs(float(f.values[0]) - float(g.values[0])), 0
    widths = np.diff(pts)
    keep = widths > min_width
    mids = ((pts[:-1] + pts[1:]) / 2.0)[keep]
    probes = np.concatenate([[pts[0] - 1.0], mids, [pts[-1] + 1.0]])
    gap = float(np.max(np.abs(f(probes) - g(probes))))
    return gap, int(np.sum(~keep))


def singular_values(t) -> np.ndarray:
    """Singular values in descending order."""
    m = t.entries if isinstance(t, SymmetricOperator) else np.asarray(t, dtype=float)
    return np.linalg.svd(m, compute_uv=False)


def schatten_quasi_norm(t, p: float) -> float:
    """Schatten (quasi-)norm |t|_p = (sum s_j^p)^(1/p); p = inf gives s_1.

    Valid for all p in (0, inf]; for p < 1 this is a quasi-norm.  The powered
    singular values are summed in descending order.
    """
    s = singular_values(t)
    if s.size == 0:
        return 0.0
    if p == math.inf:
        return float(s[0])
    if not p > 0:
        raise ValueError(f"Schatten exponent must be positive, got {p}")
    return float(np.sum(s**p) ** (1.0 / p))


def rank(t, tol: float = 1e-10) -> int:
    """Numerical rank: singular values above tol * s_1."""
    s = singular_values(t)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def resolvent_power(op: SymmetricOperator, c: float, k: int) -> SymmetricOperator:
    """(op + c)^(-k) via eigendecomposition; requires c > -lambda_min strictly.

    Raises MarginError with the margin diagnostic when c fails to clear the
    spectrum.  The result's spectrum lies in (0, (lambda_min + c)^(-k)].
    """
    if not (isinstance(k, int) and k >= 1):
        raise ValueError(f"power k must be a positive integer, got {k}")
    spec = eigen_decompose(op, vectors=True)
    lam_min = float(spec.eigenvalues[0])
    margin = lam_min + c
    if margin <= 0.0:
        raise MarginError(
            f"shift c = {c} does not clear the spectrum: lambda_min = {lam_min}, "
            f"margin lambda_min + c = {margin} <= 0"
        )
    w = (spec.eigenvalues + c) ** (-float(k))
    m = (spec.vectors * w) @ spec.vectors.T
    return SymmetricOperator.from_matrix(m, box=op.box)

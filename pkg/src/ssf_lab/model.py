"""Finite lattice boxes, free hopping Hamiltonians, and random diagonal potentials.

Sites live in Z^nu split as Z^nu1 x Z^nu2: the first ``nu1`` coordinates are
"longitudinal" (the disorder window grows along them), the trailing
``nu2 = nu - nu1`` are "transverse".  Surface potentials couple only to sites
on the hyperplane where all transverse coordinates vanish; bulk potentials
couple to every site.

All randomness is derived from 64-bit integer seeds, one per (master seed,
realization, site) triple, so a sampled potential never depends on worker
scheduling, on how many other sites were sampled, or on float state.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterator

import numpy as np

__all__ = [
    "DIRICHLET",
    "PERIODIC",
    "LatticeBox",
    "SymmetricOperator",
    "DisorderSpec",
    "DiagonalPotential",
    "SurfaceGeometry",
    "build_box_laplacian",
    "box_laplacian_bands",
    "bulk_box",
    "sample_surface_potential",
    "sample_bulk_potential",
    "split_potential",
    "add_potential",
    "derive_seed",
]

DIRICHLET = "dirichlet"
PERIODIC = "periodic"

Site = tuple[int, ...]

_MASK64 = (1 << 64) - 1


def _splitmix64(z: int) -> int:
    """One round of the splitmix64 finalizer (avalanche-quality 64-bit mix)."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, *words: int) -> int:
    """Mix a master seed with integer indices into one 64-bit seed.

    Chains splitmix64 rounds: ``z = mix(master); z = mix(z ^ word)`` for each
    word.  Used with (realization, site rank) for coupling draws and with
    (family, instance) for randomized sweeps; the triple fully determines the
    draw, independent of evaluation order.
    """
    z = _splitmix64(master_seed & _MASK64)
    for w in words:
        z = _splitmix64(z ^ (w & _MASK64))
    return z


def _uniform53(seed: int) -> float:
    """Uniform double in [0, 1) from the top 53 bits of a mixed seed."""
    return (seed >> 11) * 2.0**-53


@dataclass(frozen=True)
class LatticeBox:
    """A finite box of sites in Z^nu with half-open integer extents.

    Parameters
    ----------
    nu : total space dimension (>= 1).
    nu1 : number of leading longitudinal directions (0 <= nu1 <= nu).
    extents : per-dimension half-open intervals [lo, hi).
    boundary : DIRICHLET (plain restriction) or PERIODIC (wrapped bonds;
        needs extent length >= 3 in every dimension so no bond doubles up).

    Sites are enumerated lexicographically; that ordering is part of the
    reproducibility contract for coupling draws.
    """

    nu: int
    nu1: int
    extents: tuple[tuple[int, int], ...]
    boundary: str = DIRICHLET

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "extents", tuple((int(lo), int(hi)) for lo, hi in self.extents)
        )
        if self.nu < 1:
            raise ValueError(f"nu must be >= 1, got {self.nu}")
        if not 0 <= self.nu1 <= self.nu:
            raise ValueError(f"nu1 must lie in [0, nu], got nu1={self.nu1}, nu={self.nu}")
        if len(self.extents) != self.nu:
            raise ValueError(f"expected {self.nu} extents, got {len(self.extents)}")
        if self.boundary not in (DIRICHLET, PERIODIC):
            raise ValueError(f"unknown boundary condition {self.boundary!r}")
        for d, (lo, hi) in enumerate(self.extents):
            if lo >= hi:
                raise ValueError(f"extent {d} is empty: [{lo}, {hi})")
            if self.boundary == PERIODIC and hi - lo < 3:
                raise ValueError(
                    f"periodic boundary needs extent length >= 3, got {hi - lo} in dimension {d}"
                )

    @cached_property
    def shape(self) -> tuple[int, ...]:
        return tuple(hi - lo for lo, hi in self.extents)

    @cached_property
    def n_sites(self) -> int:
        n = 1
        for s in self.shape:
            n *= s
        return n

    @cached_property
    def strides(self) -> tuple[int, ...]:
        """Lexicographic strides: rank increment for +1 in each coordinate."""
        strides = [1] * self.nu
        for d in range(self.nu - 2, -1, -1):
            strides[d] = strides[d + 1] * self.shape[d + 1]
        return tuple(strides)

    def sites(self) -> Iterator[Site]:
        """All sites in lexicographic order."""
        return product(*(range(lo, hi) for lo, hi in self.extents))

    @cached_property
    def index(self) -> dict[Site, int]:
        """Site -> lexicographic rank."""
        return {site: rank for rank, site in enumerate(self.sites())}

    def site_rank(self, site: Site) -> int:
        rank = 0
        for (lo, hi), stride, c in zip(self.extents, self.strides, site):
            if not lo <= c < hi:
                raise ValueError(f"site {site} outside box")
            rank += (c - lo) * stride
        return rank

    def surface_hyperplane_in_box(self) -> bool:
        """Whether every transverse extent contains coordinate 0."""
        return all(lo <= 0 < hi for lo, hi in self.extents[self.nu1:])

    def surface_sites(self) -> list[Site]:
        """Sites with all transverse coordinates zero, lexicographic order."""
        if not self.surface_hyperplane_in_box():
            return []
        zeros = (0,) * (self.nu - self.nu1)
        heads = product(*(range(lo, hi) for lo, hi in self.extents[: self.nu1]))
        return [head + zeros for head in heads]

    def bonds(self) -> list[tuple[int, int]]:
        """Nearest-neighbour pairs as (rank_i, rank_j) with i < j, each once."""
        out: list[tuple[int, int]] = []
        shape, strides = self.shape, self.strides
        for rank, site in enumerate(self.sites()):
            for d in range(self.nu):
                c = site[d] - self.extents[d][0]
                if c + 1 < shape[d]:
                    out.append((rank, rank + strides[d]))
                elif self.boundary == PERIODIC:
                    # wrap bond back to coordinate lo in dimension d
                    out.append((rank - (shape[d] - 1) * strides[d], rank))
        return out


@dataclass(frozen=True)
class SymmetricOperator:
    """A dense real symmetric matrix, optionally tagged with its LatticeBox.

    Entries are stored canonically symmetric: entries[i, j] == entries[j, i]
    bitwise.  Use :meth:`from_matrix` for inputs that are symmetric only up to
    rounding.
    """

    entries: np.ndarray
    box: LatticeBox | None = None

    def __post_init__(self) -> None:
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("matrix entries must be finite")
        if not np.array_equal(m, m.T):
            raise ValueError(
                "entries must be exactly symmetric; use SymmetricOperator.from_matrix"
            )
        if self.box is not None and self.box.n_sites != m.shape[0]:
            raise ValueError(
                f"box has {self.box.n_sites} sites but matrix is {m.shape[0]}x{m.shape[0]}"
            )
        object.__setattr__(self, "entries", m)

    @classmethod
    def from_matrix(cls, m, box: LatticeBox | None = None) -> "SymmetricOperator":
        """Canonicalize a numerically-symmetric matrix (upper triangle wins)."""
        m = np.asarray(m, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        scale = 1.0 + (np.max(np.abs(m)) if m.size else 0.0)
        if np.max(np.abs(m - m.T), initial=0.0) > 1e-12 * scale:
            raise ValueError("matrix is not symmetric within 1e-12 * scale")
        upper = np.triu(m)
        return cls(upper + np.triu(m, 1).T, box=box)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.entries))

    def __add__(self, other: "SymmetricOperator") -> "SymmetricOperator":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return SymmetricOperator(self.entries + other.entries, box=self.box or other.box)

    def __sub__(self, other: "SymmetricOperator") -> "SymmetricOperator":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return SymmetricOperator(self.entries - other.entries, box=self.box or other.box)


def build_box_laplacian(box: LatticeBox) -> SymmetricOperator:
    """Free hopping Hamiltonian on the box: adjacency matrix, zero diagonal.

    (h0 u)(n) = sum over nearest neighbours j of u(j), with Dirichlet
    (dropped) or periodic (wrapped) bonds at the box faces.  The spectrum is
    contained in [-2 nu, 2 nu].
    """
    n = box.n_sites
    m = np.zeros((n, n))
    for i, j in box.bonds():
        m[i, j] = 1.0
        m[j, i] = 1.0
    return SymmetricOperator(m, box=box)


def box_laplacian_bands(box: LatticeBox) -> np.ndarray | None:
    """Lower banded storage of the box Laplacian, or None if not worthwhile.

    Lexicographic ordering makes the Dirichlet Laplacian banded with
    half-bandwidth equal to the largest stride; row ``o`` of the returned
    (bw+1, n) array holds the diagonal at offset ``o`` (LAPACK lower
    convention: band[o, j] = M[j+o, j]).  Periodic wrap bonds destroy the
    small bandwidth, so periodic boxes return None and callers fall back to
    the dense path.
    """
    if box.boundary != DIRICHLET:
        return None
    n = box.n_sites
    bw = max(box.strides) if box.nu > 0 else 1
    band = np.zeros((bw + 1, n))
    for i, j in box.bonds():
        band[j - i, i] = 1.0
    return band


@dataclass(frozen=True)
class DisorderSpec:
    """Single-site coupling law with bounded support.

    Construct via the factories :meth:`point_mass`, :meth:`uniform`,
    :meth:`bernoulli`, :meth:`finite_discrete`.  ``sample`` maps one uniform
    variate in [0, 1) to a coupling (inverse CDF), so a single 64-bit seed per
    site determines the draw.
    """

    kind: str
    params: tuple
    density_sup: float | None = None

    def __post_init__(self) -> None:
        if self.kind == "point_mass":
            (alpha,) = self.params
            float(alpha)
        elif self.kind == "uniform":
            lo, hi = self.params
            if not lo < hi:
                raise ValueError(f"uniform needs lo < hi, got [{lo}, {hi}]")
        elif self.kind == "bernoulli":
            a, b, prob = self.params
            if not 0.0 <= prob <= 1.0:
                raise ValueError(f"bernoulli probability must be in [0, 1], got {prob}")
        elif self.kind == "finite_discrete":
            values, weights = self.params
            if len(values) != len(weights) or len(values) == 0:
                raise ValueError("finite_discrete needs matching nonempty values/weights")
            if any(w < 0 for w in weights):
                raise ValueError("finite_discrete weights must be nonnegative")
            if abs(sum(weights) - 1.0) > 1e-12:
                raise ValueError(f"finite_discrete weights must sum to 1, got {sum(weights)}")
        else:
            raise ValueError(f"unknown disorder kind {self.kind!r}")

    @classmethod
    def point_mass(cls, alpha: float) -> "DisorderSpec":
        return cls("point_mass", (float(alpha),))

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "DisorderSpec":
        lo, hi = float(lo), float(hi)
        if not lo < hi:
            raise ValueError(f"uniform needs lo < hi, got [{lo}, {hi}]")
        return cls("uniform", (lo, hi), density_sup=1.0 / (hi - lo))

    @classmethod
    def bernoulli(cls, a: float, b: float, prob: float) -> "DisorderSpec":
        """Value ``a`` with probability 1 - prob, value ``b`` with probability prob."""
        return cls("bernoulli", (float(a), float(b), float(prob)))

    @classmethod
    def finite_discrete(cls, values, weights) -> "DisorderSpec":
        return cls(
            "finite_discrete",
            (tuple(float(v) for v in values), tuple(float(w) for w in weights)),
        )

    @property
    def support(self) -> tuple[float, float]:
        """Smallest closed interval containing all possible couplings."""
        if self.kind == "point_mass":
            (alpha,) = self.params
            return alpha, alpha
        if self.kind == "uniform":
            return self.params
        if self.kind == "bernoulli":
            a, b, _ = self.params
            return min(a, b), max(a, b)
        values, _ = self.params
        return min(values), max(values)

    def sample(self, u: float) -> float:
        """Coupling for a uniform variate u in [0, 1)."""
        if self.kind == "point_mass":
            return self.params[0]
        if self.kind == "uniform":
            lo, hi = self.params
            return lo + u * (hi - lo)
        if self.kind == "bernoulli":
            a, b, prob = self.params
            return b if u < prob else a
        values, weights = self.params
        acc = 0.0
        for v, w in zip(values, weights):
            acc += w
            if u < acc:
                return v
        return values[-1]


@dataclass(frozen=True)
class DiagonalPotential:
    """Sparse diagonal potential: site -> coupling, on a given box.

    Every drawn coupling is stored (zeros included), so the record of which
    sites were sampled survives; the operator rank counts nonzero values only.
    ``warning`` is set when sampling degenerated (e.g. the surface hyperplane
    misses the box).
    """

    box: LatticeBox
    values: dict[Site, float]
    warning: str | None = None

    def __post_init__(self) -> None:
        index = self.box.index
        for site in self.values:
            if site not in index:
                raise ValueError(f"potential site {site} outside box")

    @property
    def rank(self) -> int:
        return sum(1 for v in self.values.values() if v != 0.0)

    def support(self) -> list[Site]:
        """Sites with nonzero coupling, lexicographic order."""
        index = self.box.index
        return sorted((s for s, v in self.values.items() if v != 0.0), key=index.__getitem__)

    def diag_vector(self) -> np.ndarray:
        """Dense diagonal aligned with the box's site enumeration."""
        vec = np.zeros(self.box.n_sites)
        index = self.box.index
        for site, v in self.values.items():
            vec[index[site]] = v
        return vec

    def as_matrix(self) -> np.ndarray:
        return np.diag(self.diag_vector())

    def as_operator(self) -> SymmetricOperator:
        return SymmetricOperator(self.as_matrix(), box=self.box)


def _draw_sites(
    box: LatticeBox,
    sites: list[Site],
    disorder: DisorderSpec,
    master_seed: int,
    realization: int,
) -> dict[Site, float]:
    # lexicographic draw order; each coupling depends only on its own seed triple
    index = box.index
    return {
        site: disorder.sample(
            _uniform53(derive_seed(master_seed, realization, index[site]))
        )
        for site in sites
    }


def sample_surface_potential(
    box: LatticeBox, disorder: DisorderSpec, master_seed: int, realization: int
) -> DiagonalPotential:
    """I.i.d. couplings on every surface site of the box.

    One independent coupling per site with all transverse coordinates zero,
    drawn in lexicographic site order from per-site seeds
    ``derive_seed(master_seed, realization, site_rank)``.  If the surface
    hyperplane misses the box the potential is empty and carries a warning.
    """
    if box.nu1 >= box.nu:
        raise ValueError("surface sampling needs at least one transverse dimension")
    if not box.surface_hyperplane_in_box():
        return DiagonalPotential(
            box, {}, warning="surface hyperplane does not intersect the box"
        )
    values = _draw_sites(box, box.surface_sites(), disorder, master_seed, realization)
    return DiagonalPotential(box, values)


def sample_bulk_potential(
    box: LatticeBox, disorder: DisorderSpec, master_seed: int, realization: int
) -> DiagonalPotential:
    """I.i.d. couplings on every site of the box (Anderson bulk disorder)."""
    values = _draw_sites(box, list(box.sites()), disorder, master_seed, realization)
    return DiagonalPotential(box, values)


def split_potential(v: DiagonalPotential) -> tuple[DiagonalPotential, DiagonalPotential]:
    """Exact sign split V = V+ + V- with V+ >= 0 >= V- entrywise.

    max(v, 0) + min(v, 0) == v holds exactly in floating point, and the
    operator ranks add: rank(V+) + rank(V-) == rank(V).
    """
    plus = {s: (val if val > 0.0 else 0.0) for s, val in v.values.items()}
    minus = {s: (val if val < 0.0 else 0.0) for s, val in v.values.items()}
    return (
        DiagonalPotential(v.box, plus, warning=v.warning),
        DiagonalPotential(v.box, minus, warning=v.warning),
    )


def add_potential(op: SymmetricOperator, v: DiagonalPotential) -> SymmetricOperator:
    """op + diag(v), preserving exact symmetry."""
    if op.dim != v.box.n_sites:
        raise ValueError("operator dimension does not match the potential's box")
    entries = op.entries.copy()
    idx = np.arange(op.dim)
    entries[idx, idx] += v.diag_vector()
    return SymmetricOperator(entries, box=op.box or v.box)


def bulk_box(nu: int, L: int, boundary: str = DIRICHLET) -> LatticeBox:
    """Cube [0, L)^nu with disorder on every site (nu1 = nu)."""
    return LatticeBox(nu, nu, tuple(((0, L),) * nu), boundary)


@dataclass(frozen=True)
class SurfaceGeometry:
    """Padded box around a surface disorder window of side L.

    The box extends [-P, L+P) in each longitudinal direction and [-W, W] in
    each transverse direction; couplings live on the window [0, L)^nu1 of the
    surface hyperplane.  Defaults (via :meth:`with_defaults`): W = L,
    P = L // 2.
    """

    nu: int
    nu1: int
    L: int
    W: int
    P: int
    boundary: str = DIRICHLET

    def __post_init__(self) -> None:
        if not 1 <= self.nu1 < self.nu:
            raise ValueError("surface geometry needs 1 <= nu1 < nu")
        if self.L < 1:
            raise ValueError(f"window length L must be >= 1, got {self.L}")
        if self.W < 0 or self.P < 0:
            raise ValueError("W and P must be nonnegative")

    @classmethod
    def with_defaults(
        cls,
        nu: int,
        nu1: int,
        L: int,
        W: int | None = None,
        P: int | None = None,
        boundary: str = DIRICHLET,
    ) -> "SurfaceGeometry":
        return cls(nu, nu1, L, L if W is None else W, L // 2 if P is None else P, boundary)

    @cached_property
    def box(self) -> LatticeBox:
        extents = tuple((-self.P, self.L + self.P) for _ in range(self.nu1)) + tuple(
            (-self.W, self.W + 1) for _ in range(self.nu - self.nu1)
        )
        return LatticeBox(self.nu, self.nu1, extents, self.boundary)

    @property
    def window_site_count(self) -> int:
        """Number of surface sites in the window: L^nu1 (the normalizer)."""
        return self.L**self.nu1

    def window_sites(self) -> list[Site]:
        """Window surface sites: longitudinal coords in [0, L), transverse zero."""
        zeros = (0,) * (self.nu - self.nu1)
        heads = product(*(range(0, self.L) for _ in range(self.nu1)))
        return [head + zeros for head in heads]

    def sample_window_potential(
        self, disorder: DisorderSpec, master_seed: int, realization: int
    ) -> DiagonalPotential:
        """Surface potential restricted to the window.

        Uses the same per-site seeds as :func:`sample_surface_potential` on
        the full box, so this is exactly that potential with the padding
        couplings dropped.
        """
        values = _draw_sites(self.box, self.window_sites(), disorder, master_seed, realization)
        return DiagonalPotential(self.box, values)

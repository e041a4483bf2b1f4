"""Lattice geometry, operators, disorder laws, and potential sampling."""

import math

import numpy as np
import pytest

from ssf_lab.model import (
    DIRICHLET,
    PERIODIC,
    DiagonalPotential,
    DisorderSpec,
    LatticeBox,
    SurfaceGeometry,
    SymmetricOperator,
    add_potential,
    box_laplacian_bands,
    build_box_laplacian,
    bulk_box,
    derive_seed,
    sample_bulk_potential,
    sample_surface_potential,
    split_potential,
)
from ssf_lab.spectral import banded_eigenvalues


def path_eigenvalues(n: int) -> np.ndarray:
    """Dirichlet chain of n sites: eigenvalues 2cos(pi k/(n+1)), k=1..n."""
    return np.sort([2.0 * math.cos(math.pi * k / (n + 1)) for k in range(1, n + 1)])


def ring_eigenvalues(n: int) -> np.ndarray:
    """Periodic ring of n sites: eigenvalues 2cos(2 pi k/n), k=0..n-1."""
    return np.sort([2.0 * math.cos(2.0 * math.pi * k / n) for k in range(n)])


class TestLatticeBox:
    def test_shape_and_site_count(self):
        box = LatticeBox(2, 1, ((-1, 3), (0, 2)))
        assert box.shape == (4, 2)
        assert box.n_sites == 8

    def test_sites_are_lexicographic(self):
        box = LatticeBox(2, 1, ((0, 2), (0, 2)))
        assert list(box.sites()) == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_index_and_rank_roundtrip(self):
        box = LatticeBox(3, 1, ((0, 2), (-1, 1), (0, 3)))
        for i, site in enumerate(box.sites()):
            assert box.index[site] == i
            assert box.site_rank(site) == i

    def test_empty_extent_rejected(self):
        with pytest.raises(ValueError):
            LatticeBox(1, 1, ((2, 2),))

    def test_nu1_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            LatticeBox(2, 3, ((0, 2), (0, 2)))

    def test_periodic_needs_length_three(self):
        with pytest.raises(ValueError):
            LatticeBox(1, 1, ((0, 2),), boundary=PERIODIC)

    def test_bond_counts(self):
        path = LatticeBox(1, 1, ((0, 4),))
        assert len(path.bonds()) == 3
        ring = LatticeBox(1, 1, ((0, 4),), boundary=PERIODIC)
        assert len(ring.bonds()) == 4
        square = LatticeBox(2, 1, ((0, 2), (0, 2)))
        assert len(square.bonds()) == 4

    def test_surface_sites_have_zero_transverse(self):
        box = LatticeBox(2, 1, ((0, 3), (-2, 3)))
        surf = box.surface_sites()
        assert surf == [(0, 0), (1, 0), (2, 0)]
        assert box.surface_hyperplane_in_box()

    def test_surface_hyperplane_can_miss(self):
        box = LatticeBox(2, 1, ((0, 3), (1, 4)))
        assert not box.surface_hyperplane_in_box()
        assert box.surface_sites() == []


class TestSymmetricOperator:
    def test_rejects_asymmetric_entries(self):
        with pytest.raises(ValueError):
            SymmetricOperator(np.array([[0.0, 1.0], [0.5, 0.0]]))

    def test_from_matrix_canonicalizes_roundoff(self):
        # upper triangle wins when the input carries symmetric roundoff
        m = np.array([[0.0, 1.0], [1.0 + 1e-14, 2.0]])
        op = SymmetricOperator.from_matrix(m)
        assert np.array_equal(op.entries, op.entries.T)
        assert np.array_equal(op.entries, np.triu(m) + np.triu(m, 1).T)

    def test_from_matrix_rejects_gross_asymmetry(self):
        with pytest.raises(ValueError):
            SymmetricOperator.from_matrix(np.array([[0.0, 1.0], [0.5, 2.0]]))

    def test_trace_and_arithmetic(self):
        a = SymmetricOperator(np.diag([1.0, 2.0]))
        b = SymmetricOperator(np.diag([3.0, 5.0]))
        assert a.trace() == 3.0
        assert np.array_equal((a + b).entries, np.diag([4.0, 7.0]))
        assert np.array_equal((b - a).entries, np.diag([2.0, 3.0]))
        assert a.dim == 2


class TestLaplacian:
    def test_three_site_path_spectrum(self):
        # hand oracle: the 3-site chain has eigenvalues -sqrt(2), 0, sqrt(2)
        h = build_box_laplacian(LatticeBox(1, 1, ((0, 3),)))
        w = np.sort(np.linalg.eigvalsh(h.entries))
        expect = [-math.sqrt(2.0), 0.0, math.sqrt(2.0)]
        assert np.allclose(w, expect, atol=1e-12)

    def test_path_spectrum_closed_form(self):
        for n in (1, 2, 5, 11):
            h = build_box_laplacian(LatticeBox(1, 1, ((0, n),)))
            w = np.sort(np.linalg.eigvalsh(h.entries))
            assert np.allclose(w, path_eigenvalues(n), atol=1e-12)

    def test_periodic_four_ring_spectrum(self):
        h = build_box_laplacian(LatticeBox(1, 1, ((0, 4),), boundary=PERIODIC))
        w = np.sort(np.linalg.eigvalsh(h.entries))
        assert np.allclose(w, [-2.0, 0.0, 0.0, 2.0], atol=1e-12)

    def test_periodic_ring_closed_form(self):
        for n in (3, 5, 8):
            h = build_box_laplacian(LatticeBox(1, 1, ((0, n),), boundary=PERIODIC))
            w = np.sort(np.linalg.eigvalsh(h.entries))
            assert np.allclose(w, ring_eigenvalues(n), atol=1e-12)

    def test_two_dim_spectrum_is_sum_of_chains(self):
        # separability: box eigenvalues are sums of per-axis chain eigenvalues
        box = LatticeBox(2, 1, ((0, 3), (0, 4)))
        w = np.sort(np.linalg.eigvalsh(build_box_laplacian(box).entries))
        expect = np.sort(
            [a + b for a in path_eigenvalues(3) for b in path_eigenvalues(4)]
        )
        assert np.allclose(w, expect, atol=1e-12)

    def test_extent_offset_does_not_change_spectrum(self):
        w_a = np.linalg.eigvalsh(
            build_box_laplacian(LatticeBox(2, 1, ((0, 3), (0, 3)))).entries
        )
        w_b = np.linalg.eigvalsh(
            build_box_laplacian(LatticeBox(2, 1, ((-5, -2), (7, 10)))).entries
        )
        assert np.allclose(np.sort(w_a), np.sort(w_b), atol=1e-12)

    @pytest.mark.parametrize(
        "extents",
        [((0, 7),), ((0, 3), (0, 4)), ((0, 2), (0, 2), (0, 3))],
    )
    def test_banded_matches_dense(self, extents):
        box = LatticeBox(len(extents), 1, extents)
        band = box_laplacian_bands(box)
        assert band is not None
        w_banded = banded_eigenvalues(band)
        w_dense = np.sort(np.linalg.eigvalsh(build_box_laplacian(box).entries))
        assert np.allclose(w_banded, w_dense, atol=1e-11)

    def test_periodic_has_no_banded_form(self):
        box = LatticeBox(1, 1, ((0, 5),), boundary=PERIODIC)
        assert box_laplacian_bands(box) is None


class TestSeeds:
    def test_derive_seed_deterministic_and_word_sensitive(self):
        assert derive_seed(7, 1, 2) == derive_seed(7, 1, 2)
        assert derive_seed(7, 1, 2) != derive_seed(7, 2, 1)
        assert derive_seed(7, 1) != derive_seed(8, 1)
        seeds = {derive_seed(0, i) for i in range(1000)}
        assert len(seeds) == 1000

    def test_derive_seed_range(self):
        for i in range(100):
            s = derive_seed(123, i)
            assert 0 <= s < 2**64


class TestDisorderSpec:
    def test_point_mass(self):
        d = DisorderSpec.point_mass(1.5)
        assert d.support == (1.5, 1.5)
        assert d.sample(0.0) == 1.5
        assert d.sample(0.999) == 1.5

    def test_uniform_inverse_cdf(self):
        d = DisorderSpec.uniform(-1.0, 3.0)
        assert d.support == (-1.0, 3.0)
        assert d.sample(0.0) == -1.0
        assert d.sample(0.5) == 1.0
        assert d.sample(0.25) == 0.0

    def test_uniform_requires_ordered_endpoints(self):
        with pytest.raises(ValueError):
            DisorderSpec.uniform(1.0, 1.0)

    def test_bernoulli_threshold(self):
        d = DisorderSpec.bernoulli(0.0, 2.0, 0.25)
        assert d.support == (0.0, 2.0)
        assert d.sample(0.0) == 2.0
        assert d.sample(0.2499) == 2.0
        assert d.sample(0.25) == 0.0
        assert d.sample(0.9) == 0.0

    def test_bernoulli_prob_validated(self):
        with pytest.raises(ValueError):
            DisorderSpec.bernoulli(0.0, 1.0, 1.5)

    def test_finite_discrete(self):
        d = DisorderSpec.finite_discrete([-1.0, 0.0, 4.0], [0.5, 0.25, 0.25])
        assert d.support == (-1.0, 4.0)
        assert d.sample(0.0) == -1.0
        assert d.sample(0.49) == -1.0
        assert d.sample(0.5) == 0.0
        assert d.sample(0.74) == 0.0
        assert d.sample(0.75) == 4.0
        assert d.sample(0.999) == 4.0

    def test_finite_discrete_weights_validated(self):
        with pytest.raises(ValueError):
            DisorderSpec.finite_discrete([0.0, 1.0], [0.5, 0.6])

    def test_uniform_sample_mean_statistics(self):
        # 10^4 i.i.d. site draws: sample mean within 3 sigma of 1/2
        box = bulk_box(1, 10_000)
        pot = sample_bulk_potential(box, DisorderSpec.uniform(0.0, 1.0), 42, 0)
        vals = np.array(list(pot.values.values()))
        assert vals.size == 10_000
        sigma = 1.0 / math.sqrt(12.0) / 100.0
        assert abs(vals.mean() - 0.5) < 3.0 * sigma
        assert vals.min() >= 0.0 and vals.max() < 1.0

    def test_bernoulli_sample_frequency(self):
        box = bulk_box(1, 10_000)
        pot = sample_bulk_potential(box, DisorderSpec.bernoulli(0.0, 1.0, 0.3), 43, 0)
        vals = np.array(list(pot.values.values()))
        frac_b = float(np.mean(vals == 1.0))
        sigma = math.sqrt(0.3 * 0.7 / 10_000)
        assert abs(frac_b - 0.3) < 3.0 * sigma


class TestDiagonalPotential:
    def test_rank_counts_nonzero_couplings(self):
        box = bulk_box(1, 4)
        pot = DiagonalPotential(box, {(0,): 1.0, (2,): 0.0, (3,): -2.0})
        assert pot.rank == 2

    def test_diag_vector_placement(self):
        box = bulk_box(1, 3)
        pot = DiagonalPotential(box, {(1,): 5.0})
        assert np.array_equal(pot.diag_vector(), [0.0, 5.0, 0.0])
        assert np.array_equal(pot.as_matrix(), np.diag([0.0, 5.0, 0.0]))

    def test_site_outside_box_rejected(self):
        with pytest.raises(ValueError):
            DiagonalPotential(bulk_box(1, 3), {(7,): 1.0})

    def test_split_is_exact_sign_decomposition(self):
        box = bulk_box(1, 5)
        pot = DiagonalPotential(box, {(0,): 1.5, (1,): -0.5, (3,): 2.0, (4,): -3.0})
        plus, minus = split_potential(pot)
        assert all(v >= 0 for v in plus.values.values())
        assert all(v <= 0 for v in minus.values.values())
        assert plus.rank + minus.rank == pot.rank
        merged = plus.diag_vector() + minus.diag_vector()
        assert np.array_equal(merged, pot.diag_vector())

    def test_add_potential(self):
        box = bulk_box(1, 3)
        h = build_box_laplacian(box)
        pot = DiagonalPotential(box, {(0,): 2.0})
        hv = add_potential(h, pot)
        assert np.array_equal(hv.entries, h.entries + np.diag([2.0, 0.0, 0.0]))


class TestSampling:
    def test_point_mass_surface_potential(self):
        # PointMass(alpha): potential is alpha times the surface indicator
        box = LatticeBox(2, 1, ((0, 3), (-2, 3)))
        pot = sample_surface_potential(box, DisorderSpec.point_mass(0.7), 1, 0)
        assert pot.values == {(0, 0): 0.7, (1, 0): 0.7, (2, 0): 0.7}
        assert pot.rank == 3

    def test_point_mass_zero_gives_empty_rank(self):
        box = LatticeBox(2, 1, ((0, 3), (-1, 2)))
        pot = sample_surface_potential(box, DisorderSpec.point_mass(0.0), 1, 0)
        assert pot.rank == 0
        assert np.array_equal(pot.diag_vector(), np.zeros(box.n_sites))

    def test_bulk_point_mass_is_constant_diagonal(self):
        box = bulk_box(2, 3)
        pot = sample_bulk_potential(box, DisorderSpec.point_mass(2.5), 1, 0)
        assert np.array_equal(pot.diag_vector(), np.full(9, 2.5))

    def test_surface_sampling_needs_transverse_dimension(self):
        with pytest.raises(ValueError):
            sample_surface_potential(bulk_box(2, 3), DisorderSpec.uniform(0, 1), 1, 0)

    def test_missing_hyperplane_warns(self):
        box = LatticeBox(2, 1, ((0, 3), (1, 4)))
        pot = sample_surface_potential(box, DisorderSpec.uniform(0, 1), 1, 0)
        assert pot.values == {}
        assert pot.warning is not None

    def test_draws_reproducible_and_realization_dependent(self):
        box = LatticeBox(2, 1, ((0, 4), (-2, 3)))
        d = DisorderSpec.uniform(0.0, 1.0)
        a = sample_surface_potential(box, d, 99, 0)
        b = sample_surface_potential(box, d, 99, 0)
        c = sample_surface_potential(box, d, 99, 1)
        assert a.values == b.values
        assert a.values != c.values

    def test_continuous_draws_are_distinct_across_sites(self):
        # per-site seeds: a continuous law almost surely never collides
        box = LatticeBox(2, 1, ((0, 20), (-1, 2)))
        pot = sample_surface_potential(box, DisorderSpec.uniform(0.0, 1.0), 5, 3)
        vals = list(pot.values.values())
        assert len(set(vals)) == len(vals) == 20


class TestSurfaceGeometry:
    def test_defaults(self):
        geom = SurfaceGeometry.with_defaults(2, 1, 8)
        assert (geom.W, geom.P) == (8, 4)
        geom2 = SurfaceGeometry.with_defaults(2, 1, 8, W=3)
        assert (geom2.W, geom2.P) == (3, 4)

    def test_box_extents(self):
        geom = SurfaceGeometry(3, 2, L=4, W=2, P=1)
        assert geom.box.extents == ((-1, 5), (-1, 5), (-2, 3))
        assert geom.box.nu1 == 2
        assert geom.window_site_count == 16

    def test_window_sites(self):
        geom = SurfaceGeometry(2, 1, L=3, W=1, P=1)
        assert geom.window_sites() == [(0, 0), (1, 0), (2, 0)]

    def test_nu1_bounds(self):
        with pytest.raises(ValueError):
            SurfaceGeometry(2, 2, 4, 2, 1)
        with pytest.raises(ValueError):
            SurfaceGeometry(2, 0, 4, 2, 1)

    def test_window_restricts_full_surface_draw(self):
        # window draw = full-box surface draw restricted to the window, exactly
        geom = SurfaceGeometry(2, 1, L=3, W=2, P=2)
        d = DisorderSpec.uniform(-1.0, 1.0)
        window = geom.sample_window_potential(d, 11, 4)
        full = sample_surface_potential(geom.box, d, 11, 4)
        assert set(window.values) == set(geom.window_sites())
        for site, val in window.values.items():
            assert full.values[site] == val

    def test_bulk_box_shape(self):
        box = bulk_box(3, 4)
        assert box.shape == (4, 4, 4)
        assert box.nu1 == 3
        assert box.boundary == DIRICHLET

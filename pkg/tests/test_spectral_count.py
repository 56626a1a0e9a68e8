import cmath
import math

import pytest

from stepspectra.errors import ContourError, StepSpectraError
from stepspectra.schrodinger_1d import PiecewisePotential, make_secular_handle
from stepspectra.spectral_count import (
    Region,
    census_box,
    imag_step_census,
    enumerate_imag_step,
    imag_step_seed,
    locate_zeros,
    rouche_compare,
    winding_count,
    _secular_kappa,
)
from stepspectra.step_model import StepBump, construct_bump, physical_sheet, secular_entire

from conftest import real_well_bound_states


class TestWindingCount:
    def test_identity_and_square(self):
        assert winding_count(lambda z: z, Region.disk(0, 1)) == 1
        assert winding_count(lambda z: z * z, Region.disk(0, 1)) == 2

    def test_well_bound_state_count(self):
        pot = PiecewisePotential.from_bumps([StepBump(-10.0, 1.0)])
        f = make_secular_handle(pot)
        reg = Region.rectangle(-10.0, -1e-6, -0.5, 0.5)
        oracle = real_well_bound_states(10.0, 1.0)
        assert winding_count(f, reg) == len(oracle) == 3

    def test_zero_on_contour_raises(self):
        with pytest.raises(ContourError):
            winding_count(lambda z: z, Region.rectangle(0.0, 1.0, -0.5, 0.5))

    def test_additivity_across_split(self):
        f = lambda z: (z - 0.4 - 0.1j) * (z + 0.3 + 0.2j)
        whole = Region.rectangle(-1.0, 1.0, -1.0, 1.0)
        left = Region.rectangle(-1.0, 0.05, -1.0, 1.0)
        right = Region.rectangle(0.05, 1.0, -1.0, 1.0)
        assert winding_count(f, whole) == winding_count(f, left) + winding_count(f, right)


class TestLocateZeros:
    def test_conjugate_pair(self):
        rep = locate_zeros(lambda z: z * z + 1, Region.rectangle(-2, 2, -2, 2))
        assert rep.winding_total == 2
        assert rep.complete
        locs = sorted(rep.locations(), key=lambda z: z.imag)
        assert locs[0] == pytest.approx(-1j, abs=1e-9)
        assert locs[1] == pytest.approx(1j, abs=1e-9)

    def test_double_zero_multiplicity(self):
        rep = locate_zeros(lambda z: (z - 0.3) ** 2, Region.disk(0, 1))
        assert len(rep.zeros) == 1
        assert rep.zeros[0].multiplicity == 2
        assert rep.zeros[0].location == pytest.approx(0.3, abs=1e-5)

    def test_multiplicity_sum_invariant(self, rng):
        for _ in range(5):
            roots = [complex(rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)) for _ in range(3)]

            def f(z):
                out = 1.0 + 0j
                for r in roots:
                    out *= z - r
                return out

            rep = locate_zeros(f, Region.rectangle(-1, 1, -1, 1))
            assert sum(z.multiplicity for z in rep.zeros) == rep.winding_total == 3

    def test_constructed_bump_target(self):
        zeta = 1 + 0.1j
        rep_bump = construct_bump(zeta)
        pot = PiecewisePotential.from_bumps([rep_bump.bump])
        f = make_secular_handle(pot)
        report = locate_zeros(f, Region.disk(zeta, 0.02))
        assert report.winding_total == 1
        assert abs(report.zeros[0].location - zeta) < 1e-8

    def test_budget_exhaustion_partial_report(self):
        def cluster(z):
            out = 1.0 + 0j
            for k in range(6):
                out *= z - 0.1 * k - 0.05j * k
            return out

        rep = locate_zeros(cluster, Region.rectangle(-1, 1, -1, 1), budget=3)
        assert not rep.complete

    def test_well_energies_match_oracle(self):
        pot = PiecewisePotential.from_bumps([StepBump(-10.0, 1.0)])
        f = make_secular_handle(pot)
        rep = locate_zeros(f, Region.rectangle(-10.0, -1e-6, -0.5, 0.5))
        oracle = real_well_bound_states(10.0, 1.0)
        assert len(rep.zeros) == len(oracle)
        for z, e in zip(rep.zeros, oracle):
            assert abs(z.location - e) < 1e-8


class TestParityCompleteness:
    def test_odd_even_union_equals_global(self, rng):
        # zero sets of the parity secular functions, filtered to the physical
        # sheet, match the transfer-matrix oracle zero set per region
        for trial in range(5):
            v0 = complex(rng.uniform(-6, -1), rng.uniform(-1.5, 1.5))
            R = rng.uniform(0.8, 1.6)
            bump = StepBump(v0, R)
            region = Region.rectangle(-8.0, -1e-3, -1.5, 1.5)
            pot = PiecewisePotential.from_bumps([bump])
            global_rep = locate_zeros(make_secular_handle(pot), region)
            parity_zeros = []
            for parity in ("odd", "even"):
                rep = locate_zeros(lambda E, p=parity: secular_entire(bump, E, p), region)
                parity_zeros.extend(rep.zeros)
            assert len(parity_zeros) == len(global_rep.zeros)
            key = lambda z: (z.real, z.imag)
            got = sorted((z.location for z in parity_zeros), key=key)
            want = sorted((z.location for z in global_rep.zeros), key=key)
            for a, b in zip(got, want):
                assert abs(a - b) < 1e-9 * max(1.0, abs(b))


class TestRouche:
    def test_equal_functions(self):
        ratio, dominated = rouche_compare(lambda z: z, lambda z: z, Region.disk(2.0, 1.0))
        assert ratio == 0.0
        assert dominated

    def test_linear_shift_not_dominated(self):
        ratio, dominated = rouche_compare(lambda z: z, lambda z: z + 3, Region.disk(0, 1))
        assert ratio == pytest.approx(1.5, rel=1e-3)
        assert not dominated

    def test_g1_g2_domination(self):
        # exponential approximation dominates the exact kappa-space secular
        # on a circle around the Lambert seed
        N, n = 8, -40
        R, v0 = float(N), 1j
        kap = imag_step_seed(N, n, "odd", 1)
        g1 = lambda k: v0 - 4 * k * k * cmath.exp(2j * k * R)
        g2 = lambda k: _secular_kappa("odd", v0, R, k)
        ratio, dominated = rouche_compare(g2, g1, Region.disk(kap, 10.0 * N / n**2))
        assert dominated
        # domination transfers the zero count (Rouche)
        assert winding_count(g1, Region.disk(kap, 10.0 * N / n**2)) == winding_count(
            g2, Region.disk(kap, 10.0 * N / n**2)
        )

    def test_vanishing_g_rejected(self):
        with pytest.raises(StepSpectraError):
            rouche_compare(lambda z: z + 1, lambda z: 0.0, Region.disk(2.0, 1.0))


class TestEnumerate:
    def test_seed_asymptotics_imag(self):
        N = 16
        rows = enumerate_imag_step(N, (-400, -256), families=[("odd", 1)])
        for r in rows:
            dev = (r.kappa_seed * N).imag - math.log(abs(r.n) / N)
            assert abs(dev) < 4.0  # uniformly bounded O(1)

    def test_refined_asymptotics_primary_family(self):
        N = 16
        rows = enumerate_imag_step(N, (-2 * N * N, -N * N), families=[("odd", 1)])
        for r in rows:
            assert r.converged
            w = r.kappa_refined * N
            assert abs(w.real - (2 * math.pi * r.n + 5 * math.pi / 4)) < 1.0 * math.log(
                abs(r.n)
            ) / abs(r.n)
            assert abs(w.imag - math.log(abs(r.n) / N)) < 4.0

    def test_residuals(self):
        rows = enumerate_imag_step(16, (-64, -8))
        assert all(r.residual < 1e-9 for r in rows if r.converged)
        assert sum(r.converged for r in rows) > 0.95 * len(rows)

    def test_sheet_flags_only_negative_n(self):
        rows = enumerate_imag_step(8, (-30, 30))
        flagged = [r.n for r in rows if r.on_physical_sheet]
        assert flagged
        assert all(n < 0 for n in flagged)

    def test_physical_rows_match_global_zeros(self):
        N = 8
        box = census_box(N, 10.0)
        cen = imag_step_census(N, 10.0)
        pot = PiecewisePotential([(-8.0, 8.0, 1j)])
        rep = locate_zeros(make_secular_handle(pot), box, budget=20000)
        assert rep.complete
        hits = [
            r for r in cen.results
            if r.converged and r.on_physical_sheet and box.contains(r.energy)
        ]
        for r in hits:
            assert min(abs(r.energy - z.location) for z in rep.zeros) < 1e-6

    def test_workers_deterministic(self):
        rows1 = enumerate_imag_step(8, (-20, -10), workers=1)
        rows4 = enumerate_imag_step(8, (-20, -10), workers=4)
        assert [(r.n, r.parity, r.sign, r.kappa_refined) for r in rows1] == [
            (r.n, r.parity, r.sign, r.kappa_refined) for r in rows4
        ]

    def test_small_N_rejected(self):
        with pytest.raises(ValueError):
            enumerate_imag_step(4, (-10, -1))


class TestCensus:
    def test_counts_increase_and_ratio_band(self):
        results = [imag_step_census(N, 10.0) for N in (16, 32, 64)]
        counts = [c.count for c in results]
        assert counts[0] < counts[1] < counts[2]
        ratios = [c.ratio for c in results]
        assert max(ratios) / min(ratios) < 3.0

    def test_census_equals_winding_exactly(self):
        N = 8
        cen = imag_step_census(N, 10.0)
        pot = PiecewisePotential([(-float(N), float(N), 1j)])
        wc = winding_count(make_secular_handle(pot), census_box(N, 10.0))
        assert cen.count == wc

    def test_energy_scalings(self):
        # Re E ~ n^2/N^2 and |Im E| ~ (|n|/N^2) log(|n|/N) along the ladder,
        # which are order relations: assert constant-factor bands
        N = 16
        rows = enumerate_imag_step(N, (-300, -200), families=[("odd", 1)])
        for r in rows:
            n = abs(r.n)
            re_pred = (2 * math.pi * n / N) ** 2
            assert r.energy.real == pytest.approx(re_pred, rel=0.15)
            im_scale = (n / N**2) * math.log(n / N)
            ratio = abs(r.energy.imag - 1.0) / im_scale
            assert 4.0 * math.pi * 1.2 < ratio < 4.0 * math.pi * 2.5

    def test_table_row_schema(self):
        row = imag_step_census(8, 10.0).table_row()
        assert set(row) == {
            "N", "count", "ratio", "box_re_lo", "box_re_hi", "box_im_lo", "box_im_hi"
        }

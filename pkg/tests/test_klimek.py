import math

import numpy as np
import pytest

from nonauto.green import Disk, Ellipse, Preimage, Segment, UNIT_DISK
from nonauto.klimek import (contraction_check, convergence_table, gamma_models,
                            gamma_nonauto, table_to_csv, tail_constant)
from nonauto.poly import monomial, polynomial
from nonauto.sequences import builtin


class TestGammaModels:
    @pytest.mark.parametrize("r", [2.0, 4.0, 10.0])
    def test_nested_disks(self, r):
        est = gamma_models(UNIT_DISK, Disk(0j, r))
        assert abs(est.lower - math.log(r)) < 1e-6
        assert est.refine_delta < 1e-9

    def test_disk_versus_segment(self):
        est = gamma_models(UNIT_DISK, Segment())
        assert abs(est.lower - math.log(1 + math.sqrt(2))) < 1e-4

    def test_identical_sets(self):
        for K in (UNIT_DISK, Segment(), Ellipse(2.0)):
            assert gamma_models(K, K).lower == 0.0

    def test_symmetric(self):
        a, b = Disk(0.2 + 0.1j, 1.5), Ellipse(3.0)
        assert gamma_models(a, b).lower == gamma_models(b, a).lower

    def test_triangle_inequality_on_disks(self):
        disks = [Disk(0j, 1.0), Disk(0j, 3.0), Disk(0.5, 2.0)]
        g01 = gamma_models(disks[0], disks[1]).lower
        g12 = gamma_models(disks[1], disks[2]).lower
        g02 = gamma_models(disks[0], disks[2]).lower
        assert g02 <= g01 + g12 + 1e-9

    def test_capacity_continuity(self):
        pairs = [(UNIT_DISK, Disk(0j, 4.0)), (UNIT_DISK, Segment()),
                 (Segment(), Ellipse(2.0)), (Ellipse(1.5), Disk(1j, 2.0))]
        for E, F in pairs:
            gap = abs(math.log(E.capacity()) - math.log(F.capacity()))
            assert gap <= gamma_models(E, F).lower + 1e-6


class TestContraction:
    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_power_map_ratio(self, d):
        res = contraction_check(monomial(d), UNIT_DISK, Disk(0j, 4.0))
        assert abs(res.ratio - 1.0 / d) < 1e-6

    def test_ratio_within_degree_bound(self):
        P = polynomial(0.2, -0.3, 1.0, 0.5)
        res = contraction_check(P, UNIT_DISK, Disk(0j, 4.0))
        assert res.ratio <= 1.0 / P.degree + res.slack + 1e-3

    def test_equal_sets_rejected(self):
        with pytest.raises(ValueError):
            contraction_check(monomial(2), UNIT_DISK, Disk(0j, 1.0))

    def test_affine_rejected(self):
        with pytest.raises(ValueError):
            contraction_check(polynomial(1, 2), UNIT_DISK, Disk(0j, 2.0))


class TestTailConstant:
    def test_power_maps_zero(self):
        assert tail_constant(builtin("power", degrees=2), UNIT_DISK, 10) < 1e-9

    def test_minimal_chebyshev_stable(self, min_cheb):
        c20 = tail_constant(min_cheb, UNIT_DISK, 20)
        c40 = tail_constant(min_cheb, UNIT_DISK, 40)
        assert 0.1 < c20 < 1.0
        assert c40 - c20 < 0.05

    def test_unbounded_family_grows(self):
        seq = builtin("n_pow_n")
        c10 = tail_constant(seq, UNIT_DISK, 10)
        c30 = tail_constant(seq, UNIT_DISK, 30)
        assert c30 > c10 + 0.5


class TestGammaNonauto:
    def test_power_preimages_coincide(self):
        seq = builtin("power", degrees=2)
        est = gamma_nonauto(seq, UNIT_DISK, 2, 5, escape_radius=2.0)
        assert est.lower < 1e-12

    def test_same_index_zero(self, min_cheb, min_cheb_radius):
        est = gamma_nonauto(min_cheb, UNIT_DISK, 4, 4, escape_radius=min_cheb_radius)
        assert est.lower == 0.0 and est.refine_delta == 0.0

    def test_decay_with_depth(self, min_cheb, min_cheb_radius):
        lows = [gamma_nonauto(min_cheb, UNIT_DISK, n, n + 1,
                              escape_radius=min_cheb_radius).lower
                for n in range(2, 8)]
        for a, b in zip(lows, lows[1:]):
            assert b <= 0.75 * a

    def test_normalized_increments_bounded(self, min_cheb, min_cheb_radius):
        # summability witness: D_n * gamma(n, n+1) stays bounded
        products = [math.factorial(n) * gamma_nonauto(
            min_cheb, UNIT_DISK, n, n + 1, escape_radius=min_cheb_radius).lower
            for n in range(2, 9)]
        assert max(products) < 10.0

    def test_index_validation(self, min_cheb, min_cheb_radius):
        with pytest.raises(ValueError):
            gamma_nonauto(min_cheb, UNIT_DISK, 5, 3, escape_radius=min_cheb_radius)


class TestConvergenceTable:
    def test_minimal_chebyshev(self, min_cheb, min_cheb_radius):
        rows = convergence_table(min_cheb, UNIT_DISK, range(1, 9),
                                 escape_radius=min_cheb_radius)
        assert [r.n for r in rows] == list(range(1, 9))
        assert abs(rows[-1].cap - 1.0) <= 1e-3
        assert rows[-1].cap_spread < 1e-4
        gammas = [r.gamma for r in rows]
        assert all(b < a for a, b in zip(gammas[1:], gammas[2:]))

    def test_power_rows_trivial(self):
        rows = convergence_table(builtin("power", degrees=2), UNIT_DISK, [1, 2, 3],
                                 escape_radius=2.0)
        for row in rows:
            assert row.gamma < 1e-12
            assert abs(row.cap - 1.0) < 1e-9

    def test_csv_shape(self, min_cheb, min_cheb_radius):
        rows = convergence_table(min_cheb, UNIT_DISK, [1, 2], escape_radius=min_cheb_radius)
        text = table_to_csv(rows)
        lines = text.strip().splitlines()
        assert lines[0] == "n,logD,gamma,cap"
        assert len(lines) == 3
        assert lines[1].startswith("1,")

    def test_classical_chebyshev_capacity_shift(self, classical_cheb, classical_cheb_radius):
        # non-monic leading coefficients 2**(D-1) shift the Robin constant:
        # cap of the step-n preimage is 0.5 * 2**(1/D_n), converging to 1/2
        rows = convergence_table(classical_cheb, UNIT_DISK, [4, 6, 8],
                                 escape_radius=classical_cheb_radius)
        for row in rows:
            d_total = math.factorial(row.n)
            assert abs(row.cap - 0.5 * 2.0 ** (1.0 / d_total)) < 1e-6
        assert abs(rows[-1].cap - 0.5) < 1e-4

    def test_capacity_column_optional(self, min_cheb, min_cheb_radius):
        rows = convergence_table(min_cheb, UNIT_DISK, [1, 2], escape_radius=min_cheb_radius,
                                 with_capacity=False)
        assert rows[0].cap is None
        text = table_to_csv(rows)
        assert text.strip().splitlines()[1].endswith(",")

    def test_validation(self, min_cheb, min_cheb_radius):
        with pytest.raises(ValueError):
            convergence_table(min_cheb, UNIT_DISK, [3, 2], escape_radius=min_cheb_radius)
        with pytest.raises(ValueError):
            convergence_table(min_cheb, UNIT_DISK, [], escape_radius=min_cheb_radius)


class TestPreimageNets:
    def test_preimage_gamma_against_closed_form(self):
        # preimage of the R-disk under z^2 is the sqrt(R)-disk
        pre = Preimage(Disk(0j, 4.0), monomial(2))
        est = gamma_models(UNIT_DISK, pre)
        assert abs(est.lower - math.log(2.0)) < 1e-6

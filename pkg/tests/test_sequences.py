import json
import math

import numpy as np
import pytest

from nonauto.poly import LN2, chebyshev_minimal, coeffs_close, evaluate, polynomial
from nonauto.sequences import (CheckReport, SequenceError, Witness, builtin,
                               check_finite_condition, check_guided, check_P2,
                               custom_sequence, escape_radius_search,
                               load_sequence_file)


class TestBuiltins:
    def test_minimal_chebyshev(self):
        seq = builtin("minimal_chebyshev")
        assert coeffs_close(seq.get(3), chebyshev_minimal(3))
        assert seq.get(3).coeffs == (0j, -0.75 + 0j, 0j, 1 + 0j)

    def test_power_constant(self):
        seq = builtin("power", degrees=2)
        for n in (1, 2, 7):
            assert seq.get(n).coeffs == (0j, 0j, 1 + 0j)

    def test_n_pow_n(self):
        p = builtin("n_pow_n").get(2)
        assert p.degree == 2
        assert evaluate(p, 1.0) == 4.0

    def test_two_pow_neg_n_sq(self):
        p = builtin("two_pow_neg_n_sq").get(3)
        assert p.scale2 == -9
        assert abs(evaluate(p, 2.0) - 2**3 * 2.0**-9) < 1e-18

    def test_n_exp_z2_small(self):
        assert evaluate(builtin("n_exp_z2").get(3), 1.0) == 6561.0

    @pytest.mark.parametrize("n", [10, 20, 45])
    def test_n_exp_z2_scaled_coefficient(self, n):
        p = builtin("n_exp_z2").get(n)
        lead = p.coeffs[-1]
        got = math.log(abs(lead)) + p.scale2 * LN2
        want = 2.0**n * math.log(n)
        assert abs(got - want) <= 1e-12 * want

    def test_heads(self):
        assert builtin("z2_minus_1_then_n_exp_z2").get(1).coeffs == (-1 + 0j, 0j, 1 + 0j)
        z2m2 = builtin("z2_minus_2_then_powers")
        assert z2m2.get(1).coeffs == (-2 + 0j, 0j, 1 + 0j)
        assert z2m2.get(5).coeffs == (0j,) * 5 + (1 + 0j,)

    def test_classical_with_degree_list_cycles(self):
        seq = builtin("classical_chebyshev", degrees=[2, 3])
        assert seq.get(1).degree == 2
        assert seq.get(2).degree == 3
        assert seq.get(3).degree == 2

    def test_unknown_kind(self):
        with pytest.raises(SequenceError):
            builtin("mystery")

    def test_generator_cached_and_pure(self):
        seq = builtin("minimal_chebyshev")
        assert seq.get(5) is seq.get(5)


class TestCustomSequences:
    def test_degree_one_tail_rejected(self):
        with pytest.raises(SequenceError):
            custom_sequence([polynomial(0, 0, 1), polynomial(0, 1)], repeat="none")

    def test_cycled_affine_head_rejected(self):
        with pytest.raises(SequenceError):
            custom_sequence([polynomial(0, 1), polynomial(0, 0, 1)], repeat="cycle")

    def test_repeat_none_exhausts(self):
        seq = custom_sequence([polynomial(0, 0, 1)], repeat="none")
        seq.get(1)
        with pytest.raises(SequenceError):
            seq.get(2)

    def test_cycle(self):
        seq = custom_sequence([polynomial(-1, 0, 1), polynomial(0, 0, 0, 1)])
        assert seq.get(3).coeffs == seq.get(1).coeffs

    def test_json_round_trip(self, tmp_path):
        doc = {"polynomials": [[[ -1.0, 0.0], [0.0, 0.0], [1.0, 0.0]]], "repeat": "cycle"}
        path = tmp_path / "seq.json"
        path.write_text(json.dumps(doc))
        seq = load_sequence_file(path)
        assert seq.get(1).coeffs == (-1 + 0j, 0j, 1 + 0j)
        assert seq.get(4).coeffs == seq.get(1).coeffs

    def test_json_missing_key(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{}")
        with pytest.raises(SequenceError):
            load_sequence_file(path)


class TestDegreeLedger:
    def test_exact_product_while_it_fits(self):
        seq = builtin("minimal_chebyshev")
        for n in (1, 5, 20):
            led = seq.ledger(n)
            assert led.d_exact == math.factorial(n)
            assert abs(led.log_d - math.log(math.factorial(n))) <= 1e-12 * max(1, n)
        assert seq.ledger(25).d_exact is None

    def test_log_strictly_increasing_from_second_step(self):
        seq = builtin("minimal_chebyshev")
        logs = [seq.ledger(n).log_d for n in range(1, 10)]
        assert all(b > a for a, b in zip(logs[1:], logs[2:]))
        assert logs[0] == 0.0


class TestCheckReport:
    def test_witness_only_on_failure(self):
        with pytest.raises(ValueError):
            CheckReport(True, (1, 2), 0.0, Witness(1, None, 0.0))
        with pytest.raises(ValueError):
            CheckReport(False, (1, 2), 0.0, None)


class TestGuided:
    def test_power_maps_pass(self):
        rep = check_guided(builtin("power", degrees=2), 2.0, 20)
        assert rep.passed and rep.margin >= 1.0 - 1e-12

    def test_minimal_chebyshev_passes_at_two(self, min_cheb):
        rep = check_guided(min_cheb, 2.0, 100)
        assert rep.passed
        assert rep.margin > 0

    def test_two_pow_fails_with_witness(self):
        rep = check_guided(builtin("two_pow_neg_n_sq"), 2.0, 40)
        assert not rep.passed
        assert rep.witness.n == 2
        assert rep.witness.value < 2.0

    def test_monotone_in_radius(self, min_cheb):
        radii = [2.0, 2.5, 3.0, 4.0, 8.0]
        seen_pass = False
        for r in radii:
            ok = check_guided(min_cheb, r, 40).passed
            if seen_pass:
                assert ok
            seen_pass = seen_pass or ok
        assert seen_pass

    def test_validation(self):
        with pytest.raises(ValueError):
            check_guided(builtin("power", degrees=2), 0.5, 10)
        with pytest.raises(ValueError):
            check_guided(builtin("power", degrees=2), 2.0, 1)


class TestEscapeRadius:
    def test_cubic_power_below_e(self):
        r = escape_radius_search(builtin("power", degrees=3), 30)
        assert math.exp(0.5) <= r <= math.e

    def test_minimal_chebyshev_below_four(self, min_cheb, min_cheb_radius):
        assert min_cheb_radius <= 4.0

    def test_head_start_consistent(self):
        r = escape_radius_search(builtin("z2_minus_2_then_powers"), 40)
        assert r >= 2.0

    def test_sampling_robustness(self, min_cheb, min_cheb_radius):
        # the search lands on the same radius at 4x the sampling density,
        # and the radius keeps verifying as a guided-disk certificate
        assert escape_radius_search(min_cheb, 40, m=2048) == pytest.approx(
            escape_radius_search(min_cheb, 40), abs=0.0)
        assert check_guided(min_cheb, min_cheb_radius, 40, m=4096).passed

    def test_unreachable_reports(self):
        with pytest.raises(SequenceError):
            escape_radius_search(builtin("two_pow_neg_n_sq"), 10, ceiling=4.0)


class TestP2:
    def test_minimal_chebyshev_fails(self, min_cheb):
        rep = check_P2(min_cheb, 10.0, 60)
        assert not rep.passed
        assert rep.witness.value >= 41 / 4

    def test_power_maps_pass_with_zero_bound(self):
        rep = check_P2(builtin("power", degrees=4), 0.0, 50)
        assert rep.passed and rep.margin == 0.0

    def test_single_term_passes(self):
        assert check_P2(builtin("n_pow_n"), 1.0, 40).passed


class TestFiniteCondition:
    def test_head_then_powers_bounded(self):
        rep = check_finite_condition(builtin("z2_minus_2_then_powers"), 0j, 2.0, 100)
        assert rep.passed
        assert rep.sup <= math.log(6.0)

    def test_n_pow_n_flagged(self):
        rep = check_finite_condition(builtin("n_pow_n"), 0j, 2.0, 100)
        assert not rep.passed
        assert "decade" in rep.note

    def test_power_sup_is_log_radius(self):
        rep = check_finite_condition(builtin("power", degrees=2), 0j, 2.0, 50)
        assert rep.passed
        # sampled sup approaches log 2 from below at grid resolution
        assert rep.sup <= math.log(2.0) + 1e-12
        assert abs(rep.sup - math.log(2.0)) < 0.01

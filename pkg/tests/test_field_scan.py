import math

import numpy as np
import pytest

import _catalogs
from decoscan import (
    BracketError,
    DomainError,
    StateScatteringModel,
    coefficients,
    decoherence_rate_t0,
    dynamic_range,
    evaluate_model,
    locate_suppression_windows,
    rate_at,
    rate_prefactor,
    refine_minimum,
    scan,
)

A0 = _catalogs.A0


@pytest.fixture(scope="module")
def suppression(working_gas):
    model_a, model_b, crossing = _catalogs.suppression_pair()
    result = scan(working_gas, model_a, model_b, 460.0, 560.0, 201)
    return model_a, model_b, crossing, result


class TestScan:
    def test_identical_models_zero_rates(self, working_gas):
        model = StateScatteringModel(_catalogs.csl(33.0, 4.0), (), "s")
        result = scan(working_gas, model, model, 0.0, 100.0, 32)
        assert all(row.rate == 0.0 for row in result.rows)
        assert all(row.delta_abs == 0.0 for row in result.rows)
        assert dynamic_range(result.rows) is None

    def test_guarded_point_recorded_not_dropped(self, working_gas, suppression):
        model_a, model_b, _, result = suppression
        assert [(p.field, p.state_label, p.resonance_index) for p in result.skipped] == [
            (500.0, "a", 0)
        ]
        # every base grid point is accounted for, as a row or as a skip
        covered = {row.field for row in result.rows} | {p.field for p in result.skipped}
        for field in np.linspace(460.0, 560.0, 201):
            assert float(field) in covered

    def test_rows_sorted_and_consistent_with_direct_evaluation(self, working_gas, suppression):
        model_a, model_b, _, result = suppression
        fields = [row.field for row in result.rows]
        assert fields == sorted(fields)
        for row in result.rows[:: len(result.rows) // 40]:
            assert row.rate == rate_at(working_gas, model_a, model_b, row.field)
            a_a = evaluate_model(model_a, row.field)
            a_b = evaluate_model(model_b, row.field)
            direct = math.hypot(a_b.alpha - a_a.alpha, a_b.beta - a_a.beta)
            assert row.delta_abs == pytest.approx(direct, rel=1e-14)

    def test_suppression_depth(self, suppression):
        *_, result = suppression
        rates = [row.rate for row in result.rows]
        assert min(rates) / max(rates) <= 1e-4
        assert dynamic_range(result.rows) >= 1e4

    def test_refinement_digs_into_narrow_features(self, working_gas):
        # grid chosen so the exact crossing is not a base point
        model_a, model_b, _ = _catalogs.suppression_pair()
        refined = scan(working_gas, model_a, model_b, 460.0, 560.0, 200)
        coarse = scan(working_gas, model_a, model_b, 460.0, 560.0, 200, max_depth=0)
        assert len(refined.rows) > len(coarse.rows)
        assert min(r.rate for r in refined.rows) < min(r.rate for r in coarse.rows)

    def test_far_field_rate_approaches_background_difference(self, working_gas):
        model_a, model_b, _ = _catalogs.suppression_pair()
        bg_pair = coefficients(working_gas, model_a.background, model_b.background)
        bg_rate = abs(decoherence_rate_t0(bg_pair, working_gas.temperature, 1.0))
        for field in (500.0 - 1e3 * 10.0, 500.0 + 1e3 * 10.0):
            assert rate_at(working_gas, model_a, model_b, field) == pytest.approx(bg_rate, rel=0.01)

    def test_matches_fine_uniform_grid(self, working_gas, suppression):
        model_a, model_b, _, result = suppression
        fine = np.linspace(460.0, 560.0, 2001)
        fine = fine[np.abs(fine - 500.0) > 1e-6]
        fine_rates = [rate_at(working_gas, model_a, model_b, b) for b in fine]
        top = max(row.rate for row in result.rows)
        assert top == pytest.approx(max(fine_rates), rel=0.1)

    def test_exchange_symmetry(self, working_gas):
        model_a, model_b, _ = _catalogs.suppression_pair()
        one = scan(working_gas, model_a, model_b, 505.0, 515.0, 33)
        two = scan(working_gas, model_b, model_a, 505.0, 515.0, 33)
        assert [r.field for r in one.rows] == [r.field for r in two.rows]
        assert [r.rate for r in one.rows] == [r.rate for r in two.rows]
        assert [r.delta_abs for r in one.rows] == [r.delta_abs for r in two.rows]
        assert [r.zeta0 for r in one.rows] == [r.zeta0 for r in two.rows]

    def test_zeta0_column(self, working_gas, suppression):
        model_a, model_b, _, result = suppression
        row = result.rows[0]
        pair = coefficients(
            working_gas,
            evaluate_model(model_a, row.field),
            evaluate_model(model_b, row.field),
        )
        assert row.zeta0 == pair.zeta0

    def test_input_validation(self, working_gas):
        model = StateScatteringModel(_catalogs.csl(1.0), (), "s")
        with pytest.raises(DomainError):
            scan(working_gas, model, model, 10.0, 5.0, 32)
        with pytest.raises(DomainError):
            scan(working_gas, model, model, 0.0, 10.0, 8)


class TestRefineMinimum:
    def test_localizes_closed_form_crossing(self, working_gas):
        model_a, model_b, crossing = _catalogs.suppression_pair()
        field, rate = refine_minimum(
            working_gas, model_a, model_b, (509.0, 509.75, 510.75), rel_tol=1e-7
        )
        assert abs(field - crossing) <= 1e-6
        for probe in (509.0, 509.75, 510.75):
            assert rate <= rate_at(working_gas, model_a, model_b, probe)

    def test_flat_zero_region(self, working_gas):
        model = StateScatteringModel(_catalogs.csl(12.0, 1.0), (), "s")
        field, rate = refine_minimum(working_gas, model, model, (0.0, 1.0, 2.0))
        assert rate == 0.0
        assert 0.0 < field < 2.0

    def test_loss_residual_at_real_part_crossing(self, working_gas):
        # where only the real parts cross, the rate floor is the pure
        # loss-difference contribution
        model_a, model_b, crossing = _catalogs.alpha_crossing_catalog()
        a_a = evaluate_model(model_a, crossing)
        a_b = evaluate_model(model_b, crossing)
        assert a_a.alpha == pytest.approx(a_b.alpha, rel=1e-12)
        residual = (
            rate_prefactor(working_gas)
            * math.sqrt(working_gas.temperature)
            * (a_b.beta - a_a.beta) ** 2
        )
        at_crossing = rate_at(working_gas, model_a, model_b, crossing)
        assert at_crossing == pytest.approx(residual, rel=0.05)
        field, rate = refine_minimum(
            working_gas, model_a, model_b, (crossing - 2.0, crossing - 0.1, crossing + 2.0)
        )
        assert rate <= at_crossing

    def test_bad_brackets(self, working_gas):
        model_a, model_b, _ = _catalogs.suppression_pair()
        with pytest.raises(BracketError):
            refine_minimum(working_gas, model_a, model_b, (510.0, 509.0, 511.0))
        with pytest.raises(BracketError):
            # middle point far up the resonance flank is not the lowest
            refine_minimum(working_gas, model_a, model_b, (509.5, 504.0, 540.0))


class TestDynamicRange:
    def test_constant_rate_is_one(self, working_gas):
        model_a = StateScatteringModel(_catalogs.csl(10.0, 1.0), (), "p")
        model_b = StateScatteringModel(_catalogs.csl(40.0, 6.0), (), "q")
        result = scan(working_gas, model_a, model_b, 0.0, 10.0, 16)
        assert dynamic_range(result.rows) == 1.0

    def test_empty_rows_error(self):
        with pytest.raises(DomainError):
            dynamic_range([])


class TestSuppressionWindows:
    def test_window_brackets_crossing(self, working_gas, suppression):
        model_a, model_b, crossing, result = suppression
        windows = locate_suppression_windows(working_gas, model_a, model_b, result)
        assert len(windows) == 1
        window = windows[0]
        assert window.field_lo < window.argmin_field < window.field_hi
        assert abs(window.argmin_field - crossing) <= 1e-4
        assert window.min_rate <= rate_at(working_gas, model_a, model_b, window.field_lo)
        assert window.min_rate <= rate_at(working_gas, model_a, model_b, window.field_hi)

    def test_doubling_base_points_stable_minimum(self, working_gas):
        # smooth variant: the loss parts never quite match, so the minimum
        # is finite and grid-independent once refined
        model_a, _, _ = _catalogs.suppression_pair()
        model_b = StateScatteringModel(_catalogs.csl(120.0, 10.5), (), "b2")
        outcomes = []
        for base_points in (201, 402):
            result = scan(working_gas, model_a, model_b, 460.0, 560.0, base_points)
            windows = locate_suppression_windows(working_gas, model_a, model_b, result)
            assert len(windows) == 1
            outcomes.append(windows[0].min_rate)
        assert outcomes[0] == pytest.approx(outcomes[1], rel=0.01)

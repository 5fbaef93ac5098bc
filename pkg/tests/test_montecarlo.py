"""Trial execution, sweeps, stopping rule, determinism, and the
statistical diagnostics."""

import numpy as np
import pytest

from onebit_mimo.bussgang import received_covariance
from onebit_mimo.channel import SystemConfig
from onebit_mimo.montecarlo import (
    BATCH_SIZE,
    BerRecord,
    TrialPlan,
    ber_sweep,
    error_floor_sweep,
    residual_cross_covariance,
    run_trial,
    sample_output_covariance,
    wilson_interval,
)
from onebit_mimo.receivers import ReceiverKind
from onebit_mimo.rng import trial_streams


def rayleigh_channel(rng, n, k):
    return (rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))) / np.sqrt(2)


class TestRunTrial:
    def test_unquantized_noiseless_zf_has_no_errors(self):
        cfg = SystemConfig(2, 8, 1e-30)
        for index in range(50):
            errors = run_trial(
                cfg, (ReceiverKind.ZF,), trial_streams(3, index), quantized=False
            )
            assert errors[ReceiverKind.ZF] == 0

    def test_single_user_single_antenna_qpsk_survives_quantization(self):
        # The quadrant of h*x is recovered after dividing out h, so one-bit
        # sampling is lossless here as noise vanishes.
        cfg = SystemConfig(1, 1, 1e-20)
        for index in range(200):
            errors = run_trial(cfg, (ReceiverKind.MRC,), trial_streams(9, index))
            assert errors[ReceiverKind.MRC] == 0

    def test_deterministic_given_streams(self):
        cfg = SystemConfig(2, 8, 0.5)
        kinds = tuple(ReceiverKind)
        a = run_trial(cfg, kinds, trial_streams(11, 4))
        b = run_trial(cfg, kinds, trial_streams(11, 4))
        assert a == b

    def test_counts_do_not_depend_on_requested_kinds(self):
        # A kind's error count is a function of (seed, trial) only, which is
        # what makes speculative parallel batches exact.
        cfg = SystemConfig(2, 8, 0.1)
        all_counts = run_trial(cfg, tuple(ReceiverKind), trial_streams(13, 7))
        solo = run_trial(cfg, (ReceiverKind.BMMSE,), trial_streams(13, 7))
        assert solo[ReceiverKind.BMMSE] == all_counts[ReceiverKind.BMMSE]


class TestTrialPlan:
    def test_rejects_zero_max_trials(self):
        cfg = SystemConfig(2, 4, 0.1)
        with pytest.raises(ValueError):
            TrialPlan(
                config=cfg,
                kinds=(ReceiverKind.ZF,),
                snr_db_grid=(0.0,),
                max_trials=0,
                min_bit_errors=10,
                seed=1,
            )

    def test_rejects_empty_grid(self):
        cfg = SystemConfig(2, 4, 0.1)
        with pytest.raises(ValueError):
            TrialPlan(
                config=cfg,
                kinds=(ReceiverKind.ZF,),
                snr_db_grid=(),
                max_trials=10,
                min_bit_errors=10,
                seed=1,
            )


class TestBerRecord:
    def test_ber_and_validation(self):
        record = BerRecord(30.0, ReceiverKind.BMMSE, 2, 16, "qpsk", 10, 40, 4)
        assert record.ber == 0.1
        with pytest.raises(ValueError):
            BerRecord(30.0, ReceiverKind.BMMSE, 2, 16, "qpsk", 10, 40, 41)


class TestBerSweep:
    def test_stops_at_batch_boundary_or_cap(self):
        cfg = SystemConfig(2, 4, 1.0)
        plan = TrialPlan(
            config=cfg,
            kinds=(ReceiverKind.MRC, ReceiverKind.ZF),
            snr_db_grid=(0.0,),
            max_trials=5_000,
            min_bit_errors=50,
            seed=7,
        )
        for record in ber_sweep(plan):
            assert record.trials % BATCH_SIZE == 0 or record.trials == 5_000
            assert record.bits == record.trials * 2 * 2
            if record.trials < 5_000:
                assert record.bit_errors >= 50

    def test_zero_error_target_runs_every_trial(self):
        cfg = SystemConfig(2, 4, 1.0)
        plan = TrialPlan(
            config=cfg,
            kinds=(ReceiverKind.MRC,),
            snr_db_grid=(0.0,),
            max_trials=1_500,
            min_bit_errors=0,
            seed=7,
        )
        (record,) = ber_sweep(plan)
        assert record.trials == 1_500

    def test_worker_count_does_not_change_counts(self):
        cfg = SystemConfig(2, 8, 1.0)
        plan = TrialPlan(
            config=cfg,
            kinds=(ReceiverKind.MRC, ReceiverKind.BMMSE),
            snr_db_grid=(0.0, 10.0),
            max_trials=3_000,
            min_bit_errors=100,
            seed=21,
        )
        assert ber_sweep(plan, workers=1) == ber_sweep(plan, workers=2)

    def test_unquantized_zf_ber_decreases_with_snr(self):
        cfg = SystemConfig(2, 4, 1.0)
        plan = TrialPlan(
            config=cfg,
            kinds=(ReceiverKind.ZF,),
            snr_db_grid=(0.0, 10.0),
            max_trials=3_000,
            min_bit_errors=0,
            seed=5,
            quantized=False,
        )
        low, high = ber_sweep(plan)
        # Allow 3-sigma binomial noise on the comparison.
        sigma = np.sqrt(
            low.ber * (1 - low.ber) / low.bits + high.ber * (1 - high.ber) / high.bits
        )
        assert low.ber >= high.ber - 3 * sigma


class TestErrorFloorSweep:
    def test_shape_and_operating_point(self):
        records = error_floor_sweep(
            [2], (ReceiverKind.MRC, ReceiverKind.BMRC), seed=3,
            max_trials=2_000, min_bit_errors=50,
        )
        assert len(records) == 2
        for record in records:
            assert record.snr_db == 30.0
            assert record.antennas == 8 * record.users
            assert record.modulation == "qpsk"


class TestDiagnostics:
    def test_residual_cross_covariances_vanish(self):
        rng = np.random.default_rng(123)
        h = rayleigh_channel(rng, 4, 2)
        samples = 100_000
        receive_stat, symbol_stat = residual_cross_covariance(
            h, 1.0, samples, np.random.default_rng(1000)
        )
        bound = 5 * np.sqrt(2 / samples)
        assert receive_stat <= bound
        assert symbol_stat <= bound

    def test_wrong_gain_negative_control(self):
        rng = np.random.default_rng(123)
        h = rayleigh_channel(rng, 4, 2)
        samples = 100_000
        receive_stat, _ = residual_cross_covariance(
            h, 1.0, samples, np.random.default_rng(77), gain=np.zeros((4, 4))
        )
        assert receive_stat > 5 * np.sqrt(2 / samples)

    def test_statistic_decays_like_sqrt_samples(self):
        rng = np.random.default_rng(123)
        h = rayleigh_channel(rng, 4, 2)
        runs = np.random.default_rng(5)
        small = np.mean(
            [residual_cross_covariance(h, 1.0, 4_000, runs)[0] for _ in range(20)]
        )
        large = np.mean(
            [residual_cross_covariance(h, 1.0, 8_000, runs)[0] for _ in range(20)]
        )
        assert 1.1 <= small / large <= 1.8

    def test_rejects_tiny_sample_counts(self):
        h = np.ones((2, 1), dtype=complex)
        with pytest.raises(ValueError):
            residual_cross_covariance(h, 1.0, 10, np.random.default_rng(0))

    def test_output_covariance_diagonal_is_exactly_two(self):
        rng = np.random.default_rng(123)
        h = rayleigh_channel(rng, 3, 2)
        cov = sample_output_covariance(h, 0.5, 2_000, np.random.default_rng(2))
        np.testing.assert_array_equal(cov.diagonal().real, 2.0)
        assert np.abs(cov.diagonal().imag).max() == 0

    def test_output_covariance_matches_arcsine_law(self):
        # The raw quantizer alphabet obeys the 4/pi arcsine law, twice the
        # unit-power convention used by the linearized-model statistics.
        rng = np.random.default_rng(123)
        h = rayleigh_channel(rng, 4, 2)
        n0 = 1.0
        samples = 40_000
        cov = sample_output_covariance(h, n0, samples, np.random.default_rng(9))
        received = received_covariance(h, n0)
        scale = 1 / np.sqrt(received.diagonal().real)
        normalized = received * np.outer(scale, scale)
        law = (4 / np.pi) * (
            np.arcsin(np.clip(normalized.real, -1, 1))
            + 1j * np.arcsin(np.clip(normalized.imag, -1, 1))
        )
        np.fill_diagonal(law, 2.0)
        assert np.abs(cov - law).max() <= 8 / np.sqrt(samples)

    def test_scalar_output_covariance(self):
        cov = sample_output_covariance(
            np.array([[1.0 + 0j]]), 1.0, 2_000, np.random.default_rng(3)
        )
        np.testing.assert_array_equal(cov, np.array([[2.0 + 0j]]))


class TestWilsonInterval:
    def test_contains_point_estimate(self):
        lo, hi = wilson_interval(10, 1000)
        assert lo < 0.01 < hi

    def test_zero_successes(self):
        lo, hi = wilson_interval(0, 1000)
        assert lo == 0.0
        assert hi > 0

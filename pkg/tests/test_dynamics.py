import io
import math

import numpy as np
import pytest

from qdiscord.discord import closed_form_discord, entropy_defect
from qdiscord.dynamics import (
    ChannelParams,
    apply_phase_flip,
    certify_monotone_decrease,
    discord_trajectory,
    frozen_plateau_value,
    kraus_operators,
    phase_flip_coefficients,
    transition_point,
    write_trajectory_csv,
)
from qdiscord.states import FamilyCoefficients, build_density_matrix, random_physical

# frozen mpmath values for the four-qubit benchmark state c = (0.8, 0.4, 0.5)
P_STAR_EXACT = 0.11086029498053860  # 1 - (0.5/0.8)^(1/4)
F_HALF = 0.18872187554086714
F_005 = 0.0018041209571899134  # discord at p = 0.5 on the decayed branch
ONSET_P3 = 0.010698776766036795  # first physical p for the N=3 variant


class TestChannelParams:
    def test_from_rate(self):
        params = ChannelParams.from_rate(gamma=2.0, t=0.5)
        assert params.p == pytest.approx(1.0 - math.exp(-1.0))

    def test_validation(self):
        with pytest.raises(ValueError):
            ChannelParams(1.5)
        with pytest.raises(ValueError):
            ChannelParams.from_rate(-1.0, 1.0)


class TestPhaseFlipCoefficients:
    def test_identity_at_zero(self):
        fc = FamilyCoefficients(3, 0.3, 0.2, 0.1)
        assert phase_flip_coefficients(fc, 0.0) == fc

    def test_complete_dephasing(self):
        fc = FamilyCoefficients(3, 0.3, 0.2, 0.1)
        assert phase_flip_coefficients(fc, 1.0) == FamilyCoefficients(3, 0, 0, 0.1)

    def test_four_qubit_half_strength(self):
        fc = FamilyCoefficients(4, 0.8, 0.4, 0.5)
        evolved = phase_flip_coefficients(fc, 0.5)
        assert evolved.c1 == pytest.approx(0.05, abs=1e-15)
        assert evolved.c2 == pytest.approx(0.025, abs=1e-15)
        assert evolved.c3 == 0.5

    def test_rejects_bad_p(self):
        with pytest.raises(ValueError):
            phase_flip_coefficients(FamilyCoefficients(3, 0, 0, 0), -0.1)


class TestKrausOperators:
    @pytest.mark.parametrize("n,p", [(2, 0.0), (3, 0.3), (4, 0.9), (3, 1.0)])
    def test_completeness_per_qubit(self, n, p):
        ops = kraus_operators(n, p)
        assert len(ops) == 2 * n
        identity = np.eye(2**n)
        for qubit in range(n):
            k0, k1 = ops[2 * qubit], ops[2 * qubit + 1]
            total = k0.conj().T @ k0 + k1.conj().T @ k1
            assert np.max(np.abs(total - identity)) < 1e-12

    def test_zero_strength_is_identity_channel(self):
        ops = kraus_operators(2, 0.0)
        assert np.allclose(ops[0], np.eye(4), atol=1e-15)
        assert np.allclose(ops[1], 0.0, atol=1e-15)

    @pytest.mark.parametrize("n", [3, 4])
    def test_matrix_channel_matches_coefficient_scaling(self, n):
        rng = np.random.default_rng(40 + n)
        for _ in range(20):
            fc = random_physical(n, rng)
            p = float(rng.uniform(0, 1))
            evolved = apply_phase_flip(build_density_matrix(fc), p)
            direct = build_density_matrix(phase_flip_coefficients(fc, p))
            assert np.max(np.abs(evolved.matrix - direct.matrix)) < 1e-10


class TestTrajectory:
    def test_frozen_branch_of_benchmark_state(self):
        fc = FamilyCoefficients(4, 0.8, 0.4, 0.5)
        points = discord_trajectory(fc, [0.0, 0.05, 0.1])
        for pt in points:
            assert pt.physical
            assert pt.discord_bits == pytest.approx(F_HALF, abs=1e-12)

    def test_decayed_branch_value(self):
        fc = FamilyCoefficients(4, 0.8, 0.4, 0.5)
        (pt,) = discord_trajectory(fc, [0.5])
        assert pt.discord_bits == pytest.approx(F_005, abs=1e-12)
        assert pt.theta == 0.5
        assert pt.delta == pytest.approx(math.sqrt(0.05**2 + 0.025**2 + 0.25), abs=1e-15)

    def test_three_qubit_strictly_decreasing(self):
        fc = FamilyCoefficients(3, 0.3, 0.2, 0.1)
        points = discord_trajectory(fc, np.linspace(0, 1, 101))
        values = [pt.discord_bits for pt in points]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_unphysical_points_flagged(self):
        fc = FamilyCoefficients(3, 0.8, 0.4, 0.5)
        points = discord_trajectory(fc, np.linspace(0, 1, 201))
        flags = [pt.physical for pt in points]
        assert flags[0] is False
        first_physical = next(i for i, ok in enumerate(flags) if ok)
        # onset sits between the last flagged and first physical grid point
        assert points[first_physical - 1].p < ONSET_P3 < points[first_physical].p + 1e-12
        assert all(flags[first_physical:])
        assert points[0].discord_bits is None

    def test_csv_format(self):
        fc = FamilyCoefficients(4, 0.8, 0.4, 0.5)
        buffer = io.StringIO()
        write_trajectory_csv(discord_trajectory(fc, [0.0, 0.5]), buffer)
        lines = buffer.getvalue().splitlines()
        assert lines[0] == "p,c1,c2,c3,delta,theta,discord,physical"
        first = lines[1].split(",")
        assert first[0] == "0"
        assert first[1] == "0.80000000000000004"
        assert first[-1] == "true"


class TestTransitionPoint:
    def test_benchmark_value(self):
        fc = FamilyCoefficients(4, 0.8, 0.4, 0.5)
        p_star = transition_point(fc)
        assert p_star == pytest.approx(0.11086, abs=5e-6)
        assert p_star == pytest.approx(P_STAR_EXACT, abs=1e-15)

    def test_equal_magnitudes_transition_at_zero(self):
        fc = FamilyCoefficients(4, 0.5, 0.25, 0.5)
        assert transition_point(fc) == 0.0

    def test_quarter_root_example(self):
        fc = FamilyCoefficients(4, 0.9, 0.405, 0.45)
        assert transition_point(fc) == pytest.approx(0.159104, abs=5e-7)

    def test_bisection_agrees_with_analytic(self):
        for coeffs in [(0.8, 0.4, 0.5), (0.9, 0.405, 0.45), (0.7, 0.14, 0.2)]:
            fc = FamilyCoefficients(4, *coeffs)
            analytic = transition_point(fc, method="analytic")
            bisected = transition_point(fc, method="bisection")
            assert abs(analytic - bisected) < 1e-8

    def test_precondition_messages(self):
        with pytest.raises(ValueError, match="0 \\(mod 4\\)"):
            transition_point(FamilyCoefficients(3, 0.8, 0.4, 0.5))
        with pytest.raises(ValueError, match="c3"):
            transition_point(FamilyCoefficients(4, 0.8, 0.0, 0.0))
        with pytest.raises(ValueError, match="c2"):
            transition_point(FamilyCoefficients(4, 0.8, 0.1, 0.5))
        with pytest.raises(ValueError, match="\\|c3\\|"):
            transition_point(FamilyCoefficients(4, 0.4, 0.2, 0.5))
        with pytest.raises(ValueError, match="method"):
            transition_point(FamilyCoefficients(4, 0.8, 0.4, 0.5), method="newton")


class TestFrozenPlateau:
    def test_plateau_is_constant_and_equals_entropy_defect(self):
        fc = FamilyCoefficients(4, 0.8, 0.4, 0.5)
        p_star = transition_point(fc)
        grid = np.linspace(0.0, p_star - 1e-6, 40)
        values = [pt.discord_bits for pt in discord_trajectory(fc, grid)]
        assert max(values) - min(values) < 1e-12
        assert values[0] == pytest.approx(frozen_plateau_value(fc), abs=1e-12)
        assert frozen_plateau_value(fc) == pytest.approx(entropy_defect(0.5), abs=1e-15)

    def test_decay_past_transition(self):
        fc = FamilyCoefficients(4, 0.8, 0.4, 0.5)
        p_star = transition_point(fc)
        grid = np.linspace(p_star + 1e-6, 1.0, 50)
        values = [pt.discord_bits for pt in discord_trajectory(fc, grid)]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert values[-1] == pytest.approx(0.0, abs=1e-12)

    def test_continuity_at_the_kink(self):
        fc = FamilyCoefficients(4, 0.8, 0.4, 0.5)
        p_star = transition_point(fc)
        left = closed_form_discord(phase_flip_coefficients(fc, p_star - 1e-10)).value_bits
        right = closed_form_discord(phase_flip_coefficients(fc, p_star + 1e-10)).value_bits
        assert abs(left - right) < 1e-9


class TestMonotonicityCertificate:
    def test_three_qubit_example(self):
        report = certify_monotone_decrease(
            FamilyCoefficients(3, 0.3, 0.2, 0.1), np.linspace(0, 1, 201)
        )
        assert report.passed
        assert report.max_slope < 0

    def test_five_qubit_example(self):
        report = certify_monotone_decrease(
            FamilyCoefficients(5, 0.4, 0.3, 0.2), np.linspace(0, 1, 201)
        )
        assert report.passed

    def test_single_axis_state_trivially_passes(self):
        report = certify_monotone_decrease(
            FamilyCoefficients(3, 0.5, 0.0, 0.0), np.linspace(0, 1, 101)
        )
        assert report.passed

    def test_rejects_even_registers(self):
        with pytest.raises(ValueError):
            certify_monotone_decrease(FamilyCoefficients(4, 0.5, 0.2, 0.1), [0, 0.5, 1])

    def test_rejects_unphysical_grid(self):
        with pytest.raises(ValueError):
            certify_monotone_decrease(
                FamilyCoefficients(3, 0.8, 0.4, 0.5), np.linspace(0, 1, 51)
            )

    def test_no_freezing_interval_for_odd_registers(self):
        # no 0.01-wide window (away from the decayed tail) varies by < 1e-12
        rng = np.random.default_rng(60)
        found = 0
        while found < 20:
            fc = random_physical(3, rng)
            if closed_form_discord(fc).value_bits < 1e-3:
                continue
            found += 1
            grid = np.linspace(0.0, 0.9, 181)
            values = np.array(
                [pt.discord_bits for pt in discord_trajectory(fc, grid)]
            )
            for start in range(len(grid) - 2):
                window = values[start : start + 3]
                assert window.max() - window.min() >= 1e-12

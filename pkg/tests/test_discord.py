import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdiscord.discord import (
    Category,
    OracleConfig,
    _objective_batch,
    classify,
    closed_form_discord,
    discord_objective,
    discord_value_arrays,
    entropy_defect,
    optimal_axis,
    oracle_discord,
)
from qdiscord.errors import InvalidStateError, UnsupportedSizeError
from qdiscord.measurement import MeasurementTree, unconditional_term
from qdiscord.states import (
    FamilyCoefficients,
    build_density_matrix,
    is_physical,
    random_physical,
)

# frozen from a 40-digit mpmath evaluation of (1+x)/2 log2(1+x) + (1-x)/2 log2(1-x)
F_HALF = 0.18872187554086714
# f(sqrt(0.14)) - f(0.3), same evaluation; the three-qubit discord at (0.3, 0.2, 0.1)
D3_EXAMPLE = 0.03755591930823007

coefficient = st.floats(-1.0, 1.0, allow_nan=False)


def physical_triples(n, count, seed):
    rng = np.random.default_rng(seed)
    return [random_physical(n, rng) for _ in range(count)]


class TestClassify:
    @pytest.mark.parametrize(
        "n,expected",
        [
            (3, Category.ODD),
            (5, Category.ODD),
            (7, Category.ODD),
            (2, Category.TWO_MOD_4),
            (6, Category.TWO_MOD_4),
            (4, Category.ZERO_MOD_4),
            (8, Category.ZERO_MOD_4),
        ],
    )
    def test_examples(self, n, expected):
        assert classify(n) is expected

    def test_rejects_small(self):
        with pytest.raises(ValueError):
            classify(1)


class TestEntropyDefect:
    def test_endpoints(self):
        assert entropy_defect(0.0) == 0.0
        assert entropy_defect(1.0) == 1.0

    def test_half(self):
        assert entropy_defect(0.5) == pytest.approx(F_HALF, abs=1e-15)

    def test_clamps_boundary_fuzz(self):
        assert entropy_defect(-1e-13) == 0.0
        assert entropy_defect(1.0 + 1e-13) == 1.0

    def test_rejects_outside_domain(self):
        with pytest.raises(ValueError):
            entropy_defect(-0.01)
        with pytest.raises(ValueError):
            entropy_defect(1.01)

    @given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    @settings(max_examples=200, deadline=None)
    def test_monotone_increasing(self, a, b):
        lo, hi = sorted((a, b))
        assert entropy_defect(lo) <= entropy_defect(hi) + 1e-15

    def test_accepts_arrays(self):
        x = np.linspace(0.0, 1.0, 11)
        out = entropy_defect(x)
        assert out.shape == x.shape
        assert out[0] == 0.0 and out[-1] == 1.0

    def test_matches_direct_formula_midrange(self):
        for x in np.linspace(0.01, 0.99, 37):
            direct = 0.5 * (1 + x) * math.log2(1 + x) + 0.5 * (1 - x) * math.log2(1 - x)
            assert entropy_defect(x) == pytest.approx(direct, abs=1e-14)


class TestClosedForm:
    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_zero_state(self, n):
        assert closed_form_discord(FamilyCoefficients(n, 0, 0, 0)).value_bits == 0.0

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    @pytest.mark.parametrize("axis", [0, 1, 2])
    def test_single_axis_states_are_classical(self, n, axis):
        for c in np.linspace(-1, 1, 21):
            coeffs = [0.0, 0.0, 0.0]
            coeffs[axis] = float(c)
            value = closed_form_discord(FamilyCoefficients(n, *coeffs)).value_bits
            assert abs(value) < 1e-12

    def test_four_qubit_corner(self):
        assert closed_form_discord(FamilyCoefficients(4, 1, 1, 1)).value_bits == pytest.approx(
            1.0, abs=1e-12
        )

    def test_bell_state(self):
        assert closed_form_discord(FamilyCoefficients(2, 1, -1, 1)).value_bits == pytest.approx(
            1.0, abs=1e-12
        )

    def test_three_qubit_example(self):
        report = closed_form_discord(FamilyCoefficients(3, 0.3, 0.2, 0.1))
        assert report.value_bits == pytest.approx(D3_EXAMPLE, abs=1e-14)
        assert report.xi == pytest.approx(math.sqrt(0.14), abs=1e-15)
        assert report.c_max == 0.3
        assert report.category is Category.ODD

    def test_rejects_unphysical(self):
        with pytest.raises(InvalidStateError):
            closed_form_discord(FamilyCoefficients(3, 0.8, 0.4, 0.5))

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_nonnegative_and_xi_bounds(self, n):
        for fc in physical_triples(n, 100, seed=50 + n):
            report = closed_form_discord(fc)
            assert report.value_bits >= -1e-12
            assert report.c_max <= report.xi + 1e-15
            assert report.xi <= math.sqrt(3.0) * report.c_max + 1e-15

    @given(coefficient, coefficient, coefficient, st.permutations([0, 1, 2]), st.tuples(st.booleans(), st.booleans(), st.booleans()))
    @settings(max_examples=150, deadline=None)
    def test_odd_category_symmetry(self, c1, c2, c3, perm, flips):
        c = [c1, c2, c3]
        if not is_physical(FamilyCoefficients(3, *c)):
            return
        mangled = [(-1 if flips[i] else 1) * c[perm[i]] for i in range(3)]
        a = closed_form_discord(FamilyCoefficients(3, *c)).value_bits
        b = closed_form_discord(FamilyCoefficients(3, *mangled)).value_bits
        assert a == pytest.approx(b, abs=1e-13)

    @given(st.sampled_from([2, 4]), coefficient, coefficient, coefficient)
    @settings(max_examples=150, deadline=None)
    def test_even_category_two_sign_flips(self, n, c1, c2, c3):
        if not is_physical(FamilyCoefficients(n, c1, c2, c3)):
            return
        a = closed_form_discord(FamilyCoefficients(n, c1, c2, c3)).value_bits
        for flipped in [(-c1, -c2, c3), (-c1, c2, -c3), (c1, -c2, -c3)]:
            b = closed_form_discord(FamilyCoefficients(n, *flipped)).value_bits
            assert a == pytest.approx(b, abs=1e-13)

    def test_category_equivalences_on_grid(self):
        axis = np.linspace(-1, 1, 21)
        c1, c2, c3 = np.meshgrid(axis, axis, axis, indexing="ij")
        odd = discord_value_arrays(3, c1, c2, c3) - discord_value_arrays(5, c1, c2, c3)
        even = discord_value_arrays(2, c1, c2, c3) - discord_value_arrays(6, c1, c2, c3)
        assert np.nanmax(np.abs(odd)) <= 1e-15
        assert np.nanmax(np.abs(even)) <= 1e-15


class TestOptimalAxis:
    def test_picks_largest_coefficient(self):
        assert optimal_axis(FamilyCoefficients(3, 0.3, 0.2, 0.1)) == 1
        assert optimal_axis(FamilyCoefficients(3, 0.1, -0.9, 0.2)) == 2

    def test_tie_breaks_lowest_index(self):
        assert optimal_axis(FamilyCoefficients(3, 0.5, 0.2, -0.5)) == 1


class TestDiscordObjective:
    def test_all_z_tree(self):
        fc = FamilyCoefficients(3, 0.3, 0.2, 0.1)
        got = discord_objective(fc, MeasurementTree.all_z(3))
        expected = entropy_defect(math.sqrt(0.14)) - entropy_defect(0.1)
        assert got == pytest.approx(expected, abs=1e-12)

    def test_max_axis_tree_attains_closed_form(self):
        fc = FamilyCoefficients(3, 0.3, 0.2, 0.1)
        tree = MeasurementTree.axis_aligned(3, optimal_axis(fc))
        got = discord_objective(fc, tree)
        assert got == pytest.approx(closed_form_discord(fc).value_bits, abs=1e-9)

    @pytest.mark.parametrize("n", [3, 4])
    def test_optimal_axis_property_random_states(self, n):
        for fc in physical_triples(n, 10, seed=70 + n):
            tree = MeasurementTree.axis_aligned(n, optimal_axis(fc))
            got = discord_objective(fc, tree)
            assert got == pytest.approx(closed_form_discord(fc).value_bits, abs=1e-9)

    def test_upper_bounds_closed_form_on_random_trees(self):
        rng = np.random.default_rng(80)
        for _ in range(100):
            fc = random_physical(3, rng)
            tree = MeasurementTree.random(3, rng)
            assert discord_objective(fc, tree) >= closed_form_discord(fc).value_bits - 1e-9

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            discord_objective(FamilyCoefficients(3, 0, 0, 0), MeasurementTree.all_z(4))

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_batched_path_matches_reference_path(self, n):
        rng = np.random.default_rng(90 + n)
        fc = random_physical(n, rng)
        rho = build_density_matrix(fc)
        base = unconditional_term(rho)
        trees = [MeasurementTree.random(n, rng) for _ in range(6)]
        flat = np.stack([t.as_flat().ravel() for t in trees])
        fast = _objective_batch(rho.matrix, n, base, flat)
        reference = [discord_objective(fc, t) for t in trees]
        assert np.allclose(fast, reference, atol=1e-12)


class TestOracle:
    def test_three_qubit_example_seed_7(self):
        fc = FamilyCoefficients(3, 0.3, 0.2, 0.1)
        result = oracle_discord(fc, OracleConfig(restarts=400, seed=7))
        assert -1e-9 <= result.gap_to_closed_form <= 5e-4
        assert result.value_bits == pytest.approx(D3_EXAMPLE, abs=5e-4)
        assert result.restart_count == 400

    def test_bell_state(self):
        result = oracle_discord(FamilyCoefficients(2, 1, -1, 1), OracleConfig(restarts=50, seed=1))
        assert result.value_bits == pytest.approx(1.0, abs=1e-6)

    def test_zero_state_flat_objective(self):
        result = oracle_discord(FamilyCoefficients(3, 0, 0, 0), OracleConfig(restarts=40, seed=2))
        assert np.abs(result.restart_values).max() <= 1e-13

    def test_deterministic_given_seed(self):
        fc = FamilyCoefficients(3, 0.4, -0.2, 0.1)
        a = oracle_discord(fc, OracleConfig(restarts=30, seed=9))
        b = oracle_discord(fc, OracleConfig(restarts=30, seed=9))
        assert a.value_bits == b.value_bits
        assert np.array_equal(a.restart_values, b.restart_values)
        assert a.best_tree.to_json() == b.best_tree.to_json()

    def test_restart_streams_independent_of_count(self):
        fc = FamilyCoefficients(3, 0.4, -0.2, 0.1)
        a = oracle_discord(fc, OracleConfig(restarts=20, seed=9))
        b = oracle_discord(fc, OracleConfig(restarts=25, seed=9))
        assert np.array_equal(a.restart_values, b.restart_values[:20])

    def test_upper_bound_invariant(self):
        for fc in physical_triples(3, 5, seed=101):
            result = oracle_discord(fc, OracleConfig(restarts=60, seed=3))
            closed = closed_form_discord(fc).value_bits
            assert result.value_bits >= closed - 1e-9
            assert np.all(result.restart_values >= closed - 1e-9)

    def test_best_tree_reproduces_value(self):
        fc = FamilyCoefficients(3, 0.5, 0.1, -0.3)
        result = oracle_discord(fc, OracleConfig(restarts=40, seed=4))
        assert discord_objective(fc, result.best_tree) == result.value_bits

    def test_rejects_large_registers(self):
        with pytest.raises(UnsupportedSizeError):
            oracle_discord(FamilyCoefficients(6, 0.1, 0.1, 0.1))

    def test_rejects_unphysical(self):
        with pytest.raises(InvalidStateError):
            oracle_discord(FamilyCoefficients(3, 0.8, 0.4, 0.5))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            OracleConfig(restarts=0)
        with pytest.raises(ValueError):
            OracleConfig(tol=0.0)

import numpy as np
import pytest

from torus_echo.dynamics import (
    MapParams,
    apply_propagator,
    apply_to_density,
    build_propagator,
    classical_step,
    lyapunov_closed_form,
    lyapunov_numeric,
    propagator_matrix,
)
from torus_echo.hilbert import coherent_state, make_space, purity

from conftest import random_density, random_state


class TestClassicalStep:
    def test_origin_fixed_point(self):
        assert classical_step((0.0, 0.0), MapParams(2, 2, 0.0)) == (0.0, 0.0)

    def test_linear_map_by_hand(self):
        q, p = classical_step((0.1, 0.1), MapParams(2, 2, 0.0))
        assert p == pytest.approx(0.3, abs=1e-15)
        assert q == pytest.approx(0.7, abs=1e-15)

    def test_sheared_step_oracle(self):
        # independent full-precision evaluation, frozen:
        # p' = 0.5 + 0.02*pi*(cos(pi/2) - cos(pi)),  q' = 0.25 + 2 p' mod 1
        q, p = classical_step((0.25, 0.0), MapParams(2, 2, 0.01))
        assert p == pytest.approx(0.5628318530717958, abs=1e-15)
        assert q == pytest.approx(0.3756637061435917, abs=1e-15)

    def test_wraps_mod_one(self):
        q, p = classical_step((0.9, 0.9), MapParams(4, 4, 0.0))
        assert 0.0 <= q < 1.0 and 0.0 <= p < 1.0


class TestMapParams:
    def test_odd_integers_rejected(self):
        with pytest.raises(ValueError):
            MapParams(3, 2, 0.0)
        with pytest.raises(ValueError):
            MapParams(2, 1, 0.0)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            MapParams(-2, 2, 0.0)
        with pytest.raises(ValueError):
            MapParams(2, 2, -0.1)


class TestLyapunov:
    def test_paper_value_ab2(self):
        assert lyapunov_closed_form(2, 2) == pytest.approx(1.76275, abs=1e-5)
        assert lyapunov_closed_form(2, 2) == pytest.approx(np.log(3 + 2 * np.sqrt(2)), abs=1e-14)

    def test_paper_value_ab4(self):
        assert lyapunov_closed_form(4, 4) == pytest.approx(2.88727, abs=1e-5)
        assert lyapunov_closed_form(4, 4) == pytest.approx(np.log(9 + 4 * np.sqrt(5)), abs=1e-14)

    def test_eigenvalue_oracle_ab1(self):
        # leading eigenvalue of [[1,1],[1,2]] is (3+sqrt(5))/2
        assert lyapunov_closed_form(1, 1) == pytest.approx(np.log((3 + np.sqrt(5)) / 2), abs=1e-14)
        assert lyapunov_closed_form(1, 1) == pytest.approx(0.96242, abs=1e-5)

    def test_domain(self):
        with pytest.raises(ValueError):
            lyapunov_closed_form(0, 4)

    def test_numeric_matches_linear_map(self):
        got = lyapunov_numeric(MapParams(2, 2, 0.0), n_iter=100_000, seed=0)
        assert got == pytest.approx(lyapunov_closed_form(2, 2), abs=1e-3)

    def test_numeric_ab4(self):
        got = lyapunov_numeric(MapParams(4, 4, 0.0), n_iter=100_000, seed=1)
        assert got == pytest.approx(2.88727, abs=1e-3)

    def test_numeric_small_shear(self):
        got = lyapunov_numeric(MapParams(2, 2, 0.0002), n_iter=100_000, seed=2)
        assert got == pytest.approx(1.76275, abs=1e-2)

    def test_numeric_deterministic(self):
        a = lyapunov_numeric(MapParams(2, 2, 0.01), n_iter=20_000, seed=5)
        b = lyapunov_numeric(MapParams(2, 2, 0.01), n_iter=20_000, seed=5)
        assert a == b

    def test_numeric_rejects_short_runs(self):
        with pytest.raises(ValueError):
            lyapunov_numeric(MapParams(2, 2, 0.0), n_iter=100, seed=0)


class TestPropagator:
    def test_phases_unit_modulus(self):
        prop = build_propagator(make_space(256), MapParams(2, 2, 0.01))
        assert np.max(np.abs(np.abs(prop.kick_phases) - 1.0)) < 1e-12
        assert np.max(np.abs(np.abs(prop.kinetic_phases) - 1.0)) < 1e-12

    def test_norm_preserved(self, rng):
        prop = build_propagator(make_space(128), MapParams(4, 2, 0.03))
        for _ in range(5):
            psi = random_state(128, rng)
            assert np.linalg.norm(apply_propagator(psi, prop)) == pytest.approx(1.0, abs=1e-12)

    def test_adjoint_inverts_forward(self, rng):
        prop = build_propagator(make_space(64), MapParams(2, 2, 0.007))
        psi = random_state(64, rng)
        back = apply_propagator(apply_propagator(psi, prop), prop, "adjoint")
        assert np.max(np.abs(back - psi)) < 1e-10

    def test_matches_matrix_oracle(self, rng):
        # explicit 8x8 unitary built entrywise from the DFT matrix
        N = 8
        prop = build_propagator(make_space(N), MapParams(2, 4, 0.11))
        U = propagator_matrix(prop)
        assert np.max(np.abs(U @ U.conj().T - np.eye(N))) < 1e-12
        psi = random_state(N, rng)
        assert np.max(np.abs(apply_propagator(psi, prop) - U @ psi)) < 1e-10

    def test_dimension_mismatch(self, rng):
        prop = build_propagator(make_space(16), MapParams(2, 2, 0.0))
        with pytest.raises(ValueError):
            apply_propagator(random_state(8, rng), prop)

    def test_bad_direction(self, rng):
        prop = build_propagator(make_space(8), MapParams(2, 2, 0.0))
        with pytest.raises(ValueError):
            apply_propagator(random_state(8, rng), prop, "backward")


class TestClassicalCorrespondence:
    """Coherent-state transport follows the classical map.

    One step of a hyperbolic map squeezes a coherent state by the stretch
    factor mu, so the overlap with a fresh coherent state at the classical
    image is bounded by 2/(mu + 1/mu); for a=b=2 that is exactly 1/3.  The
    peak of the evolved state must still sit on the classical trajectory.
    """

    def test_single_step_overlap_at_squeeze_bound(self):
        N = 2**10
        space = make_space(N)
        params = MapParams(2, 2, 0.0)
        prop = build_propagator(space, params)
        mu = np.exp(lyapunov_closed_form(2, 2))
        bound = 2.0 / (mu + 1.0 / mu)
        point = (0.3, 0.2)
        state = coherent_state(space, *point)
        for _ in range(3):
            point = classical_step(point, params)
            state = apply_propagator(state, prop)
            target = coherent_state(space, *point)
            overlap = abs(np.vdot(target, state)) ** 2
            assert overlap > 0.9 * bound   # tracks the classical point
            assert overlap > 100.0 / N     # far above the random-state floor
            state = target                 # restart from a fresh coherent state

    def test_position_peak_tracks_classical_point(self):
        N = 2**10
        space = make_space(N)
        params = MapParams(2, 2, 0.0)
        prop = build_propagator(space, params)
        point = (0.3, 0.2)
        state = coherent_state(space, *point)
        for _ in range(3):
            point = classical_step(point, params)
            state = apply_propagator(state, prop)
            peak = np.argmax(np.abs(state)) / N
            dist = abs(peak - point[0])
            assert min(dist, 1.0 - dist) < 0.02


class TestDensityEvolution:
    def test_trace_preserved(self, rng):
        prop = build_propagator(make_space(32), MapParams(2, 2, 0.02))
        rho = random_density(32, rng)
        assert np.trace(apply_to_density(rho, prop)) == pytest.approx(1.0, abs=1e-12)

    def test_purity_preserved(self, rng):
        prop = build_propagator(make_space(32), MapParams(2, 2, 0.02))
        rho = random_density(32, rng)
        assert purity(apply_to_density(rho, prop)) == pytest.approx(purity(rho), abs=1e-10)

    def test_matches_pure_state_path(self, rng):
        N = 64
        space = make_space(N)
        prop = build_propagator(space, MapParams(2, 2, 0.01))
        psi = random_state(N, rng)
        via_density = apply_to_density(np.outer(psi, psi.conj()), prop)
        upsi = apply_propagator(psi, prop)
        assert np.max(np.abs(via_density - np.outer(upsi, upsi.conj()))) < 1e-10

    def test_dimension_mismatch(self, rng):
        prop = build_propagator(make_space(16), MapParams(2, 2, 0.0))
        with pytest.raises(ValueError):
            apply_to_density(random_density(8, rng), prop)


def test_determinism_bitwise(rng):
    space = make_space(128)
    params = MapParams(2, 2, 0.004)
    prop1 = build_propagator(space, params)
    prop2 = build_propagator(space, params)
    psi = random_state(128, rng)
    out1 = apply_propagator(psi, prop1)
    out2 = apply_propagator(psi, prop2)
    assert np.array_equal(out1, out2)

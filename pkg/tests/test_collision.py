import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import random_case, random_density_matrix
from kdcollide.collision import (
    bch_collide_once,
    collide_once,
    evolve,
    find_steady_state,
)
from kdcollide.linalg import (
    dag,
    is_density_matrix,
    psd_floor,
    tensor,
    trace_distance,
    unitary_from_hamiltonian,
)
from kdcollide.model import (
    MODE_WEAK,
    ModelConfig,
    SystemStateParams,
    build_ancilla,
    build_hamiltonians,
    build_system_state,
)


def resonant_cfg(**kwargs):
    defaults = dict(omega_s=1.0, omega_a=1.0, g=1.0, tau=0.5, beta=1.0)
    defaults.update(kwargs)
    return ModelConfig(**defaults)


class TestCollideOnce:
    def test_zero_time_is_identity(self, rng):
        rho = random_density_matrix(rng)
        rho_next, _ = collide_once(rho, resonant_cfg(tau=0.0, lam=0.2))
        assert_allclose(rho_next, rho, atol=1e-14)

    def test_thermal_fixed_point(self):
        cfg = resonant_cfg(lam=0.0)
        _, rho_th, _ = build_ancilla(cfg)
        rho_next, _ = collide_once(rho_th, cfg)
        assert_allclose(rho_next, rho_th, atol=1e-14)

    def test_swap_populations(self):
        # For a diagonal input and thermal ancilla the |0> population after
        # one collision is p0*cos(g tau)^2 + p_th * sin(g tau)^2.
        for gtau in (0.3, 0.9, math.pi / 2):
            cfg = resonant_cfg(tau=gtau, beta=0.8, lam=0.0)
            rho0 = build_system_state(SystemStateParams(0.85))
            rho1, _ = collide_once(rho0, cfg)
            p_th = math.exp(-0.4) / cfg.z_a
            expected = 0.85 * math.cos(gtau) ** 2 + p_th * math.sin(gtau) ** 2
            assert abs(rho1[0, 0].real - expected) < 1e-13
            assert abs(rho1[0, 1]) < 1e-14

    def test_outputs_are_states(self, rng):
        for _ in range(10):
            cfg, state = random_case(rng)
            rho_next, rho_sa = collide_once(build_system_state(state), cfg)
            assert is_density_matrix(rho_next)
            assert is_density_matrix(rho_sa)


class TestFirstLaw:
    @pytest.mark.filterwarnings("ignore::kdcollide.kdq.ValidityWarning")
    def test_per_step_energy_balance(self, rng):
        for _ in range(10):
            cfg, state = random_case(rng)
            trajectory = evolve(build_system_state(state), cfg, 3, thermo=True)
            scale = max(1.0, cfg.hbar * abs(cfg.omega_s))
            for record in trajectory.per_step:
                assert abs(record.delta_e_s + record.delta_e_a - record.delta_e_sa) < 1e-10 * scale

    @pytest.mark.filterwarnings("ignore::kdcollide.kdq.ValidityWarning")
    def test_resonant_total_energy_conserved(self, rng):
        for _ in range(10):
            cfg, state = random_case(rng, resonant=True)
            trajectory = evolve(build_system_state(state), cfg, 3, thermo=True)
            for record in trajectory.per_step:
                assert abs(record.delta_e_sa) < 1e-10


class TestBch:
    def test_requires_weak_mode(self, rng):
        with pytest.raises(ValueError):
            bch_collide_once(random_density_matrix(rng), resonant_cfg(lam=0.1))

    def test_small_tau_limit(self, rng):
        rho = random_density_matrix(rng)
        cfg = resonant_cfg(tau=1e-8, lam_tilde=0.2, mode=MODE_WEAK)
        rho_a, _, _ = build_ancilla(cfg)
        assert np.linalg.norm(bch_collide_once(rho, cfg) - tensor(rho, rho_a)) < 1e-3

    def test_trace_exactly_one(self, rng):
        rho = random_density_matrix(rng)
        cfg = resonant_cfg(tau=0.05, lam_tilde=0.4, mode=MODE_WEAK)
        assert abs(np.trace(bch_collide_once(rho, cfg)) - 1.0) < 1e-14

    def test_third_order_local_error(self, rng):
        # Against the exact exponential of the same scaled Hamiltonian the
        # truncation error is third order: halving tau divides it by ~8.
        # Configs are chosen with g ~ sqrt(tau) and lam_tilde ~ 1/sqrt(tau)
        # so every tau describes the same physical generator.
        rho = random_density_matrix(rng)
        for tau0 in (math.pi / 360, math.pi / 3600):
            errors = []
            for tau in (tau0, tau0 / 2.0):
                cfg = ModelConfig(
                    omega_s=1.0, omega_a=1.0, g=math.sqrt(tau), tau=tau, beta=0.7,
                    lam_tilde=0.2 / math.sqrt(tau), mode=MODE_WEAK,
                )
                _, _, _, h_sa = build_hamiltonians(cfg)
                rho_a, _, _ = build_ancilla(cfg)
                u = unitary_from_hamiltonian(h_sa, tau, cfg.hbar)
                exact = u @ tensor(rho, rho_a) @ dag(u)
                errors.append(np.linalg.norm(exact - bch_collide_once(rho, cfg)))
            assert 6.5 < errors[0] / errors[1] < 9.5

    def test_psd_violation_is_recordable(self):
        # The truncated map may dip slightly below PSD; it is recorded, not
        # repaired.
        cfg = resonant_cfg(tau=0.3, lam_tilde=0.5, mode=MODE_WEAK)
        rho = build_system_state(SystemStateParams(0.25, math.sqrt(3) / 4, 0.3))
        joint = bch_collide_once(rho, cfg)
        assert abs(np.trace(joint) - 1.0) < 1e-14
        assert -0.05 < psd_floor(joint) < 1.0


class TestEvolve:
    def test_single_step_matches_collide_once(self, rng):
        cfg, state = random_case(rng)
        rho0 = build_system_state(state)
        trajectory = evolve(rho0, cfg, 1)
        expected, _ = collide_once(rho0, cfg)
        assert_allclose(trajectory.states[1], expected, atol=1e-15)

    def test_states_stay_physical(self, rng):
        cfg, state = random_case(rng)
        trajectory = evolve(build_system_state(state), cfg, 20)
        for rho in trajectory.states:
            assert is_density_matrix(rho)

    def test_monotone_thermalization(self):
        cfg = resonant_cfg(tau=0.9, lam=0.0)
        _, rho_th, _ = build_ancilla(cfg)
        trajectory = evolve(build_system_state(SystemStateParams(0.9, 0.2, 0.5)), cfg, 60)
        distances = [trace_distance(rho, rho_th) for rho in trajectory.states]
        assert all(d2 <= d1 + 1e-14 for d1, d2 in zip(distances, distances[1:]))
        assert distances[-1] < 1e-6

    def test_markovian_suffix(self, rng):
        cfg, state = random_case(rng)
        full = evolve(build_system_state(state), cfg, 6)
        suffix = evolve(full.states[3], cfg, 3)
        for a, b in zip(full.states[3:], suffix.states):
            assert_allclose(a, b, atol=1e-15)

    @pytest.mark.filterwarnings("ignore::kdcollide.kdq.ValidityWarning")
    def test_record_count(self, rng):
        cfg, state = random_case(rng)
        trajectory = evolve(build_system_state(state), cfg, 5, thermo=True)
        assert len(trajectory.per_step) == len(trajectory.states) - 1

    @pytest.mark.filterwarnings("ignore::kdcollide.kdq.ValidityWarning")
    def test_split_absent_off_resonance(self, rng):
        cfg, state = random_case(rng, resonant=False)
        record = evolve(build_system_state(state), cfg, 1, thermo=True).per_step[0]
        assert record.w_s is None and record.q_a is None
        assert "w" not in record.moments

    @pytest.mark.filterwarnings("ignore::kdcollide.kdq.ValidityWarning")
    def test_split_consistent_at_resonance(self, rng):
        cfg, state = random_case(rng, resonant=True)
        record = evolve(build_system_state(state), cfg, 1, thermo=True).per_step[0]
        assert abs(record.w_s + record.q_s - record.delta_e_s) < 1e-12
        assert abs(record.w_a + record.q_a - record.delta_e_a) < 1e-12
        assert record.w_avg == record.w_s and record.q_avg == record.q_s
        assert set(record.moments) == {"us", "ua", "usa", "w", "q"}
        assert set(record.nonpositivity) == {"us", "ua", "usa", "q"}

    def test_rejects_zero_collisions(self, rng):
        cfg, state = random_case(rng)
        with pytest.raises(ValueError):
            evolve(build_system_state(state), cfg, 0)


class TestSteadyState:
    def test_thermal_steady_state(self):
        cfg = resonant_cfg(tau=0.5, lam=0.0)
        result = find_steady_state(cfg, tol=1e-12)
        _, rho_th, _ = build_ancilla(cfg)
        assert result.converged
        assert trace_distance(result.state, rho_th) < 1e-10

    def test_coherent_steady_state_has_coherence(self):
        cfg = resonant_cfg(tau=0.5, lam=0.3)
        result = find_steady_state(cfg, tol=1e-12)
        assert result.converged
        assert abs(result.state[0, 1]) > 1e-3
        assert result.residual <= 1e-11

    def test_initial_state_independence(self, rng):
        cfg = resonant_cfg(tau=0.5, lam=0.3)
        tol = 1e-12
        r1 = find_steady_state(cfg, tol=tol)
        r2 = find_steady_state(cfg, tol=tol, rho_s0=random_density_matrix(rng))
        assert trace_distance(r1.state, r2.state) <= 10.0 * tol

    def test_max_iterations_flagged(self):
        cfg = resonant_cfg(tau=0.5, lam=0.3)
        result = find_steady_state(cfg, tol=1e-15, max_iter=3)
        assert not result.converged
        assert result.iterations == 3

    def test_rejects_bad_tolerance(self):
        with pytest.raises(ValueError):
            find_steady_state(resonant_cfg(), tol=0.0)

import math

import numpy as np
import pytest

from kdcollide.model import MODE_WEAK, ModelConfig, SystemStateParams


@pytest.fixture
def rng():
    return np.random.default_rng(987654321)


def random_case(rng, resonant=False, weak=False, coherent=True):
    """Random constraint-respecting (ModelConfig, SystemStateParams) pair."""
    omega_a = rng.uniform(0.3, 2.0)
    delta = 0.0 if resonant else rng.uniform(-20.0, 20.0)
    g = rng.uniform(0.3, 2.0)
    tau = rng.uniform(0.02, 1.5)
    beta = 0.0 if rng.uniform() < 0.05 else rng.uniform(0.05, 4.0)
    cfg = ModelConfig(
        omega_s=omega_a + delta,
        omega_a=omega_a,
        g=g,
        tau=tau,
        beta=beta,
        mode=MODE_WEAK if weak else "exact",
    )
    lam = rng.uniform(-cfg.lambda_max, cfg.lambda_max) if coherent else 0.0
    if weak:
        cfg = ModelConfig(
            omega_s=cfg.omega_s, omega_a=omega_a, g=g, tau=tau, beta=beta,
            lam_tilde=lam / math.sqrt(tau), mode=MODE_WEAK,
        )
    else:
        cfg = ModelConfig(
            omega_s=cfg.omega_s, omega_a=omega_a, g=g, tau=tau, beta=beta, lam=lam
        )
    rho11 = rng.uniform(0.0, 1.0)
    r_max = math.sqrt(rho11 * (1.0 - rho11))
    r = rng.uniform(0.0, r_max) if (coherent and r_max > 0) else 0.0
    state = SystemStateParams(rho11=rho11, r=r, phi_c=rng.uniform(0.0, 2.0 * math.pi))
    return cfg, state


def random_density_matrix(rng, dim=2):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def random_hermitian(rng, dim):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (a + a.conj().T)

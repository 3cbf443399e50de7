"""Qubit-qubit model: Hamiltonians, ancilla and system states, structural checks.

Basis convention: |0> = (1, 0)^T with sigma_z |0> = +|0>, so the level with
index 0 has energy +hbar*omega/2.  The ancilla coherence operator chi_A
defaults to sigma_x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import commutator_norm, is_hermitian, tensor

IDENTITY_2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)   # |0><1|
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |1><0|

MODE_EXACT = "exact"
MODE_WEAK = "weakly_coherent"

# Slack for closed constraints that figure presets saturate exactly
# (lambda = lambda_max, r = r_max).
_BOUNDARY_SLACK = 1e-12


def partition_function(beta: float, omega: float, hbar: float = 1.0) -> float:
    """Z = exp(-beta*hbar*omega/2) + exp(+beta*hbar*omega/2)."""
    return 2.0 * math.cosh(0.5 * beta * hbar * omega)


@dataclass(frozen=True)
class ModelConfig:
    """Physical parameters of a single collision.

    ``lam`` is the ancilla coherence magnitude used in exact mode; in the
    weakly coherent mode the coherence is ``lam_tilde * sqrt(tau)`` with
    ``lam_tilde`` carrying units of time**-1/2.
    """

    omega_s: float
    omega_a: float
    g: float
    tau: float
    beta: float
    lam: float = 0.0
    lam_tilde: float = 0.0
    hbar: float = 1.0
    mode: str = MODE_EXACT

    def __post_init__(self) -> None:
        if self.mode not in (MODE_EXACT, MODE_WEAK):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.g <= 0:
            raise ValueError("coupling g must be positive")
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")
        if self.beta < 0:
            raise ValueError("inverse temperature beta must be non-negative")
        if self.mode == MODE_WEAK:
            if self.tau <= 0:
                raise ValueError("weakly coherent mode requires tau > 0")
        elif self.tau < 0:
            raise ValueError("collision time tau must be non-negative")
        bound = self.lambda_max
        if abs(self.lambda_eff) > bound + _BOUNDARY_SLACK:
            raise ValueError(
                f"ancilla coherence {self.lambda_eff:.6g} exceeds the "
                f"positivity bound 1/Z_A = {bound:.6g}"
            )

    @property
    def detuning(self) -> float:
        return self.omega_s - self.omega_a

    @property
    def is_weak(self) -> bool:
        return self.mode == MODE_WEAK

    @property
    def z_a(self) -> float:
        return partition_function(self.beta, self.omega_a, self.hbar)

    @property
    def lambda_max(self) -> float:
        """Largest coherence magnitude keeping the ancilla state PSD."""
        return 1.0 / self.z_a

    @property
    def lambda_eff(self) -> float:
        """Coherence magnitude actually entering the ancilla state."""
        if self.is_weak:
            return self.lam_tilde * math.sqrt(self.tau)
        return self.lam

    @property
    def kdq_coherence_prefactor(self) -> float:
        """Prefactor of the coherent-work quasiprobabilities (lam or lam_tilde)."""
        return self.lam_tilde if self.is_weak else self.lam


@dataclass(frozen=True)
class SystemStateParams:
    """Parametrization of the system qubit state.

    ``rho11`` is the population of |0>, ``r * exp(i*phi_c)`` the upper-right
    coherence.
    """

    rho11: float
    r: float = 0.0
    phi_c: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.rho11 <= 1.0:
            raise ValueError("rho11 must lie in [0, 1]")
        if self.r < 0:
            raise ValueError("coherence modulus r must be non-negative")
        if self.r**2 > self.rho11 * (1.0 - self.rho11) + _BOUNDARY_SLACK:
            raise ValueError(
                f"r={self.r:.6g} violates positivity: r^2 must not exceed "
                f"rho11*(1-rho11) = {self.rho11 * (1.0 - self.rho11):.6g}"
            )

    @property
    def rho12(self) -> complex:
        return self.r * complex(math.cos(self.phi_c), math.sin(self.phi_c))


def build_system_state(params: SystemStateParams) -> np.ndarray:
    """2x2 density matrix from the population/coherence parametrization."""
    rho12 = params.rho12
    return np.array(
        [[params.rho11, rho12], [np.conj(rho12), 1.0 - params.rho11]], dtype=complex
    )


def build_hamiltonians(
    cfg: ModelConfig,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Return (H_S, H_A, H_int, H_SA).

    H_S and H_A are local 2x2 operators; H_int and H_SA act on the 4-dim
    joint space.  The excitation-swapping coupling is hbar*g*(s+ s- + s- s+):
    this normalization makes g*tau the pulse area of the resonant collision,
    which is the convention all closed-form results in `analytic` assume.
    In the weakly coherent mode the interaction enters H_SA scaled by
    1/sqrt(tau).
    """
    h_s = 0.5 * cfg.hbar * cfg.omega_s * SIGMA_Z
    h_a = 0.5 * cfg.hbar * cfg.omega_a * SIGMA_Z
    h_int = cfg.hbar * cfg.g * (
        tensor(SIGMA_PLUS, SIGMA_MINUS) + tensor(SIGMA_MINUS, SIGMA_PLUS)
    )
    scale = 1.0 / math.sqrt(cfg.tau) if cfg.is_weak else 1.0
    h_sa = tensor(h_s, IDENTITY_2) + tensor(IDENTITY_2, h_a) + scale * h_int
    return h_s, h_a, h_int, h_sa


def build_ancilla(
    cfg: ModelConfig, chi_a: np.ndarray | None = None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (rho_a, rho_a_th, chi_a) for the environment qubit.

    rho_a = rho_a_th + lambda_eff * chi_a.  A coherence magnitude beyond
    1/Z_A is rejected because it would break positive semi-definiteness.
    """
    if chi_a is None:
        chi_a = SIGMA_X
    else:
        chi_a = np.asarray(chi_a, dtype=complex)
        if chi_a.shape != (2, 2) or not is_hermitian(chi_a):
            raise ValueError("chi_a must be a Hermitian 2x2 matrix")
        if np.max(np.abs(np.diag(chi_a))) > 1e-14:
            raise ValueError("chi_a must have no diagonal elements in the H_A eigenbasis")
    z_a = cfg.z_a
    x = 0.5 * cfg.beta * cfg.hbar * cfg.omega_a
    rho_a_th = np.diag([math.exp(-x) / z_a, math.exp(x) / z_a]).astype(complex)
    lam_eff = cfg.lambda_eff
    if abs(lam_eff) > cfg.lambda_max + _BOUNDARY_SLACK:
        raise ValueError(
            f"coherence magnitude {lam_eff:.6g} exceeds the maximal admissible "
            f"value 1/Z_A = {cfg.lambda_max:.6g}"
        )
    rho_a = rho_a_th + lam_eff * chi_a
    return rho_a, rho_a_th, chi_a


def total_bare_hamiltonian(cfg: ModelConfig) -> np.ndarray:
    """H_S (x) I + I (x) H_A on the joint space."""
    h_s, h_a, _, _ = build_hamiltonians(cfg)
    return tensor(h_s, IDENTITY_2) + tensor(IDENTITY_2, h_a)


def check_energy_preserving(cfg: ModelConfig, tol: float = 1e-10) -> bool:
    """True iff [H_int, H_S + H_A] vanishes (resonant interaction)."""
    _, _, h_int, _ = build_hamiltonians(cfg)
    h_bare = total_bare_hamiltonian(cfg)
    # Scale-free criterion: the commutator of A and B lives on the scale
    # ||A||*||B||, whatever the unit system.
    scale = float(np.linalg.norm(h_int)) * float(np.linalg.norm(h_bare))
    return commutator_norm(h_int, h_bare) <= tol * scale


def check_excitation_preserving(cfg: ModelConfig, tol: float = 1e-10) -> bool:
    """True iff [H_int, n_S + n_A] vanishes, with n = |0><0| locally."""
    _, _, h_int, _ = build_hamiltonians(cfg)
    number_op = SIGMA_PLUS @ SIGMA_MINUS
    n_total = tensor(number_op, IDENTITY_2) + tensor(IDENTITY_2, number_op)
    scale = float(np.linalg.norm(h_int)) * float(np.linalg.norm(n_total))
    return commutator_norm(h_int, n_total) <= tol * scale

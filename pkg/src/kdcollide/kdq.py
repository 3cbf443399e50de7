"""Kirkwood-Dirac quasiprobability (KDQ) distributions of collision energetics.

Seven stochastic quantities are supported, identified by the strings in
``QUANTITIES``:

- ``us``, ``ua``, ``usa``: internal energy change of the system, of the
  ancilla, and of the bare S+A pair over one collision, sampled over the
  full ancilla state.
- ``w``, ``q``: coherent work and incoherent heat from the ancilla point of
  view (stochastic values ``-u_a``), built over the ancilla's coherent part
  chi_A and thermal part respectively.
- ``ws``, ``qs``: the same split from the system point of view (values
  ``+u_s``).

All quasiprobabilities are two-time traces Tr[U^dag P_fin U P_in rho] with
the bare collision unitary U = exp(-i (H_S + H_A + H_int) tau / hbar); see
``measurement_unitary``.  Distributions over unit-trace states sum to 1,
the coherent-work ones sum to 0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .linalg import dag, eig_hermitian, tensor, unitary_from_hamiltonian
from .model import IDENTITY_2, ModelConfig, build_ancilla, build_hamiltonians

US = "us"
UA = "ua"
USA = "usa"
W = "w"
Q = "q"
WS = "ws"
QS = "qs"
QUANTITIES = (US, UA, USA, W, Q, WS, QS)
UNIT_SUM = (US, UA, USA, Q, QS)
ZERO_SUM = (W, WS)
_WORK_HEAT = (W, Q, WS, QS)

# Pulse areas beyond this enter the strong-coupling regime where the
# coherent-work / incoherent-heat split loses its thermodynamic meaning.
PULSE_AREA_VALIDITY = math.pi / 6


class ValidityWarning(UserWarning):
    """Coherent-work/heat quantities evaluated outside their trusted regime."""


@dataclass(frozen=True)
class TransitionLabel:
    """Initial/final eigenvalue indices of one transition.

    For ``usa`` the indices are (system, ancilla) pairs unless the
    distribution was built with degenerate levels grouped.
    """

    quantity: str
    i_in: int | tuple[int, int]
    i_fin: int | tuple[int, int]


@dataclass(frozen=True)
class KdqEntry:
    label: TransitionLabel
    value: float
    quasiprob: complex


@dataclass(frozen=True)
class KdqDistribution:
    quantity: str
    entries: tuple[KdqEntry, ...]
    collision_index: int = 1
    # Local level energies (system, ancilla), kept for marginalization.
    local_energies: tuple[tuple[float, ...], tuple[float, ...]] | None = None

    def total(self) -> complex:
        return complex(sum(e.quasiprob for e in self.entries))

    def quasiprobs(self) -> np.ndarray:
        return np.array([e.quasiprob for e in self.entries], dtype=complex)

    def values(self) -> np.ndarray:
        return np.array([e.value for e in self.entries], dtype=float)


@dataclass(frozen=True)
class MomentSet:
    """First two moments; variance = second_moment - mean**2 by construction."""

    mean: complex
    second_moment: complex
    variance: complex


@dataclass(frozen=True)
class NonPositivityReport:
    n_q: float
    n_re: float
    n_im: float


def measurement_unitary(cfg: ModelConfig) -> np.ndarray:
    """Bare collision unitary exp(-i (H_S + H_A + H_int) tau / hbar).

    This is the propagator entering every quasiprobability formula.  It never
    carries the weakly-coherent 1/sqrt(tau) interaction scaling; for
    distributions of a scaled trajectory pass that propagator explicitly via
    the ``unitary`` argument of `kdq_distribution`.
    """
    h_s, h_a, h_int, _ = build_hamiltonians(cfg)
    h_total = tensor(h_s, IDENTITY_2) + tensor(IDENTITY_2, h_a) + h_int
    return unitary_from_hamiltonian(h_total, cfg.tau, cfg.hbar)


def _check_work_heat_regime(cfg: ModelConfig) -> None:
    scale = max(1.0, abs(cfg.omega_s), abs(cfg.omega_a))
    off_resonant = abs(cfg.detuning) > 1e-12 * scale
    if off_resonant and not cfg.is_weak:
        raise ValueError(
            "coherent-work/heat quasiprobabilities require a resonant "
            f"interaction in exact mode (detuning {cfg.detuning:.6g})"
        )
    if off_resonant:
        warnings.warn(
            "coherent-work/heat split off resonance is not energy-preserving",
            ValidityWarning,
            stacklevel=3,
        )
    if cfg.g * cfg.tau > PULSE_AREA_VALIDITY + 1e-12:
        warnings.warn(
            f"pulse area g*tau = {cfg.g * cfg.tau:.4g} exceeds pi/6: "
            "coherent work / incoherent heat enter the strong-coupling regime",
            ValidityWarning,
            stacklevel=3,
        )


def kdq_distribution(
    quantity: str,
    rho_s: np.ndarray,
    cfg: ModelConfig,
    unitary: np.ndarray | None = None,
    collision_index: int = 1,
    group_degenerate: bool = False,
) -> KdqDistribution:
    """KDQ distribution of one stochastic quantity for a single collision.

    Entries are enumerated with the initial index as the major key and the
    final index as the minor key, each ascending.  ``usa`` uses the product
    projectors labelled by (system, ancilla) index pairs; with
    ``group_degenerate=True`` levels of H_S + H_A that coincide (resonance)
    are merged into joint eigenspace projectors instead.
    """
    quantity = quantity.lower()
    if quantity not in QUANTITIES:
        raise ValueError(f"unknown quantity {quantity!r}")
    if quantity in _WORK_HEAT:
        _check_work_heat_regime(cfg)
    u = measurement_unitary(cfg) if unitary is None else np.asarray(unitary, dtype=complex)
    if u.shape != (4, 4):
        raise ValueError("unitary must act on the 4-dimensional joint space")
    h_s, h_a, h_int, _ = build_hamiltonians(cfg)
    rho_a, rho_a_th, chi_a = build_ancilla(cfg)

    if quantity in (US, UA, USA):
        weight = tensor(rho_s, rho_a)
    elif quantity in (Q, QS):
        weight = tensor(rho_s, rho_a_th)
    else:
        weight = cfg.kdq_coherence_prefactor * tensor(rho_s, chi_a)

    dec_s = eig_hermitian(h_s)
    dec_a = eig_hermitian(h_a)
    local_energies = None
    sign = 1.0
    if quantity in (US, WS, QS):
        projectors = [tensor(p, IDENTITY_2) for p in dec_s.projectors]
        energies = list(dec_s.eigenvalues)
        labels: list[int | tuple[int, int]] = list(range(len(energies)))
    elif quantity in (UA, W, Q):
        projectors = [tensor(IDENTITY_2, p) for p in dec_a.projectors]
        energies = list(dec_a.eigenvalues)
        labels = list(range(len(energies)))
        if quantity in (W, Q):
            sign = -1.0
    elif group_degenerate:
        h_total = tensor(h_s, IDENTITY_2) + tensor(IDENTITY_2, h_a)
        dec = eig_hermitian(h_total)
        projectors = list(dec.projectors)
        energies = list(dec.eigenvalues)
        labels = list(range(len(energies)))
    else:
        projectors = []
        energies = []
        labels = []
        for ell, p_s in enumerate(dec_s.projectors):
            for k, p_a in enumerate(dec_a.projectors):
                projectors.append(tensor(p_s, p_a))
                energies.append(dec_s.eigenvalues[ell] + dec_a.eigenvalues[k])
                labels.append((ell, k))
        local_energies = (dec_s.eigenvalues, dec_a.eigenvalues)

    back_propagated = [dag(u) @ p @ u for p in projectors]
    entries = []
    for i_in, p_in in enumerate(projectors):
        right = p_in @ weight
        for i_fin, b_fin in enumerate(back_propagated):
            quasiprob = complex(np.trace(b_fin @ right))
            value = sign * (energies[i_fin] - energies[i_in])
            entries.append(
                KdqEntry(TransitionLabel(quantity, labels[i_in], labels[i_fin]), value, quasiprob)
            )
    return KdqDistribution(quantity, tuple(entries), collision_index, local_energies)


def marginalize_usa_to_us(dist: KdqDistribution) -> KdqDistribution:
    """Sum the ``usa`` quasiprobabilities over the ancilla indices."""
    return _marginalize(dist, target=US)


def marginalize_usa_to_ua(dist: KdqDistribution) -> KdqDistribution:
    """Sum the ``usa`` quasiprobabilities over the system indices."""
    return _marginalize(dist, target=UA)


def _marginalize(dist: KdqDistribution, target: str) -> KdqDistribution:
    if dist.quantity != USA or dist.local_energies is None:
        raise ValueError("marginalization needs a usa distribution with pair labels")
    pick = 0 if target == US else 1
    energies = dist.local_energies[pick]
    n = len(energies)
    acc = np.zeros((n, n), dtype=complex)
    for entry in dist.entries:
        acc[entry.label.i_in[pick], entry.label.i_fin[pick]] += entry.quasiprob
    entries = tuple(
        KdqEntry(TransitionLabel(target, i_in, i_fin), energies[i_fin] - energies[i_in], complex(acc[i_in, i_fin]))
        for i_in in range(n)
        for i_fin in range(n)
    )
    return KdqDistribution(target, entries, dist.collision_index)


def moments(dist: KdqDistribution) -> MomentSet:
    """Mean, second moment and variance of a KDQ distribution (complex)."""
    values = dist.values()
    probs = dist.quasiprobs()
    mean = complex(np.sum(probs * values))
    second = complex(np.sum(probs * values**2))
    return MomentSet(mean, second, second - mean**2)


def average_via_trace(
    quantity: str,
    rho_s: np.ndarray,
    cfg: ModelConfig,
    unitary: np.ndarray | None = None,
) -> complex:
    """Single-trace average, bypassing the distribution.

    Equals ``moments(kdq_distribution(...)).mean`` identically; the two paths
    differ only in floating-point grouping.
    """
    quantity = quantity.lower()
    if quantity not in QUANTITIES:
        raise ValueError(f"unknown quantity {quantity!r}")
    if quantity in _WORK_HEAT:
        _check_work_heat_regime(cfg)
    u = measurement_unitary(cfg) if unitary is None else np.asarray(unitary, dtype=complex)
    h_s, h_a, h_int, _ = build_hamiltonians(cfg)
    rho_a, rho_a_th, chi_a = build_ancilla(cfg)

    if quantity in (US, UA, USA):
        weight = tensor(rho_s, rho_a)
    elif quantity in (Q, QS):
        weight = tensor(rho_s, rho_a_th)
    else:
        weight = cfg.kdq_coherence_prefactor * tensor(rho_s, chi_a)

    if quantity in (US, WS, QS):
        observable = tensor(h_s, IDENTITY_2)
        sign = 1.0
    elif quantity == USA:
        observable = tensor(h_s, IDENTITY_2) + tensor(IDENTITY_2, h_a)
        sign = 1.0
    else:
        observable = tensor(IDENTITY_2, h_a)
        sign = -1.0 if quantity in (W, Q) else 1.0
    evolved = u @ weight @ dag(u)
    return sign * complex(np.trace(observable @ (evolved - weight)))


def nonpositivity(dist: KdqDistribution) -> NonPositivityReport:
    """Non-positivity witnesses of a unit-sum KDQ distribution.

    n_q = -1 + sum|q|, n_re = -1 + sum|Re q|, n_im = sum|Im q|; any of them
    being positive certifies genuinely quantum energy statistics.
    """
    if dist.quantity in ZERO_SUM:
        raise ValueError(
            "non-positivity functionals presuppose a unit-sum distribution; "
            f"{dist.quantity!r} sums to zero"
        )
    probs = dist.quasiprobs()
    return NonPositivityReport(
        n_q=float(np.sum(np.abs(probs)) - 1.0),
        n_re=float(np.sum(np.abs(probs.real)) - 1.0),
        n_im=float(np.sum(np.abs(probs.imag))),
    )

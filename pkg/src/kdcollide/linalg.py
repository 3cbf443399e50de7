"""Dense complex matrix algebra sized for few-qubit problems (2x2 and 4x4)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def dag(m: np.ndarray) -> np.ndarray:
    """Hermitian conjugate."""
    return m.conj().T


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two square matrices."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius norm of [a, b]."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(commutator(a, b)))


def partial_trace(m: np.ndarray, keep: str, dims: tuple[int, int] = (2, 2)) -> np.ndarray:
    """Trace out one factor of a bipartite operator.

    ``keep`` selects the surviving factor: "S" keeps the first (left) tensor
    factor, "A" the second.  ``dims`` gives the local dimensions (d_S, d_A).
    """
    d_s, d_a = dims
    m = np.asarray(m, dtype=complex)
    if m.shape != (d_s * d_a, d_s * d_a):
        raise ValueError(f"dimension mismatch: expected {(d_s * d_a,) * 2}, got {m.shape}")
    m4 = m.reshape(d_s, d_a, d_s, d_a)
    key = keep.upper()
    if key == "S":
        return np.einsum("ikjk->ij", m4)
    if key == "A":
        return np.einsum("ikil->kl", m4)
    raise ValueError(f"keep must be 'S' or 'A', got {keep!r}")


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Trace distance (1/2)||a - b||_1 for Hermitian a, b."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(a - b))))


def is_hermitian(m: np.ndarray, tol: float = 1e-10) -> bool:
    # Relative to the matrix scale so the predicate works in any unit system.
    scale = float(np.max(np.abs(m)))
    return bool(np.max(np.abs(m - dag(m))) <= tol * scale) if scale > 0.0 else True


def is_unitary(m: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(dag(m) @ m - np.eye(m.shape[0]))) <= tol)


def is_psd(m: np.ndarray, tol: float = 1e-10) -> bool:
    return psd_floor(m) >= -tol


def trace_one(m: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(abs(np.trace(m) - 1.0) <= tol)


def is_density_matrix(m: np.ndarray, tol: float = 1e-10) -> bool:
    return is_hermitian(m, tol) and is_psd(m, tol) and trace_one(m, max(tol, 1e-12))


def psd_floor(m: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian part; negative values measure PSD violation."""
    return float(np.min(np.linalg.eigvalsh(0.5 * (m + dag(m)))))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Grouped eigendecomposition of a Hermitian matrix.

    Eigenvalues are sorted in descending order; eigenvalues closer than the
    grouping threshold are merged and share one orthogonal projector.
    """

    eigenvalues: tuple[float, ...]
    projectors: tuple[np.ndarray, ...]

    def reconstruct(self) -> np.ndarray:
        out = np.zeros_like(self.projectors[0])
        for lam, proj in zip(self.eigenvalues, self.projectors):
            out = out + lam * proj
        return out


def eig_hermitian(m: np.ndarray, degeneracy_tol: float = 1e-9) -> SpectralDecomposition:
    """Spectral decomposition with degenerate eigenvalues grouped.

    ``degeneracy_tol`` is relative to the spectral range, so resonantly
    degenerate levels are grouped regardless of the overall energy scale.
    """
    m = np.asarray(m, dtype=complex)
    if not is_hermitian(m):
        raise ValueError("eig_hermitian requires a Hermitian matrix")
    evals, evecs = np.linalg.eigh(m)
    evals = evals[::-1]
    evecs = evecs[:, ::-1]
    spread = float(evals[0] - evals[-1])
    threshold = degeneracy_tol * spread

    eigenvalues: list[float] = []
    projectors: list[np.ndarray] = []
    start = 0
    for stop in range(1, len(evals) + 1):
        if stop == len(evals) or evals[start] - evals[stop] > threshold:
            block = evecs[:, start:stop]
            projectors.append(block @ block.conj().T)
            eigenvalues.append(float(np.mean(evals[start:stop])))
            start = stop
    return SpectralDecomposition(tuple(eigenvalues), tuple(projectors))


def unitary_from_hamiltonian(h: np.ndarray, t: float, hbar: float = 1.0) -> np.ndarray:
    """exp(-i h t / hbar) via eigendecomposition of the Hermitian generator."""
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h):
        raise ValueError("unitary_from_hamiltonian requires a Hermitian matrix")
    evals, evecs = np.linalg.eigh(h)
    phases = np.exp(-1j * evals * t / hbar)
    return (evecs * phases) @ evecs.conj().T

"""Exact complex 2x2 operator algebra for a two-level system.

Everything downstream (filter equations, purity rates, the brute-force
operator-level cross checks) is built on the Pauli matrices, the
Bloch-vector parametrization rho = (I + x sx + y sy + z sz)/2 and the
Lindblad generator in the Heisenberg picture.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidStateError

IDENTITY = np.array([[1.0, 0.0], [0.0, 1.0]], dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
# basis order (|e>, |g>): north pole z=+1 is the excited state
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)

_PAULI = {
    "x": SIGMA_X,
    "y": SIGMA_Y,
    "z": SIGMA_Z,
    "plus": SIGMA_PLUS,
    "minus": SIGMA_MINUS,
    "identity": IDENTITY,
}


def pauli(axis: str) -> np.ndarray:
    """Return a copy of sigma_axis; axis in {x, y, z, plus, minus, identity}."""
    try:
        return _PAULI[axis].copy()
    except KeyError:
        raise ValueError(f"unknown pauli axis {axis!r}") from None


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def bloch_to_density(b) -> np.ndarray:
    """Density operator of the Bloch vector (x, y, z); Hermitian, trace 1."""
    x, y, z = b
    return 0.5 * (IDENTITY + x * SIGMA_X + y * SIGMA_Y + z * SIGMA_Z)


def density_to_bloch(rho: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Invert bloch_to_density via x = Tr[rho sx] etc.

    Raises InvalidStateError if rho is not Hermitian with unit trace
    (within tol).  Unphysical norms (|b| > 1) are returned as-is.
    """
    rho = np.asarray(rho, dtype=complex)
    if abs(np.trace(rho) - 1.0) > tol:
        raise InvalidStateError(f"trace {np.trace(rho)} != 1")
    if np.max(np.abs(rho - dagger(rho))) > tol:
        raise InvalidStateError("density operator is not Hermitian")
    return np.array([
        np.trace(rho @ SIGMA_X).real,
        np.trace(rho @ SIGMA_Y).real,
        np.trace(rho @ SIGMA_Z).real,
    ])


def purity_density(rho: np.ndarray) -> float:
    """Purity P = 2 Tr[rho^2] - 1; 1 for pure states, 0 when fully mixed."""
    rho = np.asarray(rho, dtype=complex)
    return float(2.0 * np.trace(rho @ rho).real - 1.0)


@dataclass(frozen=True)
class SystemTriple:
    """Open-system model (S, L, H) plus the two-level rates it was built from.

    S must be unitary and H Hermitian (checked to 1e-12 on construction).
    The two-level instantiation is S = I, L = sqrt(gamma) sigma_minus,
    H = (omega/2) sigma_z.
    """

    S: np.ndarray
    L: np.ndarray
    H: np.ndarray
    gamma: float
    omega: float

    def __post_init__(self):
        s = np.asarray(self.S, dtype=complex)
        h = np.asarray(self.H, dtype=complex)
        if np.max(np.abs(dagger(s) @ s - IDENTITY)) > 1e-12:
            raise InvalidStateError("scattering matrix S is not unitary")
        if np.max(np.abs(h - dagger(h))) > 1e-12:
            raise InvalidStateError("Hamiltonian H is not Hermitian")

    @classmethod
    def two_level(cls, gamma: float, omega: float) -> "SystemTriple":
        if gamma < 0:
            raise ValueError("coupling rate gamma must be >= 0")
        return cls(
            S=IDENTITY.copy(),
            L=np.sqrt(gamma) * SIGMA_MINUS,
            H=0.5 * omega * SIGMA_Z,
            gamma=float(gamma),
            omega=float(omega),
        )


def lindblad_generator(G: SystemTriple, X: np.ndarray) -> np.ndarray:
    """Heisenberg-picture generator -i[X,H] + L'[X,L]/2 + [L',X]L/2."""
    L, H = G.L, G.H
    Ld = dagger(L)
    return (-1j * commutator(X, H)
            + 0.5 * (Ld @ commutator(X, L))
            + 0.5 * (commutator(Ld, X) @ L))


def lindblad_adjoint(G: SystemTriple, rho: np.ndarray) -> np.ndarray:
    """Schroedinger-picture generator -i[H,rho] + L rho L' - {L'L, rho}/2."""
    L, H = G.L, G.H
    Ld = dagger(L)
    LdL = Ld @ L
    return (-1j * commutator(H, rho)
            + L @ rho @ Ld
            - 0.5 * (LdL @ rho + rho @ LdL))

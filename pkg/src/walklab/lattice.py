"""Walker states on the 1D integer lattice and distribution statistics.

A quantum state stores two complex amplitude arrays (left-mover and
right-mover components) over a contiguous position window; a classical state
stores one probability array over the same kind of window. Windows grow as
the walk spreads, so propagation is exact: no probability is ever clipped.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, EmptyStateError

# coin basis component indices
LEFT = 0
RIGHT = 1


@dataclass
class QuantumState:
    """Coin ⊗ position amplitudes over the window [n_min, n_min + width)."""

    time: int
    n_min: int
    psi: np.ndarray  # complex128, shape (2, width); row 0 = L, row 1 = R

    @property
    def width(self) -> int:
        return self.psi.shape[1]

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_min + self.width)

    def mass(self) -> float:
        return float(np.sum(np.abs(self.psi) ** 2))


@dataclass
class ClassicalState:
    """Probability mass over the window [n_min, n_min + width)."""

    time: int
    n_min: int
    prob: np.ndarray  # float64, shape (width,)

    @property
    def width(self) -> int:
        return self.prob.shape[0]

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_min + self.width)

    def mass(self) -> float:
        return float(np.sum(self.prob))


@dataclass
class PositionDistribution:
    """Probabilities by lattice site at a fixed time; mass may be < 1."""

    time: int
    positions: np.ndarray
    probs: np.ndarray

    def mass(self) -> float:
        return float(np.sum(self.probs))


def initial_quantum_state(
    position: int = 0,
    amp_left: complex = 1.0,
    amp_right: complex = 0.0,
) -> QuantumState:
    """Walker localized at one site with the given coin amplitudes.

    The coin vector must be normalized: |amp_left|² + |amp_right|² = 1.
    """
    norm = abs(amp_left) ** 2 + abs(amp_right) ** 2
    if abs(norm - 1.0) > 1e-12:
        raise ConfigurationError(
            f"initial coin amplitudes must be normalized, got |.|^2 = {norm}"
        )
    psi = np.zeros((2, 1), dtype=np.complex128)
    psi[LEFT, 0] = amp_left
    psi[RIGHT, 0] = amp_right
    return QuantumState(time=0, n_min=int(position), psi=psi)


def initial_classical_state(position: int = 0) -> ClassicalState:
    """Point mass at one lattice site."""
    return ClassicalState(time=0, n_min=int(position), prob=np.array([1.0]))


def total_mass(state) -> float:
    """Unabsorbed probability mass of a quantum or classical state."""
    return state.mass()


def probability_distribution(state) -> PositionDistribution:
    """Site-by-site probabilities of a quantum or classical state."""
    if isinstance(state, QuantumState):
        probs = np.abs(state.psi[LEFT]) ** 2 + np.abs(state.psi[RIGHT]) ** 2
    elif isinstance(state, ClassicalState):
        probs = state.prob.copy()
    else:
        raise ConfigurationError(f"not a walker state: {type(state).__name__}")
    return PositionDistribution(
        time=state.time, positions=state.positions.copy(), probs=probs
    )


def renormalize(dist: PositionDistribution) -> PositionDistribution:
    """Rescale to unit mass (conditioning on survival)."""
    m = dist.mass()
    if m <= 0.0:
        raise EmptyStateError("cannot renormalize a zero-mass distribution")
    return PositionDistribution(
        time=dist.time, positions=dist.positions.copy(), probs=dist.probs / m
    )


def mean_position(dist: PositionDistribution) -> float:
    m = dist.mass()
    if m <= 0.0:
        raise EmptyStateError("zero-mass distribution has no mean position")
    return float(np.sum(dist.positions * dist.probs) / m)


def std_dev(dist: PositionDistribution) -> float:
    """Standard deviation of position under the (renormalized) distribution."""
    m = dist.mass()
    if m <= 0.0:
        raise EmptyStateError("zero-mass distribution has no spread")
    mu = float(np.sum(dist.positions * dist.probs) / m)
    second = float(np.sum(dist.positions.astype(float) ** 2 * dist.probs) / m)
    var = second - mu * mu
    return float(np.sqrt(max(var, 0.0)))

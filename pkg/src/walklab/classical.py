"""Classical random walk: exact propagation, absorber, first-passage laws.

The walker splits its mass half left, half right by the step length each
step; the absorber removes mass at or beyond its position exactly as in the
quantum engine. Exact vector propagation replaces Monte Carlo everywhere;
trajectory sampling exists only in the test suite as a cross-check oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np
from scipy.special import gammaln

from .engine import AbsorberConfig, AbsorptionRecord
from .errors import ConfigurationError, NoAbsorptionError
from .lattice import (
    ClassicalState,
    PositionDistribution,
    initial_classical_state,
    probability_distribution,
    std_dev,
)

# exact integer binomials below this step count, log-gamma beyond
_EXACT_COMB_LIMIT = 1000


def crw_step(state: ClassicalState, l: int = 1) -> ClassicalState:
    """One fair step of length l: p'(n) = ½ p(n+l) + ½ p(n−l)."""
    if l < 0:
        raise ConfigurationError(f"step length must be nonnegative, got {l}")
    if l == 0:
        return ClassicalState(time=state.time + 1, n_min=state.n_min,
                              prob=state.prob.copy())
    w = state.width
    new = np.zeros(w + 2 * l)
    new[:w] += 0.5 * state.prob
    new[2 * l:] += 0.5 * state.prob
    return ClassicalState(time=state.time + 1, n_min=state.n_min - l, prob=new)


def crw_apply_absorber(
    state: ClassicalState, absorber: AbsorberConfig
) -> tuple[ClassicalState, float]:
    """Remove mass on the absorber's side; return (state, removed mass)."""
    sl = absorber.window_slice(state.n_min, state.width)
    if sl.start >= sl.stop:
        return state, 0.0
    absorbed = float(np.sum(state.prob[sl]))
    if absorbed == 0.0:
        return state, 0.0
    prob = state.prob.copy()
    prob[sl] = 0.0
    return ClassicalState(time=state.time, n_min=state.n_min, prob=prob), absorbed


@dataclass
class ClassicalWalkConfig:
    """Full specification of one classical run."""

    steps: int
    initial_position: int = 0
    absorber: Optional[AbsorberConfig] = None
    step_lengths: Optional[Sequence[int]] = None

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ConfigurationError(f"steps must be >= 1, got {self.steps}")
        if self.step_lengths is not None:
            lengths = np.asarray(self.step_lengths)
            if lengths.shape != (self.steps,):
                raise ConfigurationError(
                    f"step_lengths must have length {self.steps}, "
                    f"got {lengths.shape}"
                )
            if np.any(lengths < 0) or not np.issubdtype(lengths.dtype, np.integer):
                raise ConfigurationError("step lengths must be nonnegative integers")

    def lengths(self) -> np.ndarray:
        if self.step_lengths is None:
            return np.ones(self.steps, dtype=np.int64)
        return np.asarray(self.step_lengths, dtype=np.int64)


@dataclass
class ClassicalWalkResult:
    """Same shape as the quantum result: record, per-step spread, final state."""

    record: AbsorptionRecord
    sigma: np.ndarray
    final_state: ClassicalState


def iterate_classical(
    config: ClassicalWalkConfig,
) -> Iterator[tuple[ClassicalState, float]]:
    """Yield (state after step t, mass absorbed at step t) for t = 1..steps."""
    state = initial_classical_state(config.initial_position)
    for l in config.lengths():
        state = crw_step(state, int(l))
        absorbed = 0.0
        if config.absorber is not None:
            state, absorbed = crw_apply_absorber(state, config.absorber)
        yield state, absorbed


def run_classical(config: ClassicalWalkConfig) -> ClassicalWalkResult:
    per_step = np.zeros(config.steps)
    sigma = np.full(config.steps, np.nan)
    state = None
    t = 0
    for state, absorbed in iterate_classical(config):
        t = state.time
        per_step[t - 1] = absorbed
        dist = probability_distribution(state)
        if dist.mass() > 0.0:
            sigma[t - 1] = std_dev(dist)
        else:
            break
    return ClassicalWalkResult(
        record=AbsorptionRecord(per_step=per_step[:t], horizon=t),
        sigma=sigma[:t],
        final_state=state,
    )


def snapshot_distribution(
    config: ClassicalWalkConfig, at_time: int
) -> PositionDistribution:
    """Position distribution after `at_time` steps (post-absorption)."""
    if not 0 < at_time <= config.steps:
        raise ConfigurationError(
            f"snapshot time must be in 1..{config.steps}, got {at_time}"
        )
    for state, _ in iterate_classical(config):
        if state.time == at_time:
            return probability_distribution(state)
    raise AssertionError("unreachable")


def classical_first_passage(t: int, m1: int) -> float:
    """Probability the unit-step walk first reaches ±|m1| at step t.

    p_t = (|m1| / (t·2^t)) · t! / (((t+|m1|)/2)! ((t−|m1|)/2)!), nonzero only
    for t ≥ |m1| with t ≡ m1 (mod 2). Symmetric in the sign of m1.
    """
    if m1 == 0:
        raise ConfigurationError("absorber position must be nonzero")
    m = abs(int(m1))
    t = int(t)
    if t < m or (t - m) % 2 != 0:
        return 0.0
    if t <= _EXACT_COMB_LIMIT:
        return m * math.comb(t, (t + m) // 2) / (t * 2 ** t)
    return float(np.exp(_log_first_passage(np.array([t], dtype=np.float64), m))[0])


def _log_first_passage(ts: np.ndarray, m: int) -> np.ndarray:
    """log p_t on the support grid (callers guarantee parity and t ≥ m)."""
    return (
        np.log(m)
        - np.log(ts)
        - ts * math.log(2.0)
        + gammaln(ts + 1.0)
        - gammaln((ts + m) / 2.0 + 1.0)
        - gammaln((ts - m) / 2.0 + 1.0)
    )


def _support_grid(m: int, horizon: int) -> np.ndarray:
    return np.arange(m, horizon + 1, 2, dtype=np.float64)


def first_passage_series(m1: int, horizon: int) -> tuple[np.ndarray, np.ndarray]:
    """(support times, first-passage probabilities) for t ≤ horizon."""
    if m1 == 0:
        raise ConfigurationError("absorber position must be nonzero")
    m = abs(int(m1))
    if horizon < m:
        return np.empty(0), np.empty(0)
    ts = _support_grid(m, horizon)
    return ts, np.exp(_log_first_passage(ts, m))


def classical_total_absorption(m1: int, horizon: int) -> float:
    """Partial sum Σ_{t≤horizon} p_t; approaches 1 as the horizon grows."""
    _, ps = first_passage_series(m1, horizon)
    return float(np.sum(ps))


def classical_avg_time_partial(m1: int, horizon: int) -> float:
    """Finite-horizon average absorbing time Σ t·p_t / Σ p_t for t ≤ horizon.

    Diverges like √horizon as the horizon grows: the numerator series fails
    the ratio test (limit 1/2 < 1) while the denominator sums to 1.
    """
    ts, ps = first_passage_series(m1, horizon)
    den = float(np.sum(ps))
    if den <= 0.0:
        raise NoAbsorptionError(
            f"no absorption possible by step {horizon} with absorber at {m1}"
        )
    return float(np.sum(ts * ps)) / den


def classical_avg_time_term(m1: int):
    """Terms u_n = t·p_t (t = |m1| + 2n) of the average-time numerator series.

    Vectorized over n (n ≥ 1); feeds the Raabe convergence estimator, which
    finds the limit 1/2, i.e. divergence.
    """
    if m1 == 0:
        raise ConfigurationError("absorber position must be nonzero")
    m = abs(int(m1))

    def term(n):
        ts = m + 2.0 * np.asarray(n, dtype=np.float64)
        return ts * np.exp(_log_first_passage(ts, m))

    return term

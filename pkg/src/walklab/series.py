"""Truncated power-series algebra and absorption analytics.

The absorbed amplitude at step t is the degree-t coefficient of a generating
function built from two branch-cut series f(z) and g(z); squaring those
coefficients gives the per-step absorption probabilities, whose sums yield
the total absorption probability and the average absorbing time. A ratio
(Raabe) test estimator classifies convergence of the associated series.

All series here have real coefficients and are truncated at a fixed order;
truncated products are exact for every retained coefficient.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import gammaln

from .errors import ConfigurationError, NumericalError

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
DEFAULT_ORDER = 2 ** 14


@dataclass(frozen=True)
class PowerSeries:
    """Real-coefficient polynomial truncated at a fixed maximum degree.

    coeffs[k] is the coefficient of z^k. Arithmetic truncates results to the
    smaller operand order, so every retained coefficient is exact.
    """

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "coeffs", np.asarray(self.coeffs, dtype=np.float64)
        )
        if self.coeffs.ndim != 1 or self.coeffs.size == 0:
            raise ConfigurationError("coefficients must be a nonempty 1D array")

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    @classmethod
    def zero(cls, order: int) -> "PowerSeries":
        return cls(np.zeros(order + 1))

    @classmethod
    def monomial(cls, degree: int, order: int, value: float = 1.0) -> "PowerSeries":
        if degree > order:
            raise ConfigurationError(f"degree {degree} exceeds order {order}")
        c = np.zeros(order + 1)
        c[degree] = value
        return cls(c)

    def coefficient(self, k: int) -> float:
        if not 0 <= k <= self.order:
            raise ConfigurationError(
                f"coefficient index {k} outside truncation order {self.order}"
            )
        return float(self.coeffs[k])

    def truncate(self, order: int) -> "PowerSeries":
        if order > self.order:
            raise ConfigurationError(
                f"cannot extend order {self.order} to {order}"
            )
        return PowerSeries(self.coeffs[: order + 1].copy())

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        n = min(self.order, other.order) + 1
        return PowerSeries(self.coeffs[:n] + other.coeffs[:n])

    def __sub__(self, other: "PowerSeries") -> "PowerSeries":
        n = min(self.order, other.order) + 1
        return PowerSeries(self.coeffs[:n] - other.coeffs[:n])

    def __mul__(self, other):
        if isinstance(other, PowerSeries):
            n = min(self.order, other.order)
            full = np.convolve(self.coeffs[: n + 1], other.coeffs[: n + 1])
            return PowerSeries(full[: n + 1])
        return PowerSeries(self.coeffs * float(other))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "PowerSeries":
        if exponent < 0 or int(exponent) != exponent:
            raise ConfigurationError("series powers must use integers >= 0")
        result = PowerSeries.monomial(0, self.order)
        base = self
        e = int(exponent)
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def shift_down(self, k: int) -> "PowerSeries":
        """Divide by z^k; the k lowest coefficients must vanish."""
        if k == 0:
            return self
        low = self.coeffs[:k]
        if np.max(np.abs(low), initial=0.0) > 1e-12:
            raise NumericalError(
                f"series is not divisible by z^{k}: low-order residue "
                f"{np.max(np.abs(low)):.3e}"
            )
        return PowerSeries(self.coeffs[k:].copy())


def sqrt_one_plus_z4(order: int) -> PowerSeries:
    """Binomial series of √(1+z⁴): Σ_k C(1/2, k) z^{4k}."""
    coeffs = np.zeros(order + 1)
    c = 1.0
    k = 0
    while 4 * k <= order:
        coeffs[4 * k] = c
        c *= (0.5 - k) / (k + 1)
        k += 1
    return PowerSeries(coeffs)


def series_f(order: int) -> PowerSeries:
    """f(z) = (1 + z² − √(1+z⁴)) / (√2·z)."""
    root = sqrt_one_plus_z4(order + 1)
    num = PowerSeries.monomial(0, order + 1) + PowerSeries.monomial(2, order + 1) - root
    return (num.shift_down(1) * _INV_SQRT2).truncate(order)


def series_g(order: int) -> PowerSeries:
    """g(z) = (1 − z² − √(1+z⁴)) / (√2·z)."""
    root = sqrt_one_plus_z4(order + 1)
    num = PowerSeries.monomial(0, order + 1) - PowerSeries.monomial(2, order + 1) - root
    return (num.shift_down(1) * _INV_SQRT2).truncate(order)


def generating_function(
    m1: int, initial: str = "L", order: int = DEFAULT_ORDER
) -> PowerSeries:
    """Absorbed-amplitude generating function for an absorber at m1.

    The degree-t coefficient is the amplitude absorbed at step t (up to a
    global phase); its square is the absorption probability p_t. `initial`
    names the initial coin component, "L" or "R". Negative m1 maps to the
    mirrored walk: the absorber sits on the other side and the coin roles
    swap, which leaves p_t values exact.
    """
    if initial not in ("L", "R"):
        raise ConfigurationError(f"initial coin state must be 'L' or 'R', got {initial!r}")
    if m1 == 0:
        raise ConfigurationError("absorber position must be nonzero")
    if m1 < 0:
        mirrored = "R" if initial == "L" else "L"
        return generating_function(-m1, mirrored, order)
    if m1 > order:
        raise ConfigurationError(
            f"absorber at {m1} needs series order >= {m1}, got {order}"
        )
    g = series_g(order)
    if initial == "R":
        return g ** m1
    f = series_f(order)
    return f * g ** (m1 - 1)


def absorption_probabilities(
    m1: int, initial: str = "L", order: int = DEFAULT_ORDER
) -> np.ndarray:
    """p_t for t = 1..order: squared generating-function coefficients."""
    amps = generating_function(m1, initial, order).coeffs
    return (amps * amps)[1:]


def quantum_absorption_prob(t: int) -> float:
    """Closed-form p_t for the absorber at 2, initial L.

    Nonzero only at t = 4m − 2 (m ≥ 1), where the absorbed amplitude is
    (2m−2)! / (2^{2m−1}·(m−1)!·m!); p_t is its square: 1/4, 1/64, 1/256, ...
    """
    t = int(t)
    if t < 2 or (t + 2) % 4 != 0:
        return 0.0
    m = (t + 2) // 4
    amp = math.comb(2 * m - 2, m - 1) / (2 ** (2 * m - 1) * m)
    return amp * amp


def quantum_avg_time_term(m1: int = 2) -> Callable:
    """Terms u_m = t·p_t (t = 4m − 2) of the average-time numerator series.

    Vectorized over m (m ≥ 1); feeds the Raabe estimator, which finds the
    limit 2 > 1, i.e. convergence. Only the absorber-at-2 series has this
    closed form.
    """
    if m1 != 2:
        raise ConfigurationError(
            "closed-form average-time terms exist only for the absorber at 2"
        )

    def term(n):
        m = np.asarray(n, dtype=np.float64)
        log_amp = (
            gammaln(2 * m - 1)
            - (2 * m - 1) * math.log(2.0)
            - gammaln(m)
            - gammaln(m + 1)
        )
        return (4 * m - 2) * np.exp(2 * log_amp)

    return term


def _tail_power_law(
    ts: np.ndarray, ps: np.ndarray, order: int
) -> tuple[float, float]:
    """Estimate Σ_{t>order} p_t and Σ_{t>order} t·p_t from a power-law tail.

    Fits ln p = ln c − β·ln t over the last decade of support and integrates
    ρ·c·t^(−β) beyond the truncation, with ρ the support density. Returns
    (0, 0) when the tail is too sparse or decays too slowly to extrapolate.
    """
    window = ts >= order / 8
    if not np.any(window):
        return 0.0, 0.0
    peak = float(np.max(ps[window]))
    if peak <= 0.0:
        return 0.0, 0.0
    # keep genuine support only: convolution noise sits ~20 decades below
    window &= ps > peak * 1e-12
    if np.count_nonzero(window) < 8:
        return 0.0, 0.0
    t_w = ts[window]
    p_w = ps[window]
    beta, log_c = np.polyfit(np.log(t_w), np.log(p_w), 1)
    beta = -beta
    if beta <= 2.05:
        return 0.0, 0.0
    density = (t_w.size - 1) / (t_w[-1] - t_w[0])
    c = math.exp(log_c)
    s0 = density * c * order ** (1.0 - beta) / (beta - 1.0)
    s1 = density * c * order ** (2.0 - beta) / (beta - 2.0)
    return s0, s1


def total_absorption(
    m1: int,
    initial: str = "L",
    order: int = DEFAULT_ORDER,
    tail: str = "power_law",
) -> float:
    """Total absorption probability P = Σ_t p_t (tail-corrected partial sum)."""
    ps = absorption_probabilities(m1, initial, order)
    ts = np.arange(1, order + 1, dtype=np.float64)
    s0 = float(np.sum(ps))
    if tail == "power_law":
        extra0, _ = _tail_power_law(ts, ps, order)
        s0 += extra0
    elif tail != "none":
        raise ConfigurationError(f"unknown tail mode {tail!r}")
    return s0


def avg_absorb_time(
    m1: int,
    initial: str = "L",
    order: int = DEFAULT_ORDER,
    tail: str = "power_law",
) -> float:
    """Average absorbing time t_a = Σ t·p_t / Σ p_t (tail-corrected)."""
    ps = absorption_probabilities(m1, initial, order)
    ts = np.arange(1, order + 1, dtype=np.float64)
    s0 = float(np.sum(ps))
    s1 = float(np.sum(ts * ps))
    if tail == "power_law":
        extra0, extra1 = _tail_power_law(ts, ps, order)
        s0 += extra0
        s1 += extra1
    elif tail != "none":
        raise ConfigurationError(f"unknown tail mode {tail!r}")
    if s0 <= 0.0:
        raise NumericalError(f"no absorption mass within order {order}")
    return s1 / s0


@dataclass
class RaabeReport:
    """Outcome of the ratio-test (Raabe) convergence estimate."""

    limit: float
    verdict: str  # "converges" | "diverges" | "inconclusive"
    n_max: int
    band: float
    samples: list  # (n, E_n) pairs on the evaluation grid


def raabe_estimate(
    term: Callable,
    n_max: int = 10 ** 6,
    band: float = 0.05,
    points_per_octave: int = 8,
) -> RaabeReport:
    """Estimate E = lim n·(u_n/u_{n+1} − 1) for a positive series u_n.

    E > 1 means Σu_n converges, E < 1 diverges; |E − 1| < band is reported
    inconclusive. E_n is evaluated on a geometric grid up to n_max and
    extrapolated by a least-squares fit of E_n = E + c/n over the top two
    octaves, which cancels the leading finite-n bias.
    """
    if n_max < 16:
        raise ConfigurationError(f"n_max must be >= 16, got {n_max}")
    octaves = int(math.floor(math.log2(n_max / 4)))
    ratios = 2.0 ** (np.arange(octaves * points_per_octave + 1)
                     / points_per_octave)
    ns = np.unique(np.round(n_max / ratios).astype(np.int64))
    ns = ns[ns >= 4]
    u_n = np.asarray(term(ns), dtype=np.float64)
    u_next = np.asarray(term(ns + 1), dtype=np.float64)
    bad = np.nonzero((u_n <= 0) | (u_next <= 0))[0]
    if bad.size:
        raise NumericalError(
            f"series term at n = {int(ns[bad[0]])} is not positive"
        )
    e_samples = ns * (u_n / u_next - 1.0)
    top = ns >= n_max / 4
    if np.count_nonzero(top) >= 3:
        slope_fit = np.polyfit(1.0 / ns[top], e_samples[top], 1)
        limit = float(slope_fit[1])
    else:
        limit = float(e_samples[-1])
    if limit > 1.0 + band:
        verdict = "converges"
    elif limit < 1.0 - band:
        verdict = "diverges"
    else:
        verdict = "inconclusive"
    return RaabeReport(
        limit=limit,
        verdict=verdict,
        n_max=int(n_max),
        band=float(band),
        samples=list(zip(ns.tolist(), e_samples.tolist())),
    )

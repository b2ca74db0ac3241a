"""Uniform grids, sampled wavefunctions and the discrete Fourier transform.

Grids are periodic: ``count`` points ``start + k*step`` covering the
half-open interval ``[start, start + count*step)``. On such a grid the
trapezoid rule reduces to the plain Riemann sum, which is what all norms,
moments and overlaps use. It is also the weighting under which the DFT
below is exactly unitary.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .shapes import ShapeSpec, evaluate

TRUNCATION_TOLERANCE = 1e-3


class DomainTag(str, enum.Enum):
    TIME = "time"
    FREQUENCY = "frequency"

    @property
    def conjugate(self) -> "DomainTag":
        return DomainTag.FREQUENCY if self is DomainTag.TIME else DomainTag.TIME


class TruncationWarning(UserWarning):
    """The grid clips a noticeable part of the sampled function."""

    def __init__(self, message, captured=None):
        super().__init__(message)
        self.captured = captured


class ZeroNormError(ValueError):
    pass


class FWHMError(ValueError):
    pass


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def next_power_of_two(n: float) -> int:
    return 1 << max(0, math.ceil(math.log2(max(n, 1.0))))


@dataclass(frozen=True)
class Grid:
    start: float
    step: float
    count: int

    def __post_init__(self):
        if not (self.step > 0 and math.isfinite(self.step)):
            raise ValueError(f"grid step must be positive, got {self.step!r}")
        if self.count < 16 or not _is_power_of_two(self.count):
            raise ValueError(f"grid count must be a power of two >= 16, got {self.count!r}")

    @classmethod
    def centered(cls, center: float, step: float, count: int) -> "Grid":
        """Grid whose point ``count // 2`` sits exactly on ``center``."""
        return cls(center - (count // 2) * step, step, count)

    @property
    def span(self) -> float:
        return self.count * self.step

    @property
    def center(self) -> float:
        return self.start + (self.count // 2) * self.step

    @property
    def points(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)

    def conjugate(self, center: float = 0.0) -> "Grid":
        return Grid.centered(center, 2.0 * np.pi / (self.count * self.step), self.count)

    def is_centered_at_zero(self) -> bool:
        return abs(self.center) <= 1e-12 * self.span


@dataclass(frozen=True, eq=False)
class SampledWavefunction:
    domain: DomainTag
    grid: Grid
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.grid.count,):
            raise ValueError("amplitude length must equal grid.count")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "domain", DomainTag(self.domain))

    @property
    def points(self) -> np.ndarray:
        return self.grid.points

    def norm(self) -> float:
        """Squared L2 norm, sum |a|^2 * step."""
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.step)

    def replace_amplitudes(self, amplitudes) -> "SampledWavefunction":
        return SampledWavefunction(self.domain, self.grid, amplitudes)


def sample(shape: ShapeSpec, grid: Grid, domain=DomainTag.TIME) -> SampledWavefunction:
    """Evaluate ``shape`` on ``grid``; warns with TruncationWarning if the grid clips it."""
    wf = SampledWavefunction(domain, grid, evaluate(shape, grid.points))
    captured = wf.norm()
    if abs(captured - 1.0) > TRUNCATION_TOLERANCE:
        warnings.warn(
            TruncationWarning(
                f"grid captures norm {captured:.6g} of {shape.kind.value} shape", captured
            ),
            stacklevel=2,
        )
    return wf


def _unit_phase(cycles: np.ndarray, count: int) -> np.ndarray:
    # exp(-2 pi i * cycles / count) with the argument reduced mod count first
    return np.exp(-2j * np.pi * np.mod(cycles, count) / count)


def dft_to_conjugate(wf: SampledWavefunction, center: float = 0.0) -> SampledWavefunction:
    """Transform to the conjugate domain on the conjugate grid centred at ``center``.

    Frequency -> time uses kernel ``exp(-i w t)``, time -> frequency uses
    ``exp(+i w t)``; both carry the prefactor ``(2 pi)^(-1/2)`` and are
    exact inverses of each other.
    """
    g = wf.grid
    n = g.count
    out_grid = g.conjugate(center)
    # x_k = (a + k) dx, y_j = (b + j) dy with dx*dy = 2 pi / n
    a = g.start / g.step
    b = out_grid.start / out_grid.step
    k = np.arange(n, dtype=float)
    sign = 1.0 if wf.domain is DomainTag.FREQUENCY else -1.0
    pre = _unit_phase(sign * k * b, n) * wf.amplitudes
    if sign > 0:
        spec = np.fft.fft(pre)
    else:
        spec = np.fft.ifft(pre) * n
    post = _unit_phase(sign * (a * b + a * k), n)
    amps = g.step / math.sqrt(2.0 * math.pi) * post * spec
    return SampledWavefunction(wf.domain.conjugate, out_grid, amps)


def normalize(wf: SampledWavefunction) -> SampledWavefunction:
    nrm = wf.norm()
    if not nrm > 0.0:
        raise ZeroNormError("cannot normalize a zero-norm wavefunction")
    return wf.replace_amplitudes(wf.amplitudes / math.sqrt(nrm))


def moments(wf: SampledWavefunction) -> tuple[float, float]:
    """Mean and RMS width of the density ``|a|^2`` on the grid."""
    x = wf.grid.points
    dens = np.abs(wf.amplitudes) ** 2 * wf.grid.step
    total = dens.sum()
    mean = float(np.dot(x, dens) / total)
    var = float(np.dot((x - mean) ** 2, dens) / total)
    return mean, math.sqrt(var)


def fwhm(xs, ys, baseline=None) -> float:
    """Full width at half the excursion from ``baseline`` to the global extremum.

    ``baseline`` defaults to the mean of the two end values. Crossings are
    located by linear interpolation between bracketing samples.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.size < 3:
        raise FWHMError("need at least three (x, y) samples")
    if baseline is None:
        baseline = 0.5 * (y[0] + y[-1])
    dev = y - baseline
    i0 = int(np.argmax(np.abs(dev)))
    peak = dev[i0]
    if peak == 0.0:
        raise FWHMError("curve has no excursion from its baseline")
    level = 0.5 * peak
    # work with s = dev / level so that "inside" means s > 1
    s = dev / level

    def crossing(direction):
        i = i0
        while 0 <= i + direction < x.size:
            j = i + direction
            if s[j] <= 1.0:
                t = (s[i] - 1.0) / (s[i] - s[j])
                return x[i] + t * (x[j] - x[i])
            i = j
        raise FWHMError("no half-level crossing on one side of the extremum")

    return float(crossing(1) - crossing(-1))


def auto_time_grid(
    slow_width: float,
    fast_width: float,
    line_width: float,
    span_factor: float = 8.0,
    step_factor: float = 8.0,
    max_count: int | None = None,
) -> Grid:
    """Time grid centred at 0 sized from the state's scales.

    Span >= ``span_factor * slow_width`` and large enough that the conjugate
    frequency step resolves ``line_width`` by 4 steps; step <=
    ``fast_width / step_factor``. With ``max_count`` the step is relaxed
    instead of exceeding the cap.
    """
    span = max(span_factor * slow_width, 8.0 * math.pi / line_width)
    step = fast_width / step_factor
    count = max(16, next_power_of_two(span / step))
    if max_count is not None and count > max_count:
        count = max_count
        step = span / count
    return Grid.centered(0.0, step, count)

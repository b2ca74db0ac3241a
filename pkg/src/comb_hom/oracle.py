"""Brute-force coincidence rates from explicit two-photon amplitude tables.

Nothing here uses the overlap or autocorrelation reductions of ``hom``: the
full antisymmetrized integrand is built on an N x N table and summed. The
delay has two independent realizations, a numpy FFT phase shift and cubic
spline resampling, so the oracle does not share the spectral-shift code
path of the fast routines.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .hom import Shift, checked
from .sampling import DomainTag, Grid, SampledWavefunction, TruncationWarning
from .shapes import effective_width
from .states import (
    CombSpec,
    EntangledSpec,
    ResolutionError,
    build_comb_temporal,
    build_entangled_temporal,
    check_scales,
)

MAX_TABLE = 2048


class TableSizeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TwoPhotonTable:
    grid1: Grid
    grid2: Grid
    amplitudes: np.ndarray  # [i over t1, j over t2]
    normalized: bool = True

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.grid1.step * self.grid2.step)


def _check_size(*grids: Grid, cap: int = MAX_TABLE):
    if any(g.count > cap for g in grids):
        raise TableSizeError(f"oracle tables are capped at {cap} points per axis")


def product_table(
    wf_a: SampledWavefunction, wf_b: SampledWavefunction, cap: int = MAX_TABLE
) -> TwoPhotonTable:
    """``psi(t1, t2) = A(t1) * B(t2)``."""
    if wf_a.domain is not DomainTag.TIME or wf_b.domain is not DomainTag.TIME:
        raise ValueError("oracle tables live in the time domain")
    _check_size(wf_a.grid, wf_b.grid, cap=cap)
    amps = np.outer(wf_a.amplitudes, wf_b.amplitudes)
    return TwoPhotonTable(wf_a.grid, wf_b.grid, amps)


def entangled_table(spec: EntangledSpec, grid: Grid, cap: int = MAX_TABLE) -> TwoPhotonTable:
    _check_size(grid, cap=cap)
    return TwoPhotonTable(grid, grid, build_entangled_temporal(spec, grid, grid, max_count=cap))


def _fft_delay(amps: np.ndarray, step: float, delay: float, axis: int) -> np.ndarray:
    n = amps.shape[axis]
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=step)
    phase = np.exp(-1j * k * delay)
    shape = [1, 1]
    shape[axis] = n
    return np.fft.ifft(np.fft.fft(amps, axis=axis) * phase.reshape(shape), axis=axis)


def _spline_delay(amps: np.ndarray, grid: Grid, delay: float, axis: int) -> np.ndarray:
    t = grid.points
    spline = CubicSpline(t, amps, axis=axis, extrapolate=False)
    out = spline(t - delay)
    return np.nan_to_num(out, nan=0.0)


def _edge_mass(table: TwoPhotonTable, delay: float, axis: int) -> float:
    grid = table.grid1 if axis == 0 else table.grid2
    m = min(grid.count, int(math.ceil(abs(delay) / grid.step)) + 1)
    dens = np.sum(np.abs(table.amplitudes) ** 2, axis=1 - axis) * table.grid1.step * table.grid2.step
    return float(dens[:m].sum() + dens[-m:].sum())


def delayed_table(table: TwoPhotonTable, delta_t: float, delay_method: str = "spectral",
                  delayed_photon: int = 1) -> np.ndarray:
    """Amplitudes with the chosen photon's argument shifted by ``delta_t``."""
    if delayed_photon not in (1, 2):
        raise ValueError("delayed_photon must be 1 or 2")
    axis = delayed_photon - 1
    grid = table.grid1 if axis == 0 else table.grid2
    psi = table.amplitudes
    if delta_t == 0.0:
        return psi
    if _edge_mass(table, delta_t, axis) > 1e-6:
        warnings.warn(TruncationWarning("delayed support wraps around the oracle grid"), stacklevel=3)
    if delay_method == "spectral":
        return _fft_delay(psi, grid.step, delta_t, axis)
    if delay_method == "cubic":
        return _spline_delay(psi, grid, delta_t, axis)
    raise ValueError(f"unknown delay method {delay_method!r}")


def _antisymmetrized_norm(psi: np.ndarray, grid: Grid, delta_omega: float, delayed_photon: int) -> float:
    phase = np.exp(1j * delta_omega * grid.points)
    if delayed_photon == 1:
        # X(t1,t2) = D(t1,t2) e^{i t2 dw},  Y(t1,t2) = D(t2,t1) e^{i t1 dw}
        x = psi * phase[None, :]
        y = psi.T * phase[:, None]
    else:
        x = psi * phase[:, None]
        y = psi.T * phase[None, :]
    x -= y
    return float(np.sum(x.real**2 + x.imag**2) * grid.step * grid.step)


def coincidence_oracle(
    table: TwoPhotonTable,
    shift: Shift,
    delay_method: str = "spectral",
    delayed_photon: int = 1,
) -> float:
    """Quarter of the double integral of the shifted, antisymmetrized amplitude.

    ``delayed_photon=1`` delays photon 1 and phases photon 2 by
    ``exp(i t dw)``; ``delayed_photon=2`` exchanges the two roles.
    """
    if table.grid1 != table.grid2:
        raise ValueError("the exchange term needs identical grids on both axes")
    psi = delayed_table(table, shift.delta_t, delay_method, delayed_photon)
    return checked(0.25 * _antisymmetrized_norm(psi, table.grid1, shift.delta_omega, delayed_photon))


def oracle_time_grid(spec: CombSpec | EntangledSpec, count: int = 1024, span_factor: float = 10.0,
                     max_delay: float = 0.0) -> Grid:
    """Capped grid covering the slow envelope (plus any delays), centred at 0."""
    _check_size(Grid.centered(0.0, 1.0, count))
    rep = check_scales(spec)
    span = span_factor * rep.d_t_phi + 2.0 * abs(max_delay)
    return Grid.centered(0.0, span / count, count)


class OracleRunner:
    """Holds one oracle table so a scan can reuse it across shifts."""

    def __init__(self, table: TwoPhotonTable, delay_method: str = "spectral"):
        if table.grid1 != table.grid2:
            raise ValueError("the exchange term needs identical grids on both axes")
        self.table = table
        self.delay_method = delay_method
        self._cached = (None, None)

    @classmethod
    def for_state(cls, state, count: int = 1024, span_factor: float = 10.0, max_delay: float = 0.0,
                  delay_method: str = "spectral", resolution: float = 1.0):
        grid = oracle_time_grid(state, count, span_factor, max_delay)
        if isinstance(state, CombSpec):
            wf = build_comb_temporal(state, grid, form="sampled", method="direct", resolution=resolution)
            table = product_table(wf, wf)
        elif isinstance(state, EntangledSpec):
            if grid.step > effective_width(state.envelope_t) / resolution:
                raise ResolutionError("oracle grid does not resolve the pulse shape")
            table = entangled_table(state, grid)
        else:
            raise TypeError(f"unsupported state {type(state).__name__}")
        return cls(table, delay_method)

    def coincidence(self, shift: Shift) -> float:
        # the delayed table is reused while consecutive shifts share delta_t
        dt, psi = self._cached
        if dt != shift.delta_t:
            psi = delayed_table(self.table, shift.delta_t, self.delay_method)
            self._cached = (shift.delta_t, psi)
        return checked(0.25 * _antisymmetrized_norm(psi, self.table.grid1, shift.delta_omega, 1))

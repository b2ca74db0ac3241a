"""Hong-Ou-Mandel coincidence rates for comb-state pairs and entangled pairs.

Shift convention (two-photon amplitude psi_p(t1, t2), photon 1 enters left):
photon 1 is delayed by ``delta_t`` and photon 2 picks up the phase factor
``exp(+i t delta_omega)``. The coincidence probability is a quarter of

    integral |psi_p(t1 - dt, t2) e^{i t2 dw} - psi_p(t2 - dt, t1) e^{i t1 dw}|^2

which is 0 for identical bosons and 1/2 for distinguishable product inputs.

Delays are applied as spectral phases ``exp(i w dt)``, so shifts need not be
multiples of the grid step.
"""
from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import shapes
from .sampling import (
    DomainTag,
    Grid,
    SampledWavefunction,
    auto_time_grid,
    dft_to_conjugate,
    next_power_of_two,
    sample,
)
from .states import CombSpec, EntangledSpec, check_scales, comb_state

# coin110 sums stop once |dt + m T| exceeds this many autocorrelation widths
SUM_REACH = 8.0
RANGE_SLACK = 1e-9


class GridMismatchError(ValueError):
    pass


class NumericalConsistencyError(RuntimeError):
    """A coincidence value left [0, 1] by more than the round-off slack."""


class Method(str, enum.Enum):
    EXACT = "exact_overlap"
    APPROX = "approx_formula"
    ORACLE = "oracle_2d"


class StateKind(str, enum.Enum):
    COMB_PAIR = "comb_pair"
    ENTANGLED_PAIR = "entangled_pair"


METHOD_ALIASES = {
    "exact": Method.EXACT,
    "approx": Method.APPROX,
    "oracle": Method.ORACLE,
    **{m.value: m for m in Method},
}


@dataclass(frozen=True)
class Shift:
    delta_t: float = 0.0
    delta_omega: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.delta_t) and math.isfinite(self.delta_omega)):
            raise ValueError("shifts must be finite")


def checked(value: float) -> float:
    if not (-RANGE_SLACK <= value <= 1.0 + RANGE_SLACK):
        raise NumericalConsistencyError(f"coincidence {value!r} outside [0, 1]")
    return float(value)


def thread_count() -> int:
    raw = os.environ.get("COMB_HOM_THREADS", "").strip()
    n = int(raw) if raw else 0
    return n if n > 0 else (os.cpu_count() or 1)


def _spectral_delay(amps: np.ndarray, grid: Grid, domain: DomainTag, delay: float) -> np.ndarray:
    wf = SampledWavefunction(domain, grid, amps)
    spec = dft_to_conjugate(wf)
    # time delay <-> exp(+i w dt); frequency displacement <-> exp(-i t dw)
    sign = 1.0 if domain is DomainTag.TIME else -1.0
    shifted = spec.replace_amplitudes(spec.amplitudes * np.exp(sign * 1j * spec.points * delay))
    return dft_to_conjugate(shifted, center=grid.center).amplitudes


def apply_shift(wf: SampledWavefunction, shift: Shift) -> SampledWavefunction:
    """Delay a temporal wavefunction by ``delta_t`` and raise its frequency by ``delta_omega``.

    Under the package Fourier convention raising the mean frequency by dw
    means multiplying by ``exp(-i t dw)``. The phase written on photon 2 in
    the coincidence integral, ``exp(+i t dw)``, is therefore a shift of
    ``-dw`` in these terms.
    """
    if wf.domain is not DomainTag.TIME:
        raise ValueError("apply_shift expects a time-domain wavefunction")
    amps = wf.amplitudes
    if shift.delta_t != 0.0:
        amps = _spectral_delay(amps, wf.grid, wf.domain, shift.delta_t)
    if shift.delta_omega != 0.0:
        amps = amps * np.exp(-1j * shift.delta_omega * wf.points)
    return wf.replace_amplitudes(amps)


class ProductOverlap:
    """Overlap ``I(dt, dw) = int A(t - dt) conj(B(t)) e^{-i t dw} dt`` of two pulses.

    Evaluated in the spectral domain, where the delay is a phase; the
    spectrum of A is computed once and the spectrum of ``B e^{i t dw}``
    once per frequency shift.
    """

    def __init__(self, wf_a: SampledWavefunction, wf_b: SampledWavefunction):
        if wf_a.domain is not DomainTag.TIME or wf_b.domain is not DomainTag.TIME:
            raise ValueError("overlaps are taken between time-domain wavefunctions")
        if wf_a.grid != wf_b.grid:
            raise GridMismatchError("both inputs must share one grid")
        self.grid = wf_a.grid
        self.wf_b = wf_b
        spec_a = dft_to_conjugate(wf_a)
        self.omega = spec_a.points
        self.a_hat = spec_a.amplitudes
        self.d_omega = spec_a.grid.step

    def weights(self, delta_omega: float) -> np.ndarray:
        b = self.wf_b
        if delta_omega != 0.0:
            b = b.replace_amplitudes(b.amplitudes * np.exp(1j * delta_omega * b.points))
        return self.a_hat * np.conj(dft_to_conjugate(b).amplitudes) * self.d_omega

    def overlaps(self, delta_ts, delta_omega: float = 0.0) -> np.ndarray:
        w = self.weights(delta_omega)
        return np.array([np.sum(w * np.exp(1j * self.omega * dt)) for dt in np.atleast_1d(delta_ts)])


def coincidence_from_overlap(overlap) -> np.ndarray:
    return 0.5 - 0.5 * np.abs(overlap) ** 2


def coincidence_product(wf_a: SampledWavefunction, wf_b: SampledWavefunction, shift: Shift) -> float:
    """Coincidence probability for the product input ``A(t1) B(t2)``."""
    ov = ProductOverlap(wf_a, wf_b).overlaps([shift.delta_t], shift.delta_omega)[0]
    return checked(coincidence_from_overlap(ov))


def autocorrelation(wf: SampledWavefunction, shifts) -> np.ndarray:
    """``F(d) = int f(x) conj(f(x - d)) dx`` for each shift, via spectral phases."""
    spec = dft_to_conjugate(wf)
    sign = 1.0 if wf.domain is DomainTag.TIME else -1.0
    power = np.abs(spec.amplitudes) ** 2 * spec.grid.step
    return np.array(
        [np.sum(power * np.exp(-sign * 1j * spec.points * d)) for d in np.atleast_1d(shifts)]
    )


# ---------------------------------------------------------------------------
# entangled pairs


def entangled_grid(spec: EntangledSpec, max_delay: float = 0.0, step_factor: float = 8.0) -> Grid:
    """1D grid for the pulse-shape partner, wide enough to hold a ``2*max_delay`` displacement."""
    dt_eta = shapes.effective_width(spec.envelope_t)
    reach = shapes.support_radius(spec.envelope_t, 1e-9)
    if not math.isfinite(reach) or reach > 1e4 * dt_eta:
        reach = 1e3 * dt_eta
    span = 2.0 * (2.0 * abs(max_delay) + 2.0 * reach)
    step = dt_eta / step_factor
    return Grid.centered(0.0, step, max(16, next_power_of_two(span / step)))


def coincidence_entangled(
    spec: EntangledSpec, shift: Shift, grid: Grid | None = None, literal: bool = False
) -> float:
    """Coincidence probability of the entangled pair under a joint shift.

    Reduces the two-photon integral to the pulse shape alone:
    ``1/2 - 1/2 Re[e^{-i dt dw} int eta(t) conj(eta(-t - 2 dt)) e^{-i t dw} dt]``.
    ``literal=True`` drops the constant phase ``e^{-i dt dw}``, which the
    reduction picks up from the centre-of-mass substitution; the two agree
    whenever ``dt * dw`` is negligible.
    """
    if grid is None:
        grid = entangled_grid(spec, shift.delta_t)
    if not grid.is_centered_at_zero():
        raise ValueError("entangled reduction needs a grid centred at t = 0")
    eta = sample(spec.envelope_t, grid)
    a = eta.amplitudes
    # conj(eta(-t)) on the symmetric grid, then displaced to conj(eta(-t - 2 dt))
    mirrored = np.conj(np.roll(a[::-1], 1))
    if shift.delta_t != 0.0:
        mirrored = _spectral_delay(mirrored, grid, DomainTag.TIME, -2.0 * shift.delta_t)
    integrand = a * mirrored
    if shift.delta_omega != 0.0:
        integrand = integrand * np.exp(-1j * shift.delta_omega * grid.points)
    val = np.sum(integrand) * grid.step
    if not literal:
        val *= np.exp(-1j * shift.delta_t * shift.delta_omega)
    return checked(0.5 - 0.5 * val.real)


# ---------------------------------------------------------------------------
# analytic approximations


def _ac_width(shape: shapes.ShapeSpec) -> float:
    # autocorrelation of a density with RMS w has RMS 2w (amplitude level)
    return 2.0 * shapes.effective_width(shape)


def _periodic_sum(shape: shapes.ShapeSpec, x: float, period: float) -> complex:
    """``sum_m F(x + m*period)`` over the terms within ``SUM_REACH`` widths (nearest always kept)."""
    reach = SUM_REACH * _ac_width(shape)
    lo = math.ceil((-x - reach) / period)
    hi = math.floor((-x + reach) / period)
    ms = set(range(lo, hi + 1)) | {round(-x / period)}
    args = x + period * np.array(sorted(ms), dtype=float)
    return complex(np.sum(shapes.autocorrelation(shape, args)))


def _ac(shape: shapes.ShapeSpec, x: float) -> complex:
    return complex(shapes.autocorrelation(shape, [x])[0])


def approx_comb_time_dip(spec: CombSpec, delta_t: float, variant: str = "full") -> float:
    """Comb-pair time dip from the autocorrelations of the pulse and its slow envelope.

    ``variant="full"`` keeps the revival sum over pulse offsets;
    ``variant="small_shift"`` is the single-pulse form ``1/2 - 1/2 |F_eta|^2``.
    """
    eta_t = spec.envelope_t
    if variant == "small_shift":
        return 0.5 - 0.5 * abs(_ac(eta_t, delta_t)) ** 2
    if variant != "full":
        raise ValueError(f"unknown variant {variant!r}")
    slow = abs(_ac(spec.line_shape_t, delta_t)) ** 2
    return 0.5 - 0.5 * slow * abs(_periodic_sum(eta_t, delta_t, spec.period)) ** 2


def approx_comb_freq_dip(spec: CombSpec, delta_omega: float, variant: str = "full") -> float:
    """Spectral counterpart of :func:`approx_comb_time_dip` (line shape and envelope swapped)."""
    if variant == "small_shift":
        return 0.5 - 0.5 * abs(_ac(spec.line_shape, delta_omega)) ** 2
    if variant != "full":
        raise ValueError(f"unknown variant {variant!r}")
    broad = abs(_ac(spec.envelope, delta_omega)) ** 2
    teeth = _periodic_sum(spec.line_shape, delta_omega, spec.omega_spacing)
    return 0.5 - 0.5 * broad * abs(teeth) ** 2


def in_small_shift_region(spec: CombSpec | EntangledSpec, shift: Shift) -> bool:
    return abs(shift.delta_t) <= spec.period / 8.0 and abs(shift.delta_omega) <= spec.omega_spacing / 8.0


def approx_comb_2d_dip(spec: CombSpec, shift: Shift) -> float:
    """Separable 2D dip ``1/2 - 1/2 |F_phi(dw)|^2 |F_eta(dt)|^2``.

    Only meaningful for small shifts, see :func:`in_small_shift_region`.
    """
    f_phi = abs(_ac(spec.line_shape, shift.delta_omega)) ** 2
    f_eta = abs(_ac(spec.envelope_t, shift.delta_t)) ** 2
    return 0.5 - 0.5 * f_phi * f_eta


def approx_entangled_2d_dip(spec: EntangledSpec, shift: Shift) -> float:
    return 0.5 - 0.5 * _ac(spec.envelope_t, 2.0 * shift.delta_t).real


# ---------------------------------------------------------------------------
# scans


@dataclass
class DipCurve:
    axis: str
    shifts: np.ndarray
    coincidence: np.ndarray
    method: Method
    state_kind: StateKind
    valid: np.ndarray | None = None

    def shift_pairs(self):
        for s, c in zip(self.shifts, self.coincidence):
            yield (s, 0.0, c) if self.axis == "time" else (0.0, s, c)


@dataclass
class DipSurface:
    t_shifts: np.ndarray
    w_shifts: np.ndarray
    coincidence: np.ndarray  # [i_t, j_w]
    method: Method
    state_kind: StateKind
    valid: np.ndarray | None = None

    def shift_pairs(self):
        for i, dt in enumerate(self.t_shifts):
            for j, dw in enumerate(self.w_shifts):
                yield dt, dw, self.coincidence[i, j]


def state_kind_of(state) -> StateKind:
    if isinstance(state, CombSpec):
        return StateKind.COMB_PAIR
    if isinstance(state, EntangledSpec):
        return StateKind.ENTANGLED_PAIR
    raise TypeError(f"unsupported state {type(state).__name__}")


def default_grid(spec: CombSpec, span_factor: float = 8.0, step_factor: float = 8.0) -> Grid:
    rep = check_scales(spec)
    return auto_time_grid(rep.d_t_phi, rep.d_t_eta, rep.d_omega_phi, span_factor, step_factor)


@dataclass
class ScanContext:
    """Lazily built state data shared by all points of a scan."""

    state: CombSpec | EntangledSpec
    span_factor: float = 8.0
    step_factor: float = 8.0
    max_delay: float = 0.0
    _overlap: ProductOverlap | None = field(default=None, repr=False)
    _grid: Grid | None = field(default=None, repr=False)

    @property
    def kind(self) -> StateKind:
        return state_kind_of(self.state)

    @property
    def grid(self) -> Grid:
        if self._grid is None:
            if self.kind is StateKind.COMB_PAIR:
                self._grid = default_grid(self.state, self.span_factor, self.step_factor)
            else:
                self._grid = entangled_grid(self.state, self.max_delay, self.step_factor)
        return self._grid

    @property
    def overlap(self) -> ProductOverlap:
        if self._overlap is None:
            wf = comb_state(self.state, self.grid)
            self._overlap = ProductOverlap(wf, wf)
        return self._overlap

    def prepare(self):
        """Build shared data up front so worker threads only read it."""
        _ = self.grid
        if self.kind is StateKind.COMB_PAIR:
            _ = self.overlap

    def exact_row(self, delta_ts, delta_omega) -> np.ndarray:
        if self.kind is StateKind.COMB_PAIR:
            return coincidence_from_overlap(self.overlap.overlaps(delta_ts, delta_omega))
        return np.array(
            [coincidence_entangled(self.state, Shift(dt, delta_omega), self.grid) for dt in delta_ts]
        )

    def approx_value(self, dt, dw, axis) -> float:
        s = self.state
        if self.kind is StateKind.ENTANGLED_PAIR:
            return approx_entangled_2d_dip(s, Shift(dt, dw))
        if axis == "time":
            return approx_comb_time_dip(s, dt)
        if axis == "frequency":
            return approx_comb_freq_dip(s, dw)
        return approx_comb_2d_dip(s, Shift(dt, dw))


def _evaluate_table(ctx: ScanContext, method: Method, t_shifts, w_shifts, axis, threads, oracle_opts):
    if method is Method.EXACT:
        rows = lambda dw: ctx.exact_row(t_shifts, dw)  # noqa: E731
    elif method is Method.APPROX:
        rows = lambda dw: np.array([ctx.approx_value(dt, dw, axis) for dt in t_shifts])  # noqa: E731
    else:
        from .oracle import OracleRunner

        runner = OracleRunner.for_state(ctx.state, **(oracle_opts or {}))
        # delta_t outermost so each delayed table is built once
        cols = [[runner.coincidence(Shift(dt, dw)) for dw in w_shifts] for dt in t_shifts]
        out = np.array(cols, dtype=float)
        for v in out.ravel():
            checked(v)
        return out
    n = threads if threads is not None else thread_count()
    if n > 1 and len(w_shifts) > 1:
        # rows are independent; map() keeps them in shift order
        ctx.prepare()
        with ThreadPoolExecutor(max_workers=n) as pool:
            table = list(pool.map(rows, w_shifts))
    else:
        table = [rows(dw) for dw in w_shifts]
    out = np.array(table, dtype=float).T  # [i_t, j_w]
    for v in out.ravel():
        checked(v)
    return out


def scan(
    state,
    t_shifts=None,
    w_shifts=None,
    methods=("exact",),
    span_factor: float = 8.0,
    step_factor: float = 8.0,
    threads: int | None = None,
    oracle_opts: dict | None = None,
):
    """Evaluate coincidence rates over a 1D or 2D set of shifts.

    Pass only ``t_shifts`` for a time scan, only ``w_shifts`` for a
    frequency scan, both for a 2D surface. Returns ``{Method: DipCurve or
    DipSurface}`` in the order of ``methods``.
    """
    if t_shifts is None and w_shifts is None:
        raise ValueError("need at least one shift axis")
    for arr in (t_shifts, w_shifts):
        if arr is not None and np.any(np.diff(np.asarray(arr, dtype=float)) <= 0):
            raise ValueError("shift lists must be strictly increasing")
    axis = "2d" if (t_shifts is not None and w_shifts is not None) else (
        "time" if t_shifts is not None else "frequency"
    )
    ts = np.asarray(t_shifts if t_shifts is not None else [0.0], dtype=float)
    ws = np.asarray(w_shifts if w_shifts is not None else [0.0], dtype=float)
    ctx = ScanContext(state, span_factor, step_factor, max_delay=float(np.max(np.abs(ts))))
    kind = ctx.kind
    valid = np.array([[in_small_shift_region(state, Shift(dt, dw)) for dw in ws] for dt in ts])

    results = {}
    for name in methods:
        method = METHOD_ALIASES[name] if isinstance(name, str) else Method(name)
        table = _evaluate_table(ctx, method, ts, ws, axis, threads, oracle_opts)
        flags = valid if method is Method.APPROX else None
        if axis == "time":
            res = DipCurve("time", ts, table[:, 0], method, kind, None if flags is None else flags[:, 0])
        elif axis == "frequency":
            res = DipCurve("frequency", ws, table[0, :], method, kind, None if flags is None else flags[0, :])
        else:
            res = DipSurface(ts, ws, table, method, kind, flags)
        results[method] = res
    return results

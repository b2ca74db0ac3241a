"""Single-photon frequency-comb states and time-energy entangled photon pairs.

A comb is a line shape repeated at spacing ``omega_spacing`` under a broad
envelope. In the time domain the roles swap: short pulses (Fourier partner
of the envelope) repeat with period ``T = 2 pi / omega_spacing`` under a
slow envelope (Fourier partner of the line shape).

Two exact ways of writing the comb exist in each domain, and they are each
other's Fourier transforms:

* ``modulated``: envelope(x) * sum_n tooth(x - n*spacing)
* ``sampled``:   sum_n envelope(n*spacing) * tooth(x - n*spacing)

The spectral ``modulated`` form transforms into the temporal ``sampled``
form and vice versa. With good scale separation all four agree closely.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .sampling import (
    DomainTag,
    Grid,
    SampledWavefunction,
    TruncationWarning,
    dft_to_conjugate,
    normalize,
)
from .shapes import (
    ShapeKind,
    ShapeSpec,
    analytic_fourier_partner,
    effective_width,
    evaluate,
    support_radius,
)

FORMS = ("modulated", "sampled")
_DUAL_FORM = {"modulated": "sampled", "sampled": "modulated"}

# relative amplitude below which a single tooth is not evaluated any further
_TOOTH_TAIL = 1e-17


class ResolutionError(ValueError):
    pass


@dataclass(frozen=True)
class CombSpec:
    omega_spacing: float
    line_shape: ShapeSpec
    envelope: ShapeSpec
    tooth_cutoff: float = 1e-6

    def __post_init__(self):
        if not self.omega_spacing > 0:
            raise ValueError("omega_spacing must be positive")
        if not 0 < self.tooth_cutoff < 1:
            raise ValueError("tooth_cutoff must lie in (0, 1)")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega_spacing

    @property
    def line_shape_t(self) -> ShapeSpec:
        """Slow temporal envelope, the Fourier partner of the line shape."""
        return analytic_fourier_partner(self.line_shape)

    @property
    def envelope_t(self) -> ShapeSpec:
        """Temporal shape of a single pulse."""
        return analytic_fourier_partner(self.envelope)


@dataclass(frozen=True)
class EntangledSpec:
    """Pair with line shape on w1 + w2 and envelope on (w1 - w2)/2.

    ``omega_spacing`` only sets the reference scales of "small" shifts.
    """

    line_shape: ShapeSpec
    envelope: ShapeSpec
    omega_spacing: float = 1.0

    def __post_init__(self):
        if not self.omega_spacing > 0:
            raise ValueError("omega_spacing must be positive")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega_spacing

    @property
    def line_shape_t(self) -> ShapeSpec:
        return analytic_fourier_partner(self.line_shape)

    @property
    def envelope_t(self) -> ShapeSpec:
        return analytic_fourier_partner(self.envelope)


@dataclass(frozen=True)
class ScaleReport:
    d_omega_phi: float
    d_omega_eta: float
    d_t_eta: float
    d_t_phi: float
    omega: float
    period: float
    inequality_3_ok: bool
    inequality_4_ok: bool
    uncertainty_product: float
    bound_5_ok: bool

    @property
    def all_ok(self) -> bool:
        return self.inequality_3_ok and self.inequality_4_ok and self.bound_5_ok

    def lines(self) -> list[str]:
        verdict = {True: "PASS", False: "FAIL"}
        return [
            f"d_omega_phi = {self.d_omega_phi:.6g}",
            f"d_omega_eta = {self.d_omega_eta:.6g}",
            f"d_t_eta = {self.d_t_eta:.6g}",
            f"d_t_phi = {self.d_t_phi:.6g}",
            f"Omega = {self.omega:.6g}, T = {self.period:.6g}",
            f"d_omega_phi < Omega < d_omega_eta: {verdict[self.inequality_3_ok]}",
            f"d_t_eta < T < d_t_phi: {verdict[self.inequality_4_ok]}",
            f"uncertainty product d_omega_phi*d_t_eta = {self.uncertainty_product:.6g}"
            f" (< 2*pi: {verdict[self.bound_5_ok]})",
        ]


def _tooth_window(tooth: ShapeSpec) -> float:
    if tooth.kind is ShapeKind.SINC:
        return math.inf
    return support_radius(tooth, _TOOTH_TAIL)


def _comb(
    envelope: ShapeSpec,
    tooth: ShapeSpec,
    spacing: float,
    grid: Grid,
    cutoff: float,
    form: str,
    resolution: float = 4.0,
) -> np.ndarray:
    if form not in FORMS:
        raise ValueError(f"form must be one of {FORMS}, got {form!r}")
    if grid.step > effective_width(tooth) / resolution:
        raise ResolutionError(
            f"grid step {grid.step:.4g} does not resolve tooth width {effective_width(tooth):.4g}"
        )
    x = grid.points
    lo, hi = x[0], x[-1]
    radius = support_radius(envelope, cutoff)
    peak = abs(evaluate(envelope, [envelope.center])[0])
    n = np.arange(
        math.ceil((envelope.center - radius) / spacing),
        math.floor((envelope.center + radius) / spacing) + 1,
    )
    centers = n * spacing
    weights = evaluate(envelope, centers)
    keep = np.abs(weights) >= cutoff * peak
    outside = keep & ((centers < lo) | (centers > hi))
    if outside.any():
        warnings.warn(
            TruncationWarning(f"{int(outside.sum())} teeth above cutoff fall outside the grid"),
            stacklevel=3,
        )
    keep &= ~outside

    window = _tooth_window(tooth)
    total = np.zeros(grid.count, dtype=complex)
    for c, w in zip(centers[keep], weights[keep]):
        if math.isinf(window):
            sl = slice(None)
        else:
            mid = c + tooth.center
            i0 = max(0, math.floor((mid - window - grid.start) / grid.step))
            i1 = min(grid.count, math.ceil((mid + window - grid.start) / grid.step) + 1)
            if i1 <= i0:
                continue
            sl = slice(i0, i1)
        vals = evaluate(tooth, x[sl] - c)
        total[sl] += vals if form == "modulated" else w * vals
    if form == "modulated":
        total *= evaluate(envelope, x)
    return total


def build_comb_spectral(
    spec: CombSpec, grid: Grid, form: str = "modulated", resolution: float = 4.0
) -> SampledWavefunction:
    """Frequency-domain comb amplitude on ``grid``, normalized numerically.

    Raises ResolutionError when fewer than ``resolution`` grid steps fit in
    the line width.
    """
    amps = _comb(
        spec.envelope, spec.line_shape, spec.omega_spacing, grid, spec.tooth_cutoff, form, resolution
    )
    return normalize(SampledWavefunction(DomainTag.FREQUENCY, grid, amps))


def build_comb_temporal(
    spec: CombSpec,
    grid: Grid,
    form: str = "modulated",
    method: str = "direct",
    resolution: float = 4.0,
) -> SampledWavefunction:
    """Time-domain comb on ``grid``.

    ``method="direct"`` evaluates the pulse-train formula of the given form;
    ``method="dft"`` builds the dual spectral form on the conjugate grid and
    transforms it, which must agree with the direct path pointwise.
    """
    if method == "direct":
        amps = _comb(
            spec.line_shape_t, spec.envelope_t, spec.period, grid, spec.tooth_cutoff, form, resolution
        )
        return normalize(SampledWavefunction(DomainTag.TIME, grid, amps))
    if method == "dft":
        if form not in FORMS:
            raise ValueError(f"form must be one of {FORMS}, got {form!r}")
        spectral = build_comb_spectral(spec, grid.conjugate(), _DUAL_FORM[form], resolution)
        return normalize(dft_to_conjugate(spectral, center=grid.center))
    raise ValueError(f"unknown method {method!r}")


def comb_state(spec: CombSpec, grid: Grid) -> SampledWavefunction:
    """The comb photon in time: the spectral definition carried over by DFT."""
    return build_comb_temporal(spec, grid, form="sampled", method="dft")


def build_entangled_temporal(
    spec: EntangledSpec, grid1: Grid, grid2: Grid, max_count: int = 1024
) -> np.ndarray:
    """Table ``psi[i, j] = eta_t(t1_i - t2_j) * phi_t((t1_i + t2_j) / 2)``, unit norm."""
    if max(grid1.count, grid2.count) > max_count:
        raise ValueError(f"two-photon table limited to {max_count} points per axis")
    t1 = grid1.points[:, None]
    t2 = grid2.points[None, :]
    psi = evaluate(spec.envelope_t, (t1 - t2).ravel()).reshape(grid1.count, grid2.count)
    psi *= evaluate(spec.line_shape_t, ((t1 + t2) / 2.0).ravel()).reshape(psi.shape)
    nrm = float(np.sum(np.abs(psi) ** 2) * grid1.step * grid2.step)
    if abs(nrm - 1.0) > 1e-3:
        warnings.warn(
            TruncationWarning(f"two-photon table captures norm {nrm:.6g}", nrm), stacklevel=2
        )
    return psi / math.sqrt(nrm)


def check_scales(spec: CombSpec | EntangledSpec) -> ScaleReport:
    """Scale-separation verdicts for a comb (or the matching entangled pair)."""
    dw_phi = effective_width(spec.line_shape)
    dw_eta = effective_width(spec.envelope)
    dt_eta = effective_width(spec.envelope_t)
    dt_phi = effective_width(spec.line_shape_t)
    omega, period = spec.omega_spacing, spec.period
    product = dw_phi * dt_eta
    return ScaleReport(
        d_omega_phi=dw_phi,
        d_omega_eta=dw_eta,
        d_t_eta=dt_eta,
        d_t_phi=dt_phi,
        omega=omega,
        period=period,
        inequality_3_ok=dw_phi < omega < dw_eta,
        inequality_4_ok=dt_eta < period < dt_phi,
        uncertainty_product=product,
        bound_5_ok=product < 2.0 * math.pi,
    )

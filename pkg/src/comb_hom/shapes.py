"""Normalized one-dimensional wavefunction shapes with closed-form Fourier partners.

Every shape is unit-normalized in L2 by construction. The Fourier convention
used throughout the package is

    psi(t) = (2 pi)^(-1/2) * integral psi(w) exp(-i w t) dw
    psi(w) = (2 pi)^(-1/2) * integral psi(t) exp(+i w t) dt

so a Gaussian of RMS width ``sigma`` maps to a Gaussian of RMS width
``1 / (2 sigma)`` and a rectangle of width ``W`` maps to the ``sinc`` kind
with the same parameter ``W``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

# FWHM of a Gaussian density divided by its RMS width, 2*sqrt(2 ln 2).
GAUSSIAN_FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))


class InvalidShapeError(ValueError):
    pass


class ShapeKind(str, enum.Enum):
    GAUSSIAN = "gaussian"
    RECTANGLE = "rectangle"
    SINC = "sinc"


@dataclass(frozen=True)
class ShapeSpec:
    """A parametric line shape / envelope.

    ``width`` means: RMS width of ``|f|^2`` for gaussian, full support for
    rectangle, and the conjugate-domain rectangle width for sinc.

    The optional ``ramp`` and ``phase`` fields describe the Fourier partner
    of a displaced shape: the value is
    ``exp(i*phase) * exp(i*ramp*(x - center)) * f0(x - center)``.
    """

    kind: ShapeKind
    width: float
    center: float = 0.0
    ramp: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ShapeKind(self.kind))
        if not (math.isfinite(self.width) and self.width > 0):
            raise InvalidShapeError(f"shape width must be positive, got {self.width!r}")

    @property
    def has_phase_ramp(self) -> bool:
        return self.ramp != 0.0

    @classmethod
    def gaussian(cls, sigma, center=0.0):
        return cls(ShapeKind.GAUSSIAN, sigma, center)

    @classmethod
    def rectangle(cls, width, center=0.0):
        return cls(ShapeKind.RECTANGLE, width, center)

    @classmethod
    def sinc(cls, width, center=0.0):
        return cls(ShapeKind.SINC, width, center)


def _centered_values(kind: ShapeKind, width: float, u: np.ndarray) -> np.ndarray:
    if kind is ShapeKind.GAUSSIAN:
        return (2.0 * np.pi * width**2) ** -0.25 * np.exp(-(u**2) / (4.0 * width**2))
    if kind is ShapeKind.RECTANGLE:
        half = 0.5 * width
        dist = np.abs(u)
        out = np.where(dist < half, width**-0.5, 0.0)
        # midpoint convention at the edges
        edge = np.abs(dist - half) <= 1e-12 * max(half, 1.0)
        return np.where(edge, 0.5 * width**-0.5, out)
    # sinc: np.sinc(x) = sin(pi x)/(pi x)
    return math.sqrt(width / (2.0 * np.pi)) * np.sinc(width * u / (2.0 * np.pi))


def evaluate(shape: ShapeSpec, points) -> np.ndarray:
    """Evaluate ``shape`` at ``points``; returns a complex array."""
    x = np.asarray(points, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("evaluation points must be finite")
    u = x - shape.center
    vals = _centered_values(shape.kind, shape.width, u).astype(complex)
    if shape.ramp != 0.0:
        vals = vals * np.exp(1j * shape.ramp * u)
    if shape.phase != 0.0:
        vals = vals * np.exp(1j * shape.phase)
    return vals


_PARTNER_KIND = {
    ShapeKind.GAUSSIAN: ShapeKind.GAUSSIAN,
    ShapeKind.RECTANGLE: ShapeKind.SINC,
    ShapeKind.SINC: ShapeKind.RECTANGLE,
}


def analytic_fourier_partner(shape: ShapeSpec, inverse: bool = False) -> ShapeSpec:
    """Closed-form transform of ``shape`` into the conjugate domain.

    ``inverse=False`` maps frequency -> time (kernel ``exp(-i w t)``),
    ``inverse=True`` maps time -> frequency (kernel ``exp(+i w t)``).
    A displacement turns into a phase ramp and vice versa.
    """
    kind = _PARTNER_KIND[shape.kind]
    width = 1.0 / (2.0 * shape.width) if kind is ShapeKind.GAUSSIAN else shape.width
    c, r = shape.center, shape.ramp
    if not inverse:
        # f(w) = e^{ir(w-c)} g(w-c)  ->  e^{-ic(t-r)} G(t-r)
        return ShapeSpec(kind, width, center=r, ramp=-c, phase=shape.phase)
    # f(t) = e^{ir(t-c)} g(t-c)  ->  e^{ic(w+r)} G(w+r) * e^{-icr}
    return ShapeSpec(kind, width, center=-r, ramp=c, phase=shape.phase - c * r)


def rms_width(shape: ShapeSpec) -> float:
    """RMS width of ``|f|^2``; ``math.inf`` for sinc (divergent second moment)."""
    if shape.kind is ShapeKind.GAUSSIAN:
        return shape.width
    if shape.kind is ShapeKind.RECTANGLE:
        return shape.width / math.sqrt(12.0)
    return math.inf


@lru_cache(maxsize=None)
def _sinc2_half_point() -> float:
    # positive y with sin(y)^2 / y^2 = 1/2
    return brentq(lambda y: (math.sin(y) / y) ** 2 - 0.5, 0.5, 2.0, xtol=1e-15)


def density_fwhm(shape: ShapeSpec) -> float:
    """Full width at half maximum of the density ``|f|^2``."""
    if shape.kind is ShapeKind.GAUSSIAN:
        return GAUSSIAN_FWHM_PER_SIGMA * shape.width
    if shape.kind is ShapeKind.RECTANGLE:
        return shape.width
    # |f|^2 ~ sinc^2(W x / 2)
    return 4.0 * _sinc2_half_point() / shape.width


def effective_width(shape: ShapeSpec) -> float:
    """RMS width, or the Gaussian-equivalent FWHM/2.355 proxy when the RMS diverges."""
    w = rms_width(shape)
    if math.isfinite(w):
        return w
    return density_fwhm(shape) / GAUSSIAN_FWHM_PER_SIGMA


def support_radius(shape: ShapeSpec, rel: float) -> float:
    """Distance from the center beyond which ``|f| < rel * max|f|``.

    For sinc the bound comes from the 1/x envelope of the side lobes.
    """
    if shape.kind is ShapeKind.GAUSSIAN:
        return 2.0 * shape.width * math.sqrt(math.log(1.0 / rel))
    if shape.kind is ShapeKind.RECTANGLE:
        return 0.5 * shape.width
    return 2.0 / (shape.width * rel)


def autocorrelation(shape: ShapeSpec, shifts) -> np.ndarray:
    """Closed-form ``F(d) = integral f(x) f*(x - d) dx`` for the shape."""
    d = np.asarray(shifts, dtype=float)
    if shape.kind is ShapeKind.GAUSSIAN:
        base = np.exp(-(d**2) / (8.0 * shape.width**2))
    elif shape.kind is ShapeKind.RECTANGLE:
        base = np.clip(1.0 - np.abs(d) / shape.width, 0.0, None)
    else:
        base = np.sinc(shape.width * d / (2.0 * np.pi))
    return base.astype(complex) * np.exp(1j * shape.ramp * d)


def with_center(shape: ShapeSpec, center: float) -> ShapeSpec:
    return replace(shape, center=center)

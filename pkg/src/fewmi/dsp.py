"""Butterworth band-pass design and zero-phase band splitting.

The three analysis bands (4-7, 8-13, 13-32 Hz at 250 Hz) are realized as
4th-order Butterworth band-pass filters designed by the bilinear transform
with frequency pre-warping, factored into second-order sections. Trials are
filtered forward-backward (zero phase), which squares the magnitude
response; reflect padding of 3x the filter order suppresses edge
transients.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError, NumericalError

SAMPLE_RATE_HZ = 250.0
TRIAL_SAMPLES = 875
TRIAL_ELECTRODES = 3

STABILITY_MARGIN = 1e-9


@dataclass(frozen=True)
class BandSpec:
    """Pass-band edges in Hz for a given sampling rate."""

    low_hz: float
    high_hz: float
    sample_rate_hz: float = SAMPLE_RATE_HZ

    def __post_init__(self):
        problems = []
        if not (self.low_hz > 0):
            problems.append(f"low edge {self.low_hz} Hz must be > 0")
        if not (self.high_hz > self.low_hz):
            problems.append(
                f"high edge {self.high_hz} Hz must exceed low edge {self.low_hz} Hz"
            )
        if not (self.high_hz < self.sample_rate_hz / 2):
            problems.append(
                f"high edge {self.high_hz} Hz must stay below Nyquist "
                f"({self.sample_rate_hz / 2} Hz)"
            )
        if problems:
            raise ConfigError(problems)

    @property
    def center_hz(self) -> float:
        return math.sqrt(self.low_hz * self.high_hz)


DEFAULT_BANDS = (
    BandSpec(4.0, 7.0),
    BandSpec(8.0, 13.0),
    BandSpec(13.0, 32.0),
)


@dataclass(frozen=True)
class Biquad:
    """One second-order section: (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)."""

    b0: float
    b1: float
    b2: float
    a1: float
    a2: float

    def pole_radius(self) -> float:
        roots = np.roots([1.0, self.a1, self.a2])
        return float(np.max(np.abs(roots))) if roots.size else 0.0


@dataclass(frozen=True)
class BiquadCascade:
    sections: tuple[Biquad, ...]
    sample_rate_hz: float

    @property
    def order(self) -> int:
        return 2 * len(self.sections)

    def response(self, freqs_hz) -> np.ndarray:
        """Complex frequency response at the given frequencies."""
        w = 2.0 * np.pi * np.atleast_1d(np.asarray(freqs_hz, dtype=np.float64))
        z1 = np.exp(-1j * w / self.sample_rate_hz)
        z2 = z1 * z1
        h = np.ones_like(z1)
        for s in self.sections:
            h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2)
        return h

    def gain(self, freqs_hz) -> np.ndarray:
        return np.abs(self.response(freqs_hz))


def _prewarp(f_hz: float, fs: float) -> float:
    return 2.0 * fs * math.tan(math.pi * f_hz / fs)


def _pair_conjugates(poles: list[complex], tol: float = 1e-8) -> list[tuple[complex, complex]]:
    order = sorted(range(len(poles)), key=lambda i: (poles[i].real, abs(poles[i].imag)))
    used = [False] * len(poles)
    pairs = []
    for i in order:
        if used[i]:
            continue
        used[i] = True
        zi = poles[i]
        candidates = [j for j in order if not used[j]]
        if not candidates:
            raise NumericalError("odd number of poles cannot form biquad sections")
        if abs(zi.imag) <= tol:
            j = next(j for j in candidates if abs(poles[j].imag) <= tol)
        else:
            j = min(candidates, key=lambda j: abs(poles[j] - zi.conjugate()))
        used[j] = True
        pairs.append((zi, poles[j]))
    return pairs


def design_butterworth_bandpass(spec: BandSpec, order: int = 4) -> BiquadCascade:
    """Design an order-`order` Butterworth band-pass as a biquad cascade.

    `order` counts the overall band-pass order (a 4th-order band-pass has
    two second-order sections). Unity gain at the pre-warped geometric
    center; each section carries one zero at z=1 and one at z=-1, so the
    response is exactly zero at DC and at Nyquist.
    """
    if order < 2 or order % 2 != 0:
        raise ConfigError(f"band-pass order must be a positive even integer, got {order}")
    n = order // 2
    fs = spec.sample_rate_hz
    wl = _prewarp(spec.low_hz, fs)
    wh = _prewarp(spec.high_hz, fs)
    w0_sq = wl * wh
    bw = wh - wl

    k = np.arange(1, n + 1)
    prototype = np.exp(1j * np.pi * (2 * k + n - 1) / (2 * n))

    analog_poles: list[complex] = []
    for p in prototype:
        pb = complex(p) * bw
        disc = cmath.sqrt(pb * pb - 4.0 * w0_sq)
        analog_poles.append((pb + disc) / 2.0)
        analog_poles.append((pb - disc) / 2.0)

    c = 2.0 * fs
    digital_poles = [(c + s) / (c - s) for s in analog_poles]
    for z in digital_poles:
        if abs(z) >= 1.0 - STABILITY_MARGIN:
            raise NumericalError(
                f"unstable design for band ({spec.low_hz}, {spec.high_hz}) Hz: "
                f"pole radius {abs(z):.12f}"
            )

    sections = []
    for z1, z2 in _pair_conjugates(digital_poles):
        a1 = -(z1 + z2).real
        a2 = (z1 * z2).real
        sections.append(Biquad(1.0, 0.0, -1.0, a1, a2))

    # normalize to unit gain at the pre-warped geometric center frequency
    w0_dig = 2.0 * math.atan(math.sqrt(w0_sq) / (2.0 * fs))
    f0_dig = w0_dig * fs / (2.0 * math.pi)
    raw = BiquadCascade(tuple(sections), fs)
    mag = float(raw.gain(f0_dig)[0])
    g = mag ** (-1.0 / len(sections))
    sections = [Biquad(s.b0 * g, s.b1 * g, s.b2 * g, s.a1, s.a2) for s in sections]
    return BiquadCascade(tuple(sections), fs)


def _run_cascade(coeffs: list[tuple[float, float, float, float, float]], block: np.ndarray) -> np.ndarray:
    """One causal pass of the section chain over [T, C] (direct form II transposed)."""
    out = np.empty_like(block)
    for col in range(block.shape[1]):
        samples = block[:, col].tolist()
        for b0, b1, b2, a1, a2 in coeffs:
            s1 = 0.0
            s2 = 0.0
            for i, xv in enumerate(samples):
                yv = b0 * xv + s1
                s1 = b1 * xv - a1 * yv + s2
                s2 = b2 * xv - a2 * yv
                samples[i] = yv
        out[:, col] = samples
    return out


def apply_zero_phase(cascade: BiquadCascade, signal) -> np.ndarray:
    """Forward-backward filtering with reflect padding (zero phase).

    Accepts [T] or [T, C]; columns are filtered independently. The
    effective magnitude response is the squared single-pass response.
    """
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim not in (1, 2):
        raise DimensionError(f"apply_zero_phase: expected [T] or [T,C], got {x.shape}")
    single = x.ndim == 1
    block = x[:, None] if single else x
    t_len = block.shape[0]
    pad = 3 * cascade.order
    if t_len <= pad:
        raise DimensionError(
            f"apply_zero_phase: signal length {t_len} too short for "
            f"reflect padding of {pad} samples (3x filter order)"
        )
    coeffs = [(s.b0, s.b1, s.b2, s.a1, s.a2) for s in cascade.sections]
    padded = np.pad(block, ((pad, pad), (0, 0)), mode="reflect")
    y = _run_cascade(coeffs, padded)
    y = _run_cascade(coeffs, y[::-1])[::-1]
    out = y[pad : pad + t_len]
    return out[:, 0] if single else out


@dataclass(frozen=True)
class BandStack:
    """A trial decomposed into the three analysis bands."""

    bands: tuple[np.ndarray, ...]
    specs: tuple[BandSpec, ...]

    def reconstruct(self) -> np.ndarray:
        """Sum of the band components (not the original broadband trial)."""
        total = np.zeros_like(self.bands[0])
        for b in self.bands:
            total = total + b
        return total


def band_cascades(bands: tuple[BandSpec, ...] = DEFAULT_BANDS, order: int = 4) -> tuple[BiquadCascade, ...]:
    return tuple(design_butterworth_bandpass(spec, order) for spec in bands)


def split_bands(
    trial_samples,
    bands: tuple[BandSpec, ...] = DEFAULT_BANDS,
    cascades: tuple[BiquadCascade, ...] | None = None,
) -> BandStack:
    """Split an [875, 3] trial into its per-band components."""
    x = np.asarray(trial_samples, dtype=np.float64)
    if x.shape != (TRIAL_SAMPLES, TRIAL_ELECTRODES):
        raise DimensionError(
            f"split_bands: expected trial of shape ({TRIAL_SAMPLES}, "
            f"{TRIAL_ELECTRODES}), got {x.shape}"
        )
    if not np.all(np.isfinite(x)):
        raise NumericalError("split_bands: trial contains non-finite values")
    if cascades is None:
        cascades = band_cascades(bands)
    filtered = tuple(apply_zero_phase(c, x) for c in cascades)
    return BandStack(bands=filtered, specs=tuple(bands))

"""
Reflection peaks and dips: detection, sub-grid refinement, linewidths and
emitter counting.

Candidates are located on the sampled grid, then polished on the continuous
forward model carried by the spectrum (or on a user-supplied reflectivity
callable), so reported centres do not depend on the grid once each feature
is resolved by a few points.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq
from scipy.signal import peak_prominences

from .errors import DomainError, RefinementError, ScanRangeError
from .model import (
    EmitterArray,
    Spectrum,
    WaveguideParams,
    collective_resonances,
    compute_spectrum,
)
from .optimize import golden_section, parabolic_vertex

#: features whose prominence is below this are floating-point ripple
MIN_PROMINENCE = 1e-6
#: fraction of the tallest peak a feature's prominence must reach to be counted
SIGNIFICANCE = 0.05


@dataclass(frozen=True)
class PeakDescriptor:
    center: float
    height: float
    fwhm: float
    prominence: float = np.nan


@dataclass(frozen=True)
class DipDescriptor:
    center: float
    depth: float
    prominence: float = np.nan


@dataclass
class FeatureSet:
    peaks: list[PeakDescriptor]
    dips: list[DipDescriptor]
    window: tuple[float, float]
    resolution: float
    max_loss: float = 0.0
    rate_unit: str = "gamma0"

    def significant(self, fraction=SIGNIFICANCE) -> "FeatureSet":
        """Drop sidelobes whose prominence is below ``fraction`` of the
        tallest peak height.

        A dip is also kept when it falls below ``fraction`` of its own
        shoulder, so transparency points far out on a weak wing survive.
        """
        if not self.peaks:
            return replace(self, peaks=[], dips=list(self.dips))
        level = fraction * max(p.height for p in self.peaks)
        return replace(
            self,
            peaks=[p for p in self.peaks if p.prominence >= level],
            dips=[
                d for d in self.dips
                if d.prominence >= level or d.depth <= fraction * (d.depth + d.prominence)
            ],
        )

    def tallest(self, n) -> list[PeakDescriptor]:
        """The ``n`` highest peaks, returned in order of centre."""
        top = sorted(self.peaks, key=lambda p: (-p.height, p.center))[:n]
        return sorted(top, key=lambda p: p.center)


def _strict_extrema(y):
    """Indices of strict interior maxima and minima of ``y``.

    Runs of equal values count as one point located at the lowest index of
    the run.
    """
    y = np.asarray(y)
    if y.size < 3:
        return np.array([], int), np.array([], int)
    start = np.concatenate(([True], y[1:] != y[:-1]))
    idx = np.flatnonzero(start)  # first index of every run
    v = y[idx]
    if v.size < 3:
        return np.array([], int), np.array([], int)
    mid = v[1:-1]
    is_max = (mid > v[:-2]) & (mid > v[2:])
    is_min = (mid < v[:-2]) & (mid < v[2:])
    return idx[1:-1][is_max], idx[1:-1][is_min]


def _model_reflectivity(spectrum, reflectivity):
    if reflectivity is not None:
        return reflectivity
    if spectrum.has_model:
        return spectrum.reflectivity_at
    return None


def _polish(x, y, i, sign, func, rel_tol):
    """Refine the extremum bracketed by grid points ``i-1, i, i+1``.

    ``sign`` is +1 for a maximum and -1 for a minimum.
    """
    a, b = x[i - 1], x[i + 1]
    guess = parabolic_vertex(x[i - 1], x[i], x[i + 1], y[i - 1], y[i], y[i + 1])
    if func is None:
        # parabola through the triple; no continuous model available
        coef = np.polyfit(x[i - 1:i + 2] - x[i], y[i - 1:i + 2], 2)
        return float(guess), float(np.polyval(coef, guess - x[i]))
    h = min(x[i] - a, b - x[i])
    xtol = rel_tol * h
    c, fc = golden_section(lambda s: -sign * func(s), a, b, xtol)
    if min(c - a, b - c) <= xtol:
        raise RefinementError(
            f"extremum polish near {x[i]:.9g} converged onto the bracket edge "
            f"[{a:.9g}, {b:.9g}]"
        )
    # keep whichever of the golden result and the parabolic guess is better
    if a < guess < b:
        fg = -sign * func(guess)
        if fg < fc:
            c, fc = guess, fg
    return float(c), float(-sign * fc)


def find_extrema(spectrum: Spectrum, reflectivity=None, min_prominence=MIN_PROMINENCE, rel_tol=1e-6) -> FeatureSet:
    """Locate and refine every reflection peak and dip of ``spectrum``.

    Parameters
    ----------
    spectrum : Spectrum
        Sampled spectrum. When it carries its forward model the extrema are
        polished on that model by golden-section search.
    reflectivity : callable, optional
        Continuous ``R(dw)`` overriding the spectrum's own model.
    min_prominence : float
        Features less prominent than this are discarded.
    rel_tol : float
        Polish tolerance as a fraction of the local grid spacing.

    Returns
    -------
    FeatureSet
        Peaks (with heights and FWHM) and dips, each sorted by centre. A
        peak whose half-height crossing falls outside the window gets
        ``fwhm = nan``.
    """
    x = spectrum.grid
    R = spectrum.R
    func = _model_reflectivity(spectrum, reflectivity)
    imax, imin = _strict_extrema(R)
    peaks, dips = [], []
    if imax.size:
        prom = peak_prominences(R, imax)[0]
        for i, p in zip(imax, prom):
            if p < min_prominence:
                continue
            c, hgt = _polish(x, R, i, +1, func, rel_tol)
            peak = PeakDescriptor(c, hgt, np.nan, float(p))
            try:
                width = measure_fwhm(spectrum, peak, reflectivity=func)
            except ScanRangeError:
                width = np.nan
            peaks.append(replace(peak, fwhm=width))
    if imin.size:
        prom = peak_prominences(-R, imin)[0]
        for i, p in zip(imin, prom):
            if p < min_prominence:
                continue
            c, dep = _polish(x, R, i, -1, func, rel_tol)
            dips.append(DipDescriptor(c, max(dep, 0.0), float(p)))
    resolution = float(np.min(np.diff(x))) if x.size > 1 else 0.0
    loss = float(np.max(1.0 - spectrum.R - spectrum.T))
    return FeatureSet(
        _dedupe(peaks, resolution * rel_tol),
        _dedupe(dips, resolution * rel_tol),
        (float(x[0]), float(x[-1])),
        resolution,
        max_loss=loss,
        rate_unit=spectrum.rate_unit,
    )


def _dedupe(features, tol):
    features = sorted(features, key=lambda f: f.center)
    out = []
    for f in features:
        if out and f.center - out[-1].center <= tol:
            continue
        out.append(f)
    return out


def _crossing(y, level, start, stop, step):
    """First grid index walking from ``start`` towards ``stop`` with
    ``y < level``."""
    j = start
    while j != stop and y[j] >= level:
        j += step
    if j == stop:
        raise ScanRangeError("half-height crossing lies outside the scan window")
    return j


def measure_fwhm(spectrum: Spectrum, peak: PeakDescriptor, reflectivity=None) -> float:
    """Full width at half of the peak height, measured from zero.

    The nearest grid points below half height bracket each crossing, which is
    then located on the continuous model by Brent's bracketing root finder.
    Without a model the crossing is linearly interpolated between samples.
    """
    x = spectrum.grid
    R = spectrum.R
    func = _model_reflectivity(spectrum, reflectivity)
    half = 0.5 * peak.height
    c = peak.center
    n = x.size
    right0 = int(np.searchsorted(x, c, side="right"))
    left0 = right0 - 1
    try:
        jl = _crossing(R, half, left0, -1, -1) if left0 >= 0 else None
        jr = _crossing(R, half, right0, n, +1) if right0 < n else None
    except ScanRangeError:
        raise ScanRangeError(
            f"half-height crossing of the peak at {c:.9g} lies outside the "
            f"window [{x[0]:.9g}, {x[-1]:.9g}]; widen the window"
        ) from None
    if jl is None or jr is None:
        raise ScanRangeError(f"peak at {c:.9g} sits on the window edge")

    if func is None:
        def cross(j, inner):
            x0, x1, y0, y1 = x[j], x[inner], R[j], R[inner]
            return x0 + (half - y0) * (x1 - x0) / (y1 - y0)

        lo = cross(jl, jl + 1) if jl + 1 < right0 else None
        hi = cross(jr, jr - 1) if jr - 1 > left0 else None
        if lo is None or hi is None:
            raise ScanRangeError(f"peak at {c:.9g} is not resolved by the grid")
        return float(hi - lo)

    f = lambda s: func(s) - half
    span = x[jr] - x[jl]
    xtol = 1e-12 * span
    lo = brentq(f, x[jl], c, xtol=xtol, rtol=1e-14)
    hi = brentq(f, c, x[jr], xtol=xtol, rtol=1e-14)
    return float(hi - lo)


def count_emitters(features: FeatureSet, regime: str, significance=SIGNIFICANCE) -> int:
    """Number of emitters implied by the spectral features.

    Lossless waveguides show one reflection dip fewer than there are
    emitters; lossy ones show one reflection peak per emitter. Sidelobes less
    prominent than ``significance`` times the tallest peak are ignored.
    """
    if regime not in ("lossless", "lossy"):
        raise DomainError(f"regime must be 'lossless' or 'lossy', got {regime!r}")
    sig = features.significant(significance)
    if regime == "lossless":
        if features.max_loss > 1e-6:
            warnings.warn(
                "counting in the lossless regime but R + T < 1 somewhere in the "
                f"spectrum (max loss {features.max_loss:.3g}); the count may be "
                "ambiguous",
                stacklevel=2,
            )
        return len(sig.dips) + 1
    return len(sig.peaks)


def default_window(emitters: EmitterArray, waveguide: WaveguideParams | None = None):
    """Symmetric detuning window wide enough for every collective feature.

    Half width is the largest of four single-emitter linewidths, three times
    the largest collective frequency shift, and twice the largest lossless
    transparency point ``(G/2)|tan(k_a d)|`` of neighbouring pairs.
    """
    waveguide = waveguide or WaveguideParams()
    centers, _ = collective_resonances(emitters, waveguide)
    width = emitters.gamma_wg + emitters.gamma_free
    half = max(4.0 * width.max(), 3.0 * np.abs(centers).max())
    if len(emitters) > 1:
        tan = np.abs(np.tan(waveguide.k_a * emitters.separations))
        dip = np.minimum(emitters.gamma_wg.max() * tan, 1e4 * width.max())
        half = max(half, float(dip.max()))
    return -half, half


def auto_grid(emitters: EmitterArray, waveguide: WaveguideParams | None = None, points=4001, window=None, local_points=401, local_span=10.0):
    """Uniform grid over ``window`` refined around each collective resonance.

    Each resonance gets ``local_points`` extra samples over ``local_span``
    half widths on either side, so narrow subradiant features are resolved
    even on a coarse base grid.
    """
    waveguide = waveguide or WaveguideParams()
    lo, hi = window if window is not None else default_window(emitters, waveguide)
    base = np.linspace(lo, hi, int(points))
    centers, hw = collective_resonances(emitters, waveguide)
    floor = 1e-9 * max(abs(lo), abs(hi))
    parts = [base]
    for c, w in zip(centers, np.maximum(hw, floor)):
        local = np.linspace(c - local_span * w, c + local_span * w, int(local_points))
        parts.append(local[(local > lo) & (local < hi)])
    grid = np.unique(np.concatenate(parts))
    keep = np.concatenate(([True], np.diff(grid) > 1e-12 * (hi - lo)))
    return grid[keep]


def analyze(emitters: EmitterArray, waveguide: WaveguideParams | None = None, points=4001, window=None):
    """Forward spectrum on an automatic grid and its refined features."""
    waveguide = waveguide or WaveguideParams()
    grid = auto_grid(emitters, waveguide, points=points, window=window)
    spectrum = compute_spectrum(emitters, grid, waveguide)
    return spectrum, find_extrema(spectrum)

"""
Recover emitter separation and decay rates from spectral features.

Three routes are provided:

* lossless waveguide: the reflection dip position fixes ``d`` modulo
  ``lambda/2``; a gradient field then selects the branch;
* lossy waveguide: superradiant/subradiant peak positions and linewidths
  fix the complex collective coupling, and ``d`` is the separation whose
  model coupling matches it best;
* non-identical emitters: a strong gradient field separates the two
  resonances so each one is read as a single emitter.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DomainError, SeparabilityError, UnresolvedBranchError
from .features import FeatureSet, PeakDescriptor, find_extrema
from .model import Spectrum, WaveguideParams, collective_coupling
from .optimize import golden_section


@dataclass(frozen=True)
class InversionResult:
    d: float
    n: int | None
    gamma_wg: float | tuple[float, ...]
    gamma_free: float | tuple[float, ...]
    residual: float
    method: str
    alternatives: tuple[tuple[float, float], ...] = field(default=())

    def __post_init__(self):
        if not self.d > 0:
            raise DomainError(f"recovered separation must be positive, got {self.d}")
        if self.residual < 0:
            raise DomainError("residual must be non-negative")


@dataclass(frozen=True)
class FitTargets:
    """Measured collective coupling and superradiant peak data.

    ``re_target`` and ``im_target`` estimate ``Re`` and ``Im`` of
    ``V12 exp(i k_a d)``; ``r_max`` is the superradiant peak reflectivity and
    ``fwhm_sum`` the summed linewidths of both peaks.
    """

    re_target: float
    im_target: float
    r_max: float
    fwhm_sum: float

    def __post_init__(self):
        if not self.fwhm_sum > 0:
            raise DomainError("fwhm_sum must be positive")
        if not 0 < self.r_max <= 1:
            raise DomainError(f"r_max must lie in (0, 1], got {self.r_max}")

    @classmethod
    def from_peaks(cls, superradiant: PeakDescriptor, subradiant: PeakDescriptor):
        """Targets from the broad (superradiant) and narrow (subradiant) peak.

        The imaginary target is half the peak splitting, i.e. the mean of the
        two centre magnitudes when the peaks sit either side of zero.
        """
        return cls(
            re_target=(superradiant.fwhm - subradiant.fwhm) / 4.0,
            im_target=(superradiant.center - subradiant.center) / 2.0,
            r_max=superradiant.height,
            fwhm_sum=superradiant.fwhm + subradiant.fwhm,
        )

    @classmethod
    def from_features(cls, features: FeatureSet):
        peaks = [p for p in features.peaks if np.isfinite(p.fwhm)]
        top = sorted(peaks, key=lambda p: (-p.height, p.center))[:2]
        if len(top) < 2:
            raise SeparabilityError(
                "need two resolved reflection peaks (superradiant and subradiant)"
            )
        sup, sub = sorted(top, key=lambda p: -p.fwhm)
        return cls.from_peaks(sup, sub)


class BranchMatch(NamedTuple):
    n: int
    d: float
    residual: float


def invert_dip_lossless(dip: float, gamma_wg: float, n: int = 0, waveguide: WaveguideParams | None = None) -> float:
    """Separation of two lossless emitters from their reflection dip.

    Reflection vanishes where ``dw = -(G/2) tan(k d)`` with ``k = k_a + dk``,
    so ``d = (arctan(-2 dw / G) + n pi) / k``. With an infinite group
    velocity this is ``n lambda/2 + lambda arctan(-2 dw/G) / (2 pi)``.
    """
    if not gamma_wg > 0:
        raise DomainError("guided decay rate must be positive")
    if n < 0:
        raise DomainError("branch index must be non-negative")
    waveguide = waveguide or WaveguideParams()
    k = float(waveguide.wavenumber(dip))
    d = (math.atan(-2.0 * dip / gamma_wg) + n * math.pi) / k
    if not d > 0:
        raise DomainError(
            f"dip at {dip:.6g} with branch n={n} gives non-positive separation {d:.6g}"
        )
    return d


def measured_splitting(source) -> float:
    """Distance between the two tallest reflection peaks (0 for one peak)."""
    features = find_extrema(source) if isinstance(source, Spectrum) else source
    top = features.tallest(2)
    if len(top) < 2:
        return 0.0
    return abs(top[1].center - top[0].center)


def disambiguate_branch(splitting, gradient: float, d0: float, wavelength: float = 1.0, n_max: int | None = None, tol: float | None = None) -> BranchMatch:
    """Pick the branch ``n`` whose separation ``n lambda/2 + d0`` predicts the
    peak splitting observed under a gradient field.

    ``splitting`` may be a number, a :class:`Spectrum` or a
    :class:`FeatureSet`; in the latter cases it is read from the two tallest
    peaks. The gradient is in rate units per wavelength.
    """
    if not isinstance(splitting, (int, float, np.floating)):
        splitting = measured_splitting(splitting)
    if gradient == 0:
        raise DomainError("a non-zero gradient is needed to separate branches")
    g = abs(gradient)
    if n_max is None:
        n_max = int(math.ceil(2.0 * splitting / (g * wavelength))) + 2
    if tol is None:
        tol = 1e-6 * max(1.0, splitting)
    ns = np.arange(n_max + 1)
    ds = ns * wavelength / 2.0 + d0
    res = np.abs(g * ds - splitting)
    order = np.argsort(res, kind="stable")
    best = int(order[0])
    if res.size > 1 and res[order[1]] - res[best] <= tol:
        raise UnresolvedBranchError(
            f"branches n={ns[best]} and n={ns[order[1]]} both match the "
            f"splitting {splitting:.6g} within {tol:.3g}"
        )
    return BranchMatch(int(ns[best]), float(ds[best]), float(res[best]))


def extract_rates(targets: FitTargets):
    """Guided and non-guided decay rates from the superradiant peak.

    The peak reflectivity gives ``G/(G+g) = sqrt(r_max)`` and the two
    linewidths sum to ``2 (G+g)``.
    """
    if not 0 < targets.r_max <= 1:
        raise DomainError(f"r_max must lie in (0, 1], got {targets.r_max}")
    total = targets.fwhm_sum / 2.0
    root = math.sqrt(targets.r_max)
    return root * total, (1.0 - root) * total


def coupling_residual(d, targets: FitTargets, gamma_wg, gamma_free, waveguide=None):
    """Squared distance between model and measured collective coupling.

    In units of the reference rate squared.
    """
    w = collective_coupling(d, gamma_wg, gamma_free, waveguide)
    return (np.real(w) - targets.re_target) ** 2 + (np.imag(w) - targets.im_target) ** 2


def invert_separation_lossy(targets: FitTargets, gamma_wg: float, gamma_free: float, d_range=(0.001, 0.5), n_grid: int = 10_000, waveguide: WaveguideParams | None = None, rel_tol: float = 1e-10) -> InversionResult:
    """Separation minimising the coupling residual for identical emitters.

    A uniform scan of ``n_grid`` separations locates every local minimum;
    each is polished by golden-section search. Ties go to the smaller
    separation. When a second minimum comes within 10% of the best one a
    warning is issued and both are listed in ``alternatives``.
    """
    lo, hi = d_range
    if not 0 < lo < hi:
        raise DomainError(f"invalid separation range {d_range}")
    d = np.linspace(lo, hi, int(n_grid))
    s = coupling_residual(d, targets, gamma_wg, gamma_free, waveguide)

    interior = np.flatnonzero((s[1:-1] <= s[:-2]) & (s[1:-1] < s[2:])) + 1
    cand = list(interior)
    if s[0] < s[1]:
        cand.insert(0, 0)
    if s[-1] < s[-2]:
        cand.append(d.size - 1)
    if not cand:
        cand = [int(np.argmin(s))]

    f = lambda x: float(coupling_residual(x, targets, gamma_wg, gamma_free, waveguide))
    minima = []
    for i in cand:
        a = d[max(i - 1, 0)]
        b = d[min(i + 1, d.size - 1)]
        x, fx = golden_section(f, a, b, rel_tol * b)
        minima.append((float(x), float(fx)))
    minima.sort(key=lambda m: (m[1], m[0]))

    best_d, best_s = minima[0]
    alternatives = ()
    if len(minima) > 1:
        other_d, other_s = minima[1]
        if other_s - best_s < 0.1 * max(other_s, 1e-300):
            warnings.warn(
                f"coupling residual has two comparable minima: d={best_d:.6g} "
                f"(residual {best_s:.3g}) and d={other_d:.6g} (residual {other_s:.3g})",
                stacklevel=2,
            )
            alternatives = (minima[0], minima[1])
    return InversionResult(
        d=best_d,
        n=None,
        gamma_wg=float(gamma_wg),
        gamma_free=float(gamma_free),
        residual=best_s,
        method="lossy-fit",
        alternatives=alternatives,
    )


def invert_lossy(source, d_range=(0.001, 0.5), n_grid: int = 10_000, waveguide: WaveguideParams | None = None) -> InversionResult:
    """Full lossy pipeline: peaks -> targets -> rates -> separation."""
    features = find_extrema(source) if isinstance(source, Spectrum) else source
    targets = FitTargets.from_features(features)
    gamma_wg, gamma_free = extract_rates(targets)
    return invert_separation_lossy(
        targets, gamma_wg, gamma_free, d_range=d_range, n_grid=n_grid, waveguide=waveguide
    )


def invert_lossless(source, gamma_wg: float, n: int = 0, waveguide: WaveguideParams | None = None) -> InversionResult:
    """Lossless pipeline for a pair: deepest dip -> separation on branch ``n``."""
    features = find_extrema(source) if isinstance(source, Spectrum) else source
    if not features.dips:
        raise SeparabilityError("no reflection dip found in the spectrum")
    dip = min(features.dips, key=lambda d: (d.depth, d.center))
    d = invert_dip_lossless(dip.center, gamma_wg, n, waveguide)
    return InversionResult(
        d=d,
        n=n,
        gamma_wg=float(gamma_wg),
        gamma_free=0.0,
        residual=float(dip.depth),
        method="lossless-dip",
    )


def extract_per_emitter(source, gradient: float) -> InversionResult:
    """Per-emitter rates and separation for a pair split by a gradient field.

    Each of the two tallest peaks is read as an isolated emitter: with peak
    reflectivity ``h`` and linewidth ``w``, ``G_i = sqrt(h) w`` and
    ``g_i = (1 - sqrt(h)) w``. The separation is the splitting over the
    gradient. Rates are returned in emitter order along the waveguide.
    """
    if gradient == 0:
        raise DomainError("a non-zero gradient is needed")
    features = find_extrema(source) if isinstance(source, Spectrum) else source
    top = features.tallest(2)
    if len(top) < 2:
        raise SeparabilityError("only one reflection peak; increase the gradient")
    widths = [p.fwhm for p in top]
    if not all(np.isfinite(widths)):
        raise SeparabilityError("a peak linewidth could not be measured in the window")
    splitting = top[1].center - top[0].center
    if not splitting > max(widths):
        raise SeparabilityError(
            f"peak splitting {splitting:.4g} does not exceed the linewidths "
            f"{max(widths):.4g}; increase the gradient"
        )
    if gradient < 0:
        top = top[::-1]
    roots = [math.sqrt(p.height) for p in top]
    gw = tuple(r * p.fwhm for r, p in zip(roots, top))
    gf = tuple((1 - r) * p.fwhm for r, p in zip(roots, top))
    return InversionResult(
        d=splitting / abs(gradient),
        n=None,
        gamma_wg=gw,
        gamma_free=gf,
        residual=0.0,
        method="per-emitter",
    )

"""
Single-photon scattering off emitters side-coupled to a 1D waveguide.

Units
-----
Every length is measured in resonant wavelengths (lambda = 1 unless a
different ``wavelength`` is declared) and every rate, detuning and coupling in
one reference rate shared by the whole emitter array (``rate_unit``, usually
``"gamma0"`` or ``"Gamma0"``). The probe detuning is always expressed as an
angular-frequency offset ``dw = dk * v_g``; the group velocity only enters
through the wavevector correction ``dk = dw / v_g`` in the propagation phases.
With the default ``v_g = inf`` the phases use the resonant wavenumber alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import DomainError, SingularMatrixError

#: condition number above which the coupling matrix is treated as singular
COND_LIMIT = 1e12


@dataclass(frozen=True)
class WaveguideParams:
    wavelength: float = 1.0
    group_velocity: float = np.inf

    def __post_init__(self):
        if not self.wavelength > 0:
            raise DomainError(f"wavelength must be positive, got {self.wavelength}")
        if not self.group_velocity > 0:
            raise DomainError(
                f"group velocity must be positive, got {self.group_velocity}"
            )

    @property
    def k_a(self) -> float:
        """Resonant wavenumber 2*pi/lambda."""
        return 2.0 * np.pi / self.wavelength

    def wavenumber(self, detuning):
        """Full wavenumber ``k_a + dw / v_g`` for a probe detuning ``dw``."""
        return self.k_a + np.asarray(detuning, dtype=float) / self.group_velocity


@dataclass(frozen=True)
class Emitter:
    z: float
    gamma_wg: float
    gamma_free: float = 0.0
    detuning: float = 0.0

    def __post_init__(self):
        if not self.gamma_wg > 0:
            raise DomainError(f"guided decay rate must be > 0, got {self.gamma_wg}")
        if not self.gamma_free >= 0:
            raise DomainError(
                f"non-guided decay rate must be >= 0, got {self.gamma_free}"
            )
        for name in ("z", "gamma_wg", "gamma_free", "detuning"):
            if not np.isfinite(getattr(self, name)):
                raise DomainError(f"emitter field {name} must be finite")


@dataclass(frozen=True)
class EmitterArray:
    """Emitters ordered along the waveguide, rates in ``rate_unit``."""

    emitters: tuple[Emitter, ...]
    rate_unit: str = "gamma0"

    def __post_init__(self):
        object.__setattr__(self, "emitters", tuple(self.emitters))
        if len(self.emitters) == 0:
            raise DomainError("an emitter array needs at least one emitter")
        z = self.positions
        if np.any(np.diff(z) <= 0):
            raise DomainError(
                "emitter positions must be strictly ascending (coincident or "
                "unordered emitters)"
            )

    @classmethod
    def chain(cls, n, spacing, gamma_wg, gamma_free=0.0, z0=0.0, rate_unit="gamma0"):
        """``n`` identical emitters with uniform nearest-neighbour ``spacing``."""
        return cls(
            tuple(
                Emitter(z0 + j * spacing, gamma_wg, gamma_free) for j in range(n)
            ),
            rate_unit,
        )

    @classmethod
    def pair(cls, d, gamma_wg, gamma_free=0.0, z0=0.0, rate_unit="gamma0"):
        return cls.chain(2, d, gamma_wg, gamma_free, z0, rate_unit)

    def __len__(self):
        return len(self.emitters)

    def __iter__(self):
        return iter(self.emitters)

    def __getitem__(self, i):
        return self.emitters[i]

    @property
    def positions(self) -> np.ndarray:
        return np.array([e.z for e in self.emitters], dtype=float)

    @property
    def gamma_wg(self) -> np.ndarray:
        return np.array([e.gamma_wg for e in self.emitters], dtype=float)

    @property
    def gamma_free(self) -> np.ndarray:
        return np.array([e.gamma_free for e in self.emitters], dtype=float)

    @property
    def detunings(self) -> np.ndarray:
        return np.array([e.detuning for e in self.emitters], dtype=float)

    @property
    def separations(self) -> np.ndarray:
        return np.diff(self.positions)

    @property
    def lossless(self) -> bool:
        return bool(np.all(self.gamma_free == 0))


@dataclass
class Spectrum:
    """Reflection/transmission sampled on a detuning grid.

    ``emitters`` and ``waveguide`` are kept when the spectrum was produced by
    :func:`compute_spectrum`, so downstream feature refinement can evaluate
    the continuous model between grid points.
    """

    grid: np.ndarray
    r: np.ndarray
    t: np.ndarray
    emitters: EmitterArray | None = None
    waveguide: WaveguideParams | None = None
    rate_unit: str = field(default="gamma0")

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.r = np.asarray(self.r, dtype=complex)
        self.t = np.asarray(self.t, dtype=complex)
        if self.grid.ndim != 1 or self.grid.size == 0:
            raise DomainError("spectrum grid must be a non-empty 1D array")
        if np.any(np.diff(self.grid) <= 0):
            raise DomainError("spectrum grid must be strictly increasing")
        if self.r.shape != self.grid.shape or self.t.shape != self.grid.shape:
            raise DomainError("r and t must have the same shape as the grid")
        if self.emitters is not None:
            self.rate_unit = self.emitters.rate_unit

    @property
    def R(self) -> np.ndarray:
        return np.abs(self.r) ** 2

    @property
    def T(self) -> np.ndarray:
        return np.abs(self.t) ** 2

    @property
    def has_model(self) -> bool:
        return self.emitters is not None

    def reflectivity_at(self, detuning: float) -> float:
        """Continuous-model reflectivity at an arbitrary detuning."""
        if self.emitters is None:
            raise DomainError("spectrum carries no forward model")
        r, _ = scattering_amplitudes(self.emitters, detuning, self.waveguide)
        return abs(r) ** 2


def dipole_coupling(k_a_d, gamma_wg1, gamma_wg2, gamma_free1, gamma_free2):
    """Complex dipole-dipole coupling between two emitters.

    Parameters
    ----------
    k_a_d : float or ndarray
        Resonant wavenumber times the emitter separation, ``x = k_a d``.
    gamma_wg1, gamma_wg2 : float
        Decay rates into the guided mode.
    gamma_free1, gamma_free2 : float
        Decay rates into non-guided modes.

    Returns
    -------
    complex or ndarray
        ``sqrt(G1 G2)/2 + 3 sqrt(g1 g2)/4 * (-i/x + 1/x**2 + i/x**3)``. The
        propagation phase ``exp(i k d)`` is not included.
    """
    x = np.asarray(k_a_d, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("k_a*d must be strictly positive (coincident emitters)")
    guided = 0.5 * np.sqrt(gamma_wg1 * gamma_wg2)
    free = 0.75 * np.sqrt(gamma_free1 * gamma_free2)
    v = guided + free * (-1j / x + 1.0 / x**2 + 1j / x**3)
    return v[()] if v.ndim == 0 else v


def collective_coupling(d, gamma_wg, gamma_free, waveguide=None):
    """``V12 exp(i k_a d)`` for two identical emitters at separation ``d``.

    Its imaginary part is the collective frequency shift of the superradiant
    resonance and its real part the collective decay correction.
    """
    waveguide = waveguide or WaveguideParams()
    x = waveguide.k_a * np.asarray(d, dtype=float)
    return dipole_coupling(x, gamma_wg, gamma_wg, gamma_free, gamma_free) * np.exp(1j * x)


def _coupling_table(emitters: EmitterArray, waveguide: WaveguideParams):
    """Static pieces of the coupling matrix: pair distances and V_jl."""
    z = emitters.positions
    G = emitters.gamma_wg
    g = emitters.gamma_free
    n = len(z)
    dist = np.abs(z[:, None] - z[None, :])
    V = np.zeros((n, n), dtype=complex)
    off = ~np.eye(n, dtype=bool)
    if n > 1:
        jj, ll = np.nonzero(off)
        V[jj, ll] = dipole_coupling(
            waveguide.k_a * dist[jj, ll], G[jj], G[ll], g[jj], g[ll]
        )
    return dist, V, off


def _assemble(emitters, detunings, waveguide):
    """Coupling matrices for every detuning, shape (P, N, N)."""
    w = np.atleast_1d(np.asarray(detunings, dtype=float))
    G = emitters.gamma_wg
    g = emitters.gamma_free
    dw = emitters.detunings
    dist, V, off = _coupling_table(emitters, waveguide)
    k = waveguide.wavenumber(w)
    n = len(emitters)
    M = np.empty((w.size, n, n), dtype=complex)
    scale = 2.0 / np.sqrt(G[:, None] * G[None, :])
    M[:] = scale * V * np.exp(1j * k[:, None, None] * dist)
    idx = np.arange(n)
    M[:, idx, idx] = (1.0 + g / G) + 2j * (dw[None, :] - w[:, None]) / G
    return M, k


def m_matrix(emitters: EmitterArray, detuning: float, waveguide: WaveguideParams | None = None):
    """Coupling matrix ``M(dw)`` for the emitter array.

    Diagonal: ``(1 + g_j/G_j) + 2i (Dw_j - dw) / G_j``; off-diagonal:
    ``2 V_jl exp(i k |z_j - z_l|) / sqrt(G_j G_l)`` with ``k = k_a + dk``.
    Every pair couples through its own separation.
    """
    waveguide = waveguide or WaveguideParams()
    M, _ = _assemble(emitters, [detuning], waveguide)
    return M[0]


def _check_condition(M, w, offset=0):
    cond = np.linalg.cond(M)
    bad = ~(cond < COND_LIMIT)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise SingularMatrixError(float(w[i]), float(cond[i]), index=offset + i)


def _amplitudes(emitters, w, waveguide, offset=0):
    M, k = _assemble(emitters, w, waveguide)
    _check_condition(M, np.atleast_1d(w), offset)
    z = emitters.positions
    phase = np.exp(1j * k[:, None] * z[None, :])  # (P, N)
    x = np.linalg.solve(M, phase[..., None])[..., 0]  # M^-1 e^{ikz}
    r = -np.sum(phase * x, axis=1)
    t = 1.0 - np.sum(np.conj(phase) * x, axis=1)
    return r, t


def scattering_amplitudes(emitters: EmitterArray, detuning: float, waveguide: WaveguideParams | None = None):
    """Reflection and transmission amplitudes at a single detuning.

    ``r = -sum_jl exp(ik(z_j+z_l)) [M^-1]_jl`` and
    ``t = 1 - sum_jl exp(ik(z_j-z_l)) [M^-1]_jl``. ``M`` is symmetric, so the
    sums are evaluated as bilinear forms with one linear solve.
    """
    waveguide = waveguide or WaveguideParams()
    if not np.isfinite(detuning):
        raise DomainError("detuning must be finite")
    r, t = _amplitudes(emitters, np.array([float(detuning)]), waveguide)
    return complex(r[0]), complex(t[0])


def pair_amplitudes(emitters: EmitterArray, detuning, waveguide: WaveguideParams | None = None):
    """Closed-form two-emitter amplitudes written out element by element.

    Independent of the linear-solve path in :func:`scattering_amplitudes`
    and used to cross-check it. ``detuning`` may be a scalar or an array.
    """
    if len(emitters) != 2:
        raise DomainError("pair_amplitudes needs exactly two emitters")
    waveguide = waveguide or WaveguideParams()
    e1, e2 = emitters
    w = np.asarray(detuning, dtype=float)
    d = e2.z - e1.z
    k = waveguide.wavenumber(w)
    m11 = (1 + e1.gamma_free / e1.gamma_wg) + 2j * (e1.detuning - w) / e1.gamma_wg
    m22 = (1 + e2.gamma_free / e2.gamma_wg) + 2j * (e2.detuning - w) / e2.gamma_wg
    v12 = dipole_coupling(
        waveguide.k_a * d, e1.gamma_wg, e2.gamma_wg, e1.gamma_free, e2.gamma_free
    )
    m12 = 2 * v12 * np.exp(1j * k * d) / np.sqrt(e1.gamma_wg * e2.gamma_wg)
    det = m11 * m22 - m12**2
    r = np.exp(2j * k * e1.z) * (2 * m12 * np.exp(1j * k * d) - m11 * np.exp(2j * k * d) - m22) / det
    t = 1 - (m11 + m22 - 2 * m12 * np.cos(k * d)) / det
    if w.ndim == 0:
        return complex(r), complex(t)
    return r, t


def collective_decomposition(emitters: EmitterArray, detuning: float, waveguide: WaveguideParams | None = None):
    """Split the reflection of two identical emitters into collective modes.

    Returns ``(A, B, m_plus, m_minus)`` with ``r = A/m_plus + B/m_minus``,
    where ``m_plus = M11 + M12`` (superradiant) and ``m_minus = M11 - M12``
    (subradiant).
    """
    if len(emitters) != 2:
        raise DomainError("collective decomposition needs exactly two emitters")
    waveguide = waveguide or WaveguideParams()
    e1, e2 = emitters
    if (e1.gamma_wg, e1.gamma_free, e1.detuning) != (e2.gamma_wg, e2.gamma_free, e2.detuning):
        raise DomainError("collective decomposition needs identical emitters")
    M = m_matrix(emitters, detuning, waveguide)
    k = float(waveguide.wavenumber(detuning))
    z1 = emitters[0].z
    p = np.exp(1j * k * (emitters[1].z - z1))
    a = -np.exp(2j * k * z1) * (1 + p) ** 2 / 2
    b = -np.exp(2j * k * z1) * (1 - p) ** 2 / 2
    return complex(a), complex(b), complex(M[0, 0] + M[0, 1]), complex(M[0, 0] - M[0, 1])


def compute_spectrum(emitters: EmitterArray, grid: Sequence[float], waveguide: WaveguideParams | None = None, chunk: int = 65536) -> Spectrum:
    """Evaluate ``r`` and ``t`` on every grid point.

    Grid points are independent; the grid is processed in chunks purely to
    bound memory.
    """
    waveguide = waveguide or WaveguideParams()
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("grid must be a non-empty 1D sequence")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("grid must be strictly increasing")
    if not np.all(np.isfinite(grid)):
        raise DomainError("grid must be finite")
    r = np.empty(grid.size, dtype=complex)
    t = np.empty(grid.size, dtype=complex)
    for start in range(0, grid.size, chunk):
        sl = slice(start, start + chunk)
        r[sl], t[sl] = _amplitudes(emitters, grid[sl], waveguide, offset=start)
    return Spectrum(grid, r, t, emitters=emitters, waveguide=waveguide)


def apply_gradient_field(emitters: EmitterArray, gradient: float) -> EmitterArray:
    """Shift each transition frequency by ``gradient * z_j``.

    ``gradient`` is in rate units per wavelength; positions and decay rates
    are untouched.
    """
    shifted = tuple(
        replace(e, detuning=e.detuning + gradient * e.z) for e in emitters
    )
    return EmitterArray(shifted, emitters.rate_unit)


def collective_resonances(emitters: EmitterArray, waveguide: WaveguideParams | None = None):
    """Approximate centres and half widths of the collective resonances.

    The coupling matrix becomes near-singular where ``i dw`` is an eigenvalue
    of ``K_jl = (Gj+gj)/2 delta_jl + i Dw_j delta_jl + V_jl exp(i k_a d_jl)``.
    The wavevector correction is ignored. Returns ``(centers, half_widths)``
    sorted by centre.
    """
    waveguide = waveguide or WaveguideParams()
    G = emitters.gamma_wg
    g = emitters.gamma_free
    dist, V, _ = _coupling_table(emitters, waveguide)
    K = V * np.exp(1j * waveguide.k_a * dist)
    K[np.diag_indices_from(K)] = (G + g) / 2 + 1j * emitters.detunings
    lam = np.linalg.eigvals(K)
    centers = lam.imag
    widths = np.abs(lam.real)
    order = np.argsort(centers)
    return centers[order], widths[order]

import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wgqed import (
    DomainError,
    Emitter,
    EmitterArray,
    FitTargets,
    InversionResult,
    PeakDescriptor,
    SeparabilityError,
    UnresolvedBranchError,
    WaveguideParams,
    analyze,
    apply_gradient_field,
    collective_coupling,
    coupling_residual,
    disambiguate_branch,
    extract_per_emitter,
    extract_rates,
    invert_dip_lossless,
    invert_lossless,
    invert_lossy,
    invert_separation_lossy,
    measured_splitting,
    scattering_amplitudes,
)

TWO_PI = 2 * np.pi


def exact_targets(d, G, g):
    """Targets built from the model coupling itself (no measurement error)."""
    w = collective_coupling(d, G, g)
    R = G**2 / (G + g) ** 2
    return FitTargets(w.real, w.imag, R, 2 * (G + g))


# ---------------------------------------------------------------- lossless dip

@pytest.mark.parametrize("dip, d", [(-0.162, 0.05), (-0.688, 0.15)])
def test_invert_dip_worked_values(dip, d):
    assert invert_dip_lossless(dip, 1.0) == pytest.approx(d, abs=2e-4)


def test_invert_dip_zero_on_first_branch():
    assert invert_dip_lossless(0.0, 1.0, n=1) == pytest.approx(0.5, rel=1e-15)


def test_invert_dip_nonpositive_separation():
    with pytest.raises(DomainError):
        invert_dip_lossless(0.0, 1.0, n=0)
    with pytest.raises(DomainError):
        invert_dip_lossless(0.3, 1.0, n=0)


def test_invert_dip_reproduces_dip():
    for d in (0.02, 0.09, 0.21):
        dip = -0.5 * 1.3 * np.tan(TWO_PI * d)
        rec = invert_dip_lossless(dip, 1.3)
        r, _ = scattering_amplitudes(EmitterArray.pair(rec, 1.3), dip)
        assert abs(r) < 1e-12
        assert rec == pytest.approx(d, rel=1e-12)


def test_invert_dip_finite_group_velocity():
    wg = WaveguideParams(group_velocity=40.0)
    d = 0.07
    # the dip condition with k = k_a + dw/v_g, solved by scanning
    grid = np.linspace(-1, 0, 200001)
    r = [scattering_amplitudes(EmitterArray.pair(d, 1.0), w, wg)[0] for w in grid[::1000]]
    i = int(np.argmin(np.abs(r)))
    dip = grid[::1000][i]
    rec = invert_dip_lossless(dip, 1.0, waveguide=wg)
    assert rec == pytest.approx(d, abs=2e-3)


@settings(max_examples=50, deadline=None, derandomize=True)
@given(st.floats(-20, 20), st.floats(0.1, 5), st.integers(1, 6))
def test_branch_spacing_is_half_wavelength(dip, G, n):
    a = invert_dip_lossless(dip, G, n)
    b = invert_dip_lossless(dip, G, n + 1)
    assert b - a == pytest.approx(0.5, rel=1e-12)


def test_invert_lossless_pipeline():
    _, f = analyze(EmitterArray.pair(0.05, 1.0))
    res = invert_lossless(f, 1.0)
    assert res.method == "lossless-dip" and res.n == 0
    assert res.d == pytest.approx(0.05, rel=1e-6)


def test_invert_lossless_needs_dip():
    _, f = analyze(EmitterArray((Emitter(0.0, 1.0),)))
    with pytest.raises(SeparabilityError):
        invert_lossless(f, 1.0)


# ---------------------------------------------------------------- branch

@pytest.mark.parametrize("split, n, d", [(1.1, 1, 0.55), (2.1, 2, 1.05), (0.1, 0, 0.05)])
def test_disambiguate_branch_examples(split, n, d):
    m = disambiguate_branch(split, 2.0, 0.05)
    assert m.n == n
    assert m.d == pytest.approx(d)
    assert m.residual < 1e-9


@pytest.mark.parametrize("d, n", [(0.55, 1), (1.05, 2)])
def test_disambiguate_branch_from_spectrum(d, n):
    _, f = analyze(apply_gradient_field(EmitterArray.pair(d, 1.0), 2.0))
    assert measured_splitting(f) == pytest.approx(2.0 * d, abs=1e-6)
    assert disambiguate_branch(f, 2.0, 0.05).n == n


def test_disambiguate_branch_unresolved():
    # halfway between two branch predictions
    with pytest.raises(UnresolvedBranchError):
        disambiguate_branch(1.6, 2.0, 0.05)


def test_disambiguate_branch_needs_gradient():
    with pytest.raises(DomainError):
        disambiguate_branch(1.1, 0.0, 0.05)


# ---------------------------------------------------------------- rates

@pytest.mark.parametrize("fsum, G, g", [(6.0, 1.99, 1.01), (6.08, 2.02, 1.02)])
def test_extract_rates_examples(fsum, G, g):
    rG, rg = extract_rates(FitTargets(1.44, 23.388, 0.44, fsum))
    assert rG == pytest.approx(G, abs=0.005)
    assert rg == pytest.approx(g, abs=0.005)


def test_extract_rates_perfect_reflection():
    assert extract_rates(FitTargets(0.0, 1.0, 1.0, 5.0)) == (2.5, 0.0)


@pytest.mark.parametrize("r_max", [0.0, 1.2])
def test_fit_targets_validation(r_max):
    with pytest.raises(DomainError):
        FitTargets(1.0, 1.0, r_max, 1.0)
    with pytest.raises(DomainError):
        FitTargets(1.0, 1.0, 0.5, 0.0)


def test_fit_targets_from_peaks_average_center():
    sup = PeakDescriptor(5.732, 0.433, 5.76)
    sub = PeakDescriptor(-5.752, 0.2, 0.32)
    t = FitTargets.from_peaks(sup, sub)
    assert t.im_target == pytest.approx(5.742)
    assert t.re_target == pytest.approx(1.36)
    assert t.fwhm_sum == pytest.approx(6.08)


def test_inversion_result_invariants():
    with pytest.raises(DomainError):
        InversionResult(0.0, None, 1.0, 0.0, 0.0, "lossy-fit")
    with pytest.raises(DomainError):
        InversionResult(0.1, None, 1.0, 0.0, -1.0, "lossy-fit")


# ---------------------------------------------------------------- lossy fit

@pytest.mark.parametrize("d", [0.02, 0.05, 0.08, 0.13, 0.2])
def test_lossy_self_consistency(d):
    res = invert_separation_lossy(exact_targets(d, 2.0, 1.0), 2.0, 1.0)
    assert res.d == pytest.approx(d, rel=1e-6)
    assert res.residual < 1e-10


def test_lossy_worked_targets():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        res = invert_separation_lossy(FitTargets(1.44, 23.388, 0.44, 6.0), 1.99, 1.01)
    assert res.d == pytest.approx(0.0502, abs=5e-4)
    assert res.residual < 0.01
    res = invert_separation_lossy(FitTargets(1.36, 5.742, 0.44, 6.08), 2.02, 1.02)
    assert res.d == pytest.approx(0.0808, abs=1e-3)


@pytest.mark.parametrize("targets, G, g", [
    (FitTargets(1.44, 23.388, 0.44, 6.0), 1.99, 1.01),
    (FitTargets(1.36, 5.742, 0.44, 6.08), 2.02, 1.02),
])
def test_residual_unique_minimum(targets, G, g):
    d = np.linspace(0.001, 0.25, 20001)
    s = coupling_residual(d, targets, G, g)
    interior = np.flatnonzero((s[1:-1] < s[:-2]) & (s[1:-1] < s[2:]))
    assert interior.size == 1


def test_lossy_warns_on_comparable_minima():
    # without loss the coupling is periodic in d, so a target just off the
    # circle it traces is matched equally well one wavelength later
    w = 0.9 * collective_coupling(0.3, 1.0, 0.0)
    t = FitTargets(w.real, w.imag, 1.0, 4.0)
    with pytest.warns(UserWarning, match="comparable minima"):
        res = invert_separation_lossy(t, 1.0, 0.0, d_range=(0.1, 1.45))
    assert len(res.alternatives) == 2
    assert sorted(a[0] for a in res.alternatives) == pytest.approx([0.3, 1.3], abs=1e-6)


def test_lossy_pipeline_case_one():
    _, f = analyze(EmitterArray.pair(0.05, 2.0, 1.0))
    res = invert_lossy(f.significant())
    assert res.method == "lossy-fit"
    assert res.gamma_wg == pytest.approx(1.99, abs=0.03)
    assert res.gamma_free == pytest.approx(1.01, abs=0.03)
    assert res.d == pytest.approx(0.0502, abs=5e-4)


def test_lossy_range_validation():
    with pytest.raises(DomainError):
        invert_separation_lossy(exact_targets(0.05, 2, 1), 2, 1, d_range=(0.3, 0.1))


# ---------------------------------------------------------------- per emitter

def fig5_pair(gradient=6.0, d=2.1):
    arr = EmitterArray((Emitter(0.0, 1.0, 0.5), Emitter(d, 1.5, 0.9)), "Gamma0")
    return apply_gradient_field(arr, gradient)


def test_per_emitter_worked_values():
    _, f = analyze(fig5_pair())
    res = extract_per_emitter(f, 6.0)
    assert res.d == pytest.approx(2.1, abs=0.02)
    assert res.gamma_wg[0] == pytest.approx(0.97, abs=0.05)
    assert res.gamma_free[0] == pytest.approx(0.48, abs=0.05)
    assert res.gamma_wg[1] == pytest.approx(1.58, abs=0.08)
    assert res.gamma_free[1] == pytest.approx(0.88, abs=0.08)


def test_per_emitter_from_quoted_peaks():
    G, g = 0.45**0.5 * 1.45, (1 - 0.45**0.5) * 1.45
    assert G == pytest.approx(0.97, abs=0.005) and g == pytest.approx(0.48, abs=0.005)
    G, g = 0.41**0.5 * 2.46, (1 - 0.41**0.5) * 2.46
    assert G == pytest.approx(1.58, abs=0.005) and g == pytest.approx(0.88, abs=0.005)


def test_per_emitter_negative_gradient_keeps_order():
    _, f = analyze(fig5_pair(-6.0))
    res = extract_per_emitter(f, -6.0)
    assert res.gamma_wg[0] < res.gamma_wg[1]
    assert res.d == pytest.approx(2.1, abs=0.02)


def test_per_emitter_not_separable():
    _, f = analyze(fig5_pair(0.5))
    with pytest.raises(SeparabilityError):
        extract_per_emitter(f, 0.5)


def test_per_emitter_error_decreases_with_splitting():
    truth = np.array([1.0, 0.5, 1.5, 0.9])
    errors = []
    for m in (5, 10, 20, 40):
        gradient = m * 2.4 / 2.1
        _, f = analyze(fig5_pair(gradient))
        res = extract_per_emitter(f, gradient)
        got = np.array([res.gamma_wg[0], res.gamma_free[0], res.gamma_wg[1], res.gamma_free[1]])
        errors.append(np.max(np.abs(got - truth)))
    assert all(b < a for a, b in zip(errors, errors[1:]))

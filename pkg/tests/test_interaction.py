import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.optimize import brentq

from conftest import X1, X2
from driven_tls.errors import (
    InternalConsistencyError,
    InvalidInteractionError,
    ResonantFieldError,
    SpuriousCaseError,
    TruncationError,
    UnclassifiableError,
)
from driven_tls.fourier import HarmonicSeries, convolve, evaluate, mean
from driven_tls.interaction import (
    InteractionSpec,
    classify,
    derived_function,
    mean_Q0,
    mean_Q1,
    mean_Q1_closed_form,
    mean_Q2,
    mean_Q3,
    mean_Q3_closed_form,
    q2_coefficients,
    q_coefficients,
)

TWO_HARMONIC = InteractionSpec.from_real_harmonics(1.0, 0.0, cos={1: 0.5, 2: 0.3})


def spurious_chi2(chi1=1.0):
    return brentq(
        lambda c2: mean_Q1(InteractionSpec.monochromatic(1.0, chi1, c2)).imag, 0.7, 0.85, xtol=1e-15
    )


def test_empty_field_gives_unit_q():
    spec = InteractionSpec(1.0)
    for s in (q_coefficients(spec), q2_coefficients(spec)):
        assert s[0] == 1
        assert np.count_nonzero(s.coeffs) == 1


@pytest.mark.parametrize("chi1", [1.0, 2.0, X1])
def test_jacobi_anger_coefficients(chi1):
    spec = InteractionSpec.monochromatic(1.0, chi1)
    q = q_coefficients(spec)
    q2 = q2_coefficients(spec)
    for m in range(-20, 21):
        assert abs(q[m] - float(mpmath.besselj(m, chi1 / 2))) <= 1e-10
        assert abs(q2[m] - float(mpmath.besselj(m, chi1))) <= 1e-10


@pytest.mark.parametrize("chi1", [0.7, 2.0, X1, 6.5])
def test_multinomial_agrees_with_bessel(chi1):
    spec = InteractionSpec.monochromatic(1.0, chi1, 0.3)
    a = q_coefficients(spec, method="bessel")
    b = q_coefficients(spec, method="multinomial")
    assert a.nu == b.nu
    assert np.max(np.abs(a.coeffs - b.coeffs)) <= 1e-12


@pytest.mark.parametrize(
    "spec", [TWO_HARMONIC, InteractionSpec.monochromatic(1.0, 1.0, 0.3)], ids=["two-harmonic", "case-C"]
)
def test_q2_is_q_squared(spec):
    q = q_coefficients(spec)
    q2 = q2_coefficients(spec)
    qq = convolve(q, q)
    assert qq.nu == pytest.approx(q2.nu)
    assert np.max(np.abs(qq.coeffs - q2.coeffs)) <= 1e-10


def test_two_harmonic_q_matches_quadrature(rng):
    q = q_coefficients(TWO_HARMONIC)
    for t in rng.uniform(0, 20, 20):
        phase = quad(TWO_HARMONIC.field, 0, t, limit=200, epsabs=1e-13)[0]
        assert abs(evaluate(q, t) - np.exp(1j * phase)) <= 1e-9


@given(
    st.floats(-1.5, 1.5),
    st.floats(-1.0, 1.0),
    st.floats(-1.0, 1.0),
    st.floats(0.3, 3.0),
)
@settings(max_examples=30, deadline=None)
def test_q_is_a_pure_phase(c1, s2, F0, omega):
    if abs(2 * F0 / omega - round(2 * F0 / omega)) < 1e-6:
        F0 += 0.01 * omega
    spec = InteractionSpec.from_real_harmonics(omega, F0, cos={1: c1 * omega}, sin={2: s2 * omega})
    q = q_coefficients(spec)
    t = np.linspace(0, 50, 50)
    assert np.max(np.abs(np.abs(evaluate(q, t)) - 1.0)) <= 1e-9


def test_field_helpers_consistent(rng):
    spec = InteractionSpec.from_real_harmonics(2.0, 0.3, cos={1: 0.4}, sin={3: 0.2})
    for t in rng.uniform(0, 10, 5):
        assert spec.field_integral(t) == pytest.approx(quad(spec.field, 0, t, epsabs=1e-13)[0], abs=1e-11)


def test_mean_q0_is_zero_mode_of_q2():
    for spec in (TWO_HARMONIC, InteractionSpec.monochromatic(1.0, 2.0), InteractionSpec.monochromatic(1.0, 1.0, 0.3)):
        q2 = q2_coefficients(spec)
        assert mean(q2) == mean_Q0(spec, q2)


def test_case_a_mean():
    assert mean_Q0(InteractionSpec.monochromatic(1.0, 2.0)) == pytest.approx(0.2238907791, abs=1e-10)


def test_first_zero_means():
    spec = InteractionSpec.monochromatic(1.0, X1)
    assert abs(mean_Q0(spec)) <= 1e-10
    assert abs(mean_Q1(spec)) <= 1e-10
    assert abs(mean_Q2(spec)) <= 1e-10
    assert abs(mean_Q3(spec)) > 1e-4


def test_nonzero_f0_mean_vanishes():
    assert mean_Q0(InteractionSpec.monochromatic(1.0, 1.0, 0.3)) == 0


def primitive_mean(q2, which):
    return sum(mean(s) for s in derived_function(q2, which))


def test_closed_form_means_match_primitives():
    q2 = q2_coefficients(TWO_HARMONIC)
    assert mean_Q1_closed_form(q2) == pytest.approx(primitive_mean(q2, 1), abs=1e-14)
    assert mean_Q3_closed_form(q2) == pytest.approx(primitive_mean(q2, 3), abs=1e-14)


def grid_primitive(y):
    """int_0^t of a zero-mean periodic sample, spectrally."""
    n = y.size
    k = np.fft.fftfreq(n, d=1.0 / n)
    Y = np.fft.fft(y - y.mean())
    Yi = np.zeros_like(Y)
    Yi[k != 0] = Y[k != 0] / (1j * k[k != 0])
    out = np.fft.ifft(Yi)
    return out - out[0]


@pytest.mark.parametrize("spec", [InteractionSpec.monochromatic(1.0, 2.0), TWO_HARMONIC], ids=["A", "two"])
def test_means_match_grid_oracle(spec):
    """Time averages of Q1 = Q0 int(1/Q0 - M), Q2 = Q0 int(Q0 - M), Q3 = Q0 int(Q1 - M) on a grid."""
    n = 4096
    t = np.linspace(0, 2 * np.pi, n, endpoint=False)
    Q0 = np.exp(2j * np.array([spec.field_integral(x) for x in t]))
    Q1 = Q0 * grid_primitive(np.conj(Q0))
    Q2 = Q0 * grid_primitive(Q0)
    Q3 = Q0 * grid_primitive(Q1)
    assert mean_Q0(spec) == pytest.approx(Q0.mean(), abs=1e-12)
    assert mean_Q1(spec) == pytest.approx(Q1.mean(), abs=1e-12)
    assert mean_Q2(spec) == pytest.approx(Q2.mean(), abs=1e-12)
    assert mean_Q3(spec) == pytest.approx(Q3.mean(), abs=1e-12)


def test_primitive_route_for_nonzero_dc():
    spec = InteractionSpec.monochromatic(1.0, 1.0, 0.3)
    # the dc part only shifts the lattice of q^2; one full quasi-period is not
    # available on a grid, so compare with a long-time average instead
    T = 2 * np.pi * 200
    t = np.linspace(0, T, 400001)
    q2 = q2_coefficients(spec)
    Q0 = evaluate(q2, t)
    # int_0^t conj(Q0) by the cumulative trapezoid rule
    dt = t[1] - t[0]
    cum = np.concatenate([[0], np.cumsum(0.5 * (np.conj(Q0[1:]) + np.conj(Q0[:-1])) * dt)])
    assert mean_Q1(spec) == pytest.approx(np.mean(Q0 * cum), abs=2e-3)


@pytest.mark.parametrize(
    "omega,chi1,chi2,tag",
    [(1.0, 2.0, 0.0, "I"), (10.0, X1, 0.0, "III"), (1.0, 1.0, 0.3, "II"), (10.0, X2, 0.0, "III")],
)
def test_classification_examples(omega, chi1, chi2, tag):
    c = classify(InteractionSpec.monochromatic(omega, chi1, chi2))
    assert c.tag == tag
    assert c.f0_is_zero == (chi2 == 0.0)
    assert set(c.diagnostics()) == {"M(Q0)", "M(Q1)", "M(Q3)"}


@pytest.mark.parametrize("chi1,chi2", [(2.0, 0.0), (X1, 0.0), (1.0, 0.3), (3.3, 0.45)])
def test_classification_is_scale_free(chi1, chi2):
    tags = {classify(InteractionSpec.monochromatic(w, chi1, chi2)).tag for w in (0.5, 1.0, 10.0)}
    assert len(tags) == 1


def test_condition_class_invariants():
    for spec in (InteractionSpec.monochromatic(1.0, 2.0), InteractionSpec.monochromatic(10.0, X1)):
        c = classify(spec)
        if c.tag == "I":
            assert abs(c.mean_q0) > 1e-10
        else:
            assert abs(c.mean_q0) <= 1e-10 and abs(c.mean_q1) <= 1e-10 and abs(c.mean_q3) > 1e-10


def test_condition_two_with_zero_dc():
    a = brentq(
        lambda a: q2_coefficients(InteractionSpec.from_real_harmonics(1.0, 0.0, cos={1: a, 2: 0.5}))[0].real,
        1.0,
        1.5,
        xtol=1e-15,
    )
    spec = InteractionSpec.from_real_harmonics(1.0, 0.0, cos={1: a, 2: 0.5})
    c = classify(spec)
    assert c.tag == "II" and c.f0_is_zero


def test_spurious_special_chi2():
    with pytest.raises(SpuriousCaseError) as info:
        classify(InteractionSpec.monochromatic(1.0, 1.0, spurious_chi2()))
    assert info.value.exit_code == 3


def test_unclassifiable_when_everything_vanishes():
    with pytest.raises(UnclassifiableError):
        classify(InteractionSpec.monochromatic(1.0, X1), class_tol=1e3)


def test_table_cross_check_is_enforced():
    # just off the zero, a strict cascade tolerance sees M(Q0) != 0 while the table says "zero of J_0"
    with pytest.raises(InternalConsistencyError):
        classify(InteractionSpec.monochromatic(1.0, X1 + 1e-12), class_tol=1e-15)


def test_invalid_fields():
    with pytest.raises(InvalidInteractionError):
        InteractionSpec(1.0, harmonics={1: 1.0, -1: 2.0})
    with pytest.raises(InvalidInteractionError):
        InteractionSpec(1.0, harmonics={0: 1.0})
    with pytest.raises(InvalidInteractionError):
        InteractionSpec(-1.0)
    with pytest.raises(ResonantFieldError):
        InteractionSpec.monochromatic(1.0, 1.0, 1.0)
    with pytest.raises(ResonantFieldError):
        InteractionSpec(2.0, F0=3.0)


def test_doubled_field_may_sit_on_resonance():
    # 2F0/omega = 0.5 is allowed; the doubled field has 2*(2F0)/omega = 1, which must not be rejected
    spec = InteractionSpec.monochromatic(1.0, 1.0, 0.5)
    assert q2_coefficients(spec).nu == pytest.approx(0.5)


def test_multinomial_truncation_failure():
    spec = InteractionSpec.monochromatic(1.0, 400.0)
    with pytest.raises(TruncationError):
        q_coefficients(spec, method="multinomial")


def test_monochromatic_parameters_round_trip():
    spec = InteractionSpec.monochromatic(3.0, 1.5, 0.4)
    assert spec.chi1 == pytest.approx(1.5)
    assert spec.chi2 == pytest.approx(0.4)
    assert spec.phi == pytest.approx(2.25)
    assert spec.is_monochromatic
    assert not TWO_HARMONIC.is_monochromatic

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from conftest import solved
from driven_tls.errors import CrossingError, NormalizationError
from driven_tls.fourier import evaluate
from driven_tls.interaction import InteractionSpec
from driven_tls.oracle import constant_field_propagator
from driven_tls.pipeline import solve
from driven_tls.propagator import (
    SIGMA,
    bloch_vector,
    evaluate_U,
    to_h1_frame,
    transition_probability,
    unitarity_deviation,
)

DC = InteractionSpec(1.0, F0=0.4)
DRIVEN_DC = InteractionSpec.monochromatic(1.0, 1.0, 0.3)


def test_identity_at_zero():
    for name, eps in (("A", 0.1), ("C", 0.05), ("B", 0.2)):
        U = evaluate_U(solved(name, eps).model, 0.0)
        assert np.max(np.abs(U - np.eye(2))) <= 1e-8


def test_zero_coupling_is_diagonal():
    model = solve(DRIVEN_DC, 0.0).model
    t = np.linspace(0, 30, 200)
    U = evaluate_U(model, t)
    assert not np.any(U[:, 0, 1]) and not np.any(U[:, 1, 0])
    assert np.allclose(U[:, 1, 1], np.conj(U[:, 0, 0]), atol=0)
    assert not np.any(transition_probability(model, t))
    assert np.max(np.abs(unitarity_deviation(model, t))) <= 1e-14


def test_free_field_at_zero_coupling_crosses():
    with pytest.raises(CrossingError) as info:
        solve(InteractionSpec(1.0), 0.0)
    assert info.value.exit_code == 5
    assert info.value.diagnostics["mode"] == 0


def test_free_field_rotation():
    model = solve(InteractionSpec(1.0), 0.3).model
    t = np.linspace(0, 40, 97)
    U = evaluate_U(model, t)
    exact = np.cos(0.3 * t)[:, None, None] * np.eye(2) - 1j * np.sin(0.3 * t)[:, None, None] * SIGMA[0]
    assert np.max(np.abs(U - exact)) <= 1e-12
    assert np.max(np.abs(model.R_at(t) - np.exp(-0.3j * t))) <= 1e-12
    assert np.max(np.abs(transition_probability(model, t) - np.sin(0.3 * t) ** 2)) <= 1e-12


def test_constant_field_matrix():
    model = solve(DC, 0.3).model
    assert np.max(np.abs(evaluate_U(model, 3.0) - constant_field_propagator(0.4, 0.3, 3.0))) <= 1e-6
    t = np.linspace(0, 50, 501)
    P = transition_probability(model, t)
    assert np.max(np.abs(P - 0.36 * np.sin(0.5 * t) ** 2)) <= 1e-6
    assert transition_probability(model, np.pi) == pytest.approx(0.36, abs=1e-6)


def test_case_a_full_transition_at_quarter_period():
    model = solved("A", 0.1).model
    T = model.secular_period
    t = np.linspace(0, T / 2, 20001)
    P = transition_probability(model, t)
    assert P.max() >= 0.99
    assert t[np.argmax(P)] == pytest.approx(T / 4, rel=0.02)
    assert transition_probability(model, T / 2) <= 2 * 0.1


@pytest.mark.parametrize("eps,bound", [(0.01, 4e-6), (0.40, 6e-3)])
def test_case_a_unitarity(eps, bound):
    model = solved("A", eps).model
    t = np.linspace(0, model.secular_period, 20001)
    assert np.max(np.abs(unitarity_deviation(model, t))) <= bound


def test_w_series_matches_quadrature(rng):
    sol = solved("A", 0.1)
    W = sol.model.W
    for t in rng.uniform(0, 20, 20):
        re = quad(lambda s: evaluate(sol.g.g, s).real, 0, t, limit=400, epsabs=1e-13)[0]
        im = quad(lambda s: evaluate(sol.g.g, s).imag, 0, t, limit=400, epsabs=1e-13)[0]
        assert abs(evaluate(W, t) - np.exp(-1j * (re + 1j * im))) <= 1e-8


def test_assembly_checks_hold():
    for name, eps in (("A", 0.01), ("B", 0.1), ("C", 0.05)):
        dev = solved(name, eps).model.check(np.linspace(0, 50, 101))
        assert dev["S_at_zero"] <= 1e-8 and dev["R_at_zero"] <= 1e-8


@pytest.mark.parametrize("name,eps", [("A", 0.1), ("C", 0.05)])
def test_determinant_has_unit_modulus(rng, name, eps):
    model = solved(name, eps).model
    t = rng.uniform(0, model.secular_period, 100)
    assert np.max(np.abs(np.abs(np.linalg.det(evaluate_U(model, t))) - 1)) <= 1e-7


def test_bloch_examples():
    s = 1 / np.sqrt(2)
    assert np.allclose(bloch_vector([1, 0]), [0, 0, 1])
    assert np.allclose(bloch_vector([s, s]), [1, 0, 0])
    assert np.allclose(bloch_vector([s, 1j * s]), [0, 1, 0])
    with pytest.raises(NormalizationError):
        bloch_vector([1, 1])


@given(st.floats(0, 300))
@settings(max_examples=40, deadline=None)
def test_bloch_norm_preserved(t):
    U = evaluate_U(solved("A", 0.1).model, t)
    psi = U @ np.array([1, 0], dtype=complex)
    psi /= np.linalg.norm(psi)
    assert np.linalg.norm(bloch_vector(psi)) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("eps", [0.01, 0.05, 0.1])
def test_stroboscopic_probability(eps):
    model = solved("A", eps).model
    k = np.arange(0, int(model.secular_period / model.period) + 1)
    tk = k * model.period
    P = transition_probability(model, tk)
    assert np.max(np.abs(P - np.sin(model.Omega * tk) ** 2)) <= 2 * eps


def test_h1_frame_rotation():
    U = evaluate_U(solved("A", 0.1).model, np.linspace(0, 10, 5))
    V = to_h1_frame(U)
    assert np.allclose(np.linalg.det(V), np.linalg.det(U), atol=1e-14)
    assert np.allclose(to_h1_frame(np.eye(2)), np.eye(2))
    # eps*s1 + f*s3 -> eps*s3 - f*s1
    assert np.allclose(to_h1_frame(SIGMA[0]), SIGMA[2])
    assert np.allclose(to_h1_frame(SIGMA[2]), -SIGMA[0])


def test_probability_within_unit_interval():
    for name, eps in (("A", 0.4), ("C", 0.2)):
        model = solved(name, eps).model
        t = np.linspace(0, model.secular_period, 5001)
        P = transition_probability(model, t)
        N = unitarity_deviation(model, t)
        assert P.min() >= 0 and P.max() <= 1 + 10 * np.max(np.abs(N))

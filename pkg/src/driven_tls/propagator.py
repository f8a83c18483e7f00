"""Floquet-form Fourier data of R, R^{-2}, S and the 2x2 propagator built from them.

For H2 = eps*sigma_1 + f*sigma_3,

    U = [[ R (1 + i g0 S),      -i eps R S              ],
         [ -i eps R* S*,         R* (1 - i g0* S*)      ]]

with R = exp(-i int_0^t (f + g)) and S = int_0^t R^{-2}.
"""

from dataclasses import dataclass

import numpy as np

from .errors import AssemblyError, CrossingError, NormalizationError
from .fourier import (
    MEAN_TOL,
    RESONANCE_TOL,
    HarmonicSeries,
    convolve,
    evaluate,
    exp_series,
)

ASSEMBLY_TOL = 1e-8
# R^-2 * R^2 = 1 also absorbs mode-cutoff error (~1e-6 at M=40 near the edge of convergence)
PRODUCT_TOL = 1e-5
EXP_TERM_TOL = 1e-16
EXP_MAX_TERMS = 60

SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True, eq=False)
class PropagatorModel:
    Omega: float
    epsilon: float
    g0: complex
    R: HarmonicSeries  # offset -Omega
    Rinv2: HarmonicSeries  # offset +2 Omega
    S: HarmonicSeries  # offset +2 Omega; S(t) = sigma0 + S(t-series)
    sigma0: complex
    gamma_f_eps: complex
    H: HarmonicSeries  # H_m = G_m / (m omega), H_0 = 0
    omega: float
    W: HarmonicSeries = None

    @property
    def S_m(self):
        return self.S.coeffs

    @property
    def period(self):
        return 2.0 * np.pi / self.omega

    @property
    def secular_period(self):
        return 2.0 * np.pi / abs(self.Omega) if self.Omega else np.inf

    def R_at(self, t):
        return evaluate(self.R, t)

    def S_at(self, t):
        return self.sigma0 + evaluate(self.S, t)

    def check(self, t_samples, tol=ASSEMBLY_TOL, product_tol=PRODUCT_TOL):
        """Self-consistency of the assembled data; returns the worst deviations."""
        t = np.asarray(t_samples, dtype=float)
        r = self.R_at(t)
        dev = {
            "R_at_zero": float(abs(self.R_at(0.0) - 1.0)),
            "S_at_zero": float(abs(self.S_at(0.0))),
            "Rinv2_R2": float(np.max(np.abs(evaluate(self.Rinv2, t) * r * r - 1.0))),
        }
        limits = {"R_at_zero": tol, "S_at_zero": tol, "Rinv2_R2": product_tol}
        bad = {k: v for k, v in dev.items() if v > limits[k]}
        if bad:
            raise AssemblyError("assembled propagator data fails its invariants", **bad)
        return dev


def _exp_of(H, factor):
    return exp_series(H * factor, term_tol=EXP_TERM_TOL, max_terms=EXP_MAX_TERMS)


def assemble(g, q, q2, spec=None, check=True):
    """Fourier data of U(t) from a summed g (a GSeries) and the q, q^2 coefficients."""
    w = q.omega
    Omega = g.Omega
    eps = g.epsilon
    F0 = g.F0
    G = g.g
    M = G.modes
    m = G.mode_indices
    h = np.zeros(2 * M + 1, dtype=complex)
    nz = m != 0
    h[nz] = G.coeffs[nz] / (m[nz] * w)
    H = HarmonicSeries(w, 0.0, h)
    gamma = 1j * np.sum(h)
    # int_0^t g = (Omega - F0) t - i sum_m H_m (e^{i m w t} - 1)
    #   => W = exp(-i int g) = e^{-i gamma} e^{-i (Omega - F0) t} exp(-sum_m H_m e^{i m w t})
    W = _exp_of(H, -1.0) * np.exp(-1j * gamma)
    W = W.with_coeffs(W.coeffs, nu=-(Omega - F0))
    W2 = _exp_of(H, 2.0) * np.exp(2j * gamma)
    W2 = W2.with_coeffs(W2.coeffs, nu=2.0 * (Omega - F0))
    R = convolve(q.conj(), W)
    Rinv2 = convolve(q2, W2)
    S, sigma0 = _integrate_S(Rinv2)
    model = PropagatorModel(Omega, eps, g.g0, R, Rinv2, S, sigma0, gamma, H, w, W)
    if check:
        model.check(np.linspace(0.0, 2.0 * np.pi / w, 33))
    return model


def _integrate_S(Rinv2):
    w = Rinv2.omega
    freqs = Rinv2.frequencies()
    scale = np.max(np.abs(Rinv2.coeffs))
    crossing = (np.abs(freqs) < RESONANCE_TOL * w) & (np.abs(Rinv2.coeffs) > MEAN_TOL * scale)
    if np.any(crossing):
        k = int(Rinv2.mode_indices[np.argmax(crossing)])
        raise CrossingError(
            "crossing: m*omega + 2*Omega vanishes", mode=k, two_Omega=Rinv2.nu
        )
    out = np.zeros_like(Rinv2.coeffs)
    ok = np.abs(freqs) >= RESONANCE_TOL * w
    out[ok] = -1j * Rinv2.coeffs[ok] / freqs[ok]
    return Rinv2.with_coeffs(out), complex(-np.sum(out))


def evaluate_U(model, t):
    """U(t) in the H2 frame; shape (2, 2) for scalar t, (n, 2, 2) for arrays."""
    t_arr = np.asarray(t, dtype=float)
    R = model.R_at(t_arr)
    S = model.S_at(t_arr)
    eps, g0 = model.epsilon, model.g0
    U = np.empty(t_arr.shape + (2, 2), dtype=complex)
    U[..., 0, 0] = R * (1 + 1j * g0 * S)
    U[..., 0, 1] = -1j * eps * R * S
    U[..., 1, 0] = -1j * eps * np.conj(R) * np.conj(S)
    U[..., 1, 1] = np.conj(R) * (1 - 1j * np.conj(g0) * np.conj(S))
    return U


def transition_probability(model, t):
    """P(t) = |U_12(t)|^2."""
    return np.abs(evaluate_U(model, t)[..., 0, 1]) ** 2


def unitarity_deviation(model, t):
    """N(t) = |U_11|^2 + |U_12|^2 - 1 (signed)."""
    U = evaluate_U(model, t)
    return np.abs(U[..., 0, 0]) ** 2 + np.abs(U[..., 0, 1]) ** 2 - 1.0


_ROT = np.cos(np.pi / 4) * np.eye(2) - 1j * np.sin(np.pi / 4) * SIGMA[1]


def to_h1_frame(U):
    """Conjugate an H2-frame propagator into the H1 = eps*sigma_3 - f*sigma_1 frame."""
    return _ROT.conj().T @ U @ _ROT


def bloch_vector(psi, tol=1e-9):
    psi = np.asarray(psi, dtype=complex)
    norm = np.vdot(psi, psi).real
    if abs(norm - 1.0) > tol:
        raise NormalizationError("state is not normalised", norm=norm)
    return np.array([np.vdot(psi, s @ psi).real for s in SIGMA])

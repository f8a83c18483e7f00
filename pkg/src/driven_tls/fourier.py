"""Truncated generalized Fourier series on a single harmonic lattice.

A :class:`HarmonicSeries` represents

    h(t) = exp(i*nu*t) * sum_{|m| <= M} A_m exp(i*m*omega*t)

with the coefficients stored densely over m = -M..M.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SecularIntegrationError, StructuralError

DEFAULT_MODES = 40
RESONANCE_TOL = 1e-9  # relative to omega
MEAN_TOL = 1e-12  # relative to max |A_m|


@dataclass(frozen=True, eq=False)
class HarmonicSeries:
    omega: float
    nu: float
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size % 2 != 1:
            raise ValueError("coefficient array must have odd length 2*M+1")
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "nu", float(self.nu))

    # -- construction -------------------------------------------------
    @classmethod
    def zeros(cls, omega, modes=DEFAULT_MODES, nu=0.0):
        return cls(omega, nu, np.zeros(2 * modes + 1, dtype=complex))

    @classmethod
    def from_modes(cls, omega, modes_map, modes=DEFAULT_MODES, nu=0.0):
        """Build from a ``{m: A_m}`` mapping; entries with |m| > modes are dropped."""
        c = np.zeros(2 * modes + 1, dtype=complex)
        for m, a in modes_map.items():
            if abs(m) <= modes:
                c[m + modes] += a
        return cls(omega, nu, c)

    @classmethod
    def constant(cls, omega, value, modes=DEFAULT_MODES):
        return cls.from_modes(omega, {0: value}, modes)

    # -- basic accessors ---------------------------------------------
    @property
    def modes(self):
        return (self.coeffs.size - 1) // 2

    @property
    def mode_indices(self):
        return np.arange(-self.modes, self.modes + 1)

    def __getitem__(self, m):
        if abs(m) > self.modes:
            return 0j
        return self.coeffs[m + self.modes]

    def __repr__(self):
        return f"HarmonicSeries(omega={self.omega:g}, nu={self.nu:g}, modes={self.modes})"

    def with_coeffs(self, coeffs, nu=None):
        return HarmonicSeries(self.omega, self.nu if nu is None else nu, coeffs)

    def truncate(self, modes):
        """Re-window onto -modes..modes (zero padding when widening)."""
        out = np.zeros(2 * modes + 1, dtype=complex)
        k = min(modes, self.modes)
        out[modes - k : modes + k + 1] = self.coeffs[self.modes - k : self.modes + k + 1]
        return self.with_coeffs(out)

    # -- algebra -------------------------------------------------------
    def _check_lattice(self, other):
        if abs(self.omega - other.omega) > RESONANCE_TOL * self.omega:
            raise StructuralError(
                "series have different base frequencies",
                omega_a=self.omega,
                omega_b=other.omega,
            )

    def _same_offset(self, other):
        self._check_lattice(other)
        if abs(self.nu - other.nu) > RESONANCE_TOL * self.omega:
            raise StructuralError(
                "cannot add series with different offset frequencies",
                nu_a=self.nu,
                nu_b=other.nu,
            )

    def __add__(self, other):
        if isinstance(other, HarmonicSeries):
            self._same_offset(other)
            modes = max(self.modes, other.modes)
            return self.with_coeffs(
                self.truncate(modes).coeffs + other.truncate(modes).coeffs
            )
        # a constant lives at zero frequency
        m = self.zero_mode_index()
        if m is None or abs(m) > self.modes:
            raise StructuralError("no zero-frequency mode to absorb a constant", nu=self.nu)
        c = self.coeffs.copy()
        c[m + self.modes] += other
        return self.with_coeffs(c)

    __radd__ = __add__

    def __neg__(self):
        return self.with_coeffs(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, HarmonicSeries):
            return convolve(self, other)
        return self.with_coeffs(self.coeffs * other)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self.with_coeffs(self.coeffs / scalar)

    def conj(self):
        """Complex conjugate function: offset -nu, A'_m = conj(A_{-m})."""
        return HarmonicSeries(self.omega, -self.nu, np.conj(self.coeffs[::-1]))

    def derivative(self):
        freqs = self.mode_indices * self.omega + self.nu
        return self.with_coeffs(1j * freqs * self.coeffs)

    def frequencies(self):
        return self.mode_indices * self.omega + self.nu

    # -- diagnostics ---------------------------------------------------
    def zero_mode_index(self):
        """Lattice index m with nu + m*omega == 0, or None."""
        m = int(round(-self.nu / self.omega))
        if abs(self.nu + m * self.omega) < RESONANCE_TOL * self.omega:
            return m
        return None

    def is_real(self, tol=1e-12):
        if abs(self.nu) > RESONANCE_TOL * self.omega:
            return False
        scale = max(np.max(np.abs(self.coeffs)), 1.0)
        return bool(np.max(np.abs(self.coeffs - np.conj(self.coeffs[::-1]))) <= tol * scale)

    def tail_ratio(self):
        peak = np.max(np.abs(self.coeffs))
        if peak == 0:
            return 0.0
        return float(max(abs(self.coeffs[0]), abs(self.coeffs[-1])) / peak)

    def is_converged(self, tail_tol=1e-12):
        return self.tail_ratio() < tail_tol

    def abs_sum(self):
        return float(np.sum(np.abs(self.coeffs)))

    def __call__(self, t):
        return evaluate(self, t)


def convolve(a, b, modes=None):
    """Product of two series: C_m = sum_p A_{m-p} B_p, truncated."""
    a._check_lattice(b)
    if modes is None:
        modes = max(a.modes, b.modes)
    full = np.convolve(a.coeffs, b.coeffs)
    centre = a.modes + b.modes
    out = np.zeros(2 * modes + 1, dtype=complex)
    k = min(modes, centre)
    out[modes - k : modes + k + 1] = full[centre - k : centre + k + 1]
    return HarmonicSeries(a.omega, a.nu + b.nu, out)


def mean(a):
    """Time average: the coefficient sitting at zero frequency, if any."""
    m = a.zero_mode_index()
    if m is None:
        return 0j
    return complex(a[m])


def evaluate(a, t):
    t_arr = np.asarray(t, dtype=float)
    phases = np.exp(1j * np.multiply.outer(t_arr, a.frequencies()))
    return phases @ a.coeffs


def integrate_from_zero(a, mean_tol=MEAN_TOL, scale=None):
    """Antiderivative of a zero-mean series, pinned so that the integral from 0 vanishes.

    Returns ``(B, const)`` with ``B_m = A_m / (i(m*omega + nu))`` and
    ``const = -sum_m B_m``; ``int_0^t a = B(t) + const``. The constant lives
    at zero frequency, which lies on the lattice of ``B`` only when ``nu`` is
    a multiple of ``omega``.
    """
    freqs = a.frequencies()
    resonant = np.abs(freqs) < RESONANCE_TOL * a.omega
    if scale is None:
        scale = np.max(np.abs(a.coeffs)) if a.coeffs.size else 0.0
    bad = resonant & (np.abs(a.coeffs) > mean_tol * scale)
    if np.any(bad):
        m = int(a.mode_indices[np.argmax(bad)])
        raise SecularIntegrationError(
            "secular term: resonant mode with nonzero amplitude",
            mode=m,
            amplitude=complex(a.coeffs[m + a.modes]),
        )
    out = np.zeros_like(a.coeffs)
    ok = ~resonant
    out[ok] = a.coeffs[ok] / (1j * freqs[ok])
    return a.with_coeffs(out), complex(-np.sum(out))


def exp_series(a, term_tol=1e-16, max_terms=60):
    """exp(a(t)) for a series on the nu=0 lattice, by Taylor accumulation."""
    if abs(a.nu) > RESONANCE_TOL * a.omega:
        raise StructuralError("exp_series needs a periodic (nu = 0) argument", nu=a.nu)
    total = HarmonicSeries.constant(a.omega, 1.0, a.modes)
    term = total
    for k in range(1, max_terms + 1):
        term = convolve(term, a) / k
        total = total + term
        if np.max(np.abs(term.coeffs)) < term_tol * np.max(np.abs(total.coeffs)):
            break
    return total

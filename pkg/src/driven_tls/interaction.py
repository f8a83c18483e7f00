"""Periodic driving field f(t), the Fourier data of q and q^2, and condition classification.

With ``q(t) = exp(i * int_0^t f)`` and ``Q0 = q^2`` the derived functions

    Q1 = Q0 * int_0^t (Q0^{-1} - M(Q0^{-1}))
    Q2 = Q0 * int_0^t (Q0 - M(Q0))
    Q3 = Q0 * int_0^t (Q1 - M(Q1))

decide which secular-cancellation scheme applies: I when M(Q0) != 0, II when
only M(Q1) != 0, III when only M(Q3) != 0.
"""

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import factorial, lgamma, log

import numpy as np

from .bessel import bessel_j_range
from .errors import (
    InternalConsistencyError,
    InvalidInteractionError,
    ResonantFieldError,
    SpuriousCaseError,
    TruncationError,
    UnclassifiableError,
)
from .fourier import DEFAULT_MODES, RESONANCE_TOL, HarmonicSeries, integrate_from_zero, mean

CLASS_TOL = 1e-10
TERM_TOL = 1e-17
MAX_SHELL_DEGREE = 200


@dataclass(frozen=True)
class InteractionSpec:
    """f(t) = F0 + sum_n F_n exp(i n omega t), with F_{-n} = conj(F_n)."""

    omega: float
    F0: float = 0.0
    harmonics: dict = field(default_factory=dict)
    reality_tol: float = 1e-12
    # derived fields such as 2f may legitimately sit on the excluded resonance
    check_resonance: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if not self.omega > 0:
            raise InvalidInteractionError("omega must be positive", omega=self.omega)
        clean = {}
        for n, a in self.harmonics.items():
            n = int(n)
            if n == 0:
                raise InvalidInteractionError("the dc part goes in F0, not harmonics[0]")
            if a != 0:
                clean[n] = complex(a)
        for n, a in clean.items():
            partner = clean.get(-n, 0j)
            if abs(partner - np.conj(a)) > self.reality_tol * max(1.0, abs(a)):
                raise InvalidInteractionError(
                    "f must be real: harmonics[-n] must equal conj(harmonics[n])", n=n
                )
        object.__setattr__(self, "harmonics", dict(sorted(clean.items())))
        object.__setattr__(self, "F0", float(self.F0))
        object.__setattr__(self, "omega", float(self.omega))
        if self.F0 != 0.0 and self.check_resonance:
            ratio = 2.0 * self.F0 / self.omega
            k = round(ratio)
            if abs(2.0 * self.F0 - k * self.omega) < RESONANCE_TOL * self.omega:
                raise ResonantFieldError(
                    "2*F0 is an integer multiple of omega; this case is excluded", k=k
                )

    @classmethod
    def monochromatic(cls, omega, chi1, chi2=0.0):
        """f = F0 + phi*cos(omega t) with chi1 = 2 phi/omega, chi2 = 2 F0/omega."""
        phi = 0.5 * chi1 * omega
        harmonics = {1: 0.5 * phi, -1: 0.5 * phi} if phi != 0 else {}
        return cls(omega=omega, F0=0.5 * chi2 * omega, harmonics=harmonics)

    @classmethod
    def from_real_harmonics(cls, omega, F0=0.0, cos=None, sin=None):
        """f = F0 + sum_n a_n cos(n omega t) + b_n sin(n omega t), n >= 1."""
        h = {}
        for n, a in (cos or {}).items():
            h[n] = h.get(n, 0) + 0.5 * a
            h[-n] = h.get(-n, 0) + 0.5 * a
        for n, b in (sin or {}).items():
            h[n] = h.get(n, 0) - 0.5j * b
            h[-n] = h.get(-n, 0) + 0.5j * b
        return cls(omega=omega, F0=F0, harmonics=h)

    @property
    def period(self):
        return 2.0 * np.pi / self.omega

    @property
    def is_monochromatic(self):
        h = self.harmonics
        if set(h) != {1, -1}:
            return not h
        return abs(h[1].imag) <= self.reality_tol * abs(h[1])

    @property
    def phi(self):
        return 2.0 * self.harmonics[1].real if self.harmonics else 0.0

    @property
    def chi1(self):
        return 2.0 * self.phi / self.omega

    @property
    def chi2(self):
        return 2.0 * self.F0 / self.omega

    def scaled(self, factor):
        """The field factor*f (q -> q^factor)."""
        return InteractionSpec(
            self.omega,
            factor * self.F0,
            {n: factor * a for n, a in self.harmonics.items()},
            self.reality_tol,
            check_resonance=False,
        )

    def field(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, self.F0, dtype=complex)
        for n, a in self.harmonics.items():
            out = out + a * np.exp(1j * n * self.omega * t)
        return out.real

    def field_integral(self, t):
        """int_0^t f, in closed form."""
        t = np.asarray(t, dtype=float)
        out = self.F0 * t + 0j
        for n, a in self.harmonics.items():
            out = out + a * (np.exp(1j * n * self.omega * t) - 1.0) / (1j * n * self.omega)
        return out.real


def _compositions(total, parts):
    # all (p_1..p_parts) >= 0 with sum == total
    for bars in combinations_with_replacement(range(parts), total):
        counts = [0] * parts
        for b in bars:
            counts[b] += 1
        yield counts


def multinomial_coefficients(spec, modes=DEFAULT_MODES, term_tol=TERM_TOL):
    """Fourier coefficients of q by direct summation over total-degree shells.

    Q_m = exp(-sum_a z_a) * sum_{p: sum p_a n_a = m} prod_a z_a^{p_a} / p_a!,
    z_a = f_a / (n_a omega). The shell of total degree d is bounded by S^d/d!
    with S = sum |z_a| (multinomial theorem), which sets the early exit.
    """
    ns = list(spec.harmonics)
    zs = [spec.harmonics[n] / (n * spec.omega) for n in ns]
    out = np.zeros(2 * modes + 1, dtype=complex)
    out[modes] = 1.0
    if zs:
        s_abs = sum(abs(z) for z in zs)
        for d in range(1, MAX_SHELL_DEGREE + 1):
            if d * log(s_abs) - lgamma(d + 1) < log(term_tol):
                break
            for ps in _compositions(d, len(zs)):
                m = sum(p * n for p, n in zip(ps, ns))
                if abs(m) > modes:
                    continue
                term = 1.0 + 0j
                for p, z in zip(ps, zs):
                    if p:
                        term *= z**p / factorial(p)
                out[m + modes] += term
        else:
            raise TruncationError(
                "multinomial shells did not converge", degree=MAX_SHELL_DEGREE, size=s_abs
            )
        out *= np.exp(-sum(zs))
    return HarmonicSeries(spec.omega, spec.F0, out)


def q_coefficients(spec, term_tol=TERM_TOL, modes=DEFAULT_MODES, method="auto"):
    """q(t) = exp(i int_0^t f) = exp(i F0 t) sum_m Q_m exp(i m omega t).

    ``method`` is "bessel" (monochromatic fields only), "multinomial", or
    "auto", which picks the Bessel closed form whenever it applies.
    """
    if method == "auto":
        method = "bessel" if spec.is_monochromatic else "multinomial"
    if method == "bessel":
        if not spec.is_monochromatic:
            raise ValueError("Bessel closed form needs a monochromatic field")
        coeffs = bessel_j_range(modes, spec.phi / spec.omega)
        return HarmonicSeries(spec.omega, spec.F0, coeffs.astype(complex))
    if method == "multinomial":
        return multinomial_coefficients(spec, modes, term_tol)
    raise ValueError(f"unknown method {method!r}")


def q2_coefficients(spec, term_tol=TERM_TOL, modes=DEFAULT_MODES, method="auto"):
    """q^2: the substitution f -> 2f; offset 2*F0."""
    return q_coefficients(spec.scaled(2.0), term_tol, modes, method)


# -- mean values of the derived functions ------------------------------------
#
# Sums over several lattices are kept as plain lists of HarmonicSeries: once
# F0 != 0 the integration constants sit off the lattice of q^2.

def _remove_mean(terms):
    out = []
    for s in terms:
        m = s.zero_mode_index()
        if m is not None and abs(m) <= s.modes:
            c = s.coeffs.copy()
            c[m + s.modes] = 0
            s = s.with_coeffs(c)
        out.append(s)
    return out


def _integrate(terms):
    """int_0^t of a zero-mean multi-lattice sum."""
    out = []
    total_const = 0j
    for s in terms:
        b, c = integrate_from_zero(s)
        out.append(b)
        total_const += c
    out.append(HarmonicSeries.constant(terms[0].omega, total_const, terms[0].modes))
    return out


def _times(series, terms):
    return [series * s for s in terms]


def _mean(terms):
    return sum(mean(s) for s in terms)


def derived_function(q2, which):
    """Q1, Q2 or Q3 as a multi-lattice list of series, built from Fourier primitives."""
    inv = q2.conj()
    if which == 2:
        return _times(q2, _integrate(_remove_mean([q2])))
    q1 = _times(q2, _integrate(_remove_mean([inv])))
    if which == 1:
        return q1
    if which == 3:
        return _times(q2, _integrate(_remove_mean(q1)))
    raise ValueError("which must be 1, 2 or 3")


def mean_Q0(spec, q2=None):
    q2 = q2 if q2 is not None else q2_coefficients(spec)
    return mean(q2)


def mean_Q1_closed_form(q2):
    """(i/omega) sum_{m != 0} conj(Q2_{-m}) (Q2_0 - Q2_{-m}) / m, for F0 = 0."""
    M = q2.modes
    m = np.arange(-M, M + 1)
    nz = m != 0
    q_neg = q2.coeffs[::-1]  # index k holds Q2_{-m_k}
    terms = np.conj(q_neg[nz]) * (q2[0] - q_neg[nz]) / m[nz]
    return complex(1j / q2.omega * np.sum(terms))


def mean_Q3_closed_form(q2):
    """Double sum for M(Q3) when F0 = 0."""
    M = q2.modes
    idx = np.arange(-M, M + 1)

    def Q(k):
        k = np.asarray(k)
        out = np.zeros(k.shape, dtype=complex)
        ok = np.abs(k) <= M
        out[ok] = q2.coeffs[k[ok] + M]
        return out

    n = idx[idx != 0][:, None]
    m = idx[idx != 0][None, :]
    q0 = q2[0]
    bracket = q0 * Q(n) - q0 * Q(n - m) + Q(-n) * Q(n - m)
    total = np.sum(np.conj(Q(-m)) / (n * m) * bracket)
    return complex(-total / q2.omega**2)


def mean_Q1(spec, q2=None):
    q2 = q2 if q2 is not None else q2_coefficients(spec)
    if spec.F0 == 0.0:
        return mean_Q1_closed_form(q2)
    return _mean(derived_function(q2, 1))


def mean_Q2(spec, q2=None):
    q2 = q2 if q2 is not None else q2_coefficients(spec)
    return _mean(derived_function(q2, 2))


def mean_Q3(spec, q2=None):
    q2 = q2 if q2 is not None else q2_coefficients(spec)
    if spec.F0 == 0.0:
        return mean_Q3_closed_form(q2)
    return _mean(derived_function(q2, 3))


# -- classification -------------------------------------------------------------

@dataclass(frozen=True)
class ConditionClass:
    tag: str
    f0_is_zero: bool
    mean_q0: complex
    mean_q1: complex
    mean_q3: complex = None
    table_label: str = None

    def diagnostics(self):
        out = {"M(Q0)": self.mean_q0, "M(Q1)": self.mean_q1}
        if self.mean_q3 is not None:
            out["M(Q3)"] = self.mean_q3
        return out


def _table_label(spec):
    """Monochromatic classification by (chi1, chi2) alone."""
    chi2 = spec.chi2
    if abs(chi2 - round(chi2)) > RESONANCE_TOL:
        return "C", "II"
    # only chi2 = 0 survives the 2*F0 != k*omega rule
    j0 = bessel_j_range(0, spec.chi1)[0]
    scale = np.max(np.abs(bessel_j_range(DEFAULT_MODES, spec.chi1)))
    if abs(j0) > CLASS_TOL * scale:
        return "A", "I"
    return "B", "III"


def classify(spec, q2=None, class_tol=CLASS_TOL):
    """Threshold cascade I -> II -> III on the (dimensionless) mean values."""
    q2 = q2 if q2 is not None else q2_coefficients(spec)
    scale = np.max(np.abs(q2.coeffs))
    w = spec.omega
    m0 = mean_Q0(spec, q2)
    m1 = mean_Q1(spec, q2)
    f0_zero = spec.F0 == 0.0
    m3 = mean_Q3(spec, q2)
    if abs(m0) > class_tol * scale:
        tag = "I"
    elif abs(m1) * w > class_tol * scale:
        tag = "II"
    elif not f0_zero:
        raise SpuriousCaseError(
            "M(Q0) = M(Q1) = 0 with F0 != 0: special chi2 value outside condition II",
            mean_q0=m0,
            mean_q1=m1,
        )
    elif abs(m3) * w * w > class_tol * scale:
        tag = "III"
    else:
        raise UnclassifiableError(
            "M(Q0), M(Q1) and M(Q3) all vanish", mean_q0=m0, mean_q1=m1, mean_q3=m3
        )
    label = None
    if spec.is_monochromatic:
        label, expected = _table_label(spec)
        if expected != tag:
            raise InternalConsistencyError(
                "threshold cascade disagrees with the monochromatic table",
                cascade=tag,
                table=expected,
            )
    return ConditionClass(tag, f0_zero, m0, m1, m3, label)

"""Secular-free power-series solution of g' - i g^2 - 2 i f g + i eps^2 = 0.

The particular solution is built as g = sum_n s^n q c_n with s = eps
(conditions I and III) or s = eps^2 (condition II), where

    c_n = q * [ i int_0^t (sum_{p<n} c_p c_{n-p} - [n == source] q^{-2}) + alpha_n ].

Each alpha_n is an integration constant. While still unknown it is carried
symbolically: the coefficients of every c_n are polynomials in the
unresolved constants. At each order the zero-frequency part of the
integrand must vanish, and the first order at which that condition depends
on an unknown fixes it. Under condition I this happens one order later
(alpha_1 from a quadratic), under condition II (F0 = 0) likewise, and under
condition III three orders later.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CancellationFailureError,
    DivergenceSuspectedError,
    InternalConsistencyError,
    NearResonanceError,
    UnsupportedOrderError,
    WrongConditionError,
)
from .fourier import RESONANCE_TOL, HarmonicSeries, convolve, evaluate, integrate_from_zero, mean
from .interaction import CLASS_TOL

DEFAULT_ORDERS = {"I": 25, "II": 20, "III": 6}
MAX_ORDER_III = 6
LOOKAHEAD = 4
ROOT_TIE_TOL = 1e-12


# -- series with polynomial coefficients -------------------------------------

def _mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for j, k in b:
        d[j] = d.get(j, 0) + k
    return tuple(sorted(d.items()))


class _PolySeries:
    """exp(i nu t) sum_m A_m(alpha) exp(i m omega t) with A_m polynomial in the unknowns.

    ``terms`` maps a monomial, a sorted tuple of (unknown, power) pairs, to its
    coefficient array.
    """

    def __init__(self, omega, nu, modes, terms=None):
        self.omega = omega
        self.nu = nu
        self.modes = modes
        self.terms = terms or {}

    @classmethod
    def from_series(cls, s):
        return cls(s.omega, s.nu, s.modes, {(): s.coeffs.copy()})

    def _add_term(self, mono, arr):
        if mono in self.terms:
            self.terms[mono] = self.terms[mono] + arr
        else:
            self.terms[mono] = arr

    def __add__(self, other):
        out = _PolySeries(self.omega, self.nu, self.modes, dict(self.terms))
        for mono, arr in other.terms.items():
            out._add_term(mono, arr)
        return out

    def scale(self, c):
        return _PolySeries(
            self.omega, self.nu, self.modes, {k: c * v for k, v in self.terms.items()}
        )

    def _conv(self, a, b):
        full = np.convolve(a, b)
        centre = (a.size - 1) // 2 + (b.size - 1) // 2
        return full[centre - self.modes : centre + self.modes + 1]

    def __mul__(self, other):
        out = _PolySeries(self.omega, self.nu + other.nu, self.modes)
        for ma, a in self.terms.items():
            for mb, b in other.terms.items():
                out._add_term(_mono_mul(ma, mb), self._conv(a, b))
        return out

    def times_series(self, s):
        return self * _PolySeries.from_series(s)

    def substitute(self, j, value):
        out = _PolySeries(self.omega, self.nu, self.modes)
        for mono, arr in self.terms.items():
            d = dict(mono)
            k = d.pop(j, 0)
            out._add_term(tuple(sorted(d.items())), arr * value**k if k else arr)
        return out

    def zero_mode_index(self):
        return HarmonicSeries(self.omega, self.nu, np.zeros(1)).zero_mode_index()

    def max_abs(self):
        return max((np.max(np.abs(v)) for v in self.terms.values()), default=0.0)

    def unknowns(self):
        return {j for mono in self.terms for j, _ in mono}

    def as_series(self):
        if self.unknowns():
            raise InternalConsistencyError("series still depends on unresolved constants")
        return HarmonicSeries(
            self.omega, self.nu, self.terms.get((), np.zeros(2 * self.modes + 1, dtype=complex))
        )


def _choose_root(roots):
    """Root with non-negative real part; ties broken by non-negative imaginary part."""
    roots = [complex(r) for r in roots]
    scale = max((abs(r) for r in roots), default=1.0) or 1.0
    tol = ROOT_TIE_TOL * scale

    def key(r):
        return (r.real < -tol, r.imag < -tol, -r.real, -r.imag)

    return min(roots, key=key)


@dataclass
class _Ledger:
    constants: dict = field(default_factory=dict)
    resolved_at: dict = field(default_factory=dict)


def _solve_mean_condition(cond, order, ledger):
    """Fix the single unknown a vanishing-mean condition depends on."""
    unknowns = {j for mono in cond for j, _ in mono}
    if not unknowns:
        raise CancellationFailureError(
            "secular term at order {} cannot be cancelled".format(order),
            order=order,
            residual_mean=cond.get((), 0j),
        )
    if len(unknowns) > 1:
        raise CancellationFailureError(
            "mean condition couples several unresolved constants",
            order=order,
            unknowns=sorted(unknowns),
        )
    (j,) = unknowns
    powers = {dict(mono).get(j, 0): v for mono, v in cond.items()}
    degree = max(powers)
    poly = [powers.get(k, 0j) for k in range(degree, -1, -1)]
    value = _choose_root(np.roots(poly))
    ledger.constants[j] = value
    ledger.resolved_at[j] = order
    return j, value


def secular_free_coefficients(q, q2, order, source_order, lookahead=LOOKAHEAD, class_tol=CLASS_TOL):
    """c_1..c_order as HarmonicSeries plus the ledger of fixed constants.

    ``source_order`` is the order at which -q^{-2} enters the integrand: 2 for
    the eps-expansion, 1 for the eps^2-expansion.
    """
    qbar2 = _PolySeries.from_series(q2.conj())
    qp = _PolySeries.from_series(q)
    modes = q.modes
    c = {}
    ledger = _Ledger()
    pending = set()
    n = 0
    while True:
        n += 1
        integrand = None
        for p in range(1, n):
            term = c[p] * c[n - p]
            integrand = term if integrand is None else integrand + term
        if n == source_order:
            src = qbar2.scale(-1.0)
            integrand = src if integrand is None else integrand + src
        if integrand is None:
            # c_1 under the eps-expansion: a pure constant times q
            integrand = _PolySeries(q.omega, -2.0 * q.nu, modes)
        m0 = integrand.zero_mode_index()
        if m0 is not None and abs(m0) <= modes:
            k = m0 + modes
            scale = integrand.max_abs()
            cond = {
                mono: complex(arr[k])
                for mono, arr in integrand.terms.items()
                if abs(arr[k]) > class_tol * scale
            }
            if cond:
                j, value = _solve_mean_condition(cond, n, ledger)
                pending.discard(j)
                for p in c:
                    c[p] = c[p].substitute(j, value)
                integrand = integrand.substitute(j, value)
            # what is left at zero frequency is round-off
            for arr in integrand.terms.values():
                arr[k] = 0.0
        bracket = _PolySeries(integrand.omega, integrand.nu, modes)
        consts = {}
        for mono, arr in integrand.terms.items():
            b, const = integrate_from_zero(HarmonicSeries(q.omega, integrand.nu, arr))
            bracket._add_term(mono, 1j * b.coeffs)
            consts[mono] = 1j * const
        if m0 is not None and abs(m0) <= modes:
            k = m0 + modes
            for mono, v in consts.items():
                arr = np.zeros(2 * modes + 1, dtype=complex)
                arr[k] = v
                bracket._add_term(mono, arr)
            arr = np.zeros(2 * modes + 1, dtype=complex)
            arr[k] = 1.0
            bracket._add_term(((n, 1),), arr)
            pending.add(n)
        else:
            # the constant would sit off the lattice of c_n: alpha_n cancels it
            if any(mono for mono in consts):
                raise InternalConsistencyError("off-lattice constant depends on unknowns")
            ledger.constants[n] = -sum(consts.values())
            ledger.resolved_at[n] = n
        c[n] = bracket * qp
        if n >= order and not any(j <= order for j in pending):
            break
        if n >= order + lookahead:
            raise CancellationFailureError(
                "integration constants left unresolved",
                unresolved=sorted(j for j in pending if j <= order),
                order=n,
            )
    series = [c[p].as_series() for p in range(1, order + 1)]
    return series, ledger


# -- expansions -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RiccatiExpansion:
    """Per-order Fourier data of g, coefficients G^(n)_m of s^n."""

    condition: str
    order: int
    per_order: list
    constants: dict
    resolved_at: dict
    parameter: str  # "epsilon" or "lambda" (= epsilon^2)
    F0: float
    omega: float
    c_series: list = None

    def parameter_value(self, epsilon):
        return epsilon if self.parameter == "epsilon" else epsilon * epsilon


def _require_f0_zero(q):
    if abs(q.nu) > RESONANCE_TOL * q.omega:
        raise WrongConditionError("this expansion needs F0 = 0", F0=q.nu)


def _mean_scale(q2):
    return CLASS_TOL * np.max(np.abs(q2.coeffs))


def _from_c(condition, q, c_series, ledger, parameter, F0):
    g = [convolve(q, cn) for cn in c_series]
    return RiccatiExpansion(
        condition,
        len(c_series),
        g,
        dict(ledger.constants),
        dict(ledger.resolved_at),
        parameter,
        F0,
        q.omega,
        c_series,
    )


def expand_condition_I(q, q2, order=DEFAULT_ORDERS["I"]):
    _require_f0_zero(q)
    if abs(mean(q2)) <= _mean_scale(q2):
        raise WrongConditionError("condition I needs M(Q0) != 0", mean_q0=mean(q2))
    c, ledger = secular_free_coefficients(q, q2, order, source_order=2)
    return _from_c("I", q, c, ledger, "epsilon", 0.0)


def expand_condition_III(q, q2, order=DEFAULT_ORDERS["III"], allow_deep=False):
    """Condition III; orders beyond 6 only with ``allow_deep``."""
    _require_f0_zero(q)
    if order > MAX_ORDER_III and not allow_deep:
        raise UnsupportedOrderError(
            "condition III is validated up to order 6", order=order
        )
    if abs(mean(q2)) > _mean_scale(q2):
        raise WrongConditionError("condition III needs M(Q0) = 0", mean_q0=mean(q2))
    c, ledger = secular_free_coefficients(q, q2, order, source_order=2)
    return _from_c("III", q, c, ledger, "epsilon", 0.0)


def expand_condition_II_f0zero(q, q2, order=DEFAULT_ORDERS["II"]):
    _require_f0_zero(q)
    if abs(mean(q2)) > _mean_scale(q2):
        raise WrongConditionError("condition II needs M(Q0) = 0", mean_q0=mean(q2))
    c, ledger = secular_free_coefficients(q, q2, order, source_order=1)
    return _from_c("II", q, c, ledger, "lambda", 0.0)


def expand_condition_II_f0nonzero(q, q2, F0, order=DEFAULT_ORDERS["II"]):
    """Condition II with a dc component: fully explicit recursion for E^(n).

    E^(1)_m = sum_a Q_{m+a} conj(Q2_a) / (a w + 2 F0)
    E^(n)_m = sum_p sum_{a,b} Q_{m-a-b} E^(p)_a E^(n-p)_b / ((a+b) w - 2 F0)
    """
    w = q.omega
    if F0 == 0.0:
        raise WrongConditionError("use expand_condition_II_f0zero for F0 = 0")
    M = q.modes
    idx = np.arange(-M, M + 1)
    tol = RESONANCE_TOL * w

    def divide(num, den, what):
        bad = (np.abs(den) < tol) & (np.abs(num) > 0)
        if np.any(bad):
            raise NearResonanceError(
                "vanishing denominator in the dc recursion", term=what, mode=int(idx[bad][0])
            )
        out = np.zeros_like(num)
        ok = np.abs(den) >= tol
        out[ok] = num[ok] / den[ok]
        return out

    # v_k = conj(Q2_{-k}) / (-k w + 2 F0), so E^(1) = Q * v on the lattice with offset -F0
    v = divide(np.conj(q2.coeffs[::-1]), -idx * w + 2.0 * F0, "E1")
    E = [convolve(HarmonicSeries(w, F0, q.coeffs), HarmonicSeries(w, -2.0 * F0, v))]
    for n in range(2, order + 1):
        acc = np.zeros(2 * M + 1, dtype=complex)
        for p in range(1, n):
            acc += convolve(E[p - 1], E[n - p - 1]).coeffs
        # acc sits at offset -2F0; index s holds sum_{a+b=s} E_a E_b
        inner = divide(acc, idx * w - 2.0 * F0, f"E{n}")
        E.append(convolve(q, HarmonicSeries(w, -2.0 * F0, inner)))
    g = [convolve(q, e) for e in E]
    return RiccatiExpansion("II", order, g, {}, {}, "lambda", F0, w, E)


def build_expansion(spec, condition, q, q2, order=None, allow_deep=False):
    """Dispatch on the condition tag (and on F0)."""
    tag = condition if isinstance(condition, str) else condition.tag
    if order is None:
        order = DEFAULT_ORDERS[tag]
    if tag == "I":
        return expand_condition_I(q, q2, order)
    if tag == "III":
        return expand_condition_III(q, q2, order, allow_deep)
    if tag == "II":
        if spec.F0 == 0.0:
            return expand_condition_II_f0zero(q, q2, order)
        return expand_condition_II_f0nonzero(q, q2, spec.F0, order)
    raise ValueError(f"unknown condition {tag!r}")


# -- summation at a concrete coupling -----------------------------------------------

@dataclass(frozen=True, eq=False)
class GSeries:
    """g(t) = sum_m G_m(eps) exp(i m omega t) at a fixed coupling."""

    g: HarmonicSeries
    Omega: float
    g0: complex
    epsilon: float
    F0: float
    contributions: tuple = ()

    @property
    def G(self):
        return self.g.coeffs


DIVERGENCE_WINDOW = 3
NEGLIGIBLE_TAIL = 1e-13


def check_convergence(contributions):
    """Raise unless the last per-order contributions are decreasing (or negligible)."""
    c = list(contributions)
    if len(c) < DIVERGENCE_WINDOW:
        return
    peak = max(c)
    tail = c[-DIVERGENCE_WINDOW:]
    if peak == 0.0 or max(tail) <= NEGLIGIBLE_TAIL * peak:
        return
    if all(a > b for a, b in zip(tail, tail[1:])):
        return
    raise DivergenceSuspectedError(
        "per-order contributions are not decreasing; coupling likely outside the convergence region",
        last_contributions=tail,
    )


def sum_at_epsilon(expansion, epsilon, check=True):
    s = expansion.parameter_value(epsilon)
    omega = expansion.omega
    modes = expansion.per_order[0].modes
    total = np.zeros(2 * modes + 1, dtype=complex)
    contributions = []
    for n, gn in enumerate(expansion.per_order, start=1):
        term = gn.coeffs * s**n
        contributions.append(float(np.sum(np.abs(term))))
        total = total + term
    if check:
        check_convergence(contributions)
    g = HarmonicSeries(omega, 0.0, total)
    mean_g = mean(g)
    if abs(mean_g.imag) > 1e-8 * abs(mean_g) + 1e-12:
        raise InternalConsistencyError(
            "secular frequency has a non-negligible imaginary part", Omega=mean_g
        )
    c = total.copy()
    c[modes] = mean_g.real
    g = g.with_coeffs(c)
    Omega = expansion.F0 + mean_g.real
    g0 = complex(np.sum(c))
    return GSeries(g, Omega, g0, float(epsilon), expansion.F0, tuple(contributions))


def riccati_residual(g, spec, epsilon, t_samples):
    """max_t |g' - i g^2 - 2 i f g + i eps^2| with g' taken term by term."""
    series = g.g if isinstance(g, GSeries) else g
    t = np.asarray(t_samples, dtype=float)
    gv = evaluate(series, t)
    dg = evaluate(series.derivative(), t)
    f = spec.field(t)
    r = dg - 1j * gv * gv - 2j * f * gv + 1j * epsilon * epsilon
    return float(np.max(np.abs(r)))

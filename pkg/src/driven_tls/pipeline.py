"""End-to-end solve: field -> q data -> condition -> expansion -> g -> U."""

from dataclasses import dataclass

from .fourier import DEFAULT_MODES
from .interaction import classify, q2_coefficients, q_coefficients
from .propagator import assemble
from .riccati import build_expansion, sum_at_epsilon


@dataclass(frozen=True, eq=False)
class Solution:
    spec: object
    condition: object
    expansion: object
    g: object
    model: object

    @property
    def Omega(self):
        return self.model.Omega

    @property
    def period_ratio(self):
        """T_Omega / T_omega = omega / |Omega|."""
        return self.model.omega / abs(self.Omega) if self.Omega else float("inf")


def prepare(spec, order=None, modes=DEFAULT_MODES, allow_deep=False):
    """Everything that does not depend on the coupling."""
    q = q_coefficients(spec, modes=modes)
    q2 = q2_coefficients(spec, modes=modes)
    cond = classify(spec, q2)
    exp = build_expansion(spec, cond, q, q2, order=order, allow_deep=allow_deep)
    return q, q2, cond, exp


def solve(spec, epsilon, order=None, modes=DEFAULT_MODES, prepared=None, check=True):
    q, q2, cond, exp = prepared or prepare(spec, order, modes)
    g = sum_at_epsilon(exp, epsilon, check=check)
    model = assemble(g, q, q2, spec, check=check)
    return Solution(spec, cond, exp, g, model)

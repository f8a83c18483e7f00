"""Independent references: direct integration of the Schroedinger equation and the
closed-form constant-field propagator."""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import StiffnessError
from .propagator import SIGMA, evaluate_U, to_h1_frame

# the config tolerances bound the trajectory; each step is held 10x tighter
LOCAL_TOL_FACTOR = 0.1


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    max_step: float = 0.05  # fraction of the driving period
    method: str = "RK45"

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not 0 < self.max_step <= 0.05:
            raise ValueError("max_step must be in (0, 1/20] driving periods")


@dataclass(frozen=True, eq=False)
class OracleTrajectory:
    times: np.ndarray
    U: np.ndarray  # (n, 2, 2)
    unitarity_log: np.ndarray  # |det U| - 1 per sample

    @property
    def P(self):
        return np.abs(self.U[:, 0, 1]) ** 2


def integrate_schrodinger(spec, epsilon, t_grid, cfg=None, frame="H2"):
    """Columns of U(t) from i dU/dt = H U, U(0) = 1.

    ``frame`` selects H2 = eps*s1 + f*s3 or H1 = eps*s3 - f*s1. No
    renormalisation is applied; the unitarity log is the quality signal.
    """
    cfg = cfg or IntegratorConfig()
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0 or t[0] != 0.0 or np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be strictly increasing and start at 0")
    if frame == "H2":
        a, b = SIGMA[0] * epsilon, SIGMA[2]
    elif frame == "H1":
        a, b = SIGMA[2] * epsilon, -SIGMA[0]
    else:
        raise ValueError("frame must be 'H1' or 'H2'")

    def rhs(tau, y):
        U = y.reshape(2, 2)
        H = a + spec.field(tau) * b
        return (-1j * (H @ U)).ravel()

    U0 = np.eye(2, dtype=complex).ravel()
    if t.size == 1:
        U = np.eye(2, dtype=complex)[None]
    else:
        sol = solve_ivp(
            rhs,
            (0.0, t[-1]),
            U0,
            method=cfg.method,
            t_eval=t,
            rtol=cfg.rel_tol * LOCAL_TOL_FACTOR,
            atol=cfg.abs_tol * LOCAL_TOL_FACTOR,
            max_step=cfg.max_step * spec.period,
        )
        if not sol.success:
            raise StiffnessError("integrator failed", message=sol.message)
        U = sol.y.T.reshape(-1, 2, 2)
    log = np.abs(np.linalg.det(U)) - 1.0
    return OracleTrajectory(t, U, log)


def constant_field_propagator(F0, epsilon, t):
    """exp(-i H t) for H = F0 s3 + eps s1: cos(w0 t) 1 - i sin(w0 t)/w0 H, w0 = sqrt(F0^2 + eps^2)."""
    t = np.asarray(t, dtype=float)
    w0 = np.hypot(F0, epsilon)
    c = np.cos(w0 * t)
    # sin(w0 t)/w0 -> t as w0 -> 0
    s = t * np.sinc(w0 * t / np.pi)
    gen = 1j * (F0 * SIGMA[2] + epsilon * SIGMA[0])
    return c[..., None, None] * np.eye(2) - s[..., None, None] * gen


def floquet_omega(U_period, period):
    """|Omega| folded into [0, omega/2] from the eigenphases of the one-period propagator.

    Eigenvalues of a unitary matrix are well conditioned, so this keeps full
    accuracy when Omega*T is tiny (where arccos of the trace would not).
    """
    U = np.asarray(U_period, dtype=complex)
    U = U / np.sqrt(np.linalg.det(U))
    lam = np.linalg.eigvals(U)
    return float(np.abs(np.angle(lam[0])) / period)


def fold_omega(Omega, omega):
    """Map a secular frequency onto the branch [0, omega/2] used by floquet_omega."""
    x = abs(Omega) % omega
    return min(x, omega - x)


def omega_from_probability(times, P, period):
    """Omega from the rhythm of P(t) ~ A sin^2(Omega t), which repeats every pi/Omega.

    P is first averaged over one driving ``period`` (uniform grid assumed) to
    strip the fast ripple; the upward crossings of the mid level then sit
    pi/Omega apart and a straight-line fit gives the spacing. None when fewer
    than two crossings are visible.
    """
    t = np.asarray(times, dtype=float)
    P = np.asarray(P, dtype=float)
    dt = t[1] - t[0]
    n = int(round(period / dt))
    if n >= 2:
        if n >= P.size:
            return None
        P = np.convolve(P, np.ones(n) / n, mode="valid")
        t = t[: P.size] + 0.5 * (n - 1) * dt
    level = 0.5 * (P.max() + P.min())
    i = np.flatnonzero((P[:-1] < level) & (P[1:] >= level))
    if i.size < 2:
        return None
    frac = (level - P[i]) / (P[i + 1] - P[i])
    cross = t[i] + frac * (t[i + 1] - t[i])
    spacing = np.polyfit(np.arange(cross.size), cross, 1)[0]
    return float(np.pi / spacing)


def compare(model, traj, frame="H2"):
    """Deviations between the perturbative model and an oracle trajectory."""
    U = evaluate_U(model, traj.times)
    if frame == "H1":
        U = to_h1_frame(U)
    dU = np.abs(U - traj.U)
    P_model = np.abs(U[:, 0, 1]) ** 2
    report = {
        "sup_matrix_dev": float(dU.max()),
        "sup_P_dev": float(np.max(np.abs(P_model - traj.P))),
        "model_Omega": float(model.Omega),
        "oracle_Omega": None,
    }
    T = model.period
    report["oracle_Omega_from_P"] = omega_from_probability(traj.times, traj.P, T)
    k = np.flatnonzero(np.isclose(traj.times, T, rtol=0, atol=1e-12 * T))
    if k.size:
        report["oracle_Omega"] = floquet_omega(traj.U[k[0]], T)
        report["Omega_dev"] = abs(report["oracle_Omega"] - fold_omega(model.Omega, model.omega))
    return report

"""1D Euler equations (monatomic gamma = 5/3) and an exact Riemann solver.

The Euler system is the homogeneous validation companion of the moment model:
same scheme, zero production. The exact Riemann solution provides the
quantitative oracle for the shock-tube acceptance runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidState, VacuumError
from .newton import SolverConfig, newton_solve

__all__ = ["EulerState", "EulerModel", "euler_flux", "pressure", "exact_riemann"]

GAMMA_MONATOMIC = 5.0 / 3.0


@dataclass(frozen=True)
class EulerState:
    """Conserved Euler state: density, momentum density, total energy density."""

    rho: float
    M1: float
    E: float

    def pressure(self, gamma: float = GAMMA_MONATOMIC) -> float:
        return (gamma - 1.0) * (self.E - 0.5 * self.M1 * self.M1 / self.rho)

    @classmethod
    def from_primitive(cls, rho: float, v1: float, p: float,
                       gamma: float = GAMMA_MONATOMIC) -> "EulerState":
        return cls(rho=rho, M1=rho * v1, E=p / (gamma - 1.0) + 0.5 * rho * v1 * v1)

    def as_array(self) -> np.ndarray:
        return np.array([self.rho, self.M1, self.E])


def pressure(u: np.ndarray, gamma: float = GAMMA_MONATOMIC) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return (gamma - 1.0) * (u[..., 2] - 0.5 * u[..., 1] * u[..., 1] / u[..., 0])


def euler_flux(u: np.ndarray, gamma: float = GAMMA_MONATOMIC) -> np.ndarray:
    """(M1, M1 v1 + p, v1 (E + p)) with p = (gamma-1)(E - M1^2 / 2 rho)."""
    u = np.asarray(u, dtype=float)
    rho = u[..., 0]
    v1 = u[..., 1] / rho
    p = pressure(u, gamma)
    f = np.empty_like(u)
    f[..., 0] = u[..., 1]
    f[..., 1] = u[..., 1] * v1 + p
    f[..., 2] = v1 * (u[..., 2] + p)
    return f


class EulerModel:
    """Balance-law interface of the homogeneous Euler system."""

    state_size = 3
    has_production = False
    has_entropy = False

    def __init__(self, gamma: float = GAMMA_MONATOMIC):
        self.gamma = gamma

    def flux(self, u):
        return euler_flux(u, self.gamma)

    def production(self, u):
        return np.zeros_like(np.asarray(u, dtype=float))

    def validity_mask(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(invalid="ignore", divide="ignore"):
            return (u[..., 0] > 0.0) & (pressure(u, self.gamma) > 0.0) & np.all(
                np.isfinite(u), axis=-1
            )

    def check_valid(self, u, time=None):
        ok = self.validity_mask(u)
        if np.all(ok):
            return
        bad = int(np.argmin(ok.reshape(-1)))
        raise InvalidState("negative density or pressure", cell=bad, time=time)

    def profiles(self, u) -> dict[str, np.ndarray]:
        u = np.asarray(u, dtype=float)
        return {"rho": u[..., 0], "M1": u[..., 1], "E": u[..., 2]}


# ---------------------------------------------------------------------------
# Exact Riemann solution
# ---------------------------------------------------------------------------


def _pressure_function(p, rho_k, p_k, a_k, gamma):
    """Velocity jump contribution of the wave on one side, and its sign structure."""
    if p > p_k:  # shock
        a_coef = 2.0 / ((gamma + 1.0) * rho_k)
        b_coef = (gamma - 1.0) / (gamma + 1.0) * p_k
        return (p - p_k) * np.sqrt(a_coef / (p + b_coef))
    # rarefaction
    return 2.0 * a_k / (gamma - 1.0) * ((p / p_k) ** ((gamma - 1.0) / (2.0 * gamma)) - 1.0)


def _star_pressure(left: EulerState, right: EulerState, gamma: float) -> tuple[float, float]:
    rho_l, v_l, p_l = left.rho, left.M1 / left.rho, left.pressure(gamma)
    rho_r, v_r, p_r = right.rho, right.M1 / right.rho, right.pressure(gamma)
    if min(rho_l, rho_r) <= 0 or min(p_l, p_r) <= 0:
        raise InvalidState("riemann data requires positive density and pressure")
    a_l = np.sqrt(gamma * p_l / rho_l)
    a_r = np.sqrt(gamma * p_r / rho_r)
    if 2.0 * (a_l + a_r) / (gamma - 1.0) <= v_r - v_l:
        raise VacuumError("initial states open a vacuum region")

    def depth(pv):
        p = pv[0]
        return np.array([
            _pressure_function(p, rho_l, p_l, a_l, gamma)
            + _pressure_function(p, rho_r, p_r, a_r, gamma)
            + (v_r - v_l)
        ])

    # two-rarefaction guess is robust across large pressure ratios
    expo = (gamma - 1.0) / (2.0 * gamma)
    p_tr = ((a_l + a_r - 0.5 * (gamma - 1.0) * (v_r - v_l))
            / (a_l / p_l ** expo + a_r / p_r ** expo)) ** (1.0 / expo)
    guess = max(p_tr, 1e-10 * min(p_l, p_r))
    p_star = float(newton_solve(depth, np.array([guess]),
                                SolverConfig(tol_residual=1e-14, max_iter=100))[0])
    v_star = 0.5 * (v_l + v_r) + 0.5 * (
        _pressure_function(p_star, rho_r, p_r, a_r, gamma)
        - _pressure_function(p_star, rho_l, p_l, a_l, gamma)
    )
    return p_star, v_star


def exact_riemann(left: EulerState, right: EulerState, x_over_t,
                  gamma: float = GAMMA_MONATOMIC) -> np.ndarray:
    """Self-similar exact solution sampled at speeds x/t.

    `x_over_t` may be a scalar or an array; the result has shape
    x_over_t.shape + (3,) in conserved variables.
    """
    xi = np.asarray(x_over_t, dtype=float)
    scalar_input = xi.ndim == 0
    xi = np.atleast_1d(xi)

    rho_l, v_l, p_l = left.rho, left.M1 / left.rho, left.pressure(gamma)
    rho_r, v_r, p_r = right.rho, right.M1 / right.rho, right.pressure(gamma)
    a_l = np.sqrt(gamma * p_l / rho_l)
    a_r = np.sqrt(gamma * p_r / rho_r)
    p_star, v_star = _star_pressure(left, right, gamma)

    gm = gamma - 1.0
    gp = gamma + 1.0

    rho = np.empty_like(xi)
    v = np.empty_like(xi)
    p = np.empty_like(xi)

    left_side = xi <= v_star
    # -- left wave ----------------------------------------------------------
    if p_star > p_l:  # left shock
        s_l = v_l - a_l * np.sqrt(gp / (2.0 * gamma) * p_star / p_l + gm / (2.0 * gamma))
        rho_star_l = rho_l * ((p_star / p_l + gm / gp) / (gm / gp * p_star / p_l + 1.0))
        pre = left_side & (xi < s_l)
        post = left_side & ~pre
        rho[pre], v[pre], p[pre] = rho_l, v_l, p_l
        rho[post], v[post], p[post] = rho_star_l, v_star, p_star
    else:  # left rarefaction
        a_star_l = a_l * (p_star / p_l) ** (gm / (2.0 * gamma))
        head = v_l - a_l
        tail = v_star - a_star_l
        pre = left_side & (xi < head)
        fan = left_side & (xi >= head) & (xi <= tail)
        post = left_side & (xi > tail)
        rho[pre], v[pre], p[pre] = rho_l, v_l, p_l
        a_fan = 2.0 / gp * (a_l + 0.5 * gm * (v_l - xi[fan]))
        v[fan] = 2.0 / gp * (a_l + 0.5 * gm * v_l + xi[fan])
        rho[fan] = rho_l * (a_fan / a_l) ** (2.0 / gm)
        p[fan] = p_l * (a_fan / a_l) ** (2.0 * gamma / gm)
        rho[post] = rho_l * (p_star / p_l) ** (1.0 / gamma)
        v[post], p[post] = v_star, p_star

    right_side = ~left_side
    # -- right wave -----------------------------------------------------------
    if p_star > p_r:  # right shock
        s_r = v_r + a_r * np.sqrt(gp / (2.0 * gamma) * p_star / p_r + gm / (2.0 * gamma))
        rho_star_r = rho_r * ((p_star / p_r + gm / gp) / (gm / gp * p_star / p_r + 1.0))
        post = right_side & (xi > s_r)
        star = right_side & ~post
        rho[post], v[post], p[post] = rho_r, v_r, p_r
        rho[star], v[star], p[star] = rho_star_r, v_star, p_star
    else:  # right rarefaction
        a_star_r = a_r * (p_star / p_r) ** (gm / (2.0 * gamma))
        head = v_r + a_r
        tail = v_star + a_star_r
        post = right_side & (xi > head)
        fan = right_side & (xi <= head) & (xi >= tail)
        star = right_side & (xi < tail)
        rho[post], v[post], p[post] = rho_r, v_r, p_r
        a_fan = 2.0 / gp * (a_r - 0.5 * gm * (v_r - xi[fan]))
        v[fan] = 2.0 / gp * (-a_r + 0.5 * gm * v_r + xi[fan])
        rho[fan] = rho_r * (a_fan / a_r) ** (2.0 / gm)
        p[fan] = p_r * (a_fan / a_r) ** (2.0 * gamma / gm)
        rho[star] = rho_r * (p_star / p_r) ** (1.0 / gamma)
        v[star], p[star] = v_star, p_star

    out = np.empty(xi.shape + (3,))
    out[..., 0] = rho
    out[..., 1] = rho * v
    out[..., 2] = p / gm + 0.5 * rho * v * v
    return out[0] if scalar_input else out

"""Reduced one-dimensional 13-moment shock-tube model.

State content
-------------
The tube problem is radially symmetric: the second-moment tensor is
diag(pi11, pi22, pi22) and the skewed third moment reduces to the single
component q1. With particle mass and the Boltzmann constant scaled to one,
the five simulation variables are

    u1 = rho
    u2 = M1
    u3 = rho*v1^2/2 + rho*(pi11 + 2*pi22)/2     (mechanical energy density)
    u4 = rho*pi22/2
    u5 = q1

All functions in this module take arrays whose last axis holds the five
components, so they work unchanged on single states (shape (5,)) and on whole
grids (shape (n, 5)).

Units
-----
Dimensionless code units: m = 1, k_B = 1, and the constant inside the entropy
logarithm normalized to 1 (adjustable through ModelParams.entropy_log_norm for
sensitivity studies; additive entropy constants are not harmless discretely
because the slope limiters are nonlinear). The relaxation time is the
rarefaction parameter epsilon.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidState

__all__ = [
    "ModelParams",
    "PhysicalState",
    "Moment13Model",
    "to_conserved",
    "to_physical",
    "phi",
    "d11",
    "flux",
    "production",
    "entropy_flux_potential",
    "remainder_coefficients",
    "entropy_density",
    "entropy_flux",
    "entropy_production",
    "validity_mask",
]

# Realizability margin: states closer than this to the positivity boundary are
# rejected so the implicit solves never evaluate at a singular point.
VALIDITY_FLOOR = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless model constants.

    F, b    : closure constants of the moment hierarchy
    dbar    : isotropic two-particle interaction scalar
    epsilon : relaxation parameter (Knudsen number); plays the role of tau
    """

    F: float = 5.0 / 3.0
    b: float = 0.05
    dbar: float = 4.0 / 3.0
    epsilon: float = 1e-4
    entropy_log_norm: float = 1.0

    def __post_init__(self):
        if min(self.F, self.b, self.dbar, self.epsilon, self.entropy_log_norm) <= 0:
            raise ValueError("model constants must all be positive")


@dataclass(frozen=True)
class PhysicalState:
    """Physical fields at a point: density, momentum, stress diagonal, heat-flux moment."""

    rho: float
    M1: float
    pi11: float
    pi22: float
    q1: float

    @property
    def v1(self) -> float:
        return self.M1 / self.rho

    def as_array(self) -> np.ndarray:
        return np.array([self.rho, self.M1, self.pi11, self.pi22, self.q1])


def _split(u: np.ndarray):
    return u[..., 0], u[..., 1], u[..., 2], u[..., 3], u[..., 4]


def _physical_fields(u: np.ndarray):
    """(rho, v1, pi11, pi22, q1) from conserved variables, no validity checks."""
    u1, u2, u3, u4, u5 = _split(u)
    v1 = u2 / u1
    pi11 = (-u2 * u2 + 2.0 * u1 * u3 - 4.0 * u1 * u4) / (u1 * u1)
    pi22 = 2.0 * u4 / u1
    return u1, v1, pi11, pi22, u5


def to_conserved(w) -> np.ndarray:
    """Map physical fields to simulation variables.

    `w` is a PhysicalState or an array (..., 5) ordered (rho, M1, pi11, pi22, q1).
    """
    if isinstance(w, PhysicalState):
        w = w.as_array()
    w = np.asarray(w, dtype=float)
    rho, M1, pi11, pi22, q1 = _split(w)
    if np.any(rho <= 0) or np.any(pi11 <= 0) or np.any(pi22 <= 0):
        raise InvalidState("physical state requires rho, pi11, pi22 > 0")
    v1 = M1 / rho
    u = np.empty_like(w)
    u[..., 0] = rho
    u[..., 1] = M1
    u[..., 2] = 0.5 * rho * v1 * v1 + 0.5 * rho * (pi11 + 2.0 * pi22)
    u[..., 3] = 0.5 * rho * pi22
    u[..., 4] = q1
    return u


def to_physical(u) -> np.ndarray:
    """Inverse of to_conserved; returns (..., 5) ordered (rho, M1, pi11, pi22, q1)."""
    u = np.asarray(u, dtype=float)
    check_valid(u)
    rho, v1, pi11, pi22, q1 = _physical_fields(u)
    w = np.empty_like(u)
    w[..., 0] = rho
    w[..., 1] = u[..., 1]
    w[..., 2] = pi11
    w[..., 3] = pi22
    w[..., 4] = q1
    return w


def validity_mask(u: np.ndarray) -> np.ndarray:
    """True where the conserved state is realizable with margin.

    Requires rho > 0, pi11/pi22 above the validity floor, and 1 + 2*phi*b > 0
    evaluated lazily by callers that know b; the phi condition is implied by
    pi11 > 0 since phi = q1^2/pi11 >= 0 there.
    """
    u = np.asarray(u, dtype=float)
    u1, _, pi11, pi22, _ = _physical_fields(u)
    with np.errstate(invalid="ignore", divide="ignore"):
        ok = (
            (u1 > 0.0)
            & (pi11 > VALIDITY_FLOOR)
            & (pi22 > VALIDITY_FLOOR)
            & np.all(np.isfinite(u), axis=-1)
        )
    return ok


def check_valid(u: np.ndarray, time: float | None = None) -> None:
    """Raise InvalidState naming the first offending cell."""
    ok = validity_mask(u)
    if np.all(ok):
        return
    bad = int(np.argmin(ok.reshape(-1)))
    raise InvalidState("unrealizable moment state", cell=bad, time=time)


def phi(u: np.ndarray) -> np.ndarray:
    """Skewness scalar q . pi^{-1} . q, reduced to q1^2 / pi11."""
    u = np.asarray(u, dtype=float)
    _, _, pi11, _, q1 = _physical_fields(u)
    return q1 * q1 / pi11


def d11(u: np.ndarray, p: ModelParams) -> np.ndarray:
    """11-component of the relaxation tensor: dbar + 1 - tr(pi) / (3 pi11)."""
    u = np.asarray(u, dtype=float)
    _, _, pi11, pi22, _ = _physical_fields(u)
    return p.dbar + 1.0 - (pi11 + 2.0 * pi22) / (3.0 * pi11)


def _skew_factor(pi11, q1, p: ModelParams):
    """2b / (1 + 2 phi b), the recurring closure factor."""
    ph = q1 * q1 / pi11
    return 2.0 * p.b / (1.0 + 2.0 * ph * p.b)


def flux(u: np.ndarray, p: ModelParams) -> np.ndarray:
    """Flux vector of the reduced system."""
    u = np.asarray(u, dtype=float)
    rho, v1, pi11, pi22, q1 = _physical_fields(u)
    sk = _skew_factor(pi11, q1, p)
    f = np.empty_like(u)
    f[..., 0] = u[..., 1]
    f[..., 1] = v1 * u[..., 1] + rho * pi11
    f[..., 2] = (
        0.5 * rho * v1 ** 3
        + 0.5 * rho * v1 * (3.0 * pi11 + 2.0 * pi22)
        + p.F * sk * rho * (pi11 + 2.0 * pi22) * q1
    )
    f[..., 3] = 0.5 * rho * pi22 * v1
    f[..., 4] = v1 * q1 + p.F * (pi11 + 2.0 * pi22)
    return f


def production(u: np.ndarray, p: ModelParams) -> np.ndarray:
    """Relaxation production vector (includes the 1/epsilon factor)."""
    u = np.asarray(u, dtype=float)
    rho, _, pi11, pi22, q1 = _physical_fields(u)
    g = np.zeros_like(u)
    g[..., 3] = -rho * (pi22 - pi11) / (6.0 * p.epsilon)
    g[..., 4] = -(p.dbar + 1.0 - (pi11 + 2.0 * pi22) / (3.0 * pi11)) * q1 / (2.0 * p.epsilon)
    return g


def entropy_flux_potential(u: np.ndarray, p: ModelParams) -> np.ndarray:
    """The quantity whose x-derivative is the non-convective entropy flux term.

    P = F * (2b / (1 + 2 phi b)) * rho * q1; the per-cell unknown of the
    entropic closure approximates dP/dx.
    """
    u = np.asarray(u, dtype=float)
    rho, _, pi11, _, q1 = _physical_fields(u)
    return p.F * _skew_factor(pi11, q1, p) * rho * q1


def remainder_coefficients(u: np.ndarray):
    """Coefficients (c4, c5) of the non-divergence terms h4 = c4*Js, h5 = c5*Js."""
    u = np.asarray(u, dtype=float)
    rho, _, _, pi22, q1 = _physical_fields(u)
    return -pi22, -q1 / rho


def entropy_density(u: np.ndarray, p: ModelParams) -> np.ndarray:
    """Entropy density s = rho * (ln(norm * det(pi) / rho^2)/2 + 5/2 - b*phi)."""
    u = np.asarray(u, dtype=float)
    rho, _, pi11, pi22, q1 = _physical_fields(u)
    det_pi = pi11 * pi22 * pi22
    ph = q1 * q1 / pi11
    return rho * (0.5 * np.log(p.entropy_log_norm * det_pi / (rho * rho)) + 2.5 - p.b * ph)


def entropy_flux(u: np.ndarray, p: ModelParams) -> np.ndarray:
    """Convective entropy flux v1 * s."""
    u = np.asarray(u, dtype=float)
    return (u[..., 1] / u[..., 0]) * entropy_density(u, p)


def entropy_production(u: np.ndarray, p: ModelParams) -> np.ndarray:
    """Entropy production rate; nonnegative on realizable states.

    The anisotropy bracket (pi11 + 2 pi22)(1/pi11 + 2/pi22) - 9 is evaluated
    in its equivalent square form 2 (pi11 - pi22)^2 / (pi11 pi22), which
    floating point keeps nonnegative even when 1/epsilon amplifies roundoff
    near equilibrium.
    """
    u = np.asarray(u, dtype=float)
    rho, _, pi11, pi22, q1 = _physical_fields(u)
    aniso = pi11 - pi22
    return (
        rho * aniso * aniso / (3.0 * p.epsilon * pi11 * pi22)
        + (rho * p.b / p.epsilon) * q1 * q1 * p.dbar / pi11
    )


class Moment13Model:
    """Balance-law interface of the reduced 13-moment system for the scheme."""

    state_size = 5
    has_production = True
    has_entropy = True

    def __init__(self, params: ModelParams | None = None):
        self.params = params or ModelParams()

    # -- balance-law contract -------------------------------------------------

    def flux(self, u):
        return flux(u, self.params)

    def production(self, u):
        return production(u, self.params)

    def validity_mask(self, u):
        return validity_mask(u)

    def check_valid(self, u, time=None):
        check_valid(u, time=time)

    # -- entropy family -------------------------------------------------------

    def entropy_density(self, u):
        return entropy_density(u, self.params)

    def entropy_flux(self, u):
        return entropy_flux(u, self.params)

    def entropy_production(self, u):
        return entropy_production(u, self.params)

    def entropy_flux_potential(self, u):
        return entropy_flux_potential(u, self.params)

    def remainder_coefficients(self, u):
        return remainder_coefficients(u)

    # -- conversions and diagnostics -------------------------------------------

    def to_conserved(self, w):
        return to_conserved(w)

    def to_physical(self, u):
        return to_physical(u)

    def phi(self, u):
        return phi(u)

    def d11(self, u):
        return d11(u, self.params)

    def profiles(self, u) -> dict[str, np.ndarray]:
        """Named physical profiles for diagnostics (TV, extrema counts)."""
        rho, v1, pi11, pi22, q1 = _physical_fields(np.asarray(u, dtype=float))
        return {
            "rho": rho,
            "M1": np.asarray(u)[..., 1],
            "pi11": pi11,
            "pi22": pi22,
            "q1": q1,
        }

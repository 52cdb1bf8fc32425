"""Damped Newton root finder with finite-difference Jacobian and bisection fallback.

Used by every implicit stage of the scheme. Systems are tiny (n <= 6), so the
linear solve is a dense partial-pivot factorization and the Jacobian is built
column by column from forward differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import EvaluationError, InvalidState, NoBracket, SolverDivergence

__all__ = ["SolverConfig", "fd_jacobian", "newton_solve", "bisect_scalar"]


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and budgets for the implicit stage solves."""

    tol_residual: float = 1e-12   # accept when |R|_inf falls below this
    max_iter: int = 50
    fd_rel: float = 1e-7          # relative forward-difference step
    fd_floor: float = 1e-9        # absolute floor on the step
    max_halvings: int = 8

    def __post_init__(self):
        if min(self.tol_residual, self.max_iter, self.fd_rel, self.fd_floor, self.max_halvings) <= 0:
            raise ValueError("all solver configuration entries must be positive")


DEFAULT_SOLVER = SolverConfig()


def _try_residual(residual: Callable, x: np.ndarray) -> np.ndarray | None:
    """Evaluate `residual`, mapping raised errors and non-finite output to None.

    InvalidState raised by model code during a trial evaluation is treated like
    any other failed trial so the damping loop can backtrack.
    """
    try:
        r = np.asarray(residual(x), dtype=float)
    except (ArithmeticError, ValueError, InvalidState):
        return None
    if not np.all(np.isfinite(r)):
        return None
    return r


def fd_jacobian(residual: Callable, x, cfg: SolverConfig = DEFAULT_SOLVER) -> np.ndarray:
    """Forward-difference Jacobian of an n-vector residual at x.

    Column k is (R(x + h_k e_k) - R(x)) / h_k with h_k = max(fd_rel*|x_k|, fd_floor).
    """
    x = np.asarray(x, dtype=float)
    r0 = _try_residual(residual, x)
    if r0 is None:
        raise EvaluationError("residual not evaluable at the base point")
    n = x.size
    jac = np.empty((r0.size, n))
    for k in range(n):
        h = max(cfg.fd_rel * abs(x[k]), cfg.fd_floor)
        xp = x.copy()
        xp[k] += h
        rk = _try_residual(residual, xp)
        if rk is None:
            # retry backward before giving up on the column
            xp[k] = x[k] - h
            rk = _try_residual(residual, xp)
            if rk is None:
                raise EvaluationError("residual not evaluable at perturbed point", column=k)
            jac[:, k] = (r0 - rk) / h
        else:
            jac[:, k] = (rk - r0) / h
    return jac


def newton_solve(
    residual: Callable,
    x0,
    cfg: SolverConfig = DEFAULT_SOLVER,
) -> np.ndarray:
    """Solve residual(x) = 0 by damped Newton iteration.

    A step is accepted only if it strictly decreases |R|_inf; otherwise it is
    halved (up to cfg.max_halvings). Trial points where the residual raises or
    returns non-finite values count as failed trials.

    Raises SolverDivergence with the best iterate attached when the budget runs
    out.
    """
    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
    r = _try_residual(residual, x)
    if r is None:
        raise EvaluationError("residual not evaluable at the initial guess")
    rnorm = float(np.max(np.abs(r)))
    for _ in range(cfg.max_iter):
        if rnorm <= cfg.tol_residual:
            return x
        jac = fd_jacobian(residual, x, cfg)
        try:
            delta = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            raise SolverDivergence("singular jacobian", best=x, residual_norm=rnorm)
        scale = 1.0
        for _ in range(cfg.max_halvings + 1):
            xc = x + scale * delta
            rc = _try_residual(residual, xc)
            if rc is not None:
                rcnorm = float(np.max(np.abs(rc)))
                if rcnorm < rnorm or rcnorm <= cfg.tol_residual:
                    x, r, rnorm = xc, rc, rcnorm
                    break
            scale *= 0.5
        else:
            raise SolverDivergence(
                "no descent after step halvings", best=x, residual_norm=rnorm
            )
    if rnorm <= cfg.tol_residual:
        return x
    raise SolverDivergence("iteration budget exhausted", best=x, residual_norm=rnorm)


def bisect_scalar(
    residual: Callable[[float], float],
    bracket: tuple[float, float],
    cfg: SolverConfig = DEFAULT_SOLVER,
) -> float:
    """Bisection for a scalar root inside a sign-changing bracket.

    Stops when the interval shrinks below 1e-13 * max(1, |root|) or the
    midpoint residual hits zero exactly.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    flo = float(residual(lo))
    fhi = float(residual(hi))
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise NoBracket(f"no sign change on [{lo:g}, {hi:g}]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if abs(hi - lo) <= 1e-13 * max(1.0, abs(mid)):
            return mid
        fmid = float(residual(mid))
        if fmid == 0.0:
            return mid
        if flo * fmid < 0.0:
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)

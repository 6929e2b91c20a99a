"""Invariant holonomies of fiber bunched cocycles.

The stable holonomy from y to z (z in the stable set of y) is
H_{yz} = lim_n A^n(z)^(-1) A^n(y); the unstable one mirrors it under time
reversal.  Both are computed two ways:

* iteratively, with an a-posteriori geometric tail bound driven by a bunching
  certificate (the increment ratio is e^(theta_hat - rate) < 1), refusing
  non-bunched cocycles outright;
* exactly, using that a window generator sees identical factors once the orbit
  has pushed the disagreement window past its radius, so the limit stabilizes
  at a computable finite depth.

The Hoelder certificate C4 is assembled from exact cylinder suprema: with
b_n = sup|A^n| * sup|(A^n)^-1| (submultiplicative), K = sup|A^-1| * C2 and
q = b_H e^(-rate*H) < 1, every increment is bounded by b_n K e^(-rate n) d(y,z)
and summing head plus geometric tail gives

    |H_{yz} - Id| <= C4 d(y, z),   C4 = K * (sum_{n<H} b_n e^(-rate n)) / (1 - q).

The same constant serves both time directions, since sup|A^-n| over cylinders
equals sup|(A^n)^-1|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from cocycle_rigidity.cocycles import operator_norm
from cocycle_rigidity.symbolic import agreement_range


class NotBunchedError(ValueError):
    """Holonomy requested for a cocycle without a bunching certificate."""


class ConvergenceError(RuntimeError):
    """An iterative limit failed to settle within its cap."""


@dataclass(frozen=True)
class HolonomyResult:
    matrix: np.ndarray
    depth: int
    tail_bound: float
    side: str


@dataclass(frozen=True)
class HolonomyConstants:
    c4: float
    theta: float
    lam: float  # contraction rate of the underlying dynamics

    def __post_init__(self):
        if not self.theta < self.lam:
            raise NotBunchedError(
                f"theta = {self.theta:.6g} must be below the rate {self.lam:.6g}"
            )


def holonomy_constants(c, report):
    """Certified Hoelder constant for |H - Id| <= C4 d(y, z).

    Uses the report's exact per-level suprema; requires the geometric tail
    factor q = b_H e^(-rate H) below 1, otherwise the cocycle is not certified
    bunched at this horizon.
    """
    rate = c.space.rate
    if report.rate != rate:
        raise ValueError("bunching report was computed for a different dynamics rate")
    bounds = [1.0] + [row.sup_norm * row.sup_inverse for row in report.per_n]
    h = report.horizon
    q = bounds[h] * math.exp(-rate * h)
    if not q < 1.0:
        raise NotBunchedError(
            f"tail factor q = {q:.4g} >= 1 at horizon {h}; cannot certify C4"
        )
    head = sum(bounds[n] * math.exp(-rate * n) for n in range(h))
    k_const = report.per_n[0].sup_inverse * c.lipschitz_constant()
    return HolonomyConstants(c4=k_const * head / (1.0 - q), theta=report.theta_hat, lam=rate)


def _require_bunched(report):
    if report is None:
        raise NotBunchedError("holonomy needs a bunching certificate (report=None)")
    if not report.bunched:
        raise NotBunchedError(
            f"cocycle not certified bunched: theta_hat = {report.theta_hat:.6g} "
            f">= rate {report.rate:.6g}"
        )


def _push_count(index, step):
    return max(0, -(-max(index, 0) // step))


_FP_FLOOR = 1e-13


def stable_holonomy(c, y, z, tol=1e-10, report=None, max_depth=10_000):
    """Iterative H^s_{yz} with certified stopping.

    Both points are pushed forward until they agree on coordinates >= 0
    (the proof's reduction into the epsilon-stable set), the limit loop runs
    there, and the equivariance relation is composed back.
    """
    ag = agreement_range(y, z)
    if not ag.stable:
        raise ValueError("z is not in the stable set of y")
    _require_bunched(report)
    space = c.space
    ratio = min(math.exp(report.theta_hat - space.rate), 1.0 - 1e-9)
    t = _push_count(ag.s_index, space.step)
    y1 = space.shift(y, t)
    z1 = space.shift(z, t)
    prod_y = np.eye(c.dim)
    prod_z = np.eye(c.dim)
    h = np.eye(c.dim)
    depth = 0
    increment = 0.0
    for n in range(max_depth):
        fy = c.evaluate(space.shift(y1, n))
        fz = c.evaluate(space.shift(z1, n))
        prod_y = fy @ prod_y
        prod_z = fz @ prod_z
        h_next = np.linalg.solve(prod_z, prod_y)
        increment = operator_norm(h_next - h)
        h = h_next
        depth = n + 1
        if increment < tol * (1.0 - ratio):
            break
    else:
        raise ConvergenceError(f"stable holonomy did not settle within {max_depth} steps")
    tail = increment / (1.0 - ratio)
    if t:
        ay = c.iterate(y, t)
        az = c.iterate(z, t)
        az_inv = np.linalg.inv(az)
        h = az_inv @ h @ ay
        tail *= operator_norm(az_inv) * operator_norm(ay)
    tail += _FP_FLOOR * max(1.0, operator_norm(h))
    return HolonomyResult(matrix=h, depth=t + depth, tail_bound=tail, side="stable")


def unstable_holonomy(c, y, z, tol=1e-10, report=None, max_depth=10_000):
    """Iterative H^u_{yz} = lim A^(-n)(z)^(-1) A^(-n)(y); time mirror of the stable side."""
    ag = agreement_range(y, z)
    if not ag.unstable:
        raise ValueError("z is not in the unstable set of y")
    _require_bunched(report)
    space = c.space
    ratio = min(math.exp(report.theta_hat - space.rate), 1.0 - 1e-9)
    t = _push_count(-ag.u_index, space.step)
    y1 = space.shift(y, -t)
    z1 = space.shift(z, -t)
    # A^(-n)(x) = A^n(f^(-n) x)^(-1): accumulate P(n) = A^n(f^(-n) x) by
    # appending factors on the right, so M_n = P_z(n) P_y(n)^(-1).
    prod_y = np.eye(c.dim)
    prod_z = np.eye(c.dim)
    h = np.eye(c.dim)
    depth = 0
    increment = 0.0
    for n in range(1, max_depth + 1):
        fy = c.evaluate(space.shift(y1, -n))
        fz = c.evaluate(space.shift(z1, -n))
        prod_y = prod_y @ fy
        prod_z = prod_z @ fz
        h_next = np.linalg.solve(prod_y.T, prod_z.T).T
        increment = operator_norm(h_next - h)
        h = h_next
        depth = n
        if increment < tol * (1.0 - ratio):
            break
    else:
        raise ConvergenceError(f"unstable holonomy did not settle within {max_depth} steps")
    tail = increment / (1.0 - ratio)
    if t:
        ay = c.iterate(y1, t)  # A^t(f^(-t) y)
        az = c.iterate(z1, t)
        h = az @ h @ np.linalg.inv(ay)
        tail *= operator_norm(az) * operator_norm(np.linalg.inv(ay))
    tail += _FP_FLOOR * max(1.0, operator_norm(h))
    return HolonomyResult(matrix=h, depth=t + depth, tail_bound=tail, side="unstable")


def stable_holonomy_exact(c, y, z):
    """Exact H^s_{yz} for window generators.

    With agreement index N and window radius m the factors coincide from
    dynamics-step ceil((N + m)/step) on, so the limit equals the finite product
    A^D(z)^(-1) A^D(y) there.
    """
    ag = agreement_range(y, z)
    if not ag.stable:
        raise ValueError("z is not in the stable set of y")
    if ag.everywhere:
        return np.eye(c.dim)
    space = c.space
    d_steps = _push_count(int(ag.s_index) + c.radius, space.step)
    if d_steps == 0:
        return np.eye(c.dim)
    return np.linalg.solve(c.iterate(z, d_steps), c.iterate(y, d_steps))


def unstable_holonomy_exact(c, y, z):
    """Exact H^u_{yz}; factors coincide once -j*step + m <= u_index."""
    ag = agreement_range(y, z)
    if not ag.unstable:
        raise ValueError("z is not in the unstable set of y")
    if ag.everywhere:
        return np.eye(c.dim)
    space = c.space
    d_steps = _push_count(c.radius - int(ag.u_index), space.step)
    if d_steps == 0:
        return np.eye(c.dim)
    py = c.iterate(y, -d_steps)
    pz = c.iterate(z, -d_steps)
    return np.linalg.solve(pz, py)


class IdentityResiduals(NamedTuple):
    composition: float
    equivariance: float
    holder_lhs: float
    holder_rhs: float


def holonomy_identity_residuals(c, x, y, z, report=None, constants=None):
    """Residuals of the holonomy laws on a stable triple.

    composition: |H_{yz} - H_{xz} H_{yx}|; equivariance:
    |H_{f(y)f(z)} - A(z) H_{yz} A(y)^(-1)|; holder: the pair
    (|H_{yz} - Id|, C4 * d(y, z)), whose first entry must not exceed the
    second when y, z agree on coordinates >= 0.
    """
    for a, b in ((x, y), (x, z), (y, z)):
        if not agreement_range(a, b).stable:
            raise ValueError("x, y, z must lie in one stable class")
    space = c.space
    h_yz = stable_holonomy_exact(c, y, z)
    h_xz = stable_holonomy_exact(c, x, z)
    h_yx = stable_holonomy_exact(c, y, x)
    composition = operator_norm(h_yz - h_xz @ h_yx)
    h_fyfz = stable_holonomy_exact(c, space.shift(y, 1), space.shift(z, 1))
    equivariance = operator_norm(
        h_fyfz - c.evaluate(z) @ h_yz @ np.linalg.inv(c.evaluate(y))
    )
    if constants is None:
        if report is None:
            raise ValueError("need a bunching report or precomputed constants for the holder bound")
        constants = holonomy_constants(c, report)
    holder_lhs = operator_norm(h_yz - np.eye(c.dim))
    holder_rhs = constants.c4 * space.metric(y, z)
    return IdentityResiduals(composition, equivariance, holder_lhs, holder_rhs)

"""Equilibrium structure of linear Coulomb crystals in a harmonic well.

The N-ion axial equilibrium minimizes

    sum_i (1/2) m w_z^2 z_i^2 + sum_{i<j} q^2 / (4 pi eps0 |z_i - z_j|).

In units of the characteristic length s = (q^2 / (4 pi eps0 m w_z^2))^(1/3)
the force balance is dimensionless and solved once by Newton iteration.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import EPSILON_0, ConvergenceError, ValidationError

MAX_IONS = 50


@dataclass(frozen=True)
class CrystalResult:
    positions: np.ndarray    # axial coordinates in m, sorted ascending
    length_scale: float      # s, m
    converged: bool


def characteristic_length(species, omega_z):
    """Characteristic ion-ion spacing scale s = (q^2/(4 pi eps0 m w_z^2))^(1/3)."""
    if not omega_z > 0:
        raise ValidationError(f"omega_z must be positive, got {omega_z}")
    return (species.charge ** 2
            / (4.0 * math.pi * EPSILON_0 * species.mass * omega_z ** 2)) ** (1.0 / 3.0)


def _force_residual(u):
    """Dimensionless force balance: u_i - sum_j sign(u_i-u_j)/(u_i-u_j)^2."""
    n = u.size
    f = u.copy()
    for i in range(n):
        d = u[i] - u
        d[i] = np.inf
        f[i] -= np.sum(np.sign(d) / d ** 2)
    return f


def _force_jacobian(u):
    n = u.size
    jac = np.eye(n)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            d = u[i] - u[j]
            jac[i, i] += 2.0 / abs(d) ** 3
            jac[i, j] -= 2.0 / abs(d) ** 3
    return jac


def dimensionless_positions(n, tol=1e-12, max_iter=200):
    """Equilibrium positions in units of s, solved by Newton iteration."""
    if not 1 <= n <= MAX_IONS:
        raise ValidationError(f"ion count must be in 1..{MAX_IONS}, got {n}")
    if n == 1:
        return np.zeros(1), True
    u = 1.08 * (np.arange(n) - (n - 1) / 2.0)
    for _ in range(max_iter):
        f = _force_residual(u)
        if np.linalg.norm(f) < tol:
            u -= np.mean(u)  # pin the center of mass exactly
            return np.sort(u), True
        step = np.linalg.solve(_force_jacobian(u), -f)
        # keep the ordering: never let neighbours cross in one step
        limit = 0.4 * np.min(np.diff(np.sort(u))) if n > 1 else 1.0
        s = np.max(np.abs(step))
        if s > limit:
            step *= limit / s
        u += step
    raise ConvergenceError(
        f"crystal equilibrium did not converge for n={n} "
        f"(residual {np.linalg.norm(_force_residual(u)):.3e})", last_iterate=u)


def equilibrium_positions(species, omega_z, n):
    """Equilibrium axial positions (m) of an n-ion linear crystal."""
    s = characteristic_length(species, omega_z)
    u, ok = dimensionless_positions(n)
    return CrystalResult(positions=s * u, length_scale=s, converged=ok)

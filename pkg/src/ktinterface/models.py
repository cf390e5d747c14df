"""Flux models: linear advection, Burgers and 2D Euler gas dynamics.

All functions are vectorised over leading axes; the conserved components
live on the last axis.
"""
from __future__ import annotations

import numpy as np

from .core import InadmissibleStateError

DEFAULT_GAMMA = 1.4


class FluxModel:
    n_components = 1
    variables = ("u",)
    ndim = 1

    def flux(self, direction, U):
        raise NotImplementedError

    def max_wavespeed(self, direction, U):
        raise NotImplementedError

    def flux_and_speed(self, direction, U):
        return self.flux(direction, U), self.max_wavespeed(direction, U)

    def normal_momentum_index(self, direction):
        return None

    def check_admissible(self, U, where=None):
        pass


def advection_flux(u):
    return np.asarray(u, dtype=float).copy()


def burgers_flux(u):
    u = np.asarray(u, dtype=float)
    return 0.5 * u * u


class Advection(FluxModel):
    """u_t + u_x = 0."""

    def flux(self, direction, U):
        return advection_flux(U)

    def max_wavespeed(self, direction, U):
        return np.ones(np.shape(U)[:-1])


class Burgers(FluxModel):
    """u_t + (u^2/2)_x = 0."""

    def flux(self, direction, U):
        return burgers_flux(U)

    def max_wavespeed(self, direction, U):
        return np.abs(np.asarray(U)[..., 0])


def euler_energy(rho, u, w, p, gamma=DEFAULT_GAMMA):
    return 0.5 * rho * (u * u + w * w) + p / (gamma - 1.0)


def primitive_to_conserved(rho, u, w, p, gamma=DEFAULT_GAMMA):
    rho, u, w, p = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (rho, u, w, p)))
    return np.stack([rho, rho * u, rho * w, euler_energy(rho, u, w, p, gamma)], axis=-1)


def _first_bad(mask, where):
    idx = tuple(int(i) for i in np.argwhere(mask)[0])
    if where is not None:
        return where(idx)
    return idx


def euler_pressure(U, gamma=DEFAULT_GAMMA, where=None):
    """Pressure from conserved (rho, rho u, rho w, E).

    Raises InadmissibleStateError for rho <= 0 or p < 0.  ``where`` maps an
    array index to a reportable location.
    """
    U = np.asarray(U, dtype=float)
    rho = U[..., 0]
    bad = ~(rho > 0)
    if np.any(bad):
        raise InadmissibleStateError("non-positive density", location=_first_bad(bad, where))
    p = (gamma - 1.0) * (U[..., 3] - 0.5 * (U[..., 1] ** 2 + U[..., 2] ** 2) / rho)
    bad = ~(p >= 0)
    if np.any(bad):
        raise InadmissibleStateError("negative pressure", location=_first_bad(bad, where))
    return p


def euler_flux(direction, U, gamma=DEFAULT_GAMMA, p=None):
    U = np.asarray(U, dtype=float)
    if p is None:
        p = euler_pressure(U, gamma)
    rho, mx, my, E = U[..., 0], U[..., 1], U[..., 2], U[..., 3]
    if direction == 0:
        un = mx / rho
        return np.stack([mx, mx * un + p, my * un, un * (E + p)], axis=-1)
    un = my / rho
    return np.stack([my, mx * un, my * un + p, un * (E + p)], axis=-1)


def euler_max_wavespeed(direction, U, gamma=DEFAULT_GAMMA, p=None):
    U = np.asarray(U, dtype=float)
    if p is None:
        p = euler_pressure(U, gamma)
    rho = U[..., 0]
    un = U[..., 1 + direction] / rho
    return np.abs(un) + np.sqrt(gamma * p / rho)


class Euler2D(FluxModel):
    n_components = 4
    variables = ("rho", "mx", "my", "E")
    ndim = 2

    def __init__(self, gamma=DEFAULT_GAMMA):
        self.gamma = float(gamma)

    def pressure(self, U, where=None):
        return euler_pressure(U, self.gamma, where)

    def flux(self, direction, U):
        return euler_flux(direction, U, self.gamma)

    def max_wavespeed(self, direction, U):
        return euler_max_wavespeed(direction, U, self.gamma)

    def flux_and_speed(self, direction, U):
        p = euler_pressure(U, self.gamma)
        return (euler_flux(direction, U, self.gamma, p),
                euler_max_wavespeed(direction, U, self.gamma, p))

    def normal_momentum_index(self, direction):
        return 1 + direction

    def check_admissible(self, U, where=None):
        euler_pressure(U, self.gamma, where)

    def __repr__(self):
        return f"Euler2D(gamma={self.gamma})"


MODELS = {"advection": Advection, "burgers": Burgers, "euler": Euler2D}

"""Initial data, exact solutions and multi-block setups for the test problems."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .core import HIGH, LOW, Block1D, Block2D, CornerPoint, Domain, EdgeRole, InterfaceLink
from .models import DEFAULT_GAMMA, Advection, Burgers, Euler2D, primitive_to_conserved


class SetupError(ValueError):
    pass


# -- initial data -----------------------------------------------------------

def init_advection_bump(x):
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) < 1.0, (x - 1.0) ** 4 * (x + 1.0) ** 4, 0.0)


ADVECTION_PERIOD = 4.0


def _wrap(x, lower=-2.0, period=ADVECTION_PERIOD):
    return (np.asarray(x, dtype=float) - lower) % period + lower


def exact_advection(x, t):
    return init_advection_bump(_wrap(np.asarray(x) - t))


# (x^2 - 1)^4 = x^8 - 4x^6 + 6x^4 - 4x^2 + 1; antiderivative coefficients
_BUMP_ANTIDERIV = np.polynomial.Polynomial([1, 0, -4, 0, 6, 0, -4, 0, 1]).integ()
_BUMP_MASS = float(_BUMP_ANTIDERIV(1.0) - _BUMP_ANTIDERIV(-1.0))  # 256/315


def _bump_primitive(x):
    """Antiderivative of the periodic bump, continuous on the real line."""
    x = np.asarray(x, dtype=float)
    periods = np.floor((x + 2.0) / ADVECTION_PERIOD)
    y = np.clip(x - periods * ADVECTION_PERIOD, -1.0, 1.0)
    return periods * _BUMP_MASS + _BUMP_ANTIDERIV(y) - _BUMP_ANTIDERIV(-1.0)


def advection_cell_average(x, dx, t=0.0):
    """Exact average of u0(. - t) over [x - dx/2, x + dx/2]."""
    x = np.asarray(x, dtype=float)
    return (_bump_primitive(x + 0.5 * dx - t) - _bump_primitive(x - 0.5 * dx - t)) / dx


def init_burgers_sine(x):
    return 0.5 + np.sin(np.asarray(x, dtype=float))


BURGERS_SHOCK_TIME = 1.0
BURGERS_SHOCK_SPEED = 0.5


def burgers_shock_location(t):
    """Shock position for sine data; born at x = pi + 0.5 when t = 1.

    In the frame moving with the mean 0.5 the data are odd about pi, so the
    shock sits there for all t >= 1.
    """
    if t < BURGERS_SHOCK_TIME:
        raise ValueError("no shock before t = 1")
    return (math.pi + BURGERS_SHOCK_SPEED * t) % (2 * math.pi)


def exact_burgers(x, t, tol=1e-14, max_iter=200):
    """Entropy solution for u0 = 0.5 + sin x by characteristics.

    Solves xi = x' - sin(xi) t in the frame moving with speed 0.5 (where
    u' = sin xi), taking the root on the side of the shock the point lies
    on.  Bisection on a bracket keeps it robust past the shock time.
    """
    x = np.asarray(x, dtype=float)
    xp = (x - 0.5 * t) % (2 * math.pi)
    # g(xi) = xi + t sin(xi) - xp changes sign exactly once on [0, pi] when
    # xp <= pi and on [pi, 2 pi] otherwise; bisection keeps g(lo) <= 0 < g(hi)
    lo = np.where(xp <= math.pi, 0.0, math.pi)
    hi = lo + math.pi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        pos = mid + t * np.sin(mid) - xp > 0
        hi = np.where(pos, mid, hi)
        lo = np.where(pos, lo, mid)
        if np.max(hi - lo) < tol:
            break
    return 0.5 + np.sin(0.5 * (lo + hi))


def burgers_cell_average(x, dx, t, order=8):
    """Exact cell averages of the sine-data solution, split at the shock."""
    x = np.asarray(x, dtype=float)
    nodes, weights = np.polynomial.legendre.leggauss(order)
    a = x - 0.5 * dx
    b = x + 0.5 * dx
    if t >= BURGERS_SHOCK_TIME:
        s = burgers_shock_location(t)
        # shock image nearest each cell, so cells straddling 0 are handled
        s = s + 2 * math.pi * np.round((x - s) / (2 * math.pi))
        cut = np.clip(s, a, b)
    else:
        cut = b
    total = np.zeros_like(x)
    for lo, hi in ((a, cut), (cut, b)):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        for z, w in zip(nodes, weights):
            total += w * half * exact_burgers(mid + half * z, t)
    return total / dx


def init_implosion(x, y, p_outer=1.0, gamma=DEFAULT_GAMMA):
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    inside = np.abs(x) + np.abs(y) < 0.15
    rho = np.where(inside, 0.125, 1.0)
    p = np.where(inside, 0.14, p_outer)
    zero = np.zeros_like(rho)
    return primitive_to_conserved(rho, zero, zero, p, gamma)


def gresho_profile(r):
    """Azimuthal speed and pressure of the Gresho vortex."""
    r = np.asarray(r, dtype=float)
    inner = r < 0.2
    ring = (r >= 0.2) & (r < 0.4)
    u_phi = np.where(inner, 5.0 * r, np.where(ring, 2.0 - 5.0 * r, 0.0))
    log5r = np.log(np.where(ring, 5.0 * r, 1.0))
    p = np.where(inner, 5.0 + 12.5 * r * r,
                 np.where(ring, 9.0 + 12.5 * r * r - 20.0 * r + 4.0 * log5r,
                          3.0 + 4.0 * math.log(2.0)))
    return u_phi, p


def init_gresho(x, y, perturbation_eps=0.0, gamma=DEFAULT_GAMMA, rho=1.0):
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    r = np.hypot(x, y)
    phi = np.arctan2(y, x)
    u_phi, p = gresho_profile(r)
    amp = u_phi * (1.0 + perturbation_eps * np.cos(phi))
    u = -amp * np.sin(phi)
    w = amp * np.cos(phi)
    return primitive_to_conserved(np.full_like(r, rho), u, w, p, gamma)


def azimuthal_velocity(U, x, y):
    """u_phi from conserved Euler fields on a meshgrid (x, y)."""
    r = np.hypot(x, y)
    u = U[..., 1] / U[..., 0]
    w = U[..., 2] / U[..., 0]
    with np.errstate(invalid="ignore", divide="ignore"):
        out = (-y * u + x * w) / r
    return np.where(r > 0, out, 0.0)


# -- grids and block layout ------------------------------------------------

@dataclass(frozen=True)
class Axis:
    """One direction of a tensor grid.

    ``kind='vertex'`` places points at lower + j*dx (periodic domains, the
    upper end is the image of the lower); ``kind='cell'`` places them at
    lower + (j + 1/2)*dx (walls on cell faces).
    """

    lower: float
    upper: float
    n: int
    boundary: str = "periodic"
    kind: str = "vertex"
    interfaces: tuple = ()

    @property
    def dx(self):
        return (self.upper - self.lower) / self.n

    @property
    def points(self):
        offset = 0.5 if self.kind == "cell" else 0.0
        return self.lower + (np.arange(self.n) + offset) * self.dx

    def _grid_index(self, xi):
        offset = 0.5 if self.kind == "cell" else 0.0
        k = (xi - self.lower) / self.dx - offset
        kr = round(k)
        if abs(k - kr) > 1e-9 or not (2 <= kr <= self.n - 3):
            return None
        return int(kr)

    def interface_index(self, xi):
        k = self._grid_index(xi)
        if k is None:
            raise SetupError(
                f"interface at {xi} is not a grid point for n={self.n}; valid n: "
                f"{self.valid_resolutions(xi)}")
        return k

    def valid_resolutions(self, xi, limit=None, count=6):
        """The ``count`` resolutions nearest to ``n`` that put a point at ``xi``."""
        limit = limit or max(4 * self.n, 64)
        ok = [n for n in range(4, limit + 1) if replace(self, n=n)._grid_index(xi) is not None]
        return sorted(sorted(ok, key=lambda n: (abs(n - self.n), n))[:count])

    def segments(self):
        """Inclusive (start, stop) global index ranges, sharing interface points."""
        cuts = sorted(self.interface_index(xi) for xi in self.interfaces)
        bounds = [0] + cuts + [self.n - 1]
        segs = [(bounds[k], bounds[k + 1]) for k in range(len(bounds) - 1)]
        for a, b in segs:
            if b - a + 1 < 3:
                raise SetupError("interfaces too close: a block needs at least 3 cells")
        return segs


def gauss_average(func, centres, dx, order=3):
    """Cell averages of ``func`` by tensor Gauss-Legendre quadrature.

    ``centres`` is a tuple of coordinate arrays (one per axis) and ``dx``
    the matching spacings.
    """
    nodes, weights = np.polynomial.legendre.leggauss(order)
    weights = weights / 2.0
    total = 0.0
    for combo in itertools.product(range(order), repeat=len(centres)):
        coords = [c + 0.5 * h * nodes[k] for c, h, k in zip(centres, dx, combo)]
        w = np.prod([weights[k] for k in combo])
        if len(coords) == 1:
            val = func(coords[0])
        else:
            X, Y = np.meshgrid(coords[0], coords[1], indexing="ij")
            val = func(X, Y)
        total = total + w * np.asarray(val, dtype=float)
    return total


def build_domain(axes, init, quadrature=3):
    """Blocks, links and corners for a tensor grid cut at interface points."""
    segs = [ax.segments() for ax in axes]
    shape = tuple(len(s) for s in segs)
    lattice = np.arange(int(np.prod(shape))).reshape(shape)
    pts = [ax.points for ax in axes]
    blocks = []
    for coord in itertools.product(*(range(k) for k in shape)):
        ranges = [segs[a][coord[a]] for a in range(len(axes))]
        centres = tuple(pts[a][r[0]:r[1] + 1] for a, r in enumerate(ranges))
        if init is None:
            vals = np.zeros(tuple(len(c) for c in centres) + (1,))
        elif quadrature:
            vals = gauss_average(init, centres, [ax.dx for ax in axes], quadrature)
        else:
            vals = init(*centres) if len(axes) == 1 else init(
                *np.meshgrid(*centres, indexing="ij"))
        vals = np.asarray(vals, dtype=float)
        if vals.ndim == len(axes):
            vals = vals[..., None]
        if len(axes) == 1:
            blocks.append(Block1D(float(centres[0][0]), axes[0].dx, vals))
        else:
            blocks.append(Block2D((float(centres[0][0]), float(centres[1][0])),
                                  axes[0].dx, axes[1].dx, vals))
    links = []
    for coord in itertools.product(*(range(k) for k in shape)):
        bid = lattice[coord]
        for a, ax in enumerate(axes):
            k = coord[a]
            for side in (LOW, HIGH):
                at_edge = (k == 0) if side == LOW else (k == shape[a] - 1)
                if at_edge:
                    if ax.boundary == "periodic":
                        other = list(coord)
                        other[a] = shape[a] - 1 if side == LOW else 0
                        partner = int(lattice[tuple(other)])
                        role = EdgeRole.periodic(None if partner == bid else partner)
                    elif ax.boundary == "reflective":
                        role = EdgeRole.reflective()
                    else:
                        raise SetupError(f"unknown boundary {ax.boundary!r}")
                    blocks[bid].set_edge(a, side, role)
                elif side == HIGH:
                    right = list(coord)
                    right[a] += 1
                    rid = int(lattice[tuple(right)])
                    link = InterfaceLink(len(links), int(bid), rid, a, ax.dx, ax.dx)
                    links.append(link)
                    blocks[bid].set_edge(a, HIGH, EdgeRole.interface(link.link_id))
                    blocks[rid].set_edge(a, LOW, EdgeRole.interface(link.link_id))
    corners = []
    if len(axes) == 2 and shape[0] > 1 and shape[1] > 1:
        vol = axes[0].dx * axes[1].dx / 4.0
        for sx in range(1, shape[0]):
            for sy in range(1, shape[1]):
                quad = [(sx - 1, sy - 1), (sx, sy - 1), (sx - 1, sy), (sx, sy)]
                members = []
                for cx, cy in quad:
                    bid = int(lattice[cx, cy])
                    b = blocks[bid]
                    i = b.nx - 1 if cx == sx - 1 else 0
                    j = b.ny - 1 if cy == sy - 1 else 0
                    members.append((bid, (i, j)))
                corners.append(CornerPoint(members, np.full(4, vol)))
        for link in links:
            lb = blocks[link.left_block]
            n_line = lb.ny if link.axis == 0 else lb.nx
            mask = np.ones(n_line, dtype=bool)
            other = 1 - link.axis
            for side, idx in ((LOW, 0), (HIGH, n_line - 1)):
                if lb.edge(other, side).is_interface:
                    mask[idx] = False
            if not mask.all():
                link.merge_mask = mask
    return Domain(blocks, links, corners, lattice.squeeze() if len(axes) == 1 else lattice)


# -- problem registry --------------------------------------------------------

@dataclass
class ProblemSpec:
    name: str
    model: Callable
    bounds: tuple
    boundary: str
    kind: str
    interfaces: tuple
    resolution: int
    theta: float
    t_end: float
    init: Callable
    cfl: float = 0.1
    exact: Optional[Callable] = None
    reference_n: Optional[int] = None
    params: dict = field(default_factory=dict)

    @property
    def ndim(self):
        return len(self.bounds)

    def periods(self):
        """Domain lengths for periodic axes (None for walls)."""
        return tuple((hi - lo) if self.boundary == "periodic" else None
                     for lo, hi in self.bounds)


def _advection_spec():
    return ProblemSpec(
        name="advection", model=Advection, bounds=((-2.0, 2.0),), boundary="periodic",
        kind="vertex", interfaces=((0.5,),), resolution=160, theta=2.0, t_end=20.0,
        init=init_advection_bump, exact=advection_cell_average)


def _burgers_spec():
    return ProblemSpec(
        name="burgers", model=Burgers, bounds=((0.0, 2 * math.pi),), boundary="periodic",
        kind="vertex", interfaces=((1.25 * math.pi,),), resolution=160, theta=2.0,
        t_end=2.0, init=init_burgers_sine, reference_n=20480)


def _implosion_spec():
    return ProblemSpec(
        name="implosion", model=Euler2D, bounds=((0.0, 0.3), (0.0, 0.3)),
        boundary="reflective", kind="cell", interfaces=((0.15,), (0.15,)), resolution=101,
        theta=1.2, t_end=2.5, init=init_implosion, params={"p_outer": 1.0, "gamma": 1.4})


def _gresho_spec():
    return ProblemSpec(
        name="gresho", model=Euler2D, bounds=((-1.0, 1.0), (-1.0, 1.0)), boundary="periodic",
        kind="vertex", interfaces=((0.05,), (0.05,)), resolution=200, theta=1.2, t_end=3.0,
        init=init_gresho, params={"perturbation_eps": 0.0, "gamma": 1.4, "rho": 1.0})


PROBLEMS = {
    "advection": _advection_spec,
    "burgers": _burgers_spec,
    "implosion": _implosion_spec,
    "gresho": _gresho_spec,
}


def get_problem(name, **changes):
    try:
        spec = PROBLEMS[name]()
    except KeyError:
        raise SetupError(f"unknown problem {name!r}; choose from {sorted(PROBLEMS)}") from None
    params = dict(spec.params)
    params.update(changes.pop("params", {}) or {})
    return replace(spec, params=params, **changes)


def make_model(spec):
    if spec.model is Euler2D:
        return Euler2D(spec.params.get("gamma", DEFAULT_GAMMA))
    return spec.model()


def _initial_function(spec):
    params = spec.params
    if spec.name in ("advection", "burgers"):
        return spec.init
    if spec.name == "implosion":
        return lambda x, y: spec.init(x, y, p_outer=params.get("p_outer", 1.0),
                                      gamma=params.get("gamma", DEFAULT_GAMMA))
    if spec.name == "gresho":
        return lambda x, y: spec.init(x, y, perturbation_eps=params.get("perturbation_eps", 0.0),
                                      gamma=params.get("gamma", DEFAULT_GAMMA),
                                      rho=params.get("rho", 1.0))
    return spec.init


def problem_axes(spec, n=None, interfaces=None):
    n = spec.resolution if n is None else n
    if interfaces is None:
        interfaces = spec.interfaces
    interfaces = tuple(tuple(i) for i in interfaces) + ((),) * (spec.ndim - len(interfaces))
    axes = []
    for (lo, hi), ifs in zip(spec.bounds, interfaces):
        for xi in ifs:
            if not lo < xi < hi:
                raise SetupError(f"interface {xi} outside the domain ({lo}, {hi})")
        axes.append(Axis(lo, hi, int(n), spec.boundary, spec.kind, tuple(ifs)))
    return axes


def build_problem(spec, n=None, interfaces=None, quadrature=3):
    """Initialised domain and model; ``interfaces=()`` gives a single block."""
    axes = problem_axes(spec, n, interfaces)
    domain = build_domain(axes, _initial_function(spec), quadrature=quadrature)
    return domain, make_model(spec)

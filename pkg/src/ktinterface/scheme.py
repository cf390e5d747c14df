"""Semi-discrete second-order Kurganov-Tadmor right-hand side on one line.

A line is an array whose axis 0 is the sweep direction; any further
leading axes (the other spatial direction in 2D) are carried along and the
last axis holds the conserved components.
"""
from __future__ import annotations

import numpy as np

from .core import PAD, InadmissibleStateError


def minmod(*args):
    """Minmod of two or more numbers or equally shaped arrays."""
    if len(args) == 1 and np.ndim(args[0]) == 1 and not np.isscalar(args[0]):
        args = tuple(args[0])
    if len(args) < 2:
        raise ValueError("minmod needs at least two arguments")
    arrs = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in args))
    lo = np.minimum.reduce(arrs)
    hi = np.maximum.reduce(arrs)
    out = np.where(lo > 0, lo, np.where(hi < 0, hi, 0.0))
    return out if out.ndim else float(out)


def compute_slopes(line, dx, theta=2.0):
    """Limited slopes for cells 1..len(line)-2 of ``line``.

    The minmod of the theta-weighted one-sided differences and the central
    difference, componentwise on conserved variables.
    """
    if not 1.0 <= theta <= 2.0:
        raise ValueError(f"theta must lie in [1, 2], got {theta}")
    line = np.asarray(line, dtype=float)
    d = np.diff(line, axis=0)
    back, fwd = d[:-1], d[1:]
    # neighbours of equal sign always have a central difference of that sign,
    # so the three-way minmod is sign * min(theta|back|, |mid|, theta|fwd|)
    mag = np.minimum(np.abs(back), np.abs(fwd))
    mag *= theta
    np.minimum(mag, 0.5 * np.abs(back + fwd), out=mag)
    sign = np.sign(back)
    sign += np.sign(fwd)
    mag *= 0.5 * sign
    mag /= dx
    return mag


def reconstruct_faces(line, slopes, dx):
    """Face states between consecutive cells of ``line``.

    Returns ``(v_minus, v_plus)`` with ``len(line) - 1`` entries; face k sits
    between cells k and k+1.
    """
    half = 0.5 * dx * slopes
    v_minus = line[:-1] + half[:-1]
    v_plus = line[1:] - half[1:]
    return v_minus, v_plus


def local_speed(model, direction, v_plus, v_minus):
    return np.maximum(model.max_wavespeed(direction, v_plus),
                      model.max_wavespeed(direction, v_minus))


def kt_flux(model, v_plus, v_minus, a, direction=0):
    f_plus = model.flux(direction, v_plus)
    f_minus = model.flux(direction, v_minus)
    a = np.asarray(a, dtype=float)
    return 0.5 * (f_plus + f_minus) - 0.5 * a[..., None] * (v_plus - v_minus)


def _face_flux(model, direction, v_plus, v_minus):
    try:
        f_plus, s_plus = model.flux_and_speed(direction, v_plus)
        f_minus, s_minus = model.flux_and_speed(direction, v_minus)
    except InadmissibleStateError as err:
        raise InadmissibleStateError(f"{err.args[0]} in reconstructed face state",
                                     location=("face", *(err.location or ()))) from None
    a = np.maximum(s_plus, s_minus)
    return 0.5 * (f_plus + f_minus) - 0.5 * a[..., None] * (v_plus - v_minus), a


def kt_rhs_line(padded, model, direction, dx, theta=2.0, interface_flags=(False, False),
                first_order=False, return_slopes=False):
    """dv/dt for the interior cells of a line padded by two cells per side.

    ``interface_flags`` marks the low/high end cells as interface cells:
    their slope is forced to zero (so neighbouring faces see the raw value)
    and their entry in the result is zero, to be supplied by the interface
    update.  Ghost values on a flagged side are never used.
    """
    padded = np.asarray(padded, dtype=float)
    n = padded.shape[0] - 2 * PAD
    if n < 1:
        raise ValueError("line has no interior cells")
    cells = padded[1:-1]  # cells -1 .. n
    if first_order:
        slopes = np.zeros_like(cells)
    else:
        slopes = compute_slopes(padded, dx, theta)
    low, high = interface_flags
    if low:
        slopes[1] = 0.0
    if high:
        slopes[n] = 0.0
    v_minus, v_plus = reconstruct_faces(cells, slopes, dx)
    H, _ = _face_flux(model, direction, v_plus, v_minus)
    rhs = -(H[1:] - H[:-1]) / dx
    if low:
        rhs[0] = 0.0
    if high:
        rhs[-1] = 0.0
    if return_slopes:
        return rhs, slopes[1:-1]
    return rhs

"""Total variation, Lip' (1-Wasserstein) errors, conservation and rate fits."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


class MassDefectError(ValueError):
    """Lip' distance requested between fields of different total mass."""

    def __init__(self, defect):
        super().__init__(f"Lip' undefined between unequal masses (defect {defect:.3e})")
        self.defect = defect


class DegenerateFitError(ValueError):
    pass


@dataclass
class ErrorReport:
    lip_prime: float = 0.0
    l1: float = 0.0
    tv_series: list = field(default_factory=list)
    conservation_series: list = field(default_factory=list)
    fit: Optional[tuple] = None


def total_variation(v, periodic=False, axis=0):
    """Sum of |v_{j+1} - v_j| along ``axis``; componentwise for systems."""
    v = np.asarray(v, dtype=float)
    d = np.abs(np.diff(v, axis=axis)).sum(axis=axis)
    if periodic:
        first = np.take(v, 0, axis=axis)
        last = np.take(v, -1, axis=axis)
        d = d + np.abs(first - last)
    return d


def total_variation_2d(v, periodic=(False, False)):
    """TV summed over both directions of a (nx, ny, ...) field."""
    return (total_variation(v, periodic[0], axis=0).sum(axis=0)
            + total_variation(v, periodic[1], axis=1).sum(axis=0))


def lip_prime_error(v, v_ref, dx, periodic=False, mass_tol=1e-10):
    """Discrete Lip' (dual Lipschitz) distance between two scalar fields.

    Point masses at the cell centres; on the line this is dx * sum |P_k|
    with P the discrete primitive of the difference.  On a periodic domain
    the primitive is shifted by its median, the optimal constant.
    """
    v = np.asarray(v, dtype=float)
    v_ref = np.asarray(v_ref, dtype=float)
    if v.shape != v_ref.shape:
        raise ValueError(f"grids differ: {v.shape} vs {v_ref.shape}")
    P = dx * np.cumsum(v - v_ref, axis=0)
    if periodic:
        c = np.median(P, axis=0)
        return dx * np.abs(P - c).sum(axis=0)
    norm = dx * (np.abs(v).sum(axis=0) + np.abs(v_ref).sum(axis=0))
    defect = np.abs(P[-1])
    if np.any(defect > mass_tol * np.maximum(norm, np.finfo(float).tiny)):
        raise MassDefectError(float(np.max(defect)))
    return dx * np.abs(P).sum(axis=0)


def l1_error(v, v_ref, cell_volume):
    """Volume-weighted L1 difference; per component when the last axis holds them."""
    a = np.abs(np.asarray(v, dtype=float) - np.asarray(v_ref, dtype=float))
    if a.ndim == 1:
        return cell_volume * float(a.sum())
    return cell_volume * a.reshape(-1, a.shape[-1]).sum(axis=0)


def fit_convergence(pairs):
    """Least-squares fit error = b * dx**p in log-log space; returns (b, p)."""
    pairs = list(pairs)
    if len(pairs) < 2:
        raise DegenerateFitError("need at least two (dx, error) pairs")
    dx = np.array([p[0] for p in pairs], dtype=float)
    err = np.array([p[1] for p in pairs], dtype=float)
    if np.any(err <= 0) or np.any(dx <= 0):
        raise DegenerateFitError("errors and spacings must be positive")
    slope, intercept = np.polyfit(np.log(dx), np.log(err), 1)
    return float(np.exp(intercept)), float(slope)


def conservation_drift(series):
    """Max |total(t) - total(0)| per component, absolute and relative.

    ``series`` is a sequence of samples whose last entry is the totals,
    e.g. (t, totals) or the (t, tv, totals) rows of a run report.
    """
    if len(series) < 2:
        raise ValueError("need at least two samples")
    totals = np.array([np.atleast_1d(s[-1]) for s in series], dtype=float)
    absolute = np.max(np.abs(totals - totals[0]), axis=0)
    ref = np.abs(totals[0])
    relative = np.where(ref > 0, absolute / np.where(ref > 0, ref, 1.0), absolute)
    return absolute, relative


def restrict_average(fine, ratio, periodic=True):
    """Box-average a fine vertex-centred line onto every ``ratio``-th point.

    Coarse cell j spans fine centres j*ratio - ratio/2 .. j*ratio + ratio/2;
    for even ratios the two end fine cells are split in half.
    """
    fine = np.asarray(fine, dtype=float)
    n_fine = fine.shape[0]
    if n_fine % ratio:
        raise ValueError("fine size must be a multiple of the ratio")
    n = n_fine // ratio
    h = ratio // 2
    offsets = np.arange(-h, h + 1)
    w = np.ones(offsets.size)
    if ratio % 2 == 0:
        w[0] = w[-1] = 0.5
    idx = (np.arange(n) * ratio)[:, None] + offsets[None, :]
    if periodic:
        idx %= n_fine
    elif idx.min() < 0 or idx.max() >= n_fine:
        raise ValueError("non-periodic restriction would read outside the line")
    return np.einsum("jk...,k->j...", fine[idx], w) / ratio


def shock_position(x, v, period=None):
    """Midpoint of the steepest downward jump of a scalar line."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float).ravel()
    if period is not None:
        jumps = np.roll(v, -1) - v
        mids = x + 0.5 * np.diff(np.append(x, x[0] + period))
    else:
        jumps = np.diff(v)
        mids = 0.5 * (x[1:] + x[:-1])
    k = int(np.argmin(jumps))
    return float(mids[k])


def shock_cell_mask(field, factor=10.0):
    """Cells whose local TV exceeds ``factor`` times the median local TV."""
    f = np.asarray(field, dtype=float)
    local = np.zeros_like(f)
    for axis in range(f.ndim):
        d = np.abs(np.diff(f, axis=axis))
        lo = [slice(None)] * f.ndim
        hi = [slice(None)] * f.ndim
        lo[axis] = slice(None, -1)
        hi[axis] = slice(1, None)
        local[tuple(lo)] += d
        local[tuple(hi)] += d
    return local > factor * np.median(local)


def write_series_csv(path, series, names):
    """One row per sample: t, TV per component, totals per component."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"tv_{n}" for n in names] + [f"total_{n}" for n in names])
        for t, tv, tot in series:
            w.writerow([repr(float(t))] + [repr(float(a)) for a in np.atleast_1d(tv)]
                       + [repr(float(a)) for a in np.atleast_1d(tot)])


def write_convergence_csv(path, rows, p):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["N", "dx", "lip_prime", "l1", "fitted_p"])
        for row in rows:
            w.writerow([row["N"], repr(row["dx"]), repr(row["lip_prime"]), repr(row["l1"]),
                        repr(p)])

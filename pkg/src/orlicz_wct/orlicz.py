"""Modulars, Luxemburg norms, and Orlicz-space membership on atomic spaces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measure import FiniteMeasureSpace
from .young import YoungFunction

__all__ = [
    "OrliczContext",
    "modular",
    "luxemburg_norm",
    "luxemburg_norms",
    "in_orlicz_space",
]


@dataclass(frozen=True)
class OrliczContext:
    """A finite atomic space together with the Young function acting on it."""

    space: FiniteMeasureSpace
    phi: YoungFunction


def modular(ctx: OrliczContext, f) -> float:
    """sum of phi(f_i) * mu_i; +inf as soon as any term is +inf."""
    f = np.asarray(f, dtype=float)
    if f.shape != (ctx.space.n_atoms,):
        raise ValueError("function length does not match the space")
    return float(ctx.phi(f) @ ctx.space.weights)


def _modular_cols(ctx: OrliczContext, cols: np.ndarray) -> np.ndarray:
    """Modular of every column of an (n_atoms, m) array."""
    return ctx.phi(cols).T @ ctx.space.weights


def luxemburg_norms(ctx: OrliczContext, cols, tol: float = 1e-10) -> np.ndarray:
    """Luxemburg norm of every column of an (n_atoms, m) array.

    Bisection on k over the nonincreasing map k -> modular(f/k), bracketing
    until modular(f/k_hi) <= 1 <= modular(f/k_lo), then narrowing to relative
    tolerance ``tol``. The returned k satisfies modular(f/k) <= 1.
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    cols = np.asarray(cols, dtype=float)
    if cols.ndim != 2 or cols.shape[0] != ctx.space.n_atoms:
        raise ValueError("cols must have shape (n_atoms, m)")
    if not np.all(np.isfinite(cols)):
        raise ValueError("norms require finite-valued functions")
    out = np.zeros(cols.shape[1])
    sup = np.max(np.abs(cols), axis=0)
    active = sup > 0.0
    if not active.any():
        return out
    tiny = np.finfo(float).tiny
    f = cols[:, active]
    hi = sup[active].copy()
    lo = np.maximum(1e-15 * sup[active], tiny)
    for _ in range(200):
        grow = _modular_cols(ctx, f / hi[None, :]) > 1.0
        if not grow.any():
            break
        hi[grow] *= 2.0
    for _ in range(200):
        # never shrink into subnormals: a bracket floor of `tiny` already
        # certifies a norm of zero at working precision
        shrink = (_modular_cols(ctx, f / lo[None, :]) <= 1.0) & (lo > tiny)
        if not shrink.any():
            break
        lo[shrink] *= 0.5
    for _ in range(200):
        if not np.any(hi - lo > tol * hi):
            break
        mid = 0.5 * (lo + hi)
        small = _modular_cols(ctx, f / mid[None, :]) <= 1.0
        hi = np.where(small, mid, hi)
        lo = np.where(small, lo, mid)
    out[active] = hi
    return out


def luxemburg_norm(ctx: OrliczContext, f, tol: float = 1e-10) -> float:
    """N_phi(f) = inf{k > 0 : modular(f/k) <= 1}; 0 for the zero function."""
    f = np.asarray(f, dtype=float)
    return float(luxemburg_norms(ctx, f[:, None], tol)[0])


def in_orlicz_space(ctx: OrliczContext, f) -> bool:
    """Membership test; on finite atomic spaces this is plain finiteness.

    Some k > 0 always scales a finite-valued f below b_phi, and b_phi > 0 by
    construction, so the modular of k*f is finite.
    """
    f = np.asarray(f, dtype=float)
    return bool(np.all(np.isfinite(f)))

"""Fractional Poincare constants via generalized eigenproblems.

C_{t,s}(Omega) = sup ||(-Lap)^{s/2} u|| / ||(-Lap)^{t/2} u|| over grid
functions supported on interior indices, computed as sqrt(lambda_max) of the
interior pencil B_s x = lambda B_t x with B_r the order-r Dirichlet form in
the spectral flavor. Constants are defined over the discrete
interior-supported subspace, so every check downstream is a one-sided
inequality or a self-convergence study, never an equality claim against a
continuum value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .fracops import circulant_block, symbol_abs2, _min_image_sq_dist
from .grid import DOF_CAP, DomainMask, Grid, GridError, make_grid, mask_from_predicate

__all__ = [
    "PoincareEstimate",
    "poincare_constant",
    "interpolation_check",
    "cylinder_limit",
    "rigid_invariance_check",
    "apply_motion",
    "gagliardo_quotient",
]


@dataclass(frozen=True, eq=False)
class PoincareEstimate:
    """Estimated optimal constant for the pair (s, t), t >= s.

    eigen_iterations records the pencil dimension (the eigensolve is a dense
    direct method).
    """

    s: float
    t: float
    mask: DomainMask
    constant: float
    eigen_iterations: int
    residual: float


def _order_block(grid: Grid, r: float, idx: np.ndarray) -> np.ndarray:
    # (|k|^2)^r with 0^0 = 1, so r = 0 yields the plain L2 Gram.
    sym = symbol_abs2(grid) ** r
    block = grid.spacing**grid.dim * circulant_block(grid, sym, idx, idx)
    return 0.5 * (block + block.T)


def poincare_constant(mask: DomainMask, s: float, t: float) -> PoincareEstimate:
    """Optimal constant in ||(-Lap)^{s/2} u|| <= C ||(-Lap)^{t/2} u||."""
    if not (0.0 <= s <= t) or t <= 0.0:
        raise ValueError(f"need 0 <= s <= t and t > 0, got (s, t) = ({s}, {t})")
    idx = mask.interior
    if s == t:
        return PoincareEstimate(s=s, t=t, mask=mask, constant=1.0,
                                eigen_iterations=idx.size, residual=0.0)
    grid = mask.grid
    b_s = _order_block(grid, s, idx)
    b_t = _order_block(grid, t, idx)
    vals, vecs = scipy.linalg.eigh(b_s, b_t)
    lam = vals[-1]
    x = vecs[:, -1]
    num = b_s @ x
    residual = np.linalg.norm(num - lam * (b_t @ x)) / np.linalg.norm(num)
    return PoincareEstimate(
        s=float(s), t=float(t), mask=mask,
        constant=float(np.sqrt(lam)),
        eigen_iterations=idx.size,
        residual=float(residual),
    )


def interpolation_check(mask: DomainMask, z: float, r: float, s: float, t: float,
                        tol: float = 1e-3) -> dict:
    """Check C_{t,s} <= C_{r,z}^{(t-s)/(r-z)} (1 + tol) and record the pair.

    Valid parameter orderings: t >= s >= r > z >= 0 or t >= r >= s >= z >= 0.
    The recorded (C_{t,s}, bound) pairs feed the equivalence-of-constants
    probe; no equality is asserted.
    """
    if not (r > z >= 0.0):
        raise ValueError(f"need r > z >= 0, got (z, r) = ({z}, {r})")
    if not (t >= s >= r or t >= r >= s >= z):
        raise ValueError(f"parameter ordering violated for (z, r, s, t) = ({z}, {r}, {s}, {t})")
    if not t >= s:
        raise ValueError(f"need t >= s, got (s, t) = ({s}, {t})")
    c_rz = poincare_constant(mask, z, r)
    c_ts = poincare_constant(mask, s, t)
    exponent = (t - s) / (r - z)
    bound = c_rz.constant**exponent
    return {
        "z": z, "r": r, "s": s, "t": t,
        "c_rz": c_rz.constant,
        "c_ts": c_ts.constant,
        "exponent": exponent,
        "bound": bound,
        "satisfied": bool(c_ts.constant <= bound * (1.0 + tol)),
        "gap": float(bound - c_ts.constant),
    }


def cylinder_limit(section, elongations, s: float, *, extent: float, points: int) -> dict:
    """Constants of elongating boxes (0, A) x omega against the 1-d section.

    All 2-d masks share one grid so the trial spaces are nested and the
    constant sequence is nondecreasing; the 1-d section constant on the
    matching lattice is the limiting upper value.
    """
    elongations = sorted(float(a) for a in elongations)
    if points**2 > DOF_CAP:
        raise ValueError(
            f"requested 2-d lattice has {points**2} DOFs, above the dense cap {DOF_CAP}")
    grid2 = make_grid(2, extent, points)
    if elongations[-1] >= extent:
        raise ValueError("largest elongation must fit inside the box with nonempty exterior")
    constants = []
    for a in elongations:
        mask = mask_from_predicate(grid2, lambda x, y, a=a: 0.0 < x < a and section(y))
        constants.append(poincare_constant(mask, 0.0, s).constant)
    grid1 = make_grid(1, extent, points)
    mask1 = mask_from_predicate(grid1, lambda y: section(y))
    c_section = poincare_constant(mask1, 0.0, s).constant
    gap = abs(constants[-1] - c_section) / c_section
    monotone = all(b >= a - 1e-8 for a, b in zip(constants, constants[1:]))
    return {
        "elongations": elongations,
        "constants": constants,
        "section_constant": c_section,
        "relative_gap": float(gap),
        "monotone": bool(monotone),
    }


def apply_motion(mask: DomainMask, motion: dict) -> DomainMask:
    """Move a mask by a lattice-compatible rigid motion.

    Supported motions: {"kind": "identity"}, {"kind": "translate",
    "cells": tuple of ints}, {"kind": "reflect", "axis": int},
    {"kind": "axis_swap"} (square 2-d grids).
    """
    grid = mask.grid
    n = grid.points_per_dim
    kind = motion.get("kind")

    def move(idx):
        multi = [np.asarray(m) for m in grid.index_to_multi(idx)]
        if kind == "identity":
            pass
        elif kind == "translate":
            cells = motion["cells"]
            cells = (cells,) if np.isscalar(cells) else tuple(cells)
            if len(cells) != grid.dim or any(int(c) != c for c in cells):
                raise ValueError("translation must give one integer cell count per axis")
            multi = [(m + int(c)) % n for m, c in zip(multi, cells)]
        elif kind == "reflect":
            axis = int(motion.get("axis", 0))
            if not 0 <= axis < grid.dim:
                raise ValueError(f"reflection axis {axis} out of range")
            multi[axis] = (-multi[axis]) % n
        elif kind == "axis_swap":
            if grid.dim != 2:
                raise ValueError("axis swap requires a 2-d grid")
            multi = [multi[1], multi[0]]
        else:
            raise ValueError(f"unknown motion kind {kind!r}")
        return np.sort(grid.multi_to_index(multi))

    return DomainMask(
        grid=grid,
        interior=move(mask.interior),
        exterior=move(mask.exterior),
        windows={name: move(idx) for name, idx in mask.windows.items()},
    )


def rigid_invariance_check(mask: DomainMask, motion: dict, s: float, t: float) -> dict:
    """Compare constants of a mask and its rigidly moved image."""
    moved = apply_motion(mask, motion)
    c0 = poincare_constant(mask, s, t).constant
    c1 = poincare_constant(moved, s, t).constant
    rel = abs(c0 - c1) / max(abs(c0), 1.0)
    return {"constant": c0, "moved_constant": c1, "relative_difference": float(rel)}


def _gagliardo_weights(mask: DomainMask, s: float, p: float):
    grid = mask.grid
    n = grid.dim
    ii, ee = mask.interior, mask.exterior
    expo = (n + s * p) / 2.0

    def block(rows, cols):
        d2 = _min_image_sq_dist(grid, rows, cols)
        same = d2 == 0.0
        d2[same] = 1.0
        w = d2 ** (-expo)
        w[same] = 0.0
        return w

    w_int = block(ii, ii)
    w_ext = block(ii, ee).sum(axis=1)
    return w_int, w_ext


def gagliardo_quotient(mask: DomainMask, s: float, p: float, trials: int = 5,
                       seed: int = 0, max_iter: int = 2000, tol: float = 1e-6) -> float:
    """Poincare constant estimate from direct minimization of the p-quotient.

    Minimizes the normalized Gagliardo p-energy over interior-supported
    fields with ||u||_p = 1 by projected descent with step halving and
    random restarts; returns (best quotient)^(-1/p).

    For p = 2 the normalized seminorm coincides with the fractional-gradient
    norm, whose faithful lattice realization is the spectral quadratic form;
    that path must reproduce poincare_constant at the 1% level (the descent
    route vs the eigensolve route). For p != 2 the energy is the double-sum
    seminorm with unit normalization; those values are exploratory and only
    recorded.
    """
    if not 0.0 < s < 1.0:
        raise ValueError(f"order s must lie in (0, 1), got {s}")
    if not 1.0 < p < np.inf:
        raise ValueError(f"integrability p must lie in (1, inf), got {p}")
    grid = mask.grid
    nloc = grid.dim
    h = grid.spacing
    m = mask.interior.size

    def phi(x):
        return np.abs(x) ** (p - 1.0) * np.sign(x)

    if p == 2:
        b_block = _order_block(grid, s, mask.interior)

        def seminorm_p(u):
            return float(u @ (b_block @ u))

        def grad_seminorm(u):
            return 2.0 * (b_block @ u)

    else:
        w_int, w_ext = _gagliardo_weights(mask, s, p)

        def seminorm_p(u):
            du = u[:, None] - u[None, :]
            inner_part = np.sum(w_int * np.abs(du) ** p)
            ext_part = 2.0 * np.sum(w_ext * np.abs(u) ** p)
            return 0.5 * h ** (2 * nloc) * (inner_part + ext_part)

        def grad_seminorm(u):
            du = u[:, None] - u[None, :]
            g = np.sum(w_int * phi(du), axis=1) + w_ext * phi(u)
            return h ** (2 * nloc) * p * g

    def norm_p(u):
        return h**nloc * np.sum(np.abs(u) ** p)

    rng = np.random.default_rng(seed)
    starts = [np.ones(m)]
    for _ in range(max(0, trials - 1)):
        starts.append(rng.uniform(-1.0, 1.0, size=m))

    best = np.inf
    for u in starts:
        u = u / norm_p(u) ** (1.0 / p)
        q = seminorm_p(u)
        step = 0.1
        for _ in range(max_iter):
            g = grad_seminorm(u) - q * p * h**nloc * phi(u)
            gn = np.linalg.norm(g)
            if gn == 0.0:
                break
            improved = False
            while step > 1e-14:
                cand = u - step * g / gn
                cand = cand / norm_p(cand) ** (1.0 / p)
                q_new = seminorm_p(cand)
                if q_new < q:
                    improved = True
                    break
                step *= 0.5
            if not improved:
                break
            rel = (q - q_new) / q
            u, q = cand, q_new
            step *= 1.5
            if rel < tol:
                break
        best = min(best, q)
    return float(best ** (-1.0 / p))

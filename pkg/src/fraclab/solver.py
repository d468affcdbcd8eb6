"""Exterior-value problems: direct solves, adjoint solves, Runge experiments.

Only the coercive regime is handled: a solve first certifies a positive
coercivity margin and refuses otherwise. Solutions carry the exterior data
exactly; the interior block is solved by direct factorization.

The trial space of interior-supported test functions is the natural lattice
counterpart of the continuum closure of smooth functions compactly supported
in the domain; the identification is the discretization choice here, not a
proved equivalence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .forms import BilinearForm, coercivity_margin
from .fracops import hs_gram_block
from .grid import DomainMask, Field, GridError

__all__ = [
    "ExteriorProblem",
    "Solution",
    "NonCoerciveError",
    "solve_exterior",
    "solve_adjoint",
    "runge_residual",
]


class NonCoerciveError(RuntimeError):
    """Raised when a solve is attempted outside the coercive regime."""


@dataclass(eq=False)
class ExteriorProblem:
    """Exterior data problem B(u, phi) = F(phi) with u = f on the exterior.

    exterior_data is read on exterior indices only; interior_source (usually
    zero) is a grid function acting through the quadrature pairing.
    """

    form: BilinearForm
    mask: DomainMask
    exterior_data: Field
    interior_source: Field | None = None
    _margin: float | None = field(default=None, repr=False)

    def margin(self) -> float:
        if self._margin is None:
            self._margin = coercivity_margin(self.form, self.mask)
        return self._margin


@dataclass(frozen=True, eq=False)
class Solution:
    u: Field
    residual: float
    exterior_match: bool


def _solve(problem: ExteriorProblem, matrix: np.ndarray) -> Solution:
    margin = problem.margin()
    if margin <= 0.0:
        raise NonCoerciveError(
            f"form is not coercive on this mask (margin = {margin:.6e}); refusing to solve"
        )
    mask = problem.mask
    grid = mask.grid
    f = problem.exterior_data
    if not f.grid.same_as(grid):
        raise GridError("exterior data grid mismatch")
    ii, ee = mask.interior, mask.exterior
    a_ii = matrix[np.ix_(ii, ii)]
    a_ie = matrix[np.ix_(ii, ee)]
    f_e = f.values[ee]
    if problem.interior_source is None:
        rhs_src = np.zeros(ii.size)
    else:
        rhs_src = grid.spacing**grid.dim * problem.interior_source.values[ii]
    rhs = rhs_src - a_ie @ f_e
    try:
        lu = scipy.linalg.lu_factor(a_ii)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - defensive
        raise RuntimeError(f"singular interior factorization: {exc}") from exc
    u_i = scipy.linalg.lu_solve(lu, rhs)
    values = np.zeros(grid.size)
    values[ee] = f_e
    values[ii] = u_i
    scale = np.abs(f_e).max()
    if problem.interior_source is not None:
        scale = max(scale, np.abs(rhs_src).max())
    residual = np.abs(a_ii @ u_i - rhs).max() / (scale if scale > 0 else 1.0)
    return Solution(u=Field(grid, values), residual=float(residual), exterior_match=True)


def solve_exterior(problem: ExteriorProblem) -> Solution:
    """Solve A_II u_I = F_I - A_IE f_E; the result satisfies u = f on the exterior."""
    return _solve(problem, problem.form.matrix)


def solve_adjoint(problem: ExteriorProblem) -> Solution:
    """Solve the same problem for the transposed form."""
    return _solve(problem, problem.form.matrix.T)


def runge_residual(
    form: BilinearForm,
    mask: DomainMask,
    source_window: np.ndarray,
    target: Field,
    n_sources: int,
    s: float | None = None,
) -> float:
    """Relative H^s-norm error of the best approximation of an interior target.

    The approximating span is {u_f - f} for single-point indicator data f on
    the first n_sources points of the source window; the least squares runs
    in the H^s Gram inner product. Nested spans make the residual
    nonincreasing in n_sources.
    """
    window = np.asarray(source_window, dtype=np.intp)
    if window.size == 0:
        raise ValueError("empty source window")
    if np.setdiff1d(window, mask.exterior).size:
        raise ValueError("source window must lie in the exterior")
    if not (1 <= n_sources <= window.size):
        raise ValueError(f"n_sources must lie in [1, {window.size}], got {n_sources}")
    t_idx = target.support()
    if np.setdiff1d(t_idx, mask.interior).size:
        raise ValueError("target must be supported on interior indices")
    if s is None:
        s = form.descriptor.get("s")
    margin = coercivity_margin(form, mask, s=s)
    if margin <= 0.0:
        raise NonCoerciveError(f"form is not coercive (margin = {margin:.6e})")

    grid, ii, ee = mask.grid, mask.interior, mask.exterior
    a = form.matrix
    a_ii = a[np.ix_(ii, ii)]
    cols = np.searchsorted(ee, np.sort(window)[:n_sources])
    a_ie = a[np.ix_(ii, ee)][:, cols]
    lu = scipy.linalg.lu_factor(a_ii)
    basis = scipy.linalg.lu_solve(lu, -a_ie)  # interior parts of u_f - f

    gram = hs_gram_block(grid, s, ii, ii)
    gram = 0.5 * (gram + gram.T)
    chol = scipy.linalg.cholesky(gram, lower=True)
    design = chol.T @ basis
    rhs = chol.T @ target.values[ii]
    denom = np.linalg.norm(rhs)
    if denom == 0.0:
        return 0.0
    # Incremental Gram-Schmidt in fixed window order: prefixes of the source
    # set reuse the identical elimination steps, so the residual is
    # nonincreasing in n_sources by construction (nested least squares).
    resid = rhs.copy()
    q_cols = []
    for j in range(design.shape[1]):
        col = design[:, j]
        for q in q_cols:
            col = col - q * (q @ col)
        for q in q_cols:  # second pass for orthogonality at the round-off floor
            col = col - q * (q @ col)
        nrm = np.linalg.norm(col)
        if nrm <= 1e-13 * np.linalg.norm(design[:, j]):
            continue
        q = col / nrm
        q_cols.append(q)
        resid = resid - q * (q @ resid)
    return float(np.linalg.norm(resid) / denom)

"""Bilinear forms over grid degrees of freedom.

A form is stored as a dense matrix A with the trial-side convention
B(u, v) = v^T A u, so the exterior-value linear system reads
A_II u_I = F_I - A_IE f_E and the adjoint form is the plain transpose.
Quadrature weights (h^dim) are folded into A.

Smallness of a perturbation in continuum multiplier norms is not decidable
from grid data; the operative solvability certificate here is the discrete
coercivity margin against the H^s Gram matrix, and `BilinearForm.bound` is
only a grid-level lower estimate of the continuum operator norm.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
import scipy.linalg

from .grid import DomainMask, Field, Grid, GridError
from .fracops import (
    OperatorKernel,
    circulant_matrix,
    hs_gram_block,
    symbol_abs2,
)

__all__ = [
    "BilinearForm",
    "PdoSpec",
    "dirichlet_form",
    "potential_form",
    "pdo_form",
    "conductivity_form",
    "delta_budget",
    "coercivity_margin",
]

_SYM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class BilinearForm:
    """Dense bilinear form B(u, v) = v^T matrix u with provenance descriptor."""

    grid: Grid
    matrix: np.ndarray
    symmetric: bool
    descriptor: dict

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=float)
        m = self.grid.size
        if a.shape != (m, m):
            raise GridError(f"form matrix shape {a.shape} does not match grid size {m}")
        if self.symmetric:
            scale = np.abs(a).max() or 1.0
            if np.abs(a - a.T).max() > _SYM_TOL * scale:
                raise ValueError("form flagged symmetric but matrix is not")
        object.__setattr__(self, "matrix", a)

    def apply(self, u: Field, v: Field) -> float:
        """Evaluate B(u, v)."""
        if not (u.grid.same_as(self.grid) and v.grid.same_as(self.grid)):
            raise GridError("fields do not live on the form's grid")
        return float(v.values @ (self.matrix @ u.values))

    def adjoint(self) -> "BilinearForm":
        """Transpose form B*(u, v) = B(v, u)."""
        return BilinearForm(
            grid=self.grid,
            matrix=self.matrix.T.copy(),
            symmetric=self.symmetric,
            descriptor={"kind": "adjoint", "of": self.descriptor, "s": self.descriptor.get("s")},
        )

    def __add__(self, other: "BilinearForm") -> "BilinearForm":
        if not self.grid.same_as(other.grid):
            raise GridError("cannot add forms on different grids")
        s = self.descriptor.get("s")
        if s is None:
            s = other.descriptor.get("s")
        return BilinearForm(
            grid=self.grid,
            matrix=self.matrix + other.matrix,
            symmetric=self.symmetric and other.symmetric,
            descriptor={"kind": "sum", "parts": [self.descriptor, other.descriptor], "s": s},
        )

    def bound(self) -> float:
        """L2-normalized spectral norm: a finite lower estimate of the
        continuum operator norm, evaluated on the grid's trial space."""
        h = self.grid.spacing**self.grid.dim
        return float(np.linalg.norm(self.matrix, 2) / h)


@dataclass(frozen=True, eq=False)
class PdoSpec:
    """Local partial differential operator sum a_alpha D^alpha, |alpha| <= order.

    Coefficients are grid functions keyed by multi-index tuples (length =
    grid dim); the order-vs-2s admissibility check happens at assembly,
    where the operator order s is known.
    """

    order: int
    coefficients: Mapping[tuple, Field]

    def __post_init__(self):
        coeffs = {}
        for alpha, f in dict(self.coefficients).items():
            alpha = tuple(int(a) for a in (alpha if isinstance(alpha, tuple) else (alpha,)))
            if any(a < 0 for a in alpha):
                raise ValueError(f"negative multi-index {alpha}")
            if sum(alpha) > self.order:
                raise ValueError(f"multi-index {alpha} exceeds declared order {self.order}")
            if not np.all(np.isfinite(f.values)):
                raise ValueError(f"coefficient for {alpha} has non-finite entries")
            coeffs[alpha] = f
        object.__setattr__(self, "coefficients", coeffs)


def dirichlet_form(kernel: OperatorKernel) -> BilinearForm:
    """Symmetric Dirichlet energy of the fractional Laplacian, either flavor."""
    g = kernel.grid
    h = g.spacing**g.dim
    a = h * kernel.matrix()
    return BilinearForm(
        grid=g,
        matrix=a,
        symmetric=True,
        descriptor={"kind": "dirichlet", "s": kernel.order, "flavor": kernel.flavor},
    )


def potential_form(grid: Grid, q: Field) -> BilinearForm:
    """Local multiplication form q(u, v) = h^dim sum q_i u_i v_i (exactly local)."""
    if not q.grid.same_as(grid):
        raise GridError("potential grid mismatch")
    h = grid.spacing**grid.dim
    return BilinearForm(
        grid=grid,
        matrix=np.diag(h * q.values),
        symmetric=True,
        descriptor={"kind": "potential", "s": None},
    )


def _derivative_multiplier(grid: Grid, alpha: tuple) -> np.ndarray:
    """Spectral multiplier of D^alpha = prod (i k_d)^(alpha_d).

    Odd powers zero the Nyquist mode so the matrix is real and the
    transpose identity for the adjoint form is exact.
    """
    k = grid.axis_wavenumbers()
    n = grid.points_per_dim
    axis_mults = []
    for a in alpha:
        ka = k.copy()
        if a % 2 == 1:
            ka[n // 2] = 0.0
        axis_mults.append((1j * ka) ** a)
    if grid.dim == 1:
        return axis_mults[0]
    return (axis_mults[0][:, None] * axis_mults[1][None, :]).ravel()


def pdo_form(kernel: OperatorKernel, pdo: PdoSpec) -> BilinearForm:
    """Fractional Laplacian plus local PDO perturbation, generally nonsymmetric.

    B(u, v) = <(-Lap)^{s/2} u, (-Lap)^{s/2} v> + sum_alpha <a_alpha, (D^alpha u) v>.
    Requires spectral flavor and 2s > order.
    """
    if kernel.flavor != "spectral":
        raise ValueError("pdo_form requires a spectral-flavor kernel")
    if not 2.0 * kernel.order > pdo.order:
        raise ValueError(
            f"PDO order {pdo.order} must be smaller than 2s = {2 * kernel.order}"
        )
    g = kernel.grid
    h = g.spacing**g.dim
    a = h * kernel.matrix()
    for alpha, coeff in pdo.coefficients.items():
        if len(alpha) != g.dim:
            raise ValueError(f"multi-index {alpha} does not match grid dimension {g.dim}")
        dmat = circulant_matrix(g, _derivative_multiplier(g, alpha))
        a = a + h * (coeff.values[:, None] * dmat)
    return BilinearForm(
        grid=g,
        matrix=a,
        symmetric=False,
        descriptor={"kind": "pdo", "s": kernel.order, "order": pdo.order},
    )


def conductivity_form(kernel: OperatorKernel, gamma: Field) -> BilinearForm:
    """Symmetric conductivity energy with weights gamma^(1/2)(x) gamma^(1/2)(y).

    (1/2) h^dim sum_{x,y} W(x,y) a(x) a(y) (u(x)-u(y)) (v(x)-v(y)),
    a = sqrt(gamma); same normalization as the fractional-gradient pairing,
    so gamma == 1 reproduces dirichlet_form entrywise.
    """
    if kernel.flavor != "kernel":
        raise ValueError("conductivity_form requires a kernel-flavor operator")
    if not gamma.grid.same_as(kernel.grid):
        raise GridError("conductivity grid mismatch")
    if gamma.values.min() <= 0.0:
        raise ValueError("conductivity must be bounded below by a positive constant")
    g = kernel.grid
    h = g.spacing**g.dim
    a = np.sqrt(gamma.values)
    s_mat = h * kernel.data * np.outer(a, a)
    mat = np.diag(s_mat.sum(axis=1)) - s_mat
    return BilinearForm(
        grid=g,
        matrix=mat,
        symmetric=True,
        descriptor={"kind": "conductivity", "s": kernel.order, "flavor": "kernel"},
    )


def delta_budget(c_poincare: float, s: float) -> float:
    """Smallness budget (2^(-s/2) / (1 + C))^2 from the optimal Poincare constant."""
    if not (np.isfinite(c_poincare) and c_poincare > 0):
        raise ValueError(f"Poincare constant must be positive, got {c_poincare}")
    return float((2.0 ** (-s / 2.0) / (1.0 + c_poincare)) ** 2)


def coercivity_margin(form: BilinearForm, mask: DomainMask, s: float | None = None) -> float:
    """Smallest eigenvalue of the symmetrized interior pencil A_sym x = lambda M x.

    M is the H^s Gram matrix (squared Bessel multiplier); a positive margin
    certifies discrete coercivity on interior-supported fields.
    """
    if s is None:
        s = form.descriptor.get("s")
    if s is None:
        raise ValueError("form descriptor carries no operator order; pass s explicitly")
    idx = mask.interior
    a = form.matrix
    a_sym = 0.5 * (a[np.ix_(idx, idx)] + a[np.ix_(idx, idx)].T)
    gram = hs_gram_block(form.grid, s, idx, idx)
    gram = 0.5 * (gram + gram.T)
    vals = scipy.linalg.eigh(a_sym, gram, eigvals_only=True)
    return float(vals[0])

"""Exterior Dirichlet-to-Neumann maps in the indicator basis.

The trace space of the discrete exterior problem is canonically the span of
exterior-point indicators, so the DN map is the dense Schur complement
Lambda = A_EE - A_EI A_II^{-1} A_IE of the interior block: column j holds the
pairings B(u_{e_j}, e_i) over exterior indicators e_i. Pairings depend only
on exterior values of the data, which realizes the quotient-space property
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .forms import BilinearForm, coercivity_margin
from .grid import DomainMask, Field
from .solver import ExteriorProblem, NonCoerciveError, solve_adjoint, solve_exterior

__all__ = [
    "DNMap",
    "assemble_dn",
    "dn_pairing",
    "alessandrini_gap",
    "window_equal",
    "export_dn_csv",
]


@dataclass(frozen=True, eq=False)
class DNMap:
    """Dense |exterior| x |exterior| matrix realizing f -> Lambda f."""

    mask: DomainMask
    matrix: np.ndarray
    descriptor: dict

    def window_block(self, w_from, w_to) -> np.ndarray:
        """Submatrix mapping data on w_from to measurements on w_to."""
        ee = self.mask.exterior
        src = self._window_indices(w_from)
        dst = self._window_indices(w_to)
        cols = np.searchsorted(ee, src)
        rows = np.searchsorted(ee, dst)
        return self.matrix[np.ix_(rows, cols)]

    def _window_indices(self, w) -> np.ndarray:
        if isinstance(w, str):
            return self.mask.window(w)
        return np.sort(np.asarray(w, dtype=np.intp))


def assemble_dn(form: BilinearForm, mask: DomainMask) -> DNMap:
    """Assemble the DN matrix of a coercive form by Schur complement."""
    margin = coercivity_margin(form, mask)
    if margin <= 0.0:
        raise NonCoerciveError(f"form is not coercive (margin = {margin:.6e})")
    a = form.matrix
    ii, ee = mask.interior, mask.exterior
    a_ii = a[np.ix_(ii, ii)]
    a_ie = a[np.ix_(ii, ee)]
    a_ei = a[np.ix_(ee, ii)]
    a_ee = a[np.ix_(ee, ee)]
    lu = scipy.linalg.lu_factor(a_ii)
    lam = a_ee - a_ei @ scipy.linalg.lu_solve(lu, a_ie)
    if form.symmetric:
        scale = np.abs(lam).max() or 1.0
        if np.abs(lam - lam.T).max() > 1e-10 * scale:
            raise RuntimeError("symmetric form produced a nonsymmetric DN matrix")
    return DNMap(mask=mask, matrix=lam, descriptor=dict(form.descriptor))


def dn_pairing(dn: DNMap, f: Field, g: Field) -> float:
    """Pairing <Lambda f, g>.

    Only exterior values enter, so any representative of the data class
    modulo interior-supported fields gives the same value (quotient-space
    property, exact by construction).
    """
    ee = dn.mask.exterior
    return float(g.values[ee] @ (dn.matrix @ f.values[ee]))


def _check_exterior_support(mask: DomainMask, f: Field, name: str):
    bad = np.intersect1d(f.support(), mask.interior)
    if bad.size:
        raise ValueError(f"{name} must be supported in the exterior; nonzero at {bad[:8].tolist()}")


def alessandrini_gap(
    dn1: DNMap,
    dn2: DNMap,
    form1: BilinearForm,
    form2: BilinearForm,
    mask: DomainMask,
    f: Field,
    g: Field,
) -> tuple:
    """Both sides of (Lambda_1 - Lambda_2)[f][g] = (B_1 - B_2)(u_f, u_g*).

    u_f solves the exterior problem for form1 and u_g* adjoint-solves for
    form2; the identity is exact up to factorization round-off.
    """
    _check_exterior_support(mask, f, "f")
    _check_exterior_support(mask, g, "g")
    lhs = dn_pairing(dn1, f, g) - dn_pairing(dn2, f, g)
    u_f = solve_exterior(ExteriorProblem(form1, mask, f)).u
    u_g = solve_adjoint(ExteriorProblem(form2, mask, g)).u
    diff = form1.matrix - form2.matrix
    rhs = float(u_g.values @ (diff @ u_f.values))
    return lhs, rhs


def window_equal(dn1: DNMap, dn2: DNMap, w_from, w_to, tol: float) -> bool:
    """True iff the w_from -> w_to blocks differ by at most tol in max norm."""
    b1 = dn1.window_block(w_from, w_to)
    b2 = dn2.window_block(w_from, w_to)
    return bool(np.abs(b1 - b2).max() <= tol)


def export_dn_csv(dn: DNMap, path):
    """Write the DN matrix with its exterior index header, 17 significant digits."""
    ee = dn.mask.exterior
    header = ",".join(str(i) for i in ee)
    np.savetxt(path, dn.matrix, delimiter=",", fmt="%.17g", header=header, comments="")

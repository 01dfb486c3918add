"""Affine equality constraint A theta = d and its null-space elimination.

The parameter estimate is reparametrized as theta_hat = theta0 + F z with
range(F) = null(A), so any z automatically satisfies the constraint. F has
orthonormal columns, which makes F F^T the orthogonal projector onto null(A).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InfeasibleInitialEstimate, RankDeficient, ValidationError

DEFAULT_RANK_TOL = 1e-10
DEFAULT_FEAS_TOL = 1e-8


@dataclass(frozen=True)
class ConstraintSpec:
    """Constraint data plus the elimination machinery derived from it.

    A           m x p constraint matrix, full row rank, m < p
    d           length-m offset
    theta0      minimum-norm particular solution A^T (A A^T)^-1 d
    F           p x (p-m) null-space basis with orthonormal columns
    kappa1/2    smallest / largest eigenvalue of A A^T
    """

    A: np.ndarray
    d: np.ndarray
    theta0: np.ndarray
    F: np.ndarray
    kappa1: float
    kappa2: float

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def p(self) -> int:
        return self.A.shape[1]

    def constraint_violation(self, theta: np.ndarray) -> float:
        """Max-norm residual of A theta - d."""
        return float(np.max(np.abs(self.A @ theta - self.d)))

    def projector(self) -> np.ndarray:
        """Orthogonal projector F F^T onto null(A)."""
        return self.F @ self.F.T

    def validate(self) -> None:
        """Check every structural invariant; raise ValidationError naming the first violation.

        Intended for hand-built specs (e.g. a basis taken from a reference
        source); build_constraint output satisfies these by construction.
        """
        m, p = self.A.shape
        if not (1 <= m < p):
            raise ValidationError(f"need 1 <= m < p, got m={m}, p={p}")
        if self.F.shape != (p, p - m):
            raise ValidationError(f"F must be {p}x{p - m}, got {self.F.shape}")
        if self.theta0.shape != (p,):
            raise ValidationError(f"theta0 must have length {p}")
        if self.d.shape != (m,):
            raise ValidationError(f"d must have length {m}")
        gram = self.A @ self.A.T
        eigs = np.linalg.eigvalsh(gram)
        slack = 1e-10 * max(1.0, float(eigs[-1]))
        if eigs[0] <= 0 or self.kappa1 > eigs[0] + slack or self.kappa2 < eigs[-1] - slack:
            raise ValidationError(
                f"eigenvalue bounds kappa1={self.kappa1}, kappa2={self.kappa2} "
                f"do not bracket eig(AA^T) in [{eigs[0]}, {eigs[-1]}]"
            )
        if self.kappa1 <= 0:
            raise ValidationError("kappa1 must be positive (A A^T must be positive definite)")
        if self.constraint_violation(self.theta0) > 1e-10:
            raise ValidationError("theta0 does not satisfy A theta0 = d at 1e-10")
        if np.max(np.abs(self.A @ self.F)) > 1e-10:
            raise ValidationError("columns of F are not in null(A) at 1e-10")
        if np.max(np.abs(self.F.T @ self.F - np.eye(p - m))) > 1e-10:
            raise ValidationError("columns of F are not orthonormal at 1e-10")


def build_constraint(
    A: np.ndarray, d: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL
) -> ConstraintSpec:
    """Construct the elimination machinery for A theta = d.

    theta0 is the minimum-norm solution and F collects the right-singular
    vectors of A spanning null(A). Raises DimensionError if m >= p and
    RankDeficient if the numerical row rank of A is below m.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    d = np.atleast_1d(np.asarray(d, dtype=float))
    m, p = A.shape
    if m >= p:
        raise DimensionError(f"constraint must leave free directions: m={m} >= p={p}")
    if d.shape != (m,):
        raise DimensionError(f"d must have length {m}, got {d.shape}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(d))):
        raise ValidationError("constraint entries must be finite")

    U, s, Vt = np.linalg.svd(A, full_matrices=True)
    sigma_max = s[0]
    if sigma_max == 0.0 or np.any(s < rank_tol * sigma_max):
        raise RankDeficient(
            f"numerical row rank of A is below m={m} at rank_tol={rank_tol}"
        )
    V = Vt.T
    # A^T (A A^T)^-1 d collapses to V_m Sigma^-1 U^T d on the SVD factors.
    theta0 = V[:, :m] @ ((U.T @ d) / s)
    F = V[:, m:]
    gram_eigs = np.linalg.eigvalsh(A @ A.T)
    return ConstraintSpec(
        A=A, d=d, theta0=theta0, F=F,
        kappa1=float(gram_eigs[0]), kappa2=float(gram_eigs[-1]),
    )


def lift(spec: ConstraintSpec, z: np.ndarray) -> np.ndarray:
    """Map the reduced coordinate z to the full estimate theta0 + F z."""
    z = np.asarray(z, dtype=float)
    if z.shape != (spec.p - spec.m,):
        raise DimensionError(f"z must have length {spec.p - spec.m}, got {z.shape}")
    return spec.theta0 + spec.F @ z


def retract(
    spec: ConstraintSpec, theta_hat: np.ndarray, feas_tol: float = DEFAULT_FEAS_TOL
) -> np.ndarray:
    """Recover the reduced coordinate z = F^T (theta_hat - theta0).

    theta_hat must satisfy the constraint within feas_tol, otherwise the
    caller supplied an initial estimate off the feasible set and
    InfeasibleInitialEstimate is raised.
    """
    theta_hat = np.asarray(theta_hat, dtype=float)
    if theta_hat.shape != (spec.p,):
        raise DimensionError(f"theta_hat must have length {spec.p}, got {theta_hat.shape}")
    violation = spec.constraint_violation(theta_hat)
    if violation > feas_tol:
        raise InfeasibleInitialEstimate(
            f"theta_hat violates A theta = d by {violation:.3e} (tolerance {feas_tol:.1e})"
        )
    return spec.F.T @ (theta_hat - spec.theta0)

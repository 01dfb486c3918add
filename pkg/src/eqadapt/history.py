"""History stack of recorded data for concurrent learning.

Each record stores a visited state, the applied input, a finite-difference
estimate of the state derivative, and the regressor evaluated at that state.
Once full, records are only replaced when doing so strictly increases the
minimum eigenvalue of the information matrix Y_R = sum_k Y_k^T Y_k, so
lambda_min(Y_R) is non-decreasing over the stack's lifetime.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

DEFAULT_REL_IMPROVE_TOL = 1e-6


@dataclass(frozen=True)
class StackEntry:
    x: np.ndarray
    u: np.ndarray
    xdot_hat: np.ndarray
    Y: np.ndarray


def _lambda_min(M: np.ndarray) -> float:
    return max(0.0, float(np.linalg.eigvalsh(M)[0]))


@dataclass
class HistoryStack:
    capacity: int
    rel_improve_tol: float = DEFAULT_REL_IMPROVE_TOL
    entries: list[StackEntry] = field(default_factory=list)
    Y_R: np.ndarray | None = None
    data_vector: np.ndarray | None = None  # sum_k Y_k^T (xdot_hat_k - u_k)
    lambda_min: float = 0.0

    def __post_init__(self):
        if self.capacity < 1:
            raise ValidationError("stack capacity must be at least 1")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def full(self) -> bool:
        return len(self.entries) >= self.capacity

    def _recompute(self) -> None:
        p = self.entries[0].Y.shape[1]
        Y_R = np.zeros((p, p))
        data = np.zeros(p)
        for rec in self.entries:
            Y_R += rec.Y.T @ rec.Y
            data += rec.Y.T @ (rec.xdot_hat - rec.u)
        self.Y_R = 0.5 * (Y_R + Y_R.T)
        self.data_vector = data
        self.lambda_min = _lambda_min(self.Y_R)

    def offer(self, candidate: StackEntry) -> bool:
        """Insert the record if it helps; returns whether it was accepted.

        Below capacity every record is appended. At capacity, the slot whose
        replacement maximizes lambda_min(Y_R) is tried; the swap happens only
        if that value beats the current lambda_min by the improvement
        tolerance. Rejection is a normal outcome.
        """
        if not self.full:
            self.entries.append(candidate)
            self._recompute()
            return True
        cand_gram = candidate.Y.T @ candidate.Y
        best_slot, best_lam = -1, -np.inf
        for i, rec in enumerate(self.entries):
            trial = self.Y_R - rec.Y.T @ rec.Y + cand_gram
            lam = _lambda_min(0.5 * (trial + trial.T))
            if lam > best_lam:
                best_slot, best_lam = i, lam
        if best_lam > self.lambda_min + self.rel_improve_tol * (1.0 + self.lambda_min):
            self.entries[best_slot] = candidate
            self._recompute()
            return True
        return False

"""Dense symmetric linear algebra used by the selection algorithms.

Matrices are plain ``numpy`` float arrays. Symmetric matrices are checked
and re-symmetrized on entry by :func:`as_sym_matrix`; PSD summands are
wrapped in :class:`PsdBlock`, which stores either the explicit matrix or a
tall factor ``G`` with ``block = G @ G.T``.

The two inverse downdates, :func:`smw_downdate` and
:func:`sherman_morrison_downdate`, return ``(A - B)^{-1}`` from ``A^{-1}``
without refactorizing ``A - B``.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import (
    CapacitanceSingular,
    DimensionMismatch,
    InvalidArgument,
    NotPsd,
    SingularMatrix,
)


def as_sym_matrix(a, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Validate a square symmetric matrix and return its symmetric part."""
    a = np.array(a, dtype=float, ndmin=2)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise InvalidArgument(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidArgument("matrix has non-finite entries")
    scale = np.max(np.abs(a))
    if np.max(np.abs(a - a.T)) > tol.sym * scale:
        raise InvalidArgument("matrix is not symmetric")
    return 0.5 * (a + a.T)


@dataclass(frozen=True, eq=False)
class PsdBlock:
    """One PSD summand, stored explicitly or through a factor.

    Use :meth:`explicit` or :meth:`from_factor` rather than the constructor.
    Exactly one of ``matrix`` and ``factor`` is set.
    """

    matrix: Optional[np.ndarray] = None
    factor: Optional[np.ndarray] = None
    label: Optional[str] = None

    def __post_init__(self):
        if (self.matrix is None) == (self.factor is None):
            raise InvalidArgument("PsdBlock needs exactly one of matrix or factor")

    @classmethod
    def explicit(cls, matrix, label=None):
        # symmetry and PSD are diagnosed by validate_block_problem, not here
        m = np.array(matrix, dtype=float, ndmin=2)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise InvalidArgument(f"explicit block must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidArgument("block has non-finite entries")
        m.setflags(write=False)
        return cls(matrix=m, label=label)

    @classmethod
    def from_factor(cls, factor, label=None):
        g = np.array(factor, dtype=float)
        if g.ndim == 1:
            g = g[:, None]
        if g.ndim != 2 or g.shape[0] < 1 or g.shape[1] < 1:
            raise InvalidArgument(f"factor must be an n x r matrix with r >= 1, got {g.shape}")
        if not np.all(np.isfinite(g)):
            raise InvalidArgument("factor has non-finite entries")
        g.setflags(write=False)
        return cls(factor=g, label=label)

    @classmethod
    def zero(cls, n, label=None):
        return cls.explicit(np.zeros((n, n)), label=label)

    @property
    def form(self):
        return "explicit" if self.matrix is not None else "factor"

    @property
    def n(self):
        return (self.matrix if self.matrix is not None else self.factor).shape[0]

    def dense(self) -> np.ndarray:
        if self.matrix is not None:
            return np.array(self.matrix)
        return self.factor @ self.factor.T

    def is_zero(self):
        src = self.matrix if self.matrix is not None else self.factor
        return not np.any(src)


@dataclass(frozen=True)
class TraceFunctionals:
    """``Tr(A^-1)``, ``Tr(A^-1 B)`` and ``Tr(A^-2 B)`` for a fixed block ``B``."""

    tr_ainv: float
    tr_ainv_b: float
    tr_a2inv_b: float


def _check_dim(ainv, n):
    if ainv.shape != (n, n):
        raise DimensionMismatch(f"block dimension {n} does not match inverse of shape {ainv.shape}")


def invert_psd(a, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Invert a full-rank symmetric PSD matrix through its Cholesky factor.

    Raises
    ------
    SingularMatrix
        If the smallest eigenvalue is not above ``tol.rank`` times the
        largest, or the computed inverse misses the identity residual check.
    """
    a = as_sym_matrix(a, tol)
    n = a.shape[0]
    w = np.linalg.eigvalsh(a)
    if w[-1] <= 0 or w[0] <= tol.rank * w[-1]:
        raise SingularMatrix(
            f"matrix is not of full rank {n} (eigenvalue range [{w[0]:.3e}, {w[-1]:.3e}])"
        )
    try:
        c = sla.cho_factor(a, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(f"Cholesky factorization failed: {exc}") from exc
    m = sla.cho_solve(c, np.eye(n), check_finite=False)
    m = 0.5 * (m + m.T)
    resid = np.max(np.abs(a @ m - np.eye(n)))
    if resid > tol.inv_tol(n):
        raise SingularMatrix(f"inverse residual {resid:.3e} exceeds {tol.inv_tol(n):.3e}")
    return m


def sym_sqrt(block: PsdBlock, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Return a factor ``F`` with ``F @ F.T == block``.

    Factor-form blocks are returned unchanged. Explicit blocks go through a
    symmetric eigendecomposition; eigenvalues at or below ``tol.psd`` times the
    largest are dropped, so ``F`` may have fewer than ``n`` columns (zero
    columns for the zero block).
    """
    if block.factor is not None:
        return block.factor
    w, v = np.linalg.eigh(block.matrix)
    top = w[-1]
    if top <= 0.0:
        if w[0] < 0.0:
            raise NotPsd(f"block has negative eigenvalue {w[0]:.3e} and no positive one")
        return np.zeros((block.n, 0))
    if w[0] < -tol.psd * top:
        raise NotPsd(f"block has eigenvalue {w[0]:.3e} below -{tol.psd:g} * {top:.3e}")
    keep = w > tol.psd * top
    return v[:, keep] * np.sqrt(w[keep])


def smw_downdate(ainv, block: PsdBlock, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Return ``(A - B)^{-1}`` given ``A^{-1}`` via the Woodbury identity.

    With ``B = F F^T`` the update is
    ``A^-1 + A^-1 F (I - F^T A^-1 F)^-1 F^T A^-1``.

    Raises
    ------
    CapacitanceSingular
        If ``I - F^T A^-1 F`` has an eigenvalue at or below ``tol.cap``.
    """
    ainv = np.asarray(ainv, dtype=float)
    _check_dim(ainv, block.n)
    f = sym_sqrt(block, tol)
    if f.shape[1] == 0:
        return ainv.copy()
    y = ainv @ f
    cap = np.eye(f.shape[1]) - f.T @ y
    cap = 0.5 * (cap + cap.T)
    lo = np.linalg.eigvalsh(cap)[0]
    if lo <= tol.cap:
        raise CapacitanceSingular(f"capacitance matrix eigenvalue {lo:.3e} <= {tol.cap:g}")
    c = sla.cho_factor(cap, lower=True, check_finite=False)
    out = ainv + y @ sla.cho_solve(c, y.T, check_finite=False)
    return 0.5 * (out + out.T)


def sherman_morrison_downdate(ainv, v, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Rank-one case of :func:`smw_downdate`: ``(A - v v^T)^{-1}``."""
    ainv = np.asarray(ainv, dtype=float)
    v = np.asarray(v, dtype=float).ravel()
    _check_dim(ainv, v.shape[0])
    y = ainv @ v
    denom = 1.0 - v @ y
    if denom <= tol.cap:
        raise CapacitanceSingular(f"1 - v^T A^-1 v = {denom:.3e} <= {tol.cap:g}")
    return ainv + np.outer(y, y) / denom


def block_traces(ainv, block: PsdBlock):
    """``(Tr(A^-1 B), Tr(A^-2 B))`` without forming ``A^-2``."""
    ainv = np.asarray(ainv, dtype=float)
    _check_dim(ainv, block.n)
    if block.factor is not None:
        y = ainv @ block.factor
        return float(np.sum(block.factor * y)), float(np.sum(y * y))
    y = ainv @ block.matrix
    return float(np.trace(y)), float(np.sum(y * ainv))


def trace_functionals(ainv, block: PsdBlock) -> TraceFunctionals:
    t1, t2 = block_traces(ainv, block)
    return TraceFunctionals(float(np.trace(ainv)), t1, t2)

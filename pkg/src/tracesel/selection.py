"""Greedy removal for trace-of-inverse subset selection.

Starting from the full sum ``A = B + sum_i B_i`` the algorithm removes one
candidate at a time. At a step with ``p`` active candidates and current sum
``A_p`` it sets

    alpha = (Tr(A_p^-1) - Tr(A_p^-2 B)) / (p - n + Tr(A_p^-1 B))

and scores every active ``j`` by

    margin_j = Tr(A_p^-2 B_j) - alpha * (1 - Tr(A_p^-1 B_j)).

The margins average to zero, so the smallest is never positive. Removing
its candidate keeps ``A_p - B_j`` invertible and raises ``Tr(A^-1)`` by at
most ``alpha``; chaining these steps gives the bounds in :mod:`.bounds`.
Ties go to the lowest index.
"""

from dataclasses import dataclass

import numpy as np

from .bounds import (
    admissible_min_k,
    bound_corollary3,
    bound_corollary6,
    bound_theorem1,
    bound_theorem2,
)
from .config import DEFAULT_TOLERANCES, REFACTOR_EVERY, Tolerances
from .errors import CertificateViolated, KOutOfRange, NoCandidates, ValidationFailed
from .linalg import (
    PsdBlock,
    TraceFunctionals,
    invert_psd,
    sherman_morrison_downdate,
    smw_downdate,
    sym_sqrt,
)
from .problem import BlockProblem, ColumnProblem, validate_block_problem


@dataclass(frozen=True)
class StepRecord:
    removed_index: int
    alpha: float
    margin: float
    trace_after: float
    active_count: int


@dataclass(frozen=True)
class SelectionReport:
    """Outcome of one greedy run.

    ``chosen`` holds 0-based indices (for column problems, into the columns
    of ``U`` and including the kept ones). ``steps[-1].trace_after`` is the
    incrementally maintained trace, ``achieved_trace`` the one from a fresh
    factorization of the final sum. ``max_residual`` is the largest
    ``|A_p @ Ainv - I|`` seen at refactorization checkpoints.
    """

    chosen: tuple
    achieved_trace: float
    bound: float
    bound_name: str
    steps: tuple
    refactorizations: int
    n: int
    m: int
    k: int
    k_min: int
    initial: TraceFunctionals
    max_residual: float = 0.0


def _factor_traces(ainv, f):
    y = ainv @ f
    return float(np.sum(f * y)), float(np.sum(y * y))


class _Candidates:
    """Stacked factors of all candidates, for vectorized scoring."""

    def __init__(self, factors, n):
        self.factors = [np.asarray(f, dtype=float).reshape(n, -1) for f in factors]
        self.m = len(self.factors)
        widths = [f.shape[1] for f in self.factors]
        self.stack = np.hstack(self.factors) if sum(widths) else np.zeros((n, 0))
        self.seg = np.repeat(np.arange(self.m), widths)

    def scores(self, ainv):
        """Per-candidate ``Tr(A^-1 B_j)`` and ``Tr(A^-2 B_j)``."""
        y = ainv @ self.stack
        t1 = np.bincount(self.seg, weights=np.sum(self.stack * y, axis=0), minlength=self.m)
        t2 = np.bincount(self.seg, weights=np.sum(y * y, axis=0), minlength=self.m)
        return t1, t2

    def gram(self, active):
        mask = np.isin(self.seg, active)
        s = self.stack[:, mask]
        return s @ s.T


def _pick(t1, t2, active, alpha, tol):
    margins = t2[active] - alpha * (1.0 - t1[active])
    pos = int(np.argmin(margins))
    margin = float(margins[pos])
    if margin > tol.cert_tol(alpha):
        raise CertificateViolated(
            f"smallest margin {margin:.3e} exceeds {tol.cert_tol(alpha):.3e} (alpha={alpha:.6g})"
        )
    return int(active[pos]), margin


def _block_alpha(ainv, fixed_factor, p, n):
    tb1, tb2 = _factor_traces(ainv, fixed_factor)
    denom = p - n + tb1
    if denom <= 0:
        raise CertificateViolated(
            f"p - n + Tr(A^-1 B) = {denom:.3e} <= 0: no removal keeps rank {n}"
        )
    return (np.trace(ainv) - tb2) / denom


def _column_alpha(ainv, p, n):
    if p <= n:
        raise CertificateViolated(f"{p} active columns: no removal keeps rank {n}")
    return np.trace(ainv) / (p - n)


def _active_list(active):
    active = np.array(sorted(set(int(i) for i in active)), dtype=int)
    if active.size == 0:
        raise NoCandidates("no active candidates")
    return active


def choose_removal_block(ainv, fixed: PsdBlock, candidates, active, n, tol=DEFAULT_TOLERANCES):
    """One certified removal among the ``active`` indices of ``candidates``.

    Returns ``(index, alpha, margin)``.

    Raises
    ------
    NoCandidates
        If ``active`` is empty.
    CertificateViolated
        If the smallest margin exceeds the certificate tolerance, or the
        averaging denominator is not positive.
    """
    active = _active_list(active)
    ainv = np.asarray(ainv, dtype=float)
    cands = _Candidates([sym_sqrt(c, tol) for c in candidates], n)
    alpha = _block_alpha(ainv, sym_sqrt(fixed, tol), len(active), n)
    j, margin = _pick(*cands.scores(ainv), active, alpha, tol)
    return j, float(alpha), margin


def choose_removal_column(ainv, u, active, n, tol=DEFAULT_TOLERANCES):
    """Rank-one removal step over the ``active`` columns of ``u`` with no kept block.

    Here ``alpha = Tr(A_p^-1) / (p - n)``. Returns ``(index, alpha, margin)``.
    """
    active = _active_list(active)
    ainv = np.asarray(ainv, dtype=float)
    u = np.asarray(u, dtype=float)
    alpha = _column_alpha(ainv, len(active), n)
    y = ainv @ u
    t1 = np.sum(u * y, axis=0)
    t2 = np.sum(y * y, axis=0)
    j, margin = _pick(t1, t2, active, alpha, tol)
    return j, float(alpha), margin


def _greedy(ainv, fixed_factor, fixed_dense, cands, n, k, tol, rank_one, column_alpha):
    """Remove ``m - k`` candidates; returns (active, steps, refactorizations, residual, ainv)."""
    active = np.arange(cands.m)
    steps = []
    refactorizations = 0
    max_residual = 0.0
    n_steps = cands.m - k
    for s in range(n_steps):
        p = active.size
        t1, t2 = cands.scores(ainv)
        if column_alpha:
            alpha = _column_alpha(ainv, p, n)
        else:
            alpha = _block_alpha(ainv, fixed_factor, p, n)
        j, margin = _pick(t1, t2, active, alpha, tol)
        f = cands.factors[j]
        if rank_one:
            ainv = sherman_morrison_downdate(ainv, f[:, 0], tol)
        elif f.shape[1]:
            ainv = smw_downdate(ainv, PsdBlock.from_factor(f), tol)
        active = active[active != j]
        steps.append(StepRecord(j, float(alpha), margin, float(np.trace(ainv)), int(active.size)))
        if (s + 1) % REFACTOR_EVERY == 0 or s == n_steps - 1:
            a = fixed_dense + cands.gram(active)
            fresh = invert_psd(a, tol)
            max_residual = max(max_residual, float(np.max(np.abs(a @ ainv - np.eye(n)))))
            ainv = fresh
            refactorizations += 1
    return active, steps, refactorizations, max_residual, ainv


def minimal_k(problem: BlockProblem, tol=DEFAULT_TOLERANCES):
    """Smallest admissible subset size ``n - floor(Tr(A^-1 B))``, floor-guarded."""
    _validate(problem, tol)
    ainv = invert_psd(problem.total(), tol)
    t1, _ = _factor_traces(ainv, sym_sqrt(problem.fixed, tol))
    return admissible_min_k(problem.n, t1, tol.floor_guard)


def _validate(problem, tol):
    summary = validate_block_problem(problem, tol=tol)
    if not summary.passed:
        raise ValidationFailed(summary)


def _check_k(k, k_min, m):
    if not k_min <= k <= m:
        raise KOutOfRange(f"k={k} outside admissible range [{k_min}, {m}]")


def run_block_selection(problem: BlockProblem, k, tol: Tolerances = DEFAULT_TOLERANCES):
    """Keep the fixed block and ``k`` candidates chosen by greedy removal.

    The reported bound is evaluated with the trace functionals of the initial
    full sum; each step's ``alpha`` uses the current sum.

    Raises
    ------
    ValidationFailed
        If the problem fails :func:`validate_block_problem`.
    KOutOfRange
        If ``k`` is outside ``[minimal_k(problem), m]``.
    CertificateViolated, CapacitanceSingular, SingularMatrix
        On numerical failure.
    """
    _validate(problem, tol)
    n, m = problem.n, problem.m
    fixed_dense = problem.fixed.dense()
    fixed_factor = sym_sqrt(problem.fixed, tol)
    cands = _Candidates([sym_sqrt(c, tol) for c in problem.candidates], n)
    ainv = invert_psd(fixed_dense + cands.gram(np.arange(m)), tol)
    tf0 = TraceFunctionals(float(np.trace(ainv)), *_factor_traces(ainv, fixed_factor))
    k_min = admissible_min_k(n, tf0.tr_ainv_b, tol.floor_guard)
    _check_k(k, k_min, m)

    active, steps, refac, resid, ainv = _greedy(
        ainv, fixed_factor, fixed_dense, cands, n, k, tol, rank_one=False, column_alpha=False
    )
    if fixed_factor.shape[1] == 0:
        bound, name = bound_corollary6(m, n, k, tf0.tr_ainv), "corollary6"
    else:
        bound, name = bound_theorem2(m, n, k, tf0, tol.floor_guard), "theorem2"
    return SelectionReport(
        chosen=tuple(int(i) for i in active),
        achieved_trace=float(np.trace(ainv)),
        bound=float(bound),
        bound_name=name,
        steps=tuple(steps),
        refactorizations=refac,
        n=n,
        m=m,
        k=k,
        k_min=k_min,
        initial=tf0,
        max_residual=resid,
    )


def _is_isotropic(problem: ColumnProblem, tol=1e-10):
    u = problem.u
    if np.max(np.abs(u @ u.T - np.eye(problem.n))) > tol:
        return False
    norms = np.sum(u[:, list(problem.fixed)] ** 2, axis=0)
    return bool(np.all(np.abs(norms - 1.0) <= tol))


def column_minimal_k(problem: ColumnProblem, tol=DEFAULT_TOLERANCES):
    """Smallest admissible number of columns to add to the kept ones."""
    problem.check_rank(tol)
    ainv = invert_psd(problem.u @ problem.u.T, tol)
    t1, _ = _factor_traces(ainv, problem.u[:, list(problem.fixed)])
    return admissible_min_k(problem.n, t1, tol.floor_guard)


def run_column_selection(problem: ColumnProblem, k, tol: Tolerances = DEFAULT_TOLERANCES):
    """Select ``k`` columns outside the kept set by rank-one greedy removal.

    Each step uses a Sherman-Morrison downdate. ``report.chosen`` lists
    column indices of ``U`` including the kept ones; ``report.m`` is the
    total column count and ``report.k`` counts only the added columns.

    The bound is ``theorem1`` when nothing is kept and ``k = n``,
    ``corollary6`` when nothing is kept and ``k > n``, ``corollary3`` when
    ``U U^T = I``, the kept columns have unit norm and ``k = n - |kept|``,
    and ``theorem2`` (on the reduced problem) otherwise.
    """
    problem.check_rank(tol)
    n = problem.n
    free = np.array(problem.free, dtype=int)
    kept = list(problem.fixed)
    m_free = free.size
    fixed_factor = problem.u[:, kept]
    fixed_dense = fixed_factor @ fixed_factor.T
    cands = _Candidates([problem.u[:, [i]] for i in free], n)
    ainv = invert_psd(problem.u @ problem.u.T, tol)
    tf0 = TraceFunctionals(float(np.trace(ainv)), *_factor_traces(ainv, fixed_factor))
    k_min = admissible_min_k(n, tf0.tr_ainv_b, tol.floor_guard)
    _check_k(k, k_min, m_free)

    active, steps, refac, resid, ainv = _greedy(
        ainv, fixed_factor, fixed_dense, cands, n, k, tol, rank_one=True, column_alpha=not kept
    )
    steps = tuple(
        StepRecord(int(free[s.removed_index]), s.alpha, s.margin, s.trace_after, s.active_count)
        for s in steps
    )
    if not kept:
        if k == n:
            bound, name = bound_theorem1(m_free, n, tf0.tr_ainv), "theorem1"
        else:
            bound, name = bound_corollary6(m_free, n, k, tf0.tr_ainv), "corollary6"
    elif _is_isotropic(problem) and k == n - len(kept):
        bound, name = bound_corollary3(problem.m, n, len(kept)), "corollary3"
    else:
        bound, name = bound_theorem2(m_free, n, k, tf0, tol.floor_guard), "theorem2"
    chosen = sorted([int(free[i]) for i in active] + kept)
    return SelectionReport(
        chosen=tuple(chosen),
        achieved_trace=float(np.trace(ainv)),
        bound=float(bound),
        bound_name=name,
        steps=steps,
        refactorizations=refac,
        n=n,
        m=problem.m,
        k=k,
        k_min=k_min,
        initial=tf0,
        max_residual=resid,
    )

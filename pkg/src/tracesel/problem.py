"""Problem containers and their validation."""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import InvalidArgument, RankDeficient
from .linalg import PsdBlock


@dataclass(frozen=True)
class BlockProblem:
    """A kept block ``B`` plus candidate PSD blocks ``B_1..B_m``.

    Construction does not validate; call :func:`validate_block_problem` (the
    selection routines do so themselves).
    """

    n: int
    fixed: PsdBlock
    candidates: tuple

    @classmethod
    def build(cls, candidates: Sequence[PsdBlock], fixed: Optional[PsdBlock] = None, n=None):
        candidates = tuple(candidates)
        if n is None:
            if fixed is not None:
                n = fixed.n
            elif candidates:
                n = candidates[0].n
            else:
                raise InvalidArgument("cannot infer n from an empty problem")
        if fixed is None:
            fixed = PsdBlock.zero(n)
        return cls(n=int(n), fixed=fixed, candidates=candidates)

    @property
    def m(self):
        return len(self.candidates)

    def total(self, subset=None) -> np.ndarray:
        """``B + sum of candidates`` over ``subset`` (all candidates by default)."""
        a = self.fixed.dense()
        idx = range(self.m) if subset is None else subset
        for i in idx:
            a = a + self.candidates[i].dense()
        return a


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationSummary:
    checks: tuple = field(default_factory=tuple)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _rank_ok(a, tol):
    w = np.linalg.eigvalsh(0.5 * (a + a.T))
    return w[-1] > 0 and w[0] > tol.rank * w[-1], w


def validate_block_problem(
    problem: BlockProblem, total=None, tol: Tolerances = DEFAULT_TOLERANCES
) -> ValidationSummary:
    """Check the hypotheses the selection theorems rely on.

    Checks, in order: ``dimensions``, ``symmetry``, ``psd``,
    ``reconstruction`` (against ``total`` when one is supplied) and ``rank``.
    Later checks are skipped (reported as failed) when dimensions disagree.
    """
    n = problem.n
    blocks = [("fixed", problem.fixed)] + [
        (b.label or f"candidate {i + 1}", b) for i, b in enumerate(problem.candidates)
    ]
    bad_dims = [name for name, b in blocks if b.n != n]
    checks = []
    if problem.m < 1:
        checks.append(Check("dimensions", False, "no candidate blocks"))
    elif bad_dims:
        checks.append(Check("dimensions", False, f"not {n}-dimensional: {', '.join(bad_dims)}"))
    else:
        checks.append(Check("dimensions", True, f"n={n}, m={problem.m}"))
    if not checks[0].passed:
        skipped = "skipped: dimension check failed"
        checks += [Check(c, False, skipped) for c in ("symmetry", "psd", "reconstruction", "rank")]
        return ValidationSummary(tuple(checks))

    asym, not_psd = [], []
    for name, b in blocks:
        if b.matrix is None:
            continue
        m = b.matrix
        scale = np.max(np.abs(m))
        if np.max(np.abs(m - m.T)) > tol.sym * scale:
            asym.append(name)
            continue
        w = np.linalg.eigvalsh(m)
        if w[0] < -tol.psd * max(w[-1], 0.0):
            not_psd.append(f"{name} (min eigenvalue {w[0]:.3e})")
    checks.append(Check("symmetry", not asym, "asymmetric: " + ", ".join(asym) if asym else ""))
    checks.append(Check("psd", not not_psd, "not PSD: " + ", ".join(not_psd) if not_psd else ""))

    a = problem.total()
    if total is None:
        checks.append(Check("reconstruction", True, "no separate total supplied"))
    else:
        total = np.asarray(total, dtype=float)
        if total.shape != a.shape:
            checks.append(Check("reconstruction", False, f"total has shape {total.shape}"))
        else:
            err = np.max(np.abs(total - a))
            ok = err <= tol.recon * max(np.max(np.abs(a)), 1e-300)
            checks.append(Check("reconstruction", ok, f"max deviation {err:.3e}"))

    ok, w = _rank_ok(a, tol)
    checks.append(
        Check("rank", ok, f"eigenvalue range [{w[0]:.3e}, {w[-1]:.3e}]")
    )
    return ValidationSummary(tuple(checks))


@dataclass(frozen=True)
class ColumnProblem:
    """Columns ``U`` (``n x m``) and 0-based indices of columns that must be kept."""

    u: np.ndarray
    fixed: tuple = ()

    def __post_init__(self):
        u = np.array(self.u, dtype=float, ndmin=2)
        if u.ndim != 2:
            raise InvalidArgument(f"U must be a matrix, got shape {u.shape}")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)
        fixed = tuple(sorted({int(i) for i in self.fixed}))
        if any(i < 0 or i >= u.shape[1] for i in fixed):
            raise InvalidArgument(f"kept indices {fixed} outside 0..{u.shape[1] - 1}")
        object.__setattr__(self, "fixed", fixed)

    @property
    def n(self):
        return self.u.shape[0]

    @property
    def m(self):
        return self.u.shape[1]

    @property
    def free(self):
        kept = set(self.fixed)
        return tuple(i for i in range(self.m) if i not in kept)

    def check_rank(self, tol: Tolerances = DEFAULT_TOLERANCES):
        if self.m < self.n:
            raise RankDeficient(f"U has {self.m} columns, fewer than n={self.n}")
        s = np.linalg.svd(self.u, compute_uv=False)
        # same relative threshold as the eigenvalue check on U U^T
        if s[0] == 0 or s[-1] ** 2 <= tol.rank * s[0] ** 2:
            raise RankDeficient(f"U is not of rank {self.n} (singular values {s[-1]:.3e}..{s[0]:.3e})")

    def to_block_problem(self) -> BlockProblem:
        """Reduce to ``B = U_keep U_keep^T`` and rank-one candidates ``u_i u_i^T``."""
        fixed = (
            PsdBlock.from_factor(self.u[:, list(self.fixed)], label="kept")
            if self.fixed
            else PsdBlock.zero(self.n)
        )
        cands = [PsdBlock.from_factor(self.u[:, i], label=f"column {i + 1}") for i in self.free]
        return BlockProblem(n=self.n, fixed=fixed, candidates=tuple(cands))

"""Seeded random instances for tests, scripts and the ``gen`` command."""

import numpy as np

from .linalg import PsdBlock
from .problem import BlockProblem, ColumnProblem


def random_columns(n, m, rng):
    """Gaussian ``n x m`` matrix; full rank with probability one when ``m >= n``."""
    return rng.standard_normal((n, m))


def random_psd(n, rank, rng):
    """Wishart-type PSD matrix ``G G^T`` with ``G`` an ``n x rank`` Gaussian."""
    g = rng.standard_normal((n, rank))
    return g @ g.T


def random_block_problem(n, m, rng, max_rank=3, fixed_rank=None, explicit_every=2):
    """Random full-rank :class:`BlockProblem` with candidate ranks in ``1..max_rank``.

    ``fixed_rank=None`` draws the rank of the kept block uniformly from the
    ranks that still allow a full-rank sum (0 gives the zero block). Every
    ``explicit_every``-th candidate is stored as an explicit matrix, the rest
    as factors. Redraws until the full sum has rank ``n``.
    """
    lowest = max(n - m * max_rank, 0)
    if fixed_rank is not None and fixed_rank < lowest:
        raise ValueError(f"{m} blocks of rank <= {max_rank} plus a rank-{fixed_rank} block cannot span R^{n}")
    while True:
        r_fixed = int(rng.integers(lowest, n + 1)) if fixed_rank is None else fixed_rank
        if r_fixed:
            fixed = PsdBlock.explicit(random_psd(n, r_fixed, rng), label="fixed")
        else:
            fixed = PsdBlock.zero(n, label="fixed")
        cands = []
        for i in range(m):
            g = rng.standard_normal((n, int(rng.integers(1, max_rank + 1))))
            if explicit_every and i % explicit_every == explicit_every - 1:
                cands.append(PsdBlock.explicit(g @ g.T, label=f"B{i + 1}"))
            else:
                cands.append(PsdBlock.from_factor(g, label=f"B{i + 1}"))
        problem = BlockProblem(n=n, fixed=fixed, candidates=tuple(cands))
        w = np.linalg.eigvalsh(problem.total())
        if w[0] > 1e-8 * w[-1]:
            return problem


def isotropic_columns(n, m, r, rng):
    """``U`` with ``U U^T = I_n`` whose first ``r`` columns have unit norm.

    The other ``m - r`` columns form a tight frame of the orthogonal
    complement of the first ``r``, built from an orthonormal basis of a random
    ``(m - r) x (n - r)`` Gaussian matrix. A random rotation is applied last.
    Returns ``ColumnProblem(U, fixed=range(r))``.
    """
    if not 0 <= r < n < m:
        raise ValueError(f"need 0 <= r < n < m, got r={r}, n={n}, m={m}")
    q_frame, _ = np.linalg.qr(rng.standard_normal((m - r, n - r)))
    core = np.zeros((n, m))
    core[:r, :r] = np.eye(r)
    core[r:, r:] = q_frame.T
    rot, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return ColumnProblem(rot @ core, fixed=tuple(range(r)))

"""Closed-form upper bounds on the trace of the inverse of a selected sum.

All functions are plain arithmetic on the problem sizes and on the trace
functionals of the full sum ``A`` and the kept block ``B``.
"""

import math

from .config import DEFAULT_TOLERANCES
from .errors import InvalidArgument, KOutOfRange
from .linalg import TraceFunctionals


def _require(cond, msg):
    if not cond:
        raise InvalidArgument(msg)


def guarded_floor(x, guard=DEFAULT_TOLERANCES.floor_guard):
    """``floor(x)``, rounding up values within ``guard`` below an integer."""
    return math.floor(x + guard)


def admissible_min_k(n, tr_ainv_b, guard=DEFAULT_TOLERANCES.floor_guard):
    """Smallest subset size that can still restore rank ``n`` next to ``B``."""
    return max(n - guarded_floor(tr_ainv_b, guard), 0)


def bound_theorem1(m, n, tr_ainv):
    """``(m - n + 1) * Tr(A^-1)``: rank-one columns, subset of size ``n``."""
    _require(m >= n >= 1, f"need m >= n >= 1, got m={m}, n={n}")
    _require(tr_ainv > 0, f"Tr(A^-1) must be positive, got {tr_ainv}")
    return (m - n + 1) * tr_ainv


def bound_theorem2(m, n, k, tf: TraceFunctionals, guard=DEFAULT_TOLERANCES.floor_guard):
    """General bound for keeping ``B`` plus ``k`` of ``m`` PSD blocks.

    ``Tr(A^-1) (m - n + T + 1) / (k - n + 1 + T) - (m - k) Tr(A^-2 B) / (k - n + 1 + T)``
    with ``T = Tr(A^-1 B)``.
    """
    _require(m >= 1 and n >= 1, f"need m, n >= 1, got m={m}, n={n}")
    t = tf.tr_ainv_b
    k_min = admissible_min_k(n, t, guard)
    if k < k_min or k > m:
        raise KOutOfRange(f"k={k} outside admissible range [{k_min}, {m}]")
    denom = k - n + 1 + t
    _require(denom > 0, f"denominator k - n + 1 + Tr(A^-1 B) = {denom} is not positive")
    return tf.tr_ainv * (m - n + t + 1) / denom - (m - k) * tf.tr_a2inv_b / denom


def bound_theorem2_minimal(m, n, tf: TraceFunctionals):
    """The minimal-size form: ``(m-n+1+T) Tr(A^-1) - Tr(A^-2 B) (m-n+T)``.

    Coincides with :func:`bound_theorem2` at ``k = n - T`` when ``T`` is an
    integer.
    """
    t = tf.tr_ainv_b
    return (m - n + 1 + t) * tf.tr_ainv - tf.tr_a2inv_b * (m - n + t)


def bound_corollary3(m, n, r):
    """``(m - n)(n - r) + n``: isotropic ``U U^T = I`` keeping ``r`` unit columns."""
    _require(0 <= r <= n <= m, f"need 0 <= r <= n <= m, got r={r}, n={n}, m={m}")
    return (m - n) * (n - r) + n


def bound_corollary6(m, n, k, tr_ainv):
    """``(m - n + 1) / (k - n + 1) * Tr(A^-1)``: no kept block."""
    _require(m >= k >= n >= 1, f"need m >= k >= n >= 1, got m={m}, k={k}, n={n}")
    return (m - n + 1) / (k - n + 1) * tr_ainv

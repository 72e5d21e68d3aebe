from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Numerical slack used by the exact-arithmetic statements we implement.

    Relative tolerances are scaled by the largest entry or eigenvalue of the
    matrix under test.
    """

    sym: float = 1e-10
    psd: float = 1e-10
    rank: float = 1e-12
    cap: float = 1e-10
    # multiplied by n
    inv: float = 1e-8
    # certificate tolerance is cert * (1 + |alpha|)
    cert: float = 1e-9
    bound_slack: float = 1e-8
    recon: float = 1e-8
    floor_guard: float = 1e-9

    def inv_tol(self, n):
        return self.inv * n

    def cert_tol(self, alpha):
        return self.cert * (1.0 + abs(alpha))


DEFAULT_TOLERANCES = Tolerances()

REFACTOR_EVERY = 32
ENUM_CAP = 10**6

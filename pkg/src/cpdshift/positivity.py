"""Positivity region of the one-parameter family

    gamma_n(t) = 1 + t n + c n**2 + int Q_n dnu,

i.e. the set ``Omega = {t : gamma_n(t) > 0 for all n}`` and its infimum.
``Omega`` is always an interval unbounded above; the question is whether it
contains its left endpoint.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .measures import gamma_coeffs, q_integral, q_integrals

#: Relative tolerance for deciding ``Gamma_2 == 1``.
GAMMA2_TOL = 1e-10
#: ``nu == delta_0`` test: one atom within this of 0 ...
DELTA0_POS_TOL = 1e-12
#: ... with mass within this of 1.
DELTA0_MASS_TOL = 1e-10
#: Hard cap on the search for an attained minimum of zeta.
ZETA_SCAN_CAP = 4096
#: The search stops after this many consecutive terms above the running min.
ZETA_PATIENCE = 64
#: Number of zeta terms kept in a report.
ZETA_TRACE_LEN = 64


class CaseLabel(str, enum.Enum):
    I_A = "i-a"          # support reaches beyond 1
    I_B = "i-b"          # support in [0, 1], c > 0
    I_C = "i-c"          # Gamma_1 infinite; unreachable for atomic nu
    II_A = "ii-a"        # c = 0, Gamma_2 > 1
    II_B = "ii-b"        # c = 0, nu = delta_0
    II_C = "ii-c"        # c = 0, Gamma_2 = 1, nu != delta_0
    II_D = "ii-d"        # c = 0, Gamma_2 < 1
    DEGENERATE_ZERO = "degenerate-zero"   # c = 0, nu = 0

    def __str__(self):
        return self.value


CLOSED_CASES = frozenset({CaseLabel.II_C, CaseLabel.II_D,
                          CaseLabel.DEGENERATE_ZERO})


@dataclass(frozen=True)
class PositivityReport:
    """Classification of ``Omega`` for a given ``(c, nu)``.

    ``omega_closed_at_inf`` tells whether ``b_frak`` itself belongs to
    ``Omega``.  ``argmin`` is the (smallest) index where the infimum of zeta
    is attained, ``None`` when it is only a limit.
    """

    case_label: CaseLabel
    b_frak: float
    omega_closed_at_inf: bool
    zeta_trace: tuple
    gamma1: float
    gamma2: float
    theta_sup: float
    argmin: int = None
    scanned: int = 0
    flags: tuple = field(default_factory=tuple)

    def to_dict(self):
        return {
            "case_label": str(self.case_label),
            "b_frak": self.b_frak,
            "omega": ("[" if self.omega_closed_at_inf else "(")
                     + f"{self.b_frak!r}, inf)",
            "omega_closed_at_inf": self.omega_closed_at_inf,
            "argmin": self.argmin,
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "theta_sup": self.theta_sup,
            "zeta_trace": list(self.zeta_trace),
            "scanned": self.scanned,
            "flags": list(self.flags),
        }


def _validate(c, nu):
    if not c >= 0:
        raise DomainError(f"c must be nonnegative, got {c}")
    if not nu.is_zero and nu.support_min() < 0:
        raise DomainError("nu must be supported in [0, inf)")


def zeta(c, nu, n):
    """``1/n + c n + (1/n) int Q_n dnu`` for ``n >= 1``."""
    _validate(c, nu)
    n = int(n)
    if n < 1:
        raise DomainError(f"zeta is defined for n >= 1, got {n}")
    return 1.0 / n + c * n + q_integral(nu, n) / n


def zeta_sequence(c, nu, n_max):
    """``zeta_1 .. zeta_{n_max}`` as an array (index 0 holds ``zeta_1``)."""
    _validate(c, nu)
    n = np.arange(1, int(n_max) + 1, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        return 1.0 / n + c * n + q_integrals(nu, int(n_max))[1:] / n


def is_delta0(nu):
    return (nu.positions.size == 1
            and abs(nu.positions[0]) <= DELTA0_POS_TOL
            and abs(nu.weights[0] - 1.0) <= DELTA0_MASS_TOL)


def _attained_min(c, nu):
    # Strict '<' keeps the smallest index on ties.
    best, arg, since = math.inf, None, 0
    zs = zeta_sequence(c, nu, ZETA_SCAN_CAP)
    for i, z in enumerate(zs):
        if z < best:
            best, arg, since = float(z), i + 1, 0
        else:
            since += 1
            if since >= ZETA_PATIENCE:
                return best, arg, i + 1
    return best, arg, ZETA_SCAN_CAP


def classify(c, nu):
    """Decide the shape of ``Omega`` and compute ``b_frak = inf Omega``.

    ``b_frak = -inf_n zeta_n``.  When ``Omega`` is open the infimum is a
    minimum and is found by scanning; in the closed cases with ``c = 0``
    zeta decreases strictly to ``Gamma_1`` so ``b_frak = -Gamma_1``.
    """
    c = float(c)
    _validate(c, nu)
    theta, g1, g2 = gamma_coeffs(nu)
    trace = tuple(float(z) for z in zeta_sequence(c, nu, ZETA_TRACE_LEN))
    flags = []

    if c == 0 and nu.is_zero:
        return PositivityReport(CaseLabel.DEGENERATE_ZERO, 0.0, True, trace,
                                g1, g2, theta, scanned=ZETA_TRACE_LEN)
    if theta > 1:
        label = CaseLabel.I_A
    elif c > 0:
        label = CaseLabel.I_B
    elif not math.isfinite(g1):
        label = CaseLabel.I_C   # kept for completeness; atomic nu never lands here
    elif abs(g2 - 1.0) <= GAMMA2_TOL:
        label = CaseLabel.II_B if is_delta0(nu) else CaseLabel.II_C
        if g2 != 1.0:
            flags.append("gamma2-within-tolerance-of-1")
    elif g2 > 1.0:
        label = CaseLabel.II_A
    else:
        label = CaseLabel.II_D

    if label is CaseLabel.II_B:
        return PositivityReport(label, -1.0, False, trace, g1, g2, theta,
                                argmin=1, scanned=ZETA_TRACE_LEN,
                                flags=tuple(flags))
    if label in (CaseLabel.II_C, CaseLabel.II_D):
        return PositivityReport(label, -g1, True, trace, g1, g2, theta,
                                scanned=ZETA_TRACE_LEN, flags=tuple(flags))

    best, arg, scanned = _attained_min(c, nu)
    if scanned >= ZETA_SCAN_CAP:
        flags.append("scan-cap-reached")
    return PositivityReport(label, -best, False, trace, g1, g2, theta,
                            argmin=arg, scanned=scanned, flags=tuple(flags))


def gamma_at(t, c, nu, n_max):
    """``gamma_0(t) .. gamma_{n_max}(t)`` of the parametrised family."""
    n = np.arange(int(n_max) + 1, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        return 1.0 + t * n + c * n**2 + q_integrals(nu, int(n_max))


def b_frak_oracle(c, nu, n_max=512, t_tolerance=1e-9):
    """Brute-force ``inf {t : gamma_n(t) > 0 for n <= n_max}`` by bisection.

    Independent of :func:`classify`: it never looks at zeta or at the case
    table, and rebuilds ``int Q_n dnu`` from the recurrence
    ``Q_{n+1} = x Q_n + n`` rather than the closed form.
    """
    c = float(c)
    _validate(c, nu)
    n_max = int(n_max)
    base = np.zeros(n_max + 1)
    if not nu.is_zero:
        q = np.zeros_like(nu.positions)
        with np.errstate(over="ignore", invalid="ignore"):
            for n in range(1, n_max):
                q = nu.positions * q + n
                base[n + 1] = float(np.dot(nu.weights, q))
    n = np.arange(n_max + 1, dtype=float)
    base = base + 1.0 + c * n**2

    def positive(t):
        with np.errstate(invalid="ignore"):
            g = base[1:] + t * n[1:]
        return bool(np.all(g > 0))

    # gamma_1(t) = 1 + t + c, so t = -(1 + c) already fails; t = 0 always passes.
    lo, hi = -(1.0 + c) - 1.0, 0.0
    if not positive(hi):
        raise DomainError("t = 0 should lie in the positivity region")
    while hi - lo > t_tolerance:
        mid = 0.5 * (lo + hi)
        if positive(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)

"""Backward extensions: prepending weights while staying CPD.

Prepending ``t`` to the weights of a CPD shift with triplet ``(b, c, nu)``
keeps it CPD iff ``1/t**2 >= int dnu/x + 1 + c - b``.  Prepending ``n``
weights forces the first ``n - 1`` of them through an equality chain and
leaves an inequality on the last; the chain is equivalent to the recurrence

    sigma_1     = int dnu/x + 1 + c - b
    sigma_{k+1} = (int dnu/x**(k+1) + 2c) / (sigma_1 ... sigma_k) + 2 - 1/sigma_k

with ``t_k**2 = 1/sigma_k``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .measures import DiscreteMeasure, moment
from .sequences import RepresentingTriplet, synthesize

#: |sigma| below this is treated as a vanishing term.
DEGENERATE_TOL = 1e-12
#: Scan cap for the sufficient criterion in :func:`infinite_step_check`.
INFINITE_SCAN_CAP = 64


def _require_halfline(triplet):
    if not triplet.supported_on_halfline:
        raise DomainError("nu must be supported in [0, inf)")


def _inverse_moment(nu, k):
    return moment(nu, -k)


def _divided(nu, k, factor=1.0):
    # factor * nu / x**k, valid because nu has no atom at 0 on this path
    return nu.reweighted(lambda x: factor / x**k)


@dataclass(frozen=True)
class OneStepResult:
    """Outcome of a one-weight extension.

    ``bound`` is the right-hand side of the feasibility inequality and
    ``mass_at_zero`` the atom the extended triplet puts at 0.
    """

    feasible: bool
    bound: float
    triplet: RepresentingTriplet = None
    mass_at_zero: float = math.nan
    gamma0: float = 1.0

    def to_dict(self):
        return {"feasible": self.feasible, "bound": self.bound,
                "mass_at_zero": self.mass_at_zero, "gamma0": self.gamma0,
                "triplet": None if self.triplet is None else self.triplet.to_dict()}


def extend_sequence_1(triplet, gamma, theta):
    """Prepend ``theta`` to the sequence ``gamma`` with triplet ``triplet``.

    ``(theta, gamma_0, gamma_1, ...)`` is CPD with a triplet on ``[0, inf)``
    iff ``int dnu/x <= theta + gamma_1 - 2 (gamma_0 + c)``.  Its triplet is
    ``b = gamma_0 - theta - c``, ``c``, ``nu/x + slack d_0``.

    Parameters
    ----------
    gamma : CpdSequence, array_like or float
        The sequence, or just ``gamma_0`` (then ``gamma_1`` comes from the
        triplet).
    """
    _require_halfline(triplet)
    b, c, nu = triplet.b, triplet.c, triplet.nu
    if np.ndim(gamma) == 0:
        gamma0 = float(gamma)
        gamma1 = gamma0 + b + c
    else:
        gamma0, gamma1 = float(gamma[0]), float(gamma[1])
    room = theta + gamma1 - 2.0 * (gamma0 + c)
    inv1 = _inverse_moment(nu, 1)
    slack = room - inv1
    theta = float(theta)
    if not slack >= 0:
        return OneStepResult(False, room, None, slack, theta)
    nu_new = _divided(nu, 1) + DiscreteMeasure([0.0], [slack])
    return OneStepResult(True, room,
                         RepresentingTriplet(gamma0 - theta - c, c, nu_new),
                         slack, theta)


def extend_shift_1(triplet, t):
    """Whether ``W_(t, lambda_0, lambda_1, ...)`` is CPD, with its triplet.

    Extended triplet: ``b_t = t**2 (1 - c) - 1``, ``c_t = t**2 c``,
    ``nu_t = t**2 nu/x + (1 - t**2 sigma_1) d_0``.
    """
    _require_halfline(triplet)
    t = float(t)
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    b, c, nu = triplet.b, triplet.c, triplet.nu
    sigma1 = _inverse_moment(nu, 1) + 1.0 + c - b
    t2 = t * t
    if not 1.0 / t2 >= sigma1:
        return OneStepResult(False, sigma1, None, 1.0 - t2 * sigma1)
    mass0 = max(1.0 - t2 * sigma1, 0.0)
    nu_t = _divided(nu, 1, t2) + DiscreteMeasure([0.0], [mass0])
    return OneStepResult(True, sigma1,
                         RepresentingTriplet(t2 * (1.0 - c) - 1.0, t2 * c, nu_t),
                         mass0)


@dataclass(frozen=True)
class SigmaTrace:
    """``sigma_1 .. sigma_m``; ``nan`` after a vanishing term.

    ``n_lambda`` is ``inf`` when every inverse moment of ``nu`` is finite and
    0 otherwise (for atomic measures there is no middle ground).
    """

    sigma: tuple
    n_lambda: float
    degenerate_at: int = None

    def to_dict(self):
        return {"sigma": list(self.sigma), "n_lambda": self.n_lambda,
                "degenerate_at": self.degenerate_at}


def n_lambda(nu):
    return 0.0 if math.isinf(_inverse_moment(nu, 1)) else math.inf


def sigma_trace(triplet, m=16):
    _require_halfline(triplet)
    b, c, nu = triplet.b, triplet.c, triplet.nu
    m = int(m)
    nl = n_lambda(nu)
    if nl == 0:
        return SigmaTrace((math.inf,) + (math.nan,) * (m - 1), nl)
    out = [_inverse_moment(nu, 1) + 1.0 + c - b]
    prod = 1.0
    degenerate = None
    while len(out) < m:
        k = len(out)
        s = out[-1]
        if abs(s) <= DEGENERATE_TOL:
            degenerate = k
            break
        prod *= s
        out.append((_inverse_moment(nu, k + 1) + 2.0 * c) / prod + 2.0 - 1.0 / s)
    if degenerate is None and abs(out[-1]) <= DEGENERATE_TOL:
        degenerate = len(out)
    out += [math.nan] * (m - len(out))
    return SigmaTrace(tuple(float(s) for s in out), nl, degenerate)


@dataclass(frozen=True)
class StepConstraint:
    """Constraint on ``t_k``: forced (``kind == "equality"``) or an interval.

    For the last step ``upper`` is the right end of ``(0, upper]``, ``inf``
    when any positive ``t`` works.
    """

    k: int
    kind: str
    t_squared: float = math.nan
    upper: float = math.inf
    bound: float = math.nan

    def to_dict(self):
        d = {"k": self.k, "kind": self.kind, "bound": self.bound}
        if self.kind == "equality":
            d["t"] = math.sqrt(self.t_squared)
        elif self.kind == "inequality":
            d["interval"] = [0.0, self.upper]
            d["closed_right"] = math.isfinite(self.upper)
        return d


@dataclass(frozen=True)
class ExtensionResult:
    """Solution of the ``n``-step problem.

    ``t_values`` lists ``t_1 .. t_n`` (the last one chosen inside its
    interval); ``triplets[k-1]`` is the triplet of the ``k``-step extension.
    ``failed_at`` is the first step whose forced ``1/t_k**2`` is not positive.
    """

    feasible: bool
    n: int
    constraints: tuple
    t_values: tuple = field(default_factory=tuple)
    triplets: tuple = field(default_factory=tuple)
    failed_at: int = None

    def to_dict(self):
        return {
            "feasible": self.feasible, "n": self.n, "failed_at": self.failed_at,
            "constraints": [s.to_dict() for s in self.constraints],
            "t_values": list(self.t_values),
            "triplets": [t.to_dict() for t in self.triplets],
        }


def _step_triplet(nu, c, k, t2_k, t2_prev, prod_k, inv_k):
    mass0 = 1.0 - prod_k * (inv_k + 2.0 * c) + t2_k * (t2_prev - 2.0)
    nu_k = _divided(nu, k, prod_k) + DiscreteMeasure([0.0], [max(mass0, 0.0)])
    return RepresentingTriplet(t2_k - c * prod_k - 1.0, c * prod_k, nu_k), mass0


def extend_shift_n(triplet, n, t_last=None):
    """Solve the ``n``-step backward extension problem.

    ``t_1 .. t_{n-1}`` are forced by
    ``1/t_k**2 = (t_1**2 ... t_{k-1}**2) (int dnu/x**k + 2c) + 2 - t_{k-1}**2``
    (with ``t_0**2 = 1 + b + c``); ``t_n`` only has to satisfy the same
    relation with ``>=``.  If ``t_last`` is omitted the right end of the
    final interval is used, or 1 when the interval is unbounded.
    """
    _require_halfline(triplet)
    n = int(n)
    if n < 1:
        raise DomainError(f"number of steps must be positive, got {n}")
    b, c, nu = triplet.b, triplet.c, triplet.nu
    t2_prev = 1.0 + b + c
    prod = 1.0
    constraints, ts, trips = [], [], []
    for k in range(1, n + 1):
        inv = _inverse_moment(nu, k)
        rhs = prod * (inv + 2.0 * c) + 2.0 - t2_prev
        if k < n:
            if not rhs > DEGENERATE_TOL:
                constraints.append(StepConstraint(k, "infeasible", bound=rhs))
                return ExtensionResult(False, n, tuple(constraints),
                                       tuple(ts), tuple(trips), failed_at=k)
            t2 = 1.0 / rhs
            constraints.append(StepConstraint(k, "equality", t_squared=t2, bound=rhs))
        else:
            if math.isinf(rhs):
                constraints.append(StepConstraint(k, "infeasible", bound=rhs))
                return ExtensionResult(False, n, tuple(constraints),
                                       tuple(ts), tuple(trips), failed_at=k)
            upper = 1.0 / math.sqrt(rhs) if rhs > 0 else math.inf
            constraints.append(StepConstraint(k, "inequality", upper=upper, bound=rhs))
            if t_last is None:
                t_k = upper if math.isfinite(upper) else 1.0
            else:
                t_k = float(t_last)
                if not 0 < t_k <= upper:
                    raise DomainError(
                        f"t_{n} = {t_k} lies outside (0, {upper}]")
            t2 = t_k * t_k
        prod *= t2
        trip, _ = _step_triplet(nu, c, k, t2, t2_prev, prod, inv)
        trips.append(trip)
        ts.append(math.sqrt(t2))
        t2_prev = t2
    return ExtensionResult(True, n, tuple(constraints), tuple(ts), tuple(trips))


def extended_hat(triplet, t_values, horizon):
    """``hat`` of ``W_(t_n, .., t_1, lambda_0, ...)`` up to ``horizon``.

    ``t_values`` is ``(t_1, .., t_n)``, the order :class:`ExtensionResult` uses.
    """
    t2 = np.asarray(t_values, dtype=float)[::-1] ** 2
    n = t2.size
    head = np.concatenate([[1.0], np.cumprod(t2)])
    base = synthesize(triplet, 1.0, max(horizon - n, 2)).values
    return np.concatenate([head, head[-1] * base[1:]])[:horizon + 1]


@dataclass(frozen=True)
class InfiniteStepResult:
    """``status`` is ``True``, ``False`` or ``None`` (undecided within the cap)."""

    status: object
    reason: str
    p: int = None

    def to_dict(self):
        return {"status": self.status, "reason": self.reason, "p": self.p}


def infinite_step_check(triplet, cap=INFINITE_SCAN_CAP):
    """Decide whether every finite backward extension exists.

    ``False`` when ``nu`` has an atom at 0, or when some ``sigma_k <= 0``
    with all earlier terms positive (the chain then breaks at step ``k+1``).
    ``True`` when ``b <= c`` or when ``sigma_1 .. sigma_{p-1} > 0`` and
    ``sigma_p >= 1`` for some ``p <= cap``.  Otherwise undecided.
    """
    _require_halfline(triplet)
    if n_lambda(triplet.nu) == 0:
        return InfiniteStepResult(False, "atom-at-zero")
    if triplet.b <= triplet.c:
        return InfiniteStepResult(True, "b<=c", 1)
    tr = sigma_trace(triplet, cap)
    for p, s in enumerate(tr.sigma, start=1):
        if math.isnan(s) or s <= DEGENERATE_TOL:
            return InfiniteStepResult(False, "sigma-nonpositive", p)
        if s >= 1.0:
            return InfiniteStepResult(True, "sigma-criterion", p)
    return InfiniteStepResult(None, "cap-reached", cap)

"""Worked examples rebuilt from their triplets, each conclusion re-checked.

Every builder returns a :class:`FixtureReport` whose ``checks`` are computed
at call time; nothing here stores expected numbers other than the closed
forms the examples assert.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import backext
from .errors import DomainError
from .measures import DiscreteMeasure
from .polys import q_eval
from .sequences import (RepresentingTriplet, is_cpd_window, synthesize,
                        weights_from_gamma)
from .shift_analysis import (FlatnessKind, Verdict, compactness_diagnostics,
                             diagonal_triplet, flatness_analyze,
                             subnormality_check)

REL_TOL = 1e-10
SIGMA_TOL = 1e-9
#: Weights handed to the flatness analyzer; long windows would let the
#: converging tail of a non-flat shift look flat within rounding.
FLATNESS_WINDOW = 8


@dataclass(frozen=True)
class Check:
    label: str
    passed: bool
    detail: str = ""

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.label}" + (
            f": {self.detail}" if self.detail else "")


@dataclass(frozen=True)
class FixtureReport:
    name: str
    params: dict
    triplet: RepresentingTriplet
    gamma: np.ndarray
    weights: np.ndarray
    checks: tuple = field(default_factory=tuple)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def lines(self):
        return [c.line() for c in self.checks]

    def to_dict(self):
        return {
            "name": self.name, "params": self.params,
            "triplet": self.triplet.to_dict(gamma0=1.0),
            "gamma": self.gamma.tolist(), "weights": self.weights.tolist(),
            "checks": [{"label": c.label, "passed": c.passed, "detail": c.detail}
                       for c in self.checks],
            "passed": self.passed,
        }


def _rel_close(a, b, tol=REL_TOL):
    return math.isclose(a, b, rel_tol=tol, abs_tol=tol)


def _close_check(label, got, want, tol=REL_TOL):
    return Check(label, _rel_close(got, want, tol), f"{got:.15g} vs {want:.15g}")


def _finish(name, params, triplet, horizon, checks):
    gamma = synthesize(triplet, 1.0, horizon).values
    return FixtureReport(name, params, triplet, gamma,
                         weights_from_gamma(gamma).weights, tuple(checks))


def two_atom_three_equal_weights(theta=2.0, horizon=24):
    """``b = theta - 1``, ``c = 0``, ``nu = (theta-1)**2/2 (d_{theta/3} + d_{5theta/3})``.

    Its first three weights agree but the fourth does not, and for
    ``theta >= 9/4`` it still admits backward extensions of every length.
    """
    theta = float(theta)
    if not (theta > 1 and theta != 3):
        raise DomainError(f"theta must lie in (1, inf) minus {{3}}, got {theta}")
    half = 0.5 * (theta - 1) ** 2
    trip = RepresentingTriplet(theta - 1, 0.0, DiscreteMeasure(
        [theta / 3, 5 * theta / 3], [half, half]))
    g = synthesize(trip, 1.0, horizon).values
    lam = weights_from_gamma(g).weights
    checks = [_close_check(f"gamma_{n} = theta^{n}", g[n], theta**n)
              for n in range(4)]
    checks.append(_close_check("gamma_4 = theta^2 (13 theta^2 - 8 theta + 4)/9",
                               g[4], theta**2 * (13 * theta**2 - 8 * theta + 4) / 9))
    for n in range(3):
        checks.append(_close_check(f"lambda_{n} = sqrt(theta)", lam[n],
                                   math.sqrt(theta)))
    checks.append(_close_check(
        "lambda_3 = sqrt(13 theta^2 - 8 theta + 4)/(3 sqrt(theta))", lam[3],
        math.sqrt(13 * theta**2 - 8 * theta + 4) / (3 * math.sqrt(theta))))
    flat = flatness_analyze(lam[:FLATNESS_WINDOW], cpd_certified=True)
    checks.append(Check("three equal weights are not enough for flatness",
                        flat.kind is FlatnessKind.INCONCLUSIVE
                        and flat.longest_run == (0, 3),
                        f"{flat.kind}, run {flat.longest_run}"))
    tr = backext.sigma_trace(trip, 1)
    g1 = (4 * theta**2 - 8 * theta + 9) / (5 * theta)
    checks.append(_close_check("sigma_1 = (4 theta^2 - 8 theta + 9)/(5 theta)",
                               tr.sigma[0], g1))
    checks.append(Check("n_lambda = inf", tr.n_lambda == math.inf))
    if theta >= 9 / 4:
        inf_res = backext.infinite_step_check(trip)
        checks.append(Check("infinite backward extension via p = 1",
                            inf_res.status is True and inf_res.p == 1,
                            f"{inf_res.reason}, p = {inf_res.p}"))
        ext = backext.extend_shift_n(trip, 3)
        ok = ext.feasible
        if ok:
            hat = backext.extended_hat(trip, ext.t_values, 2 * 10 + 2)
            ok = bool(is_cpd_window(hat, 10))
        checks.append(Check("3-step extension is CPD on the Hankel window", ok))
        checks.append(Check("t_1 != lambda_0", ext.feasible and
                            abs(ext.t_values[0] - lam[0]) > REL_TOL,
                            f"t_1 = {ext.t_values[0]:.15g}" if ext.feasible else ""))
    return _finish("przyktwofor", {"theta": theta}, trip, horizon, checks)


def two_isometry(theta=0.7, k=None, horizon=24):
    """``gamma_n = 1 + n theta``: the chain of backward extensions stops at ``k``.

    With ``theta`` in ``(1/k, 1/(k-1))`` the ``k``-step extension exists and
    the ``(k+1)``-step one does not.
    """
    theta = float(theta)
    if not theta > 0:
        raise DomainError(f"theta must be positive, got {theta}")
    k_auto = 1 if theta > 1 else math.ceil(1 / theta)
    if theta <= 1 and (1 / k_auto >= theta or theta == 1):
        raise DomainError(f"theta = {theta} sits on an endpoint 1/k")
    if k is None:
        k = k_auto
    elif int(k) != k_auto:
        raise DomainError(f"theta = {theta} lies outside (1/{k}, 1/{int(k) - 1})")
    k = int(k)
    trip = RepresentingTriplet(theta, 0.0, DiscreteMeasure())
    g = synthesize(trip, 1.0, horizon).values
    lam = weights_from_gamma(g).weights
    checks = [Check("gamma_n = 1 + n theta", bool(np.allclose(
        g, 1 + theta * np.arange(horizon + 1), rtol=REL_TOL, atol=0)))]
    want = np.sqrt((1 + (np.arange(horizon) + 1) * theta)
                   / (1 + np.arange(horizon) * theta))
    checks.append(Check("lambda_n = sqrt((1 + (n+1) theta)/(1 + n theta))",
                        bool(np.allclose(lam, want, rtol=REL_TOL, atol=0))))
    tr = backext.sigma_trace(trip, 8)
    n = np.arange(1, 9)
    formula = (1 - n * theta) / (1 - (n - 1) * theta)
    checks.append(Check("sigma_n = (1 - n theta)/(1 - (n-1) theta), n <= 8",
                        bool(np.allclose(tr.sigma, formula, rtol=SIGMA_TOL,
                                         atol=SIGMA_TOL))))
    ok = all(s > 0 for s in tr.sigma[:k - 1]) and (k > 8 or tr.sigma[k - 1] < 0)
    label = f"sigma_{k} < 0" if k == 1 else f"sigma_1 .. sigma_{k - 1} > 0, sigma_{k} < 0"
    checks.append(Check(label, ok))
    ext = backext.extend_shift_n(trip, k)
    last = ext.constraints[-1] if ext.constraints else None
    checks.append(Check(f"{k}-step extension feasible with t_{k} free",
                        ext.feasible and last.upper == math.inf))
    forced = ext.t_values[:-1]
    checks.append(Check("t_j^2 sigma_j = 1 along the forced steps",
                        all(_rel_close(t * t * s, 1.0, SIGMA_TOL)
                            for t, s in zip(forced, tr.sigma))))
    nxt = backext.extend_shift_n(trip, k + 1)
    checks.append(Check(f"{k + 1}-step extension infeasible",
                        not nxt.feasible and nxt.failed_at == k))
    checks.append(Check("not subnormal", not subnormality_check(trip)))
    return _finish("muritru", {"theta": theta, "k": k}, trip, horizon, checks)


def single_atom(theta=0.5, horizon=64):
    """``b = c = 0``, ``nu = d_theta``: compactness of ``B`` and ``F(R_+)``
    flips as ``theta`` crosses 1."""
    theta = float(theta)
    if not (theta > 0 and theta != 1):
        raise DomainError(f"theta must lie in (0, inf) minus {{1}}, got {theta}")
    trip = RepresentingTriplet(0.0, 0.0, DiscreteMeasure.dirac(theta))
    g = synthesize(trip, 1.0, horizon).values
    ns = np.arange(horizon + 1)
    direct = np.array([1.0 + sum((m - j - 1) * theta**j for j in range(m - 1))
                       for m in ns])
    checks = [Check("gamma_n = 1 + Q_n(theta)",
                    bool(np.allclose(g, direct, rtol=1e-9, atol=0)))]
    win = min(12, (horizon - 2) // 2)
    checks.append(Check("CPD on the Hankel window", bool(is_cpd_window(g, win))))
    diag = diagonal_triplet(trip, horizon)
    tot = diag.column("nu_total")
    ks = np.arange(horizon)
    want = theta**ks / (1 + np.array([q_eval(k, theta) for k in ks]))
    checks.append(Check("nu_k(R_+) = theta^k/(1 + Q_k(theta))",
                        bool(np.allclose(tot, want, rtol=1e-9, atol=0))))
    verdicts = {v.operator: v for v in compactness_diagnostics(trip, horizon)}
    if theta < 1:
        checks.append(Check("B compact", verdicts["B"].verdict is Verdict.COMPACT,
                            verdicts["B"].rule))
        tail = np.asarray(verdicts["F_total"].tail_values)
        checks.append(Check("F(R_+) compact, diagonal tail decreasing to 0",
                            verdicts["F_total"].verdict is Verdict.COMPACT
                            and bool(np.all(np.diff(tail) < 0))
                            and tail[-1] < tot[0] * 1e-2))
        checks.append(Check("not subnormal", not subnormality_check(trip)))
    else:
        checks.append(Check("B not compact",
                            verdicts["B"].verdict is Verdict.NOT_COMPACT,
                            verdicts["B"].rule))
        checks.append(Check("F(R_+) not compact",
                            verdicts["F_total"].verdict is Verdict.NOT_COMPACT,
                            verdicts["F_total"].rule))
    checks.append(Check("C compact", verdicts["C"].verdict is Verdict.COMPACT))
    return _finish("oliun", {"theta": theta}, trip, horizon, checks)


def quadratic_drift(c=1.0, nu=None, horizon=24):
    """``b = -c`` with ``c > 0``: first weight 1, not the unilateral shift."""
    c = float(c)
    if not c > 0:
        raise DomainError(f"c must be positive, got {c}")
    nu = DiscreteMeasure.dirac(2.0) if nu is None else nu
    trip = RepresentingTriplet(-c, c, nu)
    if not trip.supported_on_halfline:
        raise DomainError("nu must be supported in [0, inf)")
    g = synthesize(trip, 1.0, horizon).values
    lam = weights_from_gamma(g).weights
    checks = [_close_check("lambda_0 = 1", lam[0], 1.0),
              Check("lambda_1 != 1", abs(lam[1] - 1) > REL_TOL, f"{lam[1]:.15g}")]
    flat = flatness_analyze(lam[:FLATNESS_WINDOW], cpd_certified=True)
    checks.append(Check("not the unilateral shift",
                        flat.kind is not FlatnessKind.UNILATERAL, str(flat.kind)))
    checks.append(Check("not subnormal", not subnormality_check(trip)))
    res = backext.infinite_step_check(trip)
    if backext.n_lambda(nu) == math.inf:
        checks.append(Check("infinite backward extension", res.status is True,
                            res.reason))
    else:
        checks.append(Check("no infinite backward extension (atom at 0)",
                            res.status is False, res.reason))
    return _finish("gusv", {"c": c, "nu": nu.to_dict()}, trip, horizon, checks)


EXAMPLES = {
    "oliun": single_atom,
    "muritru": two_isometry,
    "przyktwofor": two_atom_three_equal_weights,
    "gusv": quadratic_drift,
}


def reproduce_example(name, **params):
    """Rebuild a named example; ``None`` params fall back to defaults."""
    try:
        builder = EXAMPLES[name]
    except KeyError:
        raise DomainError(
            f"unknown example {name!r}; choose from {sorted(EXAMPLES)}") from None
    return builder(**{k: v for k, v in params.items() if v is not None})

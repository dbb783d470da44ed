"""Diagnostics of the weighted shift built from a triplet.

Covers the diagonal representing triplet ``(b_k, c_k, nu_k)``, rule-based
compactness verdicts, subnormality and Berger measures, and detection of
flatness from runs of equal weights.
"""

import csv
import enum
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PositivityError
from .measures import POINT_TOL, DiscreteMeasure, gamma_coeffs, moment
from .sequences import (DEFAULT_FLOOR, DEFAULT_HORIZON, DEFAULT_WINDOW,
                        RepresentingTriplet, WeightSequence,
                        is_stieltjes_window, synthesize)

#: Tolerance on ``b + Gamma_1 != 0`` in the compact-B rule.
NONZERO_TOL = 1e-10
#: Relative tolerance for weight equality in flatness detection.
EQUALITY_TOL = 1e-10
#: Berger mass at 1 may dip this far below 0 and still count as valid.
BERGER_TOL = 1e-10
TAIL_LEN = 8


@dataclass(frozen=True)
class DiagonalEntry:
    k: int
    b: float
    c: float
    nu: DiscreteMeasure

    @property
    def nu_total(self):
        return self.nu.total_mass

    def as_triplet(self):
        return RepresentingTriplet(self.b, self.c, self.nu)


@dataclass(frozen=True)
class DiagonalTriplet:
    entries: tuple
    hat: np.ndarray

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, k):
        return self.entries[k]

    def column(self, name):
        return np.array([getattr(e, name) for e in self.entries])

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "b_k", "c_k", "nu_k_total"])
        for e in self.entries:
            writer.writerow([e.k, f"{e.b:.15g}", f"{e.c:.15g}",
                             f"{e.nu_total:.15g}"])
        return buf.getvalue()


def diagonal_triplet(triplet, horizon=DEFAULT_HORIZON):
    """Diagonal terms of the operator triplet of the shift with ``hat = synthesize(triplet)``.

    ``b_k = (hat_{k+1} - hat_k - c) / hat_k``, ``c_k = c / hat_k`` and
    ``nu_k = x**k nu / hat_k`` for ``k = 0 .. horizon - 1``.
    """
    hat = synthesize(triplet, 1.0, horizon).values
    bad = np.flatnonzero(~(hat > 0))
    if bad.size:
        raise PositivityError(int(bad[0]), float(hat[bad[0]]))
    c = triplet.c
    entries = []
    for k in range(horizon):
        h = hat[k]
        nu_k = triplet.nu.reweighted(lambda x, k=k, h=h: x**k / h)
        entries.append(DiagonalEntry(k, (hat[k + 1] - h - c) / h, c / h, nu_k))
    return DiagonalTriplet(tuple(entries), hat)


class Verdict(str, enum.Enum):
    COMPACT = "compact"
    NOT_COMPACT = "not-compact"
    INCONCLUSIVE = "inconclusive"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class CompactnessVerdict:
    operator: str
    verdict: Verdict
    rule: str
    tail_values: tuple
    tail_liminf: float

    def to_dict(self):
        return {"operator": self.operator, "verdict": str(self.verdict),
                "rule": self.rule, "tail_values": list(self.tail_values),
                "tail_liminf": self.tail_liminf}


def _tail(values):
    values = np.asarray(values, dtype=float)
    quarter = values[-max(1, values.size // 4):]
    return (tuple(float(v) for v in values[-TAIL_LEN:]),
            float(np.min(np.abs(quarter))))


def compactness_diagnostics(triplet, horizon=DEFAULT_HORIZON):
    """Verdicts for the diagonal operators ``B``, ``C`` and ``F(R_+)``.

    Compactness has no finite test.  Each verdict names the rule that decided
    it; the diagonal tail (last entries, and the min of ``|value|`` over the
    last quarter) is attached as corroboration only.
    """
    if not triplet.supported_on_halfline:
        raise DomainError("nu must be supported in [0, inf)")
    diag = diagonal_triplet(triplet, horizon)
    theta, g1, g2 = gamma_coeffs(triplet.nu)
    b, c = triplet.b, triplet.c
    out = []

    tail_c = _tail(diag.column("c"))
    out.append(CompactnessVerdict("C", Verdict.COMPACT, "C-always-compact",
                                  *tail_c))

    tail_b = _tail(diag.column("b"))
    if theta <= 1 and c == 0 and abs(b + g1) > NONZERO_TOL:
        b_verdict = (Verdict.COMPACT, "B-compact:sup<=1,c=0,b+Gamma1!=0")
    elif theta > 1:
        # The smallest atom above 1 leaves a gap (1, theta) and the integral
        # of (x-1)^-2 over [0, 1) is a finite sum: both hypotheses hold.
        b_verdict = (Verdict.NOT_COMPACT, "B-not-compact:sup>1,gap-above-1")
    else:
        b_verdict = (Verdict.INCONCLUSIVE, "none")
    out.append(CompactnessVerdict("B", *b_verdict, *tail_b))

    tail_f = _tail(diag.column("nu_total"))
    drift = b + g1
    if theta > 1:
        f_verdict = (Verdict.NOT_COMPACT, "F-not-compact:sup>1,1-outside-support")
    elif theta < 1 and (c > 0 or drift > NONZERO_TOL
                        or (abs(drift) <= NONZERO_TOL and g2 < 1 - NONZERO_TOL)):
        # nu_k(R_+) = int x^k dnu / hat_k: the numerator decays like sup^k and
        # hat_k stays bounded away from 0 (it grows, or decreases to 1 - Gamma_2 > 0).
        f_verdict = (Verdict.COMPACT, "F-compact:sup<1,hat-bounded-below")
    else:
        f_verdict = (Verdict.INCONCLUSIVE, "none")
    out.append(CompactnessVerdict("F_total", *f_verdict, *tail_f))
    return out


@dataclass(frozen=True)
class BergerMeasure:
    """Candidate representing measure of ``hat``.

    ``valid`` is false when the remainder put at 1 is negative.
    """

    measure: DiscreteMeasure
    valid: bool
    mass_at_one: float

    def to_dict(self):
        return {"measure": self.measure.to_dict(), "valid": self.valid,
                "mass_at_one": self.mass_at_one}


def berger_from_triplet(triplet, gamma0=1.0):
    """``mu = nu / (x-1)**2 + (gamma0 - int dnu/(x-1)**2) delta_1`` for ``c = 0``."""
    if triplet.c != 0:
        raise DomainError("a Berger measure requires c = 0")
    nu = triplet.nu
    dens = nu.reweighted(lambda x: 1.0 / (x - 1.0) ** 2)
    rest = gamma0 - dens.total_mass
    valid = rest >= -BERGER_TOL
    mu = dens + DiscreteMeasure([1.0], [max(rest, 0.0)]) if valid else dens
    return BergerMeasure(mu, bool(valid), float(rest))


def triplet_from_berger(mu):
    """Forward map ``b = int (x-1) dmu``, ``c = 0``, ``nu = (x-1)**2 mu``.

    Returns ``(triplet, gamma0)`` with ``gamma0`` the total mass of ``mu``.
    Atoms within ``POINT_TOL`` of 1 are snapped to 1 and so drop out of ``nu``.
    """
    x = np.where(np.abs(mu.positions - 1.0) <= POINT_TOL, 1.0, mu.positions)
    mu = DiscreteMeasure(x, mu.weights)
    b = float(np.sum(mu.weights * (mu.positions - 1.0)))
    nu = mu.reweighted(lambda x: (x - 1.0) ** 2)
    return RepresentingTriplet(b, 0.0, nu), mu.total_mass


def subnormality_check(triplet, window=DEFAULT_WINDOW, floor=DEFAULT_FLOOR,
                       horizon=None):
    """``c == 0``, ``hat`` passes the Stieltjes window test and the Berger
    remainder at 1 is not negative."""
    if triplet.c != 0:
        return False
    horizon = max(2 * window + 1, 2) if horizon is None else horizon
    hat = synthesize(triplet, 1.0, horizon)
    if not is_stieltjes_window(hat, window, floor):
        return False
    return berger_from_triplet(triplet).mass_at_one >= -floor


class FlatnessKind(str, enum.Enum):
    FLAT_FROM_ONE = "flat-from-1"
    FLAT_ONES = "flat-ones"
    SCALED_UNILATERAL = "scalar-multiple-of-unilateral-shift"
    UNILATERAL = "unilateral-shift"
    INCONCLUSIVE = "inconclusive"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class FlatnessVerdict:
    """Result of :func:`flatness_analyze`.

    ``index`` is where the matching run starts; ``berger`` is the Berger
    measure the matching rule predicts.  ``consistent`` records whether the
    supplied weights agree with the predicted conclusion; a hypothesis match
    with ``consistent == False`` means the input could not have been CPD (or
    the tolerance is too loose).  ``longest_run`` is ``(start, length)``.
    """

    kind: FlatnessKind
    index: int
    berger: DiscreteMeasure
    consistent: bool
    longest_run: tuple
    rejected: tuple = field(default_factory=tuple)

    def to_dict(self):
        return {
            "kind": str(self.kind),
            "index": self.index,
            "berger": None if self.berger is None else self.berger.to_dict(),
            "consistent": self.consistent,
            "longest_run": {"start": self.longest_run[0],
                            "length": self.longest_run[1]},
            "rejected": [{"kind": str(k), "index": i} for k, i in self.rejected],
        }


def _eq(a, b, tol):
    return abs(a - b) <= tol * max(abs(a), abs(b))


def _runs(w, tol):
    runs, start = [], 0
    for i in range(1, len(w) + 1):
        if i == len(w) or not _eq(w[i], w[start], tol):
            runs.append((start, i - start))
            start = i
    return runs


def flatness_analyze(weights, cpd_certified=False, equality_tolerance=EQUALITY_TOL):
    """Detect the weight patterns that force a CPD shift to be flat.

    Patterns, tried in this order:

    * ``lambda_0 = lambda_1 = 1``: the unilateral shift;
    * ``lambda_0 = .. = lambda_3 != 1``: ``lambda_0`` times the unilateral shift;
    * ``lambda_k = lambda_{k+1} = 1`` for some ``k >= 1``: all weights from
      index 1 equal 1 and ``mu = (1 - lambda_0**2) d_0 + lambda_0**2 d_1``;
    * four equal weights ``!= 1`` from some ``k >= 1``: all weights from index
      1 equal ``lambda_1``, ``lambda_0 <= lambda_1`` and
      ``mu = (1 - Z) d_0 + Z d_{lambda_1**2}`` with ``Z = (lambda_0/lambda_1)**2``.

    A match whose conclusion the weights contradict is recorded in
    ``rejected`` and the scan continues.
    """
    if not cpd_certified:
        raise DomainError("flatness analysis requires a shift certified CPD")
    w = np.asarray(weights, dtype=float)
    WeightSequence(w)
    tol = equality_tolerance
    runs = _runs(w, tol)
    longest = max(runs, key=lambda r: (r[1], -r[0]))
    is_one = lambda v: abs(v - 1.0) <= tol  # noqa: E731

    def flat_from(value, start):
        return all(_eq(v, value, tol) for v in w[start:])

    candidates = []
    if w.size >= 2 and is_one(w[0]) and is_one(w[1]):
        candidates.append((FlatnessKind.UNILATERAL, 0))
    if w.size >= 4 and not is_one(w[0]) and all(_eq(w[j], w[0], tol) for j in (1, 2, 3)):
        candidates.append((FlatnessKind.SCALED_UNILATERAL, 0))
    for k in range(1, w.size):
        if k + 1 < w.size and is_one(w[k]) and is_one(w[k + 1]):
            candidates.append((FlatnessKind.FLAT_ONES, k))
        if (k + 3 < w.size and not is_one(w[k])
                and all(_eq(w[k + j], w[k], tol) for j in (1, 2, 3))):
            candidates.append((FlatnessKind.FLAT_FROM_ONE, k))

    rejected = []
    for kind, k in candidates:
        if kind is FlatnessKind.UNILATERAL:
            ok = flat_from(1.0, 0)
            mu = DiscreteMeasure.dirac(1.0)
        elif kind is FlatnessKind.SCALED_UNILATERAL:
            ok = flat_from(w[0], 0)
            mu = DiscreteMeasure.dirac(w[0] ** 2)
        elif kind is FlatnessKind.FLAT_ONES:
            ok = flat_from(1.0, 1) and w[0] <= 1.0 + tol
            z = min(w[0] ** 2, 1.0)
            mu = DiscreteMeasure([0.0, 1.0], [1.0 - z, z])
        else:
            ok = flat_from(w[1], 1) and w[0] <= w[1] * (1.0 + tol)
            z = min((w[0] / w[1]) ** 2, 1.0)
            mu = DiscreteMeasure([0.0, w[1] ** 2], [1.0 - z, z])
        if ok:
            return FlatnessVerdict(kind, k, mu, True, longest, tuple(rejected))
        rejected.append((kind, k))
    return FlatnessVerdict(FlatnessKind.INCONCLUSIVE, None, None,
                           not rejected, longest, tuple(rejected))


def berger_moments(mu, n_max):
    """``int x**n dmu`` for ``n = 0 .. n_max``."""
    return np.array([moment(mu, n) for n in range(int(n_max) + 1)])

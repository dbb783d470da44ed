"""Sequence synthesis from representing triplets and Hankel-based verifiers.

A real sequence ``gamma`` of exponential growth is conditionally positive
definite exactly when

    gamma_n = gamma_0 + b n + c n**2 + sum_i w_i Q_n(x_i)

for a triplet ``(b, c, nu)`` with ``c >= 0`` and ``nu({1}) = 0``.  This module
builds sequences in that form and checks them against the definitions with
finite Hankel windows.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidMeasureError, NotCPDError, PositivityError, WindowError
from .measures import DiscreteMeasure, check_no_unit_atom, moment, q_integrals
from .polys import forward_diff

DEFAULT_HORIZON = 64
DEFAULT_WINDOW = 12
DEFAULT_FLOOR = 1e-8


@dataclass(frozen=True)
class RepresentingTriplet:
    """The parameters ``(b, c, nu)`` of a CPD sequence."""

    b: float
    c: float = 0.0
    nu: DiscreteMeasure = field(default_factory=DiscreteMeasure)

    def __post_init__(self):
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "c", float(self.c))
        if not self.c >= 0:
            raise InvalidMeasureError(f"c must be nonnegative, got {self.c}")
        if not isinstance(self.nu, DiscreteMeasure):
            raise InvalidMeasureError("nu must be a DiscreteMeasure")
        check_no_unit_atom(self.nu)

    @property
    def supported_on_halfline(self):
        return self.nu.is_zero or self.nu.support_min() >= 0

    def to_dict(self, gamma0=None):
        out = {"b": self.b, "c": self.c, "nu": self.nu.to_dict()}
        if gamma0 is not None:
            out["gamma0"] = gamma0
        return out

    @classmethod
    def from_dict(cls, data):
        """Parse ``{"b", "c", "nu", "gamma0"}``; returns ``(triplet, gamma0)``."""
        try:
            nu = DiscreteMeasure.from_dict(data.get("nu", {"atoms": []}))
            trip = cls(float(data["b"]), float(data.get("c", 0.0)), nu)
            return trip, float(data.get("gamma0", 1.0))
        except (KeyError, TypeError, AttributeError) as exc:
            raise InvalidMeasureError(f"malformed triplet: {data!r}") from exc


@dataclass(frozen=True, eq=False)
class CpdSequence:
    """Finite window ``gamma_0 .. gamma_N`` of a real sequence.

    ``source`` is ``"triplet"`` for synthesized sequences, in which case the
    generating ``triplet`` is kept and carries the unconditional CPD
    certificate; any other value means user-supplied data.
    """

    values: np.ndarray
    source: str = "supplied"
    triplet: RepresentingTriplet = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __len__(self):
        return self.values.size

    def __getitem__(self, item):
        return self.values[item]

    @property
    def horizon(self):
        return self.values.size - 1


@dataclass(frozen=True, eq=False)
class WeightSequence:
    """Positive weights ``lambda_0 .. lambda_{N-1}`` of a weighted shift."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).ravel()
        bad = np.flatnonzero(~(w > 0))
        if bad.size:
            raise PositivityError(int(bad[0]), float(w[bad[0]]))
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def __array__(self, dtype=None, copy=None):
        return self.weights if dtype is None else self.weights.astype(dtype)

    def __len__(self):
        return self.weights.size

    def __getitem__(self, item):
        return self.weights[item]


@dataclass(frozen=True)
class WindowCheck:
    """Outcome of a finite Hankel test; truthy when the test passed.

    ``min_eigenvalue`` is the raw smallest eigenvalue, ``scale`` the max-abs
    entry of the matrix the floor was scaled by.
    """

    passed: bool
    min_eigenvalue: float
    scale: float
    window: int

    def __bool__(self):
        return self.passed

    @property
    def relative_margin(self):
        return self.min_eigenvalue / self.scale if self.scale > 0 else 0.0


def synthesize(triplet, gamma0=1.0, horizon=DEFAULT_HORIZON):
    """``gamma_n = gamma0 + b n + c n**2 + int Q_n dnu`` for ``n = 0 .. horizon``."""
    horizon = int(horizon)
    if horizon < 2:
        raise WindowError(f"horizon must be at least 2, got {horizon}")
    n = np.arange(horizon + 1, dtype=float)
    values = (gamma0 + triplet.b * n + triplet.c * n**2
              + q_integrals(triplet.nu, horizon))
    return CpdSequence(values, source="triplet", triplet=triplet)


def weights_from_gamma(gamma):
    """``lambda_n = sqrt(gamma_{n+1} / gamma_n)``."""
    g = np.asarray(gamma, dtype=float)
    bad = np.flatnonzero(~(g > 0))
    if bad.size:
        raise PositivityError(int(bad[0]), float(g[bad[0]]))
    return WeightSequence(np.sqrt(g[1:] / g[:-1]))


def gamma_hat(weights):
    """``1, lambda_0**2, lambda_0**2 lambda_1**2, ...`` (one term longer)."""
    w = np.asarray(weights, dtype=float)
    return CpdSequence(np.concatenate([[1.0], np.cumprod(w * w)]),
                       source="weights")


def shifted_triplet(triplet, k, gamma0=1.0):
    """Triplet of the shifted sequence ``n -> gamma_{k+n}`` and its first term.

    Returns
    -------
    (RepresentingTriplet, float)
        The new triplet and ``gamma_k``.

    Raises
    ------
    NotCPDError
        For odd ``k`` when ``nu`` charges the negative half-line; the shifted
        sequence is then not CPD.
    """
    k = int(k)
    if k < 1:
        raise ValueError(f"shift must be positive, got {k}")
    nu = triplet.nu
    if k % 2 == 1 and not triplet.supported_on_halfline:
        raise NotCPDError(
            f"odd shift {k} of a triplet with negative atoms is not CPD")
    b_k = triplet.b + 2 * k * triplet.c + sum(moment(nu, j) for j in range(k))
    nu_k = nu.reweighted(lambda x: x**k)
    gamma_k = float(synthesize(triplet, gamma0, max(k, 2))[k])
    return RepresentingTriplet(b_k, triplet.c, nu_k), gamma_k


def hankel(seq, window, offset=0):
    """The ``(window+1) x (window+1)`` matrix ``H[i, j] = seq[offset + i + j]``."""
    seq = np.asarray(seq, dtype=float)
    idx = np.add.outer(np.arange(window + 1), np.arange(window + 1)) + offset
    return seq[idx]


def psd_check(matrix, floor=DEFAULT_FLOOR, window=None, scale=None):
    """Symmetric eigenvalue test ``min eig >= -floor * scale``.

    ``scale`` defaults to ``max|H|``.
    """
    vals = np.linalg.eigvalsh(matrix)
    if scale is None:
        scale = float(np.max(np.abs(matrix))) if matrix.size else 0.0
    lo = float(vals[0])
    return WindowCheck(bool(lo >= -floor * scale), lo, scale,
                       matrix.shape[0] - 1 if window is None else window)


def _need(gamma, top, what):
    g = np.asarray(gamma, dtype=float)
    if g.size - 1 < top:
        raise WindowError(
            f"{what} needs terms up to index {top}, horizon is {g.size - 1}")
    return g


def is_pd_window(gamma, window=DEFAULT_WINDOW, floor=DEFAULT_FLOOR):
    """Positive semidefiniteness of the Hankel matrix ``gamma_{i+j}``, ``i, j <= window``.

    A passing result only certifies the absence of violations up to the
    window.
    """
    g = _need(gamma, 2 * window, "PD window")
    return psd_check(hankel(g, window), floor, window)


def is_cpd_window(gamma, window=DEFAULT_WINDOW, floor=DEFAULT_FLOOR):
    """Conditional positive definiteness up to ``window``.

    Zero-sum coefficient vectors are spanned by ``e_i - e_{i+1}``; in that
    basis the Hankel form of ``gamma`` becomes the Hankel form of the second
    difference, so the test is PSD-ness of ``H[i, j] = (D^2 gamma)_{i+j}``.
    The floor is scaled by the larger of ``max|H|`` and ``max|gamma|`` over
    the window: rounding in the differences is proportional to ``gamma``,
    and an (almost) affine sequence would otherwise be judged on noise.
    """
    g = _need(gamma, 2 * window + 2, "CPD window")[:2 * window + 3]
    h = hankel(forward_diff(g, 2), window)
    scale = max(float(np.max(np.abs(h))), float(np.max(np.abs(g))))
    return psd_check(h, floor, window, scale)


def is_stieltjes_window(gamma, window=DEFAULT_WINDOW, floor=DEFAULT_FLOOR):
    """Both ``gamma`` and ``n -> gamma_{n+1}`` pass the PD window test.

    The returned check carries the worse of the two relative margins.
    """
    g = _need(gamma, 2 * window + 1, "Stieltjes window")
    first = psd_check(hankel(g, window), floor, window)
    second = psd_check(hankel(g, window, offset=1), floor, window)
    if not second.passed or (first.passed
                             and second.relative_margin < first.relative_margin):
        return WindowCheck(first.passed and second.passed,
                           second.min_eigenvalue, second.scale, window)
    return WindowCheck(first.passed and second.passed,
                       first.min_eigenvalue, first.scale, window)


def growth_estimate(gamma):
    """``max |gamma_n|**(1/n)`` over the upper half of the horizon."""
    g = np.abs(np.asarray(gamma, dtype=float))
    N = g.size - 1
    if N < 8:
        raise WindowError(f"growth estimate needs horizon >= 8, got {N}")
    n = np.arange(max(1, N // 2), N + 1)
    with np.errstate(divide="ignore"):
        return float(np.max(np.exp(np.log(g[n]) / n)))


def two_point_support_test(gamma, k, rtol=1e-10):
    """Whether ``gamma_{k+1}**2 == gamma_k gamma_{k+2}`` up to ``rtol``.

    For a non-degenerate Stieltjes moment sequence this holds exactly when
    the representing measure is a single atom (``k = 0``) or lives on
    ``{0, zeta}`` (``k >= 1``).
    """
    g = _need(gamma, k + 2, "two-point test")
    lhs = g[k + 1] ** 2
    rhs = g[k] * g[k + 2]
    return bool(math.isclose(lhs, rhs, rel_tol=rtol, abs_tol=0.0))

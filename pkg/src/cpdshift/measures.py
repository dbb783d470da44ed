"""Finite atomic measures on the real line and the integrals taken against them."""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidMeasureError
from .polys import q_eval, q_table

#: Atoms closer than this are merged into one.
MERGE_TOL = 1e-12
#: Distance from a reference point (0 or 1) under which an atom sits *at* it.
POINT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """A finite nonnegative combination of Dirac masses.

    Atoms are stored sorted by position, near-duplicates merged and zero
    weights dropped.  The zero measure (no atoms) is valid.

    Parameters
    ----------
    positions, weights : array_like
        Atom locations and their (nonnegative) masses.
    """

    positions: np.ndarray = field(default_factory=lambda: np.zeros(0))
    weights: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.positions, dtype=float)).ravel()
        w = np.atleast_1d(np.asarray(self.weights, dtype=float)).ravel()
        if x.shape != w.shape:
            raise InvalidMeasureError(
                f"{x.size} positions but {w.size} weights")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(w))):
            raise InvalidMeasureError("atoms must be finite")
        if np.any(w < 0):
            raise InvalidMeasureError(f"negative weight in {w.tolist()}")
        order = np.argsort(x, kind="stable")
        x, w = x[order], w[order]
        mx, mw = [], []
        for xi, wi in zip(x, w):
            if mx and xi - mx[-1] <= MERGE_TOL:
                mw[-1] += wi
            else:
                mx.append(xi)
                mw.append(wi)
        keep = [i for i, wi in enumerate(mw) if wi > 0]
        x = np.array([mx[i] for i in keep], dtype=float)
        w = np.array([mw[i] for i in keep], dtype=float)
        x.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "positions", x)
        object.__setattr__(self, "weights", w)

    @classmethod
    def dirac(cls, x, weight=1.0):
        return cls([x], [weight])

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def from_pairs(cls, pairs):
        pairs = list(pairs)
        return cls([p[0] for p in pairs], [p[1] for p in pairs])

    @property
    def atoms(self):
        return list(zip(self.positions.tolist(), self.weights.tolist()))

    @property
    def is_zero(self):
        return self.positions.size == 0

    @property
    def total_mass(self):
        return float(self.weights.sum())

    def mass_at(self, x, tol=POINT_TOL):
        hit = np.abs(self.positions - x) <= tol
        return float(self.weights[hit].sum())

    def support_max(self):
        """Largest atom, ``-inf`` for the zero measure."""
        return float(self.positions[-1]) if self.positions.size else -math.inf

    def support_min(self):
        return float(self.positions[0]) if self.positions.size else math.inf

    def reweighted(self, factor):
        """Return the measure with weights multiplied by ``factor(positions)``."""
        f = np.asarray(factor(self.positions), dtype=float)
        return DiscreteMeasure(self.positions, self.weights * f)

    def scaled(self, s):
        return DiscreteMeasure(self.positions, self.weights * float(s))

    def __add__(self, other):
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return DiscreteMeasure(np.concatenate([self.positions, other.positions]),
                               np.concatenate([self.weights, other.weights]))

    def __eq__(self, other):
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return (np.array_equal(self.positions, other.positions)
                and np.array_equal(self.weights, other.weights))

    def __repr__(self):
        inner = ", ".join(f"{w:g}*d({x:g})" for x, w in self.atoms)
        return f"DiscreteMeasure({inner or '0'})"

    def allclose(self, other, atol=1e-10):
        """Atom-wise comparison with absolute tolerance ``atol``.

        Atoms lighter than ``atol`` are ignored on both sides.
        """
        a, b = self.weights > atol, other.weights > atol
        if a.sum() != b.sum():
            return False
        return bool(np.all(np.abs(self.positions[a] - other.positions[b]) <= atol)
                    and np.all(np.abs(self.weights[a] - other.weights[b]) <= atol))

    def to_dict(self):
        return {"atoms": [{"x": x, "w": w} for x, w in self.atoms]}

    @classmethod
    def from_dict(cls, data):
        try:
            atoms = data["atoms"]
            return cls([float(a["x"]) for a in atoms],
                       [float(a["w"]) for a in atoms])
        except (KeyError, TypeError) as exc:
            raise InvalidMeasureError(f"malformed measure: {data!r}") from exc


def moment(nu, k):
    """``sum_i w_i x_i**k``; ``inf`` for ``k < 0`` when an atom sits at 0."""
    k = int(k)
    x, w = nu.positions, nu.weights
    if k < 0:
        if np.any(np.abs(x) <= POINT_TOL):
            return math.inf
        return float(np.sum(w * x**k))
    # numpy keeps 0.0**0 == 1
    return float(np.sum(w * x**k))


def q_integral(nu, n):
    """``sum_i w_i Q_n(x_i)``."""
    if nu.is_zero:
        return 0.0
    return float(np.sum(nu.weights * q_eval(n, nu.positions)))


def q_integrals(nu, n_max):
    """Vector of ``q_integral(nu, n)`` for ``n = 0 .. n_max``."""
    if nu.is_zero:
        return np.zeros(int(n_max) + 1)
    with np.errstate(over="ignore", invalid="ignore"):
        return q_table(n_max, nu.positions) @ nu.weights


def check_no_unit_atom(nu):
    if nu.mass_at(1.0) > 0:
        raise InvalidMeasureError("measure has an atom at 1")


def gamma_coeffs(nu):
    """Support maximum and the inverse-power integrals against ``1 - x``.

    Returns
    -------
    theta_sup : float
        ``max`` atom position, ``-inf`` for the zero measure.
    gamma1, gamma2 : float
        ``sum_i w_i / (1 - x_i)**j`` for ``j = 1, 2``.  These are always
        finite sums; callers only interpret them when ``theta_sup <= 1``.
    """
    check_no_unit_atom(nu)
    if nu.is_zero:
        return -math.inf, 0.0, 0.0
    d = 1.0 - nu.positions
    return (nu.support_max(),
            float(np.sum(nu.weights / d)),
            float(np.sum(nu.weights / d**2)))

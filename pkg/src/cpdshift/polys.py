"""The kernel polynomials ``Q_n`` and the forward difference operator.

``Q_n(x) = sum_{j=0}^{n-2} (n - j - 1) x**j`` for ``n >= 2`` and ``Q_0 = Q_1 = 0``.
Away from ``x = 1`` the closed form ``(x**n - 1 - n (x - 1)) / (x - 1)**2`` is
used; it has a removable singularity at 1, so inside ``|x - 1| < SWITCH`` the
sum is evaluated by Horner's rule instead.
"""

import numpy as np

from .errors import DomainError

#: Below this distance from 1 the closed form is abandoned for direct summation.
SWITCH = 1e-4

#: Default relative tolerance for identity checks.
RTOL = 1e-9


def _horner(n, x):
    # Horner's rule on the coefficient list (1, 2, ..., n-1) is exactly the
    # recurrence Q_{k+1} = x Q_k + k started from Q_1 = 0.
    acc = np.zeros_like(x)
    for k in range(1, n):
        acc = acc * x + k
    return acc


def _closed(n, x):
    # For x > 0, x**n - 1 is formed as expm1(n log1p(x - 1)) so that nothing
    # cancels against the leading "1" when x is close to 1.
    d = x - 1.0
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        pos = x > 0
        head = np.where(pos, np.expm1(n * np.log1p(np.where(pos, d, 0.0))),
                        x**n - 1.0)
        return (head - n * d) / (d * d)


def q_eval(n, x):
    """Evaluate ``Q_n`` at ``x`` (scalar or array).

    Parameters
    ----------
    n : int
        Nonnegative order.
    x : float or array_like
        Evaluation point(s).

    Returns
    -------
    float or numpy.ndarray
        Same shape as ``x``.
    """
    n = int(n)
    if n < 0:
        raise DomainError(f"order must be nonnegative, got {n}")
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    if n < 2:
        out = np.zeros_like(x)
    else:
        near = np.abs(x - 1.0) < SWITCH
        out = np.where(near, 0.0, _closed(n, np.where(near, 0.0, x)))
        if np.any(near):
            out = np.where(near, _horner(n, x), out)
    return float(out) if scalar else out


def q_table(n_max, x):
    """Return ``Q_0(x), ..., Q_{n_max}(x)`` stacked along the first axis.

    The result has shape ``(n_max + 1,) + np.shape(x)``.  Points near 1 are
    filled by running the recurrence, the rest by the closed form.
    """
    n_max = int(n_max)
    x = np.asarray(x, dtype=float)
    n = np.arange(n_max + 1, dtype=float).reshape((-1,) + (1,) * x.ndim)
    near = np.abs(x - 1.0) < SWITCH
    safe = np.where(near, 0.0, x)
    table = _closed(n, safe)
    table[:2] = 0.0
    if np.any(near):
        rec = np.zeros((n_max + 1,) + x.shape)
        for k in range(1, n_max):
            rec[k + 1] = rec[k] * x + k
        table = np.where(near, rec, table)
    return table


def forward_diff(seq, order=1):
    """Apply the forward difference ``(D s)_n = s_{n+1} - s_n`` ``order`` times.

    The output is ``order`` terms shorter than the input.
    """
    seq = np.asarray(seq, dtype=float)
    order = int(order)
    if order < 1:
        raise DomainError(f"order must be positive, got {order}")
    if seq.shape[0] < order + 1:
        raise DomainError(
            f"sequence of length {seq.shape[0]} is too short for order {order}")
    return np.diff(seq, n=order)

"""Radial quadrature engines.

Everything that integrates up to the boundary of the disc goes through
the substitution ``t = log(1/(1 - r))``.  Radial densities are handed
around as *mass functions* ``m(t) = w(1 - e^-t) * e^-t`` evaluated
stably in ``t`` (never through an underflowing ``1 - r``), because for
slowly decaying weights a visible fraction of the mass sits at radii
that are not representable in double precision: truncating at the float
boundary ``1 - r ~ 1e-308`` can lose several permille.  Integrating the
mass function over ``[t0, inf)`` with an infinite-interval rule keeps
that mass.

Two engines live here:

* checked scalar QUADPACK calls (``quad_checked`` / ``tail_integral``)
  for everything that must hit ~1e-10 relative accuracy, and
* a vectorised doubling Simpson rule (``vec_simpson``) used by the
  two-dimensional disc integrals, where the integrand is a numpy-aware
  radial profile.

``abs_sin_tail`` handles the oscillating weight families: in ``t``
coordinates their modulus factor is exactly ``|sin t|``, so the tail is
summed per pi-period with a fixed Gauss-Legendre rule and closed with
the mean value ``2/pi`` of ``|sin|`` against the remaining envelope
mass.  The leading Fourier correction to that closure vanishes at
period boundaries, leaving an error of the order of the envelope's
derivative at the cut, which is checked against the tolerance.
"""

from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import QuadratureError

#: Default relative tolerance for boundary-critical radial integrals.
DEFAULT_REL_TOL = 1e-10

#: Absolute floor so that relative checks don't choke on exact zeros.
_ABS_FLOOR = 1e-300


def quad_checked(f, a, b, *, rel_tol=DEFAULT_REL_TOL, points=None, limit=200,
                 abs_tol=0.0):
    """Integrate ``f`` over ``[a, b]`` and fail loudly if not converged.

    Parameters
    ----------
    f : callable
        Scalar integrand.
    a, b : float
        Interval ends; ``b`` may be ``np.inf`` (then ``points`` must be
        ``None``).
    rel_tol : float
        Target relative accuracy of the result.
    points : sequence of float, optional
        Known kinks/singular interior points.
    limit : int
        Subinterval budget for the first attempt (retried with 4x).
    abs_tol : float
        Additional absolute error allowance.  Used when the integral is
        one piece of a larger sum: a piece contributing a vanishing
        share of the total cannot (and need not) meet a tight relative
        target of its own.

    Returns
    -------
    float
    """
    if points is not None and np.isfinite(b):
        pts = sorted(p for p in points if a < p < b)
        points = pts or None
    else:
        points = None
    epsrel = max(rel_tol / 10.0, 5e-14)
    # QUADPACK's error estimator bottoms out around 1e-12 relative, so
    # acceptance below that would reject converged results.
    accept = max(rel_tol, 2e-12)
    last = None
    for lim in (limit, 4 * limit):
        out = integrate.quad(
            f, a, b, epsabs=abs_tol, epsrel=epsrel, limit=lim,
            points=points, full_output=1,
        )
        val, err = out[0], out[1]
        last = (val, err)
        if err <= accept * abs(val) + abs_tol + _ABS_FLOOR:
            return val
    val, err = last
    raise QuadratureError(
        "integral did not reach requested accuracy",
        diagnostics={
            "estimate": val, "error_estimate": err,
            "rel_tol": rel_tol, "interval": (a, b), "limit": 4 * limit,
        },
    )


def _unbounded_quad(f, a, *, rel_tol, abs_tol=0.0, depth=0):
    """``∫_a^∞ f`` robust against iterated-log decay.

    QUADPACK's rational transform resolves algebraic tails but stalls
    on ``1/(t log^a t)``-type decay; on failure this re-substitutes
    ``t = e^y - 1`` (turning one log level into algebraic decay) and
    recurses, up to four nested levels.
    """
    try:
        return quad_checked(f, a, np.inf, rel_tol=rel_tol, abs_tol=abs_tol)
    except QuadratureError:
        if depth >= 4:
            raise

        def g(y):
            with np.errstate(over="ignore"):
                t = float(np.expm1(y))
            if not np.isfinite(t):
                return 0.0
            return f(t) * (1.0 + t)

        return _unbounded_quad(g, np.log1p(a), rel_tol=rel_tol,
                               abs_tol=abs_tol, depth=depth + 1)


def tail_integral(mass_t, t0, *, rel_tol=DEFAULT_REL_TOL, t_breaks=()):
    """Integrate a radial mass function over ``[t0, inf)``.

    ``mass_t(t)`` must accept scalar floats and be evaluable for
    arbitrarily large ``t`` (returning 0.0 once it underflows is fine).
    ``t_breaks`` lists kink locations in ``t``, e.g. from piecewise
    weights.

    The error budget is relative to the *total*: the unbounded remnant
    beyond the head interval may be a vanishing share of the result, in
    which case it only needs the corresponding absolute accuracy.
    """
    finite_breaks = [t for t in t_breaks if t > t0 and np.isfinite(t)]
    t_split = max(t0 + 30.0, (max(finite_breaks) + 10.0) if finite_breaks else 0.0)
    head = quad_checked(mass_t, t0, t_split, rel_tol=rel_tol, points=finite_breaks)
    tail = _unbounded_quad(mass_t, t_split, rel_tol=rel_tol,
                           abs_tol=0.25 * rel_tol * abs(head))
    return head + tail


@lru_cache(maxsize=8)
def _gauss_nodes(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def abs_sin_tail(env_t, t0, *, rel_tol=DEFAULT_REL_TOL, max_periods=2_000_000):
    """Integrate ``|sin t| * env_t(t)`` over ``[t0, inf)``.

    ``env_t`` must be a smooth, eventually monotone decreasing envelope,
    vectorised over numpy arrays and evaluable for arbitrarily large
    ``t``.  The sum runs over whole pi-periods with a 16-point
    Gauss-Legendre rule per period (``|sin|`` is analytic inside each
    period); once the envelope's derivative at the cut is small enough
    the remainder is closed by ``(2/pi) * integral of env``.
    """
    m0 = int(np.ceil(t0 / np.pi - 1e-12))
    head_end = m0 * np.pi
    total = 0.0
    if head_end > t0 + 1e-15:
        total += quad_checked(
            lambda t: abs(np.sin(t)) * env_t(t), t0, head_end, rel_tol=rel_tol
        )
    xg, wg = _gauss_nodes(16)
    k_done = 0
    chunk = 64
    while True:
        t_cut = (m0 + k_done) * np.pi
        # Closure error is O(|env'(t_cut)|); estimate by central difference.
        h = 0.25
        d_env = abs(float(env_t(t_cut + h)) - float(env_t(max(t_cut - h, t0)))) / (2 * h)
        remainder = (2.0 / np.pi) * _unbounded_quad(
            lambda t: float(env_t(t)), t_cut, rel_tol=rel_tol)
        bound = 0.5 * d_env
        if k_done >= 8 and bound <= rel_tol * (abs(total) + remainder + _ABS_FLOOR):
            return total + remainder
        if k_done >= max_periods:
            raise QuadratureError(
                "oscillatory tail did not settle within the period budget",
                diagnostics={
                    "estimate": total + remainder, "periods": k_done,
                    "closure_bound": bound, "rel_tol": rel_tol,
                },
            )
        ks = np.arange(k_done, k_done + chunk)
        starts = (m0 + ks) * np.pi
        nodes = starts[:, None] + (xg[None, :] + 1.0) * (np.pi / 2.0)
        vals = np.abs(np.sin(nodes)) * env_t(nodes)
        total += float(np.sum(vals @ wg) * (np.pi / 2.0))
        k_done += chunk
        chunk = min(2 * chunk, 262_144)


def vec_simpson(fvec, a, b, *, rel_tol=1e-9, n0=64, max_doublings=12):
    """Doubling composite Simpson rule for a vectorised integrand.

    ``fvec`` maps a numpy array of nodes to values.  Doubles the panel
    count until two successive estimates agree to ``rel_tol`` (checked
    in relative terms against the latest estimate).
    """
    if b <= a:
        return 0.0
    n = int(n0)
    if n % 2:
        n += 1
    prev = None
    for _ in range(max_doublings + 1):
        xs = np.linspace(a, b, n + 1)
        ys = np.asarray(fvec(xs), dtype=float)
        est = float(integrate.simpson(ys, x=xs))
        if prev is not None and abs(est - prev) <= rel_tol * abs(est) + _ABS_FLOOR:
            return est
        prev = est
        n *= 2
    raise QuadratureError(
        "vectorised Simpson rule did not converge",
        diagnostics={"estimate": prev, "panels": n // 2, "rel_tol": rel_tol,
                     "interval": (a, b)},
    )

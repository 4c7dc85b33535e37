"""Two-dimensional integrals over the disc against radial weights.

The area measure is normalised so the whole disc has area 1:
``dA = r dr dtheta / pi``.  Everything here reduces a disc integral to

    (1/pi) * integral over t of  W(t) * r(t) * mass(t) dt,

where ``t = log(1/(1-r))`` is the boundary variable of the weights
module, ``mass`` is the weight's radial mass function, and ``W(t)`` is
the angular cross-section integral of the integrand along the circle of
radius ``r(t)``.  The radial integral is then delegated to the weight's
certified tail machinery, which knows about boundary-concentrated and
oscillating families.  Three choices make this accurate:

* **Exact angular windows.**  Regions expose their circle cross-section
  as a single arc (``angular_interval``), so the angular integral uses a
  Gauss-Legendre rule *inside* the arc (spectral for analytic data)
  instead of masking a global grid, which would converge like ``1/n``.
* **Frozen boundary collar.**  For ``t`` beyond a collar (default 34,
  i.e. ``1 - r ~ 2e-15``) the angular profile of an analytic integrand
  varies only by ``O(e^-t)``, so it is frozen at the collar ring while
  the weight machinery integrates the remaining radial mass exactly.
  This keeps the several-permille boundary mass of slowly decaying
  weights without evaluating functions at unrepresentable radii.
* **Trend verdicts, never convergence claims.**  Norms of functions
  outside the space cannot be computed, only diagnosed: integrals report
  their contributions per ``t``-octave, and the norm wrappers turn a
  non-decaying tail of increments (or a collar-dominated value) into the
  verdict ``"divergent (numeric)"``.

Angular resolution is doubled until two successive radial integrals
agree, so sharp integrands fail loudly rather than silently: a profile
that never settles raises :class:`~berglab.errors.NumericError`.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._integrate import _gauss_nodes, quad_checked
from .errors import NumericError, PreconditionError
from .weights import StarPowerWeight, parse_weight

__all__ = [
    "COLLAR_T", "DiscIntegral", "disc_integral", "region_mass", "disc_mass",
    "NormReport", "ap_norm", "bn_norm", "IdentityReport", "lp2_identity",
    "hss_identity", "ConeNormReport", "cone_norm", "MaximalReport",
    "ntmax_norm", "hormander_max", "NevanlinnaReport", "nevanlinna",
    "unit_weight",
]

_TWO_PI = 2.0 * math.pi

#: Beyond this value of ``t = log(1/(1-r))`` the angular profile is
#: frozen at the collar ring (``1 - r ~ 1.7e-15``) and only the radial
#: mass is integrated further.  Analytic integrands vary by ``O(e^-t)``
#: there, so the frozen-profile error is below ``1e-14`` relative.
COLLAR_T = 34.0

#: ``t``-octave edges used for the increment profile of norm integrals.
_PROFILE_EDGES = (0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, COLLAR_T)

_unit = None


def unit_weight():
    """The constant weight 1 (shared instance), for unweighted area
    integrals run through the same engine."""
    global _unit
    if _unit is None:
        _unit = parse_weight("std:0")
    return _unit


def _point_callable(f):
    """Accept an analytic-map object or a plain ``z -> values`` callable."""
    value = getattr(f, "value", None)
    return value if callable(value) else f


def _midpoint_angles(n):
    return -math.pi + (np.arange(n) + 0.5) * (_TWO_PI / n)


@dataclass
class DiscIntegral:
    """Result of a two-dimensional disc integral.

    ``increments`` holds the contributions of the ``t``-octaves between
    ``profile_edges`` (only when requested); ``collar_part`` is the
    frozen-profile boundary term beyond ``t = collar_t``, already
    included in ``value``.
    """

    value: float
    n_angular: int
    angular_gap: float
    converged: bool
    collar_t: float
    collar_part: float = 0.0
    increments: tuple = ()
    profile_edges: tuple = ()

    @property
    def collar_fraction(self):
        scale = abs(self.value)
        return abs(self.collar_part) / scale if scale > 0.0 else 0.0

    def to_dict(self):
        return {
            "value": self.value,
            "n_angular": self.n_angular,
            "angular_gap": self.angular_gap,
            "converged": self.converged,
            "collar_t": self.collar_t,
            "collar_part": self.collar_part,
            "collar_fraction": self.collar_fraction,
            "increments": list(self.increments),
            "profile_edges": list(self.profile_edges),
        }


def _segment_rule(hints, n_total):
    """Composite Gauss-Legendre nodes/weights around the full circle,
    split at the ``hints`` angles (where the integrand may have kinks:
    e.g. arguments of interior zeros under a non-even power of the
    modulus).  Node counts are proportional to segment length."""
    hs = np.sort(np.mod(np.asarray(hints, dtype=float), _TWO_PI))
    keep = np.concatenate([[True], np.diff(hs) > 1e-12])
    hs = hs[keep]
    edges = np.concatenate([hs, [hs[0] + _TWO_PI]])
    thetas, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a <= 1e-12:
            continue
        m = max(12, int(round(n_total * (b - a) / _TWO_PI)))
        x, gw = _gauss_nodes(m)
        thetas.append(0.5 * (b - a) * x + 0.5 * (a + b))
        weights.append(0.5 * (b - a) * gw)
    return np.concatenate(thetas), np.concatenate(weights)


_SPIKE_SPAN = 64.0
_SPIKE_GRADES = (-64.0, -16.0, -4.0, -1.0, 1.0, 4.0, 16.0, 64.0)


def _spike_rule(spikes, u, n):
    """Composite angular rule for profiles that concentrate around fixed
    angles at scale ``u`` (boundary spikes, e.g. ``log+`` of a function
    growing toward one boundary point): each spike angle gets a window
    of half-width ``_SPIKE_SPAN * u`` covered by panels graded toward
    the centre, and the complement arcs get Gauss-Legendre nodes
    proportional to length.  Returns ``None`` when the windows are wide
    enough for the regular full-circle rules."""
    hw = _SPIKE_SPAN * u
    if not spikes or hw >= 1.0:
        return None
    centers = np.sort(np.mod(np.asarray(spikes, dtype=float), _TWO_PI))
    wins = []
    for c in centers:
        if wins and c - hw <= wins[-1][1] + 1e-15:
            wins[-1][1] = c + hw
        else:
            wins.append([c - hw, c + hw])
    if len(wins) > 1 and wins[0][0] + _TWO_PI <= wins[-1][1] + 1e-15:
        wins[0][0] = wins[-1][0] - _TWO_PI
        wins.pop()
    m_in = max(10, int(n) // 40)
    thetas, weights = [], []
    for wlo, whi in wins:
        pts = {wlo, whi}
        for c in centers:
            for cc in (c - _TWO_PI, c, c + _TWO_PI):
                pts.update(cc + g * u for g in _SPIKE_GRADES
                           if wlo < cc + g * u < whi)
        edges = sorted(pts)
        for a, b in zip(edges[:-1], edges[1:]):
            if b - a < 1e-18:
                continue
            x, gw = _gauss_nodes(m_in)
            thetas.append(0.5 * (b - a) * x + 0.5 * (a + b))
            weights.append(0.5 * (b - a) * gw)
    arcs = [(wins[i][1], wins[i + 1][0] if i + 1 < len(wins)
             else wins[0][0] + _TWO_PI) for i in range(len(wins))]
    budget = max(int(n) // 2, 32)
    total = sum(b - a for a, b in arcs if b > a)
    for a, b in arcs:
        if b - a <= 1e-12:
            continue
        m = max(16, int(round(budget * (b - a) / max(total, 1e-12))))
        x, gw = _gauss_nodes(m)
        thetas.append(0.5 * (b - a) * x + 0.5 * (a + b))
        weights.append(0.5 * (b - a) * gw)
    return np.concatenate(thetas), np.concatenate(weights)


class _Engine:
    """One disc-integral run: angular rules plus a memoised radial profile."""

    def __init__(self, point_fn, weight, region, collar_t, hints=(),
                 spikes=()):
        self.fn = _point_callable(point_fn) if point_fn is not None else None
        self.weight = weight
        self.region = region
        self.collar_t = float(collar_t)
        self.hints = tuple(hints)
        self.spikes = tuple(spikes)
        if region is not None:
            box = region.bounding_box()
            self.t_lo = 0.0 if box[0] <= 0.0 else -math.log1p(-box[0])
            self.t_hi = math.inf if box[1] >= 1.0 else -math.log1p(-box[1])
        else:
            self.t_lo, self.t_hi = 0.0, math.inf
        self.n_angular = 0
        self._cache = {}
        self._rule = None

    def set_angular(self, n):
        self.n_angular = int(n)
        self._cache.clear()
        if self.hints and self.region is None and self.fn is not None:
            self._rule = _segment_rule(self.hints, self.n_angular)
        else:
            self._rule = None

    def _cross_section(self, t):
        """Angular integral of the integrand along the ring at ``t``
        (capped at the collar), times ``r(t)/pi``."""
        tc = min(t, self.collar_t)
        r = -math.expm1(-tc)
        if self.region is not None:
            iv = self.region.angular_interval(r)
            if iv is None:
                return 0.0
            center, half = iv
        else:
            center, half = 0.0, math.pi
        if self.fn is None:
            return 2.0 * half * r / math.pi
        if half >= math.pi and self.region is None:
            rule = (_spike_rule(self.spikes, math.exp(-tc), self.n_angular)
                    if self.spikes else self._rule)
            if rule is not None:
                theta, gw = rule
                vals = np.asarray(self.fn(r * np.exp(1j * theta)), dtype=float)
                w_ang = float(vals @ gw)
            else:
                theta = _midpoint_angles(self.n_angular)
                vals = np.asarray(self.fn(r * np.exp(1j * theta)), dtype=float)
                w_ang = float(np.mean(vals)) * _TWO_PI
        else:
            x, gw = _gauss_nodes(self.n_angular)
            theta = center + half * x
            vals = np.asarray(self.fn(r * np.exp(1j * theta)), dtype=float)
            w_ang = half * float(vals @ gw)
        return w_ang * r / math.pi

    def profile(self, t):
        """Radial profile ``W(t) r(t) / pi`` (scalar or array ``t``),
        memoised on the capped ``t`` so the collar ring is evaluated
        once per angular resolution."""
        arr = np.asarray(t, dtype=float)
        if arr.ndim == 0:
            key = min(float(arr), self.collar_t)
            out = self._cache.get(key)
            if out is None:
                out = self._cross_section(key)
                self._cache[key] = out
            return out
        return np.array([self.profile(float(x)) for x in arr.ravel()]
                        ).reshape(arr.shape)

    def radial_breaks(self, extra=()):
        breaks = [self.collar_t]
        if np.isfinite(self.t_hi):
            breaks.append(self.t_hi)
        breaks.extend(b for b in extra if self.t_lo < b < self.collar_t)
        return tuple(breaks)

    def integrate(self, rel_tol, extra_breaks=()):
        return self.weight._weighted_tail(
            self.t_lo, self.profile, rel_tol=rel_tol,
            extra_breaks=self.radial_breaks(extra_breaks))

    def octave_increments(self, edges):
        """Gauss-Legendre contributions of the ``t``-octaves between
        ``edges`` (diagnostic accuracy, shares the profile cache)."""
        x, gw = _gauss_nodes(24)
        out = []
        for a, b in zip(edges[:-1], edges[1:]):
            a = max(a, self.t_lo)
            b = min(b, self.t_hi) if np.isfinite(self.t_hi) else b
            if b <= a:
                out.append(0.0)
                continue
            nodes = 0.5 * (b - a) * x + 0.5 * (a + b)
            vals = self.profile(nodes) * np.asarray(
                self.weight.mass_t(nodes), dtype=float)
            out.append(0.5 * (b - a) * float(vals @ gw))
        return tuple(out)

    def collar_term(self, rel_tol):
        if np.isfinite(self.t_hi) and self.t_hi <= self.collar_t:
            return 0.0
        return self.weight._weighted_tail(
            self.collar_t, self.profile, rel_tol=max(rel_tol, 1e-8))


def disc_integral(point_fn, weight, *, region=None, rel_tol=1e-9,
                  angular_tol=None, n_angular=256, max_angular=4096,
                  collar_t=COLLAR_T, hints=(), spike_hints=(),
                  radial_breaks=(), want_profile=False):
    """Integrate ``point_fn(z) * weight(|z|)`` over ``region`` (default:
    the whole disc) against normalised area measure.

    ``point_fn`` maps complex arrays to real values; pass ``None`` for
    the constant 1 (pure region mass, computed from exact arc lengths
    with no angular refinement).  The angular resolution doubles until
    two successive radial integrals agree to ``angular_tol`` (default:
    ``rel_tol``); failure to settle by ``max_angular`` raises
    :class:`NumericError`.  ``hints`` lists angles where the integrand
    may lose smoothness (the angular rule splits there) and
    ``radial_breaks`` the corresponding values of ``t = log(1/(1-r))``;
    ``spike_hints`` lists angles toward which the integrand concentrates
    at scale ``1 - r`` (the rule keeps a scaled window resolved there as
    the rings approach the boundary).
    """
    if hints and spike_hints:
        raise PreconditionError(
            "pass either kink hints or spike hints, not both")
    eng = _Engine(point_fn, weight, region, collar_t, hints=hints,
                  spikes=spike_hints)
    radial_tol = max(rel_tol / 4.0, 1e-12)
    angular_tol = rel_tol if angular_tol is None else float(angular_tol)

    if eng.fn is None:
        eng.set_angular(0)
        value = eng.integrate(radial_tol, radial_breaks)
        gap, n_used, converged = 0.0, 0, True
    else:
        prev = None
        n = int(n_angular)
        while True:
            eng.set_angular(n)
            value = eng.integrate(radial_tol, radial_breaks)
            if prev is not None:
                gap = abs(value - prev)
                if gap <= angular_tol * abs(value) + 1e-300:
                    n_used, converged = n, True
                    break
            prev = value
            if 2 * n > max_angular:
                raise NumericError(
                    "angular profile did not settle under refinement",
                    diagnostics={"estimate": value, "n_angular": n,
                                 "gap": abs(value - prev) if prev != value
                                 else None, "angular_tol": angular_tol},
                )
            n *= 2
        gap = abs(value - prev) if prev is not None else 0.0

    increments, edges = (), ()
    collar_part = 0.0
    if want_profile:
        edges = _PROFILE_EDGES
        increments = eng.octave_increments(edges)
        collar_part = eng.collar_term(rel_tol)

    return DiscIntegral(
        value=value, n_angular=n_used if eng.fn is not None else 0,
        angular_gap=gap, converged=converged, collar_t=collar_t,
        collar_part=collar_part, increments=increments, profile_edges=edges)


def region_mass(weight, region, *, rel_tol=1e-10):
    """Mass ``integral over the region of weight(|z|) dA(z)``, from the
    exact angular windows and the certified radial tail machinery."""
    return disc_integral(None, weight, region=region, rel_tol=rel_tol).value


def disc_mass(weight, *, rel_tol=1e-10):
    """Mass of the whole disc, ``2 * integral of s * weight(s) ds``."""
    return 2.0 * weight.radial_moment_tail(0.0, rel_tol=rel_tol)


# ---------------------------------------------------------------------
# Norms with divergence verdicts
# ---------------------------------------------------------------------

VERDICT_FINITE = "finite"
VERDICT_DIVERGENT = "divergent (numeric)"


@dataclass
class NormReport:
    """A norm value together with the evidence that it means something.

    For integrands whose ``t``-octave increments keep growing (or whose
    value is dominated by the frozen boundary collar) the ``verdict``
    flips to ``"divergent (numeric)"``: the reported number is then only
    the truncated integral, not a norm.
    """

    norm: float
    power_integral: float
    power: float
    verdict: str
    integral: DiscIntegral = field(repr=False, default=None)

    @property
    def divergent(self):
        return self.verdict != VERDICT_FINITE

    def to_dict(self):
        return {
            "norm": self.norm,
            "power_integral": self.power_integral,
            "power": self.power,
            "verdict": self.verdict,
            "integral": self.integral.to_dict() if self.integral else None,
        }


def _trend_verdict(result):
    """Divergence heuristic from the octave increments of an integral:
    non-decaying late increments or a collar-dominated value."""
    incs = list(result.increments)
    total = abs(result.value) + 1e-300
    if result.collar_fraction > 0.4:
        return VERDICT_DIVERGENT
    tail = [x for x in incs[-4:] if x > 1e-300]
    ratios = [b / a for a, b in zip(tail[:-1], tail[1:]) if a > 0.0]
    if len(ratios) >= 2 and min(ratios[-2:]) >= 0.95 \
            and tail[-1] > 1e-9 * total:
        return VERDICT_DIVERGENT
    return VERDICT_FINITE


def _norm_integral(integrand, weight, rel_tol, n_angular, max_angular,
                   spike_hints=(), hints=()):
    """Certified disc integral with profile — falling back, when the
    radial or angular rule cannot settle (heavily oscillating profiles
    near the boundary, e.g. powers of gap series), to fixed-rule octave
    panels plus the frozen collar.  The fallback is trend-grade and
    marked ``converged=False``; the octave increments stay meaningful
    either way, which is all the divergence verdict needs."""
    try:
        return disc_integral(integrand, weight, rel_tol=rel_tol,
                             n_angular=n_angular, max_angular=max_angular,
                             hints=hints, spike_hints=spike_hints,
                             want_profile=True)
    except NumericError:
        eng = _Engine(integrand, weight, None, COLLAR_T, hints=hints,
                      spikes=spike_hints)
        eng.set_angular(max(int(n_angular), 512))
        increments = eng.octave_increments(_PROFILE_EDGES)
        collar = eng.collar_term(max(rel_tol, 1e-6))
        return DiscIntegral(
            value=float(sum(increments)) + collar,
            n_angular=eng.n_angular, angular_gap=math.nan, converged=False,
            collar_t=COLLAR_T, collar_part=collar, increments=increments,
            profile_edges=_PROFILE_EDGES)


def ap_norm(f, p, weight, *, rel_tol=1e-9, n_angular=256, max_angular=4096,
            spike_hints=()):
    """p-norm of ``f`` in the weighted Bergman space of ``weight``:
    ``(integral of |f|^p weight dA)^(1/p)``, with a divergence verdict.

    ``f`` is an analytic-map object or a plain vectorised callable.
    """
    if p <= 0:
        raise PreconditionError("norm exponent must be positive")
    fn = _point_callable(f)

    def integrand(z):
        return np.abs(fn(z)) ** p

    result = _norm_integral(integrand, weight, rel_tol, n_angular,
                            max_angular, spike_hints)
    verdict = _trend_verdict(result)
    return NormReport(norm=result.value ** (1.0 / p),
                      power_integral=result.value, power=float(p),
                      verdict=verdict, integral=result)


def bn_norm(f, weight, *, rel_tol=1e-8, n_angular=256, max_angular=4096,
            spike_hints=(), log_abs=None):
    """Area integral of ``log+ |f|`` against the weight (the membership
    functional of the weighted Nevanlinna-type class), with the same
    divergence verdict as :func:`ap_norm`.

    For functions of exponential type whose modulus overflows floats,
    pass ``log_abs`` evaluating ``log |f|`` directly (``f`` may then be
    ``None``); spikes of such functions toward single boundary points
    are resolved via ``spike_hints``."""
    if log_abs is not None:
        def integrand(z):
            return np.maximum(np.asarray(log_abs(z), dtype=float), 0.0)
    else:
        fn = _point_callable(f)

        def integrand(z):
            return np.log(np.maximum(np.abs(fn(z)), 1.0))

    result = _norm_integral(integrand, weight, rel_tol, n_angular,
                            max_angular, spike_hints)
    verdict = _trend_verdict(result)
    return NormReport(norm=result.value, power_integral=result.value,
                      power=1.0, verdict=verdict, integral=result)


# ---------------------------------------------------------------------
# Norm identities through the log companion
# ---------------------------------------------------------------------


@dataclass
class IdentityReport:
    """Both sides of a norm identity and their agreement.

    ``gap`` is the scale-aware discrepancy ``|lhs - rhs| / (1 + max)``;
    ``rel_gap`` divides by the magnitude instead and is meaningful when
    the sides are not tiny.
    """

    lhs: float
    rhs: float
    derivative_term: float
    point_term: float
    power: float

    @property
    def gap(self):
        return abs(self.lhs - self.rhs) / (1.0 + max(abs(self.lhs),
                                                     abs(self.rhs)))

    @property
    def rel_gap(self):
        scale = max(abs(self.lhs), abs(self.rhs), 1e-300)
        return abs(self.lhs - self.rhs) / scale

    def to_dict(self):
        return {
            "lhs": self.lhs, "rhs": self.rhs, "gap": self.gap,
            "rel_gap": self.rel_gap, "derivative_term": self.derivative_term,
            "point_term": self.point_term, "power": self.power,
        }


def _interior_zeros(f):
    zeros = getattr(f, "zeros", None)
    if not callable(zeros):
        return None
    return [z for z in zeros() if abs(z) < 1.0]


def lp2_identity(f, weight, *, rel_tol=1e-9, n_angular=256):
    """Exact square-norm identity through the log companion: the squared
    norm of ``f`` equals ``4 * integral of |f'|^2 star dA`` plus the disc
    mass times ``|f(0)|^2``, where ``star`` is the weight's log
    companion.  Returns both sides.
    """
    fn = _point_callable(f)
    star = StarPowerWeight(weight, 0.0)

    lhs = disc_integral(lambda z: np.abs(fn(z)) ** 2, weight,
                        rel_tol=rel_tol, n_angular=n_angular).value
    deriv_term = 4.0 * disc_integral(
        lambda z: np.abs(f.deriv(1, z)) ** 2, star,
        rel_tol=rel_tol, n_angular=n_angular).value
    point_term = disc_mass(weight) * abs(complex(fn(0.0))) ** 2
    return IdentityReport(lhs=lhs, rhs=deriv_term + point_term,
                          derivative_term=deriv_term,
                          point_term=point_term, power=2.0)


def hss_identity(f, p, weight, *, rel_tol=1e-9, n_angular=256):
    """p-th power norm identity through the log companion:

    ``integral |f|^p w dA  =  p^2 integral |f|^(p-2) |f'|^2 star dA
    + disc mass * |f(0)|^p``.

    Valid for every analytic ``f`` when ``p >= 2``; below ``p = 2`` the
    integrand ``|f|^(p-2)`` requires ``f`` zero-free in the disc, and a
    function with interior zeros (or without zero information) raises
    :class:`PreconditionError`.
    """
    p = float(p)
    if p <= 0:
        raise PreconditionError("norm exponent must be positive")
    if p < 2.0:
        interior = _interior_zeros(f)
        if interior is None:
            raise PreconditionError(
                "below p = 2 the identity needs zero-free evidence; "
                "the function does not expose its zero set")
        if interior:
            raise PreconditionError(
                "below p = 2 the identity holds for zero-free functions "
                f"only; found zeros at {interior[:4]!r}")
    fn = _point_callable(f)
    star = StarPowerWeight(weight, 0.0)

    # Under a non-even power the modulus has kinks along the rays and
    # rings through the interior zeros; hand those to the quadrature.
    hints, breaks = (), ()
    smooth_power = p in (2.0, 4.0) or float(p).is_integer() and p % 2 == 0
    if not smooth_power:
        interior = _interior_zeros(f) or []
        hints = tuple(math.atan2(z.imag, z.real) for z in interior if z != 0)
        breaks = tuple(-math.log1p(-abs(z)) for z in interior if abs(z) > 0)
    angular_tol = max(rel_tol, 1e-9 if smooth_power else 2e-7)

    lhs = disc_integral(lambda z: np.abs(fn(z)) ** p, weight,
                        rel_tol=rel_tol, angular_tol=angular_tol,
                        n_angular=n_angular, hints=hints,
                        radial_breaks=breaks).value

    def weighted_derivative(z):
        base = np.abs(fn(z))
        dv = np.abs(f.deriv(1, z)) ** 2
        if p == 2.0:
            return dv
        with np.errstate(divide="ignore"):
            fac = np.where(base > 0.0, base ** (p - 2.0), np.inf)
        if p > 2.0:
            fac = np.where(base > 0.0, fac, 0.0)
        return fac * dv

    deriv_term = p * p * disc_integral(weighted_derivative, star,
                                       rel_tol=rel_tol,
                                       angular_tol=angular_tol,
                                       n_angular=n_angular, hints=hints,
                                       radial_breaks=breaks).value
    point_term = disc_mass(weight) * abs(complex(fn(0.0))) ** p
    return IdentityReport(lhs=lhs, rhs=deriv_term + point_term,
                          derivative_term=deriv_term,
                          point_term=point_term, power=p)


# ---------------------------------------------------------------------
# Cone square function and nontangential maximal function
# ---------------------------------------------------------------------


class _PolarGrid:
    """Midpoint grid, uniform in ``t`` and in angle, with per-ring
    cumulative sums for O(1) window integrals.

    The rings carry the values of a point function; window integrals
    treat the angular profile as a step function over the cells (second
    order in the angular step), and partial radial sums fade the last
    ring linearly (second order in the ``t`` step).  This is the shared
    backend of the cone square function, the nontangential maximal
    function and the square maximal function, which are band/trend
    quantities rather than certified integrals.
    """

    def __init__(self, point_fn, n_radial=160, n_theta=512, t_max=COLLAR_T):
        self.n_radial = int(n_radial)
        self.n_theta = int(n_theta)
        self.t_max = float(t_max)
        self.dt = self.t_max / self.n_radial
        self.t = (np.arange(self.n_radial) + 0.5) * self.dt
        self.r = -np.expm1(-self.t)
        self.dtheta = _TWO_PI / self.n_theta
        self.theta = (np.arange(self.n_theta) + 0.5) * self.dtheta
        fn = _point_callable(point_fn)
        z = self.r[:, None] * np.exp(1j * self.theta)[None, :]
        self.vals = np.asarray(fn(z), dtype=float)
        doubled = np.concatenate([self.vals, self.vals], axis=1)
        self.cum = np.concatenate(
            [np.zeros((self.n_radial, 1)),
             np.cumsum(doubled, axis=1) * self.dtheta], axis=1)

    def window_sums(self, rows, start, width):
        """Integral of the ring profiles over ``[start, start + width]``
        per selected ring row.  ``start`` is either one vector of window
        starts shared by all rows or a ``(len(rows), m)`` array of
        per-row starts; ``width`` broadcasts against it."""
        rows = np.asarray(rows, dtype=int)
        start = np.mod(np.asarray(start, dtype=float), _TWO_PI)
        lo = start / self.dtheta
        hi = (start + np.asarray(width, dtype=float)) / self.dtheta
        if lo.ndim == 1:
            lo = np.broadcast_to(lo, (rows.size, lo.size))
        if hi.ndim == 1:
            hi = np.broadcast_to(hi, (rows.size, hi.size))
        cum = self.cum[rows]
        vals2 = np.concatenate([self.vals[rows], self.vals[rows]], axis=1)
        rowsel = np.arange(rows.size)[:, None]

        def take(pos):
            idx = np.floor(pos).astype(int)
            frac = pos - idx
            return (cum[rowsel, idx]
                    + frac * vals2[rowsel, np.minimum(idx, vals2.shape[1] - 1)]
                    * self.dtheta)

        return take(hi) - take(lo)

    def radial_fractions(self, t_cut):
        """Coverage fraction of each ``t``-cell by ``[0, t_cut]``."""
        lo = np.arange(self.n_radial) * self.dt
        return np.clip((t_cut - lo) / self.dt, 0.0, 1.0)


@dataclass
class ConeNormReport:
    """Norm built from the cone square function, with its refinement
    diagnostics: the same quantity on a doubled grid and the relative
    change between the two."""

    norm: float
    square_term: float
    constant_term: float
    power: float
    order: int
    grid: tuple
    refined_norm: float = None
    rel_change: float = None

    def to_dict(self):
        return {
            "norm": self.norm, "square_term": self.square_term,
            "constant_term": self.constant_term, "power": self.power,
            "order": self.order, "grid": list(self.grid),
            "refined_norm": self.refined_norm, "rel_change": self.rel_change,
        }


def _cone_square_profile(grid, order):
    """Return ``rho, phi_vector -> S^2`` evaluating the cone square
    function from the grid of ``|f^(order)|^2`` values.

    The radial factor ``(1 - r/rho)^(2 order - 2) r e^-t`` and the
    window half-width are integrated by per-ring Gauss nodes in ``t``
    (the last ring is clipped exactly at the vertex radius); the angular
    profile of each ring is the remaining midpoint approximation."""
    two_m = 2 * order - 2
    gx, gw = _gauss_nodes(4)

    def profile(rho, phis):
        t_cut = -math.log1p(-rho)
        lo = np.arange(grid.n_radial) * grid.dt
        hi = np.minimum(lo + grid.dt, t_cut)
        rows = np.nonzero(hi > lo)[0]
        if rows.size == 0:
            return np.zeros_like(phis)
        mid = 0.5 * (lo[rows] + hi[rows])
        hl = 0.5 * (hi[rows] - lo[rows])
        tg = mid[:, None] + hl[:, None] * gx[None, :]
        rg = -np.expm1(-tg)
        hg = np.maximum(0.5 * (1.0 - rg / rho), 0.0)
        radw = ((2.0 * hg) ** two_m * rg * np.exp(-tg)
                * hl[:, None] * gw[None, :] / math.pi).reshape(-1)
        rows_g = np.repeat(rows, gx.size)
        hg = hg.reshape(-1)
        start = phis[None, :] - hg[:, None]
        win = grid.window_sums(rows_g, start, (2.0 * hg)[:, None])
        return radw @ win

    return profile


def cone_norm(f, p, order, weight, *, n_radial=160, n_theta=512,
              rel_tol=1e-6, n_angular=256, refine=True):
    """Square-function norm over apertures: for each vertex ``u`` the
    square function collects ``|f^(order)|^2 (1 - |z|/|u|)^(2 order - 2)``
    over the aperture region of ``u``; its ``p/2``-th power is then
    integrated against the weight, and the Taylor data of ``f`` at 0 up
    to ``order - 1`` is added separately:

    ``norm^p = integral (S f)^p w dA + sum over j < order of |f^(j)(0)|^p``.

    The inner integral lives on a fixed midpoint grid (so this is a band
    quantity); ``refine=True`` recomputes on a doubled grid and records
    the relative change.
    """
    p = float(p)
    order = int(order)
    if order < 1:
        raise PreconditionError("derivative order must be at least 1")
    if p <= 0:
        raise PreconditionError("norm exponent must be positive")

    def sq_deriv(z):
        return np.abs(f.deriv(order, z)) ** 2

    def one_pass(n_r, n_th):
        grid = _PolarGrid(sq_deriv, n_radial=n_r, n_theta=n_th)
        profile = _cone_square_profile(grid, order)

        def outer(z):
            rho = float(np.abs(z.ravel()[0]))
            phis = np.angle(z).ravel()
            s2 = profile(rho, phis)
            return np.maximum(s2, 0.0) ** (0.5 * p)

        return disc_integral(outer, weight, rel_tol=rel_tol,
                             n_angular=n_angular).value

    square_term = one_pass(n_radial, n_theta)
    constant_term = sum(abs(complex(f.deriv(j, 0.0))) ** p
                        for j in range(order))
    norm = (square_term + constant_term) ** (1.0 / p)
    report = ConeNormReport(norm=norm, square_term=square_term,
                            constant_term=constant_term, power=p,
                            order=order, grid=(n_radial, n_theta))
    if refine:
        refined_sq = one_pass(2 * n_radial, 2 * n_theta)
        refined = (refined_sq + constant_term) ** (1.0 / p)
        report.refined_norm = refined
        report.rel_change = abs(refined - norm) / max(abs(refined), 1e-300)
    return report


@dataclass
class MaximalReport:
    """Grid estimate of a maximal-function norm.  Grid suprema are lower
    bounds of the true suprema, so refinement can only push the value
    up; ``refined_norm`` records the doubled-grid value."""

    norm: float
    power: float
    grid: tuple
    refined_norm: float = None
    monotone: bool = None

    def to_dict(self):
        return {
            "norm": self.norm, "power": self.power, "grid": list(self.grid),
            "refined_norm": self.refined_norm, "monotone": self.monotone,
        }


def _ntmax_grid(f, n_radial, n_theta):
    """Nontangential maximal function of ``f`` on the polar grid:
    for each grid vertex ``u``, the max of ``|f|`` over the grid points
    of the aperture region of ``u`` (a lower bound of the true sup)."""
    from scipy.ndimage import maximum_filter1d

    fn = _point_callable(f)
    grid = _PolarGrid(lambda z: np.abs(fn(z)), n_radial=n_radial,
                      n_theta=n_theta)
    vals = grid.vals
    out = np.zeros_like(vals)
    for l in range(grid.n_radial):
        rho = grid.r[l]
        best = vals[l].copy()
        for i in range(l):
            half = 0.5 * (1.0 - grid.r[i] / rho)
            bins = int(half / grid.dtheta)
            filt = maximum_filter1d(vals[i], size=2 * bins + 1, mode="wrap") \
                if bins > 0 else vals[i]
            np.maximum(best, filt, out=best)
        out[l] = best
    return grid, out


def ntmax_norm(f, p, weight, *, n_radial=96, n_theta=384, refine=True):
    """p-norm of the nontangential maximal function ``sup over the
    aperture region of u of |f|``, estimated on a polar grid (grid
    suprema are lower bounds, so the value is monotone under
    refinement).  The collar beyond the grid reuses the outermost ring's
    profile against the exact remaining radial mass."""
    p = float(p)
    if p <= 0:
        raise PreconditionError("norm exponent must be positive")

    def one_pass(n_r, n_th):
        grid, nt = _ntmax_grid(f, n_r, n_th)
        mass = np.asarray(weight.mass_t(grid.t), dtype=float)
        ring = grid.r * mass * grid.dt / math.pi
        powed = nt ** p
        main = float((ring[:, None] * powed).sum() * grid.dtheta)
        r_edge = -math.expm1(-grid.t_max)
        collar = (2.0 * weight.radial_moment_tail(r_edge)
                  * float(np.mean(powed[-1])))
        return main + collar

    value = one_pass(n_radial, n_theta)
    report = MaximalReport(norm=value ** (1.0 / p), power=p,
                           grid=(n_radial, n_theta))
    if refine:
        refined = one_pass(2 * n_radial, 2 * n_theta) ** (1.0 / p)
        report.refined_norm = refined
        report.monotone = refined >= report.norm - 1e-9 * abs(refined)
    return report


def hormander_max(point_fn, weight, z_points, *, n_rho=24, n_phi=24,
                  n_radial=160, n_theta=512):
    """Square maximal function: for each probe ``z``, the sup over all
    Carleson squares containing ``z`` of the square's average of
    ``point_fn`` against the weight measure.

    Numerator and denominator of each average are computed from the same
    grid representation, so the constant function 1 has maximal function
    exactly 1.  Returns an array aligned with ``z_points``.
    """
    fn = _point_callable(point_fn)
    grid = _PolarGrid(fn, n_radial=n_radial, n_theta=n_theta)
    mass = np.asarray(weight.mass_t(grid.t), dtype=float)
    ring = grid.r * mass * grid.dt / math.pi
    r_edge = -math.expm1(-grid.t_max)
    collar_mass = weight.radial_moment_tail(r_edge) / math.pi

    zs = np.atleast_1d(np.asarray(z_points, dtype=complex))
    if np.any(np.abs(zs) == 0.0):
        raise PreconditionError("no Carleson square contains the origin")
    out = np.empty(zs.shape, dtype=float)
    for idx, z in enumerate(zs.ravel()):
        mod, arg = abs(z), math.atan2(z.imag, z.real)
        t_z = -math.log1p(-mod) if mod < 1.0 else grid.t_max
        t_grid = np.linspace(min(0.02, t_z), min(t_z, grid.t_max), n_rho)
        best = 0.0
        for t_a in t_grid:
            rho = -math.expm1(-t_a)
            half = 0.5 * (1.0 - rho)
            offs = np.linspace(-half, half, n_phi) * (1.0 - 1e-9)
            starts = arg + offs - half
            frac = 1.0 - grid.radial_fractions(t_a)
            rows = np.nonzero(frac > 0.0)[0]
            win = grid.window_sums(rows, starts, 2.0 * half)
            coeff = ring[rows] * frac[rows]
            num = coeff @ win
            den = float(coeff.sum()) * 2.0 * half
            # Frozen outermost profile closes the mass beyond the grid.
            edge = grid.window_sums(np.array([grid.n_radial - 1]),
                                    starts, 2.0 * half)[0]
            num = num + collar_mass * edge
            den = den + collar_mass * 2.0 * half
            ratio = np.max(num / den)
            if ratio > best:
                best = float(ratio)
        out.ravel()[idx] = best
    if np.ndim(z_points) == 0:
        return float(out.ravel()[0])
    return out


# ---------------------------------------------------------------------
# Nevanlinna quantities on circles
# ---------------------------------------------------------------------


@dataclass
class NevanlinnaReport:
    """First-main-theorem data at radius ``r``: the angular mean of
    ``log+ |f|`` (proximity), the integrated counting function from the
    zero list, their sum, and whether the radius had to be perturbed off
    a zero's modulus."""

    radius: float
    proximity: float
    counting: int
    integrated_counting: float
    characteristic: float
    perturbed: bool

    def to_dict(self):
        return {
            "radius": self.radius, "proximity": self.proximity,
            "counting": self.counting,
            "integrated_counting": self.integrated_counting,
            "characteristic": self.characteristic,
            "perturbed": self.perturbed,
        }


def nevanlinna(f, r, *, zeros=None, rel_tol=1e-8):
    """Proximity / counting / characteristic of ``f`` at radius ``r``.

    ``zeros`` defaults to the function's own zero list (analytic-map
    objects); plain callables must pass it explicitly.  A zero modulus
    within ``1e-12`` of ``r`` perturbs the radius outward by ``1e-12``
    steps (flagged in the report).  The angular integral hands the
    angles of near-circle zeros to the quadrature as split points.
    """
    fn = _point_callable(f)
    if zeros is None:
        zfn = getattr(f, "zeros", None)
        if not callable(zfn):
            raise PreconditionError(
                "zero list required: the function does not expose one")
        zeros = list(zfn())
    zeros = [complex(z) for z in zeros]
    if not 0.0 < r < 1.0:
        raise PreconditionError("radius must lie in (0, 1)")

    perturbed = False
    for _ in range(4):
        if any(abs(abs(z) - r) < 1e-12 for z in zeros):
            r += 1e-12
            perturbed = True
        else:
            break

    mods = np.array([abs(z) for z in zeros]) if zeros else np.empty(0)
    n_origin = int(np.sum(mods == 0.0))
    inside = mods[(mods > 0.0) & (mods < r)]
    integrated = float(np.sum(np.log(r / inside))) + n_origin * math.log(r)
    count = int(np.sum(mods < r))

    near = [z for z in zeros if 0.0 < abs(z) and 0.5 * r < abs(z) < r / 0.5]
    points = sorted({math.atan2(z.imag, z.real) for z in near})

    def integrand(theta):
        val = abs(complex(fn(r * complex(math.cos(theta), math.sin(theta)))))
        return math.log(val) if val > 1.0 else 0.0

    proximity = quad_checked(integrand, -math.pi, math.pi,
                             rel_tol=rel_tol, points=points) / _TWO_PI
    return NevanlinnaReport(radius=r, proximity=proximity, counting=count,
                            integrated_counting=integrated,
                            characteristic=proximity + integrated,
                            perturbed=perturbed)

"""Regions of the unit disc: Carleson squares, tents, cones, discs, cells.

Every region is an immutable value object with three capabilities:

* ``contains(z)`` -- membership predicate, vectorised over complex arrays;
* ``bounding_box()`` -- a polar box ``(r_min, r_max, theta_min, theta_max)``
  that encloses the region (used by the quadrature module to clip grids);
* ``to_json()`` -- serialisation as ``{"variant": ..., "params": {...}}``.

Two arc-length conventions coexist and are kept separate on purpose:

* **Plain arc length.**  ``Square(theta, length)`` takes the Lebesgue
  measure of the arc; its radial range is ``[1 - length, 1)``.  The square
  attached to a point ``a != 0`` has arc length ``1 - |a|`` (angular
  half-width ``(1 - |a|)/2`` radians), so ``square_of_point(0.5)`` spans
  radii ``[0.5, 1)`` and angles ``+-0.25`` around the positive axis.
* **Full-turn-relative length.**  Dyadic cells split the circle into
  ``2^n`` arcs of length ``2 pi / 2^n`` and use the *relative* length
  ``2^-n`` for their radial band ``[1 - 2^-n, 1 - 2^-(n+1))``, so the
  bands of consecutive generations tile the disc.

Cones open from the boundary toward the origin: ``z`` lies in the cone
of ``u = r e^{i theta}`` when ``|theta - arg z| < (1 - |z|/r) / 2``, with
equality admitted so the vertex ``u`` itself belongs to its own cone.
The tent of ``z`` is the dual region ``{u : z in Cone(u)}``; the two
predicates agree by construction.  Near ``u = 0`` the formula makes the
cone close to the whole disc -- that is intentional, the aperture rule
is applied literally for every ``u != 0``.

Pseudohyperbolic discs are exact: membership tests the Moebius distance
``rho(a, z) = |(a - z)/(1 - conj(a) z)|``, never a Euclidean surrogate.
A Euclidean disc variant exists separately for measure-comparison
experiments that genuinely want ``{|z - c| < radius}``.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "Region", "Square", "Tent", "Cone", "PseudoDisc", "EuclideanDisc",
    "DyadicCell", "square_of_point", "in_cone", "in_tent", "mobius",
    "pseudo_distance", "hyperbolic_distance", "dyadic_cells",
    "region_from_json",
]

_TWO_PI = 2.0 * math.pi


def _wrap_angle(theta):
    """Reduce an angle (scalar or array) to the interval ``(-pi, pi]``."""
    out = np.mod(np.asarray(theta, dtype=float) + math.pi, _TWO_PI) - math.pi
    # np.mod maps exact odd multiples of pi to -pi; fold them back.
    out = np.where(out == -math.pi, math.pi, out)
    if np.ndim(theta) == 0:
        return float(out)
    return out


def _as_complex(z):
    return np.asarray(z, dtype=complex)


def _scalarize(mask, z):
    if np.ndim(z) == 0:
        return bool(mask)
    return mask


class Region:
    """Base class for disc regions; see the module docstring."""

    variant = "region"

    def contains(self, z):
        """Membership of ``z`` (complex scalar or array) in the region."""
        raise NotImplementedError

    def bounding_box(self):
        """Polar box ``(r_min, r_max, theta_min, theta_max)`` covering the region.

        ``theta`` bounds are centred on the region and may leave
        ``(-pi, pi]``; their span is at most ``2 pi``.
        """
        raise NotImplementedError

    def angular_interval(self, r):
        """Cross-section of the region with the circle ``|z| = r``, as
        ``(theta_center, halfwidth)`` with ``halfwidth in (0, pi]``, or
        ``None`` when the circle misses the region.

        Every variant's cross-section is a single arc (up to a set of
        measure zero on the boundary circles), which is what lets the
        quadrature module integrate sharp-edged regions with smooth
        rules instead of membership masks.
        """
        raise NotImplementedError

    def params(self):
        raise NotImplementedError

    def to_json(self):
        return {"variant": self.variant, "params": self.params()}

    def __repr__(self):
        inner = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({inner})"


@dataclass(frozen=True, repr=False)
class Square(Region):
    """Carleson square over the arc of plain length ``arc_length`` centred
    at angle ``theta_center``: radii ``[1 - arc_length, 1)``, angles within
    ``arc_length / 2`` of the centre (arc endpoints included)."""

    theta_center: float
    arc_length: float

    variant = "square"

    def __post_init__(self):
        if not 0.0 < self.arc_length <= _TWO_PI:
            raise DomainError("arc length must lie in (0, 2*pi]")

    def contains(self, z):
        zz = _as_complex(z)
        r = np.abs(zz)
        dtheta = np.abs(_wrap_angle(np.angle(zz) - self.theta_center))
        mask = (
            (r >= max(0.0, 1.0 - self.arc_length))
            & (r < 1.0)
            & (dtheta <= 0.5 * self.arc_length)
        )
        return _scalarize(mask, z)

    def bounding_box(self):
        half = 0.5 * self.arc_length
        return (
            max(0.0, 1.0 - self.arc_length),
            1.0,
            self.theta_center - half,
            self.theta_center + half,
        )

    def angular_interval(self, r):
        if not max(0.0, 1.0 - self.arc_length) <= r < 1.0:
            return None
        return self.theta_center, min(0.5 * self.arc_length, math.pi)

    def params(self):
        return {"theta_center": self.theta_center,
                "arc_length": self.arc_length}


@dataclass(frozen=True, repr=False)
class Cone(Region):
    """Aperture region of the point ``u != 0``: all ``z`` with
    ``|arg u - arg z| <= (1 - |z|/|u|) / 2`` (angles wrapped).  Contains
    the radius ``[0, u]`` and shrinks as ``|u| -> 1``."""

    u: complex

    variant = "cone"

    def __post_init__(self):
        if self.u == 0:
            raise DomainError("cone vertex must be nonzero")

    def contains(self, z):
        zz = _as_complex(z)
        r0 = abs(self.u)
        theta0 = cmath.phase(self.u)
        # np.angle(0) == 0, so the origin is tested with argument 0.
        dtheta = np.abs(_wrap_angle(np.angle(zz) - theta0))
        mask = dtheta <= 0.5 * (1.0 - np.abs(zz) / r0)
        return _scalarize(mask, z)

    def bounding_box(self):
        theta0 = cmath.phase(self.u)
        return (0.0, abs(self.u), theta0 - 0.5, theta0 + 0.5)

    def angular_interval(self, r):
        r0 = abs(self.u)
        if not 0.0 <= r <= r0:
            return None
        half = 0.5 * (1.0 - r / r0)
        if half <= 0.0:
            return None
        return cmath.phase(self.u), half

    def params(self):
        return {"u": [self.u.real, self.u.imag]}


@dataclass(frozen=True, repr=False)
class Tent(Region):
    """Dual of the cone: the tent of ``z`` collects every vertex ``u``
    whose cone contains ``z``.  The vertex ``u = 0`` has no cone and is
    never a member."""

    z: complex

    variant = "tent"

    def __post_init__(self):
        if abs(self.z) >= 1.0:
            raise DomainError("tent apex must lie inside the disc")

    def contains(self, u):
        uu = _as_complex(u)
        r = np.abs(uu)
        theta_z = cmath.phase(self.z) if self.z != 0 else 0.0
        dtheta = np.abs(_wrap_angle(np.angle(uu) - theta_z))
        with np.errstate(divide="ignore", invalid="ignore"):
            aperture = 0.5 * (1.0 - abs(self.z) / r)
        mask = (r > 0.0) & (dtheta <= aperture)
        return _scalarize(mask, u)

    def bounding_box(self):
        theta_z = cmath.phase(self.z) if self.z != 0 else 0.0
        half = 0.5 * (1.0 - abs(self.z))
        return (abs(self.z), 1.0, theta_z - half, theta_z + half)

    def angular_interval(self, r):
        mod = abs(self.z)
        if not (0.0 < r < 1.0 and r >= mod):
            return None
        half = 0.5 * (1.0 - mod / r)
        if half <= 0.0:
            return None
        return (cmath.phase(self.z) if self.z != 0 else 0.0), half

    def params(self):
        return {"z": [self.z.real, self.z.imag]}


@dataclass(frozen=True, repr=False)
class PseudoDisc(Region):
    """Moebius-invariant disc ``{z : rho(center, z) < radius}`` with the
    pseudohyperbolic distance ``rho``; membership is exact."""

    center: complex
    radius: float

    variant = "pseudodisc"

    def __post_init__(self):
        if abs(self.center) >= 1.0:
            raise DomainError("centre must lie inside the disc")
        if not 0.0 < self.radius < 1.0:
            raise DomainError("pseudohyperbolic radius must lie in (0, 1)")

    def contains(self, z):
        zz = _as_complex(z)
        mask = pseudo_distance(self.center, zz) < self.radius
        return _scalarize(mask, z)

    def euclidean_image(self):
        """The region is a Euclidean disc; return its ``(center, radius)``."""
        a, s = self.center, self.radius
        denom = 1.0 - (s * abs(a)) ** 2
        return a * (1.0 - s * s) / denom, s * (1.0 - abs(a) ** 2) / denom

    def bounding_box(self):
        c, rad = self.euclidean_image()
        return _disc_box(c, rad)

    def angular_interval(self, r):
        c, rad = self.euclidean_image()
        return _circle_chord(r, c, rad)

    def params(self):
        return {"center": [self.center.real, self.center.imag],
                "radius": self.radius}


@dataclass(frozen=True, repr=False)
class EuclideanDisc(Region):
    """Plain disc ``{z : |z - center| < radius}`` intersected with the
    unit disc.  Used where a measure comparison genuinely wants Euclidean
    metric balls rather than Moebius-invariant ones."""

    center: complex
    radius: float

    variant = "disc"

    def __post_init__(self):
        if abs(self.center) >= 1.0:
            raise DomainError("centre must lie inside the disc")
        if self.radius <= 0.0:
            raise DomainError("radius must be positive")

    def contains(self, z):
        zz = _as_complex(z)
        mask = (np.abs(zz - self.center) < self.radius) & (np.abs(zz) < 1.0)
        return _scalarize(mask, z)

    def bounding_box(self):
        r_min, r_max, t_min, t_max = _disc_box(self.center, self.radius)
        return r_min, min(r_max, 1.0), t_min, t_max

    def angular_interval(self, r):
        if r >= 1.0:
            return None
        return _circle_chord(r, self.center, self.radius)

    def params(self):
        return {"center": [self.center.real, self.center.imag],
                "radius": self.radius}


@dataclass(frozen=True, repr=False)
class DyadicCell(Region):
    """Generation-``n`` cell number ``k``: angles in
    ``[2 pi k / 2^n, 2 pi (k+1) / 2^n)`` and radii in
    ``[1 - 2^-n, 1 - 2^-(n+1))`` (full-turn-relative arc length; the
    generation bands tile the disc).  The anchor point sits at the arc
    midpoint on the inner radius, except that the root cell is anchored
    at ``1/2`` by convention."""

    n: int
    k: int

    variant = "dyadic_cell"

    def __post_init__(self):
        if self.n < 0:
            raise DomainError("generation must be nonnegative")
        if not 0 <= self.k < 2 ** self.n:
            raise DomainError("cell index must lie in [0, 2^n)")

    def contains(self, z):
        zz = _as_complex(z)
        r = np.abs(zz)
        theta = np.mod(np.angle(zz), _TWO_PI)
        width = _TWO_PI / 2 ** self.n
        r_lo = 1.0 - 2.0 ** -self.n
        r_hi = 1.0 - 2.0 ** -(self.n + 1)
        mask = (
            (r >= r_lo) & (r < r_hi)
            & (theta >= self.k * width) & (theta < (self.k + 1) * width)
        )
        return _scalarize(mask, z)

    def anchor(self):
        """Representative point of the cell (root cell: ``1/2``)."""
        if self.n == 0:
            return complex(0.5, 0.0)
        width = _TWO_PI / 2 ** self.n
        theta_mid = (self.k + 0.5) * width
        r_lo = 1.0 - 2.0 ** -self.n
        z = r_lo * cmath.exp(1j * theta_mid)
        # The anchor sits on the closed inner boundary; the polar round
        # trip can land one ulp short of it, so nudge back inside (judged
        # by the same modulus routine ``contains`` uses).
        while float(np.abs(z)) < r_lo:
            z *= 1.0 + 4e-16
        return z

    def bounding_box(self):
        width = _TWO_PI / 2 ** self.n
        return (
            1.0 - 2.0 ** -self.n,
            1.0 - 2.0 ** -(self.n + 1),
            self.k * width,
            (self.k + 1) * width,
        )

    def angular_interval(self, r):
        if not 1.0 - 2.0 ** -self.n <= r < 1.0 - 2.0 ** -(self.n + 1):
            return None
        width = _TWO_PI / 2 ** self.n
        return (self.k + 0.5) * width, 0.5 * width

    def params(self):
        return {"n": self.n, "k": self.k}


def _circle_chord(r, center, radius):
    """Arc cut from the circle ``|z| = r`` by the Euclidean disc
    ``|z - center| < radius``: ``(theta_center, halfwidth)`` or ``None``."""
    d = abs(center)
    if r <= 0.0:
        return None
    if d < 1e-14:
        return (0.0, math.pi) if r < radius else None
    x = (r * r + d * d - radius * radius) / (2.0 * r * d)
    if x >= 1.0:
        return None
    if x <= -1.0:
        return cmath.phase(center), math.pi
    return cmath.phase(center), math.acos(x)


def _disc_box(center, radius):
    """Polar bounding box of the Euclidean disc ``|z - center| < radius``."""
    c = abs(center)
    r_min = max(0.0, c - radius)
    r_max = c + radius
    if c <= radius:
        # The origin is inside: all angles occur.
        return r_min, r_max, -math.pi, math.pi
    theta0 = cmath.phase(center)
    half = math.asin(min(1.0, radius / c))
    return r_min, r_max, theta0 - half, theta0 + half


# -- point constructions and metrics -----------------------------------


def square_of_point(a):
    """Carleson square attached to ``a != 0``: arc of plain length
    ``1 - |a|`` centred at ``arg a``, radii ``[|a|, 1)``."""
    a = complex(a)
    if a == 0:
        raise DomainError("the square of a point needs a direction: a != 0")
    if abs(a) >= 1.0:
        raise DomainError("point must lie inside the disc")
    return Square(theta_center=cmath.phase(a), arc_length=1.0 - abs(a))


def in_cone(u, z):
    """Whether ``z`` lies in the aperture region of the vertex ``u != 0``."""
    return Cone(complex(u)).contains(z)


def in_tent(z, u):
    """Whether the vertex ``u`` lies in the tent of ``z``; by definition
    this equals ``in_cone(u, z)``."""
    return Tent(complex(z)).contains(u)


def mobius(a, z):
    """Disc automorphism ``(a - z) / (1 - conj(a) z)`` swapping ``0`` and
    ``a``; an involution (vectorised in ``z``)."""
    a = complex(a)
    if abs(a) >= 1.0:
        raise DomainError("automorphism parameter must lie inside the disc")
    zz = _as_complex(z)
    out = (a - zz) / (1.0 - np.conj(a) * zz)
    if np.ndim(z) == 0:
        return complex(out)
    return out


def pseudo_distance(z, w):
    """Pseudohyperbolic distance ``|(z - w) / (1 - conj(z) w)|``;
    symmetric, Moebius invariant, ``pseudo_distance(0, w) = |w|``."""
    zz = _as_complex(z)
    ww = _as_complex(w)
    out = np.abs((zz - ww) / (1.0 - np.conj(zz) * ww))
    if np.ndim(z) == 0 and np.ndim(w) == 0:
        return float(out)
    return out


def hyperbolic_distance(z, w):
    """Hyperbolic distance ``(1/2) log((1 + rho)/(1 - rho))`` where
    ``rho`` is the pseudohyperbolic distance."""
    rho = pseudo_distance(z, w)
    return 0.5 * np.log((1.0 + rho) / (1.0 - rho)) if np.ndim(rho) else \
        0.5 * math.log((1.0 + rho) / (1.0 - rho))


def dyadic_cells(levels):
    """All cells of generations ``0 .. levels`` paired with their anchor
    points; ``levels >= 1``.  Returns ``2^(levels+1) - 1`` cells, pairwise
    disjoint, covering radii ``[0, 1 - 2^-(levels+1))``."""
    if levels < 1:
        raise DomainError("need at least one generation beyond the root")
    out = []
    for n in range(levels + 1):
        for k in range(2 ** n):
            cell = DyadicCell(n=n, k=k)
            out.append((cell, cell.anchor()))
    return out


_VARIANTS = {
    "square": lambda p: Square(p["theta_center"], p["arc_length"]),
    "cone": lambda p: Cone(complex(*p["u"])),
    "tent": lambda p: Tent(complex(*p["z"])),
    "pseudodisc": lambda p: PseudoDisc(complex(*p["center"]), p["radius"]),
    "disc": lambda p: EuclideanDisc(complex(*p["center"]), p["radius"]),
    "dyadic_cell": lambda p: DyadicCell(p["n"], p["k"]),
}


def region_from_json(doc):
    """Inverse of ``Region.to_json``."""
    try:
        build = _VARIANTS[doc["variant"]]
    except KeyError:
        raise DomainError(f"unknown region variant: {doc.get('variant')!r}")
    return build(doc["params"])

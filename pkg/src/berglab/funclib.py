"""Analytic test functions with exact values and derivatives.

Every family implements the :class:`AnalyticMap` interface:

* ``value(z)`` -- evaluation, vectorised over complex arrays;
* ``deriv(k, z)`` -- the ``k``-th derivative for ``k <= 4``, computed by
  analytic rules (termwise for series, Leibniz/quotient recursions for
  products and rationals) -- never by finite differences;
* ``zeros()`` -- the declared zero list (with multiplicity, ordered by
  modulus) where the family knows it, else ``None``;
* ``taylor_coefficients(n_max)`` -- exact Maclaurin coefficients where
  the family has a closed rule, else ``None``.

Families
--------

``Polynomial``
    plain coefficient vectors.
``HadamardLacunary``
    gap series ``sum c_k z^(2^k)``; includes the all-ones series and the
    per-weight witness with coefficients
    ``c_k = 2^(-k/2) (psi(r_k) log(e * total / tail(r_k)))^(-1/2)``,
    ``r_k = 1 - 2^-k`` (``psi`` = distortion quotient; the tail is
    normalised by the total mass so the logarithm stays positive).
``KernelPower`` / ``normalized_kernel_power``
    powers ``((1-|a|^2)/(1 - conj(a) z))^((gamma+1)/p)`` of the standard
    kernel, and the unit-scale variant divided by the weight's Carleson
    square mass.  The principal branch is globally consistent because
    ``1 - conj(a) z`` stays in the right half plane for ``|a|, |z| < 1``.
``BlaschkeProduct`` / ``HorowitzProduct``
    finite products of disc automorphisms ``(a-z)/(1-conj(a) z)``, and
    the damped variant with factors ``B_k (2 - B_k)`` whose modulus is
    better behaved near the boundary.
``ZeroSetExtremal``
    the lacunary product ``prod_k (1 + a_k z^(2^k))/(1 + z^(2^k)/a_k)``
    with ``a_k = (tail(1-2^-k)/tail(1-2^-(k+1)))^(1/q)``; block ``k``
    contributes ``2^k`` simple zeros on the circle of radius
    ``a_k^(-2^-k)``.  This is the canonical zero set that is as dense as
    membership in the ``q``-power space allows.
``NegLog``
    ``-log(1-z)``, the model unbounded function of slow growth.

Integral means ``M_p(r, f)`` and maximum modulus over circles are
computed by doubling trapezoid rules (spectrally accurate for analytic
integrands).
"""

import json
import math

import numpy as np
from scipy.special import hyp2f1

from .errors import (
    DomainError,
    InconsistencyError,
    NumericError,
    PreconditionError,
)

__all__ = [
    "AnalyticMap", "Polynomial", "HadamardLacunary", "KernelPower",
    "BlaschkeProduct", "HorowitzProduct", "ZeroSetExtremal", "NegLog",
    "hadamard_ones", "lacunary_witness", "kernel_power",
    "normalized_kernel_power", "kernel_power_norm",
    "default_kernel_exponent", "zeroset_extremal", "zeroset_extremal_zeros",
    "integral_means", "max_modulus", "parse_function",
]

MAX_DERIV_ORDER = 4
#: default safe evaluation radius for infinite-product families
SAFE_RADIUS = 1.0 - 1e-8

_BINOM = [[math.comb(k, j) for j in range(k + 1)]
          for k in range(MAX_DERIV_ORDER + 1)]


def _as_complex(z):
    return np.asarray(z, dtype=complex)


def _scalarize(out, z):
    if np.ndim(z) == 0:
        return complex(out)
    return out


def _check_order(k):
    k = int(k)
    if k < 0 or k > MAX_DERIV_ORDER:
        raise DomainError(
            f"derivative order must lie in [0, {MAX_DERIV_ORDER}]")
    return k


def _leibniz(a, b):
    """Derivative lists of a product from those of its factors."""
    order = len(a) - 1
    return [
        sum(_BINOM[k][j] * a[j] * b[k - j] for j in range(k + 1))
        for k in range(order + 1)
    ]


def _quotient(num, den):
    """Derivative list of ``num/den`` from the factor lists."""
    order = len(num) - 1
    out = [num[0] / den[0]]
    for k in range(1, order + 1):
        acc = num[k]
        for j in range(k):
            acc = acc - _BINOM[k][j] * out[j] * den[k - j]
        out.append(acc / den[0])
    return out


def _falling(m, j):
    out = 1.0
    for i in range(j):
        out *= m - i
    return out


class AnalyticMap:
    """Base interface; see the module docstring."""

    label = "analytic"

    def value(self, z):
        raise NotImplementedError

    __call__ = value

    def deriv(self, k, z):
        raise NotImplementedError

    def zeros(self):
        """Declared zeros (with multiplicity, nondecreasing modulus),
        or ``None`` when the family has no zero bookkeeping."""
        return None

    def taylor_coefficients(self, n_max):
        """Maclaurin coefficients ``c_0..c_n_max`` where exact, else
        ``None``."""
        return None

    def params(self):
        return {}

    def __repr__(self):
        inner = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({inner})"


class Polynomial(AnalyticMap):
    """``c_0 + c_1 z + ... + c_d z^d``; derivatives of any order up to
    the interface cap; disc zeros computed from the companion matrix on
    demand."""

    label = "poly"

    def __init__(self, coeffs):
        arr = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("polynomial needs a nonempty coefficient vector")
        self.coeffs = arr
        self._dcoeffs = {0: arr}
        self._disc_zeros = None

    def _coeffs_for(self, k):
        if k not in self._dcoeffs:
            self._dcoeffs[k] = np.polynomial.polynomial.polyder(
                self.coeffs, m=k)
        return self._dcoeffs[k]

    def value(self, z):
        zz = _as_complex(z)
        return _scalarize(np.polynomial.polynomial.polyval(zz, self.coeffs), z)

    def deriv(self, k, z):
        k = _check_order(k)
        c = self._coeffs_for(k)
        zz = _as_complex(z)
        if c.size == 0:
            return _scalarize(np.zeros_like(zz), z)
        return _scalarize(np.polynomial.polynomial.polyval(zz, c), z)

    def degree(self):
        nz = np.nonzero(self.coeffs)[0]
        return int(nz[-1]) if nz.size else 0

    def zeros(self):
        if self._disc_zeros is None:
            nz = np.nonzero(self.coeffs)[0]
            if nz.size == 0 or nz[-1] == 0:
                self._disc_zeros = []
            else:
                roots = np.polynomial.polynomial.polyroots(
                    self.coeffs[: nz[-1] + 1])
                inside = roots[np.abs(roots) < 1.0]
                self._disc_zeros = sorted(
                    (complex(r) for r in inside), key=abs)
        return list(self._disc_zeros)

    def taylor_coefficients(self, n_max):
        out = np.zeros(n_max + 1, dtype=complex)
        m = min(n_max + 1, self.coeffs.size)
        out[:m] = self.coeffs[:m]
        return out

    def params(self):
        return {"coeffs": [[c.real, c.imag] for c in self.coeffs]}


class NegLog(AnalyticMap):
    """``-log(1-z)`` (principal branch); the model Bloch function with
    coefficients ``z^n / n``."""

    label = "neglog"

    def value(self, z):
        zz = _as_complex(z)
        if np.any(np.abs(1.0 - zz) < 1e-14):
            raise NumericError("evaluation too close to the singularity at 1")
        return _scalarize(-np.log(1.0 - zz), z)

    def deriv(self, k, z):
        k = _check_order(k)
        if k == 0:
            return self.value(z)
        zz = _as_complex(z)
        if np.any(np.abs(1.0 - zz) < 1e-14):
            raise NumericError("evaluation too close to the singularity at 1")
        return _scalarize(
            math.factorial(k - 1) * (1.0 - zz) ** (-float(k)), z)

    def zeros(self):
        return [0j]

    def taylor_coefficients(self, n_max):
        out = np.zeros(n_max + 1, dtype=complex)
        if n_max >= 1:
            out[1:] = 1.0 / np.arange(1, n_max + 1)
        return out


class HadamardLacunary(AnalyticMap):
    """Gap series ``sum_k c_k z^(2^k)`` with a coefficient rule
    ``c_k = coeff(k)``.  Evaluation truncates once the next exponent
    exceeds ``1000 / (1 - max |z|)``; beyond that point every retained
    digit of the omitted terms is below double precision."""

    label = "hlac"

    def __init__(self, coeff, label=None, k_cap=60):
        self._coeff = coeff
        self._cache = {}
        self.k_cap = int(k_cap)
        if label is not None:
            self.label = label

    def coefficient(self, k):
        """``c_k``, cached."""
        if k not in self._cache:
            self._cache[k] = float(self._coeff(k))
        return self._cache[k]

    def _k_range(self, z):
        zz = _as_complex(z)
        rmax = float(np.max(np.abs(zz))) if zz.size else 0.0
        if rmax >= 1.0:
            raise DomainError("gap series evaluated inside the disc only")
        bound = 1e3 / max(1e-12, 1.0 - rmax)
        ks = []
        for k in range(self.k_cap + 1):
            if 2.0 ** k > bound and k > 0:
                break
            ks.append(k)
        return zz, ks

    def value(self, z):
        zz, ks = self._k_range(z)
        acc = np.zeros_like(zz)
        y = zz
        for k in ks:
            acc = acc + self.coefficient(k) * y
            y = y * y
        return _scalarize(acc, z)

    def deriv(self, j, z):
        j = _check_order(j)
        if j == 0:
            return self.value(z)
        zz, ks = self._k_range(z)
        acc = np.zeros_like(zz)
        for k in ks:
            m = 2 ** k
            if m < j:
                continue
            acc = acc + (self.coefficient(k) * _falling(m, j)) \
                * np.power(zz, m - j)
        return _scalarize(acc, z)

    def taylor_coefficients(self, n_max):
        out = np.zeros(n_max + 1, dtype=complex)
        k = 0
        while 2 ** k <= n_max and k <= self.k_cap:
            out[2 ** k] = self.coefficient(k)
            k += 1
        return out

    def params(self):
        return {"label": self.label}


def hadamard_ones():
    """The unit-coefficient gap series ``sum_k z^(2^k)``."""
    return HadamardLacunary(lambda k: 1.0, label="hlac")


def lacunary_witness(w):
    """Gap series tuned to the weight ``w``: coefficients

    ``c_k = 2^(-k/2) * (psi(r_k) * log(e * total / tail(r_k)))^(-1/2)``

    with ``r_k = 1 - 2^-k``.  Its squared Hadamard coefficients sum like
    the (divergent, doubly logarithmically) integral
    ``int dr / (psi(r) log(e*total/tail(r)))`` whenever ``psi(r)/(1-r)``
    grows, while its derivative's sup-modulus decays fast enough for the
    vanishing square-mean criterion -- the separating example between
    the two boundary-growth classes."""
    total = w.total()
    ln2 = math.log(2.0)

    def coeff(k):
        tail = w.tail_at_t(k * ln2)
        if tail <= 0.0:
            return 0.0
        psi = tail / float(w.eval_u(2.0 ** -k))
        log_term = 1.0 + math.log(total / tail)
        return 1.0 / math.sqrt(2.0 ** k * psi * log_term)

    return HadamardLacunary(coeff, label="lacwitness")


class KernelPower(AnalyticMap):
    """``scale * (1 - conj(a) z)^(-s)`` on the principal branch; covers
    the normalised kernel powers ``((1-|a|^2)/(1-conj(a) z))^s`` with
    ``s = (gamma+1)/p`` and their unit-mass variants."""

    label = "Fap"

    def __init__(self, a, s, scale=None, label=None):
        a = complex(a)
        if abs(a) >= 1.0:
            raise DomainError("kernel point must lie inside the disc")
        s = float(s)
        if s <= 0.0:
            raise DomainError("kernel exponent must be positive")
        self.a = a
        self.s = s
        self.scale = float(scale) if scale is not None \
            else (1.0 - abs(a) ** 2) ** s
        if label is not None:
            self.label = label

    def _base(self, z):
        zz = _as_complex(z)
        lin = 1.0 - np.conj(self.a) * zz
        if np.any(np.abs(lin) < 1e-14):
            raise NumericError(
                "kernel power evaluated too close to its branch point")
        return zz, lin

    def value(self, z):
        _, lin = self._base(z)
        out = self.scale * np.exp(-self.s * np.log(lin))
        return _scalarize(out, z)

    def deriv(self, k, z):
        k = _check_order(k)
        _, lin = self._base(z)
        out = self.scale * np.exp(-self.s * np.log(lin))
        if k:
            poch = 1.0
            for j in range(k):
                poch *= self.s + j
            out = out * poch * (np.conj(self.a) / lin) ** k
        return _scalarize(out, z)

    def zeros(self):
        return []

    def taylor_coefficients(self, n_max):
        # (1 - w z)^(-s) = sum poch(s, m)/m! (w z)^m, w = conj(a)
        out = np.zeros(n_max + 1, dtype=complex)
        term = complex(self.scale)
        w = np.conj(self.a)
        out[0] = term
        for m in range(1, n_max + 1):
            term = term * (self.s + m - 1) / m * w
            out[m] = term
        return out

    def params(self):
        return {"a": [self.a.real, self.a.imag], "s": self.s,
                "scale": self.scale}


def kernel_power(a, p, gamma):
    """``((1-|a|^2)/(1-conj(a) z))^((gamma+1)/p)``; identically 1 when
    ``a = 0``."""
    if p <= 0:
        raise DomainError("integrability exponent must be positive")
    return KernelPower(a, (float(gamma) + 1.0) / float(p))


def normalized_kernel_power(w, a, p, gamma=None):
    """Kernel power rescaled to unit order of magnitude in the ``p``
    norm against ``w``:

    ``(1-|a|)^((gamma+1)/p) * (1-conj(a) z)^(-(gamma+1)/p)
    / square_mass(a)^(1/p)``.

    With ``gamma`` omitted, a per-weight default is chosen by the
    flat-norm probe of :func:`default_kernel_exponent`."""
    if p <= 0:
        raise DomainError("integrability exponent must be positive")
    if gamma is None:
        gamma = default_kernel_exponent(w, p)
    a = complex(a)
    s = (float(gamma) + 1.0) / float(p)
    scale = (1.0 - abs(a)) ** s / w.square_mass(a) ** (1.0 / float(p))
    return KernelPower(a, s, scale=scale, label="fap")


def kernel_power_norm(w, a, p, gamma, normalized=True, *, rel_tol=1e-10):
    """``p``-th power of the weighted norm of the (normalised) kernel
    power, by the exact angular mean

    ``(1/2pi) int |1 - conj(a) z|^(-2c) dtheta = 2F1(c, c; 1; |a|^2 r^2)``

    with ``2c = gamma + 1``, leaving a single radial integral for the
    weight machinery.  This closed angular form is what the 2-D disc
    quadrature is checked against."""
    a = complex(a)
    mod = abs(a)
    if mod >= 1.0:
        raise DomainError("kernel point must lie inside the disc")
    gamma = float(gamma)
    c = 0.5 * (gamma + 1.0)

    def phi(t):
        t = np.asarray(t, dtype=float)
        r = -np.expm1(-t)
        return 2.0 * r * hyp2f1(c, c, 1.0, (mod * r) ** 2)

    hints = (-math.log1p(-mod),) if mod > 0.5 else ()
    radial = w._weighted_tail(0.0, phi, rel_tol=rel_tol, extra_breaks=hints)
    if not normalized:
        return (1.0 - mod ** 2) ** (gamma + 1.0) * radial
    return (1.0 - mod) ** (gamma + 1.0) / w.square_mass(a) * radial


_GAMMA_LADDER = (1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0)
_GAMMA_PROBE_POINTS = (0.5, 0.9, 0.99, 0.9999)


def default_kernel_exponent(w, p, ladder=_GAMMA_LADDER, spread_bound=3.0):
    """Smallest exponent ``gamma`` from the ladder whose normalised
    kernel powers have ``p``-norms flat (max/min below ``spread_bound``)
    across probe points up to ``|a| = 0.9999``.  Too small a ``gamma``
    shows up as a slow logarithmic drift of the norm, which this probe
    rejects."""
    for gamma in ladder:
        vals = [kernel_power_norm(w, a, p, gamma, rel_tol=1e-8)
                for a in _GAMMA_PROBE_POINTS]
        lo, hi = min(vals), max(vals)
        if lo > 0.0 and hi / lo <= spread_bound:
            return gamma
    raise InconsistencyError(
        "no exponent in the ladder flattens the kernel-power norms; "
        "the weight's square masses may decay irregularly")


class _ProductBase(AnalyticMap):
    """Common machinery for finite products: each factor reports its
    derivative list at the evaluation points; factors are combined
    pairwise by the Leibniz rule, rational families with one final
    quotient recursion."""

    def _factor_derivs(self, zz, order):
        raise NotImplementedError

    def _combined(self, z, order):
        zz = _as_complex(z)
        num_acc = None
        den_acc = None
        for num, den in self._factor_derivs(zz, order):
            num_acc = num if num_acc is None else _leibniz(num_acc, num)
            if den is not None:
                den_acc = den if den_acc is None else _leibniz(den_acc, den)
        if num_acc is None:
            one = np.ones_like(zz)
            num_acc = [one] + [np.zeros_like(zz) for _ in range(order)]
        if den_acc is None:
            return num_acc
        return _quotient(num_acc, den_acc)

    def value(self, z):
        return _scalarize(self._combined(z, 0)[0], z)

    def deriv(self, k, z):
        k = _check_order(k)
        return _scalarize(self._combined(z, k)[k], z)


class BlaschkeProduct(_ProductBase):
    """Finite product of disc automorphisms ``(a_k - z)/(1 - conj(a_k) z)``
    over the given zeros (no extra unimodular normalisation); zeros at
    the origin contribute factors ``-z``."""

    label = "blaschke"

    def __init__(self, zeros):
        zs = [complex(zk) for zk in zeros]
        if any(abs(zk) >= 1.0 for zk in zs):
            raise DomainError("Blaschke zeros must lie inside the disc")
        self._zeros = sorted(zs, key=abs)

    def _factor_derivs(self, zz, order):
        zero_arr = np.zeros_like(zz)
        for a in self._zeros:
            num = [a - zz, -np.ones_like(zz)] + [zero_arr] * (order - 1) \
                if order >= 1 else [a - zz]
            den = [1.0 - np.conj(a) * zz, -np.conj(a) * np.ones_like(zz)] \
                + [zero_arr] * (order - 1) if order >= 1 \
                else [1.0 - np.conj(a) * zz]
            yield num, den

    def zeros(self):
        return list(self._zeros)

    def params(self):
        return {"zeros": [[zk.real, zk.imag] for zk in self._zeros]}


class HorowitzProduct(_ProductBase):
    """Product of damped factors ``B_k (2 - B_k)`` over the given zeros,
    where ``B_k`` is the single automorphism factor of ``z_k``.  Same
    zero set as the Blaschke product; each factor's modulus equals
    ``|1 - (1 - B_k)^2|``, which stays close to 1 on far larger sets."""

    label = "horowitz"

    def __init__(self, zeros):
        zs = [complex(zk) for zk in zeros]
        if any(abs(zk) >= 1.0 for zk in zs):
            raise DomainError("zeros must lie inside the disc")
        self._zeros = sorted(zs, key=abs)

    def _factor_derivs(self, zz, order):
        zero_arr = np.zeros_like(zz)
        for a in self._zeros:
            num = [a - zz] + ([-np.ones_like(zz)] + [zero_arr] * (order - 1)
                              if order >= 1 else [])
            den = [1.0 - np.conj(a) * zz] \
                + ([-np.conj(a) * np.ones_like(zz)] + [zero_arr] * (order - 1)
                   if order >= 1 else [])
            phi = _quotient(num, den)
            damp = [2.0 - phi[0]] + [-p for p in phi[1:]]
            yield _leibniz(phi, damp), None

    def zeros(self):
        return list(self._zeros)

    def params(self):
        return {"zeros": [[zk.real, zk.imag] for zk in self._zeros]}


class ZeroSetExtremal(_ProductBase):
    """Lacunary product ``prod_{k>=1} (1 + a_k y_k)/(1 + y_k / a_k)``,
    ``y_k = z^(2^k)``, with ``a_k = (tail(1-2^-k)/tail(1-2^-(k+1)))^(1/q)``
    computed from the weight's tails.  Block ``k`` has ``2^k`` simple
    zeros on ``|z| = a_k^(-2^-k)`` at the ``2^k``-th roots of ``-1/a_k``;
    the declared list carries the first ``blocks`` blocks
    (``2^(blocks+1) - 2`` zeros).  Factors are included until the tail
    bound ``|a_k - 1/a_k| r^(2^k) < 1e-16`` prunes the rest."""

    label = "extremal"

    def __init__(self, q, w, blocks=12, k_cap=60):
        if q <= 0:
            raise DomainError("integrability exponent must be positive")
        self.q = float(q)
        self.w = w
        self.blocks = int(blocks)
        if self.blocks < 1:
            raise DomainError("need at least one zero block")
        self.k_cap = int(k_cap)
        self._a = {}

    def block_scale(self, k):
        """``a_k``, from cached tail values; raises if the computed
        value is not above 1 (the construction then breaks down)."""
        if k not in self._a:
            ln2 = math.log(2.0)
            t_hi = self.w.tail_at_t(k * ln2)
            t_lo = self.w.tail_at_t((k + 1) * ln2)
            if not (t_hi > 0.0 and t_lo > 0.0):
                raise InconsistencyError(
                    f"weight tail underflows in block {k}")
            a = (t_hi / t_lo) ** (1.0 / self.q)
            if not a > 1.0:
                raise InconsistencyError(
                    f"block scale a_{k} = {a} is not above 1; the "
                    "tail-quotient construction needs decreasing tails")
            self._a[k] = a
        return self._a[k]

    def _included_blocks(self, rmax):
        if rmax >= 1.0:
            raise DomainError("product evaluated inside the disc only")
        ks = []
        for k in range(1, self.k_cap + 1):
            a = self.block_scale(k)
            if abs(a - 1.0 / a) * rmax ** (2.0 ** k) < 1e-16 \
                    and k > self.blocks:
                break
            ks.append(k)
            if rmax == 0.0 and k >= self.blocks:
                break
        return ks

    def _factor_derivs(self, zz, order):
        rmax = float(np.max(np.abs(zz))) if zz.size else 0.0
        for k in self._included_blocks(rmax):
            a = self.block_scale(k)
            m = 2 ** k
            y = np.power(zz, m)
            num = [1.0 + a * y]
            den = [1.0 + y / a]
            for j in range(1, order + 1):
                if m >= j:
                    mono = _falling(m, j) * np.power(zz, m - j)
                else:
                    mono = np.zeros_like(zz)
                num.append(a * mono)
                den.append(mono / a)
            yield num, den

    def zeros(self):
        out = []
        for k in range(1, self.blocks + 1):
            a = self.block_scale(k)
            m = 2 ** k
            rad = a ** (-(2.0 ** -k))
            for j in range(m):
                theta = (2 * j + 1) * math.pi / m
                out.append(rad * complex(math.cos(theta), math.sin(theta)))
        return out

    def params(self):
        return {"q": self.q, "blocks": self.blocks,
                "weight": getattr(self.w, "spec", "weight")}


def zeroset_extremal(q, w, blocks=12):
    """Constructor wrapper for :class:`ZeroSetExtremal`."""
    return ZeroSetExtremal(q, w, blocks=blocks)


def zeroset_extremal_zeros(q, w, blocks):
    """The declared zero list of the extremal product: ``2^(k)`` zeros
    per block ``k = 1..blocks``, ordered by modulus."""
    return ZeroSetExtremal(q, w, blocks=blocks).zeros()


# -- circle means -------------------------------------------------------


def integral_means(f, p, r, *, rel_tol=1e-8, n_start=64, n_cap=1 << 18):
    """``M_p(r, f) = ((1/2pi) int |f(r e^(i theta))|^p dtheta)^(1/p)``
    by trapezoid sums on doubling grids until two refinements agree to
    ``rel_tol``; ``p = inf`` delegates to :func:`max_modulus`."""
    if not 0.0 <= r < 1.0:
        raise DomainError("radius must lie in [0, 1)")
    if p == math.inf:
        return max_modulus(f, r)
    p = float(p)
    if p <= 0.0:
        raise DomainError("mean exponent must be positive")
    prev = None
    n = n_start
    while n <= n_cap:
        theta = 2.0 * math.pi * np.arange(n) / n
        vals = np.abs(f.value(r * np.exp(1j * theta))) ** p
        cur = float(np.mean(vals))
        if prev is not None and abs(cur - prev) <= rel_tol * max(cur, 1e-300):
            return cur ** (1.0 / p)
        prev = cur
        n *= 2
    raise NumericError(
        f"circle mean did not stabilise by {n_cap} nodes",
    )


def max_modulus(f, r, *, rel_tol=1e-9, n_start=1024, n_cap=1 << 17):
    """``max_theta |f(r e^(i theta))|`` by doubling grids."""
    if not 0.0 <= r < 1.0:
        raise DomainError("radius must lie in [0, 1)")
    prev = None
    n = n_start
    while n <= n_cap:
        theta = 2.0 * math.pi * np.arange(n) / n
        cur = float(np.max(np.abs(f.value(r * np.exp(1j * theta)))))
        if prev is not None and abs(cur - prev) <= rel_tol * max(cur, 1e-300):
            return cur
        prev = cur
        n *= 2
    return prev


# -- mini-language -------------------------------------------------------


def _parse_complex(text):
    try:
        return complex(str(text).replace(" ", ""))
    except ValueError:
        raise DomainError(f"cannot parse complex literal {text!r}")


def _parse_complex_list(body, what):
    try:
        entries = json.loads(body)
    except json.JSONDecodeError:
        raise DomainError(f"{what} expects a JSON list, got {body!r}")
    if not isinstance(entries, list):
        raise DomainError(f"{what} expects a JSON list, got {body!r}")
    out = []
    for e in entries:
        if isinstance(e, (int, float)):
            out.append(complex(e))
        elif isinstance(e, list) and len(e) == 2:
            out.append(complex(e[0], e[1]))
        elif isinstance(e, str):
            out.append(_parse_complex(e))
        else:
            raise DomainError(f"{what}: cannot parse entry {e!r}")
    return out


def _parse_kv(body, token):
    out = {}
    if not body:
        return out
    for part in body.split(","):
        if "=" not in part:
            raise DomainError(f"{token}: expected key=value, got {part!r}")
        key, val = part.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def parse_function(token, w=None):
    """Build an :class:`AnalyticMap` from a mini-language token:

    ``poly:[c0,c1,...]`` (entries numbers, ``[re,im]`` pairs or complex
    literals), ``hlac``, ``lacwitness``, ``neglog``,
    ``Fap:a=..,p=..,gamma=..``, ``fap:a=..,p=..[,gamma=..]``,
    ``blaschke:[z1,...]``, ``horowitz:[z1,...]``,
    ``extremal:q=..,K=..``.  Families marked with the weight argument
    (``lacwitness``, ``fap``, ``extremal``) need ``w``."""
    token = token.strip()
    name, _, body = token.partition(":")
    name = name.strip()

    def need_weight():
        if w is None:
            raise PreconditionError(
                f"function family {name!r} needs a weight")
        return w

    if name == "poly":
        return Polynomial(_parse_complex_list(body, "poly"))
    if name == "hlac":
        return hadamard_ones()
    if name == "lacwitness":
        return lacunary_witness(need_weight())
    if name == "neglog":
        return NegLog()
    if name == "blaschke":
        return BlaschkeProduct(_parse_complex_list(body, "blaschke"))
    if name == "horowitz":
        return HorowitzProduct(_parse_complex_list(body, "horowitz"))
    if name == "Fap":
        kv = _parse_kv(body, "Fap")
        try:
            a = _parse_complex(kv["a"])
            p = float(kv["p"])
            gamma = float(kv["gamma"])
        except KeyError as exc:
            raise DomainError(f"Fap: missing parameter {exc}")
        return kernel_power(a, p, gamma)
    if name == "fap":
        kv = _parse_kv(body, "fap")
        try:
            a = _parse_complex(kv["a"])
            p = float(kv["p"])
        except KeyError as exc:
            raise DomainError(f"fap: missing parameter {exc}")
        gamma = float(kv["gamma"]) if "gamma" in kv else None
        return normalized_kernel_power(need_weight(), a, p, gamma)
    if name == "extremal":
        kv = _parse_kv(body, "extremal")
        try:
            q = float(kv["q"])
            blocks = int(kv["K"])
        except KeyError as exc:
            raise DomainError(f"extremal: missing parameter {exc}")
        return zeroset_extremal(q, need_weight(), blocks=blocks)
    raise DomainError(f"unknown function token {token!r}")

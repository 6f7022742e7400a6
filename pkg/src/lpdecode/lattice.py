"""Sums of f_s = exp(-(c_p |x| / s)^p) over points, cosets of qZ and the diagonal lattice L_q.

L_q = {(z, z) + q Z^2}. Its f_s-mass normalises every correlation bound downstream.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc

from .errors import OutOfDomain, ToleranceUnreachable, UnsupportedExponent

DEFAULT_TOL = 1e-12
MAX_RADIUS = 10 ** 9
CHUNK = 1 << 20
R0 = math.sqrt(math.log(4) / math.pi)  # boundary where the l2 fudge factor vanishes

Z_SCALED = "Z_SCALED"
LQ_DIAGONAL = "LQ_DIAGONAL"


def c_p(p):
    if p == 1:
        return 2.0
    if p == 2:
        return math.sqrt(math.pi)
    return 2 * math.gamma(1 + 1 / p)


class LpParams:
    __slots__ = ("p", "s", "c")

    def __init__(self, p, s):
        p, s = float(p), float(s)
        if not 0 < p <= 2:
            raise UnsupportedExponent(f"p must lie in (0, 2], got {p}")
        if not s > 0:
            raise ValueError(f"scale must be positive, got {s}")
        self.p, self.s = p, s
        self.c = c_p(p)

    @property
    def c_p(self):
        return self.c

    def f(self, x):
        return np.exp(-(self.c * np.abs(x) / self.s) ** self.p)

    def rescaled(self, s):
        return LpParams(self.p, s)

    def __repr__(self):
        return f"LpParams(p={self.p:g}, s={self.s:g})"


@dataclass(frozen=True)
class LatticeSumResult:
    value: float
    truncation_radius: int
    error_bound: float

    def upper(self):
        return self.value + self.error_bound


def f_point(params, x):
    return float(params.f(x))


def _one_sided_tail(params, R):
    # any set of points >= 1 apart beyond R: sum <= f(R) + integral_R^inf f
    p, s = params.p, params.s
    u = (params.c * R / s) ** p
    return math.exp(-u) + 0.5 * s * gammaincc(1 / p, u)


def banaszczyk_radius(s, tol):
    if not 0 < tol < 1:
        raise ValueError("tol must lie in (0, 1)")

    def ok(t):
        g = 2 * math.exp(-math.pi * t * t / (s * s))
        return g < 1 and g / (1 - g) < tol

    t = max(1, int(s * math.sqrt(math.log(2 * (1 + tol) / tol) / math.pi)) - 1)
    while not ok(t):
        t += 1
    while t > 1 and ok(t - 1):
        t -= 1
    return t


def truncation_radius(params, tol, scale_factor=1.0):
    """Smallest integer R whose two-sided tail times scale_factor is below tol."""
    def bad(R):
        return 2 * _one_sided_tail(params, R) * scale_factor > tol

    hi = max(1, int(math.ceil(params.s)))
    while bad(hi):
        hi *= 2
        if hi > 4 * MAX_RADIUS:
            break
    lo = 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if bad(mid):
            lo = mid
        else:
            hi = mid
    R = hi
    if params.p == 2:
        R = max(R, banaszczyk_radius(params.s, min(tol, 0.5)))
    if R > MAX_RADIUS:
        raise ToleranceUnreachable(f"truncation radius {R} exceeds cap {MAX_RADIUS}")
    return R


def _geom_coset_p1(s, x, q):
    # exact: sum_z exp(-2|x + qz|/s) for x reduced into [0, q)
    x = np.mod(np.asarray(x, dtype=float), q)
    den = -np.expm1(-2.0 * q / s)
    return (np.exp(-2.0 * x / s) + np.exp(-2.0 * (q - x) / s)) / den


def coset_sums(params, y, q, tol=DEFAULT_TOL):
    """Vectorised f_s(y + qZ) for an array of residues y."""
    y = np.asarray(y, dtype=float)
    if params.p == 1:
        return _geom_coset_p1(params.s, y, q)
    R = truncation_radius(params, tol)
    yb = np.mod(y, q)
    yb = np.where(yb >= q / 2, yb - q, yb)
    Z = int(math.ceil(R / q)) + 1
    out = np.zeros_like(yb)
    for z in range(-Z, Z + 1):
        out += params.f(yb + q * z)
    return out


def coset_sum(params, y, q, tol=DEFAULT_TOL):
    return float(coset_sums(params, y, q, tol))


def _coth(x):
    return 1.0 / math.tanh(x)


def lattice_sum_p1_closed(s, q):
    u = q / s
    e = math.exp(-2 * u)
    return _coth(2 / s) * _coth(u) + 2 * q * e / math.expm1(-2 * u) ** 2


def _mass_bound(s, q):
    # crude a-priori upper bound on f_s(Z) * f_s(qZ)
    return (1 + s) * (1 + s / q)


def lattice_sum(params, q, tol=DEFAULT_TOL):
    s = params.s
    if params.p == 1:
        v = lattice_sum_p1_closed(s, q)
        return LatticeSumResult(v, 0, 8 * np.finfo(float).eps * v)
    # tail terms are multiplied by at most f_s(Z) = 1 + s or so; budget for that
    scale = 2 + s + s / q
    R = truncation_radius(params, tol / 2, scale_factor=scale)
    err = 2 * _one_sided_tail(params, R) * scale
    if q > 2 * R + 1:
        parts = [1.0]
        for a in range(1, R + 1, CHUNK):
            x = np.arange(a, min(R, a + CHUNK - 1) + 1, dtype=float)
            parts.append(2 * math.fsum(params.f(x) ** 2))
        v = math.fsum(parts)
    else:
        v = math.fsum(_coset_sums_truncated(params, np.arange(q), q, R) ** 2)
    return LatticeSumResult(v, R, err)


def _coset_sums_truncated(params, x, q, R):
    xb = np.mod(np.asarray(x, dtype=float), q)
    xb = np.where(xb >= q / 2, xb - q, xb)
    Z = int(math.ceil(R / q)) + 1
    out = np.zeros_like(xb)
    for z in range(-Z, Z + 1):
        pts = xb + q * z
        out += np.where(np.abs(pts) <= R, params.f(pts), 0.0)
    return out


def shifted_lattice_sum(params, q, ybar, tol=DEFAULT_TOL):
    """f_s((y, y) + L_q) = sum over x in Z_q of f_s(y - x + qZ)^2."""
    return math.fsum(coset_sums(params, ybar - np.arange(q), q, tol) ** 2)


def fudge_E(p, arg):
    if p == 2:
        if arg < R0 * (1 - 1e-12):
            raise OutOfDomain(f"E(r) needs r >= {R0:.5f}, got {arg}")
        return max(0.0, 1 - 2 * math.exp(-math.pi * arg * arg / 2))
    if p == 1:
        if not arg > 0:
            raise OutOfDomain(f"E(x) needs x > 0, got {arg}")
        if arg > 350:
            return 1.0
        e = math.exp(-2 * arg)
        return 1 / (_coth(arg) + 4 * arg * e / math.expm1(-2 * arg) ** 2)
    raise UnsupportedExponent(f"fudge factor is defined for p = 1 or 2, got {p}")


def fudge_Eq(s, q):
    return math.sqrt(fudge_E(2, q / s) * fudge_E(2, s))


def _gauss_sum_sym(scale, tol):
    # f_scale(Z) for the Gaussian, as 1 + 2 * sum_{z >= 1}
    t = banaszczyk_radius(scale, tol) + 1
    z = np.arange(1, t + 1, dtype=float)
    return 1 + 2 * math.fsum(np.exp(-math.pi * z * z / (scale * scale)))


def roughness(params, q, which, tol=DEFAULT_TOL):
    if params.p != 2:
        raise UnsupportedExponent("roughness is available for p = 2 only")
    s = params.s
    if which == Z_SCALED:
        scale = s * math.sqrt(2) / q
        t = banaszczyk_radius(scale, min(tol, 0.5)) + 1
        z = np.arange(1, t + 1, dtype=float)
        return 2 * math.fsum(np.exp(-math.pi * z * z / (scale * scale)))
    if which == LQ_DIAGONAL:
        # dual lattice points i*(0,1) + j*(1,-1)/q, Gaussian f_{1/s}(w) = exp(-pi s^2 |w|^2)
        t = banaszczyk_radius(1 / s, min(tol, 0.5)) + 1
        J = int(math.ceil(q * t / math.sqrt(2))) + 1
        j = np.arange(-J, J + 1, dtype=float)
        a = j / q
        denom = math.fsum(np.exp(-math.pi * s * s * 2 * a * a))
        I = int(math.ceil(2 * t)) + 1
        num = 0.0
        for i in range(-I, I + 1):
            if i == 0:
                continue
            num += math.fsum(np.exp(-math.pi * s * s * (a * a + (i - a) ** 2)))
        return num / denom
    raise ValueError(f"unknown roughness kind {which!r}")


def lattice_sum_factored(s, q, tol=DEFAULT_TOL):
    """Second, dual-side route for p = 2: s/sqrt2 * (1 + eps') * (1 + eps~)."""
    params = LpParams(2, s)
    e1 = roughness(params, q, Z_SCALED, tol)
    e2 = roughness(params, q, LQ_DIAGONAL, tol)
    return s / math.sqrt(2) * (1 + e1) * (1 + e2)


def psf_check(params, scale=None, tol=DEFAULT_TOL):
    if params.p != 2:
        raise UnsupportedExponent("the Fourier self-duality holds for p = 2 only")
    s = params.s if scale is None else float(scale)
    return abs(_gauss_sum_sym(s, tol) - s * _gauss_sum_sym(1 / s, tol))


def integer_sum(params, tol=DEFAULT_TOL):
    """f_s(Z), closed form coth(1/s) when p = 1."""
    if params.p == 1:
        return _coth(1 / params.s)
    R = truncation_radius(params, tol)
    parts = [1.0]
    for a in range(1, R + 1, CHUNK):
        x = np.arange(a, min(R, a + CHUNK - 1) + 1, dtype=float)
        parts.append(2 * math.fsum(params.f(x)))
    return math.fsum(parts)

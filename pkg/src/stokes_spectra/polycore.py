"""Complex polynomial arithmetic, root finding and contour zero counting.

Shared numerical substrate: everything here is pure (no hidden state) and
safe for concurrent use.
"""

import cmath
import math

import numpy as np

from .errors import ZeroNearContourError, ZeroPolynomialError

TOL_ROOT = 1e-10
TOL_EDGE = 1e-8

_LN2 = math.log(2.0)


class PolynomialC:
    """Polynomial with complex coefficients, stored in ascending degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.asarray(coeffs, dtype=complex)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coeffs must be a non-empty 1-d sequence")
        # trim exact-zero leading coefficients; keep at least the constant
        n = c.size
        while n > 1 and c[n - 1] == 0:
            n -= 1
        self.coeffs = np.array(c[:n], dtype=complex)

    @property
    def degree(self):
        return self.coeffs.size - 1

    def is_zero(self):
        return self.degree == 0 and self.coeffs[0] == 0

    def __call__(self, z):
        return self.eval(z)

    def eval(self, z):
        z = np.asarray(z, dtype=complex)
        acc = np.zeros_like(z)
        for c in self.coeffs[::-1]:
            acc = acc * z + c
        if acc.ndim == 0:
            return complex(acc)
        return acc

    def derivative(self, order=1):
        c = self.coeffs
        for _ in range(order):
            if c.size == 1:
                c = np.zeros(1, dtype=complex)
                break
            c = c[1:] * np.arange(1, c.size)
        return PolynomialC(c)

    def shift_constant(self, w):
        """p + w (add a constant)."""
        c = self.coeffs.copy()
        c[0] += w
        return PolynomialC(c)

    def scaled(self, s):
        return PolynomialC(self.coeffs * s)

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        n = max(a.size, b.size)
        c = np.zeros(n, dtype=complex)
        c[: a.size] += a
        c[: b.size] += b
        return PolynomialC(c)

    def __sub__(self, other):
        return self + other.scaled(-1.0)

    def __mul__(self, other):
        if isinstance(other, PolynomialC):
            return PolynomialC(np.convolve(self.coeffs, other.coeffs))
        return self.scaled(other)

    __rmul__ = __mul__

    def __repr__(self):
        return f"PolynomialC({list(self.coeffs)})"

    def cauchy_bound(self):
        """Radius containing all roots: 1 + max |a_i / a_n|."""
        if self.degree == 0:
            return 0.0
        an = abs(self.coeffs[-1])
        if an == 0:
            raise ZeroPolynomialError("zero polynomial")
        return 1.0 + float(np.max(np.abs(self.coeffs[:-1]))) / an

    @staticmethod
    def from_roots(roots, leading=1.0):
        c = np.array([leading], dtype=complex)
        for r in roots:
            c = np.convolve(c, np.array([-r, 1.0], dtype=complex))
        return PolynomialC(c)

    @staticmethod
    def monomial(degree, coeff=1.0):
        c = np.zeros(degree + 1, dtype=complex)
        c[degree] = coeff
        return PolynomialC(c)


class ScaledComplex:
    """Complex value ``mantissa * 2**exp2`` with an exact integer exponent.

    Rescaling by powers of two is exact in binary floating point, so values
    spanning thousands of orders of magnitude keep full relative precision
    and a continuous phase.
    """

    __slots__ = ("mantissa", "exp2")

    def __init__(self, mantissa, exp2=0):
        self.mantissa = complex(mantissa)
        self.exp2 = int(exp2)

    def normalized(self):
        m, e = self.mantissa, self.exp2
        if m == 0:
            return ScaledComplex(0.0, 0)
        while abs(m) > 2.0**64:
            m *= 2.0**-64
            e += 64
        while abs(m) < 2.0**-64:
            m *= 2.0**64
            e -= 64
        return ScaledComplex(m, e)

    def log_abs(self):
        if self.mantissa == 0:
            return -math.inf
        return math.log(abs(self.mantissa)) + self.exp2 * _LN2

    def phase(self):
        return cmath.phase(self.mantissa)

    def __mul__(self, other):
        if isinstance(other, ScaledComplex):
            return ScaledComplex(
                self.mantissa * other.mantissa, self.exp2 + other.exp2
            ).normalized()
        return ScaledComplex(self.mantissa * other, self.exp2).normalized()

    __rmul__ = __mul__

    def __sub__(self, other):
        other = as_scaled(other)
        if other.mantissa == 0:
            return self
        if self.mantissa == 0:
            return ScaledComplex(-other.mantissa, other.exp2)
        d = self.exp2 - other.exp2
        if d >= 0:
            m = self.mantissa - other.mantissa * 2.0 ** float(-d)
            return ScaledComplex(m, self.exp2).normalized()
        m = self.mantissa * 2.0 ** float(d) - other.mantissa
        return ScaledComplex(m, other.exp2).normalized()

    def __truediv__(self, other):
        other = as_scaled(other)
        return ScaledComplex(
            self.mantissa / other.mantissa, self.exp2 - other.exp2
        ).normalized()

    def to_complex(self):
        return self.mantissa * 2.0 ** float(self.exp2)

    def __repr__(self):
        return f"ScaledComplex({self.mantissa!r}, 2**{self.exp2})"


def as_scaled(v):
    if isinstance(v, ScaledComplex):
        return v
    return ScaledComplex(v)


def _aberth_roots(coeffs):
    """Aberth-Ehrlich simultaneous iteration on the monic normalization."""
    c = np.asarray(coeffs, dtype=complex)
    c = c / c[-1]
    n = c.size - 1
    dc = c[1:] * np.arange(1, n + 1)

    bound = 1.0 + float(np.max(np.abs(c[:-1]))) if n > 0 else 0.0
    k = np.arange(n)
    # spiral of initial guesses; irrational angle offset avoids symmetry locks
    z = (0.4 + 0.9 * bound) * np.exp(2j * np.pi * (k / n + 0.257)) * (
        1.0 + 0.05 * k / max(n, 1)
    )

    for _ in range(400):
        p = np.zeros_like(z)
        for a in c[::-1]:
            p = p * z + a
        dp = np.zeros_like(z)
        for a in dc[::-1]:
            dp = dp * z + a
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(dp != 0, p / dp, 0.0)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.sum(1.0 / diff, axis=1) - 1.0  # remove diagonal's 1/1
        denom = 1.0 - w * s
        step = np.where(denom != 0, w / denom, w)
        z = z - step
        if np.max(np.abs(step)) < 1e-15 * max(1.0, float(np.max(np.abs(z)))):
            break
    # polish with plain Newton
    for _ in range(3):
        p = np.zeros_like(z)
        for a in c[::-1]:
            p = p * z + a
        dp = np.zeros_like(z)
        for a in dc[::-1]:
            dp = dp * z + a
        mask = dp != 0
        z = np.where(mask, z - p / np.where(mask, dp, 1.0), z)
    return z


def roots(p):
    """All roots of ``p`` with multiplicities, as [(root, mult), ...].

    Multiplicities are assigned by clustering roots within 1e-8 of each
    other relative to the root scale.
    """
    if p.is_zero():
        raise ZeroPolynomialError("zero polynomial")
    if p.degree == 0:
        return []
    raw = _aberth_roots(p.coeffs)
    scale = max(1.0, float(np.max(np.abs(raw))))
    tol = 1e-8 * scale
    used = np.zeros(len(raw), dtype=bool)
    out = []
    order = np.argsort(np.abs(raw), kind="stable")
    for i in order:
        if used[i]:
            continue
        cluster = [i]
        used[i] = True
        for j in order:
            if not used[j] and abs(raw[j] - raw[i]) < tol:
                cluster.append(j)
                used[j] = True
        center = complex(np.mean(raw[list(cluster)]))
        out.append((center, len(cluster)))
    out.sort(key=lambda rm: (abs(rm[0]), rm[0].real, rm[0].imag))
    return out


def turning_points(p):
    """Zeros of ``p`` (alias of :func:`roots` in quadratic-differential talk)."""
    return roots(p)


class RectContour:
    """Axis-aligned rectangle used as a zero-counting contour."""

    __slots__ = ("center", "half_width", "half_height", "samples_per_side")

    def __init__(self, center, half_width, half_height, samples_per_side=64):
        if half_width <= 0 or half_height <= 0:
            raise ValueError("half_width and half_height must be positive")
        self.center = complex(center)
        self.half_width = float(half_width)
        self.half_height = float(half_height)
        self.samples_per_side = int(samples_per_side)

    @staticmethod
    def from_bounds(x0, x1, y0, y1, samples_per_side=64):
        return RectContour(
            complex((x0 + x1) / 2.0, (y0 + y1) / 2.0),
            (x1 - x0) / 2.0,
            (y1 - y0) / 2.0,
            samples_per_side,
        )

    @property
    def bounds(self):
        c, w, h = self.center, self.half_width, self.half_height
        return (c.real - w, c.real + w, c.imag - h, c.imag + h)

    def corners(self):
        c, w, h = self.center, self.half_width, self.half_height
        return [c + complex(-w, -h), c + complex(w, -h),
                c + complex(w, h), c + complex(-w, h)]

    def boundary_points(self, n_per_side):
        """Counterclockwise boundary samples, closed (last point = first)."""
        cs = self.corners()
        pts = []
        for a, b in zip(cs, cs[1:] + cs[:1]):
            t = np.arange(n_per_side) / n_per_side
            pts.append(a + (b - a) * t)
        pts = np.concatenate(pts)
        return np.append(pts, pts[0])

    def split(self):
        """Bisect along the longer side into two sub-rectangles."""
        c, w, h = self.center, self.half_width, self.half_height
        if w >= h:
            return (
                RectContour(c - w / 2.0, w / 2.0, h, self.samples_per_side),
                RectContour(c + w / 2.0, w / 2.0, h, self.samples_per_side),
            )
        return (
            RectContour(c - 1j * h / 2.0, w, h / 2.0, self.samples_per_side),
            RectContour(c + 1j * h / 2.0, w, h / 2.0, self.samples_per_side),
        )

    def inflate(self, factor):
        return RectContour(
            self.center,
            self.half_width * factor,
            self.half_height * factor,
            self.samples_per_side,
        )

    def contains(self, z, margin=0.0):
        dz = complex(z) - self.center
        return (
            abs(dz.real) <= self.half_width + margin
            and abs(dz.imag) <= self.half_height + margin
        )

    def __repr__(self):
        x0, x1, y0, y1 = self.bounds
        return f"RectContour([{x0:g},{x1:g}]x[{y0:g},{y1:g}])"


def _eval_on_points(f, pts):
    """Evaluate f on an ordered point list, honoring batch evaluators."""
    if hasattr(f, "eval_many"):
        vals = f.eval_many(list(pts))
    else:
        vals = [f(z) for z in pts]
    return [as_scaled(v) for v in vals]


def count_zeros_in_rect(f, contour, max_doublings=7):
    """Number of zeros of analytic ``f`` inside ``contour`` (with multiplicity).

    Winding number of f along the boundary, computed from accumulated phase
    increments with adaptive sample doubling until the result stabilizes as
    an integer within 0.25 and every increment is below pi/2.

    ``f`` may return complex or :class:`ScaledComplex` values, and may expose
    ``eval_many(points)`` for batched evaluation.
    """
    n = max(8, contour.samples_per_side)
    for _ in range(max_doublings + 1):
        pts = contour.boundary_points(n)
        vals = _eval_on_points(f, pts[:-1])
        logs = [v.log_abs() for v in vals]
        finite = [x for x in logs if x > -math.inf]
        if not finite:
            raise ZeroNearContourError("zero near contour: |f| vanishes on boundary")
        med = float(np.median(finite))
        if min(logs) < med + math.log(TOL_EDGE):
            raise ZeroNearContourError(
                "zero near contour: boundary modulus below tol_edge"
            )
        phases = np.array([v.phase() for v in vals])
        inc = np.diff(np.append(phases, phases[0]))
        inc = (inc + np.pi) % (2 * np.pi) - np.pi
        total = float(np.sum(inc))
        wind = total / (2 * np.pi)
        if abs(wind - round(wind)) < 0.25 and np.max(np.abs(inc)) < np.pi / 2:
            return int(round(wind))
        n *= 2
    raise ZeroNearContourError(
        "winding number failed to stabilize; zero likely near contour"
    )

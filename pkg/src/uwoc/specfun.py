"""Numerical kernel: complex log-gamma, Fox-H / Meijer-G evaluation by
Mellin-Barnes contour quadrature, and small-argument residue series.

The central object is a vertical-line integral

    H(x) = (1/2*pi*j) * int_{c-jT}^{c+jT} phi(s) x^(-s) ds

with

    phi(s) = prod_{j<=m} Gamma(b_j + B_j s) * prod_{j<=n} Gamma(1 - a_j - A_j s)
             -----------------------------------------------------------------
             prod_{j>n} Gamma(a_j + A_j s) * prod_{j>m} Gamma(1 - b_j - B_j s)

where the abscissa c separates the left pole family (from the first m lower
gammas) from the right family (from the first n upper gammas).  All gamma
factors are accumulated in log space; with up to 14 factors per integrand a
linear-space product overflows long before the ratio does.

Meijer-G is the all-unit-scales special case and shares the code path.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq
from scipy.special import digamma, loggamma

__all__ = [
    "MellinBarnesSpec",
    "ContourConfig",
    "DegeneracyError",
    "AccuracyError",
    "DivergenceWarning",
    "DegeneracyWarning",
    "log_gamma_complex",
    "fox_h",
    "meijer_g",
    "residue_series",
]


class DegeneracyError(ValueError):
    """Raised when gamma-factor parameters collide in a way that cannot be
    resolved: contour unable to separate the pole families, or poles still
    coincident after the perturbation rule."""


class AccuracyError(ArithmeticError):
    """Raised when the panel-doubling loop fails to converge.  Carries the
    last two iterates in ``last_two`` for diagnosis."""

    def __init__(self, message, last_two):
        super().__init__(f"{message}; last two iterates {last_two[0]!r}, {last_two[1]!r}")
        self.last_two = last_two


class DivergenceWarning(RuntimeWarning):
    """Emitted when residue-series terms start growing.  Carries the partial
    sum accumulated before the growth was detected."""

    def __init__(self, message, partial_sum):
        super().__init__(message)
        self.partial_sum = partial_sum


class DegeneracyWarning(RuntimeWarning):
    """Emitted when coincident poles were separated by the +1e-6 perturbation
    rule before summing residues."""


# Collision tolerance for pole positions and the perturbation applied to a
# colliding parameter.  Physical parameters are measured reals, so nudging a
# shape parameter by 1e-6 is far below their uncertainty.
_POLE_ATOL = 1e-9
_PERTURB = 1e-6


def log_gamma_complex(z):
    """Principal-branch log-gamma for complex scalar or array input.

    exp(log_gamma_complex(z)) reproduces Gamma(z), which is the property the
    contour integrand relies on.  Non-positive integers are poles and raise.
    """
    arr = np.asarray(z, dtype=complex)
    on_axis = arr.imag == 0.0
    at_pole = on_axis & (arr.real <= 0.0) & (arr.real == np.floor(arr.real))
    if np.any(at_pole):
        where = np.asarray(arr)[at_pole].ravel()[0]
        raise ValueError(f"log-gamma pole at z = {where}")
    out = loggamma(arr)
    if np.isscalar(z) or arr.ndim == 0:
        return complex(out)
    return out


@dataclass(frozen=True)
class MellinBarnesSpec:
    """Parameter block of a Mellin-Barnes integrand.

    ``upper`` holds (a_j, A_j) pairs, length p, of which the first n sit in
    the numerator as Gamma(1 - a_j - A_j s); ``lower`` holds (b_j, B_j)
    pairs, length q, of which the first m sit in the numerator as
    Gamma(b_j + B_j s).  All scales must be positive and the convergence
    exponent delta must be positive for the vertical contour to converge.
    """

    m: int
    n: int
    upper: tuple = field(default=())
    lower: tuple = field(default=())

    def __post_init__(self):
        upper = tuple((float(a), float(A)) for a, A in self.upper)
        lower = tuple((float(b), float(B)) for b, B in self.lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "lower", lower)
        if not (0 <= self.m <= len(lower)):
            raise ValueError(f"need 0 <= m <= q, got m={self.m}, q={len(lower)}")
        if not (0 <= self.n <= len(upper)):
            raise ValueError(f"need 0 <= n <= p, got n={self.n}, p={len(upper)}")
        if any(A <= 0 for _, A in upper) or any(B <= 0 for _, B in lower):
            raise ValueError("all scale entries must be strictly positive")
        if self.delta <= 0:
            raise ValueError(
                f"convergence exponent delta = {self.delta:.6g} <= 0; "
                "vertical-contour integral does not converge"
            )

    @property
    def p(self):
        return len(self.upper)

    @property
    def q(self):
        return len(self.lower)

    @property
    def delta(self):
        """Exponential decay rate (per pi/2 unit) of the integrand along the
        contour: sum of numerator scales minus sum of denominator scales."""
        d = sum(B for _, B in self.lower[: self.m])
        d += sum(A for _, A in self.upper[: self.n])
        d -= sum(A for _, A in self.upper[self.n :])
        d -= sum(B for _, B in self.lower[self.m :])
        return d

    def lower_pole_bound(self):
        """Largest pole of the left family: max_j(-b_j / B_j), j <= m."""
        if self.m == 0:
            return -math.inf
        return max(-b / B for b, B in self.lower[: self.m])

    def upper_pole_bound(self):
        """Smallest pole of the right family: min_j((1 - a_j) / A_j), j <= n."""
        if self.n == 0:
            return math.inf
        return min((1.0 - a) / A for a, A in self.upper[: self.n])


@dataclass(frozen=True)
class ContourConfig:
    """Explicit contour placement and quadrature resolution.

    ``abscissa`` is the real part of the vertical line; ``half_height`` the
    truncation of the imaginary range; ``panels`` the number of Gauss-Legendre
    panels on [0, half_height] (conjugate symmetry supplies the lower half).
    Any field left as None is chosen automatically.
    """

    abscissa: float | None = None
    half_height: float | None = None
    panels: int | None = None
    nodes_per_panel: int = 32

    def __post_init__(self):
        if self.half_height is not None and self.half_height <= 0:
            raise ValueError("half_height must be > 0")
        if self.panels is not None and self.panels <= 0:
            raise ValueError("panels must be > 0")
        if self.nodes_per_panel <= 0:
            raise ValueError("nodes_per_panel must be > 0")


def _log_integrand(spec, s):
    """Sum of log-gamma factors of the integrand at points s (complex array)."""
    out = np.zeros_like(s, dtype=complex)
    for b, B in spec.lower[: spec.m]:
        out += loggamma(b + B * s)
    for a, A in spec.upper[: spec.n]:
        out += loggamma(1.0 - a - A * s)
    for a, A in spec.upper[spec.n :]:
        out -= loggamma(a + A * s)
    for b, B in spec.lower[spec.m :]:
        out -= loggamma(1.0 - b - B * s)
    return out


def _saddle_abscissa(spec, x, lb):
    """Abscissa for contours unbounded on the right (n = 0): follow the real
    saddle of phi(s) x^(-s), which keeps the integrand magnitude comparable
    to the result and avoids catastrophic cancellation for large x."""

    def slope(sigma):
        g = -math.log(x)
        for b, B in spec.lower[: spec.m]:
            g += B * digamma(b + B * sigma)
        for a, A in spec.upper[: spec.n]:
            g -= A * digamma(1.0 - a - A * sigma)
        for a, A in spec.upper[spec.n :]:
            g -= A * digamma(a + A * sigma)
        for b, B in spec.lower[spec.m :]:
            g += B * digamma(1.0 - b - B * sigma)
        return g

    lo = lb + 1e-6 if math.isfinite(lb) else -1e3
    try:
        if slope(lo) >= 0:
            return lo + 0.25
        hi = max(lo + 1.0, 1.0)
        for _ in range(80):
            if slope(hi) > 0:
                break
            hi = 2.0 * hi + 1.0
        else:
            return lo + 1.0
        return brentq(slope, lo, hi, xtol=1e-9, rtol=1e-12)
    except Exception:
        return (lb + 1.0) if math.isfinite(lb) else 0.5


def _choose_abscissa(spec, x):
    lb = spec.lower_pole_bound()
    ub = spec.upper_pole_bound()
    if math.isfinite(lb) and math.isfinite(ub):
        if lb >= ub:
            raise DegeneracyError(
                f"contour cannot separate pole families: left bound {lb:.6g} "
                f">= right bound {ub:.6g}"
            )
        return 0.5 * (lb + ub)
    if math.isfinite(lb):
        return _saddle_abscissa(spec, x, lb)
    if math.isfinite(ub):
        return ub - 1.0
    return _saddle_abscissa(spec, x, -math.inf)


def _quadrature(spec, x, c, half_height, panels, nodes):
    """One pass of panel-wise Gauss-Legendre on [0, half_height].

    Uses conjugate symmetry of the integrand for real parameters:
    (1/2pi) int_{-T}^{T} f(c+it) dt = (1/pi) int_0^T Re f(c+it) dt.
    """
    gx, gw = leggauss(nodes)
    edges = np.linspace(0.0, half_height, panels + 1)
    lo, hi = edges[:-1], edges[1:]
    halfw = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    t = (mid[:, None] + halfw[:, None] * gx[None, :]).ravel()
    w = (halfw[:, None] * gw[None, :]).ravel()
    s = c + 1j * t
    logf = _log_integrand(spec, s) - s * math.log(x)
    shift = float(np.max(logf.real))
    if not math.isfinite(shift):
        raise AccuracyError("integrand not finite on contour", (math.nan, math.nan))
    if shift < 600.0:
        shift = 0.0
    vals = np.exp(logf - shift)
    total = float(np.dot(vals.real, w)) / math.pi
    return total * math.exp(shift) if shift else total


def _initial_panels(spec, x, half_height):
    # phase budget: |ln x| from x^(-s) plus a log-gamma phase bounded by the
    # total scale mass; one GL-32 panel comfortably absorbs ~30 radians.
    scale_sum = sum(A for _, A in spec.upper) + sum(B for _, B in spec.lower)
    rate = abs(math.log(x)) + scale_sum * max(
        1.0, math.log1p(scale_sum * half_height)
    )
    return max(16, int(math.ceil(half_height * rate / 30.0)))


def _rest_at(spec, s0, skip_j):
    """phi(s0) with upper numerator factor ``skip_j`` removed; 0.0 when a
    denominator gamma sits at a pole, None when another numerator factor does
    (a genuine pole collision)."""
    acc = 0.0 + 0.0j
    for b, B in spec.lower[: spec.m]:
        arg = b + B * s0
        if _is_nonpositive_int(arg):
            return None
        acc += loggamma(complex(arg))
    for j, (a, A) in enumerate(spec.upper[: spec.n]):
        if j == skip_j:
            continue
        arg = 1.0 - a - A * s0
        if _is_nonpositive_int(arg):
            return None
        acc += loggamma(complex(arg))
    for a, A in spec.upper[spec.n :]:
        arg = a + A * s0
        if _is_nonpositive_int(arg):
            return 0.0
        acc -= loggamma(complex(arg))
    for b, B in spec.lower[spec.m :]:
        arg = 1.0 - b - B * s0
        if _is_nonpositive_int(arg):
            return 0.0
        acc -= loggamma(complex(arg))
    val = np.exp(acc)
    return float(val.real)


def _right_shift_plan(spec, x):
    """For large x with a non-empty right pole family, plan a contour shift
    past the first right-family poles.

    Crossing those poles in the analytic continuation turns the x^(-c)
    amplification of the plain separating contour (c < 0 for CDF-type
    integrands) into x^(-c') decay, which removes the cancellation that
    otherwise floors the achievable relative accuracy.  Returns
    (residue_sum, new_abscissa) or None when no beneficial simple crossing
    exists.
    """
    s_cap = min(40.0, 55.0 / math.log(x))
    poles = []
    for j, (a, A) in enumerate(spec.upper[: spec.n]):
        k = 0
        while True:
            s0 = (1.0 - a + k) / A
            if s0 > s_cap:
                break
            poles.append((s0, j, k))
            k += 1
    poles.sort(key=lambda t: t[0])
    if not poles:
        return None

    residue_sum = 0.0
    last = None
    crossed = 0
    for i, (s0, j, k) in enumerate(poles):
        if i + 1 < len(poles) and abs(poles[i + 1][0] - s0) <= _POLE_ATOL:
            break  # colliding right-family poles: stop crossing before them
        if last is not None and abs(s0 - last) <= _POLE_ATOL:
            break
        rest = _rest_at(spec, s0, j)
        if rest is None:
            break
        _, A = spec.upper[j]
        residue_sum += (-1.0) ** k / (math.factorial(k) * A) * rest * x ** (-s0)
        last = s0
        crossed = i + 1
    if crossed == 0:
        return None
    nxt = poles[crossed][0] if crossed < len(poles) else last + 1.0 / max(
        A for _, A in spec.upper[: spec.n]
    )
    return residue_sum, 0.5 * (last + nxt)


def fox_h(spec, x, cfg=None, rtol=1e-10, max_doublings=6):
    """Evaluate the Fox-H function of ``spec`` at real argument x > 0.

    The contour abscissa defaults to the midpoint of the admissible interval
    between the two pole families (saddle-following when the interval is
    unbounded).  The truncation height defaults to 50/delta, after which the
    integrand has decayed by ~exp(-25*pi).  Panels are doubled until two
    successive results agree to ``rtol`` relative; failure to converge after
    ``max_doublings`` doublings raises :class:`AccuracyError` carrying the
    last two iterates.
    """
    if x <= 0:
        raise ValueError(f"argument must be positive, got {x}")
    cfg = cfg or ContourConfig()
    base = 0.0
    if cfg.abscissa is not None:
        c = cfg.abscissa
        lb, ub = spec.lower_pole_bound(), spec.upper_pole_bound()
        if not (lb < c < ub):
            raise DegeneracyError(
                f"abscissa {c} does not separate pole families ({lb:.6g}, {ub:.6g})"
            )
    else:
        c = _choose_abscissa(spec, x)
        if spec.n > 0 and x ** (-c) > 1e3:
            # separating contour would amplify round-off by x^(-c); continue
            # analytically past the right pole family instead
            plan = _right_shift_plan(spec, x)
            if plan is not None:
                base, c = plan
    half_height = cfg.half_height if cfg.half_height is not None else 50.0 / spec.delta
    panels = cfg.panels if cfg.panels is not None else _initial_panels(spec, x, half_height)
    nodes = cfg.nodes_per_panel

    prev = base + _quadrature(spec, x, c, half_height, panels, nodes)
    last_two = (math.nan, prev)
    for _ in range(max_doublings):
        panels *= 2
        cur = base + _quadrature(spec, x, c, half_height, panels, nodes)
        if abs(cur - prev) <= rtol * max(abs(cur), abs(prev)) + 1e-300:
            return cur
        last_two = (prev, cur)
        prev = cur
    raise AccuracyError(
        f"contour quadrature did not converge to rtol={rtol:g} "
        f"after {max_doublings} panel doublings",
        last_two,
    )


def meijer_g(m, n, p, q, a, b, x, cfg=None, rtol=1e-10):
    """Meijer-G via the Fox-H evaluator with all scales set to one.

    ``a`` and ``b`` are the flat upper/lower parameter lists of lengths p, q.
    """
    a = tuple(float(v) for v in a)
    b = tuple(float(v) for v in b)
    if len(a) != p or len(b) != q:
        raise ValueError(f"parameter lists must have lengths p={p}, q={q}")
    spec = MellinBarnesSpec(
        m=m, n=n, upper=tuple((v, 1.0) for v in a), lower=tuple((v, 1.0) for v in b)
    )
    return fox_h(spec, x, cfg=cfg, rtol=rtol)


def _is_nonpositive_int(v, atol=1e-12):
    return v <= atol and abs(v - round(v)) <= atol


def _enumerate_poles(spec, terms):
    """Candidate left poles (k, l) sorted by ascending exponent (b_k + l)/B_k.

    Taking l up to ``terms`` per factor guarantees the first ``terms`` global
    exponents are present, since each l-step raises the exponent by 1/B_k.
    When the cutoff falls inside a group of coincident poles the whole group
    is kept: a partial group cannot be regularized by the perturbation rule.
    """
    cands = []
    for k in range(spec.m):
        b, B = spec.lower[k]
        for l in range(terms):
            cands.append(((b + l) / B, k, l))
    cands.sort(key=lambda t: t[0])
    cut = min(terms, len(cands))
    while cut < len(cands) and abs(cands[cut][0] - cands[cut - 1][0]) <= _POLE_ATOL * max(
        1.0, abs(cands[cut][0])
    ):
        cut += 1
    return cands[:cut]


def _residue_term_mp(spec, k, l, x):
    """One simple-pole residue at s0 = -(b_k + l)/B_k, in mpmath arithmetic.

    Returns None when a denominator gamma sits at a pole there (the term is
    an exact zero); raises DegeneracyError when a numerator gamma does (the
    pole is not simple).
    """
    b_k, B_k = spec.lower[k]
    s0 = -(mp.mpf(b_k) + l) / mp.mpf(B_k)
    val = mp.power(-1, l) / (mp.factorial(l) * mp.mpf(B_k))
    for j, (b, B) in enumerate(spec.lower[: spec.m]):
        if j == k:
            continue
        arg = mp.mpf(b) + mp.mpf(B) * s0
        if _is_nonpositive_int(float(arg)):
            raise DegeneracyError(
                f"coincident poles beyond perturbation tolerance: lower factor "
                f"{j} has gamma argument {float(arg):.3g} at pole ({k}, {l})"
            )
        val *= mp.gamma(arg)
    for a, A in spec.upper[: spec.n]:
        arg = 1 - mp.mpf(a) - mp.mpf(A) * s0
        if _is_nonpositive_int(float(arg)):
            raise DegeneracyError(
                f"coincident poles beyond perturbation tolerance: numerator "
                f"upper gamma argument {float(arg):.3g} at pole ({k}, {l})"
            )
        val *= mp.gamma(arg)
    for a, A in spec.upper[spec.n :]:
        arg = mp.mpf(a) + mp.mpf(A) * s0
        if _is_nonpositive_int(float(arg)):
            return None
        val /= mp.gamma(arg)
    for b, B in spec.lower[spec.m :]:
        arg = 1 - mp.mpf(b) - mp.mpf(B) * s0
        if _is_nonpositive_int(float(arg)):
            return None
        val /= mp.gamma(arg)
    return val * mp.power(mp.mpf(x), -s0)


def residue_series(spec, x, terms):
    """Small-argument expansion: sum of the first ``terms`` residues of the
    integrand at the left pole family, each of the form

        ((-1)^l / (l! B_k)) * [gamma products at s = -(b_k+l)/B_k] * x^((b_k+l)/B_k)

    Coincident poles are first separated by perturbing the colliding b
    parameters in +1e-6 steps (with a :class:`DegeneracyWarning`); the
    resulting near-cancelling cluster is summed in extended precision, so the
    1/eps blow-up of the individual residues never reaches the caller.  A
    growing term triggers a :class:`DivergenceWarning` and the partial sum
    accumulated so far is returned.
    """
    if x <= 0:
        raise ValueError(f"argument must be positive, got {x}")
    if terms <= 0:
        raise ValueError("terms must be positive")
    if spec.m == 0:
        raise ValueError("spec has no left pole family (m = 0)")

    selected = _enumerate_poles(spec, terms)

    # cluster (and, where needed, perturb) coincident pole positions
    clusters = []
    for e, k, l in selected:
        if clusters and abs(e - clusters[-1][-1][0]) <= _POLE_ATOL * max(1.0, abs(e)):
            clusters[-1].append((e, k, l))
        else:
            clusters.append([(e, k, l)])

    work = spec
    max_cluster = max(len(cl) for cl in clusters)
    if max_cluster > 1:
        warnings.warn(
            DegeneracyWarning(
                f"{max_cluster}-fold coincident poles separated by "
                f"+{_PERTURB:g} parameter perturbation"
            ),
            stacklevel=2,
        )
        lower = [list(t) for t in spec.lower]
        for cl in clusters:
            seen = {}
            for _, k, _ in cl:
                if k in seen:
                    continue
                seen[k] = len(seen)
            for k, rank in seen.items():
                if rank > 0:
                    lower[k][0] += rank * _PERTURB
        work = MellinBarnesSpec(
            m=spec.m, n=spec.n, upper=spec.upper, lower=tuple(tuple(t) for t in lower)
        )

    old_dps = mp.mp.dps
    mp.mp.dps = max(30, 20 + 10 * max_cluster)
    try:
        cluster_vals = []
        for cl in clusters:
            tot = mp.mpf(0)
            for _, k, l in cl:
                term = _residue_term_mp(work, k, l, x)
                if term is not None:
                    tot += term
            cluster_vals.append(float(tot))
    finally:
        mp.mp.dps = old_dps

    total = 0.0
    prev_mag = math.inf
    for i, v in enumerate(cluster_vals):
        mag = abs(v)
        if i >= 1 and mag > prev_mag and mag > 0:
            warnings.warn(
                DivergenceWarning(
                    f"residue terms increasing at cluster {i} "
                    f"(|term| {prev_mag:.3g} -> {mag:.3g}); returning partial sum",
                    total,
                ),
                stacklevel=2,
            )
            return total
        total += v
        if mag > 0:
            prev_mag = mag
    return total

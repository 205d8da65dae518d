"""Special-function kernel: ball volumes, Bessel J series, first zeros, radial profiles.

Everything here is driven by ascending power series.  Orders that occur in
practice are half-integers (nu = n/2 - 1 for integer dimension n), and for
those the series is summed in exact rational arithmetic: each term of

    J_nu(x) = (x/2)^nu * sum_k (-1)^k (x^2/4)^k / (k! Gamma(k + nu + 1))

is a dyadic rational (integer nu) or a dyadic rational times 1/sqrt(pi)
(half-odd nu), because the float x is itself a dyadic rational.  Summing in
``fractions.Fraction`` removes the catastrophic cancellation that kills a
float64 evaluation of the alternating series for x beyond roughly 15, so the
advertised accuracy holds on the whole supported range without an asymptotic
branch.  Non-half-integer orders fall back to a float series with a Lanczos
gamma; they are only reachable through explicit BesselOrder construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "BesselOrder",
    "unit_ball_volume",
    "bessel_j",
    "bessel_j_scaled",
    "bessel_j_derivative",
    "bessel_first_zero",
    "ball_eigen_profile",
    "gamma_half_integer",
]

_X_MAX = 50.0
_NU_MAX_ZERO = 10.0
_SERIES_CUTOFF = 1e-17
_SQRT_PI = math.sqrt(math.pi)

# Lanczos approximation, g = 7, 9 coefficients (Godfrey's published set).
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


@dataclass(frozen=True)
class BesselOrder:
    """Order nu >= 0 of a Bessel function of the first kind.

    In every use driven by a dimension n the order is nu = n/2 - 1, which is
    an integer or half-odd integer; those orders take the exact series path.
    """

    nu: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.nu) or self.nu < 0.0:
            raise ValueError(f"Bessel order must be finite and >= 0, got {self.nu}")

    @classmethod
    def from_dimension(cls, n: int) -> "BesselOrder":
        if n < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {n}")
        return cls(n / 2.0 - 1.0)

    @property
    def twice(self) -> float:
        return 2.0 * self.nu

    @property
    def is_half_integer(self) -> bool:
        two = 2.0 * self.nu
        return two == math.floor(two)


def _as_order(order: "BesselOrder | float") -> BesselOrder:
    if isinstance(order, BesselOrder):
        return order
    return BesselOrder(float(order))


def gamma_half_integer(twice_arg: int) -> float:
    """Gamma(twice_arg / 2) for integer twice_arg >= 1, exact up to rounding.

    Integer arguments reduce to a factorial, half-odd arguments to the
    double-factorial form Gamma(m + 1/2) = sqrt(pi) (2m)! / (4^m m!).
    """
    if twice_arg < 1:
        raise ValueError(f"argument must be >= 1/2, got {twice_arg}/2")
    if twice_arg % 2 == 0:
        return float(math.factorial(twice_arg // 2 - 1))
    m = (twice_arg - 1) // 2
    return _SQRT_PI * math.factorial(2 * m) / (4**m * math.factorial(m))


def _gamma_lanczos(z: float) -> float:
    """Gamma for real z > 0 via the fixed-coefficient Lanczos form."""
    if z < 0.5:
        # reflection keeps the shifted argument in the accurate range
        return math.pi / (math.sin(math.pi * z) * _gamma_lanczos(1.0 - z))
    z -= 1.0
    acc = _LANCZOS_C[0]
    for i, c in enumerate(_LANCZOS_C[1:], start=1):
        acc += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * acc


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in dimension n: pi^(n/2) / Gamma(n/2 + 1)."""
    if not isinstance(n, (int,)) or isinstance(n, bool):
        raise ValueError(f"dimension must be an integer, got {n!r}")
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    return math.pi ** (n / 2.0) / gamma_half_integer(n + 2)


def _series_half_integer(two_nu: int, x: float, scaled: bool) -> float:
    """Ascending series for J_nu (or x^-nu J_nu if scaled), 2*nu integral.

    The reduced sum S = sum_k (-1)^k X^k / (k! Gamma(k+nu+1)) with X = x^2/4
    is accumulated exactly in rationals; only the final prefactor multiply
    rounds.  Terms are generated by the recurrence
    t_k = -t_{k-1} * X / (k (k + nu)), truncated once past the magnitude peak
    and below 1e-17 of the partial sum.
    """
    X = Fraction(x) * Fraction(x) / 4
    nu = Fraction(two_nu, 2)
    if two_nu % 2 == 0:
        term = Fraction(1, math.factorial(two_nu // 2))
        unit = 1.0
    else:
        m = (two_nu - 1) // 2
        # 1/Gamma(nu + 1) = 4^(m+1) (m+1)! / (sqrt(pi) (2m+2)!)
        term = Fraction(4 ** (m + 1) * math.factorial(m + 1), math.factorial(2 * m + 2))
        unit = 1.0 / _SQRT_PI
    total = term
    k = 0
    x_float = float(X)
    while True:
        k += 1
        if k > 500:
            raise RuntimeError(f"Bessel series failed to terminate (nu={float(nu)}, x={x})")
        term = -term * X / (k * (k + nu))
        total += term
        past_peak = (k + 1) * (k + 1 + float(nu)) > x_float
        tf, sf = abs(float(term)), abs(float(total))
        if past_peak and (tf == 0.0 or tf < _SERIES_CUTOFF * sf or tf < 1e-300):
            break
    s = float(total) * unit
    if scaled:
        return s * 0.5**float(nu)
    return s * (x / 2.0) ** float(nu)


def _series_float(nu: float, x: float, scaled: bool) -> float:
    """Float fallback for non-half-integer orders (accuracy degrades past ~15)."""
    X = x * x / 4.0
    terms = [1.0 / _gamma_lanczos(nu + 1.0)]
    k = 0
    while True:
        k += 1
        if k > 500:
            raise RuntimeError(f"Bessel series failed to terminate (nu={nu}, x={x})")
        terms.append(-terms[-1] * X / (k * (k + nu)))
        partial = math.fsum(terms)
        past_peak = (k + 1) * (k + 1 + nu) > X
        if past_peak and abs(terms[-1]) < _SERIES_CUTOFF * max(abs(partial), 1e-300):
            break
    s = math.fsum(terms)
    if scaled:
        return s * 0.5**nu
    return s * (x / 2.0) ** nu if x > 0.0 else (s if nu == 0.0 else 0.0)


def bessel_j(order: "BesselOrder | float", x: float) -> float:
    """J_nu(x) by ascending series, relative error <= 1e-12 for 0 <= x <= 50."""
    o = _as_order(order)
    if not (0.0 <= x <= _X_MAX):
        raise ValueError(f"argument out of range [0, {_X_MAX}]: {x}")
    if x == 0.0:
        return 1.0 if o.nu == 0.0 else 0.0
    if o.is_half_integer:
        return _series_half_integer(int(round(o.twice)), x, scaled=False)
    return _series_float(o.nu, x, scaled=False)


def bessel_j_scaled(order: "BesselOrder | float", x: float) -> float:
    """x^(-nu) J_nu(x), analytic at x = 0 with value 1 / (2^nu Gamma(nu+1))."""
    o = _as_order(order)
    if not (0.0 <= x <= _X_MAX):
        raise ValueError(f"argument out of range [0, {_X_MAX}]: {x}")
    if o.is_half_integer:
        return _series_half_integer(int(round(o.twice)), x, scaled=True)
    return _series_float(o.nu, x, scaled=True)


def bessel_j_derivative(order: "BesselOrder | float", x: float) -> float:
    """d/dx J_nu(x) via J_nu'(x) = (nu/x) J_nu(x) - J_(nu+1)(x), x > 0."""
    o = _as_order(order)
    if x <= 0.0:
        raise ValueError("derivative recurrence needs x > 0")
    return (o.nu / x) * bessel_j(o, x) - bessel_j(BesselOrder(o.nu + 1.0), x)


@lru_cache(maxsize=None)
def _first_zero_cached(nu: float) -> float:
    o = BesselOrder(nu)
    # Upward scan: J_nu > 0 on (0, j_{nu,1}) and j_{nu,1} > nu, so a step of
    # 0.1 from max(nu, 0.1) cannot skip the first zero.
    x = max(nu, 0.1)
    step = 0.1
    lo = x
    while bessel_j(o, x) > 0.0:
        lo = x
        x += step
        if x > _X_MAX:
            raise RuntimeError(f"no sign change located before x = {_X_MAX} (nu={nu})")
    hi = x
    flo = bessel_j(o, lo)
    for _ in range(30):
        mid = 0.5 * (lo + hi)
        fm = bessel_j(o, mid)
        if flo * fm <= 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    root = 0.5 * (lo + hi)
    for _ in range(6):
        f = bessel_j(o, root)
        df = bessel_j_derivative(o, root)
        delta = f / df
        root -= delta
        if abs(delta) < 1e-15 * root:
            break
    return root


def bessel_first_zero(order: "BesselOrder | float") -> float:
    """Smallest x > 0 with J_nu(x) = 0, absolute error <= 1e-11, for 0 <= nu <= 10.

    Bracketed by an upward scan in steps of 0.1, tightened by bisection and
    polished by Newton steps using the order-recurrence derivative.
    """
    o = _as_order(order)
    if o.nu > _NU_MAX_ZERO:
        raise ValueError(f"order out of supported range [0, {_NU_MAX_ZERO}]: {o.nu}")
    return _first_zero_cached(o.nu)


def ball_eigen_profile(n: int, lam: float, r: float) -> float:
    """Radial first-eigenfunction profile r^(1-n/2) J_(n/2-1)(sqrt(lam) r).

    Evaluated through the series of x^(-nu) J_nu(x), so the value at r = 0 is
    the finite limit lam^(nu/2) / (2^nu Gamma(nu+1)).  Defined up to the first
    zero of the Bessel factor, i.e. r <= j_(n/2-1,1) / sqrt(lam).
    """
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    if lam <= 0.0:
        raise ValueError(f"eigenvalue must be positive, got {lam}")
    order = BesselOrder.from_dimension(n)
    r_max = bessel_first_zero(order) / math.sqrt(lam)
    if r < 0.0 or r > r_max * (1.0 + 1e-12):
        raise ValueError(f"radius {r} outside [0, {r_max}] (first zero of the profile)")
    x = math.sqrt(lam) * min(r, r_max)
    return lam ** (order.nu / 2.0) * bessel_j_scaled(order, x)

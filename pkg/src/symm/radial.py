"""Closed-form and quadrature solutions on balls: Talenti profiles, moments, Chiti.

The rearranged Poisson solution is characterized by

    v*(s) = gamma_n^-2 * int_s^|O| xi^(-2 + 2/n) F(xi) dxi,
    F(xi) = int_0^xi f*(eta) deta,
    gamma_n = n (AVR omega_n)^(1/n),

with the volume coordinate s = AVR |B(r)| linking v* to the radial solution
v(r) on the comparison ball.  For step or linear source profiles F is a
piecewise polynomial of degree <= 2, so the outer integral has an elementary
antiderivative on every piece (a logarithm appears for n = 2); v* is
evaluated exactly at the output nodes instead of by composite quadrature.
The moment hierarchy on the ball stays inside the function class
span{ s^(2j/n) }, which this module propagates exactly between iterations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from symm.rearrange import DecreasingProfile
from symm.specialfn import (
    BesselOrder,
    ball_eigen_profile,
    bessel_first_zero,
    unit_ball_volume,
)

__all__ = [
    "SymmetrizationContext",
    "talenti_profile",
    "ball_radial_solution",
    "moment_sequence_ball",
    "faber_krahn_bound",
    "second_eig_bound",
    "b_lambda_radius",
    "chiti_constant",
    "saint_venant_normalized",
]

PROFILE_NODES = 4096
_GL15_NODES, _GL15_WEIGHTS = np.polynomial.legendre.leggauss(15)


@dataclass(frozen=True)
class SymmetrizationContext:
    """Dimension, volume ratio and total measure of the domain being compared.

    ``omega_total`` is the g-measure |Omega|; the comparison ball has
    Euclidean volume |Omega| / avr and radius ``sharp_radius``.
    """

    n: int
    avr: float
    omega_total: float

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {self.n}")
        if not (0.0 < self.avr <= 1.0):
            raise ValueError(f"asymptotic volume ratio must lie in (0, 1], got {self.avr}")
        if not (self.omega_total > 0.0 and math.isfinite(self.omega_total)):
            raise ValueError(f"domain measure must be positive, got {self.omega_total}")

    @property
    def omega_n(self) -> float:
        return unit_ball_volume(self.n)

    @property
    def gamma_n(self) -> float:
        return self.n * (self.avr * self.omega_n) ** (1.0 / self.n)

    @property
    def sharp_radius(self) -> float:
        return (self.omega_total / (self.avr * self.omega_n)) ** (1.0 / self.n)


def _power_antiderivative(beta: float, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """int_lo^hi xi^beta dxi elementwise; beta = -1 takes the log branch."""
    if abs(beta + 1.0) < 1e-13:
        return np.log(hi / lo)
    return (hi ** (beta + 1.0) - lo ** (beta + 1.0)) / (beta + 1.0)


def _source_piecewise(f_star: DecreasingProfile):
    """Per-piece global polynomial coefficients (c0, c1, c2) of F = int_0^xi f*."""
    knots = f_star.breakpoints
    widths = np.diff(knots)
    if f_star.interpolation == "step":
        vals = f_star.values
        piece_int = vals * widths
        F_knots = np.concatenate([[0.0], np.cumsum(piece_int)])
        c1 = vals.copy()
        c2 = np.zeros_like(vals)
        c0 = F_knots[:-1] - c1 * knots[:-1]
    else:
        v0, v1 = f_star.values[:-1], f_star.values[1:]
        slope = (v1 - v0) / widths
        piece_int = 0.5 * (v0 + v1) * widths
        F_knots = np.concatenate([[0.0], np.cumsum(piece_int)])
        # F on the piece: F_i + v0 (xi - k) + slope (xi - k)^2 / 2, expanded
        k = knots[:-1]
        c2 = 0.5 * slope
        c1 = v0 - slope * k
        c0 = F_knots[:-1] - v0 * k + 0.5 * slope * k * k
    c0[0] = 0.0  # F(0) = 0 exactly: no singular term on the first piece
    return knots, c0, c1, c2


def talenti_profile(
    f_star: DecreasingProfile,
    ctx: SymmetrizationContext,
    nodes: int = PROFILE_NODES,
    extra_nodes=None,
) -> DecreasingProfile:
    """Rearranged solution profile v* for the source profile f* on [0, |Omega|].

    F is integrated exactly from the piecewise source and the outer
    xi^(-2+2/n) moment is accumulated through elementary antiderivatives on
    every subinterval, so each returned node value carries only rounding
    error (well inside the 1e-10 * v*(0) budget).  The result is a linear
    profile on the union of the source breakpoints, a uniform grid, and any
    ``extra_nodes`` the caller wants evaluated exactly.
    """
    if np.any(f_star.values < 0.0):
        raise ValueError("source profile must be nonnegative")
    L = ctx.omega_total
    if not math.isclose(f_star.total, L, rel_tol=1e-9):
        raise ValueError(f"source profile lives on [0, {f_star.total}], context expects [0, {L}]")
    alpha = -2.0 + 2.0 / ctx.n
    knots, c0, c1, c2 = _source_piecewise(f_star)

    grid = np.union1d(knots, np.linspace(0.0, L, nodes + 1))
    if extra_nodes is not None:
        grid = np.union1d(grid, np.asarray(extra_nodes, dtype=float))
    grid = grid[(grid >= 0.0) & (grid <= L)]
    keep = np.concatenate([[True], np.diff(grid) > 1e-15 * L])
    grid = grid[keep]
    grid[-1] = L

    piece = np.clip(np.searchsorted(knots, grid[:-1], side="right") - 1, 0, len(c0) - 1)
    lo, hi = grid[:-1], grid[1:]
    a0, a1, a2 = c0[piece], c1[piece], c2[piece]
    seg = a1 * _power_antiderivative(alpha + 1.0, lo, hi) + a2 * _power_antiderivative(alpha + 2.0, lo, hi)
    nz = a0 != 0.0
    if np.any(nz):
        # first interval always has a0 == 0, so lo > 0 wherever this runs
        seg[nz] += a0[nz] * _power_antiderivative(alpha, lo[nz], hi[nz])
    tail = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
    v = tail / ctx.gamma_n**2
    v = np.minimum.accumulate(v)  # clear rounding-level upticks
    return DecreasingProfile(grid, v, "linear")


def ball_radial_solution(v_star: DecreasingProfile, ctx: SymmetrizationContext, r: float) -> float:
    """Radial value v(r) = v*(avr omega_n r^n) on the comparison ball."""
    R = ctx.sharp_radius
    if r < 0.0 or r > R * (1.0 + 1e-12):
        raise ValueError(f"radius {r} outside [0, {R}]")
    s = ctx.avr * ctx.omega_n * min(r, R) ** ctx.n
    return float(v_star.evaluate(min(s, v_star.total)))


def _power_sum_profile(coeffs: dict[int, float], n: int, L: float, nodes: int) -> DecreasingProfile:
    s = np.linspace(0.0, L, nodes + 1)
    vals = np.zeros_like(s)
    for j, c in sorted(coeffs.items()):
        vals += c * s ** (2.0 * j / n) if j else c
    vals[-1] = 0.0 if abs(vals[-1]) < 1e-12 * max(abs(vals[0]), 1e-300) else vals[-1]
    vals = np.minimum.accumulate(np.maximum(vals, 0.0))
    return DecreasingProfile(s, vals, "linear")


def moment_sequence_ball(
    ctx: SymmetrizationContext,
    k_max: int,
    nodes: int = PROFILE_NODES,
) -> list[tuple[DecreasingProfile, float, float]]:
    """Hierarchy v_0* = 1, -Delta v_k = k v_{k-1} on the comparison ball.

    Returns rows (v_k*, T_k, J_k) for k = 0..k_max, where
    T_k = int_{ball} v_k = (1/avr) int_0^|O| v_k*(s) ds and J_k = v_k*(0).
    Every v_k* lies in span{s^(2j/n) : j <= k}; the coefficients are
    propagated exactly, so T_k and J_k carry only rounding error.
    """
    if k_max < 0 or k_max > 10:
        raise ValueError(f"k_max must be between 0 and 10, got {k_max}")
    n, L = ctx.n, ctx.omega_total
    inv_g2 = 1.0 / ctx.gamma_n**2
    alpha = -2.0 + 2.0 / n

    coeffs: dict[int, float] = {0: 1.0}
    rows = [(_power_sum_profile(coeffs, n, L, nodes), L / ctx.avr, 1.0)]
    for k in range(1, k_max + 1):
        # F(xi) = k int_0^xi v_{k-1}: exponent 2j/n -> 2j/n + 1
        new: dict[int, float] = {}
        const = 0.0
        for j, c in coeffs.items():
            e = 2.0 * j / n
            fc = k * c / (e + 1.0)
            # tail integral of fc * xi^(e + 1 + alpha) from s to L
            power = e + 2.0 / n  # (e + 1 + alpha) + 1
            const += fc * L**power / power
            new[j + 1] = new.get(j + 1, 0.0) - fc / power
        new[0] = new.get(0, 0.0) + const
        coeffs = {j: c * inv_g2 for j, c in new.items()}
        T = sum(c * L ** (2.0 * j / n + 1.0) / (2.0 * j / n + 1.0) for j, c in coeffs.items())
        rows.append((_power_sum_profile(coeffs, n, L, nodes), T / ctx.avr, coeffs[0]))
    return rows


def faber_krahn_bound(ctx: SymmetrizationContext) -> float:
    """First-eigenvalue lower bound j_{n/2-1,1}^2 (omega_n avr / |Omega|)^(2/n)."""
    j = bessel_first_zero(BesselOrder.from_dimension(ctx.n))
    return j * j * (ctx.omega_n * ctx.avr / ctx.omega_total) ** (2.0 / ctx.n)


def second_eig_bound(ctx: SymmetrizationContext) -> float:
    """Second-eigenvalue lower bound, exactly 2^(2/n) times the first-eigenvalue one."""
    return 2.0 ** (2.0 / ctx.n) * faber_krahn_bound(ctx)


def b_lambda_radius(n: int, lam: float) -> float:
    """Radius of the Euclidean ball whose first Dirichlet eigenvalue is lam."""
    if lam <= 0.0:
        raise ValueError(f"eigenvalue must be positive, got {lam}")
    return bessel_first_zero(BesselOrder.from_dimension(n)) / math.sqrt(lam)


def _adaptive_gl(fn, lo: float, hi: float, tol: float, depth: int = 0) -> float:
    mid = 0.5 * (lo + hi)

    def gl(a, b):
        m, h = 0.5 * (a + b), 0.5 * (b - a)
        xs = m + h * _GL15_NODES
        return h * float(np.dot(_GL15_WEIGHTS, [fn(float(x)) for x in xs]))

    whole = gl(lo, hi)
    split = gl(lo, mid) + gl(mid, hi)
    if abs(split - whole) <= tol or depth >= 40:
        return split
    return _adaptive_gl(fn, lo, mid, tol / 2.0, depth + 1) + _adaptive_gl(fn, mid, hi, tol / 2.0, depth + 1)


def _eigen_moment(n: int, p: float) -> float:
    """int_0^1 r^(n-1) phi(r)^p dr for the first radial eigenprofile phi."""
    j = bessel_first_zero(BesselOrder.from_dimension(n))
    lam = j * j

    def integrand(r: float) -> float:
        return r ** (n - 1) * ball_eigen_profile(n, lam, r) ** p

    rough = _adaptive_gl(integrand, 0.0, 1.0, tol=1e-4)
    return _adaptive_gl(integrand, 0.0, 1.0, tol=1e-10 * abs(rough))


def chiti_constant(p: float, q: float, lam: float, n: int, avr: float) -> float:
    """Sharp reverse-Hoelder constant for Dirichlet eigenfunctions.

    K = (n omega_n avr (j lam^-1/2)^n)^(1/q - 1/p)
        * (int_0^1 r^(n-1) phi^q dr)^(1/q) / (int_0^1 r^(n-1) phi^p dr)^(1/p)

    with phi(r) = r^(1-n/2) J_{n/2-1}(j r); the integrands are written through
    the analytic profile phi, never the raw fractional-power Bessel product.
    The ratio ||u||_q / ||u||_p of any eigenfunction with eigenvalue lam is
    bounded by K, with equality exactly on the matching ball.
    """
    if not (0.0 < p <= q):
        raise ValueError(f"need 0 < p <= q, got p={p}, q={q}")
    if lam <= 0.0:
        raise ValueError(f"eigenvalue must be positive, got {lam}")
    if not (0.0 < avr <= 1.0):
        raise ValueError(f"asymptotic volume ratio must lie in (0, 1], got {avr}")
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    j = bessel_first_zero(BesselOrder.from_dimension(n))
    prefactor = (n * unit_ball_volume(n) * avr * (j / math.sqrt(lam)) ** n) ** (1.0 / q - 1.0 / p)
    if p == q:
        return prefactor  # the integral ratio is exactly 1
    iq = _eigen_moment(n, q)
    ip = _eigen_moment(n, p)
    return prefactor * iq ** (1.0 / q) / ip ** (1.0 / p)


def saint_venant_normalized(T: float, volume: float, n: int, avr: float) -> float:
    """Scale-invariant torsion functional (avr omega_n)^(2/n) T |Omega|^(-(n+2)/n).

    Bounded by 1/(n(n+2)) with equality on balls; the caller compares.
    """
    if T < 0.0:
        raise ValueError(f"torsional rigidity must be >= 0, got {T}")
    if volume <= 0.0:
        raise ValueError(f"volume must be positive, got {volume}")
    return (avr * unit_ball_volume(n)) ** (2.0 / n) * T * volume ** (-(n + 2.0) / n)

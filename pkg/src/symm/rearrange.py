"""Measure-theoretic core: distribution functions, rearrangements, L^p norms.

A measurable function is carried as a :class:`WeightedSample`, a flat list of
(value, measure) cells.  Its decreasing rearrangement is a right-continuous
step profile on [0, total_measure]; radially symmetric solutions produced by
quadrature use the same :class:`DecreasingProfile` container in ``linear``
mode, where the stored values are node values at the breakpoints.

Inputs are required to be nonnegative.  Sign handling is explicit at call
sites: build samples from signed data through
:meth:`WeightedSample.from_absolute` rather than relying on a silent |h|.
"""

from __future__ import annotations

import math
from typing import IO, Iterable

import numpy as np

from symm.specialfn import unit_ball_volume

__all__ = [
    "WeightedSample",
    "DecreasingProfile",
    "distribution",
    "decreasing_rearrangement",
    "schwarz_radius_map",
    "lp_norm",
    "hardy_littlewood_gap",
    "hlp_dominance",
]

_GL8_NODES, _GL8_WEIGHTS = np.polynomial.legendre.leggauss(8)
_COMPARISON_GRID = 10_000


class WeightedSample:
    """A nonnegative measurable function as cells of (value, measure > 0)."""

    __slots__ = ("values", "measures", "total_measure")

    def __init__(self, values: Iterable[float], measures: Iterable[float]):
        v = np.asarray(values, dtype=float)
        m = np.asarray(measures, dtype=float)
        if v.ndim != 1 or v.shape != m.shape or v.size == 0:
            raise ValueError("values and measures must be matching nonempty 1-D arrays")
        if not np.all(np.isfinite(v)):
            raise ValueError("sample values must be finite")
        if np.any(v < 0.0):
            raise ValueError("sample values must be nonnegative; use from_absolute for signed data")
        if not np.all(m > 0.0) or not np.all(np.isfinite(m)):
            raise ValueError("cell measures must be finite and positive")
        self.values = v.copy()
        self.measures = m.copy()
        # fsum keeps the cached total independent of cell order
        self.total_measure = math.fsum(m.tolist())

    @classmethod
    def from_absolute(cls, values: Iterable[float], measures: Iterable[float]) -> "WeightedSample":
        """Explicit |h| preprocessing for signed data (eigenfunctions etc.)."""
        return cls(np.abs(np.asarray(values, dtype=float)), measures)

    @property
    def cells(self) -> list[tuple[float, float]]:
        return list(zip(self.values.tolist(), self.measures.tolist()))

    def __len__(self) -> int:
        return int(self.values.size)

    def lp_norm(self, p: float) -> float:
        """Direct L^p norm of the sample, (sum v^p m)^(1/p)."""
        if p <= 0.0:
            raise ValueError(f"p must be positive, got {p}")
        return float(np.sum(self.values**p * self.measures)) ** (1.0 / p)


class DecreasingProfile:
    """Nonincreasing function on [0, total]: step (right-continuous) or linear.

    ``step`` mode stores one value per interval [s_{i-1}, s_i); ``linear``
    mode stores one node value per breakpoint and interpolates.  The value at
    the right endpoint ``total`` is the last stored value in both modes.
    """

    __slots__ = ("breakpoints", "values", "interpolation")

    def __init__(self, breakpoints, values, interpolation: str = "step"):
        bp = np.asarray(breakpoints, dtype=float)
        vv = np.asarray(values, dtype=float)
        if interpolation not in ("step", "linear"):
            raise ValueError(f"interpolation must be 'step' or 'linear', got {interpolation!r}")
        if bp.ndim != 1 or bp.size < 2 or bp[0] != 0.0:
            raise ValueError("breakpoints must start at 0 and contain at least two entries")
        if np.any(np.diff(bp) <= 0.0):
            raise ValueError("breakpoints must be strictly increasing")
        expected = bp.size - 1 if interpolation == "step" else bp.size
        if vv.shape != (expected,):
            raise ValueError(f"expected {expected} values for {interpolation} mode, got {vv.size}")
        scale = abs(vv[0]) if vv.size else 1.0
        if np.any(np.diff(vv) > 1e-12 * max(scale, 1.0)):
            raise ValueError("profile values must be nonincreasing")
        if np.any(vv < -1e-12 * max(scale, 1.0)):
            raise ValueError("profile values must be nonnegative")
        self.breakpoints = bp
        self.values = np.maximum(vv, 0.0)
        self.interpolation = interpolation

    @property
    def total(self) -> float:
        return float(self.breakpoints[-1])

    def __call__(self, s):
        return self.evaluate(s)

    def evaluate(self, s):
        """Evaluate at scalar or array s in [0, total] (tiny overshoot clamped)."""
        arr = np.asarray(s, dtype=float)
        tol = 1e-9 * max(self.total, 1.0)
        if np.any(arr < -tol) or np.any(arr > self.total + tol):
            raise ValueError("evaluation point outside [0, total]")
        clipped = np.clip(arr, 0.0, self.total)
        if self.interpolation == "linear":
            out = np.interp(clipped, self.breakpoints, self.values)
        else:
            idx = np.searchsorted(self.breakpoints, clipped, side="right") - 1
            idx = np.clip(idx, 0, self.values.size - 1)
            out = self.values[idx]
        return float(out) if np.isscalar(s) else out

    def power_integral(self, p: float) -> float:
        """Integral of profile(s)^p over [0, total]; exact in step mode."""
        if p <= 0.0:
            raise ValueError(f"p must be positive, got {p}")
        widths = np.diff(self.breakpoints)
        if self.interpolation == "step":
            return float(np.sum(self.values**p * widths))
        # linear pieces: 8-point Gauss-Legendre per piece (exact for the
        # integer p used in practice, ~1e-15 for fractional p on smooth data)
        a, b = self.breakpoints[:-1], self.breakpoints[1:]
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        nodes = mid[:, None] + half[:, None] * _GL8_NODES[None, :]
        vals = np.interp(nodes, self.breakpoints, self.values)
        return float(np.sum(half[:, None] * _GL8_WEIGHTS[None, :] * vals**p))

    def cumulative_power(self, p: float, s_points) -> np.ndarray:
        """Integral of profile^p from 0 to each of s_points (nondecreasing)."""
        if p <= 0.0:
            raise ValueError(f"p must be positive, got {p}")
        pts = np.clip(np.asarray(s_points, dtype=float), 0.0, self.total)
        widths = np.diff(self.breakpoints)
        if self.interpolation == "step":
            piece = self.values**p * widths
        else:
            a, b = self.breakpoints[:-1], self.breakpoints[1:]
            mid, half = 0.5 * (a + b), 0.5 * (b - a)
            nodes = mid[:, None] + half[:, None] * _GL8_NODES[None, :]
            vals = np.interp(nodes, self.breakpoints, self.values)
            piece = np.sum(half[:, None] * _GL8_WEIGHTS[None, :] * vals**p, axis=1)
        cum = np.concatenate([[0.0], np.cumsum(piece)])
        # cumulative of a piecewise-constant integrand is piecewise linear in s
        return np.interp(pts, self.breakpoints, cum)

    def distribution(self, t: float) -> float:
        """Measure of the superlevel set {profile > t}."""
        if self.interpolation == "step":
            mask = self.values > t
            return float(np.sum(np.diff(self.breakpoints)[mask]))
        v = self.values
        if t >= v[0]:
            return 0.0
        if t < v[-1]:
            return self.total
        # values nonincreasing: locate the crossing by interpolating on (-v, bp)
        return float(np.interp(-t, -v, self.breakpoints))

    def to_csv(self, path_or_file: "str | IO[str]") -> None:
        """Two-column CSV (s, value) in breakpoint order, header ``s,value``."""
        rows = ["s,value"]
        if self.interpolation == "step":
            for i in range(self.values.size):
                rows.append(f"{float(self.breakpoints[i])!r},{float(self.values[i])!r}")
            rows.append(f"{float(self.breakpoints[-1])!r},{float(self.values[-1])!r}")
        else:
            for s, v in zip(self.breakpoints, self.values):
                rows.append(f"{float(s)!r},{float(v)!r}")
        text = "\n".join(rows) + "\n"
        if isinstance(path_or_file, str):
            with open(path_or_file, "w") as fh:
                fh.write(text)
        else:
            path_or_file.write(text)


def distribution(h: WeightedSample, t: float) -> float:
    """Distribution function mu_h(t): total measure of cells with value > t."""
    if t < 0.0:
        raise ValueError(f"threshold must be >= 0, got {t}")
    return float(np.sum(h.measures[h.values > t]))


def decreasing_rearrangement(h: WeightedSample) -> DecreasingProfile:
    """Sort cells by value descending and accumulate measures into a step profile.

    Cells with exactly equal values are merged into one step, with the merged
    measure accumulated by fsum so that permuting tied cells leaves the
    profile bit-identical.
    """
    order = np.argsort(-h.values, kind="stable")
    v = h.values[order]
    m = h.measures[order]
    # group runs of equal values
    boundaries = np.flatnonzero(np.diff(v)) + 1
    starts = np.concatenate([[0], boundaries])
    ends = np.concatenate([boundaries, [v.size]])
    step_values = v[starts]
    step_measures = np.array(
        [m[a] if b - a == 1 else math.fsum(m[a:b].tolist()) for a, b in zip(starts, ends)]
    )
    bp = np.concatenate([[0.0], np.cumsum(step_measures)])
    bp[-1] = h.total_measure  # pin the endpoint to the canonical fsum total
    return DecreasingProfile(bp, step_values, "step")


def schwarz_radius_map(s: float, avr: float, n: int) -> float:
    """Radius r with avr * omega_n * r^n = s (the profile-to-ball change of variable)."""
    if s < 0.0:
        raise ValueError(f"measure coordinate must be >= 0, got {s}")
    if not (0.0 < avr <= 1.0):
        raise ValueError(f"asymptotic volume ratio must lie in (0, 1], got {avr}")
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    return (s / (avr * unit_ball_volume(n))) ** (1.0 / n)


def lp_norm(p: float, profile: DecreasingProfile) -> float:
    """(integral of profile^p)^(1/p); exact cell sums for step profiles."""
    return profile.power_integral(p) ** (1.0 / p)


def _require_aligned(h: WeightedSample, w: WeightedSample) -> None:
    if len(h) != len(w) or not np.allclose(h.measures, w.measures, rtol=1e-12, atol=0.0):
        raise ValueError("samples must share one cell list (pairwise aligned measures)")


def hardy_littlewood_gap(h: WeightedSample, w: WeightedSample) -> float:
    """Rearranged product integral minus the direct one; >= 0 up to rounding.

    Computes int_0^|O| h*(s) w*(s) ds - int h w dmu on a common breakpoint
    grid (both factors are constant on every merged interval, so the first
    integral is exact).
    """
    _require_aligned(h, w)
    direct = float(np.sum(h.values * w.values * h.measures))
    hs = decreasing_rearrangement(h)
    ws = decreasing_rearrangement(w)
    grid = np.union1d(hs.breakpoints, ws.breakpoints)
    a, b = grid[:-1], grid[1:]
    mid = 0.5 * (a + b)
    rearranged = float(np.sum(hs.evaluate(mid) * ws.evaluate(mid) * (b - a)))
    return rearranged - direct


def hlp_dominance(
    f: DecreasingProfile,
    g: DecreasingProfile,
    p: float,
    q: float,
) -> tuple[bool, float]:
    """Check the cumulative-p-power premise and report the q-power conclusion gap.

    premise_holds is True iff int_0^s f^p <= int_0^s g^p + 1e-12 at every
    probe point (union of breakpoints plus a uniform grid); the returned gap
    is int_0^R g^q - int_0^R f^q, which the dominance lemma makes nonnegative
    whenever the premise holds and q >= p.
    """
    if not (0.0 < p <= q):
        raise ValueError(f"need 0 < p <= q, got p={p}, q={q}")
    if not math.isclose(f.total, g.total, rel_tol=1e-12):
        raise ValueError(f"profiles live on different intervals: {f.total} vs {g.total}")
    probes = np.union1d(
        np.union1d(f.breakpoints, g.breakpoints),
        np.linspace(0.0, min(f.total, g.total), _COMPARISON_GRID + 1),
    )
    probes = np.clip(probes, 0.0, min(f.total, g.total))
    premise = bool(np.all(f.cumulative_power(p, probes) <= g.cumulative_power(p, probes) + 1e-12))
    gap = g.power_integral(q) - f.power_integral(q)
    return premise, gap

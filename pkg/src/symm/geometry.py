"""Discretized test geometries: Euclidean grids, polar domains, flat cones.

All meshes are cell-centered finite-volume discretizations in two spatial
dimensions.  Cell measures are exact metric areas, the Laplacian is assembled
in conservative flux form (symmetric positive definite after eliminating
Dirichlet faces), and boundary lengths are analytic where the shape allows,
never estimated from staircase cell counts.

Flat cones are parametrized with theta-period 2 pi and metric
g = dr^2 + (alpha r)^2 dtheta^2, so the asymptotic volume ratio equals the
angle ratio alpha; alpha = 1 recovers the Euclidean plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp

from symm.radial import SymmetrizationContext
from symm.specialfn import unit_ball_volume

__all__ = ["DomainSpec", "Mesh", "build_mesh", "isoperimetric_slack"]

_TWO_PI = 2.0 * math.pi
_KINDS = ("euclid_mask", "euclid_polar", "cone_polar", "cone_radial")
_SHAPES = ("rect", "ellipse", "lshape")


@dataclass(frozen=True)
class DomainSpec:
    """Parameters of a test geometry; resolution counts cells per axis."""

    kind: str
    resolution: int = 32
    # euclid_mask
    shape: str = "rect"
    width: float = 1.0
    height: float = 1.0
    center_offset: tuple[float, float] | None = None
    # polar / radial kinds
    r_min: float = 0.0
    r_max: float = 1.0
    theta_span: float | None = None  # None: full circle (periodic)
    alpha: float = 1.0

    def with_resolution(self, resolution: int) -> "DomainSpec":
        return replace(self, resolution=resolution)

    def validate(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown domain kind {self.kind!r}; expected one of {_KINDS}")
        if self.resolution < 8:
            raise ValueError(f"resolution must be >= 8 cells per axis, got {self.resolution}")
        if self.kind == "euclid_mask":
            if self.shape not in _SHAPES:
                raise ValueError(f"unknown mask shape {self.shape!r}; expected one of {_SHAPES}")
            if self.width <= 0.0 or self.height <= 0.0:
                raise ValueError("mask rectangle extents must be positive")
            return
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"cone angle ratio must lie in (0, 1], got {self.alpha}")
        if self.kind == "euclid_polar" and self.alpha != 1.0:
            raise ValueError("euclid_polar is the alpha = 1 case; use cone_polar for alpha < 1")
        if self.r_min < 0.0 or self.r_max <= self.r_min:
            raise ValueError(f"need 0 <= r_min < r_max, got [{self.r_min}, {self.r_max}]")
        if self.kind == "cone_polar" and self.r_min == 0.0:
            raise ValueError(
                "cone_polar cannot contain the apex r = 0 (singular point); use cone_radial"
            )
        if self.theta_span is not None and not (0.0 < self.theta_span <= _TWO_PI):
            raise ValueError(f"theta span must lie in (0, 2 pi], got {self.theta_span}")


@dataclass
class Mesh:
    """Discretized domain: measures, flux-form stiffness, analytic boundary data.

    ``stiffness`` acts on interior cell values (Dirichlet rows eliminated);
    ``boundary_weights[i]`` is the total flux coefficient from cell i to
    eliminated boundary faces, so stiffness @ ones == boundary_weights holds
    exactly (discrete divergence form).
    """

    spec: DomainSpec
    n: int
    avr: float
    volume: float
    cell_measures: np.ndarray
    stiffness: sp.csr_matrix
    boundary_weights: np.ndarray
    boundary_length: float | None
    coords: tuple[np.ndarray, ...]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def kind(self) -> str:
        return self.spec.kind

    @property
    def cells(self) -> int:
        return int(self.cell_measures.size)

    def context(self) -> SymmetrizationContext:
        return SymmetrizationContext(self.n, self.avr, self.volume)

    def stats(self) -> dict:
        return {
            "volume": self.volume,
            "avr": self.avr,
            "n": self.n,
            "cells": self.cells,
            "boundary_length": self.boundary_length,
        }


def _mask_array(spec: DomainSpec, nx: int, ny: int, h: float) -> np.ndarray:
    x = (np.arange(nx) + 0.5) * h
    y = (np.arange(ny) + 0.5) * h
    X, Y = np.meshgrid(x, y, indexing="ij")
    cx, cy = spec.width / 2.0, spec.height / 2.0
    if spec.center_offset is not None:
        cx += spec.center_offset[0]
        cy += spec.center_offset[1]
    if spec.shape == "rect":
        return np.ones((nx, ny), dtype=bool)
    if spec.shape == "ellipse":
        a, b = spec.width / 2.0, spec.height / 2.0
        return ((X - cx) / a) ** 2 + ((Y - cy) / b) ** 2 <= 1.0
    # lshape: rectangle minus its upper-right quadrant
    return ~((X > cx) & (Y > cy))


def _build_euclid_mask(spec: DomainSpec) -> Mesh:
    h = max(spec.width, spec.height) / spec.resolution
    nx = max(int(round(spec.width / h)), 1)
    ny = max(int(round(spec.height / h)), 1)
    inside = _mask_array(spec, nx, ny, h)
    if not inside.any():
        raise ValueError("mask selects no cells")
    ids = -np.ones((nx, ny), dtype=np.int64)
    ids[inside] = np.arange(int(inside.sum()))
    ncell = int(inside.sum())

    rows, cols, vals = [], [], []
    diag = np.zeros(ncell)
    bweight = np.zeros(ncell)

    def couple(a_ids, b_ids):
        rows.append(a_ids)
        cols.append(b_ids)
        vals.append(-np.ones(a_ids.size))

    # interior faces: unit stiffness coefficient (face length h over distance h)
    for axis in (0, 1):
        sl_a = (slice(0, -1), slice(None)) if axis == 0 else (slice(None), slice(0, -1))
        sl_b = (slice(1, None), slice(None)) if axis == 0 else (slice(None), slice(1, None))
        both = inside[sl_a] & inside[sl_b]
        a_ids = ids[sl_a][both]
        b_ids = ids[sl_b][both]
        couple(a_ids, b_ids)
        couple(b_ids, a_ids)
        np.add.at(diag, a_ids, 1.0)
        np.add.at(diag, b_ids, 1.0)
        # Dirichlet faces between an inside cell and an outside cell
        for one, other in ((sl_a, sl_b), (sl_b, sl_a)):
            edge = inside[one] & ~inside[other]
            np.add.at(diag, ids[one][edge], 2.0)
            np.add.at(bweight, ids[one][edge], 2.0)
    # Dirichlet faces on the rectangle frame
    for border in (ids[0, :], ids[-1, :], ids[:, 0], ids[:, -1]):
        live = border[border >= 0]
        np.add.at(diag, live, 2.0)
        np.add.at(bweight, live, 2.0)

    rows.append(np.arange(ncell))
    cols.append(np.arange(ncell))
    vals.append(diag)
    A = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(ncell, ncell),
    )
    measures = np.full(ncell, h * h)
    X, Y = np.meshgrid((np.arange(nx) + 0.5) * h, (np.arange(ny) + 0.5) * h, indexing="ij")
    return Mesh(
        spec=spec,
        n=2,
        avr=1.0,
        volume=math.fsum(measures.tolist()),
        cell_measures=measures,
        stiffness=A,
        boundary_weights=bweight,
        boundary_length=None,  # staircase perimeters do not converge
        coords=(X[inside], Y[inside]),
    )


def _polar_boundary_length(spec: DomainSpec) -> float:
    span = _TWO_PI if spec.theta_span is None else spec.theta_span
    arcs = spec.alpha * span * spec.r_max
    if spec.r_min > 0.0:
        arcs += spec.alpha * span * spec.r_min
    if spec.theta_span is not None and spec.theta_span < _TWO_PI:
        arcs += 2.0 * (spec.r_max - spec.r_min)
    return arcs


def _build_polar(spec: DomainSpec) -> Mesh:
    alpha = spec.alpha
    periodic = spec.theta_span is None or spec.theta_span >= _TWO_PI
    span = _TWO_PI if periodic else spec.theta_span
    nr = nt = spec.resolution
    hr = (spec.r_max - spec.r_min) / nr
    ht = span / nt
    r = spec.r_min + (np.arange(nr) + 0.5) * hr
    theta = (np.arange(nt) + 0.5) * ht
    ncell = nr * nt

    def cid(i, j):
        return i * nt + j

    rows, cols, vals = [], [], []
    diag = np.zeros(ncell)
    bweight = np.zeros(ncell)

    # radial faces between rings i and i+1 at radius r_face
    i_idx = np.repeat(np.arange(nr - 1), nt)
    j_idx = np.tile(np.arange(nt), nr - 1)
    r_face = spec.r_min + (np.repeat(np.arange(nr - 1), nt) + 1.0) * hr
    coef = alpha * r_face * ht / hr
    a_ids, b_ids = cid(i_idx, j_idx), cid(i_idx + 1, j_idx)
    rows += [a_ids, b_ids]
    cols += [b_ids, a_ids]
    vals += [-coef, -coef]
    np.add.at(diag, a_ids, coef)
    np.add.at(diag, b_ids, coef)
    # outer Dirichlet ring (face at distance hr/2 from the cell center)
    outer = cid(np.full(nt, nr - 1), np.arange(nt))
    oc = alpha * spec.r_max * ht / (hr / 2.0)
    np.add.at(diag, outer, oc)
    np.add.at(bweight, outer, oc)
    # inner ring: Dirichlet if r_min > 0, otherwise the face has zero area
    if spec.r_min > 0.0:
        inner = cid(np.zeros(nt, dtype=int), np.arange(nt))
        ic = alpha * spec.r_min * ht / (hr / 2.0)
        np.add.at(diag, inner, ic)
        np.add.at(bweight, inner, ic)

    # angular faces within each ring
    i_idx = np.repeat(np.arange(nr), nt if periodic else nt - 1)
    if periodic:
        j_idx = np.tile(np.arange(nt), nr)
        jn = (j_idx + 1) % nt
    else:
        j_idx = np.tile(np.arange(nt - 1), nr)
        jn = j_idx + 1
    coef = hr / (alpha * r[i_idx] * ht)
    a_ids, b_ids = cid(i_idx, j_idx), cid(i_idx, jn)
    rows += [a_ids, b_ids]
    cols += [b_ids, a_ids]
    vals += [-coef, -coef]
    np.add.at(diag, a_ids, coef)
    np.add.at(diag, b_ids, coef)
    if not periodic:
        # Dirichlet walls at theta = 0 and theta = span
        for j_wall in (0, nt - 1):
            wall = cid(np.arange(nr), np.full(nr, j_wall))
            wc = hr / (alpha * r * ht / 2.0)
            np.add.at(diag, wall, wc)
            np.add.at(bweight, wall, wc)

    rows.append(np.arange(ncell))
    cols.append(np.arange(ncell))
    vals.append(diag)
    A = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(ncell, ncell),
    )
    measures = (alpha * r * hr * ht)[np.repeat(np.arange(nr), nt)]
    R, TH = np.meshgrid(r, theta, indexing="ij")
    return Mesh(
        spec=spec,
        n=2,
        avr=alpha,
        volume=math.fsum(measures.tolist()),
        cell_measures=measures,
        stiffness=A,
        boundary_weights=bweight,
        boundary_length=_polar_boundary_length(spec),
        coords=(R.ravel(), TH.ravel()),
    )


def _build_cone_radial(spec: DomainSpec) -> Mesh:
    # 1-D reduction (alpha r u')' / (alpha r) for rotationally symmetric data
    alpha = spec.alpha
    nr = spec.resolution
    hr = (spec.r_max - spec.r_min) / nr
    r = spec.r_min + (np.arange(nr) + 0.5) * hr

    rows, cols, vals = [], [], []
    diag = np.zeros(nr)
    bweight = np.zeros(nr)
    r_face = spec.r_min + np.arange(1, nr) * hr
    coef = alpha * _TWO_PI * r_face / hr
    a_ids, b_ids = np.arange(nr - 1), np.arange(1, nr)
    rows += [a_ids, b_ids]
    cols += [b_ids, a_ids]
    vals += [-coef, -coef]
    np.add.at(diag, a_ids, coef)
    np.add.at(diag, b_ids, coef)
    oc = alpha * _TWO_PI * spec.r_max / (hr / 2.0)
    diag[-1] += oc
    bweight[-1] += oc
    if spec.r_min > 0.0:
        ic = alpha * _TWO_PI * spec.r_min / (hr / 2.0)
        diag[0] += ic
        bweight[0] += ic

    rows.append(np.arange(nr))
    cols.append(np.arange(nr))
    vals.append(diag)
    A = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(nr, nr),
    )
    measures = alpha * _TWO_PI * r * hr
    blen = alpha * _TWO_PI * spec.r_max + (alpha * _TWO_PI * spec.r_min if spec.r_min > 0 else 0.0)
    return Mesh(
        spec=spec,
        n=2,
        avr=alpha,
        volume=math.fsum(measures.tolist()),
        cell_measures=measures,
        stiffness=A,
        boundary_weights=bweight,
        boundary_length=blen,
        coords=(r,),
    )


def build_mesh(spec: DomainSpec) -> Mesh:
    """Assemble measures, flux-form stiffness and boundary data for a DomainSpec."""
    spec.validate()
    if spec.kind == "euclid_mask":
        return _build_euclid_mask(spec)
    if spec.kind in ("euclid_polar", "cone_polar"):
        return _build_polar(spec)
    return _build_cone_radial(spec)


def isoperimetric_slack(mesh: Mesh) -> float:
    """Perimeter excess |dO| - n omega_n^(1/n) avr^(1/n) |O|^((n-1)/n), >= 0.

    Only defined for shapes with an analytic boundary length; staircase mask
    perimeters do not converge and are rejected.
    """
    if mesh.boundary_length is None:
        raise ValueError(f"mesh kind {mesh.kind!r} has no analytic boundary length")
    n = mesh.n
    bound = (
        n
        * unit_ball_volume(n) ** (1.0 / n)
        * mesh.avr ** (1.0 / n)
        * mesh.volume ** ((n - 1.0) / n)
    )
    return mesh.boundary_length - bound

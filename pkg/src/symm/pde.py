"""Discrete Dirichlet solvers: Poisson solves, smallest eigenpairs, moments.

Linear algebra is deliberately boring: Jacobi-preconditioned conjugate
gradients with a fixed iteration order for the SPD flux-form systems, and
inverse power iteration (zero shift, so the operator stays SPD for the inner
CG) with mass-orthogonal deflation for the second eigenpair.  Identical
inputs produce bitwise-identical fields.

The second-pair start vector is an index ramp rather than the deflated
all-ones vector: on symmetric domains such as the square the ones vector is
mass-orthogonal to the entire second (and third, and fourth) eigenspace, and
inverse iteration started there stalls on a spurious higher mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from symm.geometry import Mesh
from symm.rearrange import WeightedSample

__all__ = [
    "Field",
    "EigenPair",
    "SolverError",
    "poisson_solve",
    "smallest_eigenpairs",
    "moment_hierarchy",
    "field_to_sample",
    "constant_field",
    "radial_step_field",
    "field_to_csv",
]

CG_TOLERANCE = 1e-10
EIGEN_TOLERANCE = 1e-10
EIGEN_RESIDUAL = 1e-8
MAX_OUTER_ITERATIONS = 500


class SolverError(RuntimeError):
    """Iterative solver failed to converge within its iteration budget."""


@dataclass
class Field:
    """Values on interior mesh cells; the boundary trace is implicitly zero."""

    mesh: Mesh
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.mesh.cells,):
            raise ValueError(
                f"field has {self.values.size} values for a mesh with {self.mesh.cells} cells"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")

    def abs(self) -> "Field":
        return Field(self.mesh, np.abs(self.values))

    def max(self) -> float:
        return float(self.values.max())

    def min(self) -> float:
        return float(self.values.min())


@dataclass
class EigenPair:
    """Eigenvalue with its mass-normalized eigenfield (first nonzero entry > 0)."""

    lam: float
    field: Field


def _jacobi_cg(A, b: np.ndarray, x0: np.ndarray, tol: float, max_iter: int) -> np.ndarray:
    """Deterministic preconditioned CG on the SPD matrix A."""
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        return np.zeros_like(b)
    inv_diag = 1.0 / A.diagonal()
    x = x0.copy()
    r = b - A @ x
    z = inv_diag * r
    p = z.copy()
    rz = float(r @ z)
    for _ in range(max_iter):
        if np.linalg.norm(r) <= tol * b_norm:
            return x
        Ap = A @ p
        alpha = rz / float(p @ Ap)
        x += alpha * p
        r -= alpha * Ap
        z = inv_diag * r
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise SolverError(f"conjugate gradients stagnated after {max_iter} iterations")


def poisson_solve(mesh: Mesh, source: Field) -> Field:
    """Solve the flux-form system A u = M f to relative residual 1e-10."""
    if source.mesh is not mesh and source.values.shape != (mesh.cells,):
        raise ValueError("source field does not match the mesh")
    b = mesh.cell_measures * source.values
    u = _jacobi_cg(
        mesh.stiffness, b, np.zeros(mesh.cells), CG_TOLERANCE, max_iter=10 * mesh.cells + 100
    )
    return Field(mesh, u)


def _normalize_sign(values: np.ndarray) -> np.ndarray:
    scale = float(np.abs(values).max())
    nz = np.flatnonzero(np.abs(values) > 1e-12 * scale)
    if nz.size and values[nz[0]] < 0.0:
        return -values
    return values


def _inverse_power(mesh: Mesh, x0: np.ndarray, deflate: np.ndarray | None) -> tuple[float, np.ndarray]:
    A = mesh.stiffness
    m = mesh.cell_measures

    def project(v: np.ndarray) -> np.ndarray:
        if deflate is None:
            return v
        return v - deflate * float(deflate @ (m * v))

    x = project(x0.copy())
    x /= math.sqrt(float(x @ (m * x)))
    y = np.zeros_like(x)
    lam = math.inf
    for _ in range(MAX_OUTER_ITERATIONS):
        b = m * x
        y = _jacobi_cg(A, b, y, CG_TOLERANCE, max_iter=10 * mesh.cells + 100)
        y = project(y)
        norm = math.sqrt(float(y @ (m * y)))
        y /= norm
        Ay = A @ y
        my = m * y
        lam_new = float(y @ Ay) / float(y @ my)
        residual = float(np.linalg.norm(Ay - lam_new * my))
        converged = abs(lam_new - lam) <= EIGEN_TOLERANCE * lam_new
        lam = lam_new
        x = y
        if converged and residual <= 0.5 * EIGEN_RESIDUAL * lam * float(np.linalg.norm(my)):
            return lam, _normalize_sign(y)
    raise SolverError(f"inverse power iteration did not converge in {MAX_OUTER_ITERATIONS} steps")


def smallest_eigenpairs(mesh: Mesh, count: int = 1) -> list[EigenPair]:
    """The lowest one or two Dirichlet eigenpairs by deflated inverse iteration."""
    if count not in (1, 2):
        raise ValueError(f"count must be 1 or 2, got {count}")
    cache = mesh._cache
    if "eigen1" not in cache:
        lam1, v1 = _inverse_power(mesh, np.ones(mesh.cells), deflate=None)
        cache["eigen1"] = EigenPair(lam1, Field(mesh, v1))
    pairs = [cache["eigen1"]]
    if count == 2:
        if "eigen2" not in cache:
            v1 = cache["eigen1"].field.values
            ramp = 1.0 + np.arange(mesh.cells) / mesh.cells
            lam2, v2 = _inverse_power(mesh, ramp, deflate=v1)
            lam1 = cache["eigen1"].lam
            if lam2 / lam1 <= 1.0 + 1e-8:
                raise SolverError(
                    f"first eigenvalue not simple: lam2/lam1 = {lam2 / lam1!r}"
                )
            cache["eigen2"] = EigenPair(lam2, Field(mesh, v2))
        pairs.append(cache["eigen2"])
    return pairs


def moment_hierarchy(mesh: Mesh, k_max: int) -> list[tuple[Field, float, float]]:
    """Poisson hierarchy u_0 = 1, -Delta u_k = k u_{k-1}; rows (u_k, T_k, J_k).

    T_k integrates u_k against the cell measures, J_k is the max.  The k = 0
    row reports the volume and 1.
    """
    if k_max < 0 or k_max > 10:
        raise ValueError(f"k_max must be between 0 and 10, got {k_max}")
    cache = mesh._cache.setdefault("moments", [])
    if not cache:
        u0 = constant_field(mesh, 1.0)
        cache.append((u0, mesh.volume, 1.0))
    while len(cache) <= k_max:
        k = len(cache)
        prev = cache[k - 1][0]
        u = poisson_solve(mesh, Field(mesh, k * prev.values))
        T = float(u.values @ mesh.cell_measures)
        cache.append((u, T, u.max()))
    return list(cache[: k_max + 1])


def field_to_sample(field: Field) -> WeightedSample:
    """Bridge a nonnegative field to the rearrangement machinery.

    Cell-centered meshes make every cell an interior cell, so the sample's
    total measure equals the mesh volume exactly.
    """
    if field.min() < 0.0:
        raise ValueError("field has negative values; apply .abs() explicitly first")
    return WeightedSample(field.values, field.mesh.cell_measures)


def constant_field(mesh: Mesh, value: float) -> Field:
    return Field(mesh, np.full(mesh.cells, float(value)))


def radial_step_field(mesh: Mesh, inner_value: float, outer_value: float, split_radius: float) -> Field:
    """Two-level source: inner_value inside split_radius of the domain center."""
    if mesh.kind in ("euclid_polar", "cone_polar", "cone_radial"):
        dist = mesh.coords[0]
    else:
        spec = mesh.spec
        cx, cy = spec.width / 2.0, spec.height / 2.0
        if spec.center_offset is not None:
            cx += spec.center_offset[0]
            cy += spec.center_offset[1]
        dist = np.hypot(mesh.coords[0] - cx, mesh.coords[1] - cy)
    values = np.where(dist <= split_radius, float(inner_value), float(outer_value))
    return Field(mesh, values)


def field_to_csv(field: Field, path_or_file) -> None:
    """Cell table export: index, coordinates, value."""
    kind = field.mesh.kind
    if kind == "euclid_mask":
        header = "cell,x,y,value"
    elif kind == "cone_radial":
        header = "cell,r,value"
    else:
        header = "cell,r,theta,value"
    rows = [header]
    coords = field.mesh.coords
    for i, v in enumerate(field.values):
        coord_part = ",".join(repr(float(c[i])) for c in coords)
        rows.append(f"{i},{coord_part},{float(v)!r}")
    text = "\n".join(rows) + "\n"
    if isinstance(path_or_file, str):
        with open(path_or_file, "w") as fh:
            fh.write(text)
    else:
        path_or_file.write(text)

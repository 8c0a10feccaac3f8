"""Dense influence-matrix assembly by centroid collocation.

Builds H (traction-kernel) and G (displacement-kernel) influence
matrices for the boundary integral identity H u = G t. Off-diagonal
3x3 blocks come from mapped Gauss quadrature over the field element;
H's diagonal blocks come from the rigid-body identity (a rigid
translation of a bounded body produces zero tractions, which pins each
row-block sum of H to zero and absorbs the free term together with the
strongly singular integral); G's diagonal blocks are weakly singular
and integrated either by centroid subdivision with the collapsed vertex
on the singular point, or by direct brute-force quadrature over the
whole element.

DOF ordering is element-major: DOF d = 3 * element + axis.
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    BoundaryConditionError,
    DegenerateElementError,
    SolvabilityWarning,
)
from .kernels import (
    Material,
    QuadratureRule,
    collapsed_map,
    kelvin_t_points,
    kelvin_u_points,
    map_rule_to_triangle,
)
from .mesh import SurfaceMesh


@dataclass
class InfluenceMatrices:
    """Dense H and G operators (3N x 3N) for an N-element mesh."""

    h: np.ndarray
    g: np.ndarray
    n_elements: int

    @property
    def n_dofs(self):
        return 3 * self.n_elements


@dataclass
class BoundarySpec:
    """Per-DOF boundary data: which quantity is prescribed, and its value.

    ``displacement_known[d]`` True means u_d is prescribed (value in mm)
    and t_d is solved for; False means t_d is prescribed (N/mm^2) and
    u_d is solved for.
    """

    displacement_known: np.ndarray  # (3N,) bool
    values: np.ndarray  # (3N,) float

    def __post_init__(self):
        self.displacement_known = np.asarray(self.displacement_known, dtype=bool)
        self.values = np.asarray(self.values, dtype=float)
        if self.displacement_known.shape != self.values.shape:
            raise BoundaryConditionError("kind and value arrays differ in length")
        if self.displacement_known.ndim != 1:
            raise BoundaryConditionError("boundary spec must be one-dimensional")
        if not np.isfinite(self.values).all():
            raise BoundaryConditionError("boundary values must be finite")

    @property
    def n_dofs(self):
        return self.displacement_known.shape[0]

    @classmethod
    def all_traction(cls, n_dofs, values=None):
        vals = np.zeros(n_dofs) if values is None else np.asarray(values, dtype=float)
        return cls(np.zeros(n_dofs, dtype=bool), vals)

    def constrained_axes(self):
        """Which of x, y, z have at least one prescribed displacement."""
        mask = self.displacement_known.reshape(-1, 3)
        return mask.any(axis=0)


@dataclass
class LinearSystem:
    """Boundary-condition-rearranged system A x = b.

    ``swapped[d]`` records that column d was exchanged (displacement
    prescribed there, so x_d is a traction); the unknown vector mixes
    displacements and tractions accordingly.
    """

    a: np.ndarray
    b: np.ndarray
    swapped: np.ndarray  # (3N,) bool


def _quadrature_cache(mesh: SurfaceMesh, rule: QuadratureRule):
    """Mapped quadrature points/weights for every element, vectorised.

    Same collapsed-square map as :func:`kernels.map_rule_to_triangle`,
    evaluated for all elements at once: points (N, Q, 3), weights (N, Q).
    """
    v0 = mesh.vertices[:, 0]
    v1 = mesh.vertices[:, 1]
    v2 = mesh.vertices[:, 2]
    a = 0.5 * (rule.points[:, 0] + 1.0)
    b = 0.5 * (rule.points[:, 1] + 1.0)
    u = a
    v = a * b
    pts = (
        v0[:, None, :]
        + u[None, :, None] * (v1 - v0)[:, None, :]
        + v[None, :, None] * (v2 - v1)[:, None, :]
    )
    weights = rule.weights[None, :] * a[None, :] * (0.5 * mesh.areas[:, None])
    return pts, weights


def integrate_pair(i, j, mesh: SurfaceMesh, mat: Material, rule: QuadratureRule):
    """Off-diagonal blocks H_ij, G_ij: kernels from collocation point i
    integrated over field element j. Requires i != j."""
    if i == j:
        raise ValueError("integrate_pair is for off-diagonal blocks only (i != j)")
    pts, w = map_rule_to_triangle(rule, mesh.element(j))
    c = mesh.centroids[i]
    t_blocks = kelvin_t_points(c, pts, mesh.normals[j], mat)
    u_blocks = kelvin_u_points(c, pts, mat)
    h_ij = np.einsum("q,qab->ab", w, t_blocks)
    g_ij = np.einsum("q,qab->ab", w, u_blocks)
    return h_ij, g_ij


def integrate_self_g(
    i, mesh: SurfaceMesh, mat: Material, rule: QuadratureRule, strategy="subdivide"
):
    """Weakly singular diagonal block G_ii.

    strategy "subdivide": split the element into three sub-triangles at
    the centroid and integrate each with the collapsed vertex placed on
    the singular point, so the vanishing Jacobian cancels the 1/r
    growth. strategy "paper-faithful": direct mapped quadrature over the
    whole element, relying on point count alone.
    """
    v = mesh.vertices[i]
    c = mesh.centroids[i]
    if mesh.areas[i] <= 0.0:
        raise DegenerateElementError(f"element {i} is degenerate")

    if strategy == "paper-faithful":
        pts, w = map_rule_to_triangle(rule, mesh.element(i))
        blocks = kelvin_u_points(c, pts, mat)
        return np.einsum("q,qab->ab", w, blocks)
    if strategy != "subdivide":
        raise ValueError(f"unknown self-integration strategy {strategy!r}")

    g_ii = np.zeros((3, 3))
    for a, b in ((0, 1), (1, 2), (2, 0)):
        pts, w = collapsed_map(rule, c, v[a], v[b])
        blocks = kelvin_u_points(c, pts, mat)
        g_ii += np.einsum("q,qab->ab", w, blocks)
    return g_ii


def rigid_body_diagonal(off_diagonal_blocks):
    """Diagonal block H_ii = -sum of the row's off-diagonal blocks.

    The blocks must be ordered by ascending column element index; the
    reduction is numpy's deterministic pairwise sum over that order, so
    results are bit-reproducible across runs and worker counts.
    """
    blocks = np.asarray(off_diagonal_blocks, dtype=float)
    return -np.sum(blocks, axis=0)


_EYE3 = np.eye(3)


def _row_blocks(c, pts_all, w_all, normals, mat: Material):
    """Quadrature-weighted kernel blocks from collocation point ``c`` to
    every element at once: (H_blocks, G_blocks), each (N, 3, 3).

    Fused evaluation of both kernels sharing the distance geometry;
    entry values agree with per-pair integration to roundoff. The
    batched contractions are deterministic for fixed shapes, which
    keeps assembly bit-reproducible. The caller overwrites the
    self-element block, so the meaningless values computed against the
    collocation point's own element are never used.
    """
    nu = mat.nu
    d = pts_all - c  # (N, Q, 3)
    r2 = d[..., 0] ** 2 + d[..., 1] ** 2 + d[..., 2] ** 2
    invr = 1.0 / np.sqrt(r2)
    rd = d * invr[..., None]
    rd_t = rd.transpose(0, 2, 1)  # (N, 3, Q), view for batched matmul

    wu = (w_all * invr) * (1.0 / (16.0 * np.pi * mat.mu * (1.0 - nu)))
    g = rd_t @ (rd * wu[..., None])
    g += ((3.0 - 4.0 * nu) * wu.sum(axis=1))[:, None, None] * _EYE3

    drdn = (rd @ normals[:, :, None])[..., 0]
    wt = (w_all / r2) * (-1.0 / (8.0 * np.pi * (1.0 - nu)))
    a1 = wt * drdn
    k = 1.0 - 2.0 * nu
    h = 3.0 * (rd_t @ (rd * a1[..., None]))
    h += (k * a1.sum(axis=1))[:, None, None] * _EYE3
    s = (wt[:, None, :] @ rd)[:, 0, :]
    h -= k * (s[:, :, None] * normals[:, None, :] - normals[:, :, None] * s[:, None, :])
    return h, g


def assemble_rows(
    mesh: SurfaceMesh,
    mat: Material,
    rule: QuadratureRule,
    rows,
    h_out,
    g_out,
    strategy="subdivide",
    cache=None,
):
    """Fill the collocation rows ``rows`` of preallocated H and G.

    Each row is computed independently (disjoint writes), so any
    partition of rows across workers yields bit-identical matrices.
    The whole row is evaluated at once, then the diagonal blocks are
    replaced: H_ii by the rigid-body identity over the off-diagonal
    blocks in ascending column order, G_ii by singular integration.
    """
    n = mesh.n_elements
    if cache is None:
        cache = _quadrature_cache(mesh, rule)
    pts_all, w_all = cache

    for i in rows:
        row_h, row_g = _row_blocks(
            mesh.centroids[i], pts_all, w_all, mesh.normals, mat
        )
        others = np.concatenate([np.arange(0, i), np.arange(i + 1, n)])
        row_h[i] = rigid_body_diagonal(row_h[others])
        row_g[i] = integrate_self_g(i, mesh, mat, rule, strategy)

        h_out[3 * i : 3 * i + 3, :] = row_h.transpose(1, 0, 2).reshape(3, 3 * n)
        g_out[3 * i : 3 * i + 3, :] = row_g.transpose(1, 0, 2).reshape(3, 3 * n)


def assemble(
    mesh: SurfaceMesh, mat: Material, rule: QuadratureRule, strategy="subdivide"
) -> InfluenceMatrices:
    """Assemble dense H and G for the whole mesh (sequentially).

    Deterministic: repeated assembly of the same mesh is bit-identical.
    A closed body needs at least 4 elements; degenerate facets are
    rejected up front.
    """
    bad = mesh.degenerate_indices()
    if len(bad):
        raise DegenerateElementError(f"mesh contains degenerate elements {list(bad)}")
    n3 = mesh.n_dofs
    h = np.empty((n3, n3))
    g = np.empty((n3, n3))
    assemble_rows(mesh, mat, rule, range(mesh.n_elements), h, g, strategy)
    return InfluenceMatrices(h, g, mesh.n_elements)


def _warn_if_underconstrained(bc: BoundarySpec):
    axes = bc.constrained_axes()
    if not axes.all():
        free = [ax for ax, ok in zip("xyz", axes) if not ok]
        warnings.warn(
            f"no prescribed displacement along {', '.join(free)}: rigid "
            "translation unconstrained, solution defined up to rigid modes",
            SolvabilityWarning,
            stacklevel=3,
        )


def apply_boundary_conditions(hg: InfluenceMatrices, bc: BoundarySpec) -> LinearSystem:
    """Rearrange H u = G t into A x = b under mixed boundary conditions.

    Traction-known DOF d keeps column d of H in A (unknown u_d) and
    sends G[:,d] * t_d to the right-hand side; displacement-known DOF d
    swaps in -G[:,d] (unknown t_d) and sends -H[:,d] * u_d to the
    right-hand side.
    """
    if bc.n_dofs != hg.n_dofs:
        raise BoundaryConditionError(
            f"boundary spec covers {bc.n_dofs} DOFs, system has {hg.n_dofs}"
        )
    _warn_if_underconstrained(bc)
    disp = bc.displacement_known
    a = hg.h.copy()
    a[:, disp] = -hg.g[:, disp]
    b = hg.g[:, ~disp] @ bc.values[~disp] - hg.h[:, disp] @ bc.values[disp]
    return LinearSystem(a, b, disp.copy())


def rhs_matrix(hg: InfluenceMatrices, bc: BoundarySpec):
    """Matrix B with b = B @ values: G columns where traction is known,
    -H columns where displacement is known. Pairs with A for the
    precomputed-operator path."""
    disp = bc.displacement_known
    m = hg.g.copy()
    m[:, disp] = -hg.h[:, disp]
    return m


# ---------------------------------------------------------------------------
# binary matrix dump
# ---------------------------------------------------------------------------

_MATRIX_MAGIC = b"TRIBEMMX"


def write_matrix(path, arr):
    """Dump a 2D float64 matrix: 16-byte header (magic, rows, cols) then
    row-major data."""
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("matrix dump expects a 2D array")
    with open(path, "wb") as f:
        f.write(_MATRIX_MAGIC)
        f.write(struct.pack("<II", arr.shape[0], arr.shape[1]))
        f.write(arr.tobytes())


def read_matrix(path):
    with open(path, "rb") as f:
        header = f.read(16)
        if len(header) < 16 or header[:8] != _MATRIX_MAGIC:
            raise ValueError(f"{path} is not a tribem matrix dump")
        rows, cols = struct.unpack("<II", header[8:])
        data = np.frombuffer(f.read(), dtype=np.float64)
    if data.size != rows * cols:
        raise ValueError(f"{path}: expected {rows * cols} values, found {data.size}")
    return data.reshape(rows, cols).copy()


def matrix_summary(arr):
    arr = np.asarray(arr)
    return (
        f"shape {arr.shape[0]}x{arr.shape[1]}, "
        f"fro norm {np.linalg.norm(arr):.6e}, "
        f"max |entry| {np.abs(arr).max():.6e}"
    )

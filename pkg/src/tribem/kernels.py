"""Kelvin fundamental solutions and triangle quadrature.

Displacement and traction kernels for an isotropic infinite elastic
medium under a unit point load, in the Brebbia/Dominguez convention:

    U*_ij = 1 / (16 pi mu (1-nu) r) * [ (3-4nu) d_ij + r,i r,j ]

    T*_ij = -1 / (8 pi (1-nu) r^2) * { dr/dn [ (1-2nu) d_ij + 3 r,i r,j ]
                                       - (1-2nu) (r,i n_j - r,j n_i) }

with r = |y - x|, r,i = (y - x)_i / r, n the outward unit normal at the
field point y, and dr/dn = r,k n_k. U* decays as 1/r and is symmetric;
T* decays as 1/r^2.

Quadrature is a tensor-product Gauss-Legendre rule on [-1,1]^2 mapped
onto triangles by collapsing one square edge to a vertex (Duffy-style),
which clusters points towards that vertex and tames weakly singular
integrands placed there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateElementError,
    InvalidMaterialError,
    SingularEvaluationError,
)
from .mesh import Element

SUPPORTED_ORDERS = (4, 8, 16, 32)

_EYE3 = np.eye(3)


@dataclass(frozen=True)
class Material:
    """Isotropic linear-elastic constants.

    e: Young's modulus (N/mm^2), nu: Poisson's ratio, mu: shear modulus
    derived as e / (2 (1 + nu)).
    """

    e: float
    nu: float
    mu: float


def make_material(e, nu) -> Material:
    """Validate (E, nu) and derive the shear modulus."""
    e = float(e)
    nu = float(nu)
    if not np.isfinite(e) or e <= 0:
        raise InvalidMaterialError(f"Young's modulus must be positive, got {e}")
    if not np.isfinite(nu) or not -1.0 < nu < 0.5:
        raise InvalidMaterialError(
            f"Poisson's ratio must lie in (-1, 0.5), got {nu}"
        )
    return Material(e, nu, e / (2.0 * (1.0 + nu)))


def kelvin_u_points(source, points, mat: Material):
    """U* blocks from one source point to many field points: (M, 3, 3).

    All distances must be positive; the self-point must never reach this
    function.
    """
    d = np.asarray(points, dtype=float).reshape(-1, 3) - np.asarray(source, dtype=float)
    r = np.sqrt(np.einsum("mi,mi->m", d, d))
    if np.any(r == 0.0):
        raise SingularEvaluationError("displacement kernel evaluated at r = 0")
    invr = 1.0 / r
    rd = d * invr[:, None]
    c = invr / (16.0 * np.pi * mat.mu * (1.0 - mat.nu))
    blocks = np.einsum("mi,mj->mij", rd, rd)
    blocks += (3.0 - 4.0 * mat.nu) * _EYE3
    blocks *= c[:, None, None]
    return blocks


def kelvin_t_points(source, points, normals, mat: Material):
    """T* blocks from one source point to many field points: (M, 3, 3).

    ``normals`` holds the outward unit normal at each field point;
    a single (3,) normal is broadcast to all points.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    d = pts - np.asarray(source, dtype=float)
    r2 = np.einsum("mi,mi->m", d, d)
    if np.any(r2 == 0.0):
        raise SingularEvaluationError("traction kernel evaluated at r = 0")
    r = np.sqrt(r2)
    rd = d / r[:, None]
    nrm = np.broadcast_to(np.asarray(normals, dtype=float), pts.shape)

    drdn = np.einsum("mi,mi->m", rd, nrm)
    k = 1.0 - 2.0 * mat.nu
    sym = 3.0 * np.einsum("mi,mj->mij", rd, rd)
    sym += k * _EYE3
    sym *= drdn[:, None, None]
    skew = np.einsum("mi,mj->mij", rd, nrm)
    skew = skew - skew.transpose(0, 2, 1)
    blocks = sym - k * skew
    blocks *= (-1.0 / (8.0 * np.pi * (1.0 - mat.nu) * r2))[:, None, None]
    return blocks


def kelvin_U(source, field, mat: Material):
    """Displacement kernel U*(x, y) as a symmetric 3x3 block."""
    return kelvin_u_points(source, np.asarray(field, dtype=float)[None, :], mat)[0]


def kelvin_T(source, field, normal_at_field, mat: Material):
    """Traction kernel T*(x, y; n) as a 3x3 block.

    ``normal_at_field`` must be a unit vector.
    """
    n = np.asarray(normal_at_field, dtype=float)
    if abs(np.linalg.norm(n) - 1.0) > 1e-10:
        raise ValueError("normal_at_field must be a unit vector")
    return kelvin_t_points(source, np.asarray(field, dtype=float)[None, :], n, mat)[0]


@dataclass(frozen=True)
class QuadratureRule:
    """Tensor-product Gauss-Legendre rule on the square [-1,1]^2."""

    order: int
    points: np.ndarray  # (order^2, 2)
    weights: np.ndarray  # (order^2,)

    def __post_init__(self):
        self.points.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def n_points(self):
        return self.order * self.order


def gauss_rule(n) -> QuadratureRule:
    """n x n Gauss-Legendre rule on [-1,1]^2.

    Supported orders are 4, 8, 16 and 32 (the 16x16 rule with its 256
    points per element is the default throughout). Nodes and weights are
    computed, not tabulated.
    """
    if n not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported quadrature order {n}; pick one of {SUPPORTED_ORDERS}")
    x, w = np.polynomial.legendre.leggauss(n)
    xi, eta = np.meshgrid(x, x, indexing="ij")
    wij = np.outer(w, w)
    points = np.column_stack([xi.ravel(), eta.ravel()])
    return QuadratureRule(n, points, wij.ravel())


def collapsed_map(rule: QuadratureRule, v0, v1, v2):
    """Map a square rule onto triangle (v0, v1, v2), collapsing onto v0.

    The square edge xi = -1 degenerates to v0, so the Jacobian vanishes
    there and quadrature points cluster towards v0. Returns physical
    points (n^2, 3) and weights (n^2,) that sum to the triangle area.
    """
    v0 = np.asarray(v0, dtype=float)
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    a = 0.5 * (rule.points[:, 0] + 1.0)
    b = 0.5 * (rule.points[:, 1] + 1.0)
    u = a
    v = a * b
    pts = v0 + u[:, None] * (v1 - v0) + v[:, None] * (v2 - v1)
    area2 = np.linalg.norm(np.cross(v1 - v0, v2 - v0))
    weights = rule.weights * a * (area2 / 4.0)
    return pts, weights


def map_rule_to_triangle(rule: QuadratureRule, element: Element):
    """Physical quadrature points and scaled weights over one element.

    Weights carry the area measure: they sum to the element area, and
    all points lie strictly inside the triangle.
    """
    if element.area <= 0.0:
        raise DegenerateElementError("cannot map quadrature onto a degenerate element")
    v = element.vertices
    return collapsed_map(rule, v[0], v[1], v[2])

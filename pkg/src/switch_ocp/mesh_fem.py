"""P1 finite elements on a structured triangulation of the unit square.

Every grid cell is split along the same diagonal (lower-left to
upper-right), which keeps the assembly deterministic.  Mass and
stiffness matrices are assembled exactly; load vectors use a fourth-node
Gauss rule that integrates cubic polynomials exactly on each triangle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

# degree-3 rule on the reference triangle: centroid plus three interior
# points, weights relative to the triangle area
_QUAD_BARY = np.array(
    [
        [1 / 3, 1 / 3, 1 / 3],
        [0.6, 0.2, 0.2],
        [0.2, 0.6, 0.2],
        [0.2, 0.2, 0.6],
    ]
)
_QUAD_W = np.array([-27 / 48, 25 / 48, 25 / 48, 25 / 48])


@dataclass(frozen=True)
class SpatialMesh:
    """Structured triangulation of [0,1]^2 with nx nodes per side."""

    nx: int
    nodes: np.ndarray      # (P, 2) coordinates
    triangles: np.ndarray  # (T, 3) node indices, positively oriented
    boundary: np.ndarray   # (P,) True on the Dirichlet boundary

    @classmethod
    def unit_square(cls, nx: int) -> "SpatialMesh":
        if nx < 3:
            raise ValueError("need at least 3 nodes per side")
        s = np.arange(nx) / (nx - 1)
        xx, yy = np.meshgrid(s, s, indexing="xy")
        nodes = np.column_stack([xx.ravel(), yy.ravel()])
        ix, iy = np.meshgrid(np.arange(nx - 1), np.arange(nx - 1), indexing="xy")
        v00 = (iy * nx + ix).ravel()
        v10 = v00 + 1
        v01 = v00 + nx
        v11 = v01 + 1
        tris = np.vstack(
            [np.column_stack([v00, v10, v11]), np.column_stack([v00, v11, v01])]
        )
        on_edge = (
            (nodes[:, 0] == 0.0)
            | (nodes[:, 0] == 1.0)
            | (nodes[:, 1] == 0.0)
            | (nodes[:, 1] == 1.0)
        )
        for a in (nodes, tris, on_edge):
            a.setflags(write=False)
        return cls(nx, nodes, tris, on_edge)

    @property
    def interior(self) -> np.ndarray:
        return np.flatnonzero(~self.boundary)

    @property
    def h(self) -> float:
        """Grid spacing (shortest triangle edge)."""
        return 1.0 / (self.nx - 1)


def _triangle_geometry(mesh: SpatialMesh):
    pts = mesh.nodes[mesh.triangles]          # (T, 3, 2)
    e1 = pts[:, 1] - pts[:, 0]
    e2 = pts[:, 2] - pts[:, 0]
    det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    if np.any(det <= 0):
        raise ValueError("mesh contains a degenerate or inverted triangle")
    area = 0.5 * det
    # gradients of the three barycentric basis functions
    g = np.empty((pts.shape[0], 3, 2))
    g[:, 1, 0] = e2[:, 1] / det
    g[:, 1, 1] = -e2[:, 0] / det
    g[:, 2, 0] = -e1[:, 1] / det
    g[:, 2, 1] = e1[:, 0] / det
    g[:, 0] = -g[:, 1] - g[:, 2]
    return pts, area, g


def assemble(mesh: SpatialMesh):
    """Mass and stiffness matrices on all nodes (no boundary conditions).

    Use `interior_matrix` to impose the homogeneous Dirichlet condition by
    eliminating boundary unknowns.
    """
    _, area, g = _triangle_geometry(mesh)
    n_tri = mesh.triangles.shape[0]

    k_loc = np.einsum("tid,tjd,t->tij", g, g, area)
    m_loc = (np.ones((3, 3)) + np.eye(3)) / 12.0
    m_loc = m_loc[None, :, :] * area[:, None, None]

    rows = np.repeat(mesh.triangles, 3, axis=1).reshape(n_tri, 3, 3)
    cols = np.tile(mesh.triangles, 3).reshape(n_tri, 3, 3)
    shape = (mesh.nodes.shape[0], mesh.nodes.shape[0])
    mass = sp.coo_matrix((m_loc.ravel(), (rows.ravel(), cols.ravel())), shape).tocsr()
    stiffness = sp.coo_matrix((k_loc.ravel(), (rows.ravel(), cols.ravel())), shape).tocsr()
    return mass, stiffness


def interior_matrix(a: sp.csr_matrix, mesh: SpatialMesh) -> sp.csr_matrix:
    """Restrict an assembled operator to the interior degrees of freedom."""
    idx = mesh.interior
    return a[idx][:, idx].tocsr()


def load_vector(mesh: SpatialMesh, f) -> np.ndarray:
    """Vector of integrals of f against the nodal basis, all nodes.

    f is evaluated vectorized on (x, y) arrays at the quadrature points of
    each triangle.
    """
    pts, area, _ = _triangle_geometry(mesh)
    qp = np.einsum("qk,tkd->tqd", _QUAD_BARY, pts)   # (T, Q, 2)
    fv = np.asarray(f(qp[..., 0], qp[..., 1]), dtype=float)
    if fv.shape != qp.shape[:2]:
        fv = np.broadcast_to(fv, qp.shape[:2])
    # entry for local node k: area * sum_q w_q f(x_q) * bary_k(x_q)
    contrib = np.einsum("tq,q,qk,t->tk", fv, _QUAD_W, _QUAD_BARY, area)
    out = np.zeros(mesh.nodes.shape[0])
    np.add.at(out, mesh.triangles.ravel(), contrib.ravel())
    return out


def integrate(mesh: SpatialMesh, f) -> float:
    """Integral of f over the square by the same per-triangle Gauss rule."""
    pts, area, _ = _triangle_geometry(mesh)
    qp = np.einsum("qk,tkd->tqd", _QUAD_BARY, pts)
    fv = np.asarray(f(qp[..., 0], qp[..., 1]), dtype=float)
    return float(np.einsum("tq,q,t->", fv, _QUAD_W, area))


def nodal_field(mesh: SpatialMesh, f) -> np.ndarray:
    """Nodal interpolant values of f, all nodes."""
    return np.asarray(f(mesh.nodes[:, 0], mesh.nodes[:, 1]), dtype=float)

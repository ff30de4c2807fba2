"""Continuous tensor-product Lagrange spaces on the background mesh.

Scalar spaces use Gauss-Lobatto Lagrange nodes per cell edge (better
conditioned than equispaced nodes at cubic degree); the velocity/pressure
pair combines a vector-valued space of degree r with a scalar space of
degree r-1. Global coefficient vectors are laid out as
[velocity-x | velocity-y | pressure].
"""
from __future__ import annotations

import numpy as np

from .geometry import CellClass, CutGeometry
from .mesh import BackgroundMesh
from .quadrature import gauss_lobatto_01


class SpaceError(ValueError):
    pass


def lagrange_1d(nodes: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Values and derivatives of the 1d Lagrange basis for the given nodes.

    Returns (vals, ders) of shape (len(x), len(nodes)). Evaluation uses the
    direct product form, which is exact at the nodes and well defined for
    points outside [0, 1] (needed by the patchwise polynomial extension).
    """
    x = np.asarray(x, dtype=float)
    m, q1 = x.size, nodes.size
    vals = np.ones((m, q1))
    ders = np.zeros((m, q1))
    for a in range(q1):
        for b in range(q1):
            if b == a:
                continue
            vals[:, a] *= (x - nodes[b]) / (nodes[a] - nodes[b])
        for b in range(q1):
            if b == a:
                continue
            term = np.ones(m) / (nodes[a] - nodes[b])
            for c in range(q1):
                if c == a or c == b:
                    continue
                term *= (x - nodes[c]) / (nodes[a] - nodes[c])
            ders[:, a] += term
    return vals, ders


class ScalarSpace:
    """C0 Lagrange space of the given degree on the background mesh.

    Global nodes form a (degree*n + 1)^2 grid; dof g = gy*(degree*n+1) + gx.
    Local dofs in a cell are ordered l = b*(degree+1) + a with a the x index.
    """

    def __init__(self, mesh: BackgroundMesh, degree: int):
        if degree < 1:
            raise SpaceError(f"polynomial degree must be >= 1, got {degree}")
        self.mesh = mesh
        self.degree = degree
        self.nodes_ref = gauss_lobatto_01(degree)
        n, q = mesh.n, degree
        self.n_1d = q * n + 1
        self.ndofs = self.n_1d**2

        # physical 1d node coordinates: cell offset + scaled reference node
        coords = np.empty(self.n_1d)
        for i in range(n):
            coords[i * q : i * q + q + 1] = (i + self.nodes_ref) * mesh.size
        self.nodes_1d = coords

        # per-cell global dof map, (n_cells, (q+1)^2)
        loc = np.arange(q + 1)
        la, lb = np.meshgrid(loc, loc, indexing="xy")
        cell_ids = np.arange(mesh.n_cells)
        ci, cj = cell_ids % n, cell_ids // n
        gx = ci[:, None] * q + la.ravel()[None, :]
        gy = cj[:, None] * q + lb.ravel()[None, :]
        self._cell_dofs = gy * self.n_1d + gx
        self._cell_dofs.flags.writeable = False
        self.nloc = (q + 1) ** 2

    def cell_dofs(self, cid: int) -> np.ndarray:
        return self._cell_dofs[self.mesh.check_cell(cid)]

    @property
    def all_cell_dofs(self) -> np.ndarray:
        return self._cell_dofs

    def dof_coords(self) -> np.ndarray:
        xx, yy = np.meshgrid(self.nodes_1d, self.nodes_1d, indexing="xy")
        return np.column_stack([xx.ravel(), yy.ravel()])

    def eval_ref(self, ref_pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Basis values/gradients at reference coordinates of the unit cell.

        Gradients are physical (scaled by 1/cell size). Points may lie
        outside [0,1]^2: the tensor polynomials extend naturally, which is
        what the patchwise extension of the ghost penalty evaluates.
        """
        ref_pts = np.atleast_2d(ref_pts)
        vx, dx = lagrange_1d(self.nodes_ref, ref_pts[:, 0])
        vy, dy = lagrange_1d(self.nodes_ref, ref_pts[:, 1])
        q1 = self.degree + 1
        m = ref_pts.shape[0]
        vals = (vy[:, :, None] * vx[:, None, :]).reshape(m, q1 * q1)
        grads = np.empty((m, q1 * q1, 2))
        grads[:, :, 0] = (vy[:, :, None] * dx[:, None, :]).reshape(m, q1 * q1)
        grads[:, :, 1] = (dy[:, :, None] * vx[:, None, :]).reshape(m, q1 * q1)
        grads /= self.mesh.size
        return vals, grads

    def eval_cell(self, cid: int, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Values/gradients of the cell's basis at physical points (maybe outside)."""
        x0, _, y0, _ = self.mesh.cell_bounds(cid)
        pts = np.atleast_2d(pts)
        ref = (pts - np.array([x0, y0])) / self.mesh.size
        return self.eval_ref(ref)

    def interpolate(self, fn) -> np.ndarray:
        """Nodal interpolant of fn(x, y) (vectorized over arrays)."""
        xx, yy = np.meshgrid(self.nodes_1d, self.nodes_1d, indexing="xy")
        return np.asarray(fn(xx.ravel(), yy.ravel()), dtype=float)

    def boundary_dofs(self) -> np.ndarray:
        """Dofs whose node lies on the outer boundary of the unit square."""
        idx = np.arange(self.ndofs)
        gx, gy = idx % self.n_1d, idx // self.n_1d
        last = self.n_1d - 1
        return idx[(gx == 0) | (gx == last) | (gy == 0) | (gy == last)]


class TaylorHoodSpace:
    """Inf-sup stable velocity/pressure pair: vector degree r, scalar degree r-1."""

    def __init__(self, mesh: BackgroundMesh, r: int):
        if r < 2:
            raise SpaceError(f"velocity degree must be >= 2, got {r}")
        self.mesh = mesh
        self.r = r
        self.velocity = ScalarSpace(mesh, r)
        self.pressure = ScalarSpace(mesh, r - 1)
        self.nv = self.velocity.ndofs
        self.npr = self.pressure.ndofs
        self.offset_ux = 0
        self.offset_uy = self.nv
        self.offset_p = 2 * self.nv
        self.total_dofs = 2 * self.nv + self.npr

    def split(self, vec: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Views (ux, uy, p) into a full coefficient vector."""
        return vec[: self.nv], vec[self.nv : 2 * self.nv], vec[2 * self.nv :]

    def pack(self, ux, uy, p) -> np.ndarray:
        return np.concatenate([ux, uy, p])

    def interpolate_velocity(self, vfun, t: float) -> np.ndarray:
        """(2*nv,) interpolant of a time-dependent vector field vfun(x, y, t)."""
        ux = self.velocity.interpolate(lambda x, y: vfun(x, y, t)[0])
        uy = self.velocity.interpolate(lambda x, y: vfun(x, y, t)[1])
        return np.concatenate([ux, uy])

    def interpolate_pressure(self, pfun, t: float) -> np.ndarray:
        return self.pressure.interpolate(lambda x, y: pfun(x, y, t))

    def interpolant(self, vfun, pfun, t: float) -> np.ndarray:
        """Full-size coefficient vector interpolating (velocity, pressure) at t."""
        vel = self.interpolate_velocity(vfun, t)
        return np.concatenate([vel, self.interpolate_pressure(pfun, t)])

    def outer_boundary_velocity_dofs(self) -> np.ndarray:
        """Global indices of both velocity components on the outer boundary."""
        b = self.velocity.boundary_dofs()
        return np.concatenate([b, b + self.nv])


def build_taylor_hood(mesh: BackgroundMesh, r: int) -> TaylorHoodSpace:
    return TaylorHoodSpace(mesh, r)


def eval_basis(space: ScalarSpace, cid: int, pts: np.ndarray):
    return space.eval_cell(cid, pts)


def interpolate(space: ScalarSpace, fn, t: float | None = None) -> np.ndarray:
    if t is None:
        return space.interpolate(fn)
    return space.interpolate(lambda x, y: fn(x, y, t))


def _scalar_activity(
    space: ScalarSpace, ok_cells: np.ndarray
) -> np.ndarray:
    """Active = the dof's basis support touches at least one flagged cell."""
    active = np.zeros(space.ndofs, dtype=bool)
    if ok_cells.any():
        touched = space.all_cell_dofs[ok_cells]
        active[np.unique(touched)] = True
    return active


def compute_dof_activity(
    space: TaylorHoodSpace,
    geometry: CutGeometry,
    submesh_cells: np.ndarray,
) -> np.ndarray:
    """Boolean mask over all dofs: support meets the fluid region or the
    stabilized submesh. Everything else has no equation and is pinned."""
    ok = (geometry.classes == CellClass.FLUID) | (geometry.classes == CellClass.CUT)
    ok = ok.copy()
    submesh_cells = np.asarray(submesh_cells, dtype=np.int64)
    if submesh_cells.size:
        ok[submesh_cells] = True
    act_v = _scalar_activity(space.velocity, ok)
    act_p = _scalar_activity(space.pressure, ok)
    return np.concatenate([act_v, act_v, act_p])

"""Structured square background mesh of the unit square.

The computational domain (0,1)^2 is tiled by an n-by-n grid of equal
square cells with n = 4 * 2**level, so the cell diagonal (used as the
mesh size h throughout) halves with every refinement level and starts
at 1/(2*sqrt(2)) on level 0.
"""
from __future__ import annotations

import math
from typing import IO

import numpy as np

MAX_LEVEL = 10  # 4096^2 cells; beyond this the dense per-cell arrays get silly


class MeshError(ValueError):
    pass


class BackgroundMesh:
    """Immutable uniform grid with flat cell and face indexing.

    Cells are indexed cid = j*n + i for grid column i and row j, both in
    [0, n). Interior faces are numbered with all vertical faces (normal
    along x) first: a vertical face between (i, j) and (i+1, j) has id
    j*(n-1) + i, a horizontal face between (i, j) and (i, j+1) has id
    n*(n-1) + i*(n-1) + j. All queries are pure; instances can be shared
    between workers.
    """

    def __init__(self, level: int):
        if level < 0:
            raise MeshError(f"refinement level must be >= 0, got {level}")
        if level > MAX_LEVEL:
            raise MeshError(f"refinement level {level} exceeds guard {MAX_LEVEL}")
        self.level = level
        self.n = 4 * 2**level
        self.size = 1.0 / self.n
        self.h = self.size * math.sqrt(2.0)
        n = self.n
        self.n_cells = n * n
        self.n_interior_faces = 2 * n * (n - 1)

        # face -> (cell_low, cell_high): vertical faces first, then horizontal
        iv, jv = np.meshgrid(np.arange(n - 1), np.arange(n), indexing="ij")
        left = jv.ravel(order="F") * n + iv.ravel(order="F")
        ih, jh = np.meshgrid(np.arange(n), np.arange(n - 1), indexing="ij")
        below = jh.ravel(order="C") * n + ih.ravel(order="C")
        self._face_cells = np.empty((self.n_interior_faces, 2), dtype=np.int64)
        nv = n * (n - 1)
        self._face_cells[:nv, 0] = left
        self._face_cells[:nv, 1] = left + 1
        self._face_cells[nv:, 0] = below
        self._face_cells[nv:, 1] = below + n
        self._face_cells.flags.writeable = False

    # -- cell queries -------------------------------------------------------

    def check_cell(self, cid: int) -> int:
        cid = int(cid)
        if not 0 <= cid < self.n_cells:
            raise MeshError(f"cell id {cid} out of range [0, {self.n_cells})")
        return cid

    def cell_id(self, i: int, j: int) -> int:
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise MeshError(f"grid coordinates ({i}, {j}) out of range for n={self.n}")
        return j * self.n + i

    def cell_coords(self, cid: int) -> tuple[int, int]:
        cid = self.check_cell(cid)
        return cid % self.n, cid // self.n

    def cell_bounds(self, cid: int) -> tuple[float, float, float, float]:
        """(x0, x1, y0, y1) of the cell."""
        i, j = self.cell_coords(cid)
        s = self.size
        return i * s, (i + 1) * s, j * s, (j + 1) * s

    def cell_center(self, cid: int) -> tuple[float, float]:
        x0, x1, y0, y1 = self.cell_bounds(cid)
        return 0.5 * (x0 + x1), 0.5 * (y0 + y1)

    def containing_cell(self, x: float, y: float) -> int:
        """Cell holding the point, with boundary points snapped inward."""
        i = min(max(int(x * self.n), 0), self.n - 1)
        j = min(max(int(y * self.n), 0), self.n - 1)
        return j * self.n + i

    def boundary_cell_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_cells, dtype=bool)
        idx = np.arange(self.n_cells)
        i, j = idx % self.n, idx // self.n
        mask[(i == 0) | (i == self.n - 1) | (j == 0) | (j == self.n - 1)] = True
        return mask

    # -- face queries -------------------------------------------------------

    @property
    def face_cells(self) -> np.ndarray:
        """(n_interior_faces, 2) array of the two cells sharing each face."""
        return self._face_cells

    def face_axis(self, fid: int) -> int:
        """0 for a vertical face (normal along x), 1 for horizontal."""
        return 0 if fid < self.n * (self.n - 1) else 1

    def cell_neighbors(self, cid: int) -> list[tuple[int, int]]:
        """All interior faces of the cell with the cell on the other side."""
        i, j = self.cell_coords(cid)
        n = self.n
        nv = n * (n - 1)
        out = []
        if i > 0:
            out.append((j * (n - 1) + i - 1, cid - 1))
        if i < n - 1:
            out.append((j * (n - 1) + i, cid + 1))
        if j > 0:
            out.append((nv + i * (n - 1) + j - 1, cid - n))
        if j < n - 1:
            out.append((nv + i * (n - 1) + j, cid + n))
        return out

    def boundary_faces(self) -> list[tuple[int, int]]:
        """(cell, side) pairs on the outer boundary; sides 0/1/2/3 = left/right/bottom/top."""
        n = self.n
        out = []
        for j in range(n):
            out.append((j * n, 0))
            out.append((j * n + n - 1, 1))
        for i in range(n):
            out.append((i, 2))
            out.append(((n - 1) * n + i, 3))
        return out

    def dump_cells(self, stream: IO[str]) -> None:
        """Plain-text cell table: one line per cell 'i j x_min y_min size'."""
        s = self.size
        for cid in range(self.n_cells):
            i, j = cid % self.n, cid // self.n
            stream.write(f"{i} {j} {i * s:.17g} {j * s:.17g} {s:.17g}\n")

    def __repr__(self) -> str:  # pragma: no cover
        return f"BackgroundMesh(level={self.level}, n={self.n})"


def build_mesh(level: int) -> BackgroundMesh:
    """Build the uniform background mesh for the given refinement level."""
    return BackgroundMesh(level)


def cell_neighbors(mesh: BackgroundMesh, cid: int) -> list[tuple[int, int]]:
    return mesh.cell_neighbors(cid)

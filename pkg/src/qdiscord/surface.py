"""Discord as a scalar field over the coefficient cube and its level surfaces.

The field is sampled on a regular grid over [-1, 1]^3 with unphysical
points marked NaN; marching cubes then skips every cell touching an
unphysical corner, so surfaces are never extrapolated outside the state
space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from skimage import measure as _sk_measure

from .discord import discord_value_arrays
from .states import PHYSICALITY_FLOOR, spectrum_min_arrays

DEFAULT_RESOLUTION = 61


@dataclass(frozen=True)
class ScalarField:
    """Closed-form discord sampled on a resolution^3 grid over [-1, 1]^3.

    values[i, j, k] corresponds to (axis[i], axis[j], axis[k]); unphysical
    points carry NaN.
    """

    num_qubits: int
    resolution: int
    values: np.ndarray
    axis: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        axis = np.asarray(self.axis, dtype=float)
        r = int(self.resolution)
        if values.shape != (r, r, r) or axis.shape != (r,):
            raise ValueError("field arrays do not match the stated resolution")
        values = values.copy()
        values.flags.writeable = False
        axis = axis.copy()
        axis.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "resolution", r)

    @property
    def spacing(self) -> float:
        return float(self.axis[1] - self.axis[0])


@dataclass(frozen=True)
class TriangleMesh:
    vertices: np.ndarray  # (V, 3) float
    triangles: np.ndarray  # (T, 3) int, indices into vertices

    def __post_init__(self):
        vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        triangles = np.asarray(self.triangles, dtype=int).reshape(-1, 3)
        if triangles.size and (triangles.min() < 0 or triangles.max() >= len(vertices)):
            raise ValueError("triangle indices out of range")
        if vertices.size and np.max(np.abs(vertices)) > 1.0 + 1e-9:
            raise ValueError("vertices outside the [-1, 1]^3 cube")
        vertices = vertices.copy()
        vertices.flags.writeable = False
        triangles = triangles.copy()
        triangles.flags.writeable = False
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "triangles", triangles)

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0


def _empty_mesh() -> TriangleMesh:
    return TriangleMesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=int))


def sample_field(num_qubits: int, resolution: int = DEFAULT_RESOLUTION) -> ScalarField:
    """Sample the closed-form discord on an odd-resolution grid (so the
    origin is a grid point)."""
    resolution = int(resolution)
    if resolution < 3:
        raise ValueError(f"resolution must be >= 3, got {resolution}")
    if resolution % 2 == 0:
        raise ValueError(f"resolution must be odd, got {resolution}")
    # integer-ratio axis is exactly antisymmetric, unlike linspace
    center = resolution // 2
    axis = (np.arange(resolution) - center) / center
    c1, c2, c3 = np.meshgrid(axis, axis, axis, indexing="ij")
    physical = spectrum_min_arrays(num_qubits, c1, c2, c3) >= PHYSICALITY_FLOOR
    values = np.full(c1.shape, np.nan)
    values[physical] = discord_value_arrays(
        num_qubits, c1[physical], c2[physical], c3[physical]
    )
    return ScalarField(num_qubits, resolution, values, axis)


def extract_isosurface(field: ScalarField, level: float) -> TriangleMesh:
    """Marching-cubes surface of {discord = level}, clipped to the physical
    region (cells touching a NaN corner are skipped).  An empty mesh is a
    valid result."""
    level = float(level)
    if level <= 0.0:
        raise ValueError(f"level must be positive, got {level}")
    finite = np.isfinite(field.values)
    if not finite.any():
        return _empty_mesh()
    vmax = np.nanmax(field.values)
    vmin = np.nanmin(field.values)
    if not (vmin < level < vmax):
        return _empty_mesh()
    # a cube is good only when all 8 of its corners are physical
    good_cube = finite[:-1, :-1, :-1].copy()
    for di in (0, 1):
        for dj in (0, 1):
            for dk in (0, 1):
                if di or dj or dk:
                    r = field.resolution - 1
                    good_cube &= finite[di : di + r, dj : dj + r, dk : dk + r]
    # skimage tests mask at a cube's high corner (i+1, j+1, k+1), so the
    # per-cube predicate is carried on that anchor
    anchor_mask = np.zeros_like(finite)
    anchor_mask[1:, 1:, 1:] = good_cube
    # sentinel keeps NaN out of skimage; masked cubes are never interpolated
    volume = np.where(finite, field.values, -1.0)
    try:
        verts, faces, _, _ = _sk_measure.marching_cubes(
            volume, level=level, mask=anchor_mask
        )
    except (ValueError, RuntimeError):
        return _empty_mesh()
    verts = _reinterpolate_edges(field.values, level, verts.astype(float))
    verts = field.axis[0] + field.spacing * verts
    return TriangleMesh(verts, faces.astype(int))


def _reinterpolate_edges(values, level, verts):
    """Recompute vertex positions on their grid edges in float64.

    skimage interpolates in float32; redoing the linear edge interpolation
    against the float64 field keeps symmetric fields symmetric to well
    below 1e-9.  `verts` is in grid index coordinates.
    """
    if len(verts) == 0:
        return verts
    top = values.shape[0] - 1
    nearest = np.rint(verts)
    frac = np.abs(verts - nearest)
    rows = np.arange(len(verts))
    axis = np.argmax(frac, axis=1)
    on_grid = frac[rows, axis] < 1e-4

    low = np.clip(np.floor(verts[rows, axis]).astype(int), 0, top - 1)
    idx0 = np.clip(nearest.astype(int), 0, top)
    idx1 = idx0.copy()
    idx0[rows, axis] = low
    idx1[rows, axis] = low + 1
    f0 = values[idx0[:, 0], idx0[:, 1], idx0[:, 2]]
    f1 = values[idx1[:, 0], idx1[:, 1], idx1[:, 2]]
    span = f1 - f0
    safe = np.abs(span) > 0.0
    t = np.clip(np.where(safe, (level - f0) / np.where(safe, span, 1.0), 0.5), 0.0, 1.0)

    refined = nearest.copy()
    refined[rows, axis] = low + t
    refined[on_grid] = nearest[on_grid]
    return refined


def mesh_area(mesh: TriangleMesh) -> float:
    """Total surface area of the triangles."""
    if mesh.is_empty or len(mesh.triangles) == 0:
        return 0.0
    tri = mesh.vertices[mesh.triangles]
    cross = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    return float(0.5 * np.linalg.norm(cross, axis=1).sum())


def export_mesh(mesh: TriangleMesh, fmt: str, path) -> None:
    """Write a mesh as OBJ (`v`/`f` lines, 1-based) or CSV
    (`x,y,z,triangle_id`, three rows per triangle).  Output is bit-exact
    across runs for identical inputs."""
    fmt = fmt.lower()
    if fmt not in ("obj", "csv"):
        raise ValueError(f"format must be 'obj' or 'csv', got {fmt!r}")
    with open(path, "w", newline="\n") as fh:
        if fmt == "obj":
            for x, y, z in mesh.vertices:
                fh.write(f"v {x:.17g} {y:.17g} {z:.17g}\n")
            for i, j, k in mesh.triangles:
                fh.write(f"f {i + 1} {j + 1} {k + 1}\n")
        else:
            fh.write("x,y,z,triangle_id\n")
            for tri_id, tri in enumerate(mesh.triangles):
                for idx in tri:
                    x, y, z = mesh.vertices[idx]
                    fh.write(f"{x:.17g},{y:.17g},{z:.17g},{tri_id}\n")


def read_obj(path) -> TriangleMesh:
    """Parse an OBJ file written by export_mesh."""
    vertices = []
    triangles = []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                vertices.append([float(p) for p in parts[1:4]])
            elif parts[0] == "f":
                triangles.append([int(p) - 1 for p in parts[1:4]])
    vertices = np.array(vertices, dtype=float).reshape(-1, 3)
    triangles = np.array(triangles, dtype=int).reshape(-1, 3)
    return TriangleMesh(vertices, triangles)

"""Raster ground truth: occupancy masks, clearance fields, and oracles.

Everything here is deliberately independent of the analytic rolling
machinery: verdicts come from brute pixel arithmetic on a padded grid, so
they can referee the exact methods.  Costs scale with (extent / cell)^2;
keep resolutions proportional to the disk radius.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ResolutionTooCoarse
from .geometry import Point, min_distances, winding_numbers
from .loop import Loop

# finest feature a valid loop can have is the radius r; a 20th of that
# resolves every fillet with room to spare
MAX_CELL_FACTOR = 1.0 / 20.0


@dataclass
class GridMask:
    """Boolean occupancy raster over a padded bounding box.

    Cell (iy, ix) is centered at origin + (ix * cell, iy * cell); arrays
    are indexed row-major as [iy, ix].
    """
    origin: Point
    cell: float
    inside: np.ndarray
    boundary: np.ndarray

    @property
    def shape(self) -> tuple:
        return self.inside.shape

    def cell_centers(self) -> np.ndarray:
        ny, nx = self.inside.shape
        xs = self.origin.x + self.cell * np.arange(nx)
        ys = self.origin.y + self.cell * np.arange(ny)
        gx, gy = np.meshgrid(xs, ys)
        return np.column_stack([gx.ravel(), gy.ravel()])

    def index_of(self, p: Point) -> tuple:
        ix = int(round((p.x - self.origin.x) / self.cell))
        iy = int(round((p.y - self.origin.y) / self.cell))
        ny, nx = self.inside.shape
        return (min(max(iy, 0), ny - 1), min(max(ix, 0), nx - 1))


@dataclass
class ClearanceField:
    """Distance (length units) from each cell center to the boundary band."""
    mask: GridMask
    dist: np.ndarray

    def at(self, p: Point) -> float:
        iy, ix = self.mask.index_of(p)
        return float(self.dist[iy, ix])


def rasterize(loop: Loop, resolution: float, pad: float = None) -> GridMask:
    """Sample the loop onto a grid of square cells of the given size.

    The grid covers the loop's bounding box padded by at least 2r (more
    if requested), so offset disks on either side stay on the grid.
    Raises ResolutionTooCoarse when cells are wider than r / 20.
    """
    r = loop.radius
    if resolution > r * MAX_CELL_FACTOR * (1 + 1e-12):
        raise ResolutionTooCoarse(
            f"cell {resolution} exceeds r/20 = {r * MAX_CELL_FACTOR}")
    if resolution <= 0.0:
        raise ResolutionTooCoarse("cell size must be positive")
    cell = float(resolution)
    if pad is None:
        pad = 2.0 * r
    pad = max(pad, 2.0 * r) + 2.0 * cell
    x0, y0, x1, y1 = loop.bbox()
    # dither the origin by irrational cell fractions so axis-aligned
    # boundary features never coincide with a row of cell centers
    ox = x0 - pad + cell * 0.2071067811865476
    oy = y0 - pad + cell * 0.3660254037844386
    nx = int(math.ceil((x1 + pad - ox) / cell)) + 1
    ny = int(math.ceil((y1 + pad - oy) / cell)) + 1
    mask = GridMask(Point(ox, oy), cell,
                    np.zeros((ny, nx), dtype=bool),
                    np.zeros((ny, nx), dtype=bool))
    pts = mask.cell_centers()
    dists = min_distances(pts, loop.pieces)
    half_diag = cell * math.sqrt(0.5)
    boundary = dists <= half_diag
    mask.boundary = boundary.reshape(ny, nx)
    # winding is ambiguous right on the chain; resolve only clear cells
    inside = np.zeros(len(pts), dtype=bool)
    clear = dists > 1e-6 * cell
    if clear.any():
        wn = winding_numbers(pts[clear], loop.pieces)
        inside[clear] = wn == -1
    mask.inside = inside.reshape(ny, nx)
    return mask


def distance_transform(mask: GridMask) -> ClearanceField:
    """Euclidean distance from every cell to the nearest boundary cell."""
    dist = ndimage.distance_transform_edt(~mask.boundary,
                                          sampling=mask.cell)
    return ClearanceField(mask, dist.astype(float))


def _side_name(side) -> str:
    return getattr(side, "value", side)


def _side_region(mask: GridMask, side) -> np.ndarray:
    if _side_name(side) == "internal":
        return mask.inside & ~mask.boundary
    return ~mask.inside & ~mask.boundary


def oracle_rolling(loop: Loop, side: str, resolution: float,
                   pad: float = None) -> tuple:
    """Brute-force rolling verdict: (ok, failure_params).

    For boundary samples at arc-length spacing <= resolution, offset the
    sample by r along the side's normal and require the landing cell to
    be on the right side with clearance at least r minus two cells.
    """
    r = loop.radius
    fld = distance_transform(rasterize(loop, resolution, pad=pad))
    mask = fld.mask
    region = _side_region(mask, side)
    n = max(64, int(math.ceil(loop.length / resolution)))
    ts = np.linspace(0.0, loop.length, n, endpoint=False)
    pts = loop.points_at(ts)
    tans = loop.tangents_at(ts)
    normals = np.column_stack([tans[:, 1], -tans[:, 0]])  # inward
    if _side_name(side) != "internal":
        normals = -normals
    centers = pts + normals * r
    slack = 2.0 * mask.cell
    failures = []
    for t, c in zip(ts, centers):
        iy, ix = mask.index_of(Point(c[0], c[1]))
        near_boundary = mask.boundary[iy, ix]
        ok_side = region[iy, ix] or near_boundary
        if not ok_side or fld.dist[iy, ix] < r - slack:
            failures.append(float(t))
    return (len(failures) == 0, failures)


def opening_components(loop: Loop, side: str, resolution: float,
                       pad: float = None, with_grid: bool = False):
    """Connected components of the side region opened by a radius-r disk.

    Erode (keep cells with clearance >= r minus a two-cell slack, the
    same slack the rolling oracle uses), dilate back by r, intersect with
    the side region, and label 4-connected components.  Returns boolean
    cell masks sorted by descending area; with_grid additionally returns
    the GridMask and ClearanceField used.  Passages within two cells of
    the exact 2r threshold need a finer grid to resolve.
    """
    r = loop.radius
    fld = distance_transform(rasterize(loop, resolution, pad=pad))
    mask = fld.mask
    region = _side_region(mask, side)
    eroded = region & (fld.dist >= r - 2.0 * mask.cell)
    if not eroded.any():
        return ([], mask, fld) if with_grid else []
    # dilation by r: distance to the eroded set
    back = ndimage.distance_transform_edt(~eroded, sampling=mask.cell)
    opened = region & (back <= r + mask.cell)
    labels, n = ndimage.label(opened,
                              structure=[[0, 1, 0], [1, 1, 1], [0, 1, 0]])
    comps = []
    for k in range(1, n + 1):
        comp = labels == k
        if not (comp & eroded).any():
            continue  # sliver not reachable by any disk position
        comps.append(comp)
    comps.sort(key=lambda m: -int(m.sum()))
    return (comps, mask, fld) if with_grid else comps


def component_areas(comps: list, cell: float) -> list:
    """Areas (length-squared units) of component masks."""
    return [float(m.sum()) * cell * cell for m in comps]


def write_pgm(path: str, array: np.ndarray) -> None:
    """Dump a boolean or float array as a portable graymap for inspection."""
    a = np.asarray(array, dtype=float)
    if a.max() > a.min():
        a = (a - a.min()) / (a.max() - a.min())
    img = (a * 255).astype(np.uint8)[::-1]  # north up
    with open(path, "wb") as fh:
        fh.write(f"P5 {img.shape[1]} {img.shape[0]} 255\n".encode())
        fh.write(img.tobytes())

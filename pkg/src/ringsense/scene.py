"""Synthetic scene-intensity grids over direction cosines.

A scene is a non-negative reflectivity map ``I(l, m)`` sampled on a uniform
grid.  Columns run along ``l`` and rows along ``m``; the grid point at index
``n // 2`` on each axis sits exactly at zero so that a point source at the
origin lands on a single pixel.

Shapes are rasterized by pixel-center inclusion (no anti-aliasing) and
summed additively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ShapeError

SPEED_OF_LIGHT = 299_792_458.0

DEFAULT_GRID = 256
DEFAULT_EXTENT = 0.25
BACKGROUND_AMPLITUDE = 1.0
TARGET_AMPLITUDE = 3.0

# Gun silhouette as fractions of its bounding box (origin lower-left, l right,
# m up): a barrel strip along the long axis and a grip foot along the short one.
GUN_OUTLINE = (
    (0.0, 0.0),
    (1.0, 0.0),
    (1.0, 0.35),
    (0.4, 0.35),
    (0.4, 1.0),
    (0.0, 1.0),
)
GUN_SIZE_M = (0.164, 0.235)


def centered_axis(n: int, half_extent: float) -> np.ndarray:
    """Uniform axis of ``n`` points spanning ``[-half_extent, half_extent)``."""
    step = 2.0 * half_extent / n
    return (np.arange(n) - n // 2) * step


@dataclass(frozen=True)
class GeometryContext:
    range_m: float = 1.83
    frequency: float = 75e9

    def __post_init__(self):
        if not (self.range_m > 0 and math.isfinite(self.range_m)):
            raise DomainError(f"range must be positive, got {self.range_m}")
        if not (self.frequency > 0 and math.isfinite(self.frequency)):
            raise DomainError(f"frequency must be positive, got {self.frequency}")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.frequency


@dataclass(frozen=True)
class SceneIntensity:
    values: np.ndarray
    l_axis: np.ndarray
    m_axis: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape != (len(self.m_axis), len(self.l_axis)):
            raise ShapeError(
                f"values shape {values.shape} does not match axes "
                f"({len(self.m_axis)}, {len(self.l_axis)})"
            )
        if not np.all(np.isfinite(values)):
            raise DomainError("scene values must be finite")
        if np.any(values < 0):
            raise DomainError("scene values must be non-negative")
        for name, axis in (("l", self.l_axis), ("m", self.m_axis)):
            _check_axis(name, axis)
        object.__setattr__(self, "values", values)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    @property
    def dl(self) -> float:
        return float(self.l_axis[1] - self.l_axis[0])

    @property
    def dm(self) -> float:
        return float(self.m_axis[1] - self.m_axis[0])

    def total_intensity(self) -> float:
        return float(self.values.sum() * self.dl * self.dm)


def _check_axis(name, axis):
    axis = np.asarray(axis, dtype=float)
    if axis.ndim != 1 or len(axis) < 2:
        raise ShapeError(f"{name} axis needs at least 2 points")
    steps = np.diff(axis)
    if np.any(steps <= 0):
        raise DomainError(f"{name} axis must be strictly increasing")
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
        raise DomainError(f"{name} axis must be uniformly spaced")
    if np.any(np.abs(axis) > 1.0):
        raise DomainError(f"{name} axis leaves the direction-cosine range [-1, 1]")


@dataclass(frozen=True)
class ShapeSpec:
    """One additive scene element.

    ``kind`` is ``"point"``, ``"rectangle"`` or ``"polygon"``.  Points use
    ``center``; rectangles use ``center`` and ``size`` (width along l, height
    along m); polygons use ``vertices`` and rotate about ``center`` when given,
    otherwise about their area centroid.  ``rotation`` is counter-clockwise in
    radians.
    """

    kind: str
    amplitude: float = 1.0
    center: tuple | None = None
    size: tuple | None = None
    vertices: tuple | None = None
    rotation: float = 0.0

    def __post_init__(self):
        if self.kind not in ("point", "rectangle", "polygon"):
            raise ShapeError(f"unknown shape kind {self.kind!r}")
        if not (math.isfinite(self.amplitude) and self.amplitude > 0):
            raise ShapeError(f"amplitude must be finite and positive, got {self.amplitude}")
        if not math.isfinite(self.rotation):
            raise ShapeError("rotation must be finite")
        if self.kind in ("point", "rectangle"):
            if self.center is None or len(self.center) != 2:
                raise ShapeError(f"{self.kind} needs a 2-element center")
            object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        if self.kind == "rectangle":
            if self.size is None or len(self.size) != 2 or min(self.size) <= 0:
                raise ShapeError("rectangle needs a positive (width, height) size")
            object.__setattr__(self, "size", (float(self.size[0]), float(self.size[1])))
        if self.kind == "polygon":
            if self.vertices is None or len(self.vertices) < 3:
                raise ShapeError("polygon needs at least 3 vertices")
            verts = tuple((float(x), float(y)) for x, y in self.vertices)
            object.__setattr__(self, "vertices", verts)
            _validate_polygon(np.array(verts))
            if self.center is not None:
                object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    def outline(self) -> np.ndarray:
        """Rotated polygon vertices, shape (n, 2); rectangles become 4-gons."""
        if self.kind == "point":
            raise ShapeError("points have no outline")
        if self.kind == "rectangle":
            w, h = self.size
            base = np.array([[-w / 2, -h / 2], [w / 2, -h / 2], [w / 2, h / 2], [-w / 2, h / 2]])
            pivot = np.array(self.center)
            base = base + pivot
        else:
            base = np.array(self.vertices)
            pivot = np.array(self.center) if self.center is not None else polygon_centroid(base)
        if self.rotation == 0.0:
            return base
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        rot = np.array([[c, -s], [s, c]])
        return (base - pivot) @ rot.T + pivot

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "amplitude": self.amplitude, "rotation": self.rotation}
        for key in ("center", "size", "vertices"):
            value = getattr(self, key)
            if value is not None:
                out[key] = [list(v) for v in value] if key == "vertices" else list(value)
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "ShapeSpec":
        known = {"kind", "amplitude", "center", "size", "vertices", "rotation"}
        extra = set(d) - known
        if extra:
            raise ShapeError(f"unknown shape fields {sorted(extra)}")
        kw = dict(d)
        for key in ("center", "size"):
            if kw.get(key) is not None:
                kw[key] = tuple(kw[key])
        if kw.get("vertices") is not None:
            kw["vertices"] = tuple(tuple(v) for v in kw["vertices"])
        return cls(**kw)


def polygon_area(verts: np.ndarray) -> float:
    x, y = verts[:, 0], verts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def polygon_centroid(verts: np.ndarray) -> np.ndarray:
    x, y = verts[:, 0], verts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = cross.sum() / 2.0
    cx = ((x + xn) * cross).sum() / (6.0 * area)
    cy = ((y + yn) * cross).sum() / (6.0 * area)
    return np.array([cx, cy])


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return 0 if abs(v) < 1e-15 else (1 if v > 0 else -1)

    def on_segment(a, b, c):
        return (min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= c[1] <= max(a[1], b[1]))

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    if o1 != o2 and o3 != o4:
        return True
    return ((o1 == 0 and on_segment(p1, p2, q1)) or (o2 == 0 and on_segment(p1, p2, q2))
            or (o3 == 0 and on_segment(q1, q2, p1)) or (o4 == 0 and on_segment(q1, q2, p2)))


def _validate_polygon(verts: np.ndarray):
    if not np.all(np.isfinite(verts)):
        raise ShapeError("polygon vertices must be finite")
    if abs(polygon_area(verts)) < 1e-15:
        raise ShapeError("degenerate polygon (zero area)")
    n = len(verts)
    for i in range(n):
        a1, a2 = verts[i], verts[(i + 1) % n]
        for j in range(i + 1, n):
            # adjacent edges share a vertex by construction
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if _segments_cross(a1, a2, verts[j], verts[(j + 1) % n]):
                raise ShapeError(f"polygon edges {i} and {j} intersect")


def points_in_polygon(px: np.ndarray, py: np.ndarray, verts: np.ndarray) -> np.ndarray:
    """Even-odd crossing test for each point ``(px[i], py[i])``."""
    inside = np.zeros(px.shape, dtype=bool)
    n = len(verts)
    for i in range(n):
        x1, y1 = verts[i]
        x2, y2 = verts[(i + 1) % n]
        if y1 == y2:
            continue
        straddles = (y1 > py) != (y2 > py)
        x_cross = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
        inside ^= straddles & (px < x_cross)
    return inside


def rasterize(shape: ShapeSpec, l_axis: np.ndarray, m_axis: np.ndarray) -> np.ndarray:
    """Coverage of one shape, scaled by its amplitude."""
    out = np.zeros((len(m_axis), len(l_axis)))
    dl = l_axis[1] - l_axis[0]
    dm = m_axis[1] - m_axis[0]
    if shape.kind == "point":
        l, m = shape.center
        if abs(l) > 1 or abs(m) > 1:
            raise DomainError(f"point at ({l}, {m}) lies outside direction-cosine space")
        j = int(round((l - l_axis[0]) / dl))
        i = int(round((m - m_axis[0]) / dm))
        if 0 <= i < len(m_axis) and 0 <= j < len(l_axis):
            out[i, j] = shape.amplitude
        return out

    verts = shape.outline()
    if np.any(np.abs(verts) > 1.0):
        raise DomainError("shape extends outside direction-cosine space")
    # restrict the test to the bounding box
    j0 = max(int(np.searchsorted(l_axis, verts[:, 0].min())) - 1, 0)
    j1 = min(int(np.searchsorted(l_axis, verts[:, 0].max())) + 1, len(l_axis))
    i0 = max(int(np.searchsorted(m_axis, verts[:, 1].min())) - 1, 0)
    i1 = min(int(np.searchsorted(m_axis, verts[:, 1].max())) + 1, len(m_axis))
    if j0 >= j1 or i0 >= i1:
        return out
    px, py = np.meshgrid(l_axis[j0:j1], m_axis[i0:i1])
    out[i0:i1, j0:j1] = points_in_polygon(px, py, verts) * shape.amplitude
    return out


def make_scene(rows: int = DEFAULT_GRID, cols: int = DEFAULT_GRID,
               l_extent: float = DEFAULT_EXTENT, m_extent: float = DEFAULT_EXTENT,
               shapes=()) -> SceneIntensity:
    """Rasterize ``shapes`` onto a ``rows x cols`` grid.

    ``l_extent`` and ``m_extent`` are half-widths: the grid covers
    ``[-l_extent, l_extent)`` by ``[-m_extent, m_extent)``.
    """
    if rows < 2 or cols < 2:
        raise ShapeError(f"grid must be at least 2x2, got {rows}x{cols}")
    for name, ext in (("l_extent", l_extent), ("m_extent", m_extent)):
        if not (0 < ext <= 1):
            raise DomainError(f"{name} must lie in (0, 1], got {ext}")
    l_axis = centered_axis(cols, l_extent)
    m_axis = centered_axis(rows, m_extent)
    values = np.zeros((rows, cols))
    for shape in shapes:
        values += rasterize(shape, l_axis, m_axis)
    return SceneIntensity(values, l_axis, m_axis)


def physical_to_direction_cosine(size_m: float, ctx: GeometryContext) -> float:
    """Angular extent of an object of ``size_m`` seen from ``ctx.range_m``."""
    if not math.isfinite(size_m) or size_m < 0:
        raise DomainError(f"size must be a non-negative length, got {size_m}")
    return math.sin(math.atan(size_m / ctx.range_m))


def gun_outline(ctx: GeometryContext, center=(0.0, 0.0)) -> np.ndarray:
    """Unrotated gun polygon with its bounding box centred on ``center``."""
    w = physical_to_direction_cosine(GUN_SIZE_M[0], ctx)
    h = physical_to_direction_cosine(GUN_SIZE_M[1], ctx)
    frac = np.array(GUN_OUTLINE)
    return (frac - 0.5) * np.array([w, h]) + np.asarray(center, dtype=float)


def gun_shape(ctx: GeometryContext, orientation: float = 0.0, center=(0.0, 0.0),
              amplitude: float = TARGET_AMPLITUDE) -> ShapeSpec:
    verts = gun_outline(ctx, center)
    return ShapeSpec("polygon", amplitude=amplitude, vertices=tuple(map(tuple, verts)),
                     center=tuple(center), rotation=orientation)


def gun_shape_scene(ctx: GeometryContext | None = None, orientation: float = 0.0,
                    rows: int = DEFAULT_GRID, cols: int = DEFAULT_GRID,
                    extent: float = DEFAULT_EXTENT,
                    amplitude: float = TARGET_AMPLITUDE) -> SceneIntensity:
    ctx = ctx or GeometryContext()
    shape = gun_shape(ctx, orientation, amplitude=amplitude)
    return make_scene(rows, cols, extent, extent, [shape])


def ellipse_polygon(center, semi_axes, n: int = 64, rotation: float = 0.0) -> tuple:
    t = 2 * np.pi * np.arange(n) / n
    x = semi_axes[0] * np.cos(t)
    y = semi_axes[1] * np.sin(t)
    c, s = math.cos(rotation), math.sin(rotation)
    return tuple((center[0] + c * a - s * b, center[1] + s * a + c * b) for a, b in zip(x, y))

"""Ground-elevation rasters: text-format loading, procedural generation, bilinear sampling."""

import math

import numpy as np

__all__ = [
    "TerrainError",
    "OutOfBoundsError",
    "TerrainGrid",
    "load_terrain",
    "generate_terrain",
]

_HEADER_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize")


class TerrainError(ValueError):
    """Malformed terrain data or parameters."""


class OutOfBoundsError(TerrainError):
    """Sample query outside the grid footprint."""


class TerrainGrid:
    """Regular grid of ground elevations with bilinear sampling.

    Elevations are point samples on a node lattice: node (i, j) sits at
    (origin_x + j * cellsize, origin_y + i * cellsize), with row index i
    increasing northward. The text format stores the northernmost row first,
    matching common ASCII raster layouts. Instances are immutable after
    construction and safe for unsynchronized concurrent reads.

    Parameters
    ----------
    ncols, nrows : int
        Lattice dimensions, both at least 2.
    origin_x, origin_y : float
        World coordinates of the southwest node, meters.
    cellsize : float
        Node spacing in meters, strictly positive.
    elevations : array-like
        Row-major elevations of length ncols * nrows, southernmost row first.
    """

    def __init__(self, ncols, nrows, origin_x, origin_y, cellsize, elevations):
        ncols = int(ncols)
        nrows = int(nrows)
        if ncols < 2 or nrows < 2:
            raise TerrainError(f"grid must be at least 2x2, got {ncols}x{nrows}")
        cellsize = float(cellsize)
        if not cellsize > 0.0:
            raise TerrainError(f"cellsize must be positive, got {cellsize}")
        data = np.asarray(elevations, dtype=float)
        if data.size != ncols * nrows:
            raise TerrainError(
                f"expected {ncols * nrows} elevations, got {data.size}"
            )
        if not np.isfinite(data).all():
            raise TerrainError("elevations must all be finite")
        data = data.reshape(nrows, ncols).copy()
        data.flags.writeable = False
        self.ncols = ncols
        self.nrows = nrows
        self.origin_x = float(origin_x)
        self.origin_y = float(origin_y)
        self.cellsize = cellsize
        self._data = data

    @property
    def heights(self):
        """Read-only (nrows, ncols) elevation array, row 0 southernmost."""
        return self._data

    @property
    def elevations(self):
        """Flat row-major copy of the elevations, southernmost row first."""
        return self._data.ravel().copy()

    @property
    def footprint(self):
        """(xmin, ymin, xmax, ymax) spanned by the node lattice."""
        return (
            self.origin_x,
            self.origin_y,
            self.origin_x + (self.ncols - 1) * self.cellsize,
            self.origin_y + (self.nrows - 1) * self.cellsize,
        )

    @property
    def min_elevation(self):
        return float(self._data.min())

    @property
    def max_elevation(self):
        return float(self._data.max())

    def contains(self, x, y):
        """True where (x, y) lies inside the footprint. Accepts scalars or arrays."""
        tx = (np.asarray(x, dtype=float) - self.origin_x) / self.cellsize
        ty = (np.asarray(y, dtype=float) - self.origin_y) / self.cellsize
        ok = (tx >= 0.0) & (tx <= self.ncols - 1) & (ty >= 0.0) & (ty <= self.nrows - 1)
        if ok.ndim == 0:
            return bool(ok)
        return ok

    def sample(self, x, y):
        """Bilinear elevation at world coordinates, vectorized over inputs.

        Raises OutOfBoundsError if any query point leaves the footprint.
        Values at lattice nodes reproduce the stored elevations exactly.
        """
        tx = (np.asarray(x, dtype=float) - self.origin_x) / self.cellsize
        ty = (np.asarray(y, dtype=float) - self.origin_y) / self.cellsize
        inside = (tx >= 0.0) & (tx <= self.ncols - 1) & (ty >= 0.0) & (ty <= self.nrows - 1)
        if not np.all(inside):
            raise OutOfBoundsError("sample point outside terrain footprint")
        j0 = np.minimum(np.floor(tx).astype(np.int64), self.ncols - 2)
        i0 = np.minimum(np.floor(ty).astype(np.int64), self.nrows - 2)
        fx = tx - j0
        fy = ty - i0
        d = self._data
        z00 = d[i0, j0]
        z01 = d[i0, j0 + 1]
        z10 = d[i0 + 1, j0]
        z11 = d[i0 + 1, j0 + 1]
        return (z00 * (1.0 - fx) + z01 * fx) * (1.0 - fy) + (z10 * (1.0 - fx) + z11 * fx) * fy

    def elevation_at(self, x, y):
        """Bilinear elevation at a single point, in meters."""
        return float(self.sample(x, y))

    def serialize(self):
        """Render the grid in the text format accepted by load_terrain."""
        lines = [
            f"ncols {self.ncols}",
            f"nrows {self.nrows}",
            f"xllcorner {self.origin_x!r}",
            f"yllcorner {self.origin_y!r}",
            f"cellsize {self.cellsize!r}",
        ]
        for i in range(self.nrows - 1, -1, -1):
            lines.append(" ".join(repr(float(v)) for v in self._data[i]))
        return "\n".join(lines) + "\n"

    def __eq__(self, other):
        if not isinstance(other, TerrainGrid):
            return NotImplemented
        return (
            self.ncols == other.ncols
            and self.nrows == other.nrows
            and self.origin_x == other.origin_x
            and self.origin_y == other.origin_y
            and self.cellsize == other.cellsize
            and np.array_equal(self._data, other._data)
        )

    def __repr__(self):
        return (
            f"TerrainGrid({self.ncols}x{self.nrows}, cellsize={self.cellsize}, "
            f"origin=({self.origin_x}, {self.origin_y}))"
        )


def _parse_header_line(lines, index, key):
    if index >= len(lines):
        raise TerrainError(f"line {index + 1}: missing '{key}' header line")
    parts = lines[index].split()
    if len(parts) != 2 or parts[0] != key:
        raise TerrainError(f"line {index + 1}: expected '{key} <value>', got {lines[index]!r}")
    try:
        value = float(parts[1])
    except ValueError:
        raise TerrainError(f"line {index + 1}: non-numeric value {parts[1]!r}") from None
    return value


def load_terrain(text):
    """Parse grid-file contents into a TerrainGrid.

    Format: five header lines (ncols, nrows, xllcorner, yllcorner, cellsize)
    followed by nrows lines of ncols space-separated elevations, northernmost
    row first. Errors name the offending line number.
    """
    lines = text.splitlines()
    values = {}
    for idx, key in enumerate(_HEADER_KEYS):
        values[key] = _parse_header_line(lines, idx, key)
    for key in ("ncols", "nrows"):
        if values[key] != int(values[key]):
            raise TerrainError(f"{key} must be an integer, got {values[key]}")
    ncols = int(values["ncols"])
    nrows = int(values["nrows"])
    if ncols < 2 or nrows < 2:
        raise TerrainError(f"grid must be at least 2x2, got {ncols}x{nrows}")

    rows = []
    row_lines = lines[len(_HEADER_KEYS):]
    consumed = 0
    for offset, line in enumerate(row_lines):
        lineno = len(_HEADER_KEYS) + offset + 1
        tokens = line.split()
        if not tokens:
            continue  # blank trailing lines are tolerated
        if len(rows) == nrows:
            raise TerrainError(f"line {lineno}: extra data row beyond declared nrows={nrows}")
        if len(tokens) != ncols:
            raise TerrainError(
                f"line {lineno}: expected {ncols} values, got {len(tokens)}"
            )
        try:
            row = [float(t) for t in tokens]
        except ValueError:
            bad = next(t for t in tokens if not _is_float(t))
            raise TerrainError(f"line {lineno}: non-numeric cell {bad!r}") from None
        if not all(math.isfinite(v) for v in row):
            raise TerrainError(f"line {lineno}: non-finite elevation")
        rows.append(row)
        consumed = lineno
    if len(rows) != nrows:
        raise TerrainError(
            f"line {consumed + 1 if rows else len(_HEADER_KEYS) + 1}: "
            f"expected {nrows} data rows, found {len(rows)}"
        )
    # File stores the top (northern) row first; storage is south-first.
    data = np.asarray(rows[::-1], dtype=float)
    return TerrainGrid(
        ncols,
        nrows,
        values["xllcorner"],
        values["yllcorner"],
        values["cellsize"],
        data.ravel(),
    )


def _is_float(token):
    try:
        float(token)
    except ValueError:
        return False
    return True


def generate_terrain(width, height, cellsize, roughness, seed):
    """Deterministic synthetic terrain built from seeded low-frequency harmonics.

    width and height count lattice nodes (both at least 2); roughness in
    [0, 1] scales the relief amplitude, with 0 producing a perfectly flat
    grid. Identical arguments always yield bit-identical grids.
    """
    width = int(width)
    height = int(height)
    if width < 2 or height < 2:
        raise TerrainError(f"width and height must be at least 2, got {width}x{height}")
    cellsize = float(cellsize)
    if not cellsize > 0.0:
        raise TerrainError(f"cellsize must be positive, got {cellsize}")
    roughness = float(roughness)
    if not 0.0 <= roughness <= 1.0:
        raise TerrainError(f"roughness must lie in [0, 1], got {roughness}")

    rng = np.random.default_rng(int(seed))
    n_harmonics = 8
    extent = max(width - 1, height - 1) * cellsize
    wavelengths = extent * rng.uniform(0.35, 1.2, n_harmonics)
    azimuths = rng.uniform(0.0, 2.0 * math.pi, n_harmonics)
    phases = rng.uniform(0.0, 2.0 * math.pi, n_harmonics)
    # Full roughness gives a relief standard deviation of roughly 18 m.
    amplitudes = 36.0 * roughness * rng.uniform(0.4, 1.0, n_harmonics) / math.sqrt(n_harmonics)

    xs = np.arange(width) * cellsize
    ys = np.arange(height) * cellsize
    gx, gy = np.meshgrid(xs, ys)
    z = np.zeros((height, width))
    for k in range(n_harmonics):
        wave = 2.0 * math.pi / wavelengths[k]
        proj = gx * math.cos(azimuths[k]) + gy * math.sin(azimuths[k])
        z += amplitudes[k] * np.sin(wave * proj + phases[k])
    return TerrainGrid(width, height, 0.0, 0.0, cellsize, z.ravel())

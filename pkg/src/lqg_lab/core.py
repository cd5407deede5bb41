"""Shared primitives: lattices, cadlag paths, RNG streams and serialization."""

from __future__ import annotations

import enum
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

PATH_MAGIC = "# lqg-lab path v1"
JUMP_MARKER = "--- jumps"
DEFAULT_JUMP_FLOOR = 1e-6


class ParseError(ValueError):
    """Raised when a serialized object cannot be decoded."""


class Topology(str, enum.Enum):
    BOX_DIRICHLET = "box-dirichlet"
    TORUS = "torus"
    CYLINDER = "cylinder"
    BOX_FREE = "box-free"

    @property
    def code(self) -> int:
        return list(Topology).index(self)

    @classmethod
    def from_code(cls, code: int) -> "Topology":
        return list(cls)[code]


SPECTRAL_TOPOLOGIES = (Topology.TORUS, Topology.BOX_DIRICHLET, Topology.CYLINDER)


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Square (or, for cylinders, rectangular) lattice.

    Parameters
    ----------
    size : int
        Cells per side. For a cylinder this is the number of cells around
        the circumference.
    spacing : float
        Lattice spacing ``a``.
    topology : Topology
        Boundary topology.
    rows : int, optional
        Number of rows. Defaults to ``size``; only cylinders may differ.
    """

    size: int
    spacing: float
    topology: Topology = Topology.TORUS
    rows: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "topology", Topology(self.topology))
        if self.rows is None:
            object.__setattr__(self, "rows", int(self.size))
        if int(self.size) != self.size or self.size < 8:
            raise ValueError(f"grid size must be an integer >= 8, got {self.size}")
        if not np.isfinite(self.spacing) or self.spacing <= 0:
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        if self.rows != self.size and self.topology is not Topology.CYLINDER:
            raise ValueError("only cylinder grids may be rectangular")
        if self.rows < 8:
            raise ValueError("rows must be >= 8")
        if self.topology in SPECTRAL_TOPOLOGIES and not _is_pow2(self.size):
            raise ValueError(
                f"topology {self.topology.value} uses spectral synthesis and "
                f"needs a power-of-two size, got {self.size}")

    @property
    def shape(self) -> tuple[int, int]:
        return (int(self.rows), int(self.size))

    @property
    def extent(self) -> tuple[float, float]:
        """Physical (height, width)."""
        return (self.rows * self.spacing, self.size * self.spacing)

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        """Cell-center coordinates ``(x, y)`` with the origin at cell (0, 0)."""
        a = self.spacing
        y = np.arange(self.rows) * a
        x = np.arange(self.size) * a
        return np.meshgrid(x, y)

    @property
    def center(self) -> tuple[float, float]:
        """Physical coordinates of the central lattice point."""
        return (self.size // 2 * self.spacing, self.rows // 2 * self.spacing)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CadlagPath:
    """Right-continuous path on a uniform grid with an explicit jump ledger.

    ``values[i]`` is the path at time ``t0 + i*dt``. Each ledger entry
    ``(time, size)`` is a jump that landed in the grid cell ending at
    ``time``; ``time`` is therefore a grid time.
    """

    t0: float
    dt: float
    values: np.ndarray
    jumps: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    alpha: float = 1.5
    terminal: Optional[float] = None

    def __post_init__(self):
        vals = _readonly(np.ravel(self.values))
        jumps = _readonly(np.reshape(np.asarray(self.jumps, dtype=float), (-1, 2)))
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "jumps", jumps)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "alpha", float(self.alpha))
        if self.terminal is not None:
            object.__setattr__(self, "terminal", float(self.terminal))
        if not (self.dt > 0 and np.isfinite(self.dt)):
            raise ValueError("dt must be positive")
        if vals.size == 0:
            raise ValueError("path needs at least one sample")
        if not np.all(np.isfinite(vals)):
            raise ValueError("path values must be finite")
        jt = jumps[:, 0]
        if jt.size:
            if np.any(np.diff(jt) <= 0):
                raise ValueError("jump times must be strictly increasing")
            hi = self.t0 + self.dt * vals.size
            if jt[0] < self.t0 - 1e-12 * max(1.0, abs(self.t0)) or jt[-1] > hi * (1 + 1e-12) + 1e-12:
                raise ValueError("jump times outside the path window")
        if self.terminal is not None:
            k = self.index_of(self.terminal, side="ceil")
            if np.any(vals[k:] != 0):
                raise ValueError("values must vanish at and after the terminal time")

    def __len__(self) -> int:
        return int(self.values.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CadlagPath):
            return NotImplemented
        return (self.t0 == other.t0 and self.dt == other.dt and self.alpha == other.alpha
                and self.terminal == other.terminal
                and np.array_equal(self.values, other.values)
                and np.array_equal(self.jumps, other.jumps))

    __hash__ = None

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self))

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * (len(self) - 1)

    def index_of(self, t: float, side: str = "floor") -> int:
        x = (t - self.t0) / self.dt
        k = np.floor(x + 1e-9) if side == "floor" else np.ceil(x - 1e-9)
        return int(np.clip(k, 0, len(self)))

    def value_at(self, t: float) -> float:
        """Right-continuous evaluation (grid value at or before ``t``)."""
        if t < self.t0:
            raise ValueError("time before path start")
        return float(self.values[min(self.index_of(t), len(self) - 1)])

    def jump_counts(self, lo: float, hi: float) -> int:
        s = self.jumps[:, 1]
        return int(np.count_nonzero((np.abs(s) >= lo) & (np.abs(s) <= hi)))


@dataclass(frozen=True)
class ExcursionSample:
    """A cadlag path from 0 back to 0, positive in between."""

    path: CadlagPath
    lifetime: float

    def __post_init__(self):
        v = self.path.values
        if not self.lifetime > 0:
            raise ValueError("lifetime must be positive")
        tol = 1e-12
        if v[0] < -tol or v[-1] < -tol:
            raise ValueError("excursion endpoints must be nonnegative")
        if v[-1] > tol:
            raise ValueError("excursion must end at 0")
        if v.size > 2 and np.any(v[1:-1] <= 0):
            raise ValueError("excursion must be strictly positive inside")
        if abs(self.path.t_end - self.path.t0 - self.lifetime) > self.path.dt * (1 + 1e-9):
            raise ValueError("lifetime inconsistent with path grid")


@dataclass(frozen=True)
class RngStream:
    """Deterministic random stream addressed by ``(seed, stream_id)``."""

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = int(getattr(self, name))
            if not 0 <= v < 2 ** 64:
                raise ValueError(f"{name} must be a 64-bit unsigned integer")
            object.__setattr__(self, name, v)

    def seed_sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of the stream."""
        return np.random.Generator(np.random.PCG64(self.seed_sequence()))

    def child(self, *labels: int) -> "RngStream":
        return derive_stream(self.seed, (self.stream_id,) + tuple(labels))


def _label_hash(labels: Sequence[int]) -> int:
    ss = np.random.SeedSequence(entropy=[len(labels)] + [int(x) for x in labels])
    return int(ss.generate_state(1, np.uint64)[0])


def derive_stream(seed: int, labels: Sequence[int] = ()) -> RngStream:
    """Map ``(seed, labels)`` to a stream.

    The label path is hashed through numpy's ``SeedSequence`` mixing
    function, so distinct label paths collide with probability about
    ``2**-64``. The empty label path is the root stream ``(seed, 0)``.
    """
    labels = tuple(int(x) for x in labels)
    if any(x < 0 for x in labels):
        raise ValueError("labels must be nonnegative")
    return RngStream(seed, 0 if not labels else _label_hash(labels))


def as_generator(stream) -> np.random.Generator:
    """Accept an ``RngStream``, a ``Generator`` or an int seed."""
    if isinstance(stream, np.random.Generator):
        return stream
    if isinstance(stream, RngStream):
        return stream.generator()
    if isinstance(stream, (int, np.integer)):
        return RngStream(int(stream)).generator()
    raise TypeError(f"cannot build a generator from {type(stream).__name__}")


# ----------------------------------------------------------------------------
# serialization

def fmt_float(x) -> str:
    """Shortest round-trip decimal for a binary64 value."""
    return repr(float(x))


def write_path_csv(path: CadlagPath, destination, meta: Optional[dict] = None) -> None:
    """Write ``path`` in the lqg-lab path CSV format.

    ``meta`` entries become ``# key=value`` comment lines right after the
    magic line; readers ignore them unless asked.
    """
    out = io.StringIO()
    out.write(PATH_MAGIC + "\n")
    for k, v in (meta or {}).items():
        out.write(f"# {k}={v}\n")
    term = "" if path.terminal is None else fmt_float(path.terminal)
    out.write("t0,dt,alpha,len,terminal\n")
    out.write(f"{fmt_float(path.t0)},{fmt_float(path.dt)},{fmt_float(path.alpha)},{len(path)},{term}\n")
    out.write("i,value\n")
    for i, v in enumerate(path.values):
        out.write(f"{i},{fmt_float(v)}\n")
    out.write(JUMP_MARKER + "\n")
    out.write("time,size\n")
    for t, s in path.jumps:
        out.write(f"{fmt_float(t)},{fmt_float(s)}\n")
    text = out.getvalue()
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).write_text(text)


def _parse_float(tok: str, row: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"row {row}: cannot parse number {tok!r}") from None


def read_path_csv(source, with_meta: bool = False):
    """Inverse of :func:`write_path_csv`.

    Raises
    ------
    ParseError
        With the 1-based row number of the first offending line.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text()
    lines = text.splitlines()
    row = 0

    def take(expected: Optional[str] = None) -> str:
        nonlocal row
        if row >= len(lines):
            raise ParseError(f"row {row + 1}: unexpected end of file")
        line = lines[row]
        row += 1
        if expected is not None and line.strip() != expected:
            raise ParseError(f"row {row}: expected {expected!r}, got {line!r}")
        return line

    take(PATH_MAGIC)
    meta = {}
    while row < len(lines) and lines[row].startswith("#"):
        k, _, v = take()[1:].strip().partition("=")
        meta[k] = v
    take("t0,dt,alpha,len,terminal")
    hdr = take().split(",")
    if len(hdr) != 5:
        raise ParseError(f"row {row}: header needs 5 fields, got {len(hdr)}")
    t0, dt, alpha = (_parse_float(x, row) for x in hdr[:3])
    try:
        n = int(hdr[3])
    except ValueError:
        raise ParseError(f"row {row}: bad length {hdr[3]!r}") from None
    terminal = _parse_float(hdr[4], row) if hdr[4] else None
    take("i,value")
    values = np.empty(n)
    for i in range(n):
        parts = take().split(",")
        if len(parts) != 2 or parts[0] != str(i):
            raise ParseError(f"row {row}: expected sample {i}")
        values[i] = _parse_float(parts[1], row)
    take(JUMP_MARKER)
    take("time,size")
    jumps = []
    last = -np.inf
    while row < len(lines):
        line = take()
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(f"row {row}: expected time,size")
        t, s = _parse_float(parts[0], row), _parse_float(parts[1], row)
        if t <= last:
            raise ParseError(f"row {row}: jump times must be strictly increasing")
        last = t
        jumps.append((t, s))
    try:
        p = CadlagPath(t0, dt, values, np.array(jumps).reshape(-1, 2), alpha, terminal)
    except ValueError as exc:
        raise ParseError(f"row {row}: {exc}") from None
    return (p, meta) if with_meta else p


def write_csv_rows(destination, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Plain CSV with shortest round-trip floats."""
    def cell(x):
        if isinstance(x, (float, np.floating)):
            return fmt_float(x)
        return str(x)
    lines = [",".join(header)] + [",".join(cell(x) for x in r) for r in rows]
    Path(destination).write_text("\n".join(lines) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if np.isfinite(x) else str(x)
    if isinstance(obj, enum.Enum):
        return obj.value
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2) + "\n"


def write_json(destination, obj) -> None:
    Path(destination).write_text(dumps_json(obj))


# ----------------------------------------------------------------------------
# trial fan-out

def resolve_threads(threads: Optional[int] = None) -> int:
    if threads is None:
        env = os.environ.get("LQG_LAB_THREADS")
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(threads))


def parallel_map(fn: Callable, items: Iterable, threads: Optional[int] = None) -> list:
    """Order-preserving map; results come back in input order."""
    items = list(items)
    n = resolve_threads(threads)
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))

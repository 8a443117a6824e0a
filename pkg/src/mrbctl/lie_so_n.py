"""Skew-symmetric matrices: the Lie algebra so(n).

Coordinates are taken with respect to the basis ``Theta^{rs} = 1_{rs} - 1_{sr}``
(``r < s``) in lexicographic order. The inner product ``-tr(AB)/2`` makes
this basis orthonormal, so coordinate dot products equal ``inner``.

Every :class:`SkewMatrix` is exactly skew-symmetric: its matrix is replaced
by ``(A - A^T)/2`` on construction, and IEEE subtraction guarantees
``fl(a - b) == -fl(b - a)``.
"""

from __future__ import annotations

import functools
import warnings
from collections.abc import Iterable, Iterator

import numpy as np

from .errors import DimensionError, InvalidIndexError, ValidationError

SKEW_WARN_TOL = 1e-10
ORTHO_TOL = 1e-10


def dim_so(n: int) -> int:
    """Dimension ``n(n-1)/2`` of so(n)."""
    return n * (n - 1) // 2


@functools.lru_cache(maxsize=None)
def upper_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    """0-based ``(rows, cols)`` of the strict upper triangle, lexicographic."""
    rows, cols = np.triu_indices(n, 1)
    rows.flags.writeable = False
    cols.flags.writeable = False
    return rows, cols


def index_pairs(n: int) -> list[tuple[int, int]]:
    """1-based ``(r, s)`` pairs in coordinate order."""
    rows, cols = upper_indices(n)
    return [(int(r) + 1, int(s) + 1) for r, s in zip(rows, cols)]


def n_from_dim(d: int) -> int:
    n = int(round((1 + np.sqrt(1 + 8 * d)) / 2))
    if dim_so(n) != d:
        raise DimensionError(f"{d} is not n(n-1)/2 for any integer n")
    return n


def coords_to_matrices(coords: np.ndarray, n: int) -> np.ndarray:
    """Batch version of :meth:`SkewMatrix.from_coordinates` on raw arrays.

    ``coords`` has shape ``(..., d)``; the result has shape ``(..., n, n)``.
    """
    coords = np.asarray(coords, dtype=float)
    rows, cols = upper_indices(n)
    out = np.zeros(coords.shape[:-1] + (n, n))
    out[..., rows, cols] = coords
    out[..., cols, rows] = -coords
    return out


def matrices_to_coords(mats: np.ndarray) -> np.ndarray:
    n = mats.shape[-1]
    rows, cols = upper_indices(n)
    return mats[..., rows, cols]


class SkewMatrix:
    """Immutable element of so(n).

    Args:
        matrix: square real array. Only its skew part is kept; a warning is
            emitted when the discarded symmetric part exceeds
            ``SKEW_WARN_TOL`` in Frobenius norm.
    """

    __slots__ = ("_m",)
    __array_ufunc__ = None  # numpy scalars defer to __rmul__

    def __init__(self, matrix: np.ndarray | Iterable, *, _trusted: bool = False):
        m = np.array(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {m.shape}")
        if m.shape[0] < 3:
            raise DimensionError(f"so(n) requires n >= 3, got n={m.shape[0]}")
        if not np.all(np.isfinite(m)):
            raise ValidationError("matrix has non-finite entries")
        skew = (m - m.T) / 2
        if not _trusted:
            sym = np.linalg.norm((m + m.T) / 2)
            if sym > SKEW_WARN_TOL:
                warnings.warn(
                    f"discarding symmetric part of norm {sym:.3e} on ingest",
                    stacklevel=2,
                )
        skew.flags.writeable = False
        self._m = skew

    @classmethod
    def _wrap(cls, matrix: np.ndarray) -> SkewMatrix:
        return cls(matrix, _trusted=True)

    @classmethod
    def zeros(cls, n: int) -> SkewMatrix:
        return cls._wrap(np.zeros((n, n)))

    @classmethod
    def from_coordinates(cls, coords: Iterable[float], n: int | None = None) -> SkewMatrix:
        c = np.asarray(coords, dtype=float)
        if c.ndim != 1:
            raise DimensionError("coordinates must be a flat vector")
        if n is None:
            n = n_from_dim(c.size)
        elif c.size != dim_so(n):
            raise DimensionError(f"expected {dim_so(n)} coordinates for n={n}, got {c.size}")
        return cls._wrap(coords_to_matrices(c, n))

    @property
    def n(self) -> int:
        return self._m.shape[0]

    @property
    def dim(self) -> int:
        return dim_so(self.n)

    @property
    def matrix(self) -> np.ndarray:
        """Read-only view of the entries."""
        return self._m

    def to_coordinates(self) -> np.ndarray:
        rows, cols = upper_indices(self.n)
        return self._m[rows, cols].copy()

    coords = property(to_coordinates)

    def norm(self) -> float:
        """Frobenius norm."""
        return float(np.linalg.norm(self._m))

    def __array__(self, dtype=None, copy=None):
        return np.array(self._m, dtype=dtype)

    def _check(self, other: SkewMatrix) -> None:
        if not isinstance(other, SkewMatrix):
            raise TypeError(f"expected SkewMatrix, got {type(other).__name__}")
        if other.n != self.n:
            raise DimensionError(f"size mismatch: so({self.n}) vs so({other.n})")

    def __add__(self, other: SkewMatrix) -> SkewMatrix:
        self._check(other)
        return SkewMatrix._wrap(self._m + other._m)

    def __sub__(self, other: SkewMatrix) -> SkewMatrix:
        self._check(other)
        return SkewMatrix._wrap(self._m - other._m)

    def __neg__(self) -> SkewMatrix:
        return SkewMatrix._wrap(-self._m)

    def __mul__(self, scalar: float) -> SkewMatrix:
        if not np.isscalar(scalar):
            return NotImplemented
        return SkewMatrix._wrap(float(scalar) * self._m)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> SkewMatrix:
        return SkewMatrix._wrap(self._m / float(scalar))

    def allclose(self, other: SkewMatrix, atol: float = 1e-12) -> bool:
        self._check(other)
        return bool(np.linalg.norm(self._m - other._m) <= atol)

    def __repr__(self) -> str:
        return f"SkewMatrix(n={self.n}, coords={np.array2string(self.to_coordinates(), precision=4)})"

    def to_json(self) -> dict:
        return {"n": self.n, "coords": [float(x) for x in self.to_coordinates()]}

    @classmethod
    def from_json(cls, obj) -> SkewMatrix:
        """Accept ``{"n", "coords"}``, ``{"matrix"}`` or a bare list of rows."""
        if isinstance(obj, list):
            return cls(obj)
        if not isinstance(obj, dict):
            raise ValidationError("skew matrix must be a JSON object or list of rows")
        if "coords" in obj:
            n = obj.get("n")
            if n is not None and not isinstance(n, int):
                raise ValidationError("field 'n' must be an integer")
            return cls.from_coordinates(obj["coords"], n)
        if "matrix" in obj:
            return cls(obj["matrix"])
        raise ValidationError("skew matrix object needs field 'coords' or 'matrix'")


def basis_element(r: int, s: int, n: int) -> SkewMatrix:
    """``Theta^{rs}``: +1 at (r, s), -1 at (s, r); indices are 1-based."""
    if not (1 <= r < s <= n):
        raise InvalidIndexError(f"need 1 <= r < s <= n, got r={r}, s={s}, n={n}")
    m = np.zeros((n, n))
    m[r - 1, s - 1] = 1.0
    m[s - 1, r - 1] = -1.0
    return SkewMatrix._wrap(m)


def basis(n: int) -> Iterator[SkewMatrix]:
    for r, s in index_pairs(n):
        yield basis_element(r, s, n)


def commutator(a: SkewMatrix, b: SkewMatrix) -> SkewMatrix:
    a._check(b)
    return SkewMatrix._wrap(a.matrix @ b.matrix - b.matrix @ a.matrix)


def inner(a: SkewMatrix, b: SkewMatrix) -> float:
    """Trace form ``-tr(AB)/2``; equals the dot product of coordinates."""
    a._check(b)
    return 0.5 * float(np.sum(a.matrix * b.matrix))


def check_orthogonal(s: np.ndarray, tol: float = ORTHO_TOL) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {s.shape}")
    err = np.linalg.norm(s.T @ s - np.eye(s.shape[0]))
    if err > tol:
        raise ValidationError(f"matrix is not orthogonal: |S^T S - I| = {err:.3e}")
    return s


def conjugate(s: np.ndarray, a: SkewMatrix) -> SkewMatrix:
    """``Ad_S A = S A S^T`` for orthogonal ``S``."""
    s = check_orthogonal(s)
    if s.shape[0] != a.n:
        raise DimensionError(f"size mismatch: S is {s.shape[0]}x{s.shape[0]}, A in so({a.n})")
    return SkewMatrix._wrap(s @ a.matrix @ s.T)


def random_skew(n: int, rng: np.random.Generator, unit: bool = True) -> SkewMatrix:
    """Gaussian coordinates, optionally scaled to unit Frobenius norm."""
    x = SkewMatrix.from_coordinates(rng.standard_normal(dim_so(n)), n)
    return x / x.norm() if unit else x


def angle_between(a: SkewMatrix | np.ndarray, b: SkewMatrix | np.ndarray) -> float:
    """Unsigned angle between the lines spanned by ``a`` and ``b``.

    Uses ``atan2(|a_perp|, |<a,b>|/|b|)`` which stays accurate for tiny angles.
    """
    x = np.ravel(np.asarray(a, dtype=float))
    y = np.ravel(np.asarray(b, dtype=float))
    ny = np.linalg.norm(y)
    if ny == 0 or np.linalg.norm(x) == 0:
        return float("nan")
    along = x @ y / ny
    perp = np.linalg.norm(x - along * y / ny)
    return float(np.arctan2(perp, abs(along)))

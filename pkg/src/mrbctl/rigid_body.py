"""Inertia data and the Euler-Frahm drift of the n-dimensional rigid body.

The inertia operator is ``I_C(W) = W C + C W``. In the eigenframe of ``C``
it is diagonal on the basis ``Theta^{rs}`` with eigenvalues ``I_r + I_s``,
which gives an exact O(n^3) inverse.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, GenericityError, InvalidInputError, ValidationError
from .lie_so_n import (
    SkewMatrix,
    coords_to_matrices,
    dim_so,
    index_pairs,
    matrices_to_coords,
    upper_indices,
)

GAP_TOL = 1e-8
SYMMETRY_TOL = 1e-10


def _normalize_signs(s: np.ndarray) -> np.ndarray:
    # first non-negligible entry of each column made positive
    s = s.copy()
    for j in range(s.shape[1]):
        col = s[:, j]
        k = int(np.argmax(np.abs(col) > 1e-12))
        if col[k] < 0:
            s[:, j] = -col
    return s


@dataclass(frozen=True, eq=False)
class RigidBody:
    """Symmetric positive-definite inertia matrix with its eigendecomposition.

    ``C = S diag(eigenvalues) S^T`` with eigenvalues strictly ascending.
    Build instances with :func:`make_body`.
    """

    C: np.ndarray
    S: np.ndarray
    eigenvalues: np.ndarray
    axes: tuple[SkewMatrix, ...] = field(repr=False)

    @property
    def n(self) -> int:
        return self.C.shape[0]

    @property
    def dim(self) -> int:
        return dim_so(self.n)

    @functools.cached_property
    def pair_sums(self) -> np.ndarray:
        """``I_r + I_s`` in coordinate order."""
        rows, cols = upper_indices(self.n)
        return self.eigenvalues[rows] + self.eigenvalues[cols]

    @functools.cached_property
    def is_diagonal(self) -> bool:
        return bool(np.array_equal(self.S, np.eye(self.n)))

    def axis(self, r: int, s: int) -> SkewMatrix:
        """Principal axis ``Omega^{rs} = S Theta^{rs} S^T`` (1-based, r < s)."""
        return self.axes[index_pairs(self.n).index((r, s))]

    def check(self, *xs: SkewMatrix) -> None:
        for x in xs:
            if x.n != self.n:
                raise DimensionError(f"body has n={self.n}, argument is in so({x.n})")

    # raw-array kernels, shape (..., n, n); used by the integrators

    def _to_frame(self, w: np.ndarray) -> np.ndarray:
        return w if self.is_diagonal else self.S.T @ w @ self.S

    def _from_frame(self, w: np.ndarray) -> np.ndarray:
        return w if self.is_diagonal else self.S @ w @ self.S.T

    def apply_array(self, w: np.ndarray) -> np.ndarray:
        return w @ self.C + self.C @ w

    def inverse_array(self, m: np.ndarray) -> np.ndarray:
        n = self.n
        c = matrices_to_coords(self._to_frame(m)) / self.pair_sums
        return self._from_frame(coords_to_matrices(c, n))

    def drift_array(self, w: np.ndarray) -> np.ndarray:
        w2 = w @ w
        return self.inverse_array(self.C @ w2 - w2 @ self.C)

    @functools.cached_property
    def beta_tensor(self) -> np.ndarray:
        """``B[o, i, j]``: coordinate ``o`` of ``beta(E_i, E_j)`` for basis ``E``.

        ``beta(E_i, E_j) = I_C^{-1}[C, E_i E_j + E_j E_i]``, so the drift in
        coordinates is ``f(x) = B(x, x) / 2``.
        """
        n, d = self.n, self.dim
        e = coords_to_matrices(np.eye(d), n)
        prod = e[:, None] @ e[None, :]
        sym = prod + prod.transpose(1, 0, 2, 3)
        comm = self.C @ sym - sym @ self.C
        b = matrices_to_coords(self.inverse_array(comm))  # (i, j, o)
        b = np.moveaxis(b, -1, 0)
        b = 0.5 * (b + b.transpose(0, 2, 1))
        b.flags.writeable = False
        return b


def make_body(C, gap_tol: float = GAP_TOL) -> RigidBody:
    """Diagonalize a symmetric inertia matrix and cache its principal axes.

    Raises:
        ValidationError: ``C`` is not square, finite and symmetric.
        GenericityError: an eigenvalue is non-positive or two eigenvalues are
            closer than ``gap_tol``.
    """
    c = np.array(C, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValidationError(f"inertia matrix must be square, got shape {c.shape}")
    n = c.shape[0]
    if n < 3:
        raise ValidationError(f"need n >= 3, got n={n}")
    if not np.all(np.isfinite(c)):
        raise ValidationError("inertia matrix has non-finite entries")
    asym = np.linalg.norm(c - c.T)
    if asym > SYMMETRY_TOL * max(1.0, np.linalg.norm(c)):
        raise ValidationError(f"inertia matrix is not symmetric: |C - C^T| = {asym:.3e}")
    c = (c + c.T) / 2

    off = c - np.diag(np.diag(c))
    if not np.any(off):
        order = np.argsort(np.diag(c), kind="stable")
        lam = np.diag(c)[order].copy()
        s = np.eye(n)[:, order]
    else:
        lam, s = np.linalg.eigh(c)
        s = _normalize_signs(s)

    if lam[0] <= 0:
        raise GenericityError(f"inertia matrix is not positive definite: I_1 = {lam[0]:.6g}")
    gaps = np.diff(lam)
    k = int(np.argmin(gaps))
    if gaps[k] <= gap_tol:
        raise GenericityError(
            f"eigenvalues I_{k + 1} = {lam[k]:.12g} and I_{k + 2} = {lam[k + 1]:.12g} "
            f"are not distinct (gap {gaps[k]:.3e} <= {gap_tol:.1e})"
        )

    for a in (c, s, lam):
        a.flags.writeable = False
    axes = tuple(
        SkewMatrix._wrap(s @ coords_to_matrices(e, n) @ s.T) for e in np.eye(dim_so(n))
    )
    return RigidBody(C=c, S=s, eigenvalues=lam, axes=axes)


def body_from_eigenvalues(eigenvalues, S=None, gap_tol: float = GAP_TOL) -> RigidBody:
    lam = np.asarray(eigenvalues, dtype=float)
    if S is None:
        return make_body(np.diag(lam), gap_tol)
    S = np.asarray(S, dtype=float)
    return make_body(S @ np.diag(lam) @ S.T, gap_tol)


def random_body(n: int, rng: np.random.Generator, low: float = 1.0, high: float = 5.0) -> RigidBody:
    """Body with Haar-random eigenframe and eigenvalues uniform in ``[low, high]``."""
    from scipy.stats import ortho_group

    while True:
        lam = np.sort(rng.uniform(low, high, size=n))
        if np.min(np.diff(lam)) > 1e-3 * (high - low):
            break
    q = ortho_group.rvs(n, random_state=rng)
    return make_body(q @ np.diag(lam) @ q.T)


def inertia_apply(body: RigidBody, omega: SkewMatrix) -> SkewMatrix:
    """Angular momentum ``M = Omega C + C Omega``."""
    body.check(omega)
    return SkewMatrix._wrap(body.apply_array(omega.matrix))


def inertia_inverse(body: RigidBody, m: SkewMatrix) -> SkewMatrix:
    """Unique ``Omega`` with ``Omega C + C Omega = M``."""
    body.check(m)
    return SkewMatrix._wrap(body.inverse_array(m.matrix))


def euler_drift(body: RigidBody, omega: SkewMatrix) -> SkewMatrix:
    """Free Euler-Frahm vector field ``I_C^{-1}[C, Omega^2]``."""
    body.check(omega)
    return SkewMatrix._wrap(body.drift_array(omega.matrix))


def steady_residual(body: RigidBody, g: SkewMatrix) -> float:
    """``|[C, G^2]|_F``; zero exactly on steady directions."""
    body.check(g)
    g2 = g.matrix @ g.matrix
    return float(np.linalg.norm(body.C @ g2 - g2 @ body.C))


def is_principal_axis(body: RigidBody, g: SkewMatrix, tol: float = 1e-9) -> tuple[bool, float]:
    """Test ``I_C G = mu G``; returns the verdict and the Rayleigh quotient ``mu``."""
    body.check(g)
    gg = float(np.sum(g.matrix * g.matrix))
    if gg == 0:
        raise InvalidInputError("principal-axis test needs G != 0")
    ig = body.apply_array(g.matrix)
    mu = float(np.sum(ig * g.matrix)) / gg
    resid = np.linalg.norm(ig - mu * g.matrix)
    return bool(resid <= tol * np.sqrt(gg)), mu


def is_steady(body: RigidBody, g: SkewMatrix, tol: float = 1e-9) -> bool:
    """Steady-state test with tolerance scaled by ``max(1, <G, G>)``."""
    gg = 0.5 * float(np.sum(g.matrix * g.matrix))
    return steady_residual(body, g) <= tol * max(1.0, gg)

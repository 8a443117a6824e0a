"""The extension operator beta and the saturation (closure) engine.

``beta(A, B) = I_C^{-1}[C, AB + BA]`` is the constant vector field produced
by the double bracket of the drift with two constant controlled fields.
Iterating it on a set of seed directions and tracking the span tells whether
the extended system acquires a full-dimensional input.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import InvalidInputError, PreconditionError
from .lie_so_n import SkewMatrix, dim_so, index_pairs
from .rigid_body import RigidBody, is_steady

RANK_TOL = 1e-9
STEADY_TOL = 1e-9


def beta(body: RigidBody, a: SkewMatrix, b: SkewMatrix) -> SkewMatrix:
    body.check(a, b)
    x = a.matrix @ b.matrix + b.matrix @ a.matrix
    return SkewMatrix._wrap(body.inverse_array(body.C @ x - x @ body.C))


def table_entry(body: RigidBody, p: tuple[int, int], q: tuple[int, int]) -> SkewMatrix:
    """Closed-form ``beta(Omega^p, Omega^q)`` for stored axes (1-based, r < s).

    With oriented ``Theta^{ab} = -Theta^{ba}``, sharing exactly one index ``a``:
    ``beta(Omega^{ab}, Omega^{ac}) = (I_c - I_b)/(I_b + I_c) Omega^{bc}``.
    Equal or disjoint pairs give zero.
    """
    lam = body.eigenvalues
    shared = set(p) & set(q)
    if len(shared) != 1:
        return SkewMatrix.zeros(body.n)
    (a,) = shared
    b = p[0] if p[1] == a else p[1]
    c = q[0] if q[1] == a else q[1]
    sign = (1 if a < b else -1) * (1 if a < c else -1) * (1 if b < c else -1)
    coef = (lam[c - 1] - lam[b - 1]) / (lam[b - 1] + lam[c - 1])
    return sign * coef * body.axis(min(b, c), max(b, c))


@dataclass
class TableReport:
    max_deviation: float
    worst_pair: tuple[tuple[int, int], tuple[int, int]] | None
    n_pairs: int


def verify_multiplication_table(body: RigidBody) -> TableReport:
    """Compare :func:`beta` on every ordered pair of axes with :func:`table_entry`."""
    pairs = index_pairs(body.n)
    worst, where = 0.0, None
    for i, p in enumerate(pairs):
        for j, q in enumerate(pairs):
            dev = float(np.max(np.abs(
                beta(body, body.axes[i], body.axes[j]).matrix - table_entry(body, p, q).matrix
            )))
            if where is None or dev > worst:
                worst, where = dev, (p, q)
    return TableReport(worst, where, len(pairs) ** 2)


def theorem1_seeds(body: RigidBody) -> tuple[SkewMatrix, SkewMatrix]:
    """``G1 = Omega^{12}`` and ``G2 = Omega^{23} + ... + Omega^{n-1,n}``."""
    n = body.n
    g2 = body.axis(2, 3)
    for i in range(3, n):
        g2 = g2 + body.axis(i, i + 1)
    return body.axis(1, 2), g2


def beta_chain(body: RigidBody, g1: SkewMatrix, g2: SkewMatrix) -> list[SkewMatrix]:
    """``[G^3, ..., G^n]`` with ``G^3 = beta(G^2, G^1)``, ``G^i = beta(G^{i-1}, G^2)``."""
    out = [beta(body, g2, g1)]
    for _ in range(4, body.n + 1):
        out.append(beta(body, out[-1], g2))
    return out


@dataclass
class SaturationRound:
    index: int
    added: list[SkewMatrix]
    dim: int


@dataclass
class SaturationResult:
    n: int
    rounds: list[SaturationRound] = field(default_factory=list)
    final_dim: int = 0
    seed_labels: list[str] = field(default_factory=list)
    basis: np.ndarray | None = field(default=None, repr=False)

    @property
    def certificate(self) -> bool:
        return self.final_dim == dim_so(self.n)

    @property
    def rounds_to_full(self) -> int | None:
        """Index of the first round whose span is all of so(n); 0 = seeds alone."""
        for r in self.rounds:
            if r.dim == dim_so(self.n):
                return r.index
        return None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "final_dim": self.final_dim,
            "certificate": self.certificate,
            "seed_labels": list(self.seed_labels),
            "rounds": [
                {
                    "round": r.index,
                    "dim": r.dim,
                    "added": [g.to_json()["coords"] for g in r.added],
                }
                for r in self.rounds
            ],
        }


def _sorted_rows(rows: np.ndarray) -> np.ndarray:
    if len(rows) == 0:
        return rows
    # lexicographic on coordinates, first column most significant
    order = np.lexsort(rows.T[::-1])
    return rows[order]


def _extend_span(
    basis: np.ndarray, candidates: np.ndarray, rank_tol: float
) -> tuple[np.ndarray, np.ndarray]:
    """Adjoin candidate rows to an orthonormal row basis.

    Returns the new orthonormal basis and the candidates responsible for the
    growth, scaled to unit Frobenius norm. They are chosen by pivoted QR on
    their components orthogonal to the old span.
    """
    d = candidates.shape[1] if len(candidates) else basis.shape[1]
    if len(candidates) == 0:
        return basis, np.zeros((0, d))
    scale = np.max(np.linalg.norm(candidates, axis=1))
    if scale == 0:
        return basis, np.zeros((0, d))
    cand = _sorted_rows(candidates / scale)
    stacked = np.vstack([basis, cand])
    _, sv, vt = np.linalg.svd(stacked, full_matrices=False)
    rank = int(np.sum(sv > rank_tol * sv[0]))
    grow = rank - len(basis)
    if grow <= 0:
        return basis, np.zeros((0, d))

    resid = cand - (cand @ basis.T) @ basis if len(basis) else cand
    _, _, piv = scipy.linalg.qr(resid.T, mode="economic", pivoting=True)
    added = cand[np.sort(piv[:grow])]
    # unit Frobenius norm is coordinate norm 1/sqrt(2)
    added = added / (np.sqrt(2.0) * np.linalg.norm(added, axis=1, keepdims=True))
    return vt[:rank], added


def _span_basis(vectors: np.ndarray, rank_tol: float) -> np.ndarray:
    _, sv, vt = np.linalg.svd(vectors, full_matrices=False)
    if sv[0] == 0:
        return np.zeros((0, vectors.shape[1]))
    return vt[: int(np.sum(sv > rank_tol * sv[0]))]


def _beta_coords(body: RigidBody, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Rows of ``beta(a_k, b_l)`` for all k, l, in coordinates."""
    bt = body.beta_tensor
    return np.einsum("oij,ki,lj->klo", bt, a, b, optimize=True).reshape(-1, bt.shape[0])


def saturate(
    body: RigidBody,
    seeds: list[SkewMatrix],
    max_rounds: int = 10,
    rank_tol: float = RANK_TOL,
    seed_labels: list[str] | None = None,
) -> SaturationResult:
    """Close the span of ``seeds`` under pairwise beta.

    Each round evaluates beta on all pairs of an orthonormal basis of the
    current span, adjoins the results and recomputes the span by a relative
    singular-value threshold. Stops when the span stops growing, is full, or
    after ``max_rounds`` rounds.
    """
    if not seeds:
        raise InvalidInputError("saturation needs at least one seed")
    if max_rounds < 1:
        raise InvalidInputError("max_rounds must be >= 1")
    body.check(*seeds)
    d = body.dim
    seed_coords = np.array([g.to_coordinates() for g in seeds])
    basis = _span_basis(seed_coords, rank_tol)
    res = SaturationResult(
        n=body.n,
        seed_labels=seed_labels or [f"seed{i}" for i in range(len(seeds))],
    )
    res.rounds.append(SaturationRound(0, list(seeds), len(basis)))

    for k in range(1, max_rounds + 1):
        if len(basis) in (0, d):
            break
        cand = _beta_coords(body, basis, basis)
        basis, added = _extend_span(basis, cand, rank_tol)
        res.rounds.append(
            SaturationRound(k, [SkewMatrix.from_coordinates(a, body.n) for a in added], len(basis))
        )
        if len(added) == 0:
            break
    res.final_dim = len(basis)
    res.basis = basis
    return res


def saturate_constrained(
    body: RigidBody,
    seeds: list[SkewMatrix],
    steady_flags: list[bool],
    max_rounds: int = 20,
    rank_tol: float = RANK_TOL,
    steady_tol: float = STEADY_TOL,
    seed_labels: list[str] | None = None,
) -> SaturationResult:
    """Saturation in which every beta pair has at least one steady argument.

    Steady candidates are the flagged seeds, principal axes that lie in the
    current span, and earlier extensions that are themselves steady.
    Raises :class:`PreconditionError` if no flagged seed is steady.
    """
    if not seeds:
        raise InvalidInputError("saturation needs at least one seed")
    if len(steady_flags) != len(seeds):
        raise InvalidInputError("steady_flags must match seeds")
    body.check(*seeds)
    d, n = body.dim, body.n

    steady: list[np.ndarray] = []
    for g, flag in zip(seeds, steady_flags):
        c = g.to_coordinates()
        if flag and is_steady(body, g, steady_tol):
            steady.append(c / np.linalg.norm(c))
    if not steady:
        raise PreconditionError("no seed is flagged steady and passes the steady test")

    axes = np.array([a.to_coordinates() for a in body.axes])
    basis = _span_basis(np.array([g.to_coordinates() for g in seeds]), rank_tol)
    res = SaturationResult(
        n=n, seed_labels=seed_labels or [f"seed{i}" for i in range(len(seeds))]
    )
    res.rounds.append(SaturationRound(0, list(seeds), len(basis)))

    def refresh_axes(steady: list[np.ndarray]) -> list[np.ndarray]:
        known = np.array(steady)
        for ax in axes:
            off_span = np.linalg.norm(ax - (ax @ basis.T) @ basis)
            if off_span <= steady_tol and np.min(np.linalg.norm(known - ax, axis=1)) > steady_tol \
                    and np.min(np.linalg.norm(known + ax, axis=1)) > steady_tol:
                steady.append(ax.copy())
                known = np.array(steady)
        return steady

    for k in range(1, max_rounds + 1):
        if len(basis) == d:
            break
        steady = refresh_axes(steady)
        cand = _beta_coords(body, np.array(steady), basis)
        basis, added = _extend_span(basis, cand, rank_tol)
        for a in added:
            if is_steady(body, SkewMatrix.from_coordinates(a, n), steady_tol):
                steady.append(a)
        res.rounds.append(
            SaturationRound(k, [SkewMatrix.from_coordinates(a, n) for a in added], len(basis))
        )
        if len(added) == 0:
            break
    res.final_dim = len(basis)
    res.basis = basis
    return res

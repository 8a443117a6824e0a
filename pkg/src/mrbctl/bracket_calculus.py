"""Polynomial vector fields on so(n) coordinates and their Lie brackets.

A field of degree k is stored as dense symmetric tensors ``T_j`` of shape
``(d,) + (d,) * j`` for ``j <= k``, with ``f(x) = sum_j T_j(x, ..., x)``.

Bracket convention: ``{f, g}(x) = Dg(x) f(x) - Df(x) g(x)``. With it, for
constant fields ``g~ = G~`` and ``g- = G-`` and the Euler-Frahm drift ``f``,

* ``{g~, f}(x) = beta(G~, X)``
* ``{g-, {g~, f}} = beta(G~, G-)`` (factor exactly 1)
* ``{g~, {g~, f}} = beta(G~, G~) = 2 I_C^{-1}[C, G~^2]``
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .beta_saturation import beta
from .errors import DimensionError, InvalidInputError, ResourceError
from .lie_so_n import SkewMatrix, angle_between, random_skew
from .rigid_body import RigidBody

DEGREE_CAP = 6
FIELD_CAP = 5000
RANK_TOL = 1e-9
ZERO_TOL = 1e-14


def _symmetrize_full(t: np.ndarray) -> np.ndarray:
    k = t.ndim - 1
    if k < 2:
        return t
    perms = list(itertools.permutations(range(1, k + 1)))
    out = sum(np.transpose(t, (0,) + p) for p in perms)
    return out / len(perms)


def _symmetrize_blocks(t: np.ndarray, a: int, b: int) -> np.ndarray:
    """Symmetrize input slots of ``t`` already symmetric within blocks of size a, b."""
    k = a + b
    if a == 0 or b == 0:
        return t
    out = np.zeros_like(t)
    count = 0
    for chosen in itertools.combinations(range(k), a):
        rest = [i for i in range(k) if i not in chosen]
        perm = [0] * (k + 1)
        for src, dst in enumerate(chosen):
            perm[1 + dst] = 1 + src
        for src, dst in enumerate(rest):
            perm[1 + dst] = 1 + a + src
        out += np.transpose(t, perm)
        count += 1
    return out / count


def _contract(t: np.ndarray, x: np.ndarray, times: int) -> np.ndarray:
    for _ in range(times):
        t = t @ x
    return t


class PolyVectorField:
    """Vector field on ``R^d`` with polynomial components.

    Args:
        d: coordinate dimension.
        terms: mapping degree -> coefficient tensor; tensors are symmetrized
            over their input slots on construction.
    """

    def __init__(self, d: int, terms: dict[int, np.ndarray] | None = None, *, _symmetric: bool = False):
        self.d = d
        self.terms: dict[int, np.ndarray] = {}
        for k, t in (terms or {}).items():
            t = np.asarray(t, dtype=float)
            if t.shape != (d,) * (k + 1):
                raise DimensionError(f"degree-{k} tensor must have shape {(d,) * (k + 1)}, got {t.shape}")
            if k > DEGREE_CAP:
                raise ResourceError(f"degree {k} exceeds degree cap {DEGREE_CAP}", cap="degree")
            self.terms[k] = t if _symmetric else _symmetrize_full(t)

    @classmethod
    def constant(cls, value: SkewMatrix | np.ndarray) -> PolyVectorField:
        v = value.to_coordinates() if isinstance(value, SkewMatrix) else np.asarray(value, float)
        return cls(v.size, {0: v}, _symmetric=True)

    @classmethod
    def zero(cls, d: int) -> PolyVectorField:
        return cls(d, {}, _symmetric=True)

    @property
    def degree(self) -> int:
        """Highest degree with a nonzero tensor; -1 for the zero field."""
        nz = [k for k, t in self.terms.items() if np.any(t)]
        return max(nz) if nz else -1

    def max_coefficient(self) -> float:
        return max((float(np.max(np.abs(t))) for t in self.terms.values()), default=0.0)

    def is_zero(self, tol: float = ZERO_TOL) -> bool:
        return self.max_coefficient() <= tol

    def evaluate(self, x) -> np.ndarray:
        x = x.to_coordinates() if isinstance(x, SkewMatrix) else np.asarray(x, float)
        out = np.zeros(self.d)
        for k, t in self.terms.items():
            out += _contract(t, x, k)
        return out

    def jacobian(self, x) -> np.ndarray:
        x = np.asarray(x, float)
        out = np.zeros((self.d, self.d))
        for k, t in self.terms.items():
            if k >= 1:
                out += k * _contract(t, x, k - 1)
        return out

    def _combine(self, other: PolyVectorField, sign: float) -> PolyVectorField:
        if other.d != self.d:
            raise DimensionError(f"field dimensions differ: {self.d} vs {other.d}")
        terms = {k: t.copy() for k, t in self.terms.items()}
        for k, t in other.terms.items():
            terms[k] = terms[k] + sign * t if k in terms else sign * t
        return PolyVectorField(self.d, terms, _symmetric=True)

    def __add__(self, other: PolyVectorField) -> PolyVectorField:
        return self._combine(other, 1.0)

    def __sub__(self, other: PolyVectorField) -> PolyVectorField:
        return self._combine(other, -1.0)

    def __mul__(self, scalar: float) -> PolyVectorField:
        return PolyVectorField(self.d, {k: scalar * t for k, t in self.terms.items()}, _symmetric=True)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"PolyVectorField(d={self.d}, degree={self.degree}, max|coef|={self.max_coefficient():.3g})"


def drift_field(body: RigidBody, nu: float = 0.0) -> PolyVectorField:
    """Euler-Frahm drift ``I_C^{-1}[C, X^2]``, minus ``nu X`` when damped."""
    terms = {2: 0.5 * np.array(body.beta_tensor)}
    if nu:
        terms[1] = -float(nu) * np.eye(body.dim)
    return PolyVectorField(body.dim, terms, _symmetric=True)


def _directional(g: np.ndarray, q: int, f: np.ndarray, p: int) -> np.ndarray:
    """Tensor of ``Dg_q(x) f_p(x)``: degree ``p + q - 1``."""
    t = q * np.tensordot(g, f, axes=([1], [0]))
    return _symmetrize_blocks(t, q - 1, p)


def lie_bracket(f: PolyVectorField, g: PolyVectorField) -> PolyVectorField:
    """``{f, g} = Dg f - Df g``, computed exactly on coefficient tensors."""
    if f.d != g.d:
        raise DimensionError(f"field dimensions differ: {f.d} vs {g.d}")
    terms: dict[int, np.ndarray] = {}

    def acc(k: int, t: np.ndarray) -> None:
        if k > DEGREE_CAP:
            raise ResourceError(f"bracket degree {k} exceeds degree cap {DEGREE_CAP}", cap="degree")
        terms[k] = terms[k] + t if k in terms else t

    for q, gt in g.terms.items():
        if q == 0:
            continue
        for p, ft in f.terms.items():
            acc(p + q - 1, _directional(gt, q, ft, p))
    for p, ft in f.terms.items():
        if p == 0:
            continue
        for q, gt in g.terms.items():
            acc(p + q - 1, -_directional(ft, p, gt, q))
    return PolyVectorField(f.d, terms, _symmetric=True)


@dataclass
class ExtensionReport:
    commuting_norm: float  # |{g~, g-}|
    self_norm: float  # |{g~, {g~, f}}|
    extension: SkewMatrix  # value of the constant field {g-, {g~, f}}
    extension_degree: int
    angle: float  # between extension and beta(G~, G-)
    factor: float  # extension = factor * beta(G~, G-)


def verify_extension_relations(
    body: RigidBody, g_tilde: SkewMatrix, g_bar: SkewMatrix, nu: float = 0.0
) -> ExtensionReport:
    """Evaluate the two commutation relations and the extending direction.

    Norms are the largest coefficient magnitude of the bracket field.
    """
    body.check(g_tilde, g_bar)
    f = drift_field(body, nu)
    gt, gb = PolyVectorField.constant(g_tilde), PolyVectorField.constant(g_bar)
    gtf = lie_bracket(gt, f)
    ext = lie_bracket(gb, gtf)
    value = ext.evaluate(np.zeros(body.dim))
    ref = beta(body, g_tilde, g_bar).to_coordinates()
    rr = float(ref @ ref)
    return ExtensionReport(
        commuting_norm=lie_bracket(gt, gb).max_coefficient(),
        self_norm=lie_bracket(gt, gtf).max_coefficient(),
        extension=SkewMatrix.from_coordinates(value, body.n),
        extension_degree=ext.degree,
        angle=angle_between(value, ref),
        factor=float(value @ ref) / rr if rr > 0 else float("nan"),
    )


@dataclass
class RankReport:
    dim: int
    per_point_ranks: list[int]
    verdict: bool
    origin_rank: int
    n_fields: int
    max_degree: int
    singular_values: list[list[float]] = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "per_point_ranks": list(self.per_point_ranks),
            "verdict": self.verdict,
            "origin_rank": self.origin_rank,
            "n_fields": self.n_fields,
            "max_degree": self.max_degree,
        }


def bracket_tree(
    generators: list[PolyVectorField],
    depth: int,
    degree_cap: int = DEGREE_CAP,
    field_cap: int = FIELD_CAP,
) -> list[PolyVectorField]:
    """All nonzero right-normed brackets ``{X1, {X2, ... Xk}}`` with ``k <= depth``.

    Right-normed brackets of generators span the Lie algebra they generate,
    so nesting only on the right loses nothing.
    """
    if depth < 1:
        raise InvalidInputError("depth must be >= 1")
    fields = [g for g in generators if not g.is_zero()]
    level = list(fields)
    for _ in range(2, depth + 1):
        nxt = []
        for x in generators:
            for y in level:
                if x is y:
                    continue
                deg = max(x.degree, 0) + max(y.degree, 0) - 1
                if deg > degree_cap:
                    raise ResourceError(
                        f"bracket degree {deg} exceeds degree cap {degree_cap}", cap="degree"
                    )
                z = lie_bracket(x, y)
                if not z.is_zero():
                    nxt.append(z)
                    if len(fields) + len(nxt) > field_cap:
                        raise ResourceError(
                            f"bracket tree exceeds field cap {field_cap}", cap="fields"
                        )
        fields.extend(nxt)
        level = nxt
    return fields


def random_unit_points(n: int, count: int, rng: np.random.Generator) -> list[SkewMatrix]:
    return [random_skew(n, rng) for _ in range(count)]


def bracket_generating_rank(
    body: RigidBody,
    directions: list[SkewMatrix],
    nu: float = 0.0,
    points: list[SkewMatrix] | None = None,
    depth: int = 4,
    *,
    seed: int | None = None,
    n_points: int = 5,
    rank_tol: float = RANK_TOL,
) -> RankReport:
    """Rank of iterated brackets of the drift and constant controlled fields.

    Fields are evaluated at every point and the stacked values' rank is found
    with a relative singular-value threshold. The verdict requires full rank
    at every supplied point. The origin is evaluated as a diagnostic only.
    When ``points`` is omitted, ``n_points`` random unit points are drawn
    from ``seed``.
    """
    if not directions:
        raise InvalidInputError("need at least one controlled direction")
    body.check(*directions)
    if points is None:
        if seed is None:
            raise InvalidInputError("random sample points need a seed")
        points = random_unit_points(body.n, n_points, np.random.default_rng(seed))
    if not points:
        raise InvalidInputError("need at least one sample point")
    body.check(*points)

    gens = [drift_field(body, nu)] + [PolyVectorField.constant(g) for g in directions]
    fields = bracket_tree(gens, depth)
    d = body.dim

    def rank_at(x: np.ndarray) -> tuple[int, np.ndarray]:
        vals = np.array([fl.evaluate(x) for fl in fields])
        sv = np.linalg.svd(vals, compute_uv=False)
        if sv[0] == 0:
            return 0, sv
        return int(np.sum(sv > rank_tol * sv[0])), sv

    ranks, svs = [], []
    for p in points:
        r, sv = rank_at(p.to_coordinates())
        ranks.append(r)
        svs.append(sv.tolist())
    origin_rank, _ = rank_at(np.zeros(d))
    return RankReport(
        dim=d,
        per_point_ranks=ranks,
        verdict=all(r == d for r in ranks),
        origin_rank=origin_rank,
        n_fields=len(fields),
        max_degree=max(fl.degree for fl in fields),
        singular_values=svs,
    )

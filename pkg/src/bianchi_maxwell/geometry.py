"""4D metric, potential and field strength on a homogeneous spacetime.

The metric is ds^2 = -du0^2 + l^a_alpha l^b_beta eta_ab(u0) du^alpha du^beta
and the potential A_0 = 0, A_alpha = l^a_alpha alpha_a(u0).

:func:`maxwell_residual_full` is the independent oracle: it differentiates
the potential and sqrt(-g) F^ij numerically in all four coordinates and
never touches the reduced ODE system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from .errors import ConfigError, NonRiemannianEta
from .expr import Expr, as_expr, deriv_fd
from .groups import BianchiGroup, FramePoint, frame_at, structure_constants
from .tensor import Sym3, sym3_det, sym3_inverse

DEFAULT_H_FIELD = 1e-4
ETA_KEYS = ("11", "12", "13", "22", "23", "33")


class MetricSource(Protocol):
    def at(self, t: float) -> Sym3: ...


class PotentialSource(Protocol):
    def at(self, t: float) -> tuple[float, float, float]: ...

    def rate(self, t: float) -> tuple[float, float, float]: ...


def check_riemannian(m: Sym3, t: float | None = None) -> float:
    """Return eta = +sqrt(det m), or raise if m is not positive definite."""
    det = sym3_det(m)
    minor2 = m.m11 * m.m22 - m.m12 * m.m12
    if not (m.m11 > 0.0 and minor2 > 0.0 and det > 0.0):
        where = "" if t is None else f" at u0={t!r}"
        raise NonRiemannianEta(f"eta_ab not positive definite{where} "
                               f"(eta11={m.m11:.3e}, minor={minor2:.3e}, det={det:.3e})")
    return math.sqrt(det)


@dataclass(frozen=True)
class SpatialMetricFn:
    """Six expressions for eta_ab(u0); entries are symmetric by construction."""

    e11: Expr
    e12: Expr
    e13: Expr
    e22: Expr
    e23: Expr
    e33: Expr

    @classmethod
    def from_config(cls, cfg: dict | None) -> SpatialMetricFn:
        """Keys '11','12',...; missing diagonal entries default to 1, off-diagonal to 0."""
        cfg = dict(cfg or {})
        unknown = set(cfg) - set(ETA_KEYS)
        if unknown:
            raise ConfigError(f"unknown eta entries {sorted(unknown)}; use keys {', '.join(ETA_KEYS)}", "eta")
        vals = [cfg.get(k, "1" if k[0] == k[1] else "0") for k in ETA_KEYS]
        return cls(*(as_expr(v) for v in vals))

    @classmethod
    def constant(cls, m: Sym3) -> SpatialMetricFn:
        return cls(*(as_expr(v) for v in (m.m11, m.m12, m.m13, m.m22, m.m23, m.m33)))

    def to_config(self) -> dict:
        return {k: str(e) for k, e in zip(ETA_KEYS, self.entries())}

    def entries(self) -> tuple[Expr, ...]:
        return (self.e11, self.e12, self.e13, self.e22, self.e23, self.e33)

    def at(self, t: float) -> Sym3:
        return Sym3(*(e(t) for e in self.entries()))

    def eta(self, t: float) -> float:
        return check_riemannian(self.at(t), t)


@dataclass(frozen=True)
class PotentialFn:
    a1: Expr
    a2: Expr
    a3: Expr
    h: float = 1e-5

    @classmethod
    def from_exprs(cls, a1, a2, a3) -> PotentialFn:
        return cls(as_expr(a1), as_expr(a2), as_expr(a3))

    def at(self, t: float) -> tuple[float, float, float]:
        return (self.a1(t), self.a2(t), self.a3(t))

    def rate(self, t: float) -> tuple[float, float, float]:
        return tuple(deriv_fd(e, t, self.h) for e in (self.a1, self.a2, self.a3))


@dataclass(frozen=True)
class SpacetimePoint:
    u0: float
    u1: float
    u2: float
    u3: float

    def coords(self) -> tuple[float, float, float, float]:
        return (self.u0, self.u1, self.u2, self.u3)

    def spatial(self) -> FramePoint:
        return FramePoint(self.u1, self.u2, self.u3)

    def shifted(self, axis: int, delta: float) -> SpacetimePoint:
        c = list(self.coords())
        c[axis] += delta
        return SpacetimePoint(*c)


@dataclass(frozen=True)
class MetricValue:
    g: np.ndarray
    g_inv: np.ndarray
    sqrt_neg_g: float


def _mat(m) -> np.ndarray:
    return np.array([list(r) for r in m.rows], dtype=float)


def metric_at(g: BianchiGroup, eta: MetricSource, p: SpacetimePoint) -> MetricValue:
    frame = frame_at(g, p.spatial())
    e = eta.at(p.u0)
    root = check_riemannian(e, p.u0)
    ld = _mat(frame.l_down)  # [a][alpha]
    lu = _mat(frame.l_up)    # [alpha][a]
    E = np.array(e.rows())
    Einv = np.array(sym3_inverse(e).rows())
    G = np.zeros((4, 4))
    G[0, 0] = -1.0
    G[1:, 1:] = ld.T @ E @ ld
    Gi = np.zeros((4, 4))
    Gi[0, 0] = -1.0
    Gi[1:, 1:] = lu @ Einv @ lu.T
    return MetricValue(G, Gi, root / abs(frame.det_l))


def potential_at(g: BianchiGroup, pot: PotentialSource, p: SpacetimePoint) -> np.ndarray:
    frame = frame_at(g, p.spatial())
    alpha = pot.at(p.u0)
    A = np.zeros(4)
    for al in range(3):
        A[al + 1] = sum(frame.l_down[a][al] * alpha[a] for a in range(3))
    return A


def field_strength_algebraic(g: BianchiGroup, pot: PotentialSource, p: SpacetimePoint) -> np.ndarray:
    """F_0beta = l^a_beta d(alpha_a)/du0,  F_alphabeta = l^a_alpha l^b_beta C^c_ba alpha_c."""
    frame = frame_at(g, p.spatial())
    ld = frame.l_down
    alpha = pot.at(p.u0)
    rate = pot.rate(p.u0)
    C = structure_constants(g)
    F = np.zeros((4, 4))
    for be in range(3):
        F[0, be + 1] = sum(ld[a][be] * rate[a] for a in range(3))
        F[be + 1, 0] = -F[0, be + 1]
    for al in range(3):
        for be in range(3):
            F[al + 1, be + 1] = sum(ld[a][al] * ld[b][be] * C[c][b][a] * alpha[c]
                                    for a in range(3) for b in range(3) for c in range(3))
    return F


def field_strength_numeric(g: BianchiGroup, pot: PotentialSource, p: SpacetimePoint,
                           h: float = DEFAULT_H_FIELD) -> np.ndarray:
    """F_ij = d_i A_j - d_j A_i with central differences in all four coordinates."""
    dA = np.zeros((4, 4))  # dA[i, j] = d_i A_j
    for i in range(4):
        dA[i] = (potential_at(g, pot, p.shifted(i, h)) - potential_at(g, pot, p.shifted(i, -h))) / (2 * h)
    return dA - dA.T


def _density(g, eta, pot, p, h):
    m = metric_at(g, eta, p)
    F = field_strength_numeric(g, pot, p, h)
    return m.sqrt_neg_g * (m.g_inv @ F @ m.g_inv.T), m.sqrt_neg_g


def maxwell_residual_full(g: BianchiGroup, eta: MetricSource, pot: PotentialSource, p: SpacetimePoint,
                          h: float = DEFAULT_H_FIELD) -> np.ndarray:
    """R^i = d_j(sqrt(-g) F^ij) / sqrt(-g), every derivative by central differences."""
    div = np.zeros(4)
    for j in range(4):
        wp, _ = _density(g, eta, pot, p.shifted(j, h), h)
        wm, _ = _density(g, eta, pot, p.shifted(j, -h), h)
        div += (wp[:, j] - wm[:, j]) / (2 * h)
    return div / metric_at(g, eta, p).sqrt_neg_g


def sqrt_neg_g_from_det(m: MetricValue) -> float:
    return math.sqrt(-np.linalg.det(m.g))


def random_points(rng, n: int, t_range: Sequence[float], box: float = 1.0) -> list[SpacetimePoint]:
    """``n`` points with u0 uniform in ``t_range`` and spatial coords in [-box, box]^3, sorted."""
    t0, t1 = t_range
    pts = [SpacetimePoint(rng.uniform(t0, t1), rng.uniform(-box, box), rng.uniform(-box, box),
                          rng.uniform(-box, box)) for _ in range(n)]
    return sorted(pts, key=lambda q: q.coords())


@dataclass(frozen=True)
class FieldState:
    """Electromagnetic degrees of freedom: alpha_a(u0) and beta^a(u0)."""

    alpha: tuple[float, float, float]
    beta: tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(float(x) for x in self.alpha))
        object.__setattr__(self, "beta", tuple(float(x) for x in self.beta))
        if len(self.alpha) != 3 or len(self.beta) != 3:
            raise ValueError("alpha and beta need three components each")

"""The solvable Bianchi groups I-VII: structure constants and invariant frames.

Conventions
-----------
``l_up[alpha][a]`` holds the frame vector components l^alpha_a, so column
``a`` is the vector field Y_a = l^alpha_a d_alpha.  ``l_down[a][alpha]``
holds the dual covectors l^a_alpha.  Structure constants are stored as
``C[c][a][b]`` with [Y_a, Y_b] = C^c_ab Y_c.  All indices are 0-based.

``FrameSample.det_l`` is det(l^alpha_a), the determinant of the *vector*
frame; the volume density of the spatial metric is its reciprocal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, DegenerateFrame, SingularMatrix
from .tensor import Mat3, Tensor3x3x3, epsilon_pair, freeze_tensor3, mat3_det, mat3_inverse, zero_tensor3

KINDS = ("I", "II", "III", "IV", "V", "VI", "VII")

# (k, n, eps) per kind for the exponential frame family
_KNE = {
    "I": (0.0, 0.0, 0.0),
    "II": (0.0, 0.0, 1.0),
    "III": (1.0, 0.0, 0.0),
    "IV": (1.0, 1.0, 1.0),
    "V": (1.0, 1.0, 0.0),
    "VI": (1.0, 2.0, 0.0),
}

MIN_SIN_ALPHA = 1e-8
DEFAULT_H_FRAME = 1e-5


@dataclass(frozen=True)
class BianchiGroup:
    kind: str
    alpha: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown Bianchi type {self.kind!r}; expected one of {', '.join(KINDS)}", "group")
        if self.kind == "VII":
            if self.alpha is None:
                raise ConfigError("type VII needs an angle 'alpha'", "alpha")
            a = float(self.alpha)
            if not math.isfinite(a) or abs(math.sin(a)) < MIN_SIN_ALPHA:
                raise ConfigError(f"alpha={self.alpha!r} gives a degenerate type VII frame (|sin alpha| < 1e-8)",
                                  "alpha")
            object.__setattr__(self, "alpha", a)
        elif self.alpha is not None:
            raise ConfigError(f"type {self.kind} takes no 'alpha' parameter", "alpha")

    @classmethod
    def from_config(cls, cfg: dict) -> BianchiGroup:
        if not isinstance(cfg, dict) or "group" not in cfg:
            raise ConfigError("missing 'group'", "group")
        alpha = cfg.get("alpha")
        if alpha is not None and (isinstance(alpha, bool) or not isinstance(alpha, (int, float))):
            raise ConfigError(f"alpha must be a number, got {alpha!r}", "alpha")
        return cls(str(cfg["group"]), alpha)

    def to_config(self) -> dict:
        out = {"group": self.kind}
        if self.kind == "VII":
            out["alpha"] = self.alpha
        return out

    @property
    def params(self) -> tuple[float, float, float]:
        """(k, n, eps) for types I-VI."""
        if self.kind == "VII":
            raise AttributeError("type VII is parameterised by alpha, not (k, n, eps)")
        return _KNE[self.kind]

    @property
    def demands_beta3_zero(self) -> bool:
        return self.kind in ("III", "IV", "V", "VI", "VII")

    def __str__(self) -> str:
        return f"VII(alpha={self.alpha})" if self.kind == "VII" else self.kind


@dataclass(frozen=True)
class FramePoint:
    u1: float
    u2: float
    u3: float

    def shifted(self, axis: int, delta: float) -> FramePoint:
        c = [self.u1, self.u2, self.u3]
        c[axis] += delta
        return FramePoint(*c)


@dataclass(frozen=True)
class FrameSample:
    l_up: Mat3
    l_down: Mat3
    det_l: float


def structure_constants(g: BianchiGroup) -> Tensor3x3x3:
    C = zero_tensor3()
    if g.kind == "VII":
        ca = math.cos(g.alpha)
        # C^a_23 = -d^a_1 + 2 cos(alpha) d^a_2,  C^2_13 = 1
        for c, val in ((0, -1.0), (1, 2.0 * ca)):
            C[c][1][2] = val
            C[c][2][1] = -val
        C[1][0][2] = 1.0
        C[1][2][0] = -1.0
        return freeze_tensor3(C)
    k, n, eps = g.params
    e13 = epsilon_pair(1, 3)
    e23 = epsilon_pair(2, 3)
    for c in range(3):
        for a in range(3):
            for b in range(3):
                C[c][a][b] = (k * (c == 0) * e13[a][b]
                              + (eps * (c == 0) + n * (c == 1)) * e23[a][b])
    return freeze_tensor3(C)


def frame_vectors(g: BianchiGroup, p: FramePoint) -> Mat3:
    """l^alpha_a as ``m[alpha][a]`` (no inversion, no checks)."""
    u = p.u3
    if g.kind == "VII":
        q = u * math.cos(g.alpha)
        ph = u * math.sin(g.alpha)
        e = math.exp(-q)
        return Mat3((
            (e * math.sin(ph), e * math.sin(ph - g.alpha), 0.0),
            (e * math.cos(ph), e * math.cos(ph - g.alpha), 0.0),
            (0.0, 0.0, 1.0),
        ))
    k, n, eps = g.params
    ek = math.exp(-k * u)
    return Mat3((
        (ek, -eps * u * ek, 0.0),
        (0.0, math.exp(-n * u), 0.0),
        (0.0, 0.0, 1.0),
    ))


def frame_at(g: BianchiGroup, p: FramePoint) -> FrameSample:
    l_up = frame_vectors(g, p)
    det_l = mat3_det(l_up)
    try:
        l_down = mat3_inverse(l_up)
    except SingularMatrix as exc:
        raise DegenerateFrame(f"frame of {g} degenerate at {p}: {exc}") from None
    return FrameSample(l_up, l_down, det_l)


def printed_dual_frame(g: BianchiGroup, p: FramePoint) -> Mat3:
    """The covector frame exactly as printed for types I-VI, ``m[a][alpha]``.

    Used only as a cross-check against the true inverse; the printed form
    puts the eps*u3 term in the a=2 row, which agrees with the inverse only
    when eps = 0.
    """
    k, n, eps = g.params
    u = p.u3
    en = math.exp(n * u)
    return Mat3((
        (math.exp(k * u), 0.0, 0.0),
        (eps * u * en, en, 0.0),
        (0.0, 0.0, 1.0),
    ))


def _d_frame(g: BianchiGroup, p: FramePoint, axis: int, h: float, order: int):
    """Derivative of l^alpha_a along coordinate ``axis``; returns [alpha][a]."""
    if order == 2:
        fp = frame_vectors(g, p.shifted(axis, h))
        fm = frame_vectors(g, p.shifted(axis, -h))
        return [[(fp[i][j] - fm[i][j]) / (2 * h) for j in range(3)] for i in range(3)]
    if order == 4:
        f2p = frame_vectors(g, p.shifted(axis, 2 * h))
        fp = frame_vectors(g, p.shifted(axis, h))
        fm = frame_vectors(g, p.shifted(axis, -h))
        f2m = frame_vectors(g, p.shifted(axis, -2 * h))
        return [[(-f2p[i][j] + 8 * fp[i][j] - 8 * fm[i][j] + f2m[i][j]) / (12 * h) for j in range(3)]
                for i in range(3)]
    raise ValueError("order must be 2 or 4")


def frame_divergence(g: BianchiGroup, p: FramePoint, h: float = DEFAULT_H_FRAME,
                     order: int = 2) -> tuple[float, float, float]:
    """omega_a = d_alpha l^alpha_a + l^alpha_a d_alpha(l) / l, by central differences.

    Here l = det(l^a_alpha) = 1 / det(l^alpha_a).  ``order=4`` switches to
    the five-point stencil.
    """
    sample = frame_at(g, p)
    l0 = 1.0 / sample.det_l
    jac = [_d_frame(g, p, ax, h, order) for ax in range(3)]

    def vol(q: FramePoint) -> float:
        return 1.0 / mat3_det(frame_vectors(g, q))

    dl = []
    for ax in range(3):
        if order == 2:
            dl.append((vol(p.shifted(ax, h)) - vol(p.shifted(ax, -h))) / (2 * h))
        else:
            dl.append((-vol(p.shifted(ax, 2 * h)) + 8 * vol(p.shifted(ax, h))
                       - 8 * vol(p.shifted(ax, -h)) + vol(p.shifted(ax, -2 * h))) / (12 * h))
    lu = sample.l_up
    return tuple(
        sum(jac[al][al][a] for al in range(3)) + sum(lu[al][a] * dl[al] for al in range(3)) / l0
        for a in range(3)
    )


def commutator_residuals(g: BianchiGroup, p: FramePoint, h: float = DEFAULT_H_FRAME):
    """[Y_a, Y_b]^alpha - C^c_ab l^alpha_c for a < b, as {(a, b): [3 floats]}."""
    lu = frame_at(g, p).l_up
    jac = [_d_frame(g, p, ax, h, 2) for ax in range(3)]  # jac[beta][alpha][a]
    C = structure_constants(g)
    out = {}
    for a in range(3):
        for b in range(a + 1, 3):
            res = []
            for al in range(3):
                bracket = sum(lu[be][a] * jac[be][al][b] - lu[be][b] * jac[be][al][a] for be in range(3))
                expected = sum(C[c][a][b] * lu[al][c] for c in range(3))
                res.append(bracket - expected)
            out[(a, b)] = res
    return out


def verify_commutators(g: BianchiGroup, p: FramePoint, h: float = DEFAULT_H_FRAME) -> float:
    return max(abs(x) for comps in commutator_residuals(g, p, h).values() for x in comps)


def jacobi_residual(g: BianchiGroup) -> float:
    C = structure_constants(g)
    worst = 0.0
    for a in range(3):
        for b in range(3):
            for c in range(3):
                for d in range(3):
                    s = sum(C[e][a][b] * C[d][e][c] + C[e][b][c] * C[d][e][a] + C[e][c][a] * C[d][e][b]
                            for e in range(3))
                    worst = max(worst, abs(s))
    return worst


def duality_residual(sample: FrameSample) -> float:
    lu, ld = sample.l_up, sample.l_down
    worst = 0.0
    for al in range(3):
        for be in range(3):
            s = sum(lu[al][a] * ld[a][be] for a in range(3))
            worst = max(worst, abs(s - (1.0 if al == be else 0.0)))
    return worst

"""Reduced Maxwell system: first-order ODEs in u0 for (alpha_a, beta^a).

With beta^a = eta eta^{ab} d(alpha_b)/du0 the field equations collapse to

    d(alpha_a)/du0 = eta_ab beta^b / eta
    eta d(beta^a)/du0 = (bilinear in alpha and eta_ab, fixed by C and omega)
    omega_a beta^a = 0

Three routes to the beta equation live here:

* :func:`eta_beta_dot_generic` -- the group-independent form built from the
  structure constants, sigma/gamma contractions and frame divergence.
* :data:`SPECIALIZED` -- hand-reduced per-group forms (the ones integrated).
* :data:`PRINTED` -- the per-group forms as published, kept so that
  :func:`compare_reduced_forms` can list every term where they disagree.
"""

from __future__ import annotations

import bisect
import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

from .errors import ConstraintViolation, NonRiemannianEta, StepUnderflow
from .geometry import FieldState, MetricSource, check_riemannian
from .groups import BianchiGroup, FramePoint, frame_divergence, structure_constants
from .tensor import Sym3

DEFAULT_STEP = 1e-3
DEFAULT_ADAPTIVE_TOL = 1e-9
MIN_STEP = 1e-12
CONSTRAINT_TOL = 1e-8
ORIGIN = FramePoint(0.0, 0.0, 0.0)

Vec3 = tuple[float, float, float]


@dataclass(frozen=True)
class ReducedAux:
    sigma: Vec3
    gamma: Vec3


@dataclass(frozen=True)
class ReducedState:
    u0: float
    state: FieldState

    @property
    def alpha(self) -> Vec3:
        return self.state.alpha

    @property
    def beta(self) -> Vec3:
        return self.state.beta


def reduced_aux(C, eta: Sym3, alpha: Sequence[float]) -> ReducedAux:
    """sigma_1 = C^a_23 alpha_a (cyclic), gamma_p = eta_pq sigma_q.

    The third gamma follows the row pattern (sigma . eta row 3); the source
    labels it gamma_1 a second time.
    """
    s1 = sum(C[a][1][2] * alpha[a] for a in range(3))
    s2 = sum(C[a][2][0] * alpha[a] for a in range(3))
    s3 = sum(C[a][0][1] * alpha[a] for a in range(3))
    g1 = s1 * eta.m11 + s2 * eta.m12 + s3 * eta.m13
    g2 = s1 * eta.m12 + s2 * eta.m22 + s3 * eta.m23
    g3 = s1 * eta.m13 + s2 * eta.m23 + s3 * eta.m33
    return ReducedAux((s1, s2, s3), (g1, g2, g3))


def _generic_from_gamma(C, omega, g1, g2, g3) -> Vec3:
    w1, w2, w3 = omega
    return (
        g1 * C[0][2][1] - g2 * (C[0][2][0] + w3) + g3 * (C[0][1][0] + w2),
        g1 * (C[1][2][1] + w3) + g2 * C[1][0][2] - g3 * (C[1][0][1] + w1),
        -g1 * (C[2][1][2] + w2) + g2 * (C[2][0][2] + w1) + g3 * C[2][1][0],
    )


def eta_beta_dot_generic(C, omega: Sequence[float], eta: Sym3, alpha: Sequence[float]) -> Vec3:
    """eta * d(beta^a)/du0 from structure constants and frame divergence."""
    aux = reduced_aux(C, eta, alpha)
    return _generic_from_gamma(C, omega, *aux.gamma)


def _generic_gamma_literal(C, omega, eta: Sym3, alpha) -> Vec3:
    # duplicated gamma_1 definition read literally: the later one overrides
    # the first and gamma_3 is never defined (taken as the overriding row too)
    s1, s2, s3 = reduced_aux(C, eta, alpha).sigma
    g1 = s1 * eta.m13 + s2 * eta.m23 + s3 * eta.m33
    g2 = s1 * eta.m12 + s2 * eta.m22 + s3 * eta.m23
    return _generic_from_gamma(C, omega, g1, g2, g1)


@lru_cache(maxsize=64)
def group_omega(g: BianchiGroup, h: float = 5e-4) -> Vec3:
    """Frame divergence at the origin (five-point stencil)."""
    return frame_divergence(g, ORIGIN, h, order=4)


def omega_position_spread(g: BianchiGroup, points: Sequence[FramePoint], h: float = 5e-4) -> float:
    """Largest deviation of omega_a over ``points`` from its value at the origin."""
    w0 = group_omega(g, h)
    return max((abs(x - y) for p in points for x, y in zip(frame_divergence(g, p, h, order=4), w0)),
               default=0.0)


# --- per-group forms --------------------------------------------------------
# Each returns eta * d(beta^a)/du0 as a function of (eta_ab, alpha_a[, cos alpha]).

def _vii_specialized(e: Sym3, a: Sequence[float], ca: float) -> Vec3:
    sigma = 2.0 * a[1] * ca - a[0]
    g2 = sigma * e.m12 - a[1] * e.m22
    g1 = sigma * e.m11 - a[1] * e.m12
    return (g1 - 2.0 * ca * g2, g2, 0.0)


SPECIALIZED: dict[str, Callable] = {
    "I": lambda e, a: (0.0, 0.0, 0.0),
    "II": lambda e, a: (-a[0] * e.m11, 0.0, 0.0),
    "III": lambda e, a: (0.0, -a[0] * e.m12, 0.0),
    "IV": lambda e, a: (-(a[0] + a[1]) * e.m11 - a[1] * e.m12 + a[0] * e.m22,
                        (a[0] + a[1]) * e.m11 - a[0] * e.m12, 0.0),
    "V": lambda e, a: (a[0] * e.m22 - a[1] * e.m12, a[1] * e.m11 - a[0] * e.m12, 0.0),
    "VI": lambda e, a: (2.0 * (a[0] * e.m22 - 2.0 * a[1] * e.m12), 2.0 * a[1] * e.m11 - a[0] * e.m12, 0.0),
}

# Published right-hand sides, read as eta * d(beta)/du0 (the generic form's
# normalisation; the per-group display drops the factor eta).
PRINTED: dict[str, Callable] = {
    "I": lambda e, a: (0.0, 0.0, 0.0),
    "II": lambda e, a: (-a[0] * e.m11, 0.0, 0.0),
    "III": lambda e, a: (-a[0] * e.m22, 0.0, 0.0),
    "IV": lambda e, a: (-((a[0] + a[1]) * e.m11 + a[1] * e.m12 - a[0] * e.m22),
                        (a[0] + a[1]) * e.m11 - a[0] * e.m12, 0.0),
    "V": lambda e, a: (-a[1] * e.m12 + a[0] * e.m22, a[0] * e.m12 - a[1] * e.m11, 0.0),
    "VI": lambda e, a: (-(2.0 * a[1] * e.m12 - a[0] * e.m22), 2.0 * a[1] * e.m11 - a[0] * e.m12, 0.0),
}


def eta_beta_dot_specialized(g: BianchiGroup, eta: Sym3, alpha: Sequence[float]) -> Vec3:
    if g.kind == "VII":
        return _vii_specialized(eta, alpha, math.cos(g.alpha))
    return SPECIALIZED[g.kind](eta, alpha)


def eta_beta_dot_printed(g: BianchiGroup, eta: Sym3, alpha: Sequence[float]) -> Vec3:
    if g.kind == "VII":
        # the type VII system is published in sigma/gamma form, identical to ours
        return _vii_specialized(eta, alpha, math.cos(g.alpha))
    return PRINTED[g.kind](eta, alpha)


def reduced_rhs(g: BianchiGroup, eta_fn: MetricSource, s: ReducedState, form: str = "specialized"
                ) -> tuple[Vec3, Vec3]:
    """Time derivatives (d alpha_a/du0, d beta^a/du0) at state ``s``.

    ``form`` selects the beta equation: "specialized" (default), "generic"
    or "printed".
    """
    e = eta_fn.at(s.u0)
    root = check_riemannian(e, s.u0)
    alpha, beta = s.alpha, s.beta
    if form == "specialized":
        eb = eta_beta_dot_specialized(g, e, alpha)
    elif form == "generic":
        eb = eta_beta_dot_generic(structure_constants(g), group_omega(g), e, alpha)
    elif form == "printed":
        eb = eta_beta_dot_printed(g, e, alpha)
    else:
        raise ValueError(f"unknown form {form!r}")
    alpha_dot = tuple(x / root for x in e.matvec(beta))
    beta_dot = tuple(x / root for x in eb)
    return alpha_dot, beta_dot


def constraint_check(g: BianchiGroup, s: ReducedState, p: FramePoint = ORIGIN) -> dict:
    """Residuals of omega_a beta^a = 0 and, where the group demands it, beta^3 = 0.

    ``beta3`` is None for groups without the beta^3 constraint.
    """
    omega = group_omega(g) if p == ORIGIN else frame_divergence(g, p, 5e-4, order=4)
    ob = sum(w * b for w, b in zip(omega, s.beta))
    return {
        "omega_beta": abs(ob),
        "beta3": abs(s.beta[2]) if g.demands_beta3_zero else None,
    }


def _max_constraint(c: dict) -> float:
    return max(c["omega_beta"], c["beta3"] or 0.0)


# --- comparison of forms ----------------------------------------------------

_ETA_UNITS = {
    "eta11": Sym3(1, 0, 0, 0, 0, 0), "eta12": Sym3(0, 1, 0, 0, 0, 0), "eta13": Sym3(0, 0, 1, 0, 0, 0),
    "eta22": Sym3(0, 0, 0, 1, 0, 0), "eta23": Sym3(0, 0, 0, 0, 1, 0), "eta33": Sym3(0, 0, 0, 0, 0, 1),
}
_ALPHA_UNITS = {"alpha1": (1.0, 0.0, 0.0), "alpha2": (0.0, 1.0, 0.0), "alpha3": (0.0, 0.0, 1.0)}


def bilinear_terms(fn: Callable[[Sym3, Vec3], Vec3], ndigits: int = 9) -> list[dict[str, float]]:
    """Coefficients of alpha_i * eta_jk in each component of a bilinear form."""
    out = [{}, {}, {}]
    for an, av in _ALPHA_UNITS.items():
        for en, ev in _ETA_UNITS.items():
            vals = fn(ev, av)
            for comp in range(3):
                c = round(vals[comp], ndigits) + 0.0
                if c != 0.0:
                    out[comp][f"{an}*{en}"] = c
    return out


def term_discrepancies(reference: list[dict], other: list[dict]) -> list[dict]:
    diffs = []
    for comp in range(3):
        for term in sorted(set(reference[comp]) | set(other[comp])):
            r, o = reference[comp].get(term, 0.0), other[comp].get(term, 0.0)
            if r != o:
                diffs.append({"component": f"beta{comp + 1}", "term": term, "generic": r, "printed": o})
    return diffs


def compare_reduced_forms(g: BianchiGroup, samples: Sequence[tuple[Sym3, Vec3]]) -> dict:
    """Evaluate the generic, specialized and printed beta equations on ``samples``.

    Returns the max absolute disagreement of each form with the generic one
    and the term-level discrepancies of the printed form.
    """
    C = structure_constants(g)
    omega = group_omega(g)

    def generic(e, a):
        return eta_beta_dot_generic(C, omega, e, a)

    def gamma_literal(e, a):
        return _generic_gamma_literal(C, omega, e, a)

    forms = {
        "specialized": lambda e, a: eta_beta_dot_specialized(g, e, a),
        "printed": lambda e, a: eta_beta_dot_printed(g, e, a),
        "generic_gamma_literal": gamma_literal,
    }
    max_diff = {}
    for name, fn in forms.items():
        worst = 0.0
        for e, a in samples:
            ref = generic(e, a)
            worst = max(worst, max(abs(x - y) for x, y in zip(fn(e, a), ref)))
        max_diff[name] = worst
    ref_terms = bilinear_terms(generic)
    return {
        "group": str(g),
        "omega": list(omega),
        "samples": len(samples),
        "max_abs_diff_vs_generic": max_diff,
        "printed_term_discrepancies": term_discrepancies(ref_terms, bilinear_terms(forms["printed"])),
        "specialized_term_discrepancies": term_discrepancies(ref_terms, bilinear_terms(forms["specialized"])),
        "gamma_literal_term_discrepancies": term_discrepancies(ref_terms, bilinear_terms(gamma_literal)),
    }


# --- integration ------------------------------------------------------------

@dataclass
class Trajectory:
    """Integrated solution: every accepted step (``knots``) and the requested outputs."""

    group: BianchiGroup
    knots_t: list[float] = field(default_factory=list)
    knots_y: list[tuple[float, ...]] = field(default_factory=list)
    knots_dy: list[tuple[float, ...]] = field(default_factory=list)
    outputs: list[ReducedState] = field(default_factory=list)
    constraints: list[dict] = field(default_factory=list)

    def constraint_drift(self) -> dict:
        ob = max((c["omega_beta"] for c in self.constraints), default=0.0)
        b3 = [c["beta3"] for c in self.constraints if c["beta3"] is not None]
        return {"omega_beta": ob, "beta3": max(b3) if b3 else None}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["u0", "alpha_1", "alpha_2", "alpha_3", "beta_1", "beta_2", "beta_3",
                    "constraint_omega", "constraint_beta3"])
        for s, c in zip(self.outputs, self.constraints):
            b3 = "" if c["beta3"] is None else repr(c["beta3"])
            w.writerow([repr(s.u0), *(repr(x) for x in s.alpha), *(repr(x) for x in s.beta),
                        repr(c["omega_beta"]), b3])
        return buf.getvalue()

    def potential(self) -> HermitePotential:
        return HermitePotential(self.knots_t, [y[:3] for y in self.knots_y], [d[:3] for d in self.knots_dy])


class HermitePotential:
    """C1 cubic Hermite interpolant of alpha_a(u0) from stored values and rates."""

    def __init__(self, ts: Sequence[float], ys: Sequence[Sequence[float]], dys: Sequence[Sequence[float]]):
        if len(ts) < 2:
            raise ValueError("need at least two knots")
        self.ts = list(ts)
        self.ys = [tuple(y) for y in ys]
        self.dys = [tuple(d) for d in dys]

    def _locate(self, t: float) -> int:
        if t < self.ts[0] - 1e-12 or t > self.ts[-1] + 1e-12:
            raise ValueError(f"u0={t} outside interpolation range [{self.ts[0]}, {self.ts[-1]}]")
        return min(max(bisect.bisect_right(self.ts, t) - 1, 0), len(self.ts) - 2)

    def _eval(self, t: float, deriv: bool) -> tuple[float, float, float]:
        i = self._locate(t)
        t0, t1 = self.ts[i], self.ts[i + 1]
        h = t1 - t0
        s = (t - t0) / h
        if deriv:
            h00, h10 = (6 * s * s - 6 * s) / h, 3 * s * s - 4 * s + 1
            h01, h11 = (-6 * s * s + 6 * s) / h, 3 * s * s - 2 * s
        else:
            h00, h10 = 2 * s ** 3 - 3 * s ** 2 + 1, (s ** 3 - 2 * s ** 2 + s) * h
            h01, h11 = -2 * s ** 3 + 3 * s ** 2, (s ** 3 - s ** 2) * h
        y0, y1, d0, d1 = self.ys[i], self.ys[i + 1], self.dys[i], self.dys[i + 1]
        return tuple(h00 * y0[k] + h10 * d0[k] + h01 * y1[k] + h11 * d1[k] for k in range(3))

    def at(self, t: float) -> tuple[float, float, float]:
        return self._eval(t, False)

    def rate(self, t: float) -> tuple[float, float, float]:
        return self._eval(t, True)


def _rhs_vec(g, eta_fn, form):
    def f(t, y):
        ad, bd = reduced_rhs(g, eta_fn, ReducedState(t, FieldState(y[:3], y[3:])), form)
        return ad + bd
    return f


def _rk4_step(f, t, y, h, k1=None):
    k1 = f(t, y) if k1 is None else k1
    k2 = f(t + 0.5 * h, tuple(yi + 0.5 * h * ki for yi, ki in zip(y, k1)))
    k3 = f(t + 0.5 * h, tuple(yi + 0.5 * h * ki for yi, ki in zip(y, k2)))
    k4 = f(t + h, tuple(yi + h * ki for yi, ki in zip(y, k3)))
    return tuple(yi + h / 6.0 * (a + 2 * b + 2 * c + d) for yi, a, b, c, d in zip(y, k1, k2, k3, k4))


def integrate_reduced(g: BianchiGroup, eta_fn: MetricSource, s0: ReducedState, t1: float, *,
                      step: float = DEFAULT_STEP, adaptive: bool = False, tol: float = DEFAULT_ADAPTIVE_TOL,
                      output_times: Sequence[float] | None = None, form: str = "specialized",
                      constraint_tol: float = CONSTRAINT_TOL) -> Trajectory:
    """Classic RK4 from ``s0.u0`` to ``t1``.

    Fixed-step mode splits each output interval into equal steps no larger
    than ``step``. Adaptive mode uses step doubling with per-step error
    ``tol`` and raises :class:`StepUnderflow` below 1e-12.

    Raises:
        ConstraintViolation: if ``s0`` is off-shell by more than ``constraint_tol``.
        NonRiemannianEta: if eta_ab stops being positive definite on the way.
    """
    if not t1 > s0.u0:
        raise ValueError(f"t1={t1} must exceed the initial time {s0.u0}")
    if step <= 0:
        raise ValueError("step must be positive")
    c0 = constraint_check(g, s0)
    if _max_constraint(c0) > constraint_tol:
        raise ConstraintViolation(
            f"initial data off-shell for group {g}: |omega.beta|={c0['omega_beta']:.3e}, beta3={c0['beta3']}",
            "initial")
    if output_times is None:
        output_times = [s0.u0, t1]
    outs = sorted(set(float(t) for t in output_times) | {float(s0.u0)})
    if outs[0] < s0.u0 or outs[-1] > t1 + 1e-15:
        raise ValueError("output times must lie in [u0, t1]")

    f = _rhs_vec(g, eta_fn, form)
    traj = Trajectory(g)
    t, y = float(s0.u0), tuple(s0.alpha) + tuple(s0.beta)
    dy = f(t, y)

    def record_knot():
        traj.knots_t.append(t)
        traj.knots_y.append(y)
        traj.knots_dy.append(dy)

    def record_output():
        rs = ReducedState(t, FieldState(y[:3], y[3:]))
        traj.outputs.append(rs)
        traj.constraints.append(constraint_check(g, rs))

    record_knot()
    record_output()
    h = step
    for target in outs[1:]:
        if not adaptive:
            n = max(1, math.ceil((target - t) / step - 1e-9))
            t_start = t
            hh = (target - t_start) / n
            for i in range(n):
                y = _rk4_step(f, t, y, hh, dy)
                t = target if i == n - 1 else t_start + (i + 1) * hh
                dy = f(t, y)
                record_knot()
        else:
            while t < target:
                h = min(h, target - t)
                if h < MIN_STEP:
                    raise StepUnderflow(f"adaptive step {h:.3e} below {MIN_STEP:.0e} at u0={t}")
                full = _rk4_step(f, t, y, h, dy)
                half = _rk4_step(f, t, y, 0.5 * h, dy)
                two = _rk4_step(f, t + 0.5 * h, half, 0.5 * h)
                err = max(abs(a - b) for a, b in zip(two, full)) / 15.0
                if err <= tol:
                    t = target if target - (t + h) < 1e-14 else t + h
                    y = tuple(a + (a - b) / 15.0 for a, b in zip(two, full))
                    dy = f(t, y)
                    record_knot()
                fac = 2.0 if err == 0.0 else min(2.0, max(0.2, 0.9 * (tol / err) ** 0.2))
                h *= fac
                if h < MIN_STEP:
                    raise StepUnderflow(f"adaptive step {h:.3e} below {MIN_STEP:.0e} at u0={t}")
        record_output()
    return traj


__all__ = [
    "ReducedAux", "ReducedState", "Trajectory", "HermitePotential", "reduced_aux", "reduced_rhs",
    "eta_beta_dot_generic", "eta_beta_dot_specialized", "eta_beta_dot_printed", "constraint_check",
    "compare_reduced_forms", "integrate_reduced", "group_omega", "omega_position_spread",
    "NonRiemannianEta",
]

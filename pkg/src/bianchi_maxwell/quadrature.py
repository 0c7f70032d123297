"""One-dimensional quadrature: adaptive Simpson plus a smooth local continuation.

Adaptive Simpson picks a different subdivision for every upper limit, so
``t -> integral(f, t0, t)`` carries noise at the tolerance level.  That noise
is harmless for a single value but is amplified by nested finite differences
(the 4D field-equation residual differentiates twice).  :class:`Integrator`
therefore supports an *anchor*: the adaptive result is computed once up to the
anchor and every nearby upper limit is reached with a fixed Gauss-Legendre
rule, which is a smooth function of the limit.
"""

from __future__ import annotations

import math
from typing import Callable, Hashable

import numpy as np

from .errors import QuadratureFailure

Func = Callable[[float], float]

MIN_DEPTH = 3


def adaptive_simpson(f: Func, a: float, b: float, tol: float = 1e-9, max_depth: int = 50) -> float:
    """Adaptive Simpson with Richardson correction; ``tol`` is absolute.

    Raises:
        QuadratureFailure: if a subinterval still misses its share of the
            tolerance after ``max_depth`` bisections, or the integrand is
            not finite.
    """
    if a == b:
        return 0.0
    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    result = _asr(f, a, b, fa, fm, fb, whole, tol, max_depth, 0)
    if not math.isfinite(result):
        raise QuadratureFailure(f"non-finite integral on [{a}, {b}]")
    return result


def _asr(f, a, b, fa, fm, fb, whole, tol, max_depth, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if depth >= MIN_DEPTH and abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    if depth >= max_depth:
        raise QuadratureFailure(
            f"adaptive Simpson did not reach tolerance {tol:.1e} on [{a:.6g}, {b:.6g}]"
            f" (error estimate {abs(delta) / 15.0:.2e})")
    return (_asr(f, a, m, fa, flm, fm, left, 0.5 * tol, max_depth, depth + 1)
            + _asr(f, m, b, fm, frm, fb, right, 0.5 * tol, max_depth, depth + 1))


def simpson_fixed(f: Func, a: float, b: float, panels: int) -> float:
    """Composite Simpson rule with ``panels`` equal panels (2*panels+1 nodes)."""
    if panels < 1:
        raise ValueError("panels must be >= 1")
    h = (b - a) / panels
    total = f(a) + f(b)
    for i in range(panels):
        x0 = a + i * h
        total += 4.0 * f(x0 + 0.5 * h)
        if i:
            total += 2.0 * f(x0)
    return total * h / 6.0


_GL_CACHE: dict[int, tuple[tuple[float, ...], tuple[float, ...]]] = {}


def gauss_legendre(f: Func, a: float, b: float, n: int = 12) -> float:
    if n not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(n)
        _GL_CACHE[n] = (tuple(float(v) for v in x), tuple(float(v) for v in w))
    nodes, weights = _GL_CACHE[n]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return half * sum(w * f(mid + half * x) for x, w in zip(nodes, weights))


class Integrator:
    """Definite integrals from a fixed lower limit, optionally anchored.

    ``integrate(f, lower, upper, anchor)`` returns the adaptive result when
    ``anchor`` is None or far from ``upper``; otherwise it returns the cached
    adaptive integral up to ``anchor`` plus a Gauss-Legendre piece from
    ``anchor`` to ``upper``.  Integrands must be hashable (plain functions
    are) because the anchored base values are cached per integrand.

    ``fixed_panels`` switches the base rule to composite Simpson with that
    many panels; it exists to cross-check the adaptive rule.
    """

    def __init__(self, tol: float = 1e-9, *, anchor_radius: float = 0.02, gl_nodes: int = 12,
                 max_depth: int = 50, fixed_panels: int | None = None):
        if tol <= 0:
            raise ValueError("quadrature tolerance must be positive")
        self.tol = tol
        self.anchor_radius = anchor_radius
        self.gl_nodes = gl_nodes
        self.max_depth = max_depth
        self.fixed_panels = fixed_panels
        self._base: dict[tuple[Hashable, float, float], float] = {}

    def base(self, f: Func, a: float, b: float) -> float:
        if self.fixed_panels is not None:
            return simpson_fixed(f, a, b, self.fixed_panels)
        return adaptive_simpson(f, a, b, self.tol, self.max_depth)

    def integrate(self, f: Func, lower: float, upper: float, anchor: float | None = None) -> float:
        if anchor is None or abs(upper - anchor) > self.anchor_radius:
            return self.base(f, lower, upper)
        key = (f, lower, anchor)
        if key not in self._base:
            self._base[key] = self.base(f, lower, anchor)
        if upper == anchor:
            return self._base[key]
        return self._base[key] + gauss_legendre(f, anchor, upper, self.gl_nodes)

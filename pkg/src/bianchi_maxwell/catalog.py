"""Closed-form solution catalog and its residual-based adjudication.

Each :class:`SolutionCase` names one family of exact solutions (type I, or
one of the type VII branches) together with its free constants and free
functions.  :class:`CaseEvaluator` turns a case into values of alpha_a,
beta^a and eta_ab at any u0; :func:`residual_reduced` substitutes them into
the reduced field equations.

Several published formulas disagree with each other.  Every disputed piece
is a *variant axis*: the first option of each axis is the form that follows
from the reduced equations, the others are the published readings.
:func:`adjudicate_variants` runs the residual check once per variant and
reports which ones the field equations actually accept.

Type VII reduced system, written with sigma = 2 alpha_2 cos(a) - alpha_1 and
B = d(beta^1)/du0 + 2 cos(a) d(beta^2)/du0::

    eta dbeta2            = sigma eta12 - alpha2 eta22
    eta B                 = sigma eta11 - alpha2 eta12
    eta dalpha1           = beta1 eta11 + beta2 eta12
    eta dalpha2           = beta1 eta12 + beta2 eta22
    eta dalpha3           = beta1 eta13 + beta2 eta23
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .errors import ConfigError, DomainError, NonRiemannianEta, ParseError
from .expr import Expr, as_expr
from .geometry import FieldState, SpacetimePoint, check_riemannian, maxwell_residual_full
from .groups import BianchiGroup
from .quadrature import Integrator
from .tensor import Sym3, sym3_det

DEFAULT_QUAD_TOL = 1e-9
DEFAULT_THRESHOLD = 1e-6
DET_TOL = 1e-8
DERIV_STEP = 1e-3
DENOM_RTOL = 1e-10

VII_COMMON_FUNCS = ("eta", "eta13", "eta23")
PERTURB_KEYS = ("eta11", "eta12", "eta13", "eta22", "eta23", "eta33")


@dataclass(frozen=True)
class CaseSpec:
    case_id: str
    group: str
    constants: tuple[str, ...]
    functions: tuple[str, ...]
    axes: dict = field(default_factory=dict)
    optional_constants: dict = field(default_factory=dict)
    summary: str = ""

    def default_variant(self) -> dict:
        return {axis: options[0] for axis, options in self.axes.items()}


_ETA33 = ("determinant", "printed")
_ALPHA3 = ("over_eta", "printed")
_OMEGA_TERM = ("derived", "printed")
_ETA11_A1 = ("derived", "printed_4_1", "printed_3")
_ETA22_A1 = ("derived", "printed_4_1")

CASES: dict[str, CaseSpec] = {spec.case_id: spec for spec in (
    CaseSpec("G1_16b", "I", ("beta1", "beta2", "beta3"),
             ("eta11", "eta12", "eta13", "eta22", "eta23", "eta33"),
             optional_constants={"alpha1_0": 0.0, "alpha2_0": 0.0, "alpha3_0": 0.0},
             summary="type I: beta^a constant, alpha_a = beta^b int eta_ab/eta"),
    CaseSpec("VII_4_1_1a", "VII", ("c", "a"), ("beta1", "beta2") + VII_COMMON_FUNCS,
             axes={"angle": ("half_angle", "printed"), "omega_term": _OMEGA_TERM,
                   "eta11": _ETA11_A1, "eta22": _ETA22_A1, "eta33": _ETA33, "alpha3": _ALPHA3},
             optional_constants={"alpha3_0": 0.0},
             summary="alpha2 != 0, D != 0, constant angle omega = a"),
    CaseSpec("VII_4_1_1b", "VII", ("c",), ("omega", "beta1", "beta2") + VII_COMMON_FUNCS,
             axes={"rho": ("derived", "printed_4_1", "printed_3"), "omega_term": _OMEGA_TERM,
                   "eta11": _ETA11_A1, "eta22": _ETA22_A1, "eta33": _ETA33, "alpha3": _ALPHA3},
             optional_constants={"alpha3_0": 0.0},
             summary="alpha2 != 0, D != 0, omega(u0) as time variable; beta^p given as functions of omega"),
    CaseSpec("VII_4_1_1c", "VII", ("c",), ("beta1", "beta2") + VII_COMMON_FUNCS,
             axes={"omega_term": _OMEGA_TERM, "eta33": _ETA33, "alpha3": _ALPHA3},
             optional_constants={"alpha3_0": 0.0},
             summary="alpha1 = 0, alpha2 = sqrt(rho)"),
    CaseSpec("VII_4_1_2a", "VII", ("c",), ("beta2", "eta11") + VII_COMMON_FUNCS,
             axes={"eta12": ("derived", "printed"), "eta22": ("derived", "printed_a", "printed_b"),
                   "eta33": _ETA33, "alpha3": _ALPHA3},
             optional_constants={"alpha3_0": 0.0},
             summary="D = 0, alpha1 = 0, beta1 = -2 cos(a) beta2, alpha2^2 + beta2^2 = c^2"),
    CaseSpec("VII_4_1_2b", "VII", ("a", "c"), ("omega", "eta11") + VII_COMMON_FUNCS,
             axes={"eta12": ("derived", "printed"), "eta22": ("derived", "printed"),
                   "eta33": _ETA33, "alpha3": _ALPHA3},
             optional_constants={"alpha3_0": 0.0},
             summary="D = 0, alpha1 = a c sin(omega), alpha2 = c sin(omega)"),
    CaseSpec("VII_4_2_1", "VII", ("c",), ("beta1", "beta2") + VII_COMMON_FUNCS,
             axes={"alpha1": ("derived", "printed_4_2", "printed_3"), "eta33": _ETA33, "alpha3": _ALPHA3},
             optional_constants={"alpha3_0": 0.0},
             summary="alpha2 = 0, alpha1 from the first integral"),
    CaseSpec("VII_4_2_2", "VII", ("c",), ("omega", "eta22", "eta", "eta23", "alpha3"),
             axes={"eta11": ("derived", "printed"), "eta33": _ETA33},
             summary="alpha2 = beta2 = 0, alpha1 = c sin(omega), beta1 = c cos(omega)"),
)}


def _as_number(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", name)
    if not math.isfinite(value):
        raise ConfigError("must be finite", name)
    return float(value)


@dataclass(frozen=True)
class SolutionCase:
    case_id: str
    constants: dict
    functions: dict
    alpha: float | None = None
    interval: tuple[float, float] = (0.0, 1.0)
    variant: dict = field(default_factory=dict)
    perturb: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.case_id not in CASES:
            raise ConfigError(f"unknown case {self.case_id!r}; expected one of {', '.join(CASES)}", "case")
        spec = CASES[self.case_id]
        consts = {}
        allowed = set(spec.constants) | set(spec.optional_constants)
        extra = set(self.constants) - allowed
        if extra:
            raise ConfigError(f"unexpected constants {sorted(extra)} for {self.case_id}", "constants")
        for name in spec.constants:
            if name not in self.constants:
                raise ConfigError(f"missing constant {name!r} for {self.case_id}", "constants")
        for name in sorted(allowed):
            if name in self.constants:
                consts[name] = _as_number(self.constants[name], f"constants.{name}")
            elif name in spec.optional_constants:
                consts[name] = float(spec.optional_constants[name])
        object.__setattr__(self, "constants", consts)

        extra = set(self.functions) - set(spec.functions)
        if extra:
            raise ConfigError(f"unexpected functions {sorted(extra)} for {self.case_id}", "functions")
        funcs = {}
        for name in spec.functions:
            if name not in self.functions:
                raise ConfigError(f"missing function {name!r} for {self.case_id}", "functions")
            try:
                funcs[name] = as_expr(self.functions[name])
            except (TypeError, ValueError, ParseError) as exc:
                raise ConfigError(str(exc), f"functions.{name}") from None
        object.__setattr__(self, "functions", funcs)

        if spec.group == "VII":
            if self.alpha is None:
                raise ConfigError(f"{self.case_id} needs the group angle 'alpha'", "alpha")
            BianchiGroup("VII", _as_number(self.alpha, "alpha"))
            object.__setattr__(self, "alpha", float(self.alpha))
        elif self.alpha is not None:
            raise ConfigError(f"{self.case_id} takes no group angle", "alpha")

        try:
            t0, t1 = (float(x) for x in self.interval)
        except (TypeError, ValueError):
            raise ConfigError(f"interval must be [t0, t1], got {self.interval!r}", "interval") from None
        if not t1 > t0:
            raise ConfigError(f"interval [{t0}, {t1}] is empty", "interval")
        object.__setattr__(self, "interval", (t0, t1))

        variant = spec.default_variant()
        for axis, option in dict(self.variant).items():
            if axis not in spec.axes:
                raise ConfigError(f"{self.case_id} has no variant axis {axis!r}; axes: {sorted(spec.axes)}",
                                  "variant")
            if option not in spec.axes[axis]:
                raise ConfigError(f"option {option!r} not in {spec.axes[axis]}", f"variant.{axis}")
            variant[axis] = option
        object.__setattr__(self, "variant", variant)

        perturb = {}
        for key, factor in dict(self.perturb).items():
            if key not in PERTURB_KEYS:
                raise ConfigError(f"cannot perturb {key!r}; use one of {', '.join(PERTURB_KEYS)}", "perturb")
            perturb[key] = _as_number(factor, f"perturb.{key}")
        object.__setattr__(self, "perturb", perturb)

    @property
    def spec(self) -> CaseSpec:
        return CASES[self.case_id]

    @property
    def group(self) -> BianchiGroup:
        return BianchiGroup("VII", self.alpha) if self.spec.group == "VII" else BianchiGroup("I")

    @classmethod
    def from_config(cls, cfg: dict) -> SolutionCase:
        if not isinstance(cfg, dict):
            raise ConfigError("case config must be a JSON object")
        if "case" not in cfg:
            raise ConfigError("missing 'case'", "case")
        interval = cfg.get("interval", (0.0, 1.0))
        return cls(str(cfg["case"]), dict(cfg.get("constants", {})), dict(cfg.get("functions", {})),
                   cfg.get("alpha"), tuple(interval) if isinstance(interval, (list, tuple)) else interval,
                   dict(cfg.get("variant", {})), dict(cfg.get("perturb", {})))

    def to_config(self) -> dict:
        out = {
            "case": self.case_id,
            "constants": dict(self.constants),
            "functions": {k: str(v) for k, v in self.functions.items()},
            "interval": list(self.interval),
            "variant": dict(self.variant),
        }
        if self.alpha is not None:
            out["alpha"] = self.alpha
        if self.perturb:
            out["perturb"] = dict(self.perturb)
        return out

    def with_variant(self, variant: dict) -> SolutionCase:
        return SolutionCase(self.case_id, self.constants, self.functions, self.alpha, self.interval, variant,
                            self.perturb)


@dataclass(frozen=True)
class CatalogSample:
    u0: float
    field: FieldState
    eta: Sym3
    alpha3: float
    eta_scalar: float


def _d5(f: Callable[[float], float], t: float, h: float) -> float:
    return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h)


def _d5_vec(f, t, h):
    vals = [f(t + k * h) for k in (2, 1, -1, -2)]
    return tuple((-a + 8 * b - 8 * c + d) / (12 * h) for a, b, c, d in zip(*vals))


class CaseEvaluator:
    """Evaluates one :class:`SolutionCase` (with its chosen variant).

    Quantities defined by quadrature are anchored at ``anchor`` (default:
    the evaluation time itself) so that everything is smooth under the
    finite-difference stencils used for time derivatives.
    """

    def __init__(self, case: SolutionCase, quad_tol: float = DEFAULT_QUAD_TOL, *,
                 fixed_panels: int | None = None, deriv_step: float = DERIV_STEP):
        self.case = case
        self.v = case.variant
        self.k = case.constants
        self.f = case.functions
        self.t0 = case.interval[0]
        self.quad = Integrator(quad_tol, fixed_panels=fixed_panels)
        self.hd = deriv_step
        self.ca = math.cos(case.alpha) if case.alpha is not None else 0.0
        self._cache: dict = {}
        kind = case.case_id
        self._betas = {
            "VII_4_1_1a": self._betas_plain, "VII_4_1_1c": self._betas_plain, "VII_4_2_1": self._betas_plain,
            "VII_4_1_1b": self._betas_of_omega, "VII_4_1_2a": self._betas_2a, "VII_4_1_2b": self._betas_2b,
            "VII_4_2_2": self._betas_422, "G1_16b": self._betas_g1,
        }[kind]
        self._primary_fn = {
            "G1_16b": self._primary_g1, "VII_4_1_1a": self._primary_1a, "VII_4_1_1b": self._primary_1b,
            "VII_4_1_1c": self._primary_1c, "VII_4_1_2a": self._primary_2a, "VII_4_1_2b": self._primary_2b,
            "VII_4_2_1": self._primary_421, "VII_4_2_2": self._primary_422,
        }[kind]
        self._metric_fn = {
            "G1_16b": self._metric_g1, "VII_4_1_1a": self._metric_a1, "VII_4_1_1b": self._metric_a1,
            "VII_4_1_1c": self._metric_1c, "VII_4_1_2a": self._metric_2a, "VII_4_1_2b": self._metric_2b,
            "VII_4_2_1": self._metric_421, "VII_4_2_2": self._metric_422,
        }[kind]

    # -- helpers -------------------------------------------------------------

    def _integral(self, f, lower, upper, anchor):
        return self.quad.integrate(f, lower, upper, anchor)

    def _guard(self, value, scale, name, t):
        if abs(value) < DENOM_RTOL * max(scale, 1.0):
            raise DomainError(f"{name} = {value:.3e} too close to zero at u0={t}", u0=t, quantity=name, value=value)
        return value

    def _sqrt(self, value, name, t):
        if value < 0.0:
            raise DomainError(f"negative radicand {name} = {value:.6e} at u0={t}", u0=t, quantity=name, value=value)
        return math.sqrt(value)

    def _eta_scalar(self, t):
        e = self.f["eta"](t)
        if not e > 0.0:
            raise DomainError(f"eta = {e} must be positive at u0={t}", u0=t, quantity="eta", value=e)
        return e

    def _deriv(self, f, t):
        return _d5(f, t, self.hd)

    # -- beta^p(u0) per case ----------------------------------------------------

    def _betas_plain(self, t):
        return self.f["beta1"](t), self.f["beta2"](t)

    def _betas_of_omega(self, t):
        w = self.f["omega"](t)
        return self.f["beta1"](w), self.f["beta2"](w)

    def _betas_2a(self, t):
        b2 = self.f["beta2"](t)
        return -2.0 * self.ca * b2, b2

    def _betas_2b(self, t):
        w = self.f["omega"](t)
        c, a = self.k["c"], self.k["a"]
        return c * (a - 2.0 * self.ca) * math.cos(w), c * math.cos(w)

    def _betas_422(self, t):
        return self.k["c"] * math.cos(self.f["omega"](t)), 0.0

    def _betas_g1(self, t):
        return self.k["beta1"], self.k["beta2"]

    # -- integrands (bound methods are stable cache keys) --------------------

    def _omega_integrand(self, t):
        """Omega(u0) for the constant-angle families (derivatives in u0)."""
        b1, b2 = self.f["beta1"](t), self.f["beta2"](t)
        d1, d2 = self._deriv(self.f["beta1"], t), self._deriv(self.f["beta2"], t)
        return self._omega_combo(b1, b2, d1, d2)

    def _omega_combo(self, b1, b2, d1, d2):
        cross = b1 * d2 if self.v["omega_term"] == "derived" else b2 * d1
        return b1 * d1 + b2 * d2 + 2.0 * self.ca * cross

    def _omega_of_w(self, w):
        """Omega with beta^p regarded as functions of the angle variable."""
        b1, b2 = self.f["beta1"](w), self.f["beta2"](w)
        d1, d2 = self._deriv(self.f["beta1"], w), self._deriv(self.f["beta2"], w)
        return self._omega_combo(b1, b2, d1, d2)

    def _alpha3_integrand(self, t):
        b1, b2 = self._betas(t)
        num = self.f["eta13"](t) * b1 + self.f["eta23"](t) * b2
        return num / self._eta_scalar(t) if self.v["alpha3"] == "over_eta" else num

    def _p_rate(self, w):
        ca = self.ca
        return ca * (1.0 + math.cos(w)) / (1.0 - ca * math.sin(w))

    def _z_rate(self, w):
        return self.ca / (1.0 - self.ca * math.sin(w))

    def _p_int(self, w, anchor):
        return self._integral(self._p_rate, self._w0, w, anchor)

    def _z_int(self, w, anchor):
        return self._integral(self._z_rate, self._w0, w, anchor)

    def _alpha3(self, t, anchor):
        return self.k.get("alpha3_0", 0.0) + self._integral(self._alpha3_integrand, self.t0, t, anchor)

    # -- primary quantities: (alpha1, alpha2, alpha3, beta1, beta2) -----------

    def _primary_g1(self, t, anchor):
        e = self._g1_eta(t)
        root = check_riemannian(e, t)  # noqa: F841 - raises on a bad metric
        out = []
        for a in range(3):
            out.append(self.k[f"alpha{a + 1}_0"] + self._integral(self._g1_integrands[a], self.t0, t, anchor))
        return (*out, self.k["beta1"], self.k["beta2"])

    def _g1_eta(self, t):
        f = self.f
        return Sym3(f["eta11"](t), f["eta12"](t), f["eta13"](t), f["eta22"](t), f["eta23"](t), f["eta33"](t))

    def _g1_integrand(self, a, t):
        e = self._g1_eta(t)
        root = check_riemannian(e, t)
        beta = (self.k["beta1"], self.k["beta2"], self.k["beta3"])
        return e.matvec(beta)[a] / root

    @property
    def _g1_integrands(self):
        if not hasattr(self, "_g1_int_cache"):
            self._g1_int_cache = tuple(_Partial(self._g1_integrand, a) for a in range(3))
        return self._g1_int_cache

    def _rho_const_angle(self, t, anchor, angle):
        denom = 1.0 - self.ca * math.sin(angle)
        self._guard(denom, 1.0, "1 - cos(alpha) sin(omega)", t)
        return self.k["c"] - 2.0 * self._integral(self._omega_integrand, self.t0, t, anchor) / denom

    def _primary_1a(self, t, anchor):
        a = self.k["a"]
        theta = 0.5 * a if self.v["angle"] == "half_angle" else a
        rho = self._rho_const_angle(t, anchor, a)
        r = self._sqrt(rho, "rho", t)
        b1, b2 = self._betas(t)
        return r * math.sin(theta), r * math.cos(theta), self._alpha3(t, anchor), b1, b2

    def _primary_1c(self, t, anchor):
        rho = self._rho_const_angle(t, anchor, 0.0)
        b1, b2 = self._betas(t)
        return 0.0, self._sqrt(rho, "rho", t), self._alpha3(t, anchor), b1, b2

    @property
    def _w0(self):
        return self.f["omega"](self.t0)

    def _rho_1b_integrand_derived(self, w):
        # Omega e^{-P} / (1 - cos(a) sin(w)); nested primitive P anchored at the current anchor
        return self._omega_of_w(w) * math.exp(-self._p_int(w, self._w_anchor)) / (1.0 - self.ca * math.sin(w))

    def _rho_1b_integrand_printed_3(self, w):
        return self._rho_1b_integrand_derived(w)

    def _rho_1b_integrand_printed_41(self, w):
        s = 1.0 - self.ca * math.sin(w)
        return self._omega_of_w(w) * s / math.exp(self._z_int(w, self._w_anchor))

    def _primary_1b(self, t, anchor):
        w = self.f["omega"](t)
        self._w_anchor = self.f["omega"](anchor)
        s = 1.0 - self.ca * math.sin(w)
        self._guard(s, 1.0, "1 - cos(alpha) sin(omega)", t)
        c = self.k["c"]
        mode = self.v["rho"]
        if mode == "derived":
            j = self._integral(self._rho_1b_integrand_derived, self._w0, w, self._w_anchor)
            rho = math.exp(self._p_int(w, self._w_anchor)) * (c - 2.0 * j)
        elif mode == "printed_3":
            j = self._integral(self._rho_1b_integrand_printed_3, self._w0, w, self._w_anchor)
            rho = math.exp(self._p_int(w, self._w_anchor)) * (c + 2.0 * j)
        else:
            j = self._integral(self._rho_1b_integrand_printed_41, self._w0, w, self._w_anchor)
            rho = math.exp(self._z_int(w, self._w_anchor)) / s * (c - 2.0 * j)
        r = self._sqrt(rho, "rho", t)
        b1, b2 = self._betas(t)
        return r * math.sin(0.5 * w), r * math.cos(0.5 * w), self._alpha3(t, anchor), b1, b2

    def _primary_2a(self, t, anchor):
        b1, b2 = self._betas(t)
        c = self.k["c"]
        a2 = self._sqrt(c * c - b2 * b2, "c^2 - beta2^2", t)
        return 0.0, a2, self._alpha3(t, anchor), b1, b2

    def _primary_2b(self, t, anchor):
        w = self.f["omega"](t)
        c, a = self.k["c"], self.k["a"]
        b1, b2 = self._betas(t)
        return a * c * math.sin(w), c * math.sin(w), self._alpha3(t, anchor), b1, b2

    def _b1_db2(self, t):
        return self.f["beta1"](t) * self._deriv(self.f["beta2"], t)

    def _primary_421(self, t, anchor):
        b1, b2 = self._betas(t)
        c = self.k["c"]
        j = self._integral(self._b1_db2, self.t0, t, anchor)
        mode = self.v["alpha1"]
        if mode == "derived":
            a1 = self._sqrt(c - b1 * b1 - b2 * b2 - 4.0 * self.ca * j, "alpha1^2", t)
        elif mode == "printed_4_2":
            a1 = self._sqrt(c - b1 * b1 - 4.0 * self.ca * j, "alpha1^2", t)
        else:
            a1 = self._sqrt(c - b1 * b1, "c - beta1^2", t) - 4.0 * self.ca * j
        return a1, 0.0, self._alpha3(t, anchor), b1, b2

    def _primary_422(self, t, anchor):
        w = self.f["omega"](t)
        c = self.k["c"]
        return c * math.sin(w), 0.0, self.f["alpha3"](t), c * math.cos(w), 0.0

    def primary(self, t: float, anchor: float | None = None):
        anchor = t if anchor is None else anchor
        key = ("p", t, anchor)
        if key not in self._cache:
            self._cache[key] = self._primary_fn(t, anchor)
        return self._cache[key]

    def rates(self, t: float, anchor: float | None = None):
        anchor = t if anchor is None else anchor
        key = ("r", t, anchor)
        if key not in self._cache:
            if self.case.case_id == "G1_16b":
                # alpha_a is a bare quadrature: its rate is the integrand
                self._cache[key] = (*(f(t) for f in self._g1_integrands), 0.0, 0.0)
            else:
                self._cache[key] = _d5_vec(lambda x: self.primary(x, anchor), t, self.hd)
        return self._cache[key]

    # -- eta_ab per case -------------------------------------------------------

    def _metric_g1(self, t, anchor, prim, rates):
        e = self._g1_eta(t)
        return e, check_riemannian(e, t)

    def _finish_vii(self, t, e11, e12, e22, e13=None):
        eta = self._eta_scalar(t)
        e13 = self.f["eta13"](t) if e13 is None else e13
        e23 = self.f["eta23"](t)
        if self.v["eta33"] == "determinant":
            minor = e11 * e22 - e12 * e12
            num = eta * eta + e11 * e23 * e23 - 2.0 * e12 * e13 * e23 + e22 * e13 * e13
        else:
            minor = e11 * e22 - e13 * e13
            num = eta * eta - 2.0 * e12 * e13 * e23 + e11 * e23 * e23 + e22 * e13 * e13
        self._guard(minor, abs(e11 * e22), "eta33 denominator", t)
        return Sym3(e11, e12, e13, e22, e23, num / minor), eta

    def _metric_a1(self, t, anchor, prim, rates):
        a1, a2, _, b1, b2 = prim
        da1, _, _, db1, db2 = rates
        eta = self._eta_scalar(t)
        ca = self.ca
        sigma = 2.0 * a2 * ca - a1
        B = db1 + 2.0 * ca * db2
        D = self._guard(b1 * a2 + b2 * sigma, abs(b1 * a2) + abs(b2 * sigma), "beta1 alpha2 + beta2 sigma", t)
        self._guard(a2, abs(a1) + abs(a2), "alpha2", t)
        mode = self.v["eta11"]
        if mode == "derived":
            e11 = eta * (da1 * a2 + b2 * B) / D
        elif mode == "printed_4_1":
            e11 = eta * (da1 * a2 + db2 * B) / D
        else:
            e11 = eta * (da1 * a2 + db1 * b2) / D
        e12 = (sigma * e11 - eta * B) / a2
        if self.v["eta22"] == "derived":
            e22 = (sigma * sigma * e11 - eta * (sigma * B + a2 * db2)) / (a2 * a2)
        else:
            e22 = (sigma * sigma * e11 - eta * (sigma * db1 + a2 * B)) / (a2 * a2)
        return self._finish_vii(t, e11, e12, e22)

    def _metric_1c(self, t, anchor, prim, rates):
        _, a2, _, b1, b2 = prim
        _, _, _, db1, db2 = rates
        eta = self._eta_scalar(t)
        ca = self.ca
        self._guard(a2, 1.0, "alpha2", t)
        big_b = self._guard(b1 + 2.0 * ca * b2, abs(b1) + abs(b2), "beta1 + 2 cos(alpha) beta2", t)
        if big_b <= 0.0:
            raise DomainError(f"ln(beta1 + 2 cos(alpha) beta2) undefined: argument {big_b:.3e} at u0={t}",
                              u0=t, quantity="beta1 + 2 cos(alpha) beta2", value=big_b)
        log_rate = (db1 + 2.0 * ca * db2) / big_b
        e11 = eta * b2 * log_rate / a2
        e12 = -eta * b1 * log_rate / a2
        e22 = -eta * (db2 + 2.0 * ca * b1 * log_rate) / a2
        return self._finish_vii(t, e11, e12, e22)

    def _metric_2a(self, t, anchor, prim, rates):
        _, a2, _, b1, b2 = prim
        _, _, _, db1, db2 = rates
        eta = self._eta_scalar(t)
        ca = self.ca
        self._guard(a2, 1.0, "alpha2", t)
        e11 = self.f["eta11"](t)
        e12 = 2.0 * ca * e11 if self.v["eta12"] == "derived" else 2.0 * ca * e11 - eta
        mode = self.v["eta22"]
        if mode == "derived":
            e22 = 4.0 * ca * ca * e11 - eta * db2 / a2
        elif mode == "printed_a":
            e22 = 4.0 * ca * ca * e11 - eta * (2.0 * ca * db2 + db1) / a2
        else:
            e22 = 4.0 * ca * ca * e11 - eta * (2.0 * ca * db1 + db2) / a2
        return self._finish_vii(t, e11, e12, e22)

    def _metric_2b(self, t, anchor, prim, rates):
        eta = self._eta_scalar(t)
        a = self.k["a"]
        k = 2.0 * self.ca - a
        e11 = self.f["eta11"](t)
        wdot = self._deriv(self.f["omega"], t)
        rate = wdot if self.v["eta12"] == "derived" else 1.0
        e12 = k * e11 + a * eta * rate
        rate = wdot if self.v["eta22"] == "derived" else 1.0
        e22 = k * k * e11 + eta * rate * (a * k + 1.0)
        return self._finish_vii(t, e11, e12, e22)

    def _metric_421(self, t, anchor, prim, rates):
        a1, _, _, b1, b2 = prim
        _, _, _, db1, db2 = rates
        eta = self._eta_scalar(t)
        self._guard(a1, 1.0, "alpha1", t)
        self._guard(b2, 1.0, "beta2", t)
        e11 = -eta * (2.0 * self.ca * db2 + db1) / a1
        e12 = -eta * db2 / a1
        e22 = eta * db2 * b1 / (b2 * a1)
        return self._finish_vii(t, e11, e12, e22)

    def _metric_422(self, t, anchor, prim, rates):
        _, _, _, b1, _ = prim
        _, _, da3, _, _ = rates
        eta = self._eta_scalar(t)
        self._guard(b1, abs(self.k["c"]), "beta1", t)
        wdot = self._deriv(self.f["omega"], t)
        e11 = eta * wdot if self.v["eta11"] == "derived" else -eta * wdot
        e13 = eta * da3 / b1
        return self._finish_vii(t, e11, 0.0, self.f["eta22"](t), e13=e13)

    # -- public ------------------------------------------------------------------

    def sample(self, u0: float, anchor: float | None = None) -> CatalogSample:
        anchor = u0 if anchor is None else anchor
        key = ("s", u0, anchor)
        if key not in self._cache:
            prim = self.primary(u0, anchor)
            rates = self.rates(u0, anchor)
            eta_ab, eta = self._metric_fn(u0, anchor, prim, rates)
            if self.case.perturb:
                vals = [v * self.case.perturb.get(k, 1.0) for k, v in zip(PERTURB_KEYS, _entries(eta_ab))]
                eta_ab = Sym3(*vals)
            a1, a2, a3, b1, b2 = prim
            b3 = self.k["beta3"] if self.case.case_id == "G1_16b" else 0.0
            self._cache[key] = CatalogSample(u0, FieldState((a1, a2, a3), (b1, b2, b3)), eta_ab, a3, eta)
        return self._cache[key]

    def equation_residuals(self, u0: float, anchor: float | None = None) -> dict[str, float]:
        """Signed residual of every reduced equation at ``u0``."""
        s = self.sample(u0, anchor)
        da1, da2, da3, db1, db2 = self.rates(u0, anchor)
        e = s.eta
        eta = s.eta_scalar
        a1, a2, _ = s.field.alpha
        b1, b2, b3 = s.field.beta
        det_rel = abs(sym3_det(e) - eta * eta) / (eta * eta)
        if self.case.case_id == "G1_16b":
            lhs = e.matvec(s.field.beta)
            return {
                "E_alpha1": eta * da1 - lhs[0],
                "E_alpha2": eta * da2 - lhs[1],
                "E_alpha3": eta * da3 - lhs[2],
                "E_beta": 0.0,  # beta^a are constants by construction
                "det_eta": det_rel,
            }
        ca = self.ca
        sigma = 2.0 * a2 * ca - a1
        return {
            "E_beta2": eta * db2 - (sigma * e.m12 - a2 * e.m22),
            "E_beta1": eta * (db1 + 2.0 * ca * db2) - (sigma * e.m11 - a2 * e.m12),
            "E_alpha1": eta * da1 - (b1 * e.m11 + b2 * e.m12),
            "E_alpha2": eta * da2 - (b1 * e.m12 + b2 * e.m22),
            "E_alpha3": eta * da3 - (b1 * e.m13 + b2 * e.m23),
            "beta3": b3,
            "det_eta": det_rel,
        }

    def is_admissible(self, u0: float) -> bool:
        try:
            check_riemannian(self.sample(u0).eta, u0)
        except NonRiemannianEta:
            return False
        return True

    def lifted(self, anchor: float) -> LiftedCase:
        return LiftedCase(self, anchor)


def _entries(m: Sym3) -> tuple[float, ...]:
    return (m.m11, m.m12, m.m13, m.m22, m.m23, m.m33)


class _Partial:
    """Hashable ``functools.partial`` stand-in for integrand caching."""

    __slots__ = ("fn", "arg")

    def __init__(self, fn, arg):
        self.fn = fn
        self.arg = arg

    def __call__(self, t):
        return self.fn(self.arg, t)


class LiftedCase:
    """A catalog solution viewed as spacetime metric + potential near ``anchor``."""

    def __init__(self, evaluator: CaseEvaluator, anchor: float):
        self.ev = evaluator
        self.anchor = anchor
        self.metric = _LiftMetric(self)
        self.potential = _LiftPotential(self)


class _LiftMetric:
    def __init__(self, lift):
        self.lift = lift

    def at(self, t):
        return self.lift.ev.sample(t, self.lift.anchor).eta


class _LiftPotential:
    def __init__(self, lift):
        self.lift = lift

    def at(self, t):
        return self.lift.ev.sample(t, self.lift.anchor).field.alpha

    def rate(self, t):
        return self.lift.ev.rates(t, self.lift.anchor)[:3]


# --- residual checks and adjudication -----------------------------------------

def sample_times(case: SolutionCase, n: int) -> list[float]:
    """``n`` midpoints of an even partition of the case interval."""
    if n < 1:
        raise ConfigError("sample count must be >= 1", "samples")
    t0, t1 = case.interval
    return [t0 + (i + 0.5) * (t1 - t0) / n for i in range(n)]


def evaluate_case(case: SolutionCase, u0: float, quad_tol: float = DEFAULT_QUAD_TOL) -> CatalogSample:
    return CaseEvaluator(case, quad_tol).sample(u0)


def residual_reduced(case: SolutionCase, times: Iterable[float], quad_tol: float = DEFAULT_QUAD_TOL,
                     evaluator: CaseEvaluator | None = None) -> dict:
    """Per-equation max |residual| over ``times``, plus an admissibility flag.

    Raises:
        DomainError: propagated from the case formulas.
    """
    ev = evaluator or CaseEvaluator(case, quad_tol)
    worst: dict[str, float] = {}
    worst_at: dict[str, float] = {}
    admissible = True
    for t in times:
        for name, val in ev.equation_residuals(t).items():
            if abs(val) >= worst.get(name, -1.0):
                worst[name] = abs(val)
                worst_at[name] = t
        admissible = admissible and ev.is_admissible(t)
    return {"residuals": worst, "worst_u0": worst_at, "admissible": admissible}


def passes(res: dict, threshold: float, det_tol: float) -> tuple[bool, list[str]]:
    failed = []
    for name, val in res["residuals"].items():
        limit = det_tol if name == "det_eta" else threshold
        if not val < limit:
            failed.append(name)
    return not failed, failed


def registered_variants(case: SolutionCase) -> list[tuple[str, dict]]:
    """The derived variant plus every single-axis published alternative."""
    spec = case.spec
    base = spec.default_variant()
    out = [("derived", dict(base))]
    for axis, options in spec.axes.items():
        for opt in options[1:]:
            v = dict(base)
            v[axis] = opt
            out.append((f"{axis}={opt}", v))
    return out


def adjudicate_variants(case: SolutionCase, variants: Sequence[tuple[str, dict]] | None = None,
                        times: Sequence[float] | None = None, *, quad_tol: float = DEFAULT_QUAD_TOL,
                        threshold: float = DEFAULT_THRESHOLD, det_tol: float = DET_TOL) -> dict:
    """Run :func:`residual_reduced` once per variant and mark each PASS/FAIL.

    A variant whose formulas leave their domain is reported as FAIL with
    the domain error; it never aborts the whole adjudication.
    """
    variants = registered_variants(case) if variants is None else list(variants)
    times = sample_times(case, 50) if times is None else list(times)
    entries = []
    for name, variant in variants:
        vcase = case.with_variant(variant)
        entry = {"name": name, "variant": vcase.variant}
        try:
            res = residual_reduced(vcase, times, quad_tol)
        except DomainError as exc:
            entry.update(status="FAIL", error=str(exc), residuals={}, max_residual=None, admissible=False)
            entries.append(entry)
            continue
        ok, failed = passes(res, threshold, det_tol)
        eq = {k: v for k, v in res["residuals"].items() if k != "det_eta"}
        entry.update(status="PASS" if ok else "FAIL", residuals=res["residuals"], worst_u0=res["worst_u0"],
                     max_residual=max(eq.values()), det_identity=res["residuals"]["det_eta"],
                     admissible=res["admissible"], failed_equations=failed)
        entries.append(entry)
    return {
        "case": case.case_id,
        "threshold": threshold,
        "det_tol": det_tol,
        "quad_tol": quad_tol,
        "samples": len(times),
        "compared": len(entries) > 1,
        "variants": entries,
        "passing": [e["name"] for e in entries if e["status"] == "PASS"],
    }


def full_oracle_residual(case: SolutionCase, points: Sequence[SpacetimePoint], h: float = 1e-4,
                         quad_tol: float = DEFAULT_QUAD_TOL) -> float:
    """Max |R^i| of the 4D field equations for the lifted solution at ``points``."""
    ev = CaseEvaluator(case, quad_tol)
    g = case.group
    worst = 0.0
    for p in points:
        lift = ev.lifted(p.u0)
        r = maxwell_residual_full(g, lift.metric, lift.potential, p, h)
        worst = max(worst, float(max(abs(x) for x in r)))
    return worst

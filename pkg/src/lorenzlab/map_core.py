"""Piecewise-monotone interval maps with one discontinuity (contracting Lorenz maps).

A map here is two increasing branches on [0, c] and [c, 1] with fixed endpoints
f(0) = 0, f(1) = 1 and one-sided derivatives vanishing at the break point c.
Evaluation at c is directed: the two one-sided limits are distinct points for
the dynamics, so points within tolerance of c must carry an approach side.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class Side(str, Enum):
    MINUS = "minus"
    PLUS = "plus"
    NONE = "none"


class UndirectedCriticalEvaluation(ValueError):
    """Raised when evaluating at the break point without an approach side."""


class CriticalPointError(ValueError):
    """Raised when a derivative-based quantity is requested at the break point."""


class MapValidationError(ValueError):
    pass


BRANCH_KINDS = ("polynomial", "quadratic_logistic", "power_form")


@dataclass(frozen=True)
class BranchSpec:
    """One monotone branch formula plus the side of c it lives on.

    kinds:
      polynomial          coefficients ascending, f(x) = sum c_k x^k
      quadratic_logistic  f(x) = a x (1 - x)
      power_form          left:  f(x) = a (1 - ((c-x)/c)^alpha)
                          right: f(x) = (1-a) + a ((x-c)/(1-c))^alpha
                          (alpha > 1 so the derivative vanishes at c)
    """

    kind: str
    domain_side: str  # "left" or "right"
    coefficients: tuple[float, ...] | None = None
    a: float | None = None
    alpha: float | None = None

    def __post_init__(self):
        if self.kind not in BRANCH_KINDS:
            raise MapValidationError(f"unknown branch kind {self.kind!r}")
        if self.domain_side not in ("left", "right"):
            raise MapValidationError(f"domain_side must be left/right, got {self.domain_side!r}")
        if self.kind == "polynomial":
            if not self.coefficients:
                raise MapValidationError("polynomial branch needs coefficients")
            object.__setattr__(self, "coefficients", tuple(float(v) for v in self.coefficients))
        elif self.kind == "quadratic_logistic":
            if self.a is None:
                raise MapValidationError("quadratic_logistic branch needs parameter a")
        elif self.kind == "power_form":
            if self.a is None or self.alpha is None:
                raise MapValidationError("power_form branch needs a and alpha")
            if self.alpha <= 1.0:
                raise MapValidationError("power_form needs alpha > 1 (non-flat exponent)")

    def poly_coefficients(self) -> tuple[float, ...] | None:
        """Ascending coefficients when the branch is polynomial, else None."""
        if self.kind == "polynomial":
            return self.coefficients
        if self.kind == "quadratic_logistic":
            return (0.0, float(self.a), -float(self.a))
        return None

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind, "domain_side": self.domain_side}
        if self.kind == "polynomial":
            d["coefficients"] = list(self.coefficients)
        else:
            d["a"] = self.a
            if self.kind == "power_form":
                d["alpha"] = self.alpha
        return d

    @staticmethod
    def from_dict(d: dict, domain_side: str) -> "BranchSpec":
        return BranchSpec(
            kind=d["kind"],
            domain_side=d.get("domain_side", domain_side),
            coefficients=tuple(d["coefficients"]) if "coefficients" in d else None,
            a=d.get("a"),
            alpha=d.get("alpha"),
        )


@dataclass(frozen=True)
class LorenzMapSpec:
    """An interval map with one break point c and two increasing branches."""

    c: float
    left: BranchSpec
    right: BranchSpec
    name: str = ""
    tolerance: float = 1e-10

    def __post_init__(self):
        if not (0.0 < self.c < 1.0):
            raise MapValidationError("break point c must lie in (0,1)")
        if self.left.domain_side != "left" or self.right.domain_side != "right":
            raise MapValidationError("branch domain sides must be (left, right)")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "c": self.c,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
            "tolerance": self.tolerance,
        }

    @staticmethod
    def from_dict(d: dict) -> "LorenzMapSpec":
        return LorenzMapSpec(
            c=float(d["c"]),
            left=BranchSpec.from_dict(d["left"], "left"),
            right=BranchSpec.from_dict(d["right"], "right"),
            name=d.get("name", ""),
            tolerance=float(d.get("tolerance", 1e-10)),
        )


@dataclass(frozen=True)
class DirectedPoint:
    """A point of [0,1] tagged with an approach side.

    The side matters only at the break point and its preimages; elsewhere
    side NONE is the normal state.
    """

    x: float
    side: Side = Side.NONE

    def __iter__(self):
        return iter((self.x, self.side))


@dataclass
class ValidationReport:
    is_lorenz: bool
    is_contracting: bool
    schwarzian_negative_sampled: bool
    critical_values: tuple[float, float]  # (v0, v1) = (f(c+), f(c-))
    fixed_endpoint_multipliers: tuple[float, float]
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.is_lorenz and self.is_contracting

    def to_dict(self) -> dict:
        return {
            "is_lorenz": self.is_lorenz,
            "is_contracting": self.is_contracting,
            "schwarzian_negative_sampled": self.schwarzian_negative_sampled,
            "critical_values": {"v0": self.critical_values[0], "v1": self.critical_values[1]},
            "fixed_endpoint_multipliers": list(self.fixed_endpoint_multipliers),
            "notes": self.notes,
        }


# ---------------------------------------------------------------------------
# evaluation kernels


def _poly_funcs(coefs: tuple[float, ...]):
    """Scalar + array evaluators for value and first three derivatives."""
    cs = np.asarray(coefs, dtype=float)
    d1 = np.polynomial.polynomial.polyder(cs, 1)
    d2 = np.polynomial.polynomial.polyder(cs, 2)
    d3 = np.polynomial.polynomial.polyder(cs, 3)

    def make(c):
        rev = tuple(reversed(c.tolist())) if len(c) else (0.0,)

        def f(x: float) -> float:
            acc = 0.0
            for coef in rev:
                acc = acc * x + coef
            return acc

        def fa(x: np.ndarray) -> np.ndarray:
            return np.polynomial.polynomial.polyval(x, c)

        return f, fa

    (f0, f0a) = make(cs)
    (f1, f1a) = make(d1)
    (f2, f2a) = make(d2)
    (f3, f3a) = make(d3)
    return (f0, f1, f2, f3), (f0a, f1a, f2a, f3a)


def _power_funcs(a: float, alpha: float, c: float, side: str):
    # chain rule: du/dx = -1/c on the left, +1/(1-c) on the right, so each
    # extra derivative flips the sign on the left branch
    if side == "left":
        scale = c

        def u(x):
            return (c - x) / c

        def f0(x):
            return a * (1.0 - u(x) ** alpha)

        s2, s3 = -1.0, 1.0
    else:
        scale = 1.0 - c

        def u(x):
            return (x - c) / (1.0 - c)

        def f0(x):
            return (1.0 - a) + a * u(x) ** alpha

        s2, s3 = 1.0, 1.0

    k1 = a * alpha / scale
    k2 = a * alpha * (alpha - 1.0) / scale**2
    k3 = a * alpha * (alpha - 1.0) * (alpha - 2.0) / scale**3

    def f1(x):
        return k1 * u(x) ** (alpha - 1.0)

    def f2(x):
        return s2 * k2 * u(x) ** (alpha - 2.0)

    def f3(x):
        return s3 * k3 * u(x) ** (alpha - 3.0)

    return (f0, f1, f2, f3), (f0, f1, f2, f3)


@functools.lru_cache(maxsize=128)
def _kernels(spec: LorenzMapSpec):
    """Per-spec callables: (left, right) x (f, f', f'', f''') scalar and array."""
    out = {}
    for name, br in (("left", spec.left), ("right", spec.right)):
        coefs = br.poly_coefficients()
        if coefs is not None:
            out[name] = _poly_funcs(coefs)
        else:
            out[name] = _power_funcs(br.a, br.alpha, spec.c, name)
    return out


def branch_value(spec: LorenzMapSpec, side: str, x: float) -> float:
    return _kernels(spec)[side][0][0](x)


def branch_derivative(spec: LorenzMapSpec, side: str, x: float, order: int = 1) -> float:
    return _kernels(spec)[side][0][order](x)


def apply_raw(spec: LorenzMapSpec, x: float, side: Side = Side.NONE) -> float:
    """One step of the map, resolving the branch at c by the given side."""
    c, tol = spec.c, spec.tolerance
    if abs(x - c) <= tol:
        if side == Side.MINUS:
            return branch_value(spec, "left", c)
        if side == Side.PLUS:
            return branch_value(spec, "right", c)
        raise UndirectedCriticalEvaluation(
            f"undirected critical evaluation at x={x!r} (c={c!r})"
        )
    if x < c:
        return min(max(branch_value(spec, "left", x), 0.0), 1.0)
    return min(max(branch_value(spec, "right", x), 0.0), 1.0)


def evaluate(spec: LorenzMapSpec, p: DirectedPoint) -> DirectedPoint:
    """Directed evaluation. Output side is NONE; if the output lands within
    tolerance of c the caller must attach a side before evaluating again."""
    if not (0.0 <= p.x <= 1.0):
        raise ValueError(f"point {p.x} outside [0,1]")
    y = apply_raw(spec, p.x, p.side)
    return DirectedPoint(y, Side.NONE)


def eval_array(spec: LorenzMapSpec, x: np.ndarray) -> np.ndarray:
    """Vectorized map step. Entries within tolerance of c become NaN
    (undirected critical evaluation); NaN propagates."""
    ker = _kernels(spec)
    c, tol = spec.c, spec.tolerance
    x = np.asarray(x, dtype=float)
    yl = ker["left"][1][0](x)
    yr = ker["right"][1][0](x)
    y = np.where(x < c, yl, yr)
    y = np.clip(y, 0.0, 1.0)
    dead = np.abs(x - c) <= tol
    if dead.any():
        y = np.where(dead, np.nan, y)
    return y


def deriv_array(spec: LorenzMapSpec, x: np.ndarray) -> np.ndarray:
    ker = _kernels(spec)
    x = np.asarray(x, dtype=float)
    dl = ker["left"][1][1](x)
    dr = ker["right"][1][1](x)
    return np.where(x < spec.c, dl, dr)


def derivative(spec: LorenzMapSpec, x: float, order: int = 1, fd_step: float = 1e-7) -> float:
    """Branch derivative away from c. Analytic for the builtin kinds; the
    fd_step parameter is kept for parity with finite-difference fallbacks."""
    c, tol = spec.c, spec.tolerance
    if abs(x - c) <= tol:
        raise CriticalPointError(f"derivative requested at the discontinuity x={x}")
    side = "left" if x < c else "right"
    return branch_derivative(spec, side, x, order)


def schwarzian(spec: LorenzMapSpec, x: float) -> float:
    """Sf = f'''/f' - 1.5 (f''/f')^2, defined where f' is nonzero."""
    c, tol = spec.c, spec.tolerance
    side = "left" if x < c else "right"
    if abs(x - c) <= tol:
        raise CriticalPointError("critical point")
    d1 = branch_derivative(spec, side, x, 1)
    if abs(d1) <= tol:
        raise CriticalPointError(f"critical point: |Df({x})| <= tolerance")
    d2 = branch_derivative(spec, side, x, 2)
    d3 = branch_derivative(spec, side, x, 3)
    return d3 / d1 - 1.5 * (d2 / d1) ** 2


def critical_values(spec: LorenzMapSpec) -> tuple[float, float]:
    """(v0, v1) = one-sided images (f(c+), f(c-))."""
    v1 = branch_value(spec, "left", spec.c)
    v0 = branch_value(spec, "right", spec.c)
    return (min(max(v0, 0.0), 1.0), min(max(v1, 0.0), 1.0))


def validate_map(spec: LorenzMapSpec, grid_size: int = 512) -> ValidationReport:
    """Grid audit of the defining conditions. All conclusions are numerical:
    they hold on the sampled grid at the spec tolerance, nothing more."""
    if grid_size < 100:
        raise ValueError("grid_size must be at least 100")
    tol = spec.tolerance
    notes = [f"numerical check: grid_size={grid_size}, tolerance={tol}"]
    ker = _kernels(spec)
    ok = True

    f0 = branch_value(spec, "left", 0.0)
    f1 = branch_value(spec, "right", 1.0)
    if abs(f0 - 0.0) > tol:
        ok = False
        notes.append(f"f(0)={f0} not fixed")
    if abs(f1 - 1.0) > tol:
        ok = False
        notes.append(f"f(1)={f1} not fixed")

    grids = {
        "left": np.linspace(0.0, spec.c, grid_size, endpoint=False)[1:],
        "right": np.linspace(spec.c, 1.0, grid_size, endpoint=False)[1:],
    }
    sf_neg = True
    for side, xs in grids.items():
        vals = ker[side][1][0](xs)
        if np.any(np.diff(vals) <= 0):
            ok = False
            bad = xs[:-1][np.diff(vals) <= 0][0]
            notes.append(f"{side} branch not increasing near x={bad}")
        d1 = ker[side][1][1](xs)
        if np.any(d1 <= 0):
            ok = False
            bad = xs[d1 <= 0][0]
            notes.append(f"{side} branch derivative <= 0 at x={bad}")
        live = np.abs(d1) > tol
        if np.any(live):
            d2 = ker[side][1][2](xs[live])
            d3 = ker[side][1][3](xs[live])
            sf = d3 / d1[live] - 1.5 * (d2 / d1[live]) ** 2
            if np.any(sf >= 0):
                sf_neg = False
                bad = xs[live][sf >= 0][0]
                notes.append(f"Schwarzian >= 0 at x={bad} ({side} branch)")

    dl_c = ker["left"][0][1](spec.c)
    dr_c = ker["right"][0][1](spec.c)
    contracting = abs(dl_c) <= tol and abs(dr_c) <= tol
    if not contracting:
        notes.append(f"one-sided derivatives at c: left={dl_c}, right={dr_c}")

    v0, v1 = critical_values(spec)
    mult0 = ker["left"][0][1](0.0)
    mult1 = ker["right"][0][1](1.0)
    return ValidationReport(
        is_lorenz=ok,
        is_contracting=contracting,
        schwarzian_negative_sampled=sf_neg,
        critical_values=(v0, v1),
        fixed_endpoint_multipliers=(mult0, mult1),
        notes=notes,
    )


# ---------------------------------------------------------------------------
# preimages


def _branch_inverse_scalar(spec: LorenzMapSpec, side: str, y: float) -> float | None:
    """Solve f(x) = y on one branch by bisection; None when y leaves the range."""
    c = spec.c
    lo, hi = (0.0, c) if side == "left" else (c, 1.0)
    ker = _kernels(spec)[side][0][0]
    flo, fhi = ker(lo), ker(hi)
    if not (flo - 1e-15 <= y <= fhi + 1e-15):
        return None
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if ker(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def branch_inverse_array(spec: LorenzMapSpec, side: str, y: np.ndarray) -> np.ndarray:
    """Vectorized branch inverse; NaN where y is outside the branch range."""
    c = spec.c
    lo0, hi0 = (0.0, c) if side == "left" else (c, 1.0)
    ker = _kernels(spec)[side][1][0]
    y = np.asarray(y, dtype=float)
    lo = np.full(y.shape, lo0)
    hi = np.full(y.shape, hi0)
    bad = (y < ker(np.array(lo0)) - 1e-15) | (y > ker(np.array(hi0)) + 1e-15)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        below = ker(mid) < y
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = 0.5 * (lo + hi)
    return np.where(bad, np.nan, out)


def preimages(spec: LorenzMapSpec, y: float) -> list[DirectedPoint]:
    """All solutions of f(x) = y, at most one per branch, plus the directed
    break point when y matches a one-sided critical image."""
    if not (0.0 <= y <= 1.0):
        raise ValueError("y outside [0,1]")
    tol = spec.tolerance
    v0, v1 = critical_values(spec)
    hit_v1 = abs(y - v1) <= max(tol, 1e-12)
    hit_v0 = abs(y - v0) <= max(tol, 1e-12)
    out: list[DirectedPoint] = []
    # when y equals a one-sided critical image, the interior branch solution
    # is c itself; report it as the directed point instead
    if not hit_v1:
        xl = _branch_inverse_scalar(spec, "left", y)
        if xl is not None and abs(xl - spec.c) > tol:
            out.append(DirectedPoint(xl, Side.NONE))
    if not hit_v0:
        xr = _branch_inverse_scalar(spec, "right", y)
        if xr is not None and abs(xr - spec.c) > tol:
            out.append(DirectedPoint(xr, Side.NONE))
    if hit_v1:
        out.append(DirectedPoint(spec.c, Side.MINUS))
    if hit_v0:
        out.append(DirectedPoint(spec.c, Side.PLUS))
    return out


# ---------------------------------------------------------------------------
# unimodal embedding


@dataclass(frozen=True)
class UnimodalSpec:
    """A symmetric unimodal polynomial map u (u(x) = u(1-x), u(0) = 0)."""

    coefficients: tuple[float, ...]
    name: str = ""

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, np.asarray(self.coefficients))


def logistic(a: float) -> UnimodalSpec:
    return UnimodalSpec(coefficients=(0.0, float(a), -float(a)), name=f"logistic{a:g}")


def embed_unimodal(u: UnimodalSpec, tolerance: float = 1e-10, grid_size: int = 1024) -> LorenzMapSpec:
    """Two-branch map whose orbits shadow the unimodal orbits of u:
    left branch u(x) on [0, 1/2), right branch 1 - u(x) on (1/2, 1]."""
    xs = np.linspace(0.0, 1.0, grid_size)
    asym = float(np.max(np.abs(u(xs) - u(1.0 - xs))))
    if asym > max(tolerance, 1e-9):
        raise MapValidationError(f"unimodal input not symmetric: max |u(x)-u(1-x)| = {asym}")
    if abs(float(u(0.0))) > max(tolerance, 1e-9):
        raise MapValidationError("unimodal input must fix 0")
    cs = tuple(u.coefficients)
    flipped = (1.0 - cs[0],) + tuple(-v for v in cs[1:])
    return LorenzMapSpec(
        c=0.5,
        left=BranchSpec(kind="polynomial", domain_side="left", coefficients=cs),
        right=BranchSpec(kind="polynomial", domain_side="right", coefficients=flipped),
        name=f"{u.name}-embed" if u.name else "unimodal-embed",
        tolerance=tolerance,
    )


def quadratic_pair(a_left: float, a_right: float, name: str = "", tolerance: float = 1e-10) -> LorenzMapSpec:
    """Left branch a_left x(1-x), right branch 1 - a_right x(1-x), c = 1/2."""
    return LorenzMapSpec(
        c=0.5,
        left=BranchSpec(kind="quadratic_logistic", domain_side="left", a=float(a_left)),
        right=BranchSpec(
            kind="polynomial",
            domain_side="right",
            coefficients=(1.0, -float(a_right), float(a_right)),
        ),
        name=name or f"quadpair({a_left:g},{a_right:g})",
        tolerance=tolerance,
    )


# ---------------------------------------------------------------------------
# builtin maps and config I/O


def builtin_map(name: str) -> LorenzMapSpec:
    if name == "paper-example":
        return quadratic_pair(3.4, 4.0, name="paper-example")
    if name == "logistic4-embed":
        return embed_unimodal(logistic(4.0))
    if name in ("logistic3.4-embed", "logistic3_4-embed"):
        return embed_unimodal(logistic(3.4))
    raise KeyError(f"unknown builtin map {name!r}")


BUILTIN_NAMES = ("paper-example", "logistic4-embed", "logistic3.4-embed")


def load_map(source: str) -> LorenzMapSpec:
    """Resolve a builtin name or read a JSON map config from a path."""
    try:
        return builtin_map(source)
    except KeyError:
        pass
    with open(source, "r", encoding="utf-8") as fh:
        return LorenzMapSpec.from_dict(json.load(fh))

"""Parametric non-null curves, arc-length checks and Frenet frames.

Built-in families are unit-speed helices with closed-form derivatives up to
third order. Custom curves are given per coordinate as a polynomial plus a
finite Fourier series; they are never reparametrized, so ``check_unit_speed``
is the gate that decides whether they can be framed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .algebra import TOL_NULL, Causal, Signature, cross_l, inner
from .errors import (
    CausalCharacterChange,
    NotUnitSpeed,
    NullFrameLeg,
    OutOfDomain,
    VanishingCurvature,
)

TOL_UNIT = 1e-8


class Family(enum.Enum):
    HELIX_TIMELIKE = "helix_timelike"
    HELIX_SPACELIKE_TIMELIKE_NORMAL = "helix_spacelike_timelike_normal"
    HELIX_SPACELIKE_TIMELIKE_BINORMAL = "helix_spacelike_timelike_binormal"
    CUSTOM = "custom"


HELIX_FAMILIES = (
    Family.HELIX_TIMELIKE,
    Family.HELIX_SPACELIKE_TIMELIKE_NORMAL,
    Family.HELIX_SPACELIKE_TIMELIKE_BINORMAL,
)


@dataclass(frozen=True)
class CurveSpec:
    """Declarative curve description.

    Helix families take ``a`` (radius), ``b`` (pitch), and optionally ``s0``
    (arc-length shift, the curve is evaluated at ``s + s0``) and ``offset``
    (a translation vector). Custom curves take ``poly`` (three coefficient
    lists, lowest degree first), and optionally ``omega``, ``cos`` and
    ``sin`` (three lists each, harmonic k = 1, 2, ...).
    """

    family: Family
    params: dict = field(default_factory=dict)
    domain: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        lo, hi = (float(v) for v in self.domain)
        if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
            raise ValueError(f"bad domain {self.domain!r}")
        object.__setattr__(self, "domain", (lo, hi))
        if fam in HELIX_FAMILIES:
            a = float(self.params["a"])
            b = float(self.params["b"])
            if a <= 0 or b <= 0:
                raise ValueError("helix parameters a and b must be positive")
            if fam is not Family.HELIX_SPACELIKE_TIMELIKE_NORMAL and b <= a:
                raise ValueError(f"{fam.value} needs b > a")
            offset = self.params.get("offset", (0.0, 0.0, 0.0))
            if len(offset) != 3:
                raise ValueError("offset must have three components")

    @property
    def c(self) -> float:
        """Speed normalizer of a helix family (c^2 = b^2 -+ a^2)."""
        a, b = float(self.params["a"]), float(self.params["b"])
        if self.family is Family.HELIX_SPACELIKE_TIMELIKE_NORMAL:
            return math.sqrt(a * a + b * b)
        return math.sqrt(b * b - a * a)

    @classmethod
    def from_dict(cls, d: dict) -> "CurveSpec":
        return cls(Family(d["family"]), dict(d.get("params", {})), tuple(d["domain"]))

    def to_dict(self) -> dict:
        return {"family": self.family.value, "params": dict(self.params), "domain": list(self.domain)}

    def translated(self, v) -> "CurveSpec":
        """Same curve shifted rigidly by ``v``."""
        v = np.asarray(v, dtype=float)
        params = dict(self.params)
        if self.family in HELIX_FAMILIES:
            params["offset"] = list(np.asarray(params.get("offset", (0, 0, 0)), float) + v)
        else:
            poly = [list(row) if len(row) else [0.0] for row in params.get("poly", [[0.0]] * 3)]
            for i in range(3):
                poly[i][0] += float(v[i])
            params["poly"] = poly
        return CurveSpec(self.family, params, self.domain)


    def scaled(self, k: float) -> "CurveSpec":
        """Helix dilated by ``k`` about the origin, reparametrized by arc length.

        Frames are unchanged at corresponding points; curvature and torsion
        scale by 1/k.
        """
        if self.family not in HELIX_FAMILIES or k <= 0:
            raise ValueError("only helix families can be scaled, by a positive factor")
        params = dict(self.params)
        for key in ("a", "b", "s0"):
            params[key] = float(params.get(key, 0.0)) * k
        if "offset" in params:
            params["offset"] = [float(v) * k for v in params["offset"]]
        return CurveSpec(self.family, params, (self.domain[0] * k, self.domain[1] * k))


def _check_domain(spec: CurveSpec, s: np.ndarray) -> None:
    lo, hi = spec.domain
    bad = (s < lo) | (s > hi)
    if np.any(bad):
        first = float(s[bad].flat[0])
        raise OutOfDomain(f"outside domain [{lo}, {hi}]", s=first)


def _helix(spec: CurveSpec, s: np.ndarray, order: int) -> np.ndarray:
    a, b = float(spec.params["a"]), float(spec.params["b"])
    c = spec.c
    u = (s + float(spec.params.get("s0", 0.0))) / c
    scale = a / c**order
    if order == 0:
        lin = b * u
    elif order == 1:
        lin = np.full_like(u, b / c)
    else:
        lin = np.zeros_like(u)
    out = np.empty(s.shape + (3,))
    if spec.family is Family.HELIX_TIMELIKE:
        out[..., 0] = scale * np.cos(u + order * math.pi / 2)
        out[..., 1] = scale * np.sin(u + order * math.pi / 2)
        out[..., 2] = lin
    else:
        even, odd = (np.cosh, np.sinh) if order % 2 == 0 else (np.sinh, np.cosh)
        if spec.family is Family.HELIX_SPACELIKE_TIMELIKE_NORMAL:
            out[..., 0] = lin
            out[..., 1] = scale * odd(u)
            out[..., 2] = scale * even(u)
        else:
            out[..., 0] = scale * even(u)
            out[..., 1] = lin
            out[..., 2] = scale * odd(u)
    if order == 0:
        out += np.asarray(spec.params.get("offset", (0.0, 0.0, 0.0)), dtype=float)
    return out


def _custom(spec: CurveSpec, s: np.ndarray, order: int) -> np.ndarray:
    p = spec.params
    poly = p.get("poly", [[0.0]] * 3)
    omega = float(p.get("omega", 0.0))
    cos_c = p.get("cos", [[]] * 3)
    sin_c = p.get("sin", [[]] * 3)
    out = np.zeros(s.shape + (3,))
    for i in range(3):
        coef = np.asarray(poly[i], dtype=float) if len(poly[i]) else np.zeros(1)
        out[..., i] = P.polyval(s, P.polyder(coef, order) if order else coef)
        for k, ak in enumerate(cos_c[i], start=1):
            w = k * omega
            out[..., i] += ak * w**order * np.cos(w * s + order * math.pi / 2)
        for k, bk in enumerate(sin_c[i], start=1):
            w = k * omega
            out[..., i] += bk * w**order * np.sin(w * s + order * math.pi / 2)
    return out


def evaluate(spec: CurveSpec, s, order: int = 0) -> np.ndarray:
    """Point (order 0) or derivative of the curve; ``s`` may be an array."""
    if order not in (0, 1, 2, 3):
        raise ValueError("order must be 0..3")
    s_arr = np.asarray(s, dtype=float)
    _check_domain(spec, s_arr)
    if spec.family is Family.CUSTOM:
        return _custom(spec, s_arr, order)
    return _helix(spec, s_arr, order)


@dataclass(frozen=True)
class UnitSpeedReport:
    max_deviation: float
    character: Causal


def check_unit_speed(spec: CurveSpec, grid, tol: float = TOL_UNIT) -> UnitSpeedReport:
    """Require |<b', b'>| = 1 on the grid with one causal character throughout."""
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    q = inner(evaluate(spec, grid, 1), evaluate(spec, grid, 1))
    sign = np.sign(q)
    flips = np.nonzero(sign != sign[0])[0]
    if sign[0] == 0 or flips.size:
        at = grid[flips[0]] if flips.size else grid[0]
        raise CausalCharacterChange("tangent changes causal character", s=float(at))
    dev = np.abs(np.abs(q) - 1.0)
    worst = int(np.argmax(dev))
    if dev[worst] > tol:
        raise NotUnitSpeed(f"|<b',b'>| deviates from 1 by {dev[worst]:.3e}", s=float(grid[worst]))
    character = Causal.SPACELIKE if sign[0] > 0 else Causal.TIMELIKE
    return UnitSpeedReport(float(dev[worst]), character)


@dataclass(frozen=True)
class FrenetSample:
    s: float
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    kappa: float
    tau: float
    signature: Signature

    @property
    def legs(self) -> np.ndarray:
        return np.stack([self.T, self.N, self.B])

    @property
    def apparatus(self) -> np.ndarray:
        return np.array([self.kappa, 0.0, self.tau])


@dataclass
class FrenetTrace:
    """Frenet frames along a grid, stored as arrays."""

    s: np.ndarray
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    signature: Signature | None

    def __len__(self) -> int:
        return len(self.s)

    def __getitem__(self, i: int) -> FrenetSample:
        return FrenetSample(float(self.s[i]), self.T[i], self.N[i], self.B[i],
                            float(self.kappa[i]), float(self.tau[i]), self.signature)

    def __iter__(self) -> Iterator[FrenetSample]:
        return (self[i] for i in range(len(self)))

    @property
    def legs(self) -> np.ndarray:
        return np.stack([self.T, self.N, self.B], axis=-2)

    @property
    def apparatus(self) -> np.ndarray:
        return np.stack([self.kappa, np.zeros_like(self.kappa), self.tau], axis=-1)

    def continuity(self) -> np.ndarray:
        """eps2 * <N_i, N_{i+1}> between neighbours; positive means no flip."""
        if len(self) < 2:
            return np.zeros(0)
        return self.signature.eps2 * inner(self.N[:-1], self.N[1:])


def frenet_trace(spec: CurveSpec, s_grid: Sequence[float] | np.ndarray,
                 tol_null: float = TOL_NULL, tol_unit: float = TOL_UNIT) -> FrenetTrace:
    """Frenet apparatus on every grid point.

    N is fixed by T' = eps2 * kappa * N with kappa > 0, and B by
    T x N = eps3 * B, so the frame is unique and continuous away from
    inflection points; no sign choice is left to align.
    """
    s = np.atleast_1d(np.asarray(s_grid, dtype=float))
    if s.size == 0:
        empty = np.zeros((0, 3))
        return FrenetTrace(s, empty, empty, empty, np.zeros(0), np.zeros(0), None)
    d1, d2, d3 = (evaluate(spec, s, k) for k in (1, 2, 3))

    qT = inner(d1, d1)
    bad = np.abs(np.abs(qT) - 1.0) > tol_unit
    if np.any(bad):
        i = int(np.argmax(bad))
        raise NotUnitSpeed(f"|<T,T>| = {abs(qT[i]):.12g}", s=float(s[i]))
    eps1 = np.where(qT > 0, 1, -1)
    if np.any(eps1 != eps1[0]):
        raise CausalCharacterChange("tangent changes causal character",
                                    s=float(s[np.argmax(eps1 != eps1[0])]))

    flat = np.linalg.norm(d2, axis=-1) <= tol_null
    if np.any(flat):
        raise VanishingCurvature("curvature vanishes", s=float(s[np.argmax(flat)]))
    q2 = inner(d2, d2)
    null = np.abs(q2) <= tol_null
    if np.any(null):
        raise NullFrameLeg("principal normal is null", s=float(s[np.argmax(null)]))
    eps2 = np.where(q2 > 0, 1, -1)
    if np.any(eps2 != eps2[0]):
        raise CausalCharacterChange("normal changes causal character",
                                    s=float(s[np.argmax(eps2 != eps2[0])]))

    sig = Signature.of(eps1[0], eps2[0], -eps1[0] * eps2[0])
    kappa = np.sqrt(np.abs(q2))
    T = d1
    N = sig.eps2 * d2 / kappa[:, None]
    B = sig.eps3 * cross_l(T, N)
    # N' = -eps1*kappa*T + eps3*tau*B gives tau = <N', B> = eps2 <b''', B> / kappa
    tau = sig.eps2 * inner(d3, B) / kappa
    return FrenetTrace(s, T, N, B, kappa, tau, sig)


def frenet(spec: CurveSpec, s: float, tol_null: float = TOL_NULL) -> FrenetSample:
    return frenet_trace(spec, [s], tol_null)[0]

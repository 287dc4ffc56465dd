"""Type-2 {H, N, D} and type-3 {P, F, B} positional adapted frames.

Both frames rotate two Frenet legs by an angle phi fixed by the position
vector, keeping the third leg (N for type-2, B for type-3). The rotation
is trigonometric when the rotated pair is spacelike and hyperbolic when it
has mixed signature. A constructed frame must carry the Frenet signature;
anything else is rejected with ``BadSignature``.

phi' is computed in closed form from the derivatives of the position
projections (b_T' = eps1 + eps2 kappa b_N, b_N' = -eps1 kappa b_T + eps3 tau b_B,
b_B' = -eps2 tau b_N), so apparatus values are exact for any curve with
analytic derivatives. ``phi_prime_centered`` provides the finite-difference
estimate as an independent cross-check.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .algebra import TOL_FRAME, TOL_NULL, Signature, cross_l, derivative_matrix, inner, validate_frame
from .curves import CurveSpec, FrenetSample, FrenetTrace, evaluate, frenet_trace
from .errors import BadSignature, DegenerateDenominator, ZeroAngularMomentumComponent

TOL_DEN = 1e-8


class Paf2Case(enum.Enum):
    TRIG_N_TIMELIKE = "trig_n_timelike"
    HYPERBOLIC_D_TIMELIKE = "hyperbolic_d_timelike"


class Paf3Case(enum.Enum):
    TRIG_B_TIMELIKE = "trig_b_timelike"
    HYPERBOLIC_F_TIMELIKE = "hyperbolic_f_timelike"
    HYPERBOLIC_P_TIMELIKE = "hyperbolic_p_timelike"


_PAF2_CASES = {
    Signature(1, -1, 1): Paf2Case.TRIG_N_TIMELIKE,
    Signature(1, 1, -1): Paf2Case.HYPERBOLIC_D_TIMELIKE,
}
_PAF3_CASES = {
    Signature(1, 1, -1): Paf3Case.TRIG_B_TIMELIKE,
    Signature(1, -1, 1): Paf3Case.HYPERBOLIC_F_TIMELIKE,
    Signature(-1, 1, 1): Paf3Case.HYPERBOLIC_P_TIMELIKE,
}


def _is_trig(case) -> bool:
    return case in (Paf2Case.TRIG_N_TIMELIKE, Paf3Case.TRIG_B_TIMELIKE)


@dataclass(frozen=True)
class PositionComponents:
    """Projections <beta, T>, <beta, N>, <beta, B>; scalars or arrays."""

    s: np.ndarray | float
    bT: np.ndarray | float
    bN: np.ndarray | float
    bB: np.ndarray | float

    def derivatives(self, fr) -> tuple:
        e1, e2, e3 = fr.signature
        dT = e1 + e2 * fr.kappa * self.bN
        dN = -e1 * fr.kappa * self.bT + e3 * fr.tau * self.bB
        dB = -e2 * fr.tau * self.bN
        return dT, dN, dB


def position_components(spec: CurveSpec, s, frenet: FrenetSample | FrenetTrace) -> PositionComponents:
    beta = evaluate(spec, s, 0)
    return PositionComponents(s, inner(beta, frenet.T), inner(beta, frenet.N), inner(beta, frenet.B))


def angular_momentum(pc: PositionComponents, frenet, m: float = 1.0, ds_dt: float = 1.0) -> np.ndarray:
    """Angular momentum z x_L (m ds/dt T) written in the Frenet frame."""
    if m <= 0 or ds_dt <= 0:
        raise ValueError("mass and speed must be positive")
    e1, e2, e3 = frenet.signature
    k = e2 * e3 * m * ds_dt
    bN = np.asarray(pc.bN, dtype=float)[..., None]
    bB = np.asarray(pc.bB, dtype=float)[..., None]
    return -k * bN * frenet.B + k * bB * frenet.N


# ---------------------------------------------------------------- samples


@dataclass(frozen=True)
class Paf2Sample:
    s: float
    H: np.ndarray
    N: np.ndarray
    D: np.ndarray
    phi: float
    p1: float
    p2: float
    p3: float
    signature: Signature
    case: Paf2Case

    @property
    def legs(self) -> np.ndarray:
        return np.stack([self.H, self.N, self.D])

    @property
    def apparatus(self) -> np.ndarray:
        return np.array([self.p1, self.p2, self.p3])


@dataclass(frozen=True)
class Paf3Sample:
    s: float
    P: np.ndarray
    F: np.ndarray
    B: np.ndarray
    phi: float
    n1: float
    n2: float
    n3: float
    signature: Signature
    case: Paf3Case

    @property
    def legs(self) -> np.ndarray:
        return np.stack([self.P, self.F, self.B])

    @property
    def apparatus(self) -> np.ndarray:
        return np.array([self.n1, self.n2, self.n3])


@dataclass
class FrameTrace:
    """Adapted frame along a grid: ``legs`` is (n, 3, 3), ``apparatus`` (n, 3).

    ``gaps`` lists (s_start, s_end, reason) runs of grid points dropped
    because the frame does not exist there (only in non-strict builds).
    """

    kind: str
    s: np.ndarray
    legs: np.ndarray
    apparatus: np.ndarray
    signature: Signature | None
    case: enum.Enum | None = None
    phi: np.ndarray | None = None
    phi_prime: np.ndarray | None = None
    gaps: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.s)

    def __iter__(self) -> Iterator:
        return (self[i] for i in range(len(self)))

    def __getitem__(self, i: int):
        e, q = self.legs[i], self.apparatus[i]
        if self.kind == "paf2":
            return Paf2Sample(float(self.s[i]), e[0], e[1], e[2], float(self.phi[i]),
                              float(q[0]), float(q[1]), float(q[2]), self.signature, self.case)
        if self.kind == "paf3":
            return Paf3Sample(float(self.s[i]), e[0], e[1], e[2], float(self.phi[i]),
                              float(q[0]), float(q[1]), float(q[2]), self.signature, self.case)
        return FrenetSample(float(self.s[i]), e[0], e[1], e[2], float(q[0]), float(q[2]), self.signature)

    def leg(self, i: int) -> np.ndarray:
        return self.legs[:, i, :]

    def leg_derivatives(self) -> np.ndarray:
        """(e1', e2', e3') from the derivative matrix, shape (n, 3, 3)."""
        K = derivative_matrix(self.apparatus, self.signature)
        return np.einsum("nij,njk->nik", K, self.legs)


def frenet_frame_trace(fr: FrenetTrace) -> FrameTrace:
    return FrameTrace("frenet", fr.s, fr.legs, fr.apparatus, fr.signature)


# ---------------------------------------------------------------- apparatus formulas


def type2_apparatus(sample, kappa, tau, phi_prime) -> tuple:
    """(p1, p2, p3) from the Frenet curvatures and the rotation angle."""
    phi = sample.phi
    if _is_trig(sample.case):
        c, s = np.cos(phi), np.sin(phi)
        return kappa * c + tau * s, -phi_prime, -kappa * s + tau * c
    ch, sh = np.cosh(phi), np.sinh(phi)
    return kappa * ch - tau * sh, -phi_prime, -kappa * sh + tau * ch


def type3_apparatus(sample, kappa, tau, phi_prime) -> tuple:
    """(n1, n2, n3) from the Frenet curvatures and the rotation angle.

    In the hyperbolic cases n1 = kappa + eps2 phi', which is kappa - phi'
    when F is timelike and kappa + phi' when P is timelike.
    """
    phi = sample.phi
    if _is_trig(sample.case):
        return kappa - phi_prime, -tau * np.sin(phi), tau * np.cos(phi)
    eps2 = sample.signature.eps2
    return kappa + eps2 * phi_prime, tau * np.sinh(phi), tau * np.cosh(phi)


# ---------------------------------------------------------------- construction


class _Checks:
    """Per-point failure masks in priority order."""

    def __init__(self, s: np.ndarray):
        self.s = s
        self.items: list[tuple[np.ndarray, type, str]] = []

    def add(self, mask, exc: type, message: str) -> None:
        self.items.append((np.asarray(mask, dtype=bool), exc, message))

    def invalid(self) -> np.ndarray:
        bad = np.zeros(self.s.shape, dtype=bool)
        for mask, _, _ in self.items:
            bad |= mask
        return bad

    def raise_first(self) -> None:
        first = None
        for mask, exc, msg in self.items:
            if np.any(mask):
                i = int(np.argmax(mask))
                if first is None or i < first[0]:
                    first = (i, exc, msg)
        if first is not None:
            i, exc, msg = first
            raise exc(msg, s=float(self.s[i]))

    def gaps(self) -> list:
        out = []
        bad = self.invalid()
        i, n = 0, len(bad)
        while i < n:
            if not bad[i]:
                i += 1
                continue
            j = i
            while j + 1 < n and bad[j + 1]:
                j += 1
            reason = next(exc.__name__ for mask, exc, _ in self.items if mask[i])
            out.append((float(self.s[i]), float(self.s[j]), reason))
            i = j + 1
        return out


def _subset(fr: FrenetTrace, pc: PositionComponents, keep: np.ndarray):
    fr = FrenetTrace(fr.s[keep], fr.T[keep], fr.N[keep], fr.B[keep], fr.kappa[keep], fr.tau[keep], fr.signature)
    pc = PositionComponents(pc.s[keep], pc.bT[keep], pc.bN[keep], pc.bB[keep])
    return fr, pc


def _build(kind: str, fr: FrenetTrace, pc: PositionComponents, tol: float,
           check_momentum: bool, strict: bool, tol_frame: float) -> FrameTrace:
    sig = fr.signature
    e1, e2, e3 = sig
    s = np.asarray(fr.s, dtype=float)
    bT, bN, bB = (np.asarray(v, dtype=float) for v in (pc.bT, pc.bN, pc.bB))
    cases = _PAF2_CASES if kind == "paf2" else _PAF3_CASES
    if sig not in cases:
        raise BadSignature(f"{kind} undefined for Frenet signature {sig}", s=float(s[0]))
    case = cases[sig]

    checks = _Checks(s)
    if kind == "paf2":
        # H = (eps1 bT T - eps3 bB B)/den, D = eps3 H x N
        x, y = e1 * bT, -e3 * bB
        den2 = e1 * bT**2 + e3 * bB**2
        want, gated, gate_name = e1, bB, "normal"
    else:
        # F = (eps1 bT T - eps2 bN N)/den, P = eps1 F x B
        x, y = e1 * bT, -e2 * bN
        den2 = e1 * bT**2 + e2 * bN**2
        want, gated, gate_name = e2, bN, "binormal"
    checks.add(np.abs(den2) <= tol, DegenerateDenominator, f"{kind} denominator |{den2.min():.3e}| below tolerance")
    if check_momentum:
        checks.add(np.abs(gated) <= tol, ZeroAngularMomentumComponent,
                   f"{gate_name} component of the angular momentum vanishes")
    checks.add(np.sign(den2) != want, BadSignature, f"{kind} signature differs from the Frenet signature {sig}")
    if not _is_trig(case):
        lead = x if kind == "paf2" else y
        checks.add(lead <= 0, BadSignature, f"{kind} lies on the opposite sheet of the hyperbolic rotation")

    if strict:
        checks.raise_first()
        keep = np.ones(s.shape, dtype=bool)
    else:
        keep = ~checks.invalid()
        fr, pc = _subset(fr, pc, keep)
        s, bT, bN, bB, x, y, den2 = s[keep], bT[keep], bN[keep], bB[keep], x[keep], y[keep], den2[keep]

    den = np.sqrt(np.abs(den2))[:, None]
    dT, dN, dB = pc.derivatives(fr)
    if kind == "paf2":
        first = (x[:, None] * fr.T + y[:, None] * fr.B) / den
        dx, dy = e1 * dT, -e3 * dB
        if _is_trig(case):
            phi = np.unwrap(np.arctan2(-y, x))
            phi_prime = (y * dx - x * dy) / (x**2 + y**2)
        else:
            phi = np.arctanh(y / x)
            phi_prime = (x * dy - y * dx) / (x**2 - y**2)
        third = e3 * cross_l(first, fr.N)
        legs = np.stack([first, fr.N, third], axis=-2)
        app = type2_apparatus(_Angle(phi, case, sig), fr.kappa, fr.tau, phi_prime)
    else:
        second = (x[:, None] * fr.T + y[:, None] * fr.N) / den
        dx, dy = e1 * dT, -e2 * dN
        if _is_trig(case):
            phi = np.unwrap(np.arctan2(x, y))
            phi_prime = (y * dx - x * dy) / (x**2 + y**2)
        else:
            phi = np.arctanh(x / y)
            phi_prime = (y * dx - x * dy) / (y**2 - x**2)
        first = e1 * cross_l(second, fr.B)
        legs = np.stack([first, second, fr.B], axis=-2)
        app = type3_apparatus(_Angle(phi, case, sig), fr.kappa, fr.tau, phi_prime)

    trace = FrameTrace(kind, s, legs, np.stack(app, axis=-1), sig, case, phi, phi_prime,
                       [] if strict else checks.gaps())
    if len(trace):
        validate_frame(legs[:, 0], legs[:, 1], legs[:, 2], tol_frame)
    return trace


@dataclass(frozen=True)
class _Angle:
    phi: np.ndarray
    case: enum.Enum
    signature: Signature


def paf_trace(spec: CurveSpec, s_grid, kind: str, tol: float = TOL_DEN, *, strict: bool = True,
              check_momentum: bool = True, tol_null: float = TOL_NULL,
              tol_frame: float = TOL_FRAME) -> FrameTrace:
    """Frame of the requested kind ('frenet', 'paf2' or 'paf3') along a grid.

    With ``strict=False`` points where the frame does not exist are dropped
    and reported in ``gaps`` instead of raising.
    """
    fr = frenet_trace(spec, s_grid, tol_null)
    if kind == "frenet":
        return frenet_frame_trace(fr)
    if kind not in ("paf2", "paf3"):
        raise ValueError(f"unknown frame kind {kind!r}")
    if len(fr) == 0:
        return FrameTrace(kind, fr.s, np.zeros((0, 3, 3)), np.zeros((0, 3)), None)
    pc = position_components(spec, fr.s, fr)
    return _build(kind, fr, pc, tol, check_momentum, strict, tol_frame)


def paf2_trace(spec: CurveSpec, s_grid, tol: float = TOL_DEN, **kw) -> FrameTrace:
    return paf_trace(spec, s_grid, "paf2", tol, **kw)


def paf3_trace(spec: CurveSpec, s_grid, tol: float = TOL_DEN, **kw) -> FrameTrace:
    return paf_trace(spec, s_grid, "paf3", tol, **kw)


def _single(kind: str, pc: PositionComponents, frenet: FrenetSample, tol: float, check_momentum: bool):
    fr = FrenetTrace(np.atleast_1d(float(frenet.s)), frenet.T[None], frenet.N[None], frenet.B[None],
                     np.atleast_1d(frenet.kappa), np.atleast_1d(frenet.tau), frenet.signature)
    pc1 = PositionComponents(*(np.atleast_1d(np.asarray(v, dtype=float)) for v in (pc.s, pc.bT, pc.bN, pc.bB)))
    return _build(kind, fr, pc1, tol, check_momentum, True, TOL_FRAME)[0]


def type2_frame(pc: PositionComponents, frenet: FrenetSample, tol: float = TOL_DEN,
                check_momentum: bool = True) -> Paf2Sample:
    return _single("paf2", pc, frenet, tol, check_momentum)


def type3_frame(pc: PositionComponents, frenet: FrenetSample, tol: float = TOL_DEN,
                check_momentum: bool = True) -> Paf3Sample:
    return _single("paf3", pc, frenet, tol, check_momentum)


def phi_prime_centered(trace: FrameTrace) -> np.ndarray:
    """Second-order finite-difference phi' on the (unwrapped) trace grid."""
    return np.gradient(trace.phi, trace.s, edge_order=2)


class FrameField:
    """Frame of one kind evaluated on demand along a curve."""

    def __init__(self, spec: CurveSpec, kind: str, tol: float = TOL_DEN, **kw):
        self.spec = spec
        self.kind = kind
        self.tol = tol
        self.kw = kw

    def __call__(self, s) -> FrameTrace:
        return paf_trace(self.spec, s, self.kind, self.tol, **self.kw)


# ---------------------------------------------------------------- derivative checks


@dataclass(frozen=True)
class DerivativeReport:
    hs: np.ndarray
    residuals: np.ndarray
    apparatus_residuals: np.ndarray
    order: float
    apparatus_order: float

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals))


def _fit_order(hs: np.ndarray, res: np.ndarray) -> float:
    ok = res > 0
    if ok.sum() < 2:
        return float("inf")
    return float(np.polyfit(np.log(hs[ok]), np.log(res[ok]), 1)[0])


def _fd_residual(field: FrameField, s_points: np.ndarray, h: float, apparatus=None) -> tuple[float, float]:
    mid = field(s_points)
    plus, minus = field(s_points + h), field(s_points - h)
    fd = (plus.legs - minus.legs) / (2 * h)
    q = mid.apparatus if apparatus is None else np.broadcast_to(apparatus, mid.apparatus.shape)
    K = derivative_matrix(q, mid.signature)
    predicted = np.einsum("nij,njk->nik", K, mid.legs)
    res = float(np.max(np.abs(fd - predicted)))
    e = mid.legs
    q_fd = np.stack([inner(fd[:, 0], e[:, 1]), inner(fd[:, 0], e[:, 2]), inner(fd[:, 1], e[:, 2])], axis=-1)
    return res, float(np.max(np.abs(q_fd - q)))


def verify_derivative_matrix(field: FrameField, s_points, hs=(1e-3, 1e-4, 1e-5), apparatus=None) -> DerivativeReport:
    """Compare centered differences of the legs with the derivative matrix.

    ``apparatus`` overrides the analytic values (used to show that a
    perturbed apparatus is detected). The fitted orders are log-log slopes
    of the max residual against h.
    """
    s_points = np.atleast_1d(np.asarray(s_points, dtype=float))
    hs = np.asarray(hs, dtype=float)
    pairs = np.array([_fd_residual(field, s_points, h, apparatus) for h in hs])
    return DerivativeReport(hs, pairs[:, 0], pairs[:, 1], _fit_order(hs, pairs[:, 0]), _fit_order(hs, pairs[:, 1]))


def trace_derivative_residual(trace: FrameTrace) -> float:
    """Max residual of the derivative matrix on interior points of a uniform trace."""
    if len(trace) < 3:
        return 0.0
    h = np.diff(trace.s)
    if not np.allclose(h, h[0], rtol=1e-9, atol=0):
        raise ValueError("trace grid is not uniform")
    fd = (trace.legs[2:] - trace.legs[:-2]) / (2 * h[0])
    predicted = trace.leg_derivatives()[1:-1]
    return float(np.max(np.abs(fd - predicted)))



def rotated_legs(trace: FrameTrace, fr: FrenetTrace) -> np.ndarray:
    """Adapted legs rebuilt from the Frenet legs and phi alone.

    Type-2 mixes (T, B) and keeps N; type-3 mixes (T, N) and keeps B.
    """
    phi = trace.phi[:, None]
    T, N, B = fr.T, fr.N, fr.B
    trig = _is_trig(trace.case)
    c, s = (np.cos(phi), np.sin(phi)) if trig else (np.cosh(phi), np.sinh(phi))
    if trace.kind == "paf2":
        if trig:
            return np.stack([c * T - s * B, N, s * T + c * B], axis=-2)
        return np.stack([c * T + s * B, N, s * T + c * B], axis=-2)
    if trig:
        return np.stack([c * T - s * N, s * T + c * N, B], axis=-2)
    return np.stack([c * T + s * N, s * T + c * N, B], axis=-2)


def completion_residual(trace: FrameTrace) -> float:
    """Max residual of D = eps3 H x N (type-2) or P = eps1 F x B (type-3)."""
    e = trace.legs
    e1, _, e3 = trace.signature
    if trace.kind == "paf2":
        return float(np.max(np.abs(e[:, 2] - e3 * cross_l(e[:, 0], e[:, 1]))))
    return float(np.max(np.abs(e[:, 0] - e1 * cross_l(e[:, 1], e[:, 2]))))

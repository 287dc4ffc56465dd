"""Electric-field evolution along a framed curve.

Each case fixes an anchor leg of the adapted frame that the field stays
orthogonal to and a free scalar parameter. The right-hand side is written
through covariant frame components w_j = <E, e_j> as

    E' = sum_i c_i e_i,    c = C(apparatus, parameter) w,

which makes it a linear ODE E' = A(s) E with A = legs^T C legs G. Integration
is classical fixed-step RK4 with frames precomputed at nodes and half-nodes.

Anchor legs and required frame signatures:

    CASE_I    type-2 {H, N, D}, anchor H, signature (+,+,-)
    CASE_II   type-2 {H, N, D}, anchor N, signature (+,-,+)
    CASE_III  type-2 {H, N, D}, anchor D, signature (+,+,-)
    TYPE3     type-3 {P, F, B}, anchor B, signature (-,+,+)

With these signatures the anchored product and <E, E> are conserved
exactly by the flow; any other signature is rejected.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .algebra import METRIC, Signature, inner
from .errors import BadSignature, ConstraintViolatedAtStart, IntegratorBlowup
from .paf import FrameField, FrameTrace

TOL_CONSTRAINT = 1e-8


class CaseKind(enum.Enum):
    CASE_I = "1"
    CASE_II = "2"
    CASE_III = "3"
    TYPE3 = "t3"


@dataclass(frozen=True)
class _Layout:
    frame: str
    signature: Signature
    anchor: int
    plane: tuple[int, int]
    rate_index: int  # apparatus entry driving the rotation under FW transport


LAYOUT = {
    CaseKind.CASE_I: _Layout("paf2", Signature(1, 1, -1), 0, (1, 2), 2),
    CaseKind.CASE_II: _Layout("paf2", Signature(1, -1, 1), 1, (0, 2), 1),
    CaseKind.CASE_III: _Layout("paf2", Signature(1, 1, -1), 2, (0, 1), 0),
    CaseKind.TYPE3: _Layout("paf3", Signature(-1, 1, 1), 2, (0, 1), 0),
}


@dataclass(frozen=True)
class EvolutionCase:
    """One evolution law; ``parameter`` is a constant or a function of s."""

    kind: CaseKind
    parameter: float | Callable[[np.ndarray], np.ndarray] = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", CaseKind(self.kind))

    @property
    def layout(self) -> _Layout:
        return LAYOUT[self.kind]

    def parameter_at(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if callable(self.parameter):
            return np.broadcast_to(np.asarray(self.parameter(s), dtype=float), s.shape)
        return np.full(s.shape, float(self.parameter))

    def check_signature(self, sig: Signature | None) -> None:
        if sig != self.layout.signature:
            raise BadSignature(f"{self.kind.name} needs a {self.layout.frame} frame with signature "
                               f"{self.layout.signature}, got {sig}")


def coefficient_matrix(kind: CaseKind, apparatus, parameter, flipped_sign: bool = False) -> np.ndarray:
    """C with c = C w; broadcasts over leading axes of ``apparatus``.

    ``flipped_sign`` flips the entry feeding <E, H> into the D component in CASE_II,
    the variant that does not conserve <E, E>; it exists only for diagnostics.
    """
    q = np.asarray(apparatus, dtype=float)
    k = np.broadcast_to(np.asarray(parameter, dtype=float), q.shape[:-1])
    q1, q2, q3 = q[..., 0], q[..., 1], q[..., 2]
    C = np.zeros(q.shape[:-1] + (3, 3))
    kind = CaseKind(kind)
    if kind is CaseKind.CASE_I:
        C[..., 0, 1], C[..., 0, 2] = -q1, q2
        C[..., 1, 2], C[..., 2, 1] = k, -k
    elif kind is CaseKind.CASE_II:
        C[..., 0, 2] = k
        C[..., 1, 0], C[..., 1, 2] = -q1, q3
        C[..., 2, 0] = k if flipped_sign else -k
    elif kind is CaseKind.CASE_III:
        C[..., 0, 1], C[..., 1, 0] = k, -k
        C[..., 2, 0], C[..., 2, 1] = -q2, -q3
    else:
        C[..., 0, 1], C[..., 1, 0] = k, -k
        C[..., 2, 0], C[..., 2, 1] = -q2, q3
    return C


def covariant_components(legs, E) -> np.ndarray:
    """w_j = <E, e_j> for stacked legs (..., 3, 3) and vectors (..., 3)."""
    return inner(np.asarray(E, dtype=float)[..., None, :], legs)


def rhs(case: EvolutionCase, legs, apparatus, E, s=0.0, flipped_sign: bool = False) -> np.ndarray:
    """Evolution right-hand side in world coordinates."""
    legs = np.asarray(legs, dtype=float)
    C = coefficient_matrix(case.kind, apparatus, case.parameter_at(s), flipped_sign)
    c = np.einsum("...ij,...j->...i", C, covariant_components(legs, E))
    return np.einsum("...i,...ik->...k", c, legs)


def fermi_walker_derivative(anchor, anchor_s, E, E_s) -> np.ndarray:
    """E_s - eps (<u, E> u_s - <u_s, E> u) for a unit anchor u with <u, u> = eps.

    For a spacelike anchor this is E_s - <u,E> u_s + <u_s,E> u; for a
    timelike one the two correction terms change sign.
    """
    u, du = np.asarray(anchor, dtype=float), np.asarray(anchor_s, dtype=float)
    E = np.asarray(E, dtype=float)
    eps = np.sign(inner(u, u))[..., None]
    return np.asarray(E_s) - eps * (inner(u, E)[..., None] * du - inner(du, E)[..., None] * u)


def _flow_matrices(case: EvolutionCase, frames: FrameTrace, fermi_walker: bool,
                   flipped_sign: bool = False) -> np.ndarray:
    """A(s) with E' = A E at every frame sample."""
    legs = frames.legs
    if fermi_walker:
        k = case.layout.anchor
        u = legs[:, k]
        du = frames.leg_derivatives()[:, k]
        eps = frames.signature[k]
        return eps * (np.einsum("ni,nj->nij", du, u) - np.einsum("ni,nj->nij", u, du)) @ METRIC
    C = coefficient_matrix(case.kind, frames.apparatus, case.parameter_at(frames.s), flipped_sign)
    return np.einsum("nji,njk,nkl,lm->nim", legs, C, legs, METRIC)


@dataclass(frozen=True)
class FieldState:
    s: float
    E: np.ndarray
    components: tuple[float, float]
    pseudo_norm: float
    theta: float


@dataclass
class FieldTrace:
    """Integrated field with per-sample frame data and diagnostics.

    ``components`` holds all three covariant components <E, e_j>; the two
    of the admissible plane are ``components[:, layout.plane]``.
    """

    case: EvolutionCase
    fermi_walker: bool
    h: float
    s: np.ndarray
    E: np.ndarray
    legs: np.ndarray
    apparatus: np.ndarray
    components: np.ndarray
    pseudo_norm: np.ndarray
    theta: np.ndarray
    constraint: np.ndarray
    signature: Signature

    def __len__(self) -> int:
        return len(self.s)

    def __getitem__(self, i: int) -> FieldState:
        a, b = self.case.layout.plane
        w = self.components[i]
        return FieldState(float(self.s[i]), self.E[i], (float(w[a]), float(w[b])),
                          float(self.pseudo_norm[i]), float(self.theta[i]))

    def __iter__(self) -> Iterator[FieldState]:
        return (self[i] for i in range(len(self)))

    @property
    def plane_components(self) -> np.ndarray:
        return self.components[:, list(self.case.layout.plane)]

    @property
    def max_constraint(self) -> float:
        return float(np.max(np.abs(self.constraint)))

    @property
    def max_drift(self) -> float:
        """Largest |<E,E>(s) - <E,E>(0)|, relative when <E,E>(0) is not zero."""
        q0 = self.pseudo_norm[0]
        diff = np.abs(self.pseudo_norm - q0)
        return float(np.max(diff) / abs(q0)) if q0 != 0 else float(np.max(diff))

    def signed_invariant(self) -> np.ndarray:
        a, b = self.case.layout.plane
        w = self.components
        return self.signature[a] * w[:, a] ** 2 + self.signature[b] * w[:, b] ** 2


def uniform_grid(span: tuple[float, float], h: float) -> np.ndarray:
    """Nodes span[0] + k h; the step must divide the interval."""
    lo, hi = float(span[0]), float(span[1])
    if not (h > 0 and math.isfinite(h)):
        raise ValueError(f"step must be positive, got {h}")
    if hi < lo:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    n = round((hi - lo) / h)
    if abs(n * h - (hi - lo)) > 1e-9 * max(1.0, hi - lo):
        raise ValueError(f"step {h} does not divide [{lo}, {hi}]")
    return lo + h * np.arange(n + 1)


def step_propagators(A_nodes: np.ndarray, A_mid: np.ndarray, h: float) -> np.ndarray:
    """One classical RK4 step of E' = A E written as E_{k+1} = M_k E_k."""
    eye = np.eye(3)
    A0, Am, A1 = A_nodes[:-1], A_mid, A_nodes[1:]
    K2 = Am @ (eye + 0.5 * h * A0)
    K3 = Am @ (eye + 0.5 * h * K2)
    K4 = A1 @ (eye + h * K3)
    return eye + h / 6.0 * (A0 + 2 * K2 + 2 * K3 + K4)


def _integrate(A_nodes: np.ndarray, A_mid: np.ndarray, E0: np.ndarray, h: float, s: np.ndarray) -> np.ndarray:
    # overflow is reported below as a blowup, not as numpy warnings
    with np.errstate(over="ignore", invalid="ignore"):
        M = step_propagators(A_nodes, A_mid, h)
        E = np.empty((len(A_nodes), 3))
        E[0] = E0
        y = E0
        for k in range(len(M)):
            y = M[k] @ y
            E[k + 1] = y
    bad = ~np.all(np.isfinite(E), axis=-1)
    if np.any(bad):
        raise IntegratorBlowup("non-finite field", s=float(s[np.argmax(bad)]))
    return E


def _run(case: EvolutionCase, field: FrameField, E0, h: float, span, fermi_walker: bool,
         tol_constraint: float, flipped_sign: bool = False) -> FieldTrace:
    E0 = np.asarray(E0, dtype=float)
    if E0.shape != (3,) or not np.all(np.isfinite(E0)):
        raise ValueError("E0 must be a finite 3-vector")
    span = field.spec.domain if span is None else span
    s = uniform_grid(span, h)
    frames = field(s)
    case.check_signature(frames.signature)
    lay = case.layout

    w0 = covariant_components(frames.legs[0], E0)
    bound = tol_constraint * max(1.0, float(np.linalg.norm(E0)))
    if abs(w0[lay.anchor]) > bound:
        raise ConstraintViolatedAtStart(f"<E0, e{lay.anchor + 1}> = {w0[lay.anchor]:.3e} exceeds {bound:.1e}",
                                        s=float(s[0]))

    A_nodes = _flow_matrices(case, frames, fermi_walker, flipped_sign)
    if len(s) > 1:
        A_mid = _flow_matrices(case, field(s[:-1] + 0.5 * h), fermi_walker, flipped_sign)
    else:
        A_mid = np.zeros((0, 3, 3))
    E = _integrate(A_nodes, A_mid, E0, h, s)

    w = covariant_components(frames.legs, E)
    rate = frames.apparatus[:, lay.rate_index]
    theta = cumulative_trapezoid(rate, s, initial=0.0) if len(s) > 1 else np.zeros(1)
    return FieldTrace(case, fermi_walker, h, s, E, frames.legs, frames.apparatus, w,
                      inner(E, E), theta, w[:, lay.anchor], frames.signature)


def evolve(case: EvolutionCase, field: FrameField, E0, h: float = 1e-3, span=None,
           tol_constraint: float = TOL_CONSTRAINT, flipped_sign: bool = False) -> FieldTrace:
    """Integrate the case's evolution law with RK4 from ``span[0]``.

    ``span`` defaults to the curve domain. Conservation is measured, not
    enforced: see ``FieldTrace.max_constraint`` and ``max_drift``.
    """
    return _run(case, field, E0, h, span, False, tol_constraint, flipped_sign)


def fw_transport(case: EvolutionCase, field: FrameField, E0, h: float = 1e-3, span=None,
                 tol_constraint: float = TOL_CONSTRAINT) -> FieldTrace:
    """Fermi-Walker parallel transport along the case's anchor leg."""
    return _run(case, field, E0, h, span, True, tol_constraint)


def fw_rhs(case: EvolutionCase, frames: FrameTrace, E) -> np.ndarray:
    """E' solving FW(E) = 0 at every frame sample."""
    return np.einsum("nij,nj->ni", _flow_matrices(case, frames, True), np.asarray(E, dtype=float))


def rotation_rate(case: EvolutionCase, apparatus) -> np.ndarray:
    return np.asarray(apparatus)[..., case.layout.rate_index]


def rotation_law_residual(trace: FieldTrace) -> float:
    """Max deviation of the plane components from the rotation law.

    The component derivatives come from the integrated states through
    w_a' = <E', e_a> + <E, e_a'>, with E' from the transport equation and
    e_a' from the frame derivative matrix. The law itself reads
    u' = eps_b r v, v' = -eps_a r u with r the case's rotation rate.
    """
    case, sig = trace.case, trace.signature
    frames = FrameTrace("", trace.s, trace.legs, trace.apparatus, sig)
    dE = fw_rhs(case, frames, trace.E) if trace.fermi_walker else rhs(case, trace.legs, trace.apparatus,
                                                                       trace.E, trace.s)
    dlegs = frames.leg_derivatives()
    dw = covariant_components(trace.legs, dE) + inner(trace.E[:, None, :], dlegs)
    a, b = case.layout.plane
    r = rotation_rate(case, trace.apparatus)
    u, v = trace.components[:, a], trace.components[:, b]
    res_u = dw[:, a] - sig[b] * r * v
    res_v = dw[:, b] + sig[a] * r * u
    return float(max(np.max(np.abs(res_u)), np.max(np.abs(res_v))))


def rotate_plane(u0: float, v0: float, theta, eps_a: int, eps_b: int) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form solution of u' = eps_b r v, v' = -eps_a r u with theta = int r ds."""
    theta = np.asarray(theta, dtype=float)
    if eps_a == eps_b:
        c, s = np.cos(theta), np.sin(theta)
        return u0 * c + v0 * s, -u0 * s + v0 * c
    ch, sh = np.cosh(theta), np.sinh(theta)
    return u0 * ch + eps_b * v0 * sh, v0 * ch - eps_a * u0 * sh


def admissible_field(case: EvolutionCase, legs, u: float, v: float) -> np.ndarray:
    """World vector with covariant plane components (u, v) and zero anchor component."""
    sig = LAYOUT[case.kind].signature
    a, b = case.layout.plane
    legs = np.asarray(legs, dtype=float)
    return sig[a] * u * legs[..., a, :] + sig[b] * v * legs[..., b, :]


def rotation_angle(case: EvolutionCase, field: FrameField, s_points, nodes: int = 24) -> np.ndarray:
    """Integral of the rotation rate from s_points[0] by Gauss-Legendre quadrature.

    A reference for ``FieldTrace.theta`` that does not depend on the
    integration grid.
    """
    s_points = np.asarray(s_points, dtype=float)
    x, wts = np.polynomial.legendre.leggauss(nodes)
    lo, hi = s_points[:-1, None], s_points[1:, None]
    half = 0.5 * (hi - lo)
    pts = (lo + hi) / 2 + half * x
    rate = rotation_rate(case, field(pts.ravel()).apparatus).reshape(pts.shape)
    pieces = np.sum(rate * wts, axis=-1) * half[:, 0]
    return np.concatenate([[0.0], np.cumsum(pieces)])

"""Lorentz-force operators of the evolution laws and their magnetic vectors.

Everything here works on contravariant components x in the adapted frame
(E = sum x_i e_i). A force matrix M acts by Phi(e_i) = sum_j M_ij e_j, so
Phi(E) has components M^T x. Cross products of components in a positively
oriented orthonormal frame are ``component_cross``.

The tabulated closed-form matrices and magnetic vectors are treated as
claims: the evolution right-hand side is the reference they are measured
against, and their residuals are reported rather than asserted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Signature, component_cross
from .errors import NoConsistentVector
from .evolution import LAYOUT, CaseKind, coefficient_matrix

TOL_SOLVE = 1e-10


def tabulated_matrix(kind: CaseKind, apparatus, parameter: float) -> np.ndarray:
    q1, q2, q3 = (float(v) for v in apparatus)
    k = float(parameter)
    kind = CaseKind(kind)
    if kind is CaseKind.CASE_I:
        rows = [[0, q1, -q2], [-q1, 0, -k], [-q2, -k, 0]]
    elif kind is CaseKind.CASE_II:
        rows = [[0, q1, -k], [q1, 0, -q3], [-k, -q3, 0]]
    elif kind is CaseKind.CASE_III:
        rows = [[0, -k, -q2], [k, 0, -q3], [-q2, -q3, 0]]
    else:
        rows = [[0, k, -q2], [k, 0, -q3], [-q2, q3, 0]]
    return np.array(rows, dtype=float)


def tabulated_vector(kind: CaseKind, apparatus, parameter: float) -> np.ndarray:
    q1, q2, q3 = (float(v) for v in apparatus)
    k = float(parameter)
    kind = CaseKind(kind)
    if kind is CaseKind.CASE_I:
        return np.array([k, -q2, -q1])
    if kind is CaseKind.CASE_II:
        return np.array([-q3, k, -q1])
    if kind is CaseKind.CASE_III:
        return np.array([q3, -q2, -k])
    return np.array([-q3, q2, k])


def rhs_components(kind: CaseKind, apparatus, parameter: float, x, signature: Signature) -> np.ndarray:
    """Contravariant components of the evolution right-hand side for E = sum x_i e_i."""
    w = np.asarray(x, dtype=float) * signature.as_array()
    C = coefficient_matrix(kind, apparatus, parameter)
    return w @ C.T


@dataclass(frozen=True)
class ForceOperator:
    kind: CaseKind
    matrix: np.ndarray
    v_tabulated: np.ndarray
    v_derived: np.ndarray | None
    signature: Signature

    def apply(self, x) -> np.ndarray:
        return np.asarray(x, dtype=float) @ self.matrix

    def skewness_residual(self) -> float:
        """max |G M + (G M)^T|, zero when M is skew-adjoint for the metric."""
        gm = np.diag(self.signature.as_array()) @ self.matrix
        return float(np.max(np.abs(gm + gm.T)))

    def plain_skewness_residual(self) -> float:
        return float(np.max(np.abs(self.matrix + self.matrix.T)))


def derive_magnetic_vector(kind: CaseKind, apparatus, parameter: float, signature: Signature | None = None,
                           probes=None, tol: float = TOL_SOLVE) -> np.ndarray:
    """V with V x E reproducing the evolution right-hand side on the admissible plane.

    ``probes`` are component vectors spanning the plane; by default the two
    plane legs. The 3-unknown system is solved in the least-squares sense
    and rejected with ``NoConsistentVector`` when its residual exceeds
    ``tol`` relative to the data.
    """
    kind = CaseKind(kind)
    lay = LAYOUT[kind]
    signature = lay.signature if signature is None else signature
    if probes is None:
        probes = np.eye(3)[list(lay.plane)]
    probes = np.atleast_2d(np.asarray(probes, dtype=float))
    rows, rhs = [], []
    for x in probes:
        # V x x is linear in V: column j is the product with the j-th unit vector
        rows.append(np.stack([component_cross(e, x, signature) for e in np.eye(3)], axis=-1))
        rhs.append(rhs_components(kind, apparatus, parameter, x, signature))
    A, b = np.vstack(rows), np.concatenate(rhs)
    V, *_ = np.linalg.lstsq(A, b, rcond=None)
    residual = float(np.max(np.abs(A @ V - b))) if b.size else 0.0
    scale = max(1.0, float(np.max(np.abs(b))))
    if residual > tol * scale:
        raise NoConsistentVector(f"{kind.name}: no magnetic vector for signature {signature}; "
                                 f"residual {residual:.3e}")
    return V


def force_matrix(kind: CaseKind, apparatus, parameter: float, signature: Signature | None = None) -> ForceOperator:
    kind = CaseKind(kind)
    signature = LAYOUT[kind].signature if signature is None else signature
    try:
        derived = derive_magnetic_vector(kind, apparatus, parameter, signature)
    except NoConsistentVector:
        derived = None
    return ForceOperator(kind, tabulated_matrix(kind, apparatus, parameter),
                         tabulated_vector(kind, apparatus, parameter), derived, signature)


@dataclass(frozen=True)
class ForceReport:
    kind: CaseKind
    n_samples: int
    solvable: bool
    v_derived: list | None
    v_tabulated: list
    matrix_residual: float
    v_tabulated_residual: float
    v_derived_residual: float | None
    skewness_residual: float
    plain_skewness_residual: float
    pseudo_norm_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        ok = self.pseudo_norm_residual < self.tol
        if self.solvable:
            ok = ok and self.v_derived_residual < self.tol
        return ok

    def to_dict(self) -> dict:
        return {
            "case": self.kind.value,
            "n_samples": self.n_samples,
            "solvable": self.solvable,
            "v_derived": self.v_derived,
            "v_tabulated": self.v_tabulated,
            "matrix_residual": self.matrix_residual,
            "v_tabulated_residual": self.v_tabulated_residual,
            "v_derived_residual": self.v_derived_residual,
            "skewness_residual": self.skewness_residual,
            "plain_skewness_residual": self.plain_skewness_residual,
            "pseudo_norm_residual": self.pseudo_norm_residual,
            "passed": self.passed,
        }


def random_admissible(kind: CaseKind, n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Random component vectors with zero anchor component."""
    x = rng.uniform(-scale, scale, size=(n, 3))
    x[:, LAYOUT[CaseKind(kind)].anchor] = 0.0
    return x


def verify_force_identity(kind: CaseKind, apparatus, parameter: float, signature: Signature | None = None,
                          n_random: int = 100, rng: np.random.Generator | None = None,
                          tol: float = TOL_SOLVE) -> ForceReport:
    """Compare rhs, matrix action and both magnetic vectors on random admissible fields.

    Only <rhs(E), E> = 0 and, when V can be derived, V x E = rhs(E) are
    asserted; the tabulated matrix and vector are reported.
    """
    kind = CaseKind(kind)
    op = force_matrix(kind, apparatus, parameter, signature)
    sig = op.signature
    rng = np.random.default_rng(0) if rng is None else rng
    X = random_admissible(kind, n_random, rng)
    R = rhs_components(kind, apparatus, parameter, X, sig)
    g = sig.as_array()

    def worst(a) -> float:
        return float(np.max(np.abs(a))) if a.size else 0.0

    v_der_res = None
    if op.v_derived is not None:
        v_der_res = worst(component_cross(op.v_derived, X, sig) - R)
    return ForceReport(
        kind=kind,
        n_samples=n_random,
        solvable=op.v_derived is not None,
        v_derived=None if op.v_derived is None else [float(v) for v in op.v_derived],
        v_tabulated=[float(v) for v in op.v_tabulated],
        matrix_residual=worst(op.apply(X) - R),
        v_tabulated_residual=worst(component_cross(op.v_tabulated, X, sig) - R),
        v_derived_residual=v_der_res,
        skewness_residual=op.skewness_residual(),
        plain_skewness_residual=op.plain_skewness_residual(),
        pseudo_norm_residual=worst(np.sum(R * X * g, axis=-1)),
        tol=tol,
    )

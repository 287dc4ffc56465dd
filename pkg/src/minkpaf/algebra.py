"""Lorentzian vector algebra in R^3 with the metric diag(1, 1, -1).

Vectors are plain numpy arrays whose last axis has length 3; every function
broadcasts over leading axes so that whole traces can be processed at once.
The third coordinate is the timelike one.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import expm

from .errors import BadSignature, NearNullVector, NotOrthonormal

TOL_NULL = 1e-10
TOL_FRAME = 1e-9

METRIC = np.diag([1.0, 1.0, -1.0])


def as_vec(x) -> np.ndarray:
    """Convert to a float array with a trailing axis of 3, rejecting NaN/Inf."""
    v = np.asarray(x, dtype=float)
    if v.shape[-1:] != (3,):
        raise ValueError(f"expected trailing dimension 3, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("non-finite vector component")
    return v


def inner(x, y) -> np.ndarray | float:
    """Indefinite inner product x1*y1 + x2*y2 - x3*y3."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return x[..., 0] * y[..., 0] + x[..., 1] * y[..., 1] - x[..., 2] * y[..., 2]


class Causal(enum.Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    NULL = "null"


@dataclass(frozen=True)
class CausalCharacter:
    kind: Causal
    scalar: float


def causal_character(x, tol_null: float = TOL_NULL) -> CausalCharacter:
    """Classify a single vector; values exactly at the tolerance count as null."""
    q = float(inner(as_vec(x), x))
    if q > tol_null:
        kind = Causal.SPACELIKE
    elif q < -tol_null:
        kind = Causal.TIMELIKE
    else:
        kind = Causal.NULL
    return CausalCharacter(kind, q)


def cross_l(x, y) -> np.ndarray:
    """Lorentz cross product, the unique w with <w, z> = det(x, y, z) for all z."""
    w = np.cross(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    w[..., 2] *= -1.0
    return w


def normalize(x, tol_null: float = TOL_NULL) -> tuple[np.ndarray, int]:
    """Scale a non-null vector to unit pseudo-length.

    Returns the unit vector and the sign of <x, x>.
    """
    v = as_vec(x)
    q = float(inner(v, v))
    if abs(q) <= tol_null:
        raise NearNullVector(f"cannot normalize vector with <x,x> = {q:.3e}")
    return v / np.sqrt(abs(q)), (1 if q > 0 else -1)


class Signature(NamedTuple):
    """Causal signs of an ordered orthonormal triple; exactly one is -1."""

    eps1: int
    eps2: int
    eps3: int

    @classmethod
    def of(cls, eps1, eps2, eps3) -> "Signature":
        sig = cls(int(eps1), int(eps2), int(eps3))
        if any(e not in (-1, 1) for e in sig):
            raise BadSignature(f"signature entries must be +-1, got {tuple(sig)}")
        if sig.count(-1) != 1:
            raise BadSignature(f"need exactly one timelike leg, got {tuple(sig)}")
        return sig

    @property
    def timelike_index(self) -> int:
        return self.index(-1)

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)

    def __str__(self) -> str:
        return "(" + ",".join("+" if e > 0 else "-" for e in self) + ")"


def frame_gram(a, b, c) -> np.ndarray:
    """Gram matrices <e_i, e_j> of stacked triples, shape (..., 3, 3)."""
    legs = np.stack([as_vec(a), as_vec(b), as_vec(c)], axis=-2)
    return np.einsum("...ik,kl,...jl->...ij", legs, METRIC, legs)


def _gram_residual(gram: np.ndarray) -> float:
    if gram.size == 0:
        return 0.0
    diag = np.diagonal(gram, axis1=-2, axis2=-1)
    off = gram - np.einsum("...i,ij->...ij", diag, np.eye(3))
    return float(max(np.max(np.abs(off)), np.max(np.abs(np.abs(diag) - 1.0))))


def orthonormality_residual(a, b, c) -> float:
    """Worst |<e_i, e_j>| (i != j) or ||<e_i, e_i>| - 1| over a triple or stack."""
    return _gram_residual(frame_gram(a, b, c))


def validate_frame(a, b, c, tol: float = TOL_FRAME) -> Signature:
    """Check orthonormality of one triple (or a stack of triples).

    Every triple in a stack must share one signature.
    """
    gram = frame_gram(a, b, c)
    worst = _gram_residual(gram)
    if not worst < tol:
        raise NotOrthonormal("frame is not orthonormal", worst)
    signs = np.sign(np.diagonal(gram, axis1=-2, axis2=-1)).reshape(-1, 3).astype(int)
    if signs.size == 0:
        raise ValueError("empty frame stack")
    if np.any(signs != signs[0]):
        raise BadSignature("signature changes along the frame stack")
    return Signature.of(*signs[0])


def frame_relation_residual(a, b, c, sig: Signature) -> float:
    """Max residual of a x b = eps3 c, b x c = eps1 a, c x a = eps2 b."""
    a, b, c = as_vec(a), as_vec(b), as_vec(c)
    r1 = cross_l(a, b) - sig.eps3 * c
    r2 = cross_l(b, c) - sig.eps1 * a
    r3 = cross_l(c, a) - sig.eps2 * b
    return float(max(np.max(np.abs(r1)), np.max(np.abs(r2)), np.max(np.abs(r3))))


def orientation(a, b, c) -> np.ndarray | float:
    """Sign of det(a, b, c); +1 for frames obeying the cross-product relations."""
    legs = np.stack([as_vec(a), as_vec(b), as_vec(c)], axis=-2)
    return np.sign(np.linalg.det(legs))


def derivative_matrix(q, sig: Signature) -> np.ndarray:
    """Coefficient matrix K with (e1', e2', e3') = K (e1, e2, e3).

    ``q = (q1, q2, q3)`` with q1 = <e1', e2>, q2 = <e1', e3>, q3 = <e2', e3>;
    Frenet frames use (kappa, 0, tau). Broadcasts over leading axes of ``q``.
    """
    q = np.asarray(q, dtype=float)
    e1, e2, e3 = sig
    K = np.zeros(q.shape[:-1] + (3, 3))
    K[..., 0, 1] = e2 * q[..., 0]
    K[..., 0, 2] = e3 * q[..., 1]
    K[..., 1, 0] = -e1 * q[..., 0]
    K[..., 1, 2] = e3 * q[..., 2]
    K[..., 2, 0] = -e1 * q[..., 1]
    K[..., 2, 1] = -e2 * q[..., 2]
    return K


def component_cross(x, y, sig: Signature) -> np.ndarray:
    """Cross product computed on components in a positively oriented orthonormal frame."""
    w = np.cross(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    return w * sig.as_array()


_BASE_FRAMES = {
    (1, 1, -1): np.eye(3),
    (1, -1, 1): np.array([[1.0, 0, 0], [0, 0, 1], [0, -1, 0]]),
    (-1, 1, 1): np.array([[0.0, 0, 1], [1, 0, 0], [0, 1, 0]]),
}


def random_lorentz_frame(sig: Signature, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Rows form a positively oriented orthonormal frame of signature ``sig``.

    A proper Lorentz transformation exp(G S), S antisymmetric with entries
    of size ``scale``, is applied to a fixed frame of the signature.
    """
    a = rng.uniform(-scale, scale, 3)
    S = np.array([[0, a[0], a[1]], [-a[0], 0, a[2]], [-a[1], -a[2], 0]])
    L = expm(METRIC @ S)
    return _BASE_FRAMES[tuple(Signature.of(*sig))] @ L.T

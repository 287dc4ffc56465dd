"""Bundled helix fixtures on s in [0, 10].

Each helix is shifted along its own arc length so that the adapted frames
it is used with exist on the whole interval.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import CurveSpec, Family
from .evolution import CaseKind


@dataclass(frozen=True)
class Fixture:
    name: str
    spec: CurveSpec
    frames: tuple[str, ...]
    cases: tuple[CaseKind, ...]


FIXTURES = {
    f.name: f
    for f in (
        Fixture("helix_timelike",
                CurveSpec(Family.HELIX_TIMELIKE, {"a": 8.0, "b": 16.0, "s0": -5.0}, (0.0, 10.0)),
                ("frenet", "paf3"), (CaseKind.TYPE3,)),
        Fixture("helix_spacelike_timelike_normal",
                CurveSpec(Family.HELIX_SPACELIKE_TIMELIKE_NORMAL, {"a": 1.0, "b": 2.0, "s0": 1.0}, (0.0, 10.0)),
                ("frenet", "paf2"), (CaseKind.CASE_II,)),
        Fixture("helix_spacelike_timelike_binormal",
                CurveSpec(Family.HELIX_SPACELIKE_TIMELIKE_BINORMAL, {"a": 1.0, "b": 3.0, "s0": 1.0}, (0.0, 10.0)),
                ("frenet", "paf2", "paf3"), (CaseKind.CASE_I, CaseKind.CASE_III)),
    )
}


def fixture_for(kind: CaseKind) -> Fixture:
    return next(f for f in FIXTURES.values() if kind in f.cases)


def helix_curvature_torsion(spec: CurveSpec) -> tuple[float, float]:
    """Closed-form (kappa, tau) of a helix family; tau < 0 for the timelike-normal family."""
    a, b, c = float(spec.params["a"]), float(spec.params["b"]), spec.c
    tau = b / c**2
    if spec.family is Family.HELIX_SPACELIKE_TIMELIKE_NORMAL:
        tau = -tau
    return a / c**2, tau


def convergence_specimen(fixture: Fixture, kappa: float = 5.0) -> CurveSpec:
    """The fixture helix scaled so its curvature is ``kappa``.

    Centered differences of the bundled helices hit double-precision
    roundoff before h reaches 1e-5 because their curvature is small;
    scaling keeps every frame and its existence region but raises the
    truncation error well above roundoff.
    """
    a, c = float(fixture.spec.params["a"]), fixture.spec.c
    return fixture.spec.scaled((a / c**2) / kappa)


def convergence_points(spec: CurveSpec, n: int = 9) -> np.ndarray:
    lo, hi = spec.domain
    return np.linspace(lo + 0.05 * (hi - lo), lo + 0.5 * (hi - lo), n)

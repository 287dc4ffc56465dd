from types import SimpleNamespace

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from minkpaf.algebra import Signature, cross_l, inner, validate_frame
from minkpaf.curves import (
    CurveSpec,
    Family,
    FrenetSample,
    evaluate,
    frenet,
    frenet_trace,
)
from minkpaf.errors import (
    BadSignature,
    DegenerateDenominator,
    ZeroAngularMomentumComponent,
)
from minkpaf.fixtures import FIXTURES, convergence_points, convergence_specimen
from minkpaf.paf import (
    FrameField,
    Paf2Case,
    Paf3Case,
    PositionComponents,
    angular_momentum,
    completion_residual,
    paf_trace,
    phi_prime_centered,
    position_components,
    rotated_legs,
    trace_derivative_residual,
    type2_apparatus,
    type2_frame,
    type3_apparatus,
    type3_frame,
    verify_derivative_matrix,
)

TL = FIXTURES["helix_timelike"].spec
NRM = FIXTURES["helix_spacelike_timelike_normal"].spec
BIN = FIXTURES["helix_spacelike_timelike_binormal"].spec
# F timelike branch of the type-3 frame: exists for 0 < |s| < 1.25 on this helix
NRM_F = CurveSpec(Family.HELIX_SPACELIKE_TIMELIKE_NORMAL, {"a": 1.0, "b": 2.0}, (-1.2, 1.2))
HS = (1e-3, 5e-4, 2.5e-4, 1e-4, 5e-5, 2.5e-5, 1e-5)

e1, e2, e3 = np.eye(3)
STANDARD = dict(T=e1, N=e2, B=e3, signature=Signature(1, 1, -1))


def frenet_sample(kappa=1.0, tau=0.5, **legs):
    legs = {**STANDARD, **legs}
    return FrenetSample(0.0, legs["T"], legs["N"], legs["B"], kappa, tau, legs["signature"])


def displayed_type2(spec, s):
    fs = frenet(spec, s)
    beta = evaluate(spec, s)
    ep1, _, ep3 = fs.signature
    bT, bB = inner(beta, fs.T), inner(beta, fs.B)
    den = np.sqrt(abs(ep1 * bT**2 + ep3 * bB**2))
    H = (ep1 * bT * fs.T - ep3 * bB * fs.B) / den
    return H, fs.N, ep3 * cross_l(H, fs.N)


def displayed_type3(spec, s):
    fs = frenet(spec, s)
    beta = evaluate(spec, s)
    ep1, ep2, _ = fs.signature
    bT, bN = inner(beta, fs.T), inner(beta, fs.N)
    den = np.sqrt(abs(ep1 * bT**2 + ep2 * bN**2))
    F = (ep1 * bT * fs.T - ep2 * bN * fs.N) / den
    return ep1 * cross_l(F, fs.B), F, fs.B


def test_position_components_vanish_at_origin():
    circle = CurveSpec(Family.CUSTOM, {"poly": [[-1], [0], [0]], "omega": 1.0,
                                       "cos": [[1], [], []], "sin": [[], [1], []]}, (0.0, 1.0))
    fs = frenet(circle, 0.0)
    pc = position_components(circle, 0.0, fs)
    assert np.allclose([pc.bT, pc.bN, pc.bB], 0.0, atol=1e-15)


def test_position_components_shift_under_translation():
    v = np.array([0.3, -1.0, 2.0])
    fs = frenet(BIN, 2.0)
    base = position_components(BIN, 2.0, fs)
    moved = position_components(BIN.translated(v), 2.0, frenet(BIN.translated(v), 2.0))
    assert moved.bT - base.bT == pytest.approx(inner(v, fs.T), abs=1e-12)
    assert moved.bN - base.bN == pytest.approx(inner(v, fs.N), abs=1e-12)
    assert moved.bB - base.bB == pytest.approx(inner(v, fs.B), abs=1e-12)


def test_position_components_match_symbolic_projection():
    s, a, b = sp.symbols("s a b", real=True)
    c = sp.sqrt(b**2 - a**2)
    beta = sp.Matrix([a * sp.cos(s / c), a * sp.sin(s / c), b * s / c])
    d1, d2 = beta.diff(s), beta.diff(s, 2)

    def ip(x, y):
        return x[0] * y[0] + x[1] * y[1] - x[2] * y[2]

    vals = {a: 1.0, b: 2.0, s: 1.0}
    eps1, eps2 = -1, 1
    kappa = sp.sqrt(sp.Abs(ip(d2, d2)))
    N = eps2 * d2 / kappa
    cross = sp.Matrix([d1[1] * N[2] - d1[2] * N[1], d1[2] * N[0] - d1[0] * N[2], -(d1[0] * N[1] - d1[1] * N[0])])
    B = (-eps1 * eps2) * cross
    expected = [float(ip(beta, v).subs(vals)) for v in (d1, N, B)]
    spec = CurveSpec(Family.HELIX_TIMELIKE, {"a": 1.0, "b": 2.0}, (0.0, 2.0))
    pc = position_components(spec, 1.0, frenet(spec, 1.0))
    assert [pc.bT, pc.bN, pc.bB] == pytest.approx(expected, abs=1e-13)


def test_position_reconstruction(fixture):
    grid = np.linspace(0, 10, 101)
    fr = frenet_trace(fixture.spec, grid)
    pc = position_components(fixture.spec, grid, fr)
    ep1, ep2, ep3 = fr.signature
    z = ep1 * pc.bT[:, None] * fr.T + ep2 * pc.bN[:, None] * fr.N + ep3 * pc.bB[:, None] * fr.B
    beta = evaluate(fixture.spec, grid)
    assert np.max(np.abs(z - beta)) <= 1e-10 * max(1.0, np.max(np.abs(beta)))


def test_angular_momentum_examples():
    sig = Signature(1, -1, 1)  # eps2 eps3 = -1
    fs = frenet_sample(T=e1, N=e3, B=-e2, signature=sig)
    assert np.allclose(angular_momentum(PositionComponents(0.0, 0.7, 0.0, 0.0), fs), 0.0)
    assert np.allclose(angular_momentum(PositionComponents(0.0, 0.0, 0.0, 1.0), fs), -fs.N)


def test_angular_momentum_matches_direct_cross(fixture):
    for s in (0.5, 3.0, 7.5):
        fs = frenet(fixture.spec, s)
        pc = position_components(fixture.spec, s, fs)
        m, speed = 2.5, 0.4
        direct = cross_l(evaluate(fixture.spec, s), m * speed * fs.T)
        assert np.allclose(angular_momentum(pc, fs, m, speed), direct, atol=1e-12 * max(1, np.abs(direct).max()))
    with pytest.raises(ValueError):
        angular_momentum(pc, fs, m=0.0)


def test_type2_zero_angle_when_binormal_projection_vanishes():
    fs = frenet_sample()
    pc = PositionComponents(0.0, 2.0, 1.0, 0.0)
    sample = type2_frame(pc, fs, check_momentum=False)
    assert sample.case is Paf2Case.HYPERBOLIC_D_TIMELIKE
    assert np.allclose(sample.H, e1)
    assert np.allclose(sample.D, e3)
    assert sample.phi == 0.0
    with pytest.raises(ZeroAngularMomentumComponent):
        type2_frame(pc, fs)


def test_type3_quarter_turn_when_normal_projection_vanishes():
    fs = frenet_sample()
    pc = PositionComponents(0.0, 2.0, 0.0, 1.0)
    sample = type3_frame(pc, fs, check_momentum=False)
    assert sample.case is Paf3Case.TRIG_B_TIMELIKE
    # F = sin(phi) T + cos(phi) N equals T, so the angle is a quarter turn and P = -N
    assert np.allclose(sample.F, e1)
    assert sample.phi == pytest.approx(np.pi / 2)
    assert np.allclose(sample.P, -e2)
    with pytest.raises(ZeroAngularMomentumComponent):
        type3_frame(pc, fs)


def test_degenerate_denominator():
    fs = frenet_sample()
    with pytest.raises(DegenerateDenominator):
        type2_frame(PositionComponents(0.0, 1.0, 1.0, 1.0), fs)
    with pytest.raises(DegenerateDenominator):
        type2_frame(PositionComponents(0.0, 0.0, 1.0, 0.0), fs)


@pytest.mark.parametrize("spec", [BIN, CurveSpec(Family.HELIX_SPACELIKE_TIMELIKE_BINORMAL, {"a": 1.0, "b": 2.0},
                                                  (0.0, 2.0))])
def test_type2_matches_displayed_formulas(spec):
    sample = paf_trace(spec, [1.0], "paf2")[0]
    H, N, D = displayed_type2(spec, 1.0)
    assert np.allclose(sample.H, H, atol=1e-14)
    assert np.allclose(sample.N, N, atol=1e-14)
    assert np.allclose(sample.D, D, atol=1e-14)
    fs = frenet(spec, 1.0)
    single = type2_frame(position_components(spec, 1.0, fs), fs)
    assert np.allclose(single.legs, sample.legs, atol=1e-15)


@pytest.mark.parametrize("spec, s", [(TL, 1.0), (BIN, 1.0), (NRM_F, 0.6)])
def test_type3_matches_displayed_formulas(spec, s):
    sample = paf_trace(spec, [s], "paf3")[0]
    P, F, B = displayed_type3(spec, s)
    assert np.allclose(sample.P, P, atol=1e-13)
    assert np.allclose(sample.F, F, atol=1e-13)
    assert np.allclose(sample.B, B, atol=1e-13)


def test_case_selection_per_signature():
    assert paf_trace(NRM, [1.0], "paf2").case is Paf2Case.TRIG_N_TIMELIKE
    assert paf_trace(BIN, [1.0], "paf2").case is Paf2Case.HYPERBOLIC_D_TIMELIKE
    assert paf_trace(BIN, [1.0], "paf3").case is Paf3Case.TRIG_B_TIMELIKE
    assert paf_trace(NRM_F, [0.5], "paf3").case is Paf3Case.HYPERBOLIC_F_TIMELIKE
    assert paf_trace(TL, [1.0], "paf3").case is Paf3Case.HYPERBOLIC_P_TIMELIKE


def test_type2_rejected_on_timelike_curve():
    with pytest.raises(BadSignature):
        paf_trace(TL, [1.0], "paf2")


def test_type3_rejected_where_signature_would_change():
    # on the timelike-normal helix F is spacelike past |s| = 1.25
    wide = CurveSpec(Family.HELIX_SPACELIKE_TIMELIKE_NORMAL, {"a": 1.0, "b": 2.0}, (-3.0, 3.0))
    assert paf_trace(wide, [1.2], "paf3").case is Paf3Case.HYPERBOLIC_F_TIMELIKE
    with pytest.raises(BadSignature):
        paf_trace(wide, [1.2, 1.3], "paf3")
    with pytest.raises(BadSignature):
        paf_trace(NRM.translated([0, 0.4, 0.4]), [1.0], "paf3")


@given(st.sampled_from(["paf2", "paf3"]), st.floats(0.0, 10.0))
def test_frame_relations_at_random_points(kind, s):
    spec = BIN
    sample = paf_trace(spec, [s], kind)[0]
    e = sample.legs
    sig = sample.signature
    assert sig == Signature(1, 1, -1)
    for i in range(3):
        assert inner(e[i], e[i]) == pytest.approx(sig[i], abs=1e-9)
        for j in range(i):
            assert abs(inner(e[i], e[j])) < 1e-9


@pytest.mark.parametrize("spec, kind", [(NRM, "paf2"), (BIN, "paf2"), (BIN, "paf3"), (TL, "paf3")])
def test_trace_invariants(spec, kind):
    grid = np.linspace(0, 10, 1001)
    trace = paf_trace(spec, grid, kind)
    fr = frenet_trace(spec, grid)
    assert validate_frame(trace.leg(0), trace.leg(1), trace.leg(2), tol=1e-9) == fr.signature
    assert completion_residual(trace) < 1e-10
    assert np.max(np.abs(rotated_legs(trace, fr) - trace.legs)) < 1e-10
    kept = 1 if kind == "paf2" else 2
    assert np.array_equal(trace.leg(kept), fr.legs[:, kept])


def test_timelike_leg_moves_with_the_rotation():
    assert paf_trace(NRM, [1.0], "paf2").signature.timelike_index == 1
    assert paf_trace(BIN, [1.0], "paf2").signature.timelike_index == 2
    assert paf_trace(NRM_F, [0.5], "paf3").signature.timelike_index == 1
    assert paf_trace(TL, [1.0], "paf3").signature.timelike_index == 0


def test_type2_apparatus_examples():
    trig = SimpleNamespace(phi=np.pi / 2, case=Paf2Case.TRIG_N_TIMELIKE, signature=Signature(1, -1, 1))
    assert np.allclose(type2_apparatus(trig, 1.0, 0.0, 0.0), (0.0, 0.0, -1.0), atol=1e-15)
    for case in Paf2Case:
        zero = SimpleNamespace(phi=0.0, case=case, signature=None)
        assert type2_apparatus(zero, 0.7, 1.3, 0.0) == (0.7, -0.0, 1.3)


def test_type3_apparatus_examples():
    for case, sig in ((Paf3Case.TRIG_B_TIMELIKE, Signature(1, 1, -1)),
                      (Paf3Case.HYPERBOLIC_F_TIMELIKE, Signature(1, -1, 1)),
                      (Paf3Case.HYPERBOLIC_P_TIMELIKE, Signature(-1, 1, 1))):
        zero = SimpleNamespace(phi=0.0, case=case, signature=sig)
        assert np.allclose(type3_apparatus(zero, 0.7, 1.3, 0.0), (0.7, 0.0, 1.3))
        planar = SimpleNamespace(phi=0.4, case=case, signature=sig)
        n1, n2, n3 = type3_apparatus(planar, 0.7, 0.0, 0.2)
        assert (abs(n2), abs(n3)) == (0.0, 0.0)
        expected = 0.5 if case is Paf3Case.TRIG_B_TIMELIKE else 0.7 + sig.eps2 * 0.2
        assert n1 == pytest.approx(expected)


@pytest.mark.parametrize("name, kind", [
    ("helix_timelike", "frenet"), ("helix_timelike", "paf3"),
    ("helix_spacelike_timelike_normal", "frenet"), ("helix_spacelike_timelike_normal", "paf2"),
    ("helix_spacelike_timelike_binormal", "frenet"), ("helix_spacelike_timelike_binormal", "paf2"),
    ("helix_spacelike_timelike_binormal", "paf3"),
])
def test_derivative_matrix_converges_at_second_order(name, kind):
    spec = convergence_specimen(FIXTURES[name])
    report = verify_derivative_matrix(FrameField(spec, kind), convergence_points(spec), HS)
    assert report.order >= 1.9
    assert report.apparatus_order >= 1.9


def test_derivative_matrix_on_timelike_f_branch():
    report = verify_derivative_matrix(FrameField(NRM_F, "paf3"), np.linspace(0.2, 1.0, 5), HS[:5])
    assert report.order >= 1.9
    assert report.apparatus_order >= 1.9


def test_corrupted_apparatus_is_detected():
    spec = convergence_specimen(FIXTURES["helix_spacelike_timelike_binormal"])
    field = FrameField(spec, "paf2")
    pts = convergence_points(spec, 3)
    good = verify_derivative_matrix(field, pts, HS[:3])
    app = field(pts).apparatus.copy()
    app[:, 2] *= 1.1
    bad = verify_derivative_matrix(field, pts, HS[:3], apparatus=app)
    assert bad.max_residual > 1e3 * good.max_residual


def test_trace_derivative_residual_is_second_order():
    res = [trace_derivative_residual(paf_trace(TL, np.linspace(0, 10, n), "paf3")) for n in (501, 1001)]
    assert 3.5 < res[0] / res[1] < 4.5


def test_analytic_phi_prime_matches_centered_difference():
    for spec, lo, hi in ((TL, 0.0, 10.0), (BIN, 0.0, 10.0), (NRM_F, 0.2, 1.0)):
        trace = paf_trace(spec, np.linspace(lo, hi, 801), "paf3")
        assert np.max(np.abs(phi_prime_centered(trace) - trace.phi_prime)) < 1e-3


def test_translation_changes_the_angle():
    grid = np.linspace(0, 10, 101)
    base = paf_trace(BIN, grid, "paf3")
    moved = paf_trace(BIN.translated([0.2, -0.1, 0.05]), grid, "paf3")
    assert np.max(np.abs(moved.phi - base.phi)) > 1e-3
    assert np.allclose(frenet_trace(BIN, grid).legs, frenet_trace(BIN.translated([0.2, -0.1, 0.05]), grid).legs)


def test_non_strict_trace_reports_gaps():
    grid = np.linspace(0, 1, 101)
    trace = paf_trace(NRM, grid, "paf3", strict=False)
    assert trace.gaps
    assert len(trace) + sum(1 for s in grid if any(a <= s <= b for a, b, _ in trace.gaps)) == len(grid)
    with pytest.raises((DegenerateDenominator, BadSignature)):
        paf_trace(NRM, grid, "paf3")


def test_sample_access_and_iteration():
    trace = paf_trace(TL, np.linspace(0, 1, 5), "paf3")
    samples = list(trace)
    assert len(samples) == 5
    assert np.array_equal(samples[2].legs, trace.legs[2])
    assert np.array_equal(samples[2].apparatus, trace.apparatus[2])

import math

import numpy as np
import pytest

from wulffcount import (
    CONSTANTS,
    ETA_SKYSCRAPER,
    ETA_YOUNG,
    CubeProblem,
    build_inner_shape,
    build_wulff_shape,
    dual_tension,
    duality_residual,
    enclosed_volume,
    eta_young,
    functional_value,
    hausdorff_distance,
    projection_area,
    scaled_maximizer,
    solve_dilatation,
    wulff_minimizer,
)
from wulffcount.entropy import constant_tension, l1_tension, zero_tension
from wulffcount.shapes import vershik_polyline
from wulffcount.wulff import (
    _dilated_volume,
    _polyline_shape,
    _tail_estimate,
    cube_faces_shape,
    perturbed_staircase,
    unit_volume_functional,
)

PI2_6 = math.pi ** 2 / 6
SKY_SAMPLES = 128 * 128
# mpmath, 30 digits
DUAL_Y_N1 = 0.433955418904547857
DUAL_S_N1 = 1.172484172789423743
SKY_EXPONENT = 2.009445660877013753


@pytest.fixture(scope="module")
def quarter_circle():
    return build_wulff_shape(constant_tension(1.0, 1), 4096)


@pytest.fixture(scope="module")
def sphere_octant():
    return build_wulff_shape(constant_tension(1.0, 2), SKY_SAMPLES)


def vershik_residual(V):
    return np.abs(np.exp(-V[:, 0]) + np.exp(-V[:, 1]) - 1.0)


# ---------------------------------------------------------------- inner shapes

def test_inner_young_on_curve(young_shape_w10):
    G = young_shape_w10
    assert G.kind == "inner" and G.window == 10.0
    assert np.max(vershik_residual(G.vertices)) <= 1e-6
    G.check()


def test_inner_zero_tension_is_octant_boundary():
    G = build_inner_shape(zero_tension(1), 64, window=7.0)
    V = G.vertices
    assert np.all((np.abs(V[:, 0]) <= 1e-12) | (np.abs(V[:, 1]) <= 1e-12))
    assert np.isclose(V[:, 0].max(), 7.0) and np.isclose(V[:, 1].max(), 7.0)
    assert G.facet_areas.sum() == pytest.approx(14.0, abs=1e-12)
    assert enclosed_volume(G) == pytest.approx(0.0, abs=1e-12)


def test_inner_rejects_negative_eta():
    from wulffcount import TensionFunction

    neg = TensionFunction(1, lambda n: n[..., 0] - n[..., 1])
    with pytest.raises(ValueError):
        build_inner_shape(neg, 64)
    with pytest.raises(ValueError):
        build_inner_shape(ETA_YOUNG, 8)


@pytest.mark.parametrize("which", ["young", "sky"])
def test_support_property(which, young_shape, sky_shape):
    eta, G = (ETA_YOUNG, young_shape) if which == "young" else (ETA_SKYSCRAPER, sky_shape)
    X = G.vertices[G.faces]
    lhs = np.einsum("fkd,fd->fk", X, G.facet_normals)
    res = np.abs(lhs - eta(G.facet_normals)[:, None]) / (1.0 + np.linalg.norm(X, axis=2))
    assert res.max() <= 1e-9


def test_shape_invariants(young_shape, sky_shape):
    for G in (young_shape, sky_shape):
        G.check()
        assert np.all(G.facet_normals >= -1e-12)
        assert np.all(G.vertices >= -1e-12) and np.all(G.vertices <= G.window + 1e-9)


def test_sky_convexity(sky_shape):
    G = sky_shape
    rng = np.random.default_rng(1)
    pick = rng.choice(G.n_facets, 400, replace=False)
    n = G.facet_normals[pick]
    h = ETA_SKYSCRAPER(n)
    # every vertex is on the body side of every sampled support plane
    assert np.min(G.vertices @ n.T - h[None, :]) >= -1e-9 * G.window


def test_gradient_consistency():
    G = build_inner_shape(ETA_YOUNG, 4096, window=10.0)
    ref = vershik_polyline(40001)
    assert hausdorff_distance(G, ref, 5.0) <= 5e-3


def _max_window_error(samples):
    G = build_inner_shape(ETA_YOUNG, samples, window=10.0)
    V = G.vertices[np.all(G.vertices <= 5.0, axis=1)]
    return float(np.max(vershik_residual(V)))


@pytest.mark.xfail(strict=True, reason="max-norm ratio approaches 4 from below; see decisions ledger")
def test_halving_step_quarters_error():
    # samples s -> 2(s - 1) + 1 halves the angular step exactly
    errs = [_max_window_error(s) for s in (1025, 2049, 4097)]
    assert errs[0] >= 4 * errs[1] and errs[1] >= 4 * errs[2]


def test_envelope_second_order():
    errs = np.array([_max_window_error(s) for s in (257, 513, 1025, 2049, 4097)])
    ratios = errs[:-1] / errs[1:]
    assert np.all(ratios > 3.5) and np.all(ratios < 4.5)
    order = np.log2(errs[0] / errs[-1]) / 4
    assert 1.9 <= order <= 2.1


# ---------------------------------------------------------------- Wulff shapes

def test_wulff_quarter_circle(quarter_circle):
    W = quarter_circle
    assert W.kind == "wulff"
    r = np.linalg.norm(W.vertices, axis=1)
    assert np.max(np.abs(r - 1.0)) <= 1e-6
    assert functional_value(constant_tension(1.0, 1), W) == pytest.approx(math.pi / 2, abs=1e-4)
    assert functional_value(constant_tension(1.0, 1), W.scaled(3.0)) == pytest.approx(1.5 * math.pi, abs=1e-4)


def test_wulff_square():
    W = build_wulff_shape(l1_tension(1), 256)
    V = W.vertices
    on_sides = (np.abs(V[:, 0] - 1) <= 1e-12) | (np.abs(V[:, 1] - 1) <= 1e-12)
    assert np.all(on_sides)
    assert W.facet_areas.sum() == pytest.approx(2.0, abs=1e-12)
    assert enclosed_volume(W) == pytest.approx(1.0, abs=1e-12)


def test_wulff_sphere(sphere_octant):
    r = np.linalg.norm(sphere_octant.vertices, axis=1)
    assert np.max(np.abs(r - 1.0)) <= 1e-4
    assert enclosed_volume(sphere_octant) == pytest.approx(math.pi / 6, abs=1e-4)


def test_wulff_rejects_vanishing_tau():
    with pytest.raises(ValueError):
        build_wulff_shape(ETA_YOUNG, 64)


# ---------------------------------------------------------------- functionals and volumes

def test_unit_area_young(young_shape):
    assert abs(unit_volume_functional(ETA_YOUNG, young_shape) - CONSTANTS.young_exponent) <= 2e-3


def test_unit_volume_sky(sky_shape):
    val = unit_volume_functional(ETA_SKYSCRAPER, sky_shape)
    assert abs(val - SKY_EXPONENT) <= 5e-3


def test_enclosed_volume_examples(young_shape, sky_shape, quarter_circle):
    assert abs(enclosed_volume(young_shape) - PI2_6) <= 1e-4
    assert abs(enclosed_volume(sky_shape) - CONSTANTS.zeta3 / 4) <= 1e-3
    assert abs(enclosed_volume(quarter_circle) - math.pi / 4) <= 1e-6
    assert enclosed_volume(quarter_circle, side="infinity") == enclosed_volume(quarter_circle)


def test_enclosed_volume_errors(young_shape, quarter_circle):
    with pytest.raises(ValueError):
        enclosed_volume(young_shape, side="infinity")
    with pytest.raises(ValueError):
        enclosed_volume(quarter_circle, side="middle")
    P = np.array([[0.5, 3.0], [1.0, 1.0], [3.0, 0.5]])
    open_shape = _polyline_shape(P, np.array([[1.0, 0.5], [0.5, 1.0]]), 10.0, "inner")
    with pytest.raises(ValueError):
        enclosed_volume(open_shape)


def test_tail_estimate_young():
    # the exact volume beyond the window along each axis is
    # int_W^inf -ln(1 - e^-x) dx = Li_2(e^-W)
    from scipy.special import spence

    for W in (10.0, 15.0, 30.0):
        G = build_inner_shape(ETA_YOUNG, 4096, window=W)
        exact = 2 * spence(1 - math.exp(-W))
        assert abs(_tail_estimate(G) - exact) <= 1e-6
        assert abs(enclosed_volume(G) - PI2_6) <= 1e-6


def test_tail_small_at_default_window(young_shape, sky_shape):
    assert 0 <= _tail_estimate(young_shape) <= 1e-6
    assert 0 <= _tail_estimate(sky_shape) <= 1e-6


@pytest.mark.parametrize("which", ["young", "sky"])
def test_inner_volume_identity(which, young_shape, sky_shape):
    eta, G = (ETA_YOUNG, young_shape) if which == "young" else (ETA_SKYSCRAPER, sky_shape)
    d1 = G.dim + 1
    assert abs(enclosed_volume(G) - functional_value(eta, G) / d1) <= 2e-3


def test_wulff_volume_identity(quarter_circle):
    tau = constant_tension(1.0, 1)
    assert abs(enclosed_volume(quarter_circle) - functional_value(tau, quarter_circle) / 2) <= 2e-3
    tau = dual_tension(ETA_YOUNG, 5)
    W = build_wulff_shape(tau, 4096)
    assert abs(enclosed_volume(W) - functional_value(tau, W) / 2) <= 2e-3


# ---------------------------------------------------------------- duality

def test_dual_tension_examples():
    s = 1 / math.sqrt(2)
    tau = dual_tension(ETA_YOUNG, 1)
    assert abs(tau(np.array([s, s])) - DUAL_Y_N1) <= 1e-15
    assert abs(tau(np.array([s, s])) - math.sqrt(2) * (1 - math.log(2))) <= 1e-15
    assert dual_tension(ETA_YOUNG, 7.5)(np.array([1.0, 0.0])) == 7.5
    t = 1 / math.sqrt(3)
    assert abs(dual_tension(ETA_SKYSCRAPER, 1)(np.array([t, t, t])) - DUAL_S_N1) <= 1e-14
    # reflection symmetric
    assert tau(np.array([-s, s])) == tau(np.array([s, -s])) == tau(np.array([s, s]))


def test_dual_tension_too_small():
    with pytest.raises(ValueError):
        dual_tension(ETA_YOUNG, 0.3)


def test_projection_area_examples(quarter_circle):
    assert projection_area(cube_faces_shape(3.0, 1), 3.0) == pytest.approx(3 * math.sqrt(2), abs=1e-14)
    assert projection_area(cube_faces_shape(1.0, 2), 1.0) == pytest.approx(math.sqrt(3), abs=1e-14)
    assert projection_area(quarter_circle, 1.0) == pytest.approx(math.sqrt(2), abs=1e-6)
    with pytest.raises(ValueError):
        projection_area(quarter_circle.scaled(2.0), 1.0)


def test_duality_examples(sphere_octant):
    p = CubeProblem(20, PI2_6, ETA_YOUNG)
    assert duality_residual(ETA_YOUNG, 20, scaled_maximizer(p)) <= 1e-10
    facet = _polyline_shape(np.array([[0.0, 10.0], [10.0, 0.0]]), np.array([[1.0, 1.0]]), 20.0, "cube")
    assert duality_residual(ETA_YOUNG, 20, facet) <= 1e-12
    assert duality_residual(ETA_SKYSCRAPER, 10, sphere_octant) <= 1e-9


# ---------------------------------------------------------------- dilatation

def test_dilatation_fixed_points(young_shape):
    for lam in (1.0, 2.0):
        V = _dilated_volume(young_shape, lam, 20.0)
        got = solve_dilatation(CubeProblem(20, V, ETA_YOUNG), shape=young_shape)
        assert abs(got - lam) <= 1e-8


def test_dilatation_volume_relation(young_shape):
    p = CubeProblem(20, 3.0, ETA_YOUNG)
    lam = solve_dilatation(p, shape=young_shape)
    assert abs(_dilated_volume(young_shape, lam, 20.0) - 3.0) <= 1e-8 * 3.0


def test_dilatation_small_volume():
    assert solve_dilatation(CubeProblem(10, 1e-9, ETA_YOUNG)) < 1e-3


def test_dilatation_degenerate():
    with pytest.raises(ValueError):
        solve_dilatation(CubeProblem(10, 1.0, zero_tension(1)))


def test_cube_problem_validation():
    with pytest.raises(ValueError):
        CubeProblem(2, 4.0, ETA_YOUNG)
    with pytest.raises(ValueError):
        CubeProblem(2, 0.0, ETA_YOUNG)
    with pytest.raises(ValueError):
        CubeProblem(-1, 0.5, ETA_YOUNG)


# ---------------------------------------------------------------- maximizer

def test_maximizer_lambda_one(young_shape):
    p = CubeProblem(20, PI2_6, ETA_YOUNG)
    S = scaled_maximizer(p)
    assert S.kind == "cube"
    assert abs(enclosed_volume(S) - p.V) <= 1e-6 * 400
    # lambda = 1 up to the volume of the tails beyond the cube
    assert hausdorff_distance(S, young_shape, 20.0) <= 1e-6


def test_maximizer_lambda_two(young_shape):
    p = CubeProblem(20, 4 * PI2_6, ETA_YOUNG)
    S = scaled_maximizer(p)
    assert abs(enclosed_volume(S) - p.V) <= 1e-6 * 400
    # the cube cuts tails of volume ~2 e^-10, so lambda sits slightly above 2
    lam = solve_dilatation(p, shape=young_shape)
    assert 2.0 < lam < 2.0 + 1e-4
    assert hausdorff_distance(S, young_shape.scaled(2.0), 20.0) <= 2e-4


def test_maximizer_sky():
    p = CubeProblem(10, 2.4, ETA_SKYSCRAPER)
    S = scaled_maximizer(p, SKY_SAMPLES)
    assert abs(enclosed_volume(S) - 2.4) <= 1e-6 * 1000
    assert duality_residual(ETA_SKYSCRAPER, 10, S) <= 1e-9


def test_maximizer_zero_tension():
    for dim in (1, 2):
        S = scaled_maximizer(CubeProblem(5, 3.0, zero_tension(dim)), 256)
        assert functional_value(zero_tension(dim), S) == 0.0
        assert np.all(np.any(np.abs(S.vertices) <= 1e-12, axis=1))


def test_maximizer_cube_too_small():
    with pytest.raises(ValueError, match="cube too small"):
        scaled_maximizer(CubeProblem(3, 8.0, ETA_YOUNG))


def test_maximality_certificate():
    p = CubeProblem(20, 4 * PI2_6, ETA_YOUNG)
    best = functional_value(ETA_YOUNG, scaled_maximizer(p))
    rng = np.random.default_rng(2024)
    for _ in range(20):
        G = perturbed_staircase(rng, 20, p.V)
        # admissible but not convex: normals in the octant, areas consistent
        assert np.all(G.facet_normals >= 0)
        assert np.allclose(G.recomputed_areas(), G.facet_areas, rtol=1e-12, atol=0)
        assert abs(enclosed_volume(G) - p.V) <= 1e-9 * p.V
        assert duality_residual(ETA_YOUNG, 20, G) <= 1e-9
        assert functional_value(ETA_YOUNG, G) <= best + 1e-6
        assert projection_area(G, 20) <= projection_area(cube_faces_shape(20, 1), 20) + 1e-9


# ---------------------------------------------------------------- Wulff minimizer scaling

@pytest.mark.parametrize(
    "tau, Lambda, check",
    [
        (constant_tension(1.0, 1), math.pi / 4, lambda V: np.linalg.norm(V, axis=1) - 1.0),
        (constant_tension(1.0, 1), math.pi, lambda V: np.linalg.norm(V, axis=1) - 2.0),
        (l1_tension(1), 4.0, lambda V: np.minimum(np.abs(V[:, 0] - 2), np.abs(V[:, 1] - 2))),
    ],
)
def test_wulff_minimizer_examples(tau, Lambda, check):
    W = wulff_minimizer(tau, Lambda)
    assert abs(enclosed_volume(W) / Lambda - 1) <= 1e-6
    assert np.max(np.abs(check(W.vertices))) <= 1e-6


@pytest.mark.parametrize("Lambda", [0.1, 1.0, 10.0])
def test_wulff_minimizer_scaling(Lambda):
    for dim, samples in ((1, 4096), (2, 4096)):
        W = wulff_minimizer(constant_tension(1.0, dim), Lambda, samples)
        assert abs(enclosed_volume(W) / Lambda - 1) <= 1e-6


def test_wulff_minimizer_errors():
    with pytest.raises(ValueError):
        wulff_minimizer(constant_tension(1.0, 1), 0.0)


def test_functional_uses_octant_normals():
    W = build_wulff_shape(constant_tension(1.0, 1), 64)
    assert functional_value(ETA_YOUNG, W) == pytest.approx(float(np.dot(eta_young(W.facet_normals), W.facet_areas)))

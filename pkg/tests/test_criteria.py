"""Tests for the height criteria: splitting tests, chain engines, fixed
points, certificates and the orchestrator."""

import math

import pytest

from qfsplit import (
    Budget,
    Grading,
    Ideal,
    PolynomialRing,
    PrimeField,
    RingError,
    delta1,
    enclosure_closure,
    fedder_fsplit,
    height,
    height_graded_cy,
    height_local,
    non_qfs_quick,
    product_witness,
    qfs_decide,
    result_to_json,
    verify_certificate,
    verify_infinity_certificate,
    verify_witness_chain,
)
from qfsplit.criteria import (
    CHAIN_WITNESS,
    COEFFICIENT_WITNESS,
    FINITE,
    INFINITE,
    LOWER_BOUND,
    NON_QFS,
    UNKNOWN,
    graded_cy_applicable,
    graded_cy_coefficient,
    local_chain_ideals,
)
from qfsplit.groebner import ideal_equal, ideal_membership
from qfsplit.frobenius import in_max_ideal_frobenius_power, theta, u_map

from conftest import ring_over


def ring_named(p, names):
    return PolynomialRing(PrimeField(p), names)


# ---------------------------------------------------------------------------
# F-splitting
# ---------------------------------------------------------------------------


def test_fedder_fsplit_knowns():
    r5 = ring_named(5, ["x1", "x2", "x3", "x4"])
    assert fedder_fsplit(r5.parse("x1^4 + x2^4 + x3^4 + x4^4"))
    r2 = ring_over(2)
    assert not fedder_fsplit(r2.parse("x^3 + y^3 + z^3"))
    r7 = ring_over(7)
    assert not fedder_fsplit(r7.parse("x^3 + y^2*z"))
    assert fedder_fsplit(ring_over(3).variable("x"))


@pytest.mark.parametrize(
    "p,text",
    [
        (2, "x^3 + y^3 + z^3"),
        (2, "x^3 + x*y*z + y^2*z + z^3"),
        (3, "x^3 + y^2*z"),
        (5, "x^3 + y^2*z"),
        (7, "x^2*y + y^2*z + z^2*x"),
    ],
)
def test_fedder_equals_height_one(p, text):
    """fedder_fsplit(f) iff the orchestrator verdict is Finite(1)."""
    ring = ring_over(p)
    f = ring.parse(text)
    res = height(f, n_max=4)
    assert fedder_fsplit(f) == (res.verdict == FINITE and res.n == 1)


# ---------------------------------------------------------------------------
# graded engine
# ---------------------------------------------------------------------------


def test_graded_cy_fermat_quartic_p5():
    ring = ring_named(5, ["x1", "x2", "x3", "x4"])
    f = ring.parse("x1^4 + x2^4 + x3^4 + x4^4")
    res = height_graded_cy([f], Grading.standard(4))
    assert (res.verdict, res.n) == (FINITE, 1)


def test_graded_cy_supersingular_cubic():
    ring = ring_over(2)
    f = ring.parse("x^3 + y^3 + z^3")
    res = height_graded_cy([f], Grading.standard(3))
    assert (res.verdict, res.n) == (FINITE, 2)
    assert res.certificate.kind == COEFFICIENT_WITNESS


def test_graded_cy_rejects_wrong_degree_sum():
    ring = ring_over(2)
    # quadric in three variables: degree 2 != 3
    reason = graded_cy_applicable([ring.parse("x^2 + y*z")], Grading.standard(3))
    assert reason is not None and "degree sum" in reason


def test_graded_cy_rejects_bigraded_conic_bundle():
    """The bidegree of the conic-bundle equation is (1,2), not the variable
    total (3,3) — the coefficient route must turn it down."""
    ring = ring_named(2, ["x0", "x1", "x2", "y0", "y1", "y2"])
    f = ring.parse("x0*y0^2 + x1*y1^2 + x2*y2^2")
    g = Grading([[1, 1, 1, 0, 0, 0], [0, 0, 0, 1, 1, 1]])
    assert graded_cy_applicable([f], g) is not None
    with pytest.raises(RingError):
        height_graded_cy([f], g)


def test_graded_cy_weighted_double_cover():
    """Weighted gradings qualify when deg_W(f) equals the weight sum."""
    ring = ring_named(2, ["x", "y", "z", "w"])
    weights = Grading([[1, 1, 1, 3]])
    f = ring.parse("w^2 + x^6 + y^6 + z^6 + x*y*z*w")
    assert graded_cy_applicable([f], weights) is None
    res = height_graded_cy([f], weights, n_max=3)
    assert res.verdict in (FINITE, INFINITE, LOWER_BOUND)


def test_coefficient_against_uncapped_expansion():
    """Level-2 coefficient for a cubic at p=2 equals the raw expansion of
    f·Δ₁(f) at (xyz)³."""
    ring = ring_over(2)
    for text in ("x^3 + y^3 + z^3", "x^3 + x*y*z + y^2*z + z^3", "x^2*y + y^2*z + z^2*x"):
        f = ring.parse(text)
        raw = (f * delta1(f)).coefficient_of((3, 3, 3))
        assert graded_cy_coefficient([f], 2) == raw


def test_coefficient_level_one_is_fedder():
    ring = ring_over(2)
    f = ring.parse("x^3 + x*y*z + y^2*z + z^3")
    assert (graded_cy_coefficient([f], 1) != 0) == fedder_fsplit(f)


# ---------------------------------------------------------------------------
# local chain engine
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "text,expected",
    [
        ("z^2 + x^2*y + x*y^2", 2),  # D4, n = 2
        ("z^2 + x^2*y + x*y^4", 3),  # D8, n = 4
        ("z^2 + x^3 + x*y^3", 4),  # E7
    ],
)
def test_height_local_rdp_values(text, expected):
    ring = ring_over(2)
    res = height_local(Ideal(ring, [ring.parse(text)]), 6)
    assert (res.verdict, res.n) == (FINITE, expected)


def test_height_local_chain_is_verifiable():
    """A Finite verdict carries a strict chain the verifier accepts."""
    ring = ring_over(2)
    I = Ideal(ring, [ring.parse("z^2 + x^2*y + x*y^4")])
    res = height_local(I, 6)
    chain = res.certificate.data["chain"]
    assert len(chain) == res.n
    assert verify_witness_chain(I, chain)
    assert verify_certificate(I, res.certificate)


def test_local_chain_ideals_increase():
    ring = ring_over(2)
    I = Ideal(ring, [ring.parse("z^2 + x^2*y + x*y^4")])
    chain = local_chain_ideals(I, 4)
    assert len(chain) >= 2
    for small, big in zip(chain, chain[1:]):
        for g in small.gens:
            assert ideal_membership(g, big)


def test_local_route_handles_complete_intersection():
    """Two-generator system: the supersingular x ordinary product block."""
    ring = ring_named(2, ["x0", "x1", "x2", "y0", "y1", "y2"])
    I = Ideal(
        ring,
        [ring.parse("x0^3 + x1^3 + x2^3"), ring.parse("y0^3 + y0*y1*y2 + y1^2*y2 + y2^3")],
    )
    res = height_local(I, 4)
    assert (res.verdict, res.n) == (FINITE, 2)


def test_route_agreement_on_cy_corpus():
    """Graded and local engines must give identical verdicts on graded CY
    inputs."""
    ring = ring_over(2)
    for text in ("x^3 + y^3 + z^3", "x^3 + x*y*z + y^2*z + z^3", "x^2*y + y^2*z + x*z^2"):
        f = ring.parse(text)
        a = height_graded_cy([f], Grading.standard(3), n_max=4)
        b = height_local(Ideal(ring, [f]), 4)
        assert (a.verdict, a.n) == (b.verdict, b.n)
    res = height(ring.parse("x^3 + y^3 + z^3"), n_max=4, cross_check=True)
    assert (res.verdict, res.n) == (FINITE, 2)


# ---------------------------------------------------------------------------
# I-infinity fixed point
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_qfs_decide_cusp_not_qfs(p):
    ring = ring_over(p)
    I = Ideal(ring, [ring.parse("x^3 + y^2*z")])
    verdict, cert = qfs_decide(I)
    assert verdict is False
    assert verify_certificate(I, cert)


def test_qfs_decide_hyperplane_trivially_qfs():
    ring = ring_over(3)
    verdict, cert = qfs_decide(Ideal(ring, [ring.variable("x")]))
    assert verdict is True
    assert cert.data["iterations"] >= 1


def test_qfs_decide_iteration_is_monotone():
    """Each stabilization step only ever adds elements."""
    ring = ring_over(2)
    I = Ideal(ring, [ring.parse("x^3 + y^2*z")])
    _, cert = qfs_decide(I)
    J = Ideal(ring, cert.data["generators"])
    # the seed (f^{p-1}) and all theta images of J sit inside the limit
    f = I.gens[0]
    assert ideal_membership(f, J)
    delta = delta1(f)
    for g in J.gens:
        img = theta(g, delta)
        assert ideal_membership(img, J)


def test_enclosure_closure_empty_seed_matches_qfs_decide():
    ring = ring_over(2)
    I = Ideal(ring, [ring.parse("x^3 + y^2*z")])
    _, cert = qfs_decide(I)
    closure = enclosure_closure(I)
    assert ideal_equal(closure, Ideal(ring, cert.data["generators"]))


def test_enclosure_closure_is_theta_closed():
    ring = ring_named(2, ["x", "y", "z", "w", "u", "s"])
    g = ring.parse("x*y*s^2 + z*w*u^2 + y^3*w + x^3*z")
    I = Ideal(ring, [g])
    seed = [ring.parse("y*s^2 + x^2*z"), ring.parse("z*u^2 + y^3")]
    closure = enclosure_closure(I, seed=seed)
    delta = delta1(g)
    for h in closure.gens:
        if u_map(h).is_zero():
            assert ideal_membership(theta(h, delta), closure)
    for s in seed:
        assert ideal_membership(s, closure)
    assert ideal_membership(g, closure)


# ---------------------------------------------------------------------------
# quick infinite-height tests
# ---------------------------------------------------------------------------


def test_non_qfs_quick_fermat_p3():
    ring = ring_named(3, ["x1", "x2", "x3", "x4"])
    cert = non_qfs_quick([ring.parse("x1^4 + x2^4 + x3^4 + x4^4")])
    assert cert is not None and cert.kind == NON_QFS
    assert cert.data["tag"] == "f^(p-2) in m^[p]"


def test_non_qfs_quick_cusp_p7():
    ring = ring_over(7)
    cert = non_qfs_quick([ring.parse("x^3 + y^2*z")])
    assert cert is not None
    assert "m^[p^2]" in cert.data["tag"]


def test_non_qfs_quick_negative_cases():
    assert non_qfs_quick([ring_over(3).variable("x")]) is None
    # at p = 2 the f^{p-2} test can never fire (f^0 = 1)
    ring = ring_over(2)
    assert non_qfs_quick([ring.parse("x^3 + x*y*z + y^3 + z^3")]) is None


# ---------------------------------------------------------------------------
# certificate verifiers
# ---------------------------------------------------------------------------


def d8_chain(ring):
    f = ring.parse("z^2 + x^2*y + x*y^4")
    return f, [ring.parse("z") * f, ring.parse("x*y^2*z"), ring.parse("x*y*z")]


def test_verify_witness_chain_accepts_d8():
    ring = ring_over(2)
    f, chain = d8_chain(ring)
    assert verify_witness_chain(Ideal(ring, [f]), chain)


def test_verify_witness_chain_pinpoints_bad_theta():
    ring = ring_over(2)
    f, chain = d8_chain(ring)
    chain[1] = chain[1] + ring.parse("x*y*z")
    reasons = []
    assert not verify_witness_chain(Ideal(ring, [f]), chain, reasons=reasons)
    assert reasons and "step 1" in reasons[0]


def test_verify_witness_chain_rejects_trapped_tail():
    ring = ring_over(2)
    f, chain = d8_chain(ring)
    assert not verify_witness_chain(Ideal(ring, [f]), chain[:-1])


def test_verify_witness_chain_rejects_start_outside_i1():
    ring = ring_over(2)
    f, _ = d8_chain(ring)
    reasons = []
    assert not verify_witness_chain(
        Ideal(ring, [f]), [ring.parse("x*y*z")], reasons=reasons
    )
    assert "I_1" in reasons[0]


def test_verify_witness_chain_rejects_empty():
    ring = ring_over(2)
    f, _ = d8_chain(ring)
    assert not verify_witness_chain(Ideal(ring, [f]), [])


def test_verify_infinity_raw_guess_fails_with_reason():
    """The two-generator trap is not θ-closed; the verifier must name the
    escaping image."""
    ring = ring_named(2, ["x", "y", "z", "w", "u", "s"])
    g = ring.parse("x*y*s^2 + z*w*u^2 + y^3*w + x^3*z")
    I = Ideal(ring, [g])
    J = Ideal(ring, [ring.parse("y*s^2 + x^2*z"), ring.parse("z*u^2 + y^3")])
    reasons = []
    assert not verify_infinity_certificate(I, J, reasons=reasons)
    assert reasons and "theta image" in reasons[0]


def test_verify_infinity_closed_guess_passes():
    ring = ring_named(2, ["x", "y", "z", "w", "u", "s"])
    g = ring.parse("x*y*s^2 + z*w*u^2 + y^3*w + x^3*z")
    I = Ideal(ring, [g])
    seed = [ring.parse("y*s^2 + x^2*z"), ring.parse("z*u^2 + y^3")]
    closure = enclosure_closure(I, seed=seed)
    assert verify_infinity_certificate(I, closure)
    assert in_max_ideal_frobenius_power(closure.gens[0], 1)


def test_verify_infinity_rejects_fsplit_bracket():
    """J = m^[p] can never trap an F-split hypersurface."""
    ring = ring_over(2)
    f = ring.parse("x^3 + x*y*z + y^2*z + z^3")
    bracket = Ideal(ring, [ring.parse("x^2"), ring.parse("y^2"), ring.parse("z^2")])
    reasons = []
    assert not verify_infinity_certificate(Ideal(ring, [f]), bracket, reasons=reasons)
    assert reasons


# ---------------------------------------------------------------------------
# fiber products
# ---------------------------------------------------------------------------


def product_fixture():
    rx = ring_named(2, ["x0", "x1", "x2"])
    ry = ring_named(2, ["y0", "y1", "y2"])
    ss = rx.parse("x0^3 + x1^3 + x2^3")
    ordinary = ry.parse("y0^3 + y0*y1*y2 + y1^2*y2 + y2^3")
    return rx, ry, ss, ordinary


def test_product_witness_exact_chain_verifies():
    rx, ry, ss, ordinary = product_fixture()
    chain = height_local(Ideal(rx, [ss]), 4).certificate.data["chain"]
    ws = product_witness(chain, ordinary, 2, fx=ss, fy=ordinary)
    joint = ws[0].ring
    joint_ideal = Ideal(
        joint,
        [joint.parse("x0^3 + x1^3 + x2^3"), joint.parse("y0^3 + y0*y1*y2 + y1^2*y2 + y2^3")],
    )
    assert verify_witness_chain(joint_ideal, ws)


def test_product_witness_kunneth_level_one():
    rx, ry, _, ordinary = product_fixture()
    g1 = rx.parse("x0^3 + x0*x1*x2 + x1^2*x2 + x2^3")
    ws = product_witness([g1], ordinary, 1, fx=g1, fy=ordinary)
    assert len(ws) == 1
    assert not in_max_ideal_frobenius_power(ws[0], 1)


def test_product_witness_raw_pairing_orientation():
    """Without the factor equations the tensor pairing puts the surviving
    u-iterate on the final chain element."""
    rx, ry, ss, ordinary = product_fixture()
    chain = height_local(Ideal(rx, [ss]), 4).certificate.data["chain"]
    raw = product_witness(chain, ordinary, 2)
    joint = raw[0].ring
    assert raw[1] == joint.parse("x0*x1*x2")  # g_2 * u(F_* h) with u(F_*h) = 1


def test_product_witness_precondition_errors():
    rx, ry, ss, ordinary = product_fixture()
    with pytest.raises(RingError):
        product_witness([ss], ordinary, 2)  # wrong chain length
    with pytest.raises(RingError):
        # middle element must be killed by u
        product_witness([rx.parse("x0*x1*x2"), ss], ordinary, 2)
    with pytest.raises(RingError):
        # supersingular second factor has no surviving iterate
        product_witness(
            height_local(Ideal(rx, [ss]), 4).certificate.data["chain"],
            ry.parse("y0^3 + y1^3 + y2^3"),
            2,
        )


# ---------------------------------------------------------------------------
# orchestrator
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "p,text,expected",
    [
        (2, "z^2 + x^3 + y^5", 4),
        (3, "z^2 + x^3 + y^4", 2),
        (5, "z^2 + x^3 + y^5 + x*y^4", 1),
    ],
)
def test_height_rdp_table_entries(p, text, expected):
    ring = ring_over(p)
    res = height(ring.parse(text), n_max=6)
    assert (res.verdict, res.n) == (FINITE, expected)


def test_height_routes_consistent():
    ring = ring_over(2)
    f = ring.parse("x^3 + y^3 + z^3")
    auto = height(f, n_max=4)
    graded = height(f, n_max=4, strategy="graded")
    local = height(f, n_max=4, strategy="local")
    assert (auto.verdict, auto.n) == (graded.verdict, graded.n) == (local.verdict, local.n)


def test_height_infinite_goes_through_fixed_point():
    """A CY input with all coefficients zero must be separated from
    LowerBound by the I_infinity decision."""
    ring = ring_over(2)
    res = height(ring.parse("x^3 + y^2*z"), n_max=3)
    assert res.verdict == INFINITE
    assert res.route == "i-infinity"
    assert res.certificate is not None


def test_height_unknown_on_tiny_budget():
    ring = ring_over(2)
    res = height(ring.parse("z^2 + x^2*y + x*y^4"), n_max=6, budget=Budget(3))
    assert res.verdict == UNKNOWN
    assert res.n is None
    assert res.diagnostics


def test_height_rejects_empty_system():
    with pytest.raises(RingError):
        height([])


def test_result_json_shape():
    ring = ring_over(2)
    res = height(ring.parse("x^3 + y^3 + z^3"), n_max=4)
    payload = result_to_json(res)
    assert payload["verdict"] == FINITE and payload["n"] == 2
    assert set(payload) == {
        "verdict",
        "n",
        "certificate",
        "steps",
        "wall_time_ms",
        "route",
        "diagnostics",
    }
    assert payload["certificate"]["kind"] in (COEFFICIENT_WITNESS, CHAIN_WITNESS)
    assert isinstance(payload["wall_time_ms"], float)


def test_height_lower_bound_when_qfs_suppressed():
    """Forced local strategy reports LowerBound instead of guessing."""
    ring = ring_over(2)
    res = height(ring.parse("x^3 + y^2*z"), n_max=2, strategy="local")
    assert res.verdict in (LOWER_BOUND, INFINITE)
    if res.verdict == LOWER_BOUND:
        assert res.n == 2

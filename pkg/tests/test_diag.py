import json
import math

import numpy as np
import pytest

from bnlab import diag, repcost as rc
from bnlab.errors import InputError, PreconditionError, ScopeError
from bnlab.net import NetParams

RNG = np.random.default_rng(555)


def identity_net(d, depth):
    return NetParams([(np.eye(d), np.zeros(d)) for _ in range(depth)], 0.0)


# ---------------------------------------------------------------------------
# spectra


def test_layer_spectra_identity_network():
    p = identity_net(3, 4)
    x = RNG.uniform(0.5, 1.5, (3, 10))
    rep = diag.layer_spectra(p, x, threshold=0.1)
    assert rep.weight_ranks == [3, 3, 3, 3]
    for s in rep.weight_spectra:
        assert np.allclose(s, 1.0)
    assert len(rep.preact_spectra) == 4


def test_layer_spectra_counterexample_middle():
    eps = 0.1
    p = rc.counterexample_network(8, eps)
    x = RNG.uniform(0.0, 1.0, (3, 8))
    rep = diag.layer_spectra(p, x, threshold=0.01)
    # stretch layers have spectrum {e^eps, e^eps, e^(-2 eps)}
    s = rep.weight_spectra[0]
    assert np.allclose(
        sorted(s, reverse=True),
        [math.exp(eps), math.exp(eps), math.exp(-2 * eps)],
        atol=1e-12,
    )


def test_spectra_csv_schema(tmp_path):
    p = identity_net(2, 2)
    rep = diag.layer_spectra(p, RNG.uniform(0.1, 1.0, (2, 4)))
    path = tmp_path / "spectra.csv"
    diag.spectra_to_csv(rep, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "layer,index,sigma"
    assert len(lines) == 1 + 2 * 2


# ---------------------------------------------------------------------------
# weight bottleneck


def test_thm3_identity_network_tight():
    d, L = 3, 5
    p = identity_net(d, L)
    x = np.array([0.4, 1.0, 2.0])  # positive orthant: Jacobian is the identity
    cert = diag.thm3_certificate(p, x, k=d)
    assert cert.status == "pass"
    assert cert.lhs == pytest.approx(0.0, abs=1e-12)
    assert cert.rhs == pytest.approx(0.0, abs=1e-12)
    assert cert.context["c1"] == pytest.approx(0.0, abs=1e-12)


def test_thm3_on_optimal_factorization():
    a = np.diag([2.0, 0.5])
    p = rc.optimal_linear_factorization(a, 8)
    x = np.array([1.0, 0.7])  # diagonal positive chain keeps preacts positive
    cert = diag.thm3_certificate(p, x, k=2)
    assert cert.status == "pass"
    assert cert.slack >= -1e-10
    assert len(cert.per_layer) == 8


def test_thm3_rank_precondition_names_measured_rank():
    p = identity_net(3, 2)
    with pytest.raises(PreconditionError, match="rank at x is 3"):
        diag.thm3_certificate(p, np.array([0.5, 1.0, 2.0]), k=1)


def test_thm3_chain_inequality():
    # lhs <= sum_l (||W||_F^2 + ||b||^2 - k - 2 log kdet(W_l, k))
    a = RNG.standard_normal((3, 3))
    p = rc.optimal_linear_factorization(a, 6)
    x = RNG.standard_normal(3)
    k = diag.jacobian_rank(p, x)
    cert = diag.thm3_certificate(p, x, k=k)
    from bnlab import linalg as la

    chain = sum(
        float(np.sum(w * w) + b @ b) - k - 2.0 * math.log(la.k_det(w, k))
        for w, b in p.layers
    )
    assert cert.lhs <= chain + 1e-8


# ---------------------------------------------------------------------------
# bounded activations


def test_thm4_identity_network_tight_pass():
    d, L = 3, 6
    p = identity_net(d, L)
    x = np.array([0.5, 1.0, 0.25])
    cert = diag.thm4_certificate(p, x, k=d)  # auto c
    assert cert.status == "pass"
    x2 = float(x @ x)
    assert cert.lhs == pytest.approx(L * x2, rel=1e-12)
    assert cert.rhs == pytest.approx(L * x2, rel=1e-12)
    assert cert.context["auto_c"] is True


def test_thm4_premise_failed_on_fixed_c():
    # activation mass of the crease network grows with depth at fixed eps,
    # so a kernel constant calibrated at small depth fails at larger depth
    x = np.array([0.9, 0.3, 0.5])
    p8 = rc.counterexample_network(8, 0.4)
    from bnlab.net import ntk_trace

    c8 = ntk_trace(p8, x, include_bias=False)[0] / 8
    p32 = rc.counterexample_network(32, 0.4)
    cert = diag.thm4_certificate(p32, x, k=3, c=c8, balance_tol=np.inf)
    assert cert.status == "premise_failed"
    assert "trace" in cert.context["premise_reason"]


def test_thm4_balance_premise():
    p = NetParams([(2 * np.eye(2), np.zeros(2)), (np.eye(2), np.zeros(2))], 0.0)
    cert = diag.thm4_certificate(p, np.array([1.0, 2.0]), k=2)
    assert cert.status == "premise_failed"
    assert "balancedness" in cert.context["premise_reason"]


def test_thm4_monotone_in_c():
    a = np.diag([2.0, 0.5])
    p = rc.optimal_linear_factorization(a, 6)
    x = np.array([1.0, 0.7])
    base = diag.thm4_certificate(p, x, k=2)
    assert base.status == "pass"
    bigger = diag.thm4_certificate(p, x, k=2, c=base.context["c"] * 10)
    assert bigger.status == "pass"
    assert bigger.slack >= base.slack


# ---------------------------------------------------------------------------
# spectrum decay


def test_cor5_duplicated_point_trivial_pass():
    p = identity_net(3, 4)
    x = np.array([0.5, 1.0, 2.0])
    xb = np.column_stack([x] * 6)
    cert = diag.cor5_certificate(p, xb, k=3)
    assert cert.status == "pass"
    assert max(cert.per_layer) <= 1e-12  # rank-1 batch: s_4 of preacts is 0


def test_cor5_two_way_bound_recomputation():
    a = np.diag([2.0, 0.5])
    p = rc.optimal_linear_factorization(a, 8)
    xb = RNG.uniform(0.2, 1.0, (2, 5))
    k, pp = 2, 0.5
    cert = diag.cor5_certificate(p, xb, k=k, p=pp)
    assert cert.status == "pass"
    # recompose the bound from the other two certificates' outputs
    t3 = diag.thm3_certificate(p, xb[:, 0], k=k, p=pp)
    budgets = []
    terms = []
    for i in range(xb.shape[1]):
        t3i = diag.thm3_certificate(p, xb[:, i], k=k, p=pp)
        budgets.append(t3i.rhs)
        t4i = diag.thm4_certificate(p, xb[:, i], k=k, c=cert.context["c"], p=pp)
        terms.append(t4i.rhs / p.depth)
    bound = (
        math.sqrt(min(budgets))
        * (math.sqrt(float(np.mean(terms))) + math.sqrt(pp))
        / (pp * math.sqrt(p.depth))
    )
    assert cert.context["bound"] == pytest.approx(bound, abs=1e-10)
    assert t3.status == "pass"


# ---------------------------------------------------------------------------
# kernel curvature


def test_prop6_single_layer_boundary():
    w = np.diag([2.0, 1.0])
    p = NetParams([(w, np.zeros(2))], 0.0)
    cert = diag.prop6_certificate(p, np.array([0.3, 0.9]))
    # depth 1: measured curvature is ||u||^2 ||v||^2 = 1 and the proof bound
    # is s1^2 / s1^2 = 1; the headline constant 2 L s1^(2-2/L) = 2 would fail
    assert cert.lhs == pytest.approx(1.0, rel=1e-12)
    assert cert.rhs == pytest.approx(1.0, rel=1e-12)
    assert cert.status == "pass"
    assert cert.context["headline_rhs"] == pytest.approx(2.0)
    assert cert.lhs < cert.context["headline_rhs"]


def test_prop6_deep_identity_tight():
    for L in (3, 7):
        p = identity_net(3, L)
        cert = diag.prop6_certificate(p, np.array([0.5, 1.0, 2.0]))
        assert cert.lhs == pytest.approx(float(L), rel=1e-12)
        assert cert.rhs == pytest.approx(float(L), rel=1e-12)
        assert cert.status == "pass"


def test_prop6_random_relu_nets_always_pass():
    from helpers import generic_point, random_net

    for _ in range(25):
        p = random_net(RNG, slope_a=0.0)
        x = generic_point(p, RNG)
        cert = diag.prop6_certificate(p, x)
        assert cert.status == "pass", cert.to_json()


def test_prop6_kink_precondition():
    p = identity_net(2, 3)
    with pytest.raises(PreconditionError):
        diag.prop6_certificate(p, np.array([0.0, 1.0]))


# ---------------------------------------------------------------------------
# first-correction lower bound


def test_r1_lower_bound_identity_zero():
    p = identity_net(3, 4)
    xb = RNG.uniform(0.1, 1.0, (3, 5))
    assert diag.r1_lower_bound(p, xb) == pytest.approx(0.0, abs=1e-9)


def test_r1_lower_bound_counterexample_zero():
    p = rc.counterexample_network(8, 0.1)
    xb = RNG.uniform(0.0, 1.0, (3, 16))
    assert abs(diag.r1_lower_bound(p, xb)) <= 1e-9


def test_r1_lower_bound_diagonal_factorization():
    p = rc.optimal_linear_factorization(np.diag([4.0, 1.0]), 6)
    xb = RNG.uniform(0.2, 1.0, (2, 8))
    assert diag.r1_lower_bound(p, xb) == pytest.approx(2 * math.log(4.0), rel=1e-9)


# ---------------------------------------------------------------------------
# uniform-Lipschitz curvature gap


def test_lip_same_region_reduces_to_log_terms():
    p = identity_net(3, 4)
    x = np.array([0.5, 1.0, 2.0])
    y = np.array([0.6, 1.1, 1.9])
    cert = diag.lip_curvature_gap(p, x, y, c_lip=2.0)
    assert cert.context["nuclear_term"] == pytest.approx(0.0, abs=1e-12)
    assert cert.lhs == pytest.approx(0.0, abs=1e-10)


def test_lip_degenerate_pair_doubles_log():
    from helpers import generic_point, random_net

    p = random_net(RNG, slope_a=0.0)
    x = generic_point(p, RNG)
    cert = diag.lip_curvature_gap(p, x, x, c_lip=1.0)
    assert cert.lhs == pytest.approx(2 * cert.context["log_pdet_x"], rel=1e-10)


def test_lip_counterexample_positive_across_crease():
    p = rc.counterexample_network(8, 0.1)
    x = np.array([0.8, 0.2, 0.5])  # active crease branch
    y = np.array([0.2, 0.8, 0.5])  # inactive branch
    cert = diag.lip_curvature_gap(p, x, y, c_lip=3.0)
    assert cert.context["nuclear_term"] == pytest.approx(math.sqrt(2.0), rel=1e-9)
    assert cert.lhs > 0.0


def test_lip_scope_error_for_leaky():
    p = NetParams([(np.eye(2), np.zeros(2))], slope_a=0.2)
    with pytest.raises(ScopeError):
        diag.lip_curvature_gap(p, np.ones(2), np.ones(2), c_lip=1.0)


# ---------------------------------------------------------------------------
# plumbing


def test_certificate_json_round_trip():
    p = identity_net(2, 3)
    cert = diag.thm3_certificate(p, np.array([0.5, 1.0]), k=2)
    payload = diag.certificates_to_json([cert])
    decoded = json.loads(payload)
    assert decoded[0]["name"] == "THM3_WEIGHTS"
    assert decoded[0]["pass"] is True
    assert set(decoded[0]) >= {"name", "pass", "lhs", "rhs", "slack", "context", "per_layer"}


def test_auto_k_middle_weight():
    p = rc.optimal_linear_factorization(np.diag([2.0, 0.5, 0.01]), 9)
    assert diag.auto_k(p, threshold=0.1) == 3  # 0.01^(1/9) = 0.6 is above 0.1
    assert diag.auto_k(p, threshold=0.7) == 2


def test_pass_iff_slack_rule():
    p = identity_net(2, 2)
    cert = diag.thm3_certificate(p, np.array([1.0, 2.0]), k=2)
    assert cert.passed == (cert.slack >= -1e-8 * max(1.0, abs(cert.rhs)))

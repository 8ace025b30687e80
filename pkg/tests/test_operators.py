import dataclasses
import math

import numpy as np
import pytest

from pdopt import operators as ops
from pdopt.rng import Xoshiro256


def central_difference(value, x, step=1e-5):
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        g[i] = (value(x + e) - value(x - e)) / (2 * step)
    return g


def grid_prox_1d(value, t, sigma, points=10_001, width=6.0):
    """Best grid point of ``h(u) + (u - t)^2 / (2 sigma)`` on a 1-D grid around ``t``."""
    grid = np.append(np.linspace(t - width, t + width, points), 0.0)
    obj = [value(np.array([u])) + (u - t) ** 2 / (2 * sigma) for u in grid]
    return float(np.min(obj))


def smooth_catalog(rng):
    K = rng.normal_array(4, 3)
    return [
        ops.zero_oracle(3),
        ops.linear_oracle(rng.normal_array(3)),
        ops.quadratic_oracle(K, rng.normal_array(4)),
        ops.quadratic_oracle(np.eye(3), np.zeros(3)),
    ]


def prox_catalog(dim):
    return [
        ops.zero_prox(dim),
        ops.zero_indicator(dim),
        ops.l1_prox(dim, 0.7),
        ops.box_indicator(dim, -0.5, 1.5),
        ops.squared_norm_prox(dim, 2.0),
    ]


class TestProxL1:
    def test_shrinks(self):
        assert ops.prox_l1(np.array([3.0]), 1.0)[0] == 2.0

    def test_dead_zone(self):
        assert ops.prox_l1(np.array([-0.5]), 1.0)[0] == 0.0

    def test_zero_fixed(self):
        assert ops.prox_l1(np.array([0.0]), 5.0)[0] == 0.0

    def test_grid_oracle(self):
        for t in (3.0, -0.5, 0.2, -4.0):
            u = ops.prox_l1(np.array([t]), 1.0)[0]
            obj = abs(u) + 0.5 * (u - t) ** 2
            assert obj <= grid_prox_1d(lambda v: float(np.abs(v[0])), t, 1.0) + 1e-12

    @pytest.mark.parametrize("sigma", [0.0, -1.0])
    def test_rejects_nonpositive_step(self, sigma):
        with pytest.raises(ValueError):
            ops.prox_l1(np.array([1.0]), sigma)


class TestProxConjugate:
    def test_abs_clamps(self):
        h = ops.l1_prox(1)
        assert ops.prox_conjugate(h, np.array([3.0]), 1.0)[0] == 1.0

    def test_zero_indicator_gives_identity(self):
        t = np.array([0.3, -7.0])
        assert np.array_equal(ops.prox_conjugate(ops.zero_indicator(2), t, 0.4), t)

    def test_zero_function_gives_zero(self):
        assert np.array_equal(ops.prox_conjugate(ops.zero_prox(2), np.array([1.0, -2.0]), 3.0),
                              np.zeros(2))

    def test_l1_conjugate_is_projection(self):
        rng = Xoshiro256(4)
        t = 3 * rng.normal_array(8)
        out = ops.prox_conjugate(ops.l1_prox(8, 0.5), t, 2.3)
        assert np.allclose(out, np.clip(t, -0.5, 0.5))

    def test_rejects_nonpositive_step(self):
        with pytest.raises(ValueError):
            ops.prox_conjugate(ops.l1_prox(1), np.array([1.0]), 0.0)

    @pytest.mark.parametrize("h", prox_catalog(5), ids=lambda h: h.kind)
    def test_moreau_decomposition(self, h):
        rng = Xoshiro256(12)
        for _ in range(10):
            t = 2 * rng.normal_array(5)
            sigma = 0.2 + rng.uniform()
            # t = prox_{sigma h}(t) + sigma prox_{h*/sigma}(t / sigma)
            recomposed = h(t, sigma) + sigma * ops.prox_conjugate(h, t / sigma, 1.0 / sigma)
            assert np.allclose(recomposed, t, atol=1e-10)

    def test_conjugate_oracle(self):
        h = ops.l1_prox(3, 2.0)
        hc = ops.conjugate(h)
        t = np.array([5.0, -1.0, 0.5])
        assert np.allclose(hc(t, 0.7), np.clip(t, -2, 2))


class TestSmoothCatalog:
    def test_identity_quadratic(self):
        f = ops.quadratic_oracle(np.eye(2), np.zeros(2))
        assert np.array_equal(f(np.array([1.0, -2.0])), [1.0, -2.0])
        assert f.beta == 1.0 and f.tau == 1.0

    def test_scalar_quadratic(self):
        f = ops.quadratic_oracle([[2.0]], [2.0])
        assert f(np.array([1.0]))[0] == 0.0
        assert f.beta == 0.25
        fd = central_difference(f.value, np.array([1.0]))
        assert abs(fd[0]) < 1e-8

    def test_zero_matrix_gives_infinite_beta(self):
        f = ops.quadratic_oracle(np.zeros((2, 2)), np.zeros(2))
        assert math.isinf(f.beta)
        assert np.array_equal(f(np.ones(2)), np.zeros(2))

    def test_linear_oracle(self):
        assert np.array_equal(ops.linear_oracle([0.0, 0.0])(np.ones(2)), np.zeros(2))
        f = ops.linear_oracle([1.0, -1.0])
        for x in (np.zeros(2), np.array([5.0, 3.0])):
            assert np.array_equal(f(x), [1.0, -1.0])
        assert math.isinf(f.beta) and f.tau == 0.0

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            ops.quadratic_oracle(np.eye(3), np.zeros(2))

    def test_finite_differences(self):
        rng = Xoshiro256(21)
        for f in smooth_catalog(rng):
            for _ in range(20):
                x = rng.normal_array(3)
                g = f(x)
                fd = central_difference(f.value, x)
                assert np.linalg.norm(g - fd) <= 1e-6 * max(1.0, np.linalg.norm(g))


class TestProxCatalog:
    @pytest.mark.parametrize("h", prox_catalog(1), ids=lambda h: h.kind)
    def test_beats_grid_search(self, h):
        rng = Xoshiro256(31)
        for _ in range(5):
            t = 3 * rng.normal()
            sigma = 0.3 + rng.uniform()
            u = h(np.array([t]), sigma)
            obj = h.value(u) + float((u[0] - t) ** 2) / (2 * sigma)
            assert obj <= grid_prox_1d(h.value, t, sigma) + 1e-12

    @pytest.mark.parametrize("h", prox_catalog(4), ids=lambda h: h.kind)
    def test_beats_random_candidates(self, h):
        rng = Xoshiro256(32)
        t = 2 * rng.normal_array(4)
        sigma = 0.8
        u = h(t, sigma)
        best = h.value(u) + float((u - t) @ (u - t)) / (2 * sigma)
        for _ in range(100):
            w = u + rng.normal_array(4) * 0.5
            if h.kind == "box":
                w = np.clip(w, -0.5, 1.5)
            other = h.value(w) + float((w - t) @ (w - t)) / (2 * sigma)
            assert best <= other + 1e-12

    def test_box_rejects_inverted_bounds(self):
        with pytest.raises(ValueError):
            ops.box_indicator(2, 1.0, 0.0)

    def test_negative_l1_weight(self):
        with pytest.raises(ValueError):
            ops.l1_prox(2, -1.0)

    def test_prox_call_validates_step(self):
        with pytest.raises(ValueError):
            ops.l1_prox(1)(np.array([1.0]), -0.1)


class TestAssumptions:
    def test_identity_quadratic_ok(self):
        report = ops.validate_assumptions(ops.quadratic_oracle(np.eye(3), np.zeros(3)), seed=1)
        assert report.ok
        assert min(report.worst_slack.values()) >= -1e-10

    def test_overclaimed_beta_reported(self):
        f = ops.quadratic_oracle(np.eye(3), np.zeros(3))
        claimed = dataclasses.replace(f, lipschitz=0.5)  # beta = 2
        report = ops.validate_assumptions(claimed, seed=1)
        assert "cocoercivity" in report.violations

    def test_overclaimed_strong_convexity_reported(self):
        f = ops.quadratic_oracle(np.diag([1.0, 0.1]), np.zeros(2))
        report = ops.validate_assumptions(dataclasses.replace(f, strong_convexity=0.5), seed=2)
        assert "strong_monotonicity" in report.violations

    def test_linear_oracle_never_violates(self):
        assert ops.validate_assumptions(ops.linear_oracle([1.0, 2.0])).ok

    @pytest.mark.parametrize("h", prox_catalog(3), ids=lambda h: h.kind)
    def test_catalog_prox_ok(self, h):
        assert ops.validate_assumptions(h, probes=16, seed=3).ok

    def test_overclaimed_tau_h_reported(self):
        h = ops.squared_norm_prox(3, 2.0)  # tau = 1/2
        assert not ops.validate_assumptions(dataclasses.replace(h, tau=1.0), seed=3).ok

    def test_probes_must_be_positive(self):
        with pytest.raises(ValueError):
            ops.validate_assumptions(ops.zero_oracle(1), probes=0)

    def test_deterministic(self):
        f = ops.quadratic_oracle(Xoshiro256(5).normal_array(3, 3), np.zeros(3))
        a = ops.validate_assumptions(f, seed=9).worst_slack
        b = ops.validate_assumptions(f, seed=9).worst_slack
        assert a == b


class TestLinearOperator:
    def test_adjoint_consistency(self):
        rng = Xoshiro256(6)
        for shape in ((3, 5), (1, 1), (7, 2)):
            op = ops.LinearOperator(rng.normal_array(*shape))
            assert ops.adjoint_gap(op) <= 1e-10

    def test_gram_and_dims(self):
        A = np.array([[1.0, 2.0, 0.0], [0.0, 1.0, 1.0]])
        op = ops.LinearOperator(A)
        assert (op.domain_dim, op.codomain_dim) == (3, 2)
        assert np.allclose(op.gram(), A @ A.T)
        Pinv = np.diag([1.0, 0.5, 2.0])
        assert np.allclose(op.gram(Pinv), A @ Pinv @ A.T)
        assert ops.LinearOperator(np.zeros((2, 2))).is_zero


class TestConjugateSubgradient:
    def test_l1(self):
        h = ops.l1_prox(3, 1.0)
        q = np.array([2.0, 0.0, -1.0])
        assert ops.conjugate_subgradient_gap(h, q, np.array([1.0, 0.3, -1.0])) == 0.0
        assert ops.conjugate_subgradient_gap(h, q, np.array([0.5, 0.3, -1.0])) > 0.1

    def test_box(self):
        h = ops.box_indicator(3, -1.0, 1.0)
        q = np.array([1.0, 0.0, -1.0])
        assert ops.conjugate_subgradient_gap(h, q, np.array([2.0, 0.0, -0.5])) == 0.0
        assert ops.conjugate_subgradient_gap(h, q, np.array([-2.0, 0.0, -0.5])) > 0

    def test_prox_pairs_satisfy_membership(self):
        rng = Xoshiro256(8)
        for h in prox_catalog(4):
            t = 2 * rng.normal_array(4)
            q = h(t, 1.0)
            assert ops.conjugate_subgradient_gap(h, q, t - q) <= 1e-12


class TestConfig:
    def test_smooth_blocks(self):
        assert ops.smooth_from_config({"name": "zero"}, 2).is_zero
        f = ops.smooth_from_config({"name": "quadratic", "K": [[2.0]], "y": [2.0]}, 1)
        assert f.lipschitz == 4.0
        assert ops.smooth_from_config({"name": "half_sq"}, 3).tau == 1.0
        assert ops.smooth_from_config({"name": "linear", "b": [1.0]}, 1).kind == "linear"

    def test_prox_blocks(self):
        assert ops.prox_from_config({"name": "l1", "weight": 0.5}, 2).kind == "l1"
        box = ops.prox_from_config({"name": "box", "lower": 0.0, "upper": 1.0}, 2)
        assert np.array_equal(box(np.array([-1.0, 3.0]), 1.0), [0.0, 1.0])
        conj = ops.prox_from_config({"name": "conjugate", "of": {"name": "l1"}}, 1)
        assert conj(np.array([3.0]), 1.0)[0] == 1.0

    def test_unknown_names(self):
        with pytest.raises(ValueError, match="unknown"):
            ops.smooth_from_config({"name": "cubic"}, 1)
        with pytest.raises(ValueError, match="unknown"):
            ops.prox_from_config({"name": "nuclear"}, 1)

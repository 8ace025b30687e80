"""Acceptance suite: ten end-to-end criteria at their stated tolerances.

Each test reports through the ``criterion`` fixture, which prints one
PASS/FAIL line per criterion in the terminal summary.
"""

import cmath
import math

import numpy as np

from pdopt import consensus as cons
from pdopt import harness, linalg
from pdopt import operators as ops
from pdopt import pdsolver as pd
from pdopt.rng import Xoshiro256

# composites below this fraction of their start are rounding noise
FLOOR = 1e-20


def test_c01_lyapunov_monotone(criterion):
    worst = -math.inf
    kinds = set()
    for seed in range(50):
        rng = Xoshiro256(1000 + seed)
        h = ("l1", "box")[seed % 2]
        lstar = ("zero", "quadratic")[(seed // 2) % 2]
        spec, params, ref = harness.random_instance(rng, h=h, lstar=lstar)
        kinds.add((h, lstar))
        cert = pd.certify(spec, params.gamma, params.lam)
        st = pd.initial_state(spec, rng.normal_array(spec.A.domain_dim),
                              rng.normal_array(spec.A.codomain_dim))
        for _ in range(150):
            nxt = pd.pd_step(spec, params, cert, st)
            slack = pd.theorem1_slack(st, nxt, ref, cert)
            worst = max(worst, slack / (1.0 + pd.lyapunov(st, ref, cert)))
            st = nxt
    criterion(1, worst <= 1e-9 and len(kinds) == 4,
              f"50 instances x 150 steps, max slack/(1+V) = {worst:.3e} (<= 1e-9)")


def test_c02_extended_dual_stepsize(criterion):
    worst_k, beyond = 0, True
    failures = []
    for seed in range(20):
        spec = harness.generate_problem("papc", {"n": 12, "m": 8, "h": ("l1", "box")[seed % 2]},
                                        seed=2000 + seed)
        lmax = linalg.eig_max(spec.A.gram())
        lam = 0.99 * (4.0 / 3.0) / lmax
        beyond = beyond and lam * lmax > 1.0
        res = pd.solve(spec, pd.PdParams(1.0 / spec.f.lipschitz, lam, tol=1e-8, max_iters=5000))
        if res.status != "converged":
            failures.append(seed)
        worst_k = max(worst_k, res.state.k)
    criterion(2, beyond and not failures,
              f"20 PAPC instances at lam*lmax = 1.32, all converged to 1e-8, max {worst_k} iterations"
              + (f"; failed seeds {failures}" if failures else ""))


def _swap_oracle(alpha):
    """Largest non-consensus root for W = [[0, 1], [1, 0]] by the quadratic formula."""
    worst = abs(1.0 - alpha)  # w = 1 roots are 1 and 1 - alpha
    # w = -1: mu^2 + alpha mu - alpha = 0
    disc = cmath.sqrt(alpha * alpha + 4.0 * alpha)
    for root in ((-alpha + disc) / 2.0, (-alpha - disc) / 2.0):
        worst = max(worst, abs(root))
    return worst


def test_c03_bound_is_tight(criterion):
    prob = cons.quadratic_problem(cons.SWAP_W, [[0.0], [1.0]])
    X0 = np.zeros((2, 1))
    bound = cons.stepsize_bound(cons.SWAP_W, 1.0, "extended")
    analytic = 0.75 * linalg.eig_min(np.eye(2) + cons.SWAP_W) + 0.5
    good = cons.run_extra(prob, 0.49, X0, max_iters=3000, tol=1e-8, blowup=1e6)
    bad = cons.run_extra(prob, 0.51, X0, max_iters=100000, tol=1e-8, blowup=1e6)
    amp = {a: cons.extra_amplification(cons.SWAP_W, a) for a in (0.49, 0.51)}
    oracle_gap = max(abs(amp[a] - _swap_oracle(a)) for a in amp)
    ok = (abs(bound - 0.5) <= 1e-12 and abs(analytic - 0.5) <= 1e-12
          and good.status == "converged" and bad.status == "diverged"
          and amp[0.49] < 1.0 < amp[0.51] and oracle_gap <= 1e-10)
    criterion(3, ok,
              f"bound {bound!r}; alpha=0.49 {good.status} in {good.state.k} iterations, "
              f"alpha=0.51 {bad.status} at {bad.state.k}; amplification "
              f"{amp[0.49]:.6f} / {amp[0.51]:.6f}, oracle gap {oracle_gap:.1e}")


def _random_consensus(seed):
    rng = Xoshiro256(seed)
    n, p = 2 + rng.integer(11), 1 + rng.integer(4)
    g = cons.random_connected_graph(n, rng)
    W = cons.metropolis_weights(g)
    smooth = []
    for _ in range(n):
        B = np.eye(p) + 0.3 * rng.normal_array(p, p) / math.sqrt(p)
        smooth.append(ops.quadratic_oracle(B, rng.normal_array(p)))
    prox = tuple(ops.l1_prox(p, 0.2) for _ in range(n))
    return cons.ConsensusProblem(W, tuple(smooth), prox, g), rng.normal_array(n, p)


def test_c04_pg_extra_equivalence(criterion):
    worst = 0.0
    for seed in range(20):
        prob, X0 = _random_consensus(4000 + seed)
        alpha = 0.9 * cons.stepsize_bound(prob.W, prob.L)
        a = cons.pg_extra_initial_state(prob, alpha, X0)
        d = a
        for _ in range(200):
            a = cons.pg_extra_step(prob, alpha, a)
            d = cons.dual_form_step(prob, 1.0 / (2.0 * alpha), 0.5, d)
            worst = max(worst, float(np.max(np.abs(a.X - d.X))), float(np.max(np.abs(a.Z - d.Z))))
    criterion(4, worst <= 1e-10, f"20 graphs x 200 iterations, max entrywise gap {worst:.2e}")


def _consensus_quadratic(seed):
    rng = Xoshiro256(seed)
    if seed % 8 == 0:
        return cons.quadratic_problem(cons.SWAP_W, rng.normal_array(2, 2)), rng
    n, p = 3 + rng.integer(8), 1 + rng.integer(3)
    g = cons.random_connected_graph(n, rng)
    weights = rng.uniform_array(n, low=0.5, high=2.0)
    return cons.quadratic_problem(cons.metropolis_weights(g), rng.normal_array(n, p), g, weights), rng


def test_c05_consensus_linear_rate(criterion):
    worst_ratio, worst_slope_gap = -math.inf, -math.inf
    for seed in range(8):
        prob, rng = _consensus_quadratic(5000 + seed)
        alpha = 0.8 * cons.stepsize_bound(prob.W, prob.L, "extended")
        cc = cons.consensus_rate_certificate(prob, alpha)
        assert cc.certified, cc.reason
        X_star, U_star = cons.quadratic_fixed_point(prob)
        lap_pinv = linalg.sym_pinv(prob.laplacian)
        st = cons.pg_extra_initial_state(prob, alpha, rng.normal_array(prob.n, prob.p))
        phi = [cons.theorem4_composite(prob, cc.cert, st, X_star, U_star, lap_pinv)]
        for _ in range(199):
            st = cons.pg_extra_step(prob, alpha, st)
            phi.append(cons.theorem4_composite(prob, cc.cert, st, X_star, U_star, lap_pinv))
        phi = np.array(phi)
        ks = np.arange(1, phi.size + 1)
        live = phi > FLOOR * phi[0]
        ratios = phi[1:][live[:-1]] / phi[:-1][live[:-1]]
        worst_ratio = max(worst_ratio, float(np.max(ratios - cc.rho2)))
        fit = live & (ks >= 10) & (ks <= 200)
        slope = np.polyfit(ks[fit], np.log(phi[fit]), 1)[0]
        worst_slope_gap = max(worst_slope_gap, float(slope - math.log(cc.rho2)))
    criterion(5, worst_ratio <= 1e-9 and worst_slope_gap <= 1e-6,
              f"8 consensus quadratics at 80% of the extended bound: max(ratio - rho2) = "
              f"{worst_ratio:.3e}, max(slope - log rho2) = {worst_slope_gap:.3e}")


def test_c06_strongly_convex_rate(criterion):
    worst = -math.inf
    for seed in range(20):
        rng = Xoshiro256(6000 + seed)
        # tau_f > 0 always; the dual side gets tau_h > 0 or tau_l > 0 (or both)
        if seed % 3 == 0:
            spec, params, ref = harness.random_instance(rng, h="sq", lstar="zero", strongly_convex=True)
        elif seed % 3 == 1:
            spec, params, ref = harness.random_instance(rng, lstar="quadratic", strongly_convex=True)
        else:
            spec, params, ref = harness.random_instance(rng, h="sq", lstar="quadratic",
                                                        strongly_convex=True)
        cert = pd.certify(spec, params.gamma, params.lam)
        assert cert.rho1 < 1.0
        st = pd.initial_state(spec, rng.normal_array(spec.A.domain_dim),
                              rng.normal_array(spec.A.codomain_dim))
        d0 = d = pd.theorem3_distance(st, ref, cert)
        for _ in range(100):
            st = pd.pd_step(spec, params, cert, st)
            new = pd.theorem3_distance(st, ref, cert)
            if d > FLOOR * d0:
                worst = max(worst, new / d - cert.rho1)
            d = new
    criterion(6, worst <= 1e-9, f"20 strongly convex instances, max(ratio - rho1) = {worst:.3e}")


def test_c07_alm_recovery(criterion):
    worst = 0.0
    for seed in range(10):
        rng = Xoshiro256(7000 + seed)
        n, m = 2 + rng.integer(10), 2 + rng.integer(10)
        A = ops.LinearOperator(rng.normal_array(m, n) / math.sqrt(n))
        b = rng.normal_array(n)
        h = (ops.l1_prox(m, 0.5), ops.box_indicator(m, -1.0, 1.0), ops.squared_norm_prox(m, 1.5))[seed % 3]
        gamma = rng.uniform(0.2, 2.0)
        beta_alm = gamma * linalg.eig_max(A.gram()) / rng.uniform(0.5, 1.3)
        spec = pd.alm_as_problem(h, A, b)
        params = pd.PdParams(gamma, gamma / beta_alm)
        cert = pd.certify(spec, params.gamma, params.lam)
        a = p = pd.initial_state(spec, rng.normal_array(n), rng.normal_array(m))
        for _ in range(100):
            a = pd.alm_step(h, A, b, gamma, beta_alm, a)
            p = pd.pd_step(spec, params, cert, p)
            scale = max(1.0, float(np.max(np.abs(p.x))), float(np.max(np.abs(p.s))))
            worst = max(worst, float(np.max(np.abs(a.x - p.x))) / scale,
                        float(np.max(np.abs(a.s - p.s))) / scale)
    coeffs = all(pd.theorem1_coefficients(g, math.inf, t) == (1.0, 4.0 * t - 3.0)
                 for g in (0.1, 1.0, 7.0) for t in (0.76, 0.8, 0.9, 1.0))
    criterion(7, worst <= 1e-12 and coeffs,
              f"10 instances x 100 iterations, max gap {worst:.2e}; beta=inf coefficients "
              f"(1, 4 theta - 3) {'exact' if coeffs else 'WRONG'}")


def test_c08_gradient_descent(criterion):
    worst = 0.0
    for gamma in (0.1, 0.5, 1.0, 1.5, 1.9):
        for dim in (1, 3):
            x0 = Xoshiro256(dim).normal_array(dim)
            spec = pd.ProblemSpec(ops.quadratic_oracle(np.eye(dim), np.zeros(dim)),
                                  ops.zero_prox(dim), ops.zero_oracle(dim),
                                  ops.LinearOperator(np.zeros((dim, dim))))
            params = pd.PdParams(gamma, 1.0)
            cert = pd.certify(spec, gamma, 1.0)
            st = pd.initial_state(spec, x0)
            for k in range(1, 101):
                st = pd.pd_step(spec, params, cert, st)
                worst = max(worst, float(np.max(np.abs(st.x - (1.0 - gamma) ** k * x0))))
    criterion(8, worst <= 1e-12, f"x^k = (1 - gamma)^k x0 over 100 steps, max error {worst:.2e}")


def _central_difference(value, x, step=1e-5):
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        g[i] = (value(x + e) - value(x - e)) / (2 * step)
    return g


def _char_poly_roots(S, samples=4000):
    n = S.shape[0]
    bound = float(np.max(np.sum(np.abs(S), axis=1))) + 1.0
    grid = np.linspace(-bound, bound, samples)
    vals = [np.linalg.det(S - t * np.eye(n)) for t in grid]
    roots = []
    for a, b, fa, fb in zip(grid, grid[1:], vals, vals[1:]):
        if fa * fb < 0:
            for _ in range(200):
                mid = 0.5 * (a + b)
                fm = np.linalg.det(S - mid * np.eye(n))
                if fa * fm <= 0:
                    b = mid
                else:
                    a, fa = mid, fm
            roots.append(0.5 * (a + b))
    return np.sort(roots)


def test_c09_oracles(criterion):
    rng = Xoshiro256(9000)
    grad_err = 0.0
    for _ in range(10):
        K = rng.normal_array(4, 3)
        for f in (ops.zero_oracle(3), ops.linear_oracle(rng.normal_array(3)),
                  ops.quadratic_oracle(K, rng.normal_array(4))):
            x = rng.normal_array(3)
            g = f(x)
            fd = _central_difference(f.value, x)
            grad_err = max(grad_err, float(np.linalg.norm(g - fd) / max(1.0, np.linalg.norm(g))))

    prox_excess = -math.inf
    catalog = (ops.zero_prox(1), ops.zero_indicator(1), ops.l1_prox(1, 0.7),
               ops.box_indicator(1, -0.5, 1.5), ops.squared_norm_prox(1, 2.0))
    for h in catalog:
        for t in (-2.3, -0.4, 0.0, 0.3, 1.1, 2.7):
            for sigma in (0.3, 1.0, 2.5):
                u = h(np.array([t]), sigma)
                obj = h.value(u) + float((u[0] - t) ** 2) / (2 * sigma)
                grid = np.append(np.linspace(t - 6.0, t + 6.0, 10_000), 0.0)
                best = min(h.value(np.array([v])) + (v - t) ** 2 / (2 * sigma) for v in grid)
                prox_excess = max(prox_excess, obj - best)

    eig_err = 0.0
    for seed in range(12):
        n = 1 + seed % 4
        G = Xoshiro256(9100 + seed).normal_array(n, n)
        S = 0.5 * (G + G.T)
        roots = _char_poly_roots(S)
        eigs = linalg.sym_eigs(S).eigenvalues
        assert roots.size == n
        eig_err = max(eig_err, float(np.max(np.abs(roots - eigs))))

    ok = grad_err <= 1e-6 and prox_excess <= 1e-12 and eig_err <= 1e-8
    criterion(9, ok, f"gradient rel err {grad_err:.1e}, prox minus grid best {prox_excess:.1e}, "
                     f"eigen vs char-poly {eig_err:.1e}")


def test_c10_message_passing(criterion):
    worst, total = 0.0, 0
    for seed in range(10):
        prob, X0 = _random_consensus(10_000 + seed)
        alpha = 0.8 * cons.stepsize_bound(prob.W, prob.L)
        run = cons.run_extra(prob, alpha, X0, max_iters=3000, tol=1e-12)
        iters = run.state.k
        history = cons.simulate_message_passing(prob, alpha, X0, iters)
        st = cons.pg_extra_initial_state(prob, alpha, X0)
        worst = max(worst, float(np.max(np.abs(history[0] - st.X))))
        for X in history[1:]:
            st = cons.pg_extra_step(prob, alpha, st)
            worst = max(worst, float(np.max(np.abs(X - st.X))))
        total += iters
    criterion(10, worst <= 1e-10,
              f"10 graphs, {total} rounds to convergence, max gap to matrix form {worst:.2e}")

"""Generalized primal-dual iteration for ``min_x f(x) + (h inf-conv l)(A x)``.

One step, given ``(x, s)``::

    s+ = ((gamma/lam) D + dh*)^{-1} ( M s / gamma + A (x - gamma P^{-1} grad f(x)) - grad l*(s) )
    x+ = x - gamma P^{-1} grad f(x) - gamma P^{-1} A^T s+

with ``M = (gamma^2/lam) (D - lam A P^{-1} A^T)``. The iteration is certified by
splitting ``M = M1 - M2`` with a parameter ``theta`` in ``(3/4, 1]``; the
splitting admits dual stepsizes up to ``lam < 4 / (3 lmax(D^{-1/2} A P^{-1} A^T D^{-1/2}))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import linalg
from .operators import (INF_BETA, LinearOperator, ProxOracle, SmoothOracle, linear_oracle,
                        prox_conjugate, zero_oracle)

Array = np.ndarray

THETA_LOW = 0.75
STRICT_MARGIN = 1e-12
THETA_ONE_SLACK = 1e-9
ILL_CONDITIONED = 1e12
DEFAULT_BLOWUP = 1e150


class InfeasibleParameters(ValueError):
    def __init__(self, reasons: list[str]):
        super().__init__("; ".join(reasons))
        self.reasons = reasons


class NumericalDivergence(ArithmeticError):
    def __init__(self, iteration: int, detail: str = "non-finite iterate"):
        super().__init__(f"numerical divergence at iteration {iteration}: {detail}")
        self.iteration = iteration


@dataclass(frozen=True)
class ProblemSpec:
    f: SmoothOracle
    h: ProxOracle
    lstar: SmoothOracle
    A: LinearOperator
    P: Array | None = None
    D: Array | None = None

    def __post_init__(self):
        n, m = self.A.domain_dim, self.A.codomain_dim
        if self.f.dim != n:
            raise ValueError(f"f acts on dimension {self.f.dim}, A has {n} columns")
        if self.h.dim != m or self.lstar.dim != m:
            raise ValueError(f"h and l* must act on dimension {m} (rows of A)")
        P = np.eye(n) if self.P is None else linalg.check_symmetric(self.P)
        D = np.eye(m) if self.D is None else linalg.check_symmetric(self.D)
        if P.shape != (n, n) or D.shape != (m, m):
            raise ValueError("P and D must match the domain and codomain of A")
        for name, S in (("P", P), ("D", D)):
            if not linalg.is_positive_definite(S):
                raise ValueError(f"{name} must be positive definite")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "D", D)

    @property
    def Pinv(self) -> Array:
        return _cached(self, "_Pinv", lambda: linalg.spd_inverse(self.P))

    @property
    def P_spectrum(self) -> tuple[float, float]:
        return _cached(self, "_Pspec", lambda: (linalg.eig_min(self.P), linalg.eig_max(self.P)))

    @property
    def D_scale(self) -> float | None:
        """``d`` when ``D == d I``, else ``None``."""
        def scale():
            d = float(self.D[0, 0])
            return d if np.array_equal(self.D, d * np.eye(self.D.shape[0])) else None
        return _cached(self, "_Dscale", scale)

    @property
    def is_identity_metric(self) -> bool:
        return (np.array_equal(self.P, np.eye(self.P.shape[0]))
                and np.array_equal(self.D, np.eye(self.D.shape[0])))

    def objective(self, x) -> float | None:
        """``f(x) + (h inf-conv l)(A x)`` where a closed form is available."""
        if self.f.value is None or self.h.value is None:
            return None
        t = self.A.forward(x)
        if self.lstar.is_zero:
            return self.f.value(x) + self.h.value(t)
        if _is_half_square(self.lstar):
            u = self.h(t, 1.0)
            return self.f.value(x) + self.h.value(u) + 0.5 * float((t - u) @ (t - u))
        return None


def _is_half_square(g: SmoothOracle) -> bool:
    if g.kind != "quadratic":
        return False
    K, y = g.params["K"], g.params["y"]
    return K.shape[0] == K.shape[1] and np.array_equal(K, np.eye(K.shape[0])) and not np.any(y)


def _cached(obj, name, make):
    try:
        return obj.__dict__[name]
    except KeyError:
        value = make()
        object.__setattr__(obj, name, value)
        return value


@dataclass(frozen=True)
class PdParams:
    gamma: float
    lam: float
    theta: float | str = "default"
    max_iters: int = 1000
    tol: float = 1e-10
    override: bool = False
    thin: int = 1

    def __post_init__(self):
        if not (self.gamma > 0 and self.lam > 0):
            raise ValueError("gamma and lam must be positive")
        if self.max_iters < 0 or self.thin < 1:
            raise ValueError("max_iters must be >= 0 and thin >= 1")


@dataclass(frozen=True)
class CertBundle:
    gamma: float
    lam: float
    theta: float
    lam_max_G: float
    P: Array = field(repr=False)
    M: Array = field(repr=False)
    M1: Array = field(repr=False)
    M2: Array = field(repr=False)
    Mtilde: Array = field(repr=False)
    Mhat: Array | None = field(repr=False)
    Mlow: Array | None = field(repr=False)
    C1: float | None
    C2: float | None
    rho1: float | None
    rho2: float | None
    beta: float
    tau_f: float
    tau_h: float
    tau_l: float
    feasible: bool
    reasons: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()
    theorem4_weight: float | None = None
    no_rho2_reason: str | None = None

    def snapshot(self) -> dict:
        """JSON-friendly scalar summary."""
        def num(v):
            if v is None:
                return None
            return "inf" if math.isinf(v) else float(v)
        return {
            "gamma": self.gamma, "lambda": self.lam, "theta": self.theta,
            "lambda_max_G": self.lam_max_G, "lambda_bound": 4.0 / (3.0 * self.lam_max_G)
            if self.lam_max_G > 0 else "inf",
            "C1": num(self.C1), "C2": num(self.C2), "rho1": num(self.rho1),
            "rho2": num(self.rho2), "beta": num(self.beta), "tau_f": self.tau_f,
            "tau_h": self.tau_h, "tau_l": self.tau_l, "feasible": self.feasible,
            "reasons": list(self.reasons), "warnings": list(self.warnings),
        }


@dataclass
class IterateState:
    x: Array
    s: Array
    grad_f: Array
    grad_l: Array
    k: int = 0
    residual: float = math.inf


class TraceRecord(NamedTuple):
    k: int
    residual: float
    lyapunov: float | None = None
    objective: float | None = None
    dist_to_opt: float | None = None


class SolveResult(NamedTuple):
    state: IterateState
    trace: list
    status: str
    cert: CertBundle


# -- certificates ----------------------------------------------------------

def _kappa(gamma: float, beta: float) -> float:
    """``2 gamma - gamma^2 / beta`` with the exact limit for ``beta = inf``."""
    return 2.0 * gamma if math.isinf(beta) else 2.0 * gamma - gamma * gamma / beta


def theorem1_coefficients(gamma: float, beta: float, theta: float) -> tuple[float, float]:
    """Damping coefficients on ``|ds|^2_{M1}`` and ``|dx|^2_P`` in the descent bound."""
    if math.isinf(beta):
        return 1.0, 4.0 * theta - 3.0
    return (1.0 - gamma / (2.0 * beta),
            (4.0 * theta - 3.0) * (2.0 * beta - gamma) / (2.0 * beta - 4.0 * (1.0 - theta) * gamma))


def rate_rho1(gamma, beta, theta, C1, tau_f, tau_h, tau_l) -> float:
    kappa = _kappa(gamma, beta)
    return max((1.0 - kappa * tau_l + C1) / (1.0 + 2.0 * gamma * tau_h + C1),
               1.0 - kappa * tau_f)


def rate_rho2(gamma, beta, theta, C1, C2, tau_l) -> float:
    kappa = _kappa(gamma, beta)
    if theta == 1.0:
        return max(1.0 / (1.0 + C2), 1.0 - kappa * tau_l)
    a = 4.0 * theta - 3.0
    b = 4.0 * (1.0 - theta) * C1
    c = (2.0 * theta - 1.0) / (2.0 * (1.0 - theta)) * C1
    return max((a + b) / (a * (C2 + 1.0) + b), (1.0 - kappa * tau_l + c) / (1.0 + c))


def default_theta(lam: float, lam_max_G: float) -> float:
    """``1`` when ``lam lmax <= 1``, otherwise the midpoint of the admissible interval."""
    r = lam * lam_max_G
    if r <= 1.0 - THETA_ONE_SLACK:
        return 1.0
    upper = 1.0 / r
    if upper <= THETA_LOW:
        return 1.0
    return 0.5 * (THETA_LOW + upper)


def build_certificate(K, D, gamma: float, lam: float, theta=None, *,
                      P=None, P_spectrum=(1.0, 1.0),
                      L_f=0.0, mu_f=0.0, L_l=0.0, mu_l=0.0, mu_hstar=0.0,
                      theorem4=False, rank_tol=linalg.DEFAULT_RANK_TOL) -> CertBundle:
    """Operator algebra and rate constants for ``K = A P^{-1} A^T``.

    ``theta`` is a number, ``"default"`` / ``None`` (midpoint rule) or
    ``"best"`` (scan of the admissible interval, minimizing the applicable rate
    among parameter choices that pass every feasibility check).
    """
    K = linalg.check_symmetric(K)
    D = linalg.check_symmetric(D)
    lam_max_G = linalg.gen_eig_max(K, D)
    args = dict(P=P, P_spectrum=P_spectrum, L_f=L_f, mu_f=mu_f, L_l=L_l, mu_l=mu_l,
                mu_hstar=mu_hstar, theorem4=theorem4, rank_tol=rank_tol)
    if theta is None or theta == "default":
        return _certificate(K, D, gamma, lam, default_theta(lam, lam_max_G), lam_max_G, **args)
    if theta == "best":
        base = _certificate(K, D, gamma, lam, default_theta(lam, lam_max_G), lam_max_G, **args)
        d = _scalar_of(D)
        if d is not None:
            th = _scan_theta_scalar(K, d, gamma, lam, rank_tol=rank_tol, P_spectrum=P_spectrum,
                                    L_f=L_f, mu_f=mu_f, L_l=L_l, mu_l=mu_l,
                                    mu_hstar=mu_hstar, theorem4=theorem4)
            if th is None:
                return base
            cand = _certificate(K, D, gamma, lam, th, lam_max_G, **args)
            if base.feasible and not (cand.feasible and _rate_key(cand) <= _rate_key(base)):
                return base
            return cand if cand.feasible else base
        best = base if base.feasible else None
        for th in _theta_grid():
            cand = _certificate(K, D, gamma, lam, th, lam_max_G, **args)
            if not cand.feasible:
                continue
            if best is None or _rate_key(cand) < _rate_key(best):
                best = cand
        return best if best is not None else base
    return _certificate(K, D, gamma, lam, float(theta), lam_max_G, **args)


def _theta_grid() -> list[float]:
    # uniform grid on (3/4, 1] plus a geometric cluster approaching 3/4
    grid = [THETA_LOW + 0.25 * j / 400 for j in range(1, 401)]
    grid += [THETA_LOW + 0.25 * 10.0 ** (-j / 20) for j in range(1, 201)]
    return sorted(set(grid))


def _scalar_of(D) -> float | None:
    d = float(D[0, 0])
    if d > 0 and np.array_equal(D, d * np.eye(D.shape[0])):
        return d
    return None


def _scan_theta_scalar(K, d, gamma, lam, *, rank_tol, P_spectrum, L_f, mu_f, L_l, mu_l,
                       mu_hstar, theorem4) -> float | None:
    """Best ``theta`` when ``D = d I``; every operator is then diagonal in ``K``'s eigenbasis."""
    spec = linalg.sym_eigs(K, rank_tol)
    kmax = max(spec.max, 0.0)
    kmin_nz = spec.min_nonzero
    if lam * kmax / d >= 4.0 / 3.0 - STRICT_MARGIN:
        return None
    P_min, P_max = P_spectrum
    beta_f = INF_BETA if L_f == 0 else P_min / L_f
    g2 = gamma * gamma
    best_th, best_key = None, math.inf
    for th in _theta_grid():
        m1_min = (g2 / lam) * (d - th * lam * kmax)
        if not m1_min > 0:
            continue
        m1_max = (g2 / lam) * (d - th * lam * max(spec.min, 0.0))
        beta_l = INF_BETA if L_l == 0 else m1_min / L_l
        beta = min(beta_f, beta_l)
        if not math.isinf(beta) and not gamma < 2.0 * beta:
            continue
        C1 = lam * (1.0 - th) * kmax / (d - th * lam * kmax)
        tau_l = mu_l / m1_max
        key = math.inf
        if theorem4 and kmin_nz is not None and tau_l > 0:
            C2 = lam * kmin_nz / (d - th * lam * kmin_nz)
            key = rate_rho2(gamma, beta, th, C1, C2, tau_l)
        elif beta > 0:
            key = rate_rho1(gamma, beta, th, C1, mu_f / P_max, mu_hstar / m1_max, tau_l)
        if best_th is None or key < best_key:
            best_th, best_key = th, key
    return best_th


def _rate_key(cert: CertBundle) -> float:
    if cert.rho2 is not None:
        return cert.rho2
    return cert.rho1 if cert.rho1 is not None else math.inf


def _certificate(K, D, gamma, lam, theta, lam_max_G, *, P, P_spectrum, L_f, mu_f,
                 L_l, mu_l, mu_hstar, theorem4, rank_tol) -> CertBundle:
    reasons, warnings = [], []
    if not THETA_LOW < theta <= 1.0:
        reasons.append(f"theta={theta} outside (3/4, 1]")
    if lam * lam_max_G >= 4.0 / 3.0 - STRICT_MARGIN:
        reasons.append("dual stepsize beyond optimal bound "
                       f"(lam*lmax={lam * lam_max_G:.17g} >= 4/3)")
    M = (gamma * gamma / lam) * (D - lam * K)
    M1 = (gamma * gamma / lam) * (D - theta * lam * K)
    M2 = gamma * gamma * (1.0 - theta) * K
    M, M1, M2 = (0.5 * (X + X.T) for X in (M, M1, M2))
    Mtilde = M1 + M2
    m1 = linalg.sym_eigs(M1)
    m1_min, m1_max = m1.min, m1.max
    M1_pd = m1_min > 0 and linalg.is_positive_definite(M1)
    if not M1_pd:
        reasons.append("M1 is not positive definite")
    elif m1_max / m1_min > ILL_CONDITIONED:
        warnings.append("ill-conditioned certificate")

    P_min, P_max = P_spectrum
    beta_f = INF_BETA if L_f == 0 else P_min / L_f
    if L_l == 0:
        beta_l = INF_BETA
    else:
        beta_l = m1_min / L_l if M1_pd else 0.0
    beta = min(beta_f, beta_l)
    if not math.isinf(beta) and not gamma < 2.0 * beta:
        reasons.append(f"primal stepsize too large: gamma={gamma!r} >= 2*beta={2.0 * beta!r}")
    tau_f = mu_f / P_max
    tau_l = mu_l / m1_max if M1_pd and m1_max > 0 else 0.0
    tau_h = mu_hstar / m1_max if M1_pd and m1_max > 0 else 0.0

    C1 = C2 = rho1 = rho2 = weight = None
    Mhat = Mlow = None
    no_rho2 = None
    if M1_pd:
        C1 = linalg.gen_eig_max(M2, M1)
        Mhat = (1.0 + 2.0 * gamma * tau_h) * M1 + M2
        Mlow = M1 if theta == 1.0 else M1 + (2.0 * theta - 1.0) / (2.0 * (1.0 - theta)) * M2
        if beta > 0:
            rho1 = rate_rho1(gamma, beta, theta, C1, tau_f, tau_h, tau_l)
        if not theorem4:
            no_rho2 = "requires f = 0, h* = 0 and P = D = I"
        else:
            spec_K = linalg.sym_eigs(K, rank_tol)
            if spec_K.min_nonzero is None:
                no_rho2 = "A = 0"
            elif tau_l <= 0:
                no_rho2 = "tau_l = 0"
            else:
                lmn = spec_K.min_nonzero
                C2 = lam * lmn / (1.0 - theta * lam * lmn)
                rho2 = rate_rho2(gamma, beta, theta, C1, C2, tau_l)
                a = 4.0 * theta - 3.0
                weight = 1.0 + a * C2 / (a + 4.0 * (1.0 - theta) * C1)
    return CertBundle(
        gamma=gamma, lam=lam, theta=theta, lam_max_G=lam_max_G, P=P, M=M, M1=M1, M2=M2,
        Mtilde=Mtilde, Mhat=Mhat, Mlow=Mlow, C1=C1, C2=C2, rho1=rho1, rho2=rho2,
        beta=beta, tau_f=tau_f, tau_h=tau_h, tau_l=tau_l, feasible=not reasons,
        reasons=tuple(reasons), warnings=tuple(warnings), theorem4_weight=weight,
        no_rho2_reason=no_rho2,
    )


def certify(spec: ProblemSpec, gamma: float, lam: float, theta="default",
            override: bool = False, rank_tol: float = linalg.DEFAULT_RANK_TOL) -> CertBundle:
    """Select ``theta``, build ``M1, M2, ...`` and the rate constants.

    Raises
    ------
    InfeasibleParameters
        When a feasibility check fails and ``override`` is false.
    """
    if not (gamma > 0 and lam > 0):
        raise ValueError("gamma and lam must be positive")
    theorem4 = (spec.f.is_zero and spec.h.kind == "zero_indicator"
                and spec.is_identity_metric)
    cert = build_certificate(
        spec.A.gram(spec.Pinv), spec.D, gamma, lam, theta, P=spec.P,
        P_spectrum=spec.P_spectrum, L_f=spec.f.lipschitz, mu_f=spec.f.strong_convexity,
        L_l=spec.lstar.lipschitz, mu_l=spec.lstar.strong_convexity, mu_hstar=spec.h.tau,
        theorem4=theorem4, rank_tol=rank_tol,
    )
    if not cert.feasible and not override:
        raise InfeasibleParameters(list(cert.reasons))
    return cert


# -- iteration -------------------------------------------------------------

def initial_state(spec: ProblemSpec, x0=None, s0=None) -> IterateState:
    x = np.zeros(spec.A.domain_dim) if x0 is None else np.array(x0, dtype=float)
    s = np.zeros(spec.A.codomain_dim) if s0 is None else np.array(s0, dtype=float)
    if x.shape != (spec.A.domain_dim,) or s.shape != (spec.A.codomain_dim,):
        raise ValueError("initial point has the wrong dimension")
    return IterateState(x, s, spec.f(x), spec.lstar(s))


def _norm(v, W) -> float:
    return math.sqrt(abs(linalg.weighted_norm_sq(v, W)))


def pd_step(spec: ProblemSpec, params: PdParams, cert: CertBundle, state: IterateState,
            blowup: float = DEFAULT_BLOWUP) -> IterateState:
    if not cert.feasible and not params.override:
        raise InfeasibleParameters(list(cert.reasons))
    d = spec.D_scale
    if d is None:
        raise NotImplementedError("stepping needs D to be a positive multiple of I")
    gamma, lam = params.gamma, params.lam
    x, s = state.x, state.s
    if x.shape != (spec.A.domain_dim,) or s.shape != (spec.A.codomain_dim,):
        raise ValueError("state does not match the problem dimensions")
    Pinv = spec.Pinv
    x_half = x - gamma * (Pinv @ state.grad_f)
    v = cert.M @ s / gamma + spec.A.forward(x_half) - state.grad_l
    c = gamma * d / lam
    # ((gamma/lam) D + dh*)^{-1}(v) = prox_{h*/c}(v/c) for D = d I
    s_new = prox_conjugate(spec.h, v / c, 1.0 / c)
    x_new = x_half - gamma * (Pinv @ spec.A.adjoint(s_new))
    k = state.k + 1
    for arr in (x_new, s_new):
        if not np.all(np.isfinite(arr)):
            raise NumericalDivergence(k)
        if np.max(np.abs(arr), initial=0.0) > blowup:
            raise NumericalDivergence(k, f"iterate magnitude exceeds {blowup:g}")
    residual = _norm(x_new - x, spec.P) + _norm(s_new - s, cert.M1)
    return IterateState(x_new, s_new, spec.f(x_new), spec.lstar(s_new), k, residual)


def solve(spec: ProblemSpec, params: PdParams, x0=None, s0=None, reference=None,
          cert: CertBundle | None = None, blowup: float = DEFAULT_BLOWUP) -> SolveResult:
    """Iterate until the fixed-point residual drops to ``params.tol``.

    ``status`` is ``"converged"`` or ``"max_iters"``; numerical blow-up
    raises ``NumericalDivergence``.
    """
    if cert is None:
        cert = certify(spec, params.gamma, params.lam, params.theta, params.override)
    state = initial_state(spec, x0, s0)
    trace = []
    status = "max_iters"
    while state.k < params.max_iters:
        state = pd_step(spec, params, cert, state, blowup)
        done = state.residual <= params.tol
        if state.k % params.thin == 0 or done or state.k == params.max_iters:
            trace.append(_record(spec, cert, state, reference))
        if done:
            status = "converged"
            break
    return SolveResult(state, trace, status, cert)


def _record(spec, cert, state, reference) -> TraceRecord:
    lyap = dist = None
    if reference is not None:
        xr, sr = reference
        if cert.M1 is not None and cert.C1 is not None:
            lyap = lyapunov(state, reference, cert)
        dist = math.sqrt(float(np.sum((state.x - xr) ** 2) + np.sum((state.s - sr) ** 2)))
    return TraceRecord(state.k, state.residual, lyap, spec.objective(state.x), dist)


# -- diagnostics -----------------------------------------------------------

def lyapunov(state, reference, cert: CertBundle) -> float:
    """``|x - x*|^2_P + |s - s*|^2_{M1 + M2}``."""
    xr, sr = reference
    return (linalg.weighted_norm_sq(state.x - xr, cert.P)
            + linalg.weighted_norm_sq(state.s - sr, cert.Mtilde))


def theorem1_slack(prev, nxt, reference, cert: CertBundle, params=None) -> float:
    """Left side minus right side of the per-step descent bound; ``<= 0`` expected."""
    c_s, c_x = theorem1_coefficients(cert.gamma, cert.beta, cert.theta)
    ds = prev.s - nxt.s
    dx = prev.x - nxt.x
    return (lyapunov(nxt, reference, cert) - lyapunov(prev, reference, cert)
            + c_s * linalg.weighted_norm_sq(ds, cert.M1)
            + c_x * linalg.weighted_norm_sq(dx, cert.P))


def theorem3_distance(state, reference, cert: CertBundle) -> float:
    xr, sr = reference
    return (linalg.weighted_norm_sq(state.x - xr, cert.P)
            + linalg.weighted_norm_sq(state.s - sr, cert.Mhat))


def theorem4_composite(state, reference, cert: CertBundle) -> float:
    if cert.theorem4_weight is None:
        raise ValueError(f"no rho2 certificate: {cert.no_rho2_reason}")
    xr, sr = reference
    return (cert.theorem4_weight * float(np.sum((state.x - xr) ** 2))
            + linalg.weighted_norm_sq(state.s - sr, cert.Mlow))


def conjugate_subgradient(spec: ProblemSpec, cert: CertBundle, prev, nxt) -> Array:
    """The element of ``dh*(s+)`` produced by one step."""
    return ((cert.M @ prev.s - cert.M @ nxt.s) / cert.gamma
            + spec.A.forward(nxt.x) - prev.grad_l)


# -- linearized augmented Lagrangian ---------------------------------------

def alm_step(h: ProxOracle, A: LinearOperator, b, gamma: float, beta_alm: float,
             state: IterateState) -> IterateState:
    """One linearized ALM step for ``min h*(s)`` subject to ``-A^T s = b``."""
    if not beta_alm > 0:
        raise ValueError("beta_alm must be positive")
    b = np.asarray(b, dtype=float)
    x, s = state.x, state.s
    center = s + A.forward(x - gamma * (A.adjoint(s) + b)) / beta_alm
    s_new = prox_conjugate(h, center, 1.0 / beta_alm)
    x_new = x - gamma * (A.adjoint(s_new) + b)
    k = state.k + 1
    if not (np.all(np.isfinite(s_new)) and np.all(np.isfinite(x_new))):
        raise NumericalDivergence(k)
    residual = math.sqrt(float(np.sum((x_new - x) ** 2) + np.sum((s_new - s) ** 2)))
    return IterateState(x_new, s_new, b.copy(), np.zeros_like(s_new), k, residual)


def alm_as_problem(h: ProxOracle, A: LinearOperator, b) -> ProblemSpec:
    """The primal-dual problem that linearized ALM solves: ``f(x) = b^T x``, ``l = indicator of {0}``."""
    return ProblemSpec(linear_oracle(b), h, zero_oracle(A.codomain_dim), A)

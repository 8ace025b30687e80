"""Gradient and proximal oracles, linear operators, and the function catalog.

Constants are declared in the Euclidean metric: a ``SmoothOracle`` carries the
Lipschitz constant ``lipschitz`` of its gradient and a strong-convexity modulus
``strong_convexity``; a ``ProxOracle`` carries the strong-monotonicity modulus
of the subdifferential of its conjugate. The solver converts these into the
weighted metrics its analysis uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import linalg

Array = np.ndarray

#: cocoercivity constant of a gradient that never changes (Lipschitz constant 0)
INF_BETA = math.inf


@dataclass(frozen=True)
class SmoothOracle:
    dim: int
    grad: Callable[[Array], Array]
    lipschitz: float
    strong_convexity: float = 0.0
    value: Callable[[Array], float] | None = None
    kind: str = "custom"
    params: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def beta(self) -> float:
        """Euclidean cocoercivity constant ``1/L``; ``INF_BETA`` when ``L == 0``."""
        return INF_BETA if self.lipschitz == 0 else 1.0 / self.lipschitz

    @property
    def tau(self) -> float:
        return self.strong_convexity

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero"

    def __call__(self, v) -> Array:
        return self.grad(np.asarray(v, dtype=float))


@dataclass(frozen=True)
class ProxOracle:
    """``prox(t, sigma) = argmin_u h(u) + |u - t|^2 / (2 sigma)``."""

    dim: int
    prox: Callable[[Array, float], Array]
    tau: float = 0.0
    value: Callable[[Array], float] | None = None
    kind: str = "custom"
    params: dict = field(default_factory=dict, compare=False, repr=False)

    def __call__(self, t, sigma: float) -> Array:
        if not sigma > 0:
            raise ValueError(f"prox stepsize must be positive, got {sigma}")
        return self.prox(np.asarray(t, dtype=float), float(sigma))


@dataclass(frozen=True)
class LinearOperator:
    matrix: Array

    def __post_init__(self):
        object.__setattr__(self, "matrix", linalg.as_matrix(self.matrix))

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def domain_dim(self) -> int:
        return self.matrix.shape[1]

    @property
    def codomain_dim(self) -> int:
        return self.matrix.shape[0]

    def forward(self, x) -> Array:
        return self.matrix @ x

    def adjoint(self, s) -> Array:
        return self.matrix.T @ s

    def gram(self, Pinv: Array | None = None) -> Array:
        """``A P^{-1} A^T`` (``P = I`` when ``Pinv`` is omitted), symmetrized."""
        A = self.matrix
        G = A @ A.T if Pinv is None else A @ Pinv @ A.T
        return 0.5 * (G + G.T)

    @property
    def is_zero(self) -> bool:
        return not np.any(self.matrix)


# -- proximal maps ---------------------------------------------------------

def prox_l1(t, sigma: float, weight=1.0) -> Array:
    if not sigma > 0:
        raise ValueError(f"prox stepsize must be positive, got {sigma}")
    t = np.asarray(t, dtype=float)
    return np.sign(t) * np.maximum(np.abs(t) - sigma * np.asarray(weight), 0.0)


def prox_conjugate(h: ProxOracle, t, sigma: float) -> Array:
    """``prox_{sigma h*}(t) = t - sigma prox_{h/sigma}(t/sigma)`` (Moreau)."""
    if not sigma > 0:
        raise ValueError(f"prox stepsize must be positive, got {sigma}")
    t = np.asarray(t, dtype=float)
    return t - sigma * h(t / sigma, 1.0 / sigma)


# -- catalog ---------------------------------------------------------------

def zero_oracle(dim: int) -> SmoothOracle:
    return SmoothOracle(dim, lambda v: np.zeros_like(v), 0.0, 0.0,
                        value=lambda v: 0.0, kind="zero")


def linear_oracle(b) -> SmoothOracle:
    b = linalg.as_vector(b)
    return SmoothOracle(b.size, lambda v: b.copy(), 0.0, 0.0,
                        value=lambda v: float(b @ v), kind="linear", params={"b": b})


def quadratic_oracle(K, y) -> SmoothOracle:
    """``g(x) = |K x - y|^2 / 2`` with ``L = lmax(K^T K)`` and ``mu = lmin(K^T K)``."""
    K = linalg.as_matrix(K)
    y = linalg.as_vector(y)
    if K.shape[0] != y.size:
        raise ValueError(f"K has {K.shape[0]} rows but y has {y.size} entries")
    gram = K.T @ K
    eigs = linalg.sym_eigs(gram).eigenvalues
    L, mu = max(float(eigs[-1]), 0.0), max(float(eigs[0]), 0.0)
    Kty = K.T @ y
    return SmoothOracle(
        K.shape[1],
        lambda x: gram @ x - Kty,
        L,
        mu,
        value=lambda x: 0.5 * float(np.sum((K @ x - y) ** 2)),
        kind="quadratic",
        params={"K": K, "y": y},
    )


def zero_prox(dim: int) -> ProxOracle:
    """``h = 0`` (so ``h* = indicator of {0}``)."""
    return ProxOracle(dim, lambda t, sigma: t.copy(), 0.0, value=lambda t: 0.0, kind="zero")


def zero_indicator(dim: int) -> ProxOracle:
    """``h = indicator of {0}`` (so ``h* = 0``)."""
    def value(t):
        return 0.0 if not np.any(t) else math.inf
    return ProxOracle(dim, lambda t, sigma: np.zeros_like(t), 0.0, value=value,
                      kind="zero_indicator")


def l1_prox(dim: int, weight=1.0) -> ProxOracle:
    w = np.broadcast_to(np.asarray(weight, dtype=float), (dim,)).copy()
    if np.any(w < 0):
        raise ValueError("l1 weights must be nonnegative")
    return ProxOracle(dim, lambda t, sigma: prox_l1(t, sigma, w), 0.0,
                      value=lambda t: float(np.sum(w * np.abs(t))), kind="l1",
                      params={"weight": w})


def box_indicator(dim: int, lower=-1.0, upper=1.0) -> ProxOracle:
    lo = np.broadcast_to(np.asarray(lower, dtype=float), (dim,)).copy()
    hi = np.broadcast_to(np.asarray(upper, dtype=float), (dim,)).copy()
    if np.any(lo > hi):
        raise ValueError("box lower bound exceeds upper bound")

    def value(t):
        return 0.0 if np.all((t >= lo) & (t <= hi)) else math.inf
    return ProxOracle(dim, lambda t, sigma: np.clip(t, lo, hi), 0.0, value=value,
                      kind="box", params={"lower": lo, "upper": hi})


def squared_norm_prox(dim: int, c: float = 1.0) -> ProxOracle:
    """``h = (c/2)|t|^2``; its conjugate is ``(1/c)``-strongly convex."""
    if not c > 0:
        raise ValueError("squared-norm weight must be positive")
    return ProxOracle(dim, lambda t, sigma: t / (1.0 + sigma * c), 1.0 / c,
                      value=lambda t: 0.5 * c * float(t @ t), kind="sq",
                      params={"c": c})


def conjugate(h: ProxOracle) -> ProxOracle:
    """Prox oracle of ``h*`` obtained through the Moreau identity."""
    return ProxOracle(h.dim, lambda t, sigma: prox_conjugate(h, t, sigma), 0.0,
                      kind=f"conj({h.kind})", params={"base": h})


def conjugate_subgradient_gap(h: ProxOracle, q, s, zero_tol: float = 1e-12) -> float:
    """Distance-type violation of ``q in d h*(s)``, i.e. of ``s in d h(q)``.

    Returns 0 when the membership holds exactly; only catalog kinds are
    supported. Entries of ``q`` below ``zero_tol`` (relative to ``max(1, |q|)``)
    count as zero for the l1 kind, since a step produces them only up to
    rounding.
    """
    q = np.asarray(q, dtype=float)
    s = np.asarray(s, dtype=float)
    if h.kind == "zero":
        return float(np.max(np.abs(s)))
    if h.kind == "zero_indicator":
        return float(np.max(np.abs(q)))
    if h.kind == "sq":
        return float(np.max(np.abs(s - h.params["c"] * q)))
    if h.kind == "l1":
        w = h.params["weight"]
        scale = np.maximum(np.abs(q), 1e-300)
        on = np.abs(q) > zero_tol * max(1.0, float(np.max(np.abs(q), initial=0.0)))
        gap_on = np.where(on, np.abs(s - w * q / scale), 0.0)
        gap_off = np.where(on, 0.0, np.maximum(np.abs(s) - w, 0.0))
        return float(np.max(gap_on + gap_off))
    if h.kind == "box":
        lo, hi = h.params["lower"], h.params["upper"]
        outside = np.maximum(lo - q, 0.0) + np.maximum(q - hi, 0.0)
        width = np.maximum(hi - lo, 1.0)
        at_lo = np.abs(q - lo) <= 1e-9 * width
        at_hi = np.abs(q - hi) <= 1e-9 * width
        # normal cone: s <= 0 at the lower face, s >= 0 at the upper, 0 inside
        bad = np.where(at_lo & at_hi, 0.0,
                       np.where(at_lo, np.maximum(s, 0.0),
                                np.where(at_hi, np.maximum(-s, 0.0), np.abs(s))))
        return float(np.max(outside + bad))
    raise NotImplementedError(f"no subdifferential test for kind {h.kind!r}")


# -- assumption checks -----------------------------------------------------

@dataclass
class AssumptionReport:
    worst_slack: dict[str, float]
    probes: int
    tol: float = 1e-10

    @property
    def violations(self) -> list[str]:
        return [k for k, v in self.worst_slack.items() if v < -self.tol]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_assumptions(oracle, probes: int = 32, seed: int = 0,
                         scale: float = 3.0, tol: float = 1e-10) -> AssumptionReport:
    """Check declared cocoercivity / strong-monotonicity constants on random pairs.

    Slacks are normalized by the size of the pair so that one report is
    comparable across oracles.
    """
    if probes < 1:
        raise ValueError("probes must be >= 1")
    from .rng import Xoshiro256

    rng = Xoshiro256(seed)
    worst: dict[str, float] = {}

    def note(name, value):
        worst[name] = min(worst.get(name, math.inf), value)

    for _ in range(probes):
        u = scale * rng.normal_array(oracle.dim)
        v = scale * rng.normal_array(oracle.dim)
        if isinstance(oracle, SmoothOracle):
            gu, gv = oracle(u), oracle(v)
            d, g = u - v, gu - gv
            inner = float(d @ g)
            norm = max(float(d @ d), 1e-300)
            coco = inner if math.isinf(oracle.beta) else inner - oracle.beta * float(g @ g)
            note("cocoercivity", coco / norm)
            note("strong_monotonicity", (inner - oracle.tau * float(d @ d)) / norm)
        elif isinstance(oracle, ProxOracle):
            sigma = 0.5 + rng.uniform()
            pu, pv = oracle(u, sigma), oracle(v, sigma)
            dp, d = pu - pv, u - v
            norm = max(float(d @ d), 1e-300)
            note("firm_nonexpansiveness", (float(dp @ d) - float(dp @ dp)) / norm)
            # t - prox_h(t) lies in dh(prox_h(t)), i.e. prox_h(t) in dh*(t - prox_h(t))
            qu, qv = oracle(u, 1.0), oracle(v, 1.0)
            su, sv = u - qu, v - qv
            ds = su - sv
            note("strong_monotonicity",
                 (float(ds @ (qu - qv)) - oracle.tau * float(ds @ ds)) / norm)
        else:
            raise TypeError(f"cannot validate {type(oracle).__name__}")
    return AssumptionReport(worst, probes, tol)


def adjoint_gap(op: LinearOperator, probes: int = 8, seed: int = 0) -> float:
    """Worst relative adjoint mismatch ``|<Ax,s> - <x,A^T s>| / (|x||s||A|_F)``."""
    from .rng import Xoshiro256

    rng = Xoshiro256(seed)
    fro = max(float(np.linalg.norm(op.matrix)), 1e-300)
    worst = 0.0
    for _ in range(probes):
        x = rng.normal_array(op.domain_dim)
        s = rng.normal_array(op.codomain_dim)
        gap = abs(float(op.forward(x) @ s) - float(x @ op.adjoint(s)))
        worst = max(worst, gap / (np.linalg.norm(x) * np.linalg.norm(s) * fro))
    return worst


# -- config construction ---------------------------------------------------

def smooth_from_config(block: dict, dim: int) -> SmoothOracle:
    """Build a smooth oracle from ``{"name": ..., <parameters>}``."""
    name = block.get("name")
    if name == "zero":
        return zero_oracle(dim)
    if name == "linear":
        return linear_oracle(block["b"])
    if name in ("quadratic", "least_squares"):
        K = np.eye(dim) if block.get("K", "identity") == "identity" else block["K"]
        y = block.get("y", np.zeros(linalg.as_matrix(K).shape[0]))
        return quadratic_oracle(K, y)
    if name == "half_sq":
        return quadratic_oracle(np.eye(dim), np.zeros(dim))
    raise ValueError(f"unknown smooth function {name!r}")


def prox_from_config(block: dict, dim: int) -> ProxOracle:
    name = block.get("name")
    if name == "zero":
        return zero_prox(dim)
    if name == "zero_indicator":
        return zero_indicator(dim)
    if name == "l1":
        return l1_prox(dim, block.get("weight", 1.0))
    if name == "box":
        return box_indicator(dim, block.get("lower", -1.0), block.get("upper", 1.0))
    if name == "sq":
        return squared_norm_prox(dim, block.get("c", 1.0))
    if name == "conjugate":
        return conjugate(prox_from_config(block["of"], dim))
    raise ValueError(f"unknown prox function {name!r}")

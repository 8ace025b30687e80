"""Decentralized consensus: graphs, mixing matrices, PG-EXTRA and its dual form.

Node copies are stacked row-wise into an ``n x p`` matrix ``X``. PG-EXTRA is the
primal-dual iteration applied to the dual of the consensus problem with
``lam = 1/2`` and ``gamma = 1/(2 alpha)``. The dual variable is never
materialized; the tracked quantity is ``U = A y`` with ``A A^T = I - W``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import linalg
from .operators import (LinearOperator, ProxOracle, SmoothOracle, quadratic_oracle,
                        zero_indicator, zero_oracle, zero_prox)
from .pdsolver import CertBundle, NumericalDivergence, ProblemSpec, build_certificate

Array = np.ndarray

RELAXED_EIG_FLOOR = -5.0 / 3.0
MIXING_TOL = 1e-12


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 1:
            raise GraphError("a graph needs at least one node")
        seen = set()
        for i, j in self.edges:
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise GraphError(f"edge ({i}, {j}) out of range for n={self.n}")
            if i == j:
                raise GraphError(f"self-loop at node {i}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
        object.__setattr__(self, "edges", tuple(sorted(seen)))

    @property
    def neighbors(self) -> list[list[int]]:
        nbrs = [[] for _ in range(self.n)]
        for i, j in self.edges:
            nbrs[i].append(j)
            nbrs[j].append(i)
        return [sorted(v) for v in nbrs]

    @property
    def degrees(self) -> list[int]:
        return [len(v) for v in self.neighbors]

    def is_connected(self) -> bool:
        nbrs = self.neighbors
        seen = {0}
        queue = deque([0])
        while queue:
            for j in nbrs[queue.popleft()]:
                if j not in seen:
                    seen.add(j)
                    queue.append(j)
        return len(seen) == self.n

    @classmethod
    def parse(cls, text: str) -> "Graph":
        """Edge-list text: ``n`` on the first line, then ``i j`` pairs (0-indexed)."""
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines:
            raise GraphError("empty graph file")
        try:
            n = int(lines[0])
            edges = []
            for lineno, ln in enumerate(lines[1:], start=2):
                parts = ln.split()
                if len(parts) != 2:
                    raise GraphError(f"line {lineno}: expected 'i j', got {ln!r}")
                edges.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise GraphError(f"malformed graph file: {exc}") from None
        return cls(n, tuple(edges))

    @classmethod
    def read(cls, path) -> "Graph":
        return cls.parse(Path(path).read_text())

    def format(self) -> str:
        return "\n".join([str(self.n)] + [f"{i} {j}" for i, j in self.edges]) + "\n"


def path_graph(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def ring_graph(n: int) -> Graph:
    if n < 3:
        return path_graph(n)
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def complete_graph(n: int) -> Graph:
    return Graph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))


def star_graph(n: int) -> Graph:
    return Graph(n, tuple((0, j) for j in range(1, n)))


def random_connected_graph(n: int, rng, extra_edge_prob: float = 0.3) -> Graph:
    """Random spanning tree plus independent extra edges."""
    order = rng.permutation(n)
    edges = set()
    for idx in range(1, n):
        j = order[rng.integer(idx)]
        i = order[idx]
        edges.add((min(i, j), max(i, j)))
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in edges and rng.uniform() < extra_edge_prob:
                edges.add((i, j))
    return Graph(n, tuple(sorted(edges)))


SWAP_W = np.array([[0.0, 1.0], [1.0, 0.0]])


# -- mixing matrices -------------------------------------------------------

def metropolis_weights(g: Graph) -> Array:
    """``W_ij = 1 / (1 + max(deg i, deg j))`` on edges, rows completed on the diagonal."""
    if not g.is_connected():
        raise GraphError("graph is not connected")
    deg = g.degrees
    W = np.zeros((g.n, g.n))
    for i, j in g.edges:
        W[i, j] = W[j, i] = 1.0 / (1.0 + max(deg[i], deg[j]))
    W[np.diag_indices(g.n)] = 1.0 - W.sum(axis=1)
    return W


@dataclass(frozen=True)
class MixingReport:
    mode: str
    symmetric: bool
    rows_sum_to_one: bool
    null_space_ok: bool
    eig_min: float | None
    eig_max: float | None
    eig_range_ok: bool
    sparsity_ok: bool = True

    @property
    def passed(self) -> bool:
        return (self.symmetric and self.rows_sum_to_one and self.null_space_ok
                and self.eig_range_ok and self.sparsity_ok)


def validate_mixing(W, mode: str = "classic", graph: Graph | None = None) -> MixingReport:
    """Check a mixing matrix.

    ``classic`` requires eigenvalues in ``(-1, 1]``; ``relaxed`` requires
    ``5 I + 3 W`` positive definite, i.e. eigenvalues above ``-5/3``.
    """
    if mode not in ("classic", "relaxed"):
        raise ValueError(f"unknown mixing mode {mode!r}")
    W = linalg.as_matrix(W)
    if W.shape[0] != W.shape[1]:
        raise ValueError("mixing matrix must be square")
    n = W.shape[0]
    symmetric = linalg.is_symmetric(W)
    rows = bool(np.all(np.abs(W.sum(axis=1) - 1.0) <= MIXING_TOL * max(1.0, n)))
    sparsity = True
    if graph is not None:
        allowed = np.eye(n, dtype=bool)
        for i, j in graph.edges:
            allowed[i, j] = allowed[j, i] = True
        sparsity = graph.n == n and not np.any(W[~allowed])
    if not symmetric:
        return MixingReport(mode, False, rows, False, None, None, False, sparsity)
    eigs = linalg.sym_eigs(np.eye(n) - W, vectors=True)
    lam = eigs.eigenvalues
    top = max(float(np.max(np.abs(lam))), 1.0)
    zero = np.abs(lam) <= 1e-10 * top
    null_ok = False
    if rows and int(zero.sum()) == 1:
        v = eigs.eigenvectors[:, int(np.argmax(zero))]
        null_ok = bool(np.allclose(np.abs(v), 1.0 / math.sqrt(n), atol=1e-8))
    w_eigs = 1.0 - lam[::-1]
    wmin, wmax = float(w_eigs[0]), float(w_eigs[-1])
    tol = 1e-12
    if mode == "classic":
        in_range = wmin > -1.0 + tol and wmax <= 1.0 + tol
    else:
        in_range = wmin > RELAXED_EIG_FLOOR + tol and wmax <= 1.0 + tol
    return MixingReport(mode, True, rows, null_ok, wmin, wmax, in_range, sparsity)


def stepsize_bound(W, L: float, regime: str = "extended") -> float:
    """Strict upper bound on the EXTRA stepsize ``alpha``.

    ``classic``: ``lmin(I + W) / L``; ``extended``: ``((3/4) lmin(I + W) + 1/2) / L``.
    A classic bound of 0 means no stepsize is admissible.
    """
    if not L > 0:
        raise ValueError("L must be positive")
    if regime not in ("classic", "extended"):
        raise ValueError(f"unknown regime {regime!r}")
    mode = "classic" if regime == "classic" else "relaxed"
    report = validate_mixing(W, mode)
    structural = report.symmetric and report.rows_sum_to_one and report.null_space_ok
    if regime == "classic":
        # the boundary eigenvalue -1 is accepted and yields a zero bound
        valid = structural and report.eig_min >= -1.0 - 1e-12 and report.eig_max <= 1.0 + 1e-12
    else:
        valid = report.passed
    if not valid:
        raise ValueError(f"mixing matrix is not valid for the {regime} regime")
    lmin = 1.0 + report.eig_min
    if lmin <= 1e-12:
        lmin = 0.0
    if regime == "classic":
        return lmin / L
    return (0.75 * lmin + 0.5) / L


# -- problems and states ---------------------------------------------------

@dataclass(frozen=True)
class ConsensusProblem:
    W: Array
    smooth: tuple[SmoothOracle, ...]
    prox: tuple[ProxOracle, ...]
    graph: Graph | None = None

    def __post_init__(self):
        W = linalg.check_symmetric(self.W)
        n = W.shape[0]
        object.__setattr__(self, "W", W)
        smooth = tuple(self.smooth)
        prox = tuple(self.prox) if self.prox else tuple(zero_prox(smooth[0].dim) for _ in smooth)
        if len(smooth) != n or len(prox) != n:
            raise ValueError(f"need one smooth and one prox oracle per node ({n})")
        dims = {o.dim for o in smooth} | {o.dim for o in prox}
        if len(dims) != 1:
            raise ValueError("all node functions must share one dimension")
        object.__setattr__(self, "smooth", smooth)
        object.__setattr__(self, "prox", prox)
        if self.graph is not None and self.graph.n != n:
            raise ValueError("graph and mixing matrix disagree on node count")
        if not self.L > 0:
            raise ValueError("the smooth parts need a positive Lipschitz constant")

    @property
    def n(self) -> int:
        return self.W.shape[0]

    @property
    def p(self) -> int:
        return self.smooth[0].dim

    @property
    def L(self) -> float:
        return max(o.lipschitz for o in self.smooth)

    @property
    def mu(self) -> float:
        return min(o.strong_convexity for o in self.smooth)

    @property
    def r_is_zero(self) -> bool:
        return all(o.kind == "zero" for o in self.prox)

    @property
    def mix(self) -> Array:
        """``(I + W) / 2``."""
        return _cached(self, "_mix", lambda: 0.5 * (np.eye(self.n) + self.W))

    @property
    def laplacian(self) -> Array:
        """``I - W`` (equal to ``A A^T``)."""
        return _cached(self, "_lap", lambda: np.eye(self.n) - self.W)

    def neighbors(self) -> list[list[int]]:
        if self.graph is not None:
            return self.graph.neighbors
        return [[j for j in range(self.n) if j != i and self.W[i, j] != 0] for i in range(self.n)]

    def grad(self, X) -> Array:
        return np.vstack([o(X[i]) for i, o in enumerate(self.smooth)])

    def prox_rows(self, Z, sigma: float) -> Array:
        return np.vstack([o(Z[i], sigma) for i, o in enumerate(self.prox)])

    def objective(self, X) -> float | None:
        total = 0.0
        for i in range(self.n):
            s, r = self.smooth[i], self.prox[i]
            if s.value is None or r.value is None:
                return None
            total += s.value(X[i]) + r.value(X[i])
        return total

    def consensus_violation(self, X) -> float:
        return float(np.linalg.norm(self.laplacian @ X))


def _cached(obj, name, make):
    try:
        return obj.__dict__[name]
    except KeyError:
        value = make()
        object.__setattr__(obj, name, value)
        return value


@dataclass
class ConsensusState:
    X: Array
    Z: Array | None
    X_prev: Array | None
    G_prev: Array | None
    G: Array
    U: Array
    k: int = 0
    residual: float = math.inf
    violation: float = 0.0


def _check_finite(k, *arrays, blowup=math.inf):
    for arr in arrays:
        if not np.all(np.isfinite(arr)):
            raise NumericalDivergence(k)
        if np.max(np.abs(arr), initial=0.0) > blowup:
            raise NumericalDivergence(k, f"iterate magnitude exceeds {blowup:g}")


def _as_rows(prob: ConsensusProblem, X0) -> Array:
    X0 = np.array(X0, dtype=float)
    if X0.ndim == 1 and prob.p == 1:
        X0 = X0.reshape(-1, 1)
    if X0.shape != (prob.n, prob.p):
        raise ValueError(f"expected an {prob.n}x{prob.p} initial point, got {X0.shape}")
    return X0


def dual_initial_state(prob: ConsensusProblem, X0) -> ConsensusState:
    """``(X^0, U^0 = 0)`` for the dual-form iteration."""
    X0 = _as_rows(prob, X0)
    return ConsensusState(X0, None, None, None, prob.grad(X0), np.zeros_like(X0),
                          violation=prob.consensus_violation(X0))


def pg_extra_initial_state(prob: ConsensusProblem, alpha: float, X0) -> ConsensusState:
    """First PG-EXTRA iterate, taken as one dual-form step from ``U^0 = 0``.

    This gives ``Z^1 = ((I + W)/2) X^0 - alpha grad s(X^0)``.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return dual_form_step(prob, 1.0 / (2.0 * alpha), 0.5, dual_initial_state(prob, X0))


def pg_extra_step(prob: ConsensusProblem, alpha: float, state: ConsensusState,
                  blowup: float = math.inf) -> ConsensusState:
    """``Z+ = Z - X + ((I+W)/2)(2X - X_prev) - alpha (grad s(X) - grad s(X_prev))``."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if state.k < 1 or state.X_prev is None or state.Z is None:
        raise ValueError("PG-EXTRA needs k >= 1; start from pg_extra_initial_state")
    X, Xp = state.X, state.X_prev
    Z = state.Z - X + prob.mix @ (2.0 * X - Xp) - alpha * state.G + alpha * state.G_prev
    X_new = prob.prox_rows(Z, alpha)
    k = state.k + 1
    _check_finite(k, Z, X_new, blowup=blowup)
    gamma = 1.0 / (2.0 * alpha)
    return ConsensusState(
        X_new, Z, X, state.G, prob.grad(X_new), state.U - gamma * (prob.laplacian @ X_new),
        k, float(np.linalg.norm(X_new - X)), prob.consensus_violation(X_new),
    )


def dual_form_step(prob: ConsensusProblem, gamma: float, lam: float, state: ConsensusState,
                   blowup: float = math.inf) -> ConsensusState:
    """``Z+ = (I - lam (I - W)) X + (lam/gamma)(U - grad s(X))``, ``X+ = prox``, ``U+ = U - gamma (I - W) X+``."""
    if not (gamma > 0 and lam > 0):
        raise ValueError("gamma and lam must be positive")
    X = state.X
    sigma = lam / gamma
    Z = (X - lam * (prob.laplacian @ X)) + sigma * (state.U - state.G)
    X_new = prob.prox_rows(Z, sigma)
    U_new = state.U - gamma * (prob.laplacian @ X_new)
    k = state.k + 1
    _check_finite(k, Z, X_new, U_new, blowup=blowup)
    return ConsensusState(X_new, Z, X, state.G, prob.grad(X_new), U_new, k,
                          float(np.linalg.norm(X_new - X)), prob.consensus_violation(X_new))


def two_step_z(prob: ConsensusProblem, gamma: float, lam: float, Z, X, X_prev, G, G_prev) -> Array:
    """``Z`` update with the dual variable eliminated.

    ``Z+ = Z - X + (I - lam (I - W))(2X - X_prev) - (lam/gamma)(grad s(X) - grad s(X_prev))``.
    """
    sigma = lam / gamma
    V = 2.0 * X - X_prev
    return Z - X + (V - lam * (prob.laplacian @ V)) - sigma * (G - G_prev)


# -- node-local simulation -------------------------------------------------

class MissingMessage(KeyError):
    pass


def node_local_step(prob: ConsensusProblem, alpha: float, state: ConsensusState, i: int,
                    messages: dict) -> tuple[Array, Array]:
    """Node ``i``'s PG-EXTRA update from its own history and neighbor messages.

    ``messages[j] = (x_j^k, x_j^{k-1})`` for every neighbor ``j``. Returns the
    node's new ``(z_i, x_i)`` rows.
    """
    W = prob.W
    nbrs = [j for j in range(prob.n) if j != i and W[i, j] != 0]
    for j in nbrs:
        if j not in messages:
            raise MissingMessage(f"node {i} has no message from neighbor {j}")
    x, xp = state.X[i], state.X_prev[i]
    mixed = 0.5 * (1.0 + W[i, i]) * (2.0 * x - xp)
    for j in nbrs:
        xj, xjp = messages[j]
        mixed = mixed + 0.5 * W[i, j] * (2.0 * xj - xjp)
    z = state.Z[i] - x + mixed - alpha * state.G[i] + alpha * state.G_prev[i]
    return z, prob.prox[i](z, alpha)


def node_local_initial(prob: ConsensusProblem, alpha: float, X0, i: int,
                       messages: dict) -> tuple[Array, Array]:
    """Node ``i``'s first update ``z_i = sum_j ((I+W)/2)_ij x_j^0 - alpha grad s_i(x_i^0)``."""
    W = prob.W
    nbrs = [j for j in range(prob.n) if j != i and W[i, j] != 0]
    for j in nbrs:
        if j not in messages:
            raise MissingMessage(f"node {i} has no message from neighbor {j}")
    mixed = 0.5 * (1.0 + W[i, i]) * X0[i]
    for j in nbrs:
        mixed = mixed + 0.5 * W[i, j] * messages[j]
    z = mixed - alpha * prob.smooth[i](X0[i])
    return z, prob.prox[i](z, alpha)


def simulate_message_passing(prob: ConsensusProblem, alpha: float, X0, iters: int,
                             blowup: float = math.inf) -> list[Array]:
    """Run PG-EXTRA as synchronous rounds of neighbor messages.

    Every round each node posts its current and previous copy to its
    neighbors' inboxes, then all nodes update from the round's inboxes only.
    Returns ``[X^1, ..., X^iters]``.
    """
    X0 = _as_rows(prob, X0)
    nbrs = prob.neighbors()
    inbox = [{j: X0[j] for j in nbrs[i]} for i in range(prob.n)]
    rows = [node_local_initial(prob, alpha, X0, i, inbox[i]) for i in range(prob.n)]
    Z = np.vstack([z for z, _ in rows])
    X = np.vstack([x for _, x in rows])
    state = ConsensusState(X, Z, X0, prob.grad(X0), prob.grad(X), np.zeros_like(X), 1)
    history = [X]
    while state.k < iters:
        inbox = [{j: (state.X[j], state.X_prev[j]) for j in nbrs[i]} for i in range(prob.n)]
        rows = [node_local_step(prob, alpha, state, i, inbox[i]) for i in range(prob.n)]
        Z = np.vstack([z for z, _ in rows])
        X = np.vstack([x for _, x in rows])
        _check_finite(state.k + 1, Z, X, blowup=blowup)
        state = ConsensusState(X, Z, state.X, state.G, prob.grad(X), state.U, state.k + 1)
        history.append(X)
    return history


# -- stepsize optimality probe ---------------------------------------------

def mode_roots(w: float, a: float) -> tuple[complex, complex]:
    """Roots of ``mu^2 - (1 + w - a) mu + ((1 + w)/2 - a)`` (``a = alpha L``)."""
    b = -(1.0 + w - a)
    c = 0.5 * (1.0 + w) - a
    disc = b * b - 4.0 * c
    if disc >= 0:
        r = math.sqrt(disc)
        # numerically stable pair
        q = -0.5 * (b + math.copysign(r, b)) if b != 0 else 0.5 * r
        if q == 0:
            return complex(0.0), complex(0.0)
        return complex(q), complex(c / q)
    r = math.sqrt(-disc)
    return complex(-0.5 * b, 0.5 * r), complex(-0.5 * b, -0.5 * r)


def extra_amplification(W, alpha: float, L_scale: float = 1.0) -> float:
    """Largest root magnitude of EXTRA on ``s_i = (L/2)|x_i - y_i|^2``, ``r = 0``.

    Each eigenvalue ``w`` of ``W`` contributes the two roots of its companion
    quadratic; the single root ``mu = 1`` of the consensus mode is excluded.
    Below 1 the recursion converges linearly, above 1 it diverges.
    """
    eigs = linalg.sym_eigs(W).eigenvalues
    a = alpha * L_scale
    consensus = int(np.argmin(np.abs(eigs - 1.0)))
    worst = 0.0
    for idx, w in enumerate(eigs):
        roots = list(mode_roots(float(w), a))
        if idx == consensus:
            roots.pop(int(np.argmin([abs(r - 1.0) for r in roots])))
        worst = max(worst, max(abs(r) for r in roots))
    return worst


def companion_matrix(W, alpha: float) -> Array:
    """The ``2n x 2n`` matrix mapping ``(x^{k-1}, x^k)`` to ``(x^k, x^{k+1})``."""
    W = linalg.as_matrix(W)
    n = W.shape[0]
    I = np.eye(n)
    top = np.hstack([np.zeros((n, n)), I])
    bottom = np.hstack([-(I + W) / 2 + alpha * I, (I + W) - alpha * I])
    return np.vstack([top, bottom])


# -- rate certificate ------------------------------------------------------

class ConsensusCertificate(NamedTuple):
    rho2: float | None
    C2: float | None
    C1: float | None
    reason: str | None = None
    cert: CertBundle | None = None

    @property
    def certified(self) -> bool:
        return self.rho2 is not None and self.rho2 < 1.0


def consensus_cert_bundle(prob: ConsensusProblem, alpha: float, theta="best") -> CertBundle:
    """Primal-dual certificate for EXTRA: ``lam = 1/2``, ``gamma = 1/(2 alpha)``, ``A A^T = I - W``."""
    return build_certificate(
        prob.laplacian, np.eye(prob.n), 1.0 / (2.0 * alpha), 0.5, theta,
        P=np.eye(prob.n), L_l=prob.L, mu_l=prob.mu, theorem4=prob.r_is_zero,
    )


def consensus_rate_certificate(prob: ConsensusProblem, alpha: float,
                               theta="best") -> ConsensusCertificate:
    """Linear-rate certificate ``(rho2, C2, C1)`` for EXTRA at stepsize ``alpha``.

    Raises ``ValueError`` when ``alpha`` is not below the extended bound.
    Degenerate cases (single node, no strong convexity) return a certificate
    with ``rho2=None`` and a reason.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    bound = stepsize_bound(prob.W, prob.L, "extended")
    if not alpha < bound:
        raise ValueError(f"alpha={alpha} is not below the extended bound {bound}")
    if not prob.r_is_zero:
        return ConsensusCertificate(None, None, None, "no linear certificate: r must be 0")
    if not np.any(np.abs(prob.laplacian) > 1e-15):
        return ConsensusCertificate(None, None, None, "no linear certificate: A = 0")
    if prob.mu <= 0:
        return ConsensusCertificate(None, None, None, "no linear certificate: tau_l = 0")
    cert = consensus_cert_bundle(prob, alpha, theta)
    if not cert.feasible or cert.rho2 is None:
        why = cert.no_rho2_reason or "; ".join(cert.reasons)
        return ConsensusCertificate(None, cert.C2, cert.C1, f"no linear certificate: {why}", cert)
    return ConsensusCertificate(cert.rho2, cert.C2, cert.C1, None, cert)


def quadratic_fixed_point(prob: ConsensusProblem) -> tuple[Array, Array]:
    """``(X*, U*)`` for quadratic ``s_i`` and ``r = 0``.

    ``X*`` repeats the minimizer of ``sum_i s_i``; ``U* = grad s(X*)``.
    """
    if not prob.r_is_zero:
        raise ValueError("closed form needs r = 0")
    H = np.zeros((prob.p, prob.p))
    rhs = np.zeros(prob.p)
    for o in prob.smooth:
        if o.kind != "quadratic":
            raise ValueError("closed form needs quadratic node functions")
        K, y = o.params["K"], o.params["y"]
        H += K.T @ K
        rhs += K.T @ y
    xbar = linalg.cho_solve(linalg.cholesky(H), rhs)
    X = np.tile(xbar, (prob.n, 1))
    return X, prob.grad(X)


def theorem4_composite(prob: ConsensusProblem, cert: CertBundle, state: ConsensusState,
                       X_star, U_star, lap_pinv: Array | None = None) -> float:
    """``w |y - y*|^2 + |X - X*|^2_{Mlow}`` with ``|y - y*|^2 = tr(dU^T (I - W)^+ dU)``.

    Valid when ``y - y*`` lies in the range of ``A^T``, which holds for the
    ``U^0 = 0`` start.
    """
    if cert.theorem4_weight is None:
        raise ValueError(f"no rho2 certificate: {cert.no_rho2_reason}")
    if lap_pinv is None:
        lap_pinv = linalg.sym_pinv(prob.laplacian)
    dU = state.U - U_star
    dy = float(np.sum(dU * (lap_pinv @ dU)))
    return cert.theorem4_weight * dy + linalg.weighted_norm_sq(state.X - X_star, cert.Mlow)


# -- driver ----------------------------------------------------------------

class ConsensusRecord(NamedTuple):
    k: int
    residual: float
    lyapunov: float | None
    objective: float | None
    dist_to_opt: float | None
    consensus_violation: float


class ConsensusRun(NamedTuple):
    state: ConsensusState
    trace: list
    status: str
    detail: str = ""


def run_extra(prob: ConsensusProblem, alpha: float, X0, max_iters: int = 1000,
              tol: float = 1e-10, blowup: float = 1e6, reference=None,
              thin: int = 1) -> ConsensusRun:
    """Iterate PG-EXTRA; ``status`` is ``converged``, ``max_iters`` or ``diverged``.

    Divergence means the iterate magnitude passed ``blowup`` (or went
    non-finite). The residual is ``|X^{k+1} - X^k|_F``.
    """
    state = pg_extra_initial_state(prob, alpha, X0)
    trace = []

    def record(st):
        dist = None
        if reference is not None:
            dist = float(np.linalg.norm(st.X - reference))
        trace.append(ConsensusRecord(st.k, st.residual, None, prob.objective(st.X),
                                     dist, st.violation))

    record(state)
    if state.residual <= tol:
        return ConsensusRun(state, trace, "converged")
    while state.k < max_iters:
        try:
            state = pg_extra_step(prob, alpha, state, blowup)
        except NumericalDivergence as exc:
            return ConsensusRun(state, trace, "diverged", str(exc))
        done = state.residual <= tol
        if state.k % thin == 0 or done or state.k == max_iters:
            record(state)
        if done:
            return ConsensusRun(state, trace, "converged")
    return ConsensusRun(state, trace, "max_iters")


def quadratic_problem(W, targets, graph: Graph | None = None, weights=None) -> ConsensusProblem:
    """``s_i(x) = (c_i/2) |x - y_i|^2`` and ``r = 0``."""
    Y = np.array(targets, dtype=float)
    if Y.ndim == 1:
        Y = Y.reshape(-1, 1)
    n, p = Y.shape
    c = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    smooth = tuple(quadratic_oracle(math.sqrt(c[i]) * np.eye(p), math.sqrt(c[i]) * Y[i])
                   for i in range(n))
    return ConsensusProblem(W, smooth, (), graph)


def as_problem_spec(prob: ConsensusProblem) -> tuple[ProblemSpec, Array]:
    """The dual problem as an explicit primal-dual instance, for cross-checking.

    The dual variable plays the primal role (``f = 0``, ``h = indicator of
    {0}``) and the stacked node copies ``vec(X)`` (row-major) play the dual role
    with ``l* = s``. ``A`` is an explicit square root of ``I - W`` (Kronecker
    with ``I_p``). Only quadratic ``s_i`` and ``r = 0`` are supported. Returns
    the spec and ``A``.
    """
    if not prob.r_is_zero:
        raise ValueError("explicit form needs r = 0")
    n, p = prob.n, prob.p
    blocks, ys = [], []
    for o in prob.smooth:
        if o.kind != "quadratic":
            raise ValueError("explicit form needs quadratic node functions")
        blocks.append(o.params["K"])
        ys.append(o.params["y"])
    rows = sum(B.shape[0] for B in blocks)
    K = np.zeros((rows, n * p))
    r = 0
    for i, B in enumerate(blocks):
        K[r:r + B.shape[0], i * p:(i + 1) * p] = B
        r += B.shape[0]
    A = np.kron(linalg.sym_sqrt_factor(prob.laplacian), np.eye(p))
    spec = ProblemSpec(zero_oracle(n * p), zero_indicator(n * p),
                       quadratic_oracle(K, np.concatenate(ys)), LinearOperator(A))
    return spec, A
